//! Graphviz DOT export. Vertices are written in id order and arcs in
//! lexicographic order, so equal graphs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::decomposition::Label;
use crate::graph::DefGraph;

/// Fill color used for each decomposition label.
pub fn label_color(label: Label) -> &'static str {
    match label {
        Label::Core => "#d62728",
        Label::Satellite => "#ff7f0e",
        Label::Outside => "#c7c7c7",
    }
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            _ => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Renders `g` as a DOT digraph. `colors` maps a word to a fill color;
/// words missing from the map are drawn without one.
pub fn to_dot(g: &DefGraph, colors: Option<&BTreeMap<String, String>>) -> String {
    let mut s = String::from("digraph definitions {\n  node [shape=ellipse];\n");
    for v in g.vertices() {
        let name = g.name(v);
        match colors.and_then(|c| c.get(name)) {
            Some(color) => {
                let _ = writeln!(s, "  {} [style=filled, fillcolor={}];", quote(name), quote(color));
            }
            None => {
                let _ = writeln!(s, "  {};", quote(name));
            }
        }
    }
    for (u, w) in g.arcs() {
        let _ = writeln!(s, "  {} -> {};", quote(g.name(u)), quote(g.name(w)));
    }
    s.push_str("}\n");
    s
}

/// Colors every labelled word by its label.
pub fn label_colors(labels: &BTreeMap<String, Label>) -> BTreeMap<String, String> {
    labels
        .iter()
        .map(|(w, &l)| (w.clone(), label_color(l).to_string()))
        .collect()
}

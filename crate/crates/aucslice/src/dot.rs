//! Graphviz rendering of a segmentation tree.

use std::fmt::Write;

use aucslice_core::segmentation::SegmentTree;

use crate::format::fixed3;

const INTERNAL_FILL: &str = "#ffffff";
const LEAF_FILL: &str = "#c6dbef";
const FLAGGED_FILL: &str = "#4f7ca8";

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One box per node with its fit and honest statistics; edges carry the split
/// conditions. Leaves flagged as false discoveries get a darker fill.
pub fn tree_to_dot(tree: &SegmentTree) -> String {
    let report = tree.report();
    let mut out = String::from("digraph segments {\n");
    out += "  node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n";
    out += "  edge [fontname=\"Helvetica\", fontsize=10];\n";
    for (row, node) in report.iter().zip(tree.nodes()) {
        let title = if node.parent.is_none() {
            String::from("All data")
        } else {
            row.conditions.last().cloned().unwrap_or_default()
        };
        let mut label = format!(
            "{}\\nfit n={} mean={}",
            escape(&title),
            row.fit_count,
            fixed3(row.fit_mean)
        );
        if let Some(m) = row.honest_mean {
            write!(label, "\\nhonest n={} mean={}", row.est_count, fixed3(m)).unwrap();
        } else if node.honest.is_some() {
            label += "\\nhonest n=0";
        }
        if row.is_leaf && row.false_discovery {
            label += " *";
        }
        let (fill, font) = match (row.is_leaf, row.false_discovery) {
            (false, _) => (INTERNAL_FILL, "black"),
            (true, false) => (LEAF_FILL, "black"),
            (true, true) => (FLAGGED_FILL, "white"),
        };
        writeln!(
            out,
            "  n{} [label=\"{}\", fillcolor=\"{fill}\", fontcolor=\"{font}\"];",
            row.node, label
        )
        .unwrap();
    }
    for (parent, node) in tree.nodes().iter().enumerate() {
        if let Some(split) = &node.split {
            for (child, left) in [(split.left, true), (split.right, false)] {
                writeln!(
                    out,
                    "  n{parent} -> n{child} [label=\"{}\"];",
                    escape(&split.rule.describe(left))
                )
                .unwrap();
            }
        }
    }
    out += "}\n";
    out
}

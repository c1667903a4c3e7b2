//! Game-graph export as Graphviz DOT or JSON.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::solver::GameGraph;
use crate::state::{Move, StateKey};
use crate::strategy::Winner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeFormat {
    Dot,
    Json,
}

impl FromStr for TreeFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(TreeFormat::Dot),
            "json" => Ok(TreeFormat::Json),
            other => Err(format!(
                "unknown tree format `{other}` (expected dot or json)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub label: String,
    pub counts: Vec<u32>,
    pub terminal: bool,
    /// Whether the player about to move here wins under optimal play.
    pub mover_wins: bool,
    pub monovariant: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    #[serde(rename = "move")]
    pub mv: Move,
    pub on_winning_line: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub n: u32,
    pub winner: Winner,
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
}

impl TreeDocument {
    pub fn build(graph: &GameGraph) -> TreeDocument {
        let states = graph.states_bfs();
        let ids: HashMap<StateKey, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.key(), i))
            .collect();
        let line: HashSet<(StateKey, Move)> = graph
            .principal_variation()
            .into_iter()
            .map(|(s, m)| (s.key(), m))
            .collect();

        let mut nodes = Vec::with_capacity(states.len());
        let mut edges = Vec::new();
        for (id, s) in states.iter().enumerate() {
            let value = graph.value(s).expect("reachable");
            nodes.push(TreeNode {
                id,
                label: s.to_string(),
                counts: s.counts().to_vec(),
                terminal: s.is_terminal(),
                mover_wins: value.mover_wins,
                monovariant: s.monovariant(),
            });
            let key = s.key();
            for m in s.legal_moves() {
                let child = s.apply(m).expect("legal");
                edges.push(TreeEdge {
                    from: id,
                    to: ids[&child.key()],
                    mv: m,
                    on_winning_line: line.contains(&(key.clone(), m)),
                });
            }
        }
        TreeDocument {
            n: graph.n(),
            winner: graph.report().winner,
            nodes,
            edges,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph zeckendorf_{} {{", self.n).unwrap();
        writeln!(out, "  label=\"n = {}, winner: {}\";", self.n, self.winner).unwrap();
        writeln!(
            out,
            "  node [shape=box, style=filled, fontname=\"Helvetica\"];"
        )
        .unwrap();
        for node in &self.nodes {
            // red: mover wins, blue: mover loses
            let fill = if node.mover_wins {
                "#f4a6a6"
            } else {
                "#a6c8f4"
            };
            writeln!(
                out,
                "  s{} [label=\"{}\", fillcolor=\"{}\"];",
                node.id,
                escape(&node.label),
                fill
            )
            .unwrap();
        }
        for e in &self.edges {
            let style = if e.on_winning_line {
                ", color=\"green\", penwidth=2.5"
            } else {
                ""
            };
            writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"{}];",
                e.from, e.to, e.mv, style
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render(graph: &GameGraph, format: TreeFormat) -> String {
    let doc = TreeDocument::build(graph);
    match format {
        TreeFormat::Dot => doc.to_dot(),
        TreeFormat::Json => serde_json::to_string_pretty(&doc).expect("serializable"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GameError;
    use crate::solver::Solver;

    fn doc(n: u32) -> TreeDocument {
        TreeDocument::build(&Solver::default().analyze(n).unwrap())
    }

    #[test]
    fn n2_single_edge() {
        let d = doc(2);
        assert_eq!((d.nodes.len(), d.edges.len()), (2, 1));
        assert!(d.edges[0].on_winning_line);
    }

    #[test]
    fn n4_graph() {
        let d = doc(4);
        let labels: Vec<&str> = d.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels, ["{1^4}", "{1^2 ∧ 2}", "{2^2}", "{1 ∧ 3}"]);
        assert_eq!(d.edges.len(), 4);
        let line: Vec<Move> = d
            .edges
            .iter()
            .filter(|e| e.on_winning_line)
            .map(|e| e.mv)
            .collect();
        assert_eq!(line, vec![Move::MergeOnes, Move::Combine(1)]);
    }

    #[test]
    fn n9_dot_shape() {
        let text = Solver::default().export_tree(9, TreeFormat::Dot).unwrap();
        assert!(text.starts_with("digraph zeckendorf_9 {"));
        assert!(text.trim_end().ends_with('}'));
        assert!(text.contains("color=\"green\""));
        let d = doc(9);
        let edge_lines = text.lines().filter(|l| l.contains("->")).count();
        assert_eq!(edge_lines, d.edges.len());
    }

    #[test]
    fn json_round_trips() {
        let text = Solver::default().export_tree(6, TreeFormat::Json).unwrap();
        let back: TreeDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc(6));
    }

    #[test]
    fn export_limit() {
        assert_eq!(
            Solver::default().export_tree(30, TreeFormat::Dot),
            Err(GameError::Capacity {
                what: "export",
                n: 30,
                limit: 15
            })
        );
        assert!(Solver::default().export_tree(15, TreeFormat::Json).is_ok());
    }

    #[test]
    fn deterministic_output() {
        let a = Solver::default().export_tree(12, TreeFormat::Dot).unwrap();
        let b = Solver::sequential()
            .export_tree(12, TreeFormat::Dot)
            .unwrap();
        assert_eq!(a, b);
    }
}

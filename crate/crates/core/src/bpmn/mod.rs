//! BPMN process graphs: assembly from mentions and relations, gateway
//! closure, DOT output.

pub mod close;
pub mod dot;
pub mod graph;

pub use close::close_gateways;
pub use dot::{emit_dot, parse_dot, DotGraph};
pub use graph::{
    assemble_graph, represented_mentions, AssembleConfig, BpmnEdge, BpmnGraph, BpmnNode, EdgeKind,
    NodeKind,
};

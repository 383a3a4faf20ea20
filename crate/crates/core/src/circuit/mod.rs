//! Dense emulation of the block-encoding circuits.

mod block;
mod gates;
mod layout;
mod lcu;
mod oracles;

pub use block::{
    contraction_dilation, exponentiate_block_encoding, extract_block, hermitian_dilation, project_block,
    verify_block_encoding, BlockEncoding, BlockReport, CONTRACTION_SLACK,
};
pub use gates::{hadamard, ry, s_gate, Circuit, Control, GateKind, GateOp};
pub use layout::{Register, RegisterLayout, RyPlacement, MAX_QUBITS, RY_ANCILLA, SYSTEM};
pub use lcu::{
    assemble_lcu_target, build_fig1_circuit, coefficient_angle, fig1_block_encoding, fig1_circuit,
    fig1_proportionality, fit_proportionality, ProportionalityFit, TARGET_CONSISTENCY,
};
pub use oracles::{comp_oracle, ham_t_oracle, interaction_ham_t, ANCILLA, INDEX};

//! Gate set and circuit representation, compilation of single-qubit circuits
//! into per-channel RF segment schedules with virtual-Z frame tracking, and
//! phase-continuous waveform rendering.
//!
//! The hardware picture: every addressing channel is one AOM driven by one
//! AWG channel around a 110 MHz carrier. Equatorial rotations are drive
//! segments (light on, TTL high). Z rotations cost no light time: they lower
//! to a short light-off segment at a slightly detuned frequency whose
//! accumulated RF phase, carried forward by phase continuity, offsets every
//! later pulse. Both Raman tones take opposite AOM diffraction orders, so
//! qubit-level phases and detunings are twice their RF values.

pub mod circuit;
pub mod clifford;
pub mod compile;
pub mod raman;
pub mod render;
pub mod schedule;

pub use circuit::{Circuit, CircuitError, CircuitParseError, GateOp};
pub use clifford::{
    clifford_table, entry_unitary, inverse_to_one, CliffordEntry, NonCliffordError,
};
pub use compile::{compile_circuit, CompileError};
pub use raman::RamanConfig;
pub use render::{
    demodulate_against_reference, render_waveform, write_waveform_files, RenderError, SegmentSpan,
    Waveform, WaveformHeader,
};
pub use schedule::{ChannelSchedule, CompiledCircuit, DocumentError, Segment, SegmentKind};

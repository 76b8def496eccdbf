//! RF segment schedules and their on-disk document format.

use fiberq_core::SiteId;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

pub const SCHEDULE_DOCUMENT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Light on: drives the qubit.
    Drive,
    /// Light off, RF detuned from the carrier: rotates the phase frame.
    PhaseShift,
    /// Light off, nothing playing.
    Idle,
}

impl SegmentKind {
    fn name(self) -> &'static str {
        match self {
            SegmentKind::Drive => "drive",
            SegmentKind::PhaseShift => "phase_shift",
            SegmentKind::Idle => "idle",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "drive" => Some(SegmentKind::Drive),
            "phase_shift" => Some(SegmentKind::PhaseShift),
            "idle" => Some(SegmentKind::Idle),
            _ => None,
        }
    }
}

/// One constant-parameter RF interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    /// RF output frequency (Hz).
    pub rf_frequency: f64,
    /// Programmed RF phase offset of this segment (rad). Qubit-level pulse
    /// phases are twice this value.
    pub rf_phase: f64,
    /// Relative output amplitude: 1 for drive segments, 0 for light-off.
    pub amplitude: f64,
    /// Duration (s), strictly positive.
    pub duration: f64,
    /// Mirrored onto the TTL track that gates the addressing light.
    pub light_on: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("segment {index}: duration {duration} must be positive")]
    BadDuration { index: usize, duration: f64 },
    #[error("segment {index}: {kind:?} segments must have light_on = {expected}")]
    LightMismatch {
        index: usize,
        kind: SegmentKind,
        expected: bool,
    },
}

/// Time-ordered RF segments for one addressing channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSchedule {
    pub channel: SiteId,
    /// The channel's resonant RF frequency (carrier + per-site fine
    /// detuning); phase-shift segments are detuned relative to this.
    pub ref_frequency: f64,
    pub segments: Vec<Segment>,
}

impl ChannelSchedule {
    pub fn new(channel: SiteId, ref_frequency: f64) -> Self {
        ChannelSchedule {
            channel,
            ref_frequency,
            segments: Vec::new(),
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Total time the addressing light is on.
    pub fn light_on_duration(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.light_on)
            .map(|s| s.duration)
            .sum()
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        for (index, s) in self.segments.iter().enumerate() {
            if !(s.duration > 0.0) {
                return Err(ScheduleError::BadDuration {
                    index,
                    duration: s.duration,
                });
            }
            let expected = matches!(s.kind, SegmentKind::Drive);
            if s.light_on != expected {
                return Err(ScheduleError::LightMismatch {
                    index,
                    kind: s.kind,
                    expected,
                });
            }
        }
        Ok(())
    }

    /// Render the structured text document for this channel.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# fiberq channel schedule v{SCHEDULE_DOCUMENT_VERSION}"
        );
        let _ = writeln!(out, "channel {}", self.channel);
        let _ = writeln!(out, "ref_frequency_hz {}", self.ref_frequency);
        for s in &self.segments {
            let _ = writeln!(
                out,
                "segment {} freq_hz={} phase_rad={} amplitude={} duration_s={} light={}",
                s.kind.name(),
                s.rf_frequency,
                s.rf_phase,
                s.amplitude,
                s.duration,
                if s.light_on { "on" } else { "off" },
            );
        }
        out
    }

    /// Parse a document produced by [`ChannelSchedule::to_document`].
    pub fn from_document(text: &str) -> Result<Self, DocumentError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(DocumentError::Empty)?;
        let version: u32 = header
            .strip_prefix("# fiberq channel schedule v")
            .and_then(|v| v.trim().parse().ok())
            .ok_or(DocumentError::BadHeader)?;
        if version != SCHEDULE_DOCUMENT_VERSION {
            return Err(DocumentError::UnsupportedVersion(version));
        }
        let mut channel = None;
        let mut ref_frequency = None;
        let mut segments = Vec::new();
        for (index, line) in lines {
            let line_no = index + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| DocumentError::BadLine {
                line: line_no,
                message: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("channel ") {
                channel = Some(SiteId(
                    rest.trim().parse().map_err(|_| bad("bad channel id"))?,
                ));
            } else if let Some(rest) = line.strip_prefix("ref_frequency_hz ") {
                ref_frequency = Some(rest.trim().parse().map_err(|_| bad("bad frequency"))?);
            } else if let Some(rest) = line.strip_prefix("segment ") {
                let mut words = rest.split_whitespace();
                let kind = words
                    .next()
                    .and_then(SegmentKind::from_name)
                    .ok_or_else(|| bad("bad segment kind"))?;
                let mut seg = Segment {
                    kind,
                    rf_frequency: f64::NAN,
                    rf_phase: f64::NAN,
                    amplitude: f64::NAN,
                    duration: f64::NAN,
                    light_on: matches!(kind, SegmentKind::Drive),
                };
                for word in words {
                    let (key, value) = word.split_once('=').ok_or_else(|| bad("bad field"))?;
                    match key {
                        "freq_hz" => {
                            seg.rf_frequency = value.parse().map_err(|_| bad("bad freq"))?
                        }
                        "phase_rad" => {
                            seg.rf_phase = value.parse().map_err(|_| bad("bad phase"))?
                        }
                        "amplitude" => {
                            seg.amplitude = value.parse().map_err(|_| bad("bad amplitude"))?
                        }
                        "duration_s" => {
                            seg.duration = value.parse().map_err(|_| bad("bad duration"))?
                        }
                        "light" => seg.light_on = value == "on",
                        _ => return Err(bad(&format!("unknown field `{key}`"))),
                    }
                }
                if seg.rf_frequency.is_nan() || seg.duration.is_nan() {
                    return Err(bad("segment missing freq_hz or duration_s"));
                }
                segments.push(seg);
            } else {
                return Err(bad("unrecognized line"));
            }
        }
        Ok(ChannelSchedule {
            channel: channel.ok_or(DocumentError::MissingChannel)?,
            ref_frequency: ref_frequency.ok_or(DocumentError::MissingRefFrequency)?,
            segments,
        })
    }

    /// FNV-1a digest of the document text, for provenance metadata.
    pub fn digest(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.to_document().bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DocumentError {
    #[error("empty schedule document")]
    Empty,
    #[error("missing or malformed schedule header")]
    BadHeader,
    #[error("unsupported schedule document version {0}")]
    UnsupportedVersion(u32),
    #[error("document has no channel line")]
    MissingChannel,
    #[error("document has no ref_frequency_hz line")]
    MissingRefFrequency,
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
}

/// A compiled circuit: one schedule per targeted channel plus the absolute
/// end time of each barrier-delimited moment.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledCircuit {
    pub channels: Vec<ChannelSchedule>,
    pub moment_ends: Vec<f64>,
}

impl CompiledCircuit {
    pub fn total_duration(&self) -> f64 {
        self.moment_ends.last().copied().unwrap_or(0.0)
    }

    pub fn channel(&self, site: SiteId) -> Option<&ChannelSchedule> {
        self.channels.iter().find(|c| c.channel == site)
    }
}

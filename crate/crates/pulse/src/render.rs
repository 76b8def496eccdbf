//! Phase-continuous waveform rendering and binary export.

use crate::schedule::ChannelSchedule;
use fiberq_core::SiteId;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const WAVEFORM_FORMAT_VERSION: u32 = 1;

/// Sample range covered by one schedule segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpan {
    pub segment: usize,
    pub start_sample: u64,
    pub sample_count: u64,
}

/// Rendered RF samples plus the TTL gating track.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    pub channel: SiteId,
    pub sample_rate: f64,
    /// RF samples, one f32 per sample.
    pub samples: Vec<f32>,
    /// TTL track packed LSB-first, one bit per sample.
    pub ttl: Vec<u8>,
    pub sample_count: u64,
    pub spans: Vec<SegmentSpan>,
}

/// Sidecar header written next to the binary sample files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformHeader {
    pub format_version: u32,
    pub channel: SiteId,
    pub sample_rate: f64,
    pub sample_count: u64,
    pub spans: Vec<SegmentSpan>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("sample rate {given} Hz below the safe bound of {required} Hz (4x the highest RF frequency)")]
    SampleRateTooLow { given: f64, required: f64 },
    #[error("sample rate must be positive and finite, got {0}")]
    BadSampleRate(f64),
}

impl Waveform {
    pub fn ttl_bit(&self, sample: u64) -> bool {
        let byte = self.ttl[(sample / 8) as usize];
        byte & (1 << (sample % 8)) != 0
    }
}

/// Render a channel schedule at `sample_rate`.
///
/// Emits amplitude * sin(Phi + rf_phase) with one phase accumulator Phi that
/// advances by 2 pi f / fs per sample and runs continuously across segment
/// boundaries. That continuity is what turns a detuned light-off segment
/// into a lasting phase offset on everything after it. The TTL track mirrors
/// each segment's light flag.
pub fn render_waveform(
    schedule: &ChannelSchedule,
    sample_rate: f64,
) -> Result<Waveform, RenderError> {
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(RenderError::BadSampleRate(sample_rate));
    }
    let f_max = schedule
        .segments
        .iter()
        .map(|s| s.rf_frequency)
        .fold(0.0f64, f64::max);
    let required = 4.0 * f_max;
    if sample_rate < required {
        return Err(RenderError::SampleRateTooLow {
            given: sample_rate,
            required,
        });
    }

    let total: u64 = (schedule.total_duration() * sample_rate).round() as u64;
    let mut samples = Vec::with_capacity(total as usize);
    let mut ttl = vec![0u8; total.div_ceil(8) as usize];
    let mut spans = Vec::with_capacity(schedule.segments.len());

    let mut phase = 0.0f64;
    let mut t_end = 0.0f64;
    let mut cursor: u64 = 0;
    for (index, seg) in schedule.segments.iter().enumerate() {
        t_end += seg.duration;
        let seg_end = (t_end * sample_rate).round() as u64;
        let count = seg_end.saturating_sub(cursor);
        spans.push(SegmentSpan {
            segment: index,
            start_sample: cursor,
            sample_count: count,
        });
        let step = TAU * seg.rf_frequency / sample_rate;
        for k in cursor..seg_end {
            samples.push((seg.amplitude * (phase + seg.rf_phase).sin()) as f32);
            if seg.light_on {
                ttl[(k / 8) as usize] |= 1 << (k % 8);
            }
            phase = (phase + step) % TAU;
        }
        cursor = seg_end;
    }
    debug_assert_eq!(cursor, total);

    Ok(Waveform {
        channel: schedule.channel,
        sample_rate,
        samples,
        ttl,
        sample_count: total,
        spans,
    })
}

/// Recover the phase of one rendered segment against a reference carrier.
///
/// The reference is a phase-continuous accumulator at `reference_freq`
/// starting from zero at sample 0 (the renderer's own convention). A
/// least-squares fit of a sin + b cos over the segment's samples returns
/// atan2(b, a); for a segment whose rf_frequency equals the reference this
/// is the programmed rf_phase plus whatever extra phase earlier detuned
/// segments accumulated. Returns None for light-off (zero amplitude)
/// segments.
pub fn demodulate_against_reference(
    waveform: &Waveform,
    span_index: usize,
    reference_freq: f64,
) -> Option<f64> {
    let span = waveform.spans.get(span_index)?;
    if span.sample_count < 8 {
        return None;
    }
    let step = TAU * reference_freq / waveform.sample_rate;
    // Rebuild the reference phase at the span start with the same stepping
    // arithmetic as the renderer.
    let mut theta = 0.0f64;
    for _ in 0..span.start_sample {
        theta = (theta + step) % TAU;
    }
    let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..span.sample_count {
        let y = waveform.samples[(span.start_sample + k) as usize] as f64;
        let (s, c) = theta.sin_cos();
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
        theta = (theta + step) % TAU;
    }
    // Solve [ss sc; sc cc] [a; b] = [ys; yc].
    let det = ss * cc - sc * sc;
    if det.abs() < 1e-9 {
        return None;
    }
    let a = (ys * cc - yc * sc) / det;
    let b = (yc * ss - ys * sc) / det;
    if a.hypot(b) < 1e-6 {
        return None;
    }
    Some(b.atan2(a))
}

/// Write the waveform binaries: raw little-endian f32 samples, the packed
/// TTL bitstream and the JSON sidecar header. Returns the written paths.
pub fn write_waveform_files(
    waveform: &Waveform,
    dir: &Path,
    stem: &str,
) -> std::io::Result<Vec<PathBuf>> {
    let header = WaveformHeader {
        format_version: WAVEFORM_FORMAT_VERSION,
        channel: waveform.channel,
        sample_rate: waveform.sample_rate,
        sample_count: waveform.sample_count,
        spans: waveform.spans.clone(),
    };
    let mut sample_bytes = Vec::with_capacity(waveform.samples.len() * 4);
    for s in &waveform.samples {
        sample_bytes.extend_from_slice(&s.to_le_bytes());
    }
    let entries = [
        (format!("{stem}.f32"), sample_bytes),
        (format!("{stem}.ttl"), waveform.ttl.clone()),
        (
            format!("{stem}.header.json"),
            serde_json::to_vec_pretty(&header).expect("header serializes"),
        ),
    ];
    let mut written = Vec::new();
    for (name, bytes) in entries {
        let path = dir.join(&name);
        let tmp = dir.join(format!("{name}.tmp"));
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, &path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{Segment, SegmentKind};

    fn drive(duration: f64, rf_phase: f64) -> Segment {
        Segment {
            kind: SegmentKind::Drive,
            rf_frequency: 110.0e6,
            rf_phase,
            amplitude: 1.0,
            duration,
            light_on: true,
        }
    }

    fn shift(freq: f64, duration: f64) -> Segment {
        Segment {
            kind: SegmentKind::PhaseShift,
            rf_frequency: freq,
            rf_phase: 0.0,
            amplitude: 0.0,
            duration,
            light_on: false,
        }
    }

    fn schedule(segments: Vec<Segment>) -> ChannelSchedule {
        ChannelSchedule {
            channel: SiteId(1),
            ref_frequency: 110.0e6,
            segments,
        }
    }

    #[test]
    fn sample_count_matches_duration() {
        let s = schedule(vec![drive(2.0e-6, 0.0), shift(110.5e6, 0.5e-7)]);
        let fs = 1.0e9;
        let wf = render_waveform(&s, fs).unwrap();
        assert_eq!(wf.sample_count, (s.total_duration() * fs).round() as u64);
        assert_eq!(wf.samples.len() as u64, wf.sample_count);
        let span_total: u64 = wf.spans.iter().map(|sp| sp.sample_count).sum();
        assert_eq!(span_total, wf.sample_count);
    }

    #[test]
    fn rejects_low_sample_rate() {
        let s = schedule(vec![drive(1e-6, 0.0)]);
        let err = render_waveform(&s, 200.0e6).unwrap_err();
        assert_eq!(
            err,
            RenderError::SampleRateTooLow {
                given: 200.0e6,
                required: 440.0e6
            }
        );
        assert!(render_waveform(&s, 440.0e6).is_ok());
    }

    #[test]
    fn pure_sinusoid_demodulates_to_programmed_phase() {
        for phase in [-1.2, -0.3, 0.0, 0.7, 1.5] {
            let s = schedule(vec![drive(2.0e-6, phase)]);
            let wf = render_waveform(&s, 1.0e9).unwrap();
            let recovered = demodulate_against_reference(&wf, 0, 110.0e6).unwrap();
            assert!(
                (recovered - phase).abs() < 1e-6,
                "phase {phase}: recovered {recovered}"
            );
        }
    }

    #[test]
    fn detuned_segment_leaves_a_lasting_phase_step() {
        // 0.5 us at +0.5 MHz between two carrier segments: the RF phase
        // after the light-off window steps by pi/2.
        let s = schedule(vec![
            drive(2.0e-6, 0.0),
            shift(110.5e6, 0.5e-6),
            drive(2.0e-6, 0.0),
        ]);
        let wf = render_waveform(&s, 1.0e9).unwrap();
        let before = demodulate_against_reference(&wf, 0, 110.0e6).unwrap();
        let after = demodulate_against_reference(&wf, 2, 110.0e6).unwrap();
        let step = fiberq_core::wrap_angle(after - before);
        assert!(
            (step - std::f64::consts::FRAC_PI_2).abs() < 1e-6,
            "step {step}"
        );
    }

    #[test]
    fn ttl_mirrors_light_flag() {
        let s = schedule(vec![
            drive(1.0e-6, 0.0),
            shift(110.5e6, 0.5e-6),
            drive(1.0e-6, 0.0),
        ]);
        let wf = render_waveform(&s, 1.0e9).unwrap();
        for span in &wf.spans {
            let expected = s.segments[span.segment].light_on;
            for k in 0..span.sample_count {
                assert_eq!(wf.ttl_bit(span.start_sample + k), expected);
            }
        }
        // light-off segments demodulate to nothing
        assert_eq!(demodulate_against_reference(&wf, 1, 110.0e6), None);
    }

    #[test]
    fn file_export_roundtrip() {
        let s = schedule(vec![drive(1.0e-6, 0.4)]);
        let wf = render_waveform(&s, 1.0e9).unwrap();
        let dir = std::env::temp_dir().join(format!("fiberq-render-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let paths = write_waveform_files(&wf, &dir, "chan_01").unwrap();
        assert_eq!(paths.len(), 3);
        let raw = std::fs::read(dir.join("chan_01.f32")).unwrap();
        assert_eq!(raw.len(), wf.samples.len() * 4);
        let first = f32::from_le_bytes(raw[0..4].try_into().unwrap());
        assert_eq!(first, wf.samples[0]);
        let header: WaveformHeader =
            serde_json::from_slice(&std::fs::read(dir.join("chan_01.header.json")).unwrap())
                .unwrap();
        assert_eq!(header.sample_count, wf.sample_count);
        assert_eq!(header.spans, wf.spans);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

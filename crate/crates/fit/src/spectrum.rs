//! Frequency initialization from a zero-padded discrete spectrum.

use std::f64::consts::TAU;

/// Locate the dominant oscillation frequency of a (near-)uniformly sampled
/// series by scanning a zero-padded discrete spectrum and refining the peak
/// with parabolic interpolation. Returns (frequency, peak power fraction),
/// or None when the series is too short or carries no oscillation power.
pub fn dominant_frequency(t: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = t.len();
    if n < 4 {
        return None;
    }
    let span = t[n - 1] - t[0];
    if !(span > 0.0) {
        return None;
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let power_total: f64 = y.iter().map(|&v| (v - mean) * (v - mean)).sum();
    if power_total < 1e-24 {
        return None;
    }

    // Grid with 8x zero-padding up to the mean-rate Nyquist frequency.
    let pad = 8usize;
    let df = 1.0 / (pad as f64 * span);
    let f_nyquist = 0.5 * (n as f64 - 1.0) / span;
    let bins = ((f_nyquist / df) as usize).max(2);

    let mut best = (0usize, 0.0f64);
    let mut powers = vec![0.0; bins + 1];
    for m in 1..=bins {
        let f = m as f64 * df;
        let (mut re, mut im) = (0.0, 0.0);
        for (&tk, &yk) in t.iter().zip(y) {
            let (s, c) = (TAU * f * (tk - t[0])).sin_cos();
            re += (yk - mean) * c;
            im -= (yk - mean) * s;
        }
        let p = re * re + im * im;
        powers[m] = p;
        if p > best.1 {
            best = (m, p);
        }
    }
    if best.1 <= 0.0 {
        return None;
    }

    let m = best.0;
    let refined = if m > 1 && m < bins {
        let (pl, p0, pr) = (powers[m - 1], powers[m], powers[m + 1]);
        let denom = pl - 2.0 * p0 + pr;
        let shift = if denom.abs() > 1e-300 {
            (0.5 * (pl - pr) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        (m as f64 + shift) * df
    } else {
        m as f64 * df
    };
    let fraction = best.1 / (power_total * power_total).max(1e-300);
    Some((refined, fraction))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_clean_tone() {
        let f = 4.0e3;
        let t: Vec<f64> = (0..120).map(|k| k as f64 * 2e-5).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&x| 0.5 + 0.5 * (TAU * f * x + 0.7).cos())
            .collect();
        let (found, _) = dominant_frequency(&t, &y).unwrap();
        assert!((found - f).abs() < 25.0, "found {found}");
    }

    #[test]
    fn finds_a_slow_fraction_of_a_cycle() {
        // ~0.7 cycles across the window still peaks near the right bin.
        let f = 23.6;
        let t: Vec<f64> = (0..240).map(|k| k as f64 * 30e-3 / 239.0).collect();
        let y: Vec<f64> = t.iter().map(|&x| 0.5 - 0.5 * (TAU * f * x).cos()).collect();
        let (found, _) = dominant_frequency(&t, &y).unwrap();
        assert!((found - f).abs() < 8.0, "found {found}");
    }

    #[test]
    fn flat_series_yields_none() {
        let t: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let y = vec![0.5; 50];
        assert!(dominant_frequency(&t, &y).is_none());
    }
}

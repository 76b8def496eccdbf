//! Crosstalk characterization: address each site in turn, fit every site's
//! Rabi frequency, and report the frequency ratios.

use crate::model::SystemModel;
use crate::rabi::{run_rabi, RabiScanSpec};
use crate::RunError;
use fiberq_array::CrosstalkMatrix;
use fiberq_core::SiteId;
use fiberq_fit::{fit_damped_cosine, FitFlag};
use serde::{Deserialize, Serialize};

pub const CROSSTALK_SCAN_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct CrosstalkScanSpec {
    /// Sites to address in turn; empty means all.
    pub addressed: Vec<SiteId>,
    /// Longest Raman pulse used for the slow (crosstalk) oscillations (s).
    pub duration_budget: f64,
    /// Points on the long grid.
    pub long_points: usize,
    /// Cycles of the addressed site's fast oscillation in the short grid.
    pub short_cycles: f64,
    /// Points on the short grid.
    pub short_points: usize,
    pub shots_per_point: u32,
    pub analytic: bool,
}

impl Default for CrosstalkScanSpec {
    fn default() -> Self {
        CrosstalkScanSpec {
            addressed: Vec::new(),
            duration_budget: 30e-3,
            long_points: 240,
            short_cycles: 2.5,
            short_points: 96,
            shots_per_point: 0,
            analytic: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkScanEntry {
    pub addressed: SiteId,
    pub affected: SiteId,
    /// Fitted Omega_affected / Omega_addressed; for an upper bound, the
    /// resolution-limited value.
    pub ratio: f64,
    /// True when no oscillation was resolvable within the budget.
    pub is_upper_bound: bool,
    /// Fitted oscillation frequency at the affected site (Hz), when
    /// resolved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_freq_hz: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkScanResult {
    pub format_version: u32,
    pub n_sites: usize,
    /// Frequency resolution of the long grid, 1 / (2 * budget) (Hz).
    pub resolution_hz: f64,
    pub master_seed: u64,
    pub entries: Vec<CrosstalkScanEntry>,
}

impl CrosstalkScanResult {
    pub fn entry(&self, addressed: SiteId, affected: SiteId) -> Option<&CrosstalkScanEntry> {
        self.entries
            .iter()
            .find(|e| e.addressed == addressed && e.affected == affected)
    }

    /// Collapse into a matrix; bound entries carry their bound value.
    pub fn as_matrix(&self) -> CrosstalkMatrix {
        let n = self.n_sites;
        let mut rows = vec![vec![0.0; n]; n];
        for k in 0..n {
            rows[k][k] = 1.0;
        }
        for e in &self.entries {
            rows[e.affected.index()][e.addressed.index()] = e.ratio.clamp(0.0, 1.0);
        }
        CrosstalkMatrix::from_rows(rows).expect("scan ratios form a valid matrix")
    }
}

fn linspace(end: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| end * k as f64 / (points as f64 - 1.0))
        .collect()
}

/// Independent sub-run seeds per addressed site and grid.
fn sub_seed(master_seed: u64, salt: u64, k: usize) -> u64 {
    master_seed
        .wrapping_add(salt)
        .wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn run_crosstalk_scan(
    spec: &CrosstalkScanSpec,
    model: &SystemModel,
    master_seed: u64,
) -> Result<CrosstalkScanResult, RunError> {
    model.validate()?;
    if !(spec.duration_budget > 0.0) {
        return Err(RunError::Spec("duration_budget: must be positive".into()));
    }
    if spec.short_points < 8 || spec.long_points < 8 {
        return Err(RunError::Spec("grids need at least 8 points".into()));
    }
    let addressed: Vec<SiteId> = if spec.addressed.is_empty() {
        model.site_ids().collect()
    } else {
        spec.addressed.clone()
    };
    let resolution = 1.0 / (2.0 * spec.duration_budget);

    let mut entries = Vec::new();
    for (k, &site) in addressed.iter().enumerate() {
        let omega = model.rabi[site.index()];
        if omega <= 0.0 {
            return Err(RunError::Spec(format!(
                "site {site} has zero Rabi frequency"
            )));
        }

        // Short scan: pin the addressed site's own frequency.
        let short = run_rabi(
            &RabiScanSpec {
                addressed: vec![site],
                durations: linspace(spec.short_cycles / omega, spec.short_points),
                shots_per_point: spec.shots_per_point,
                analytic: spec.analytic,
                measured: Some(vec![site]),
            },
            model,
            sub_seed(master_seed, 0x7368_6f72_74, k),
        )?;
        let own = &short.series[0];
        let own_fit = fit_damped_cosine(&short.control, &own.mean, None, None)?;
        let f_addressed = own_fit.value("frequency_hz").unwrap_or(0.0);
        if !own_fit.converged || f_addressed <= 0.0 {
            return Err(RunError::Spec(format!(
                "could not fit the addressed site {site} oscillation"
            )));
        }

        // Long scan: everything else.
        let others: Vec<SiteId> = model.site_ids().filter(|&s| s != site).collect();
        let long = run_rabi(
            &RabiScanSpec {
                addressed: vec![site],
                durations: linspace(spec.duration_budget, spec.long_points),
                shots_per_point: spec.shots_per_point,
                analytic: spec.analytic,
                measured: Some(others.clone()),
            },
            model,
            sub_seed(master_seed, 0x6c6f_6e67, k),
        )?;
        for series in &long.series {
            let fit = fit_damped_cosine(&long.control, &series.mean, None, None)?;
            let amp = fit.value("amplitude").unwrap_or(0.0);
            let freq = fit.value("frequency_hz").unwrap_or(0.0);
            let resolvable = fit.converged
                && !fit.has_flag(FitFlag::FrequencyUnidentifiable)
                && freq >= resolution
                && amp > 0.02;
            if resolvable {
                entries.push(CrosstalkScanEntry {
                    addressed: site,
                    affected: series.site,
                    ratio: freq / f_addressed,
                    is_upper_bound: false,
                    fitted_freq_hz: Some(freq),
                });
            } else {
                entries.push(CrosstalkScanEntry {
                    addressed: site,
                    affected: series.site,
                    ratio: resolution / f_addressed,
                    is_upper_bound: true,
                    fitted_freq_hz: None,
                });
            }
        }
    }

    Ok(CrosstalkScanResult {
        format_version: CROSSTALK_SCAN_VERSION,
        n_sites: model.n_sites,
        resolution_hz: resolution,
        master_seed,
        entries,
    })
}

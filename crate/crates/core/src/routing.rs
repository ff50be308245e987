//! Transfer-time detection, selectivity reporting and parameter sweeps.

use alloc::vec::Vec;

use crate::cscq::{field_population, mean_photon_number, transfer_fidelity, Cscq, PhaseConvention};
use crate::dynamics::{evolve_series, uniform_grid, SpectralPropagator, TimeSeries};
use crate::error::{Error, Result};
use crate::network::{build_coupling_matrix, mode_ordinal, ModeIndex, NetworkConfig};

/// Default grid density for selectivity scans.
pub const DEFAULT_GRID_POINTS: usize = 4001;

/// Minimum receiver population for a scan to count as a transfer.
pub const PEAK_FLOOR: f64 = 0.5;

/// Default scan horizon: one period of the effective fourth-order
/// transfer rate g^2 J^2 / delta^3 of the active set. The excitons talk
/// through the J-coupled field lattice while detuned by delta, so the
/// dispersive time scale is delta^3 / (g^2 J^2), not delta / g^2.
pub fn default_horizon(config: &NetworkConfig) -> f64 {
    let set = config.active_set();
    let d = libm::fabs(set.delta);
    let rate = set.g * set.g * config.hop * config.hop / (d * d * d);
    2.0 * core::f64::consts::PI / rate
}

/// Per-configuration routing result.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    /// Receiver index the transfer targeted (the active set).
    pub target: usize,
    /// Peak time, refined by parabolic interpolation.
    pub t_star: f64,
    /// Population of the target receiver exciton at t_star.
    pub peak_population: f64,
    /// Max off-target receiver-exciton population on [0, t_star].
    pub crosstalk: f64,
    /// Max of |1 - (U_s + U_r_target)| on [0, t_star].
    pub confinement_defect: f64,
    /// Max total field population F(t) on [0, t_star].
    pub max_field_population: f64,
    /// Qubit transfer fidelity at t_star.
    pub fidelity_at_t_star: f64,
    /// Mean photon number at t_star.
    pub mean_photons_at_t_star: f64,
}

/// First time of the global population maximum at the target receiver,
/// refined through the parabola of the three grid points around the
/// discrete maximum. Errors with `NoTransferPeak` if the maximum stays
/// below `floor`.
pub fn find_transfer_time(
    series: &TimeSeries,
    target: usize,
    n_receivers: usize,
    floor: f64,
) -> Result<(f64, f64)> {
    let ord = ModeIndex::ReceiverExciton(target).ordinal(n_receivers)?;
    if series.rows.is_empty() {
        return Err(Error::BadGrid("empty series".into()));
    }
    let pops: Vec<f64> = series.rows.iter().map(|r| r.population(ord)).collect();
    let mut best = 0usize;
    for (i, &p) in pops.iter().enumerate() {
        if p > pops[best] {
            best = i;
        }
    }
    if pops[best] < floor {
        return Err(Error::NoTransferPeak { max_population: pops[best], floor });
    }
    if best == 0 || best + 1 == pops.len() {
        return Ok((series.grid[best], pops[best]));
    }
    // Parabola through the three points around the discrete max.
    let (t0, t1, t2) = (series.grid[best - 1], series.grid[best], series.grid[best + 1]);
    let (p0, p1, p2) = (pops[best - 1], pops[best], pops[best + 1]);
    let denom = p0 - 2.0 * p1 + p2;
    if denom >= 0.0 {
        return Ok((t1, p1));
    }
    let h = 0.5 * (t2 - t0);
    let shift = 0.5 * (p0 - p2) / denom * h;
    let t_star = t1 + shift.clamp(t0 - t1, t2 - t1);
    let peak = (p1 - 0.25 * (p0 - p2) * shift / h).clamp(p1, 1.0);
    Ok((t_star, peak))
}

/// Dense local scan over [t_lo, t_hi] followed by a parabolic vertex on
/// the three samples around the fine maximum.
fn refine_peak(
    spectral: &SpectralPropagator,
    source: usize,
    target_ord: usize,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64> {
    const FINE_POINTS: usize = 2001;
    let mut best = (t_lo, 0.0_f64);
    let mut samples = Vec::with_capacity(FINE_POINTS);
    for i in 0..FINE_POINTS {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (FINE_POINTS - 1) as f64;
        let p = spectral.transfer_row(t, source)?.population(target_ord);
        samples.push((t, p));
        if p > best.1 {
            best = (t, p);
        }
    }
    let i = samples.iter().position(|&(t, _)| t == best.0).unwrap();
    if i == 0 || i + 1 == samples.len() {
        return Ok(best.0);
    }
    let (t0, p0) = samples[i - 1];
    let (t1, p1) = samples[i];
    let (t2, p2) = samples[i + 1];
    let denom = p0 - 2.0 * p1 + p2;
    if denom >= 0.0 {
        return Ok(t1);
    }
    let h = 0.5 * (t2 - t0);
    let shift = (0.5 * (p0 - p2) / denom * h).clamp(t0 - t1, t2 - t1);
    Ok(t1 + shift)
}

/// Run the full scan for one configuration and summarize it.
pub fn selectivity_report(
    config: &NetworkConfig,
    qubit: &Cscq,
    convention: PhaseConvention,
    horizon: f64,
    points: usize,
) -> Result<TransferReport> {
    config.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::BadGrid("horizon must be positive".into()));
    }
    let n = config.n_receivers;
    let target = config.active_sender;
    let m = build_coupling_matrix(config)?;
    let source = mode_ordinal(config, ModeIndex::SenderExciton)?;
    let grid = uniform_grid(horizon, points);
    let series = evolve_series(&m, &grid, source)?;

    let (t_coarse, _) = find_transfer_time(&series, target, n, PEAK_FLOOR)?;

    // The coarse grid resolves the slow transfer envelope but aliases the
    // fast carrier oscillations, so re-scan one coarse step around the
    // detected peak at full resolution before the final refinement.
    let spectral = SpectralPropagator::new(&m);
    let target_ord = ModeIndex::ReceiverExciton(target).ordinal(n)?;
    let step = if points > 1 { horizon / (points - 1) as f64 } else { horizon };
    let t_star = refine_peak(
        &spectral,
        source,
        target_ord,
        (t_coarse - step).max(0.0),
        (t_coarse + step).min(horizon),
    )?;
    let peak_row = spectral.transfer_row(t_star, source)?;
    let peak_population = peak_row.population(target_ord);

    let mut crosstalk = 0.0_f64;
    let mut confinement_defect = 0.0_f64;
    let mut max_field_population = 0.0_f64;
    for row in series.rows.iter().filter(|r| r.time <= t_star).chain([&peak_row]) {
        for j in 1..=n {
            if j == target {
                continue;
            }
            let p = row.population(ModeIndex::ReceiverExciton(j).ordinal(n)?);
            crosstalk = crosstalk.max(p);
        }
        let defect =
            libm::fabs(1.0 - (row.population(source) + row.population(target_ord)));
        confinement_defect = confinement_defect.max(defect);
        max_field_population = max_field_population.max(field_population(row, n));
    }

    let fidelity_at_t_star = transfer_fidelity(&peak_row, qubit, target_ord, convention)?;
    let mean_photons_at_t_star = mean_photon_number(&peak_row, qubit, n)?;

    Ok(TransferReport {
        target,
        t_star,
        peak_population,
        crosstalk,
        confinement_defect,
        max_field_population,
        fidelity_at_t_star,
        mean_photons_at_t_star,
    })
}

/// Parameter varied along one sweep axis. Coupling and detuning apply to
/// the active ternary set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Coupling,
    Detuning,
    Horizon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count <= 1 {
            return alloc::vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// One evaluated sweep cell; per-cell failures are recorded, not fatal.
#[derive(Debug, Clone)]
pub struct SweepCell {
    /// Axis values for this cell, in axis order.
    pub values: Vec<f64>,
    pub report: core::result::Result<TransferReport, Error>,
}

#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub axes: Vec<SweepAxis>,
    pub cells: Vec<SweepCell>,
}

/// Evaluate `selectivity_report` over the cartesian product of the axes,
/// perturbing the base configuration cell by cell. Cells are laid out
/// row-major in axis order.
pub fn sweep(
    base: &NetworkConfig,
    qubit: &Cscq,
    convention: PhaseConvention,
    axes: &[SweepAxis],
    points: usize,
) -> Result<SweepGrid> {
    base.validate()?;
    if axes.is_empty() {
        return Err(Error::BadGrid("sweep needs at least one axis".into()));
    }
    for axis in axes {
        if axis.count == 0 {
            return Err(Error::BadGrid("axis count must be >= 1".into()));
        }
    }
    let axis_values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let total: usize = axis_values.iter().map(|v| v.len()).product();

    let mut cells = Vec::with_capacity(total);
    for cell_index in 0..total {
        let mut rem = cell_index;
        let mut values = Vec::with_capacity(axes.len());
        // Last axis varies fastest.
        let mut strides = Vec::with_capacity(axes.len());
        let mut s = total;
        for v in &axis_values {
            s /= v.len();
            strides.push(s);
        }
        for (v, &stride) in axis_values.iter().zip(&strides) {
            values.push(v[rem / stride]);
            rem %= stride;
        }

        let mut config = base.clone();
        let mut horizon = None;
        for (axis, &value) in axes.iter().zip(&values) {
            match axis.param {
                SweepParam::Coupling => config.sets[config.active_sender - 1].g = value,
                SweepParam::Detuning => config.sets[config.active_sender - 1].delta = value,
                SweepParam::Horizon => horizon = Some(value),
            }
        }
        let horizon = horizon.unwrap_or_else(|| default_horizon(&config));
        let report = selectivity_report(&config, qubit, convention, horizon, points);
        cells.push(SweepCell { values, report });
    }
    Ok(SweepGrid { axes: axes.to_vec(), cells })
}

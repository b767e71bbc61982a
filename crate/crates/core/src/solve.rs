//! Energy-domain drivers built on the impedance sweep.

use rayon::prelude::*;

use crate::discretize::{build_staircase, DivisionStrategy};
use crate::error::{Error, Result};
use crate::impedance::{count_levels_below, scattering};
use crate::model::{BoundStateReport, PotentialModel, ScatteringResult, Staircase, H2_OVER_2M0};

/// Linear energy grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
}

impl SweepSpec {
    pub fn new(e_min: f64, e_max: f64, n_points: usize) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite() && e_min < e_max) {
            return Err(Error::param("sweep", format!("need e_min < e_max, got [{e_min}, {e_max}]")));
        }
        if n_points < 2 {
            return Err(Error::param("points", format!("need at least 2 energies, got {n_points}")));
        }
        Ok(Self {
            e_min,
            e_max,
            n_points,
        })
    }

    pub fn energies(&self) -> Vec<f64> {
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|i| {
                if i == last {
                    self.e_max
                } else {
                    self.e_min + (self.e_max - self.e_min) * i as f64 / last as f64
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.e_max - self.e_min) / (self.n_points - 1) as f64
    }
}

/// Settings of the N-doubling controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePolicy {
    pub n0: usize,
    pub epsilon: f64,
    pub n_max: usize,
}

impl ConvergencePolicy {
    pub fn new(n0: usize, epsilon: f64, n_max: usize) -> Result<Self> {
        if n0 < 2 {
            return Err(Error::param("n0", format!("must be at least 2, got {n0}")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
        }
        if n_max < n0 {
            return Err(Error::param("n_max", format!("must be at least n0 = {n0}, got {n_max}")));
        }
        Ok(Self { n0, epsilon, n_max })
    }

    /// `n0, 2·n0, …` up to `n_max`.
    pub fn levels(&self) -> Vec<usize> {
        std::iter::successors(Some(self.n0), |&n| n.checked_mul(2))
            .take_while(|&n| n <= self.n_max)
            .collect()
    }
}

impl Default for ConvergencePolicy {
    fn default() -> Self {
        Self {
            n0: 16,
            epsilon: 1e-6,
            n_max: 4096,
        }
    }
}

/// One grid energy; `result` is `None` for a gap (pole that survived a retry).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub energy: f64,
    pub result: Option<ScatteringResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSweep {
    pub n_regions: usize,
    pub points: Vec<SweepPoint>,
}

impl TransmissionSweep {
    pub fn gaps(&self) -> usize {
        self.points.iter().filter(|p| p.result.is_none()).count()
    }

    pub fn transmittance(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.points.iter().map(|p| p.result.map(|r| r.transmittance))
    }
}

fn scatter_with_retry(stair: &Staircase, e: f64) -> Result<Option<ScatteringResult>> {
    match scattering(stair, e) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Pole { .. }) => match scattering(stair, e * (1.0 + 1e-12)) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Pole { .. }) => Ok(None),
            Err(other) => Err(other),
        },
        Err(other) => Err(other),
    }
}

/// Transmission over `energies` on a fixed staircase.
pub fn sweep_staircase(stair: &Staircase, energies: &[f64]) -> Result<TransmissionSweep> {
    let results: Vec<Result<Option<ScatteringResult>>> =
        energies.par_iter().map(|&e| scatter_with_retry(stair, e)).collect();
    let mut points = Vec::with_capacity(energies.len());
    for (&energy, res) in energies.iter().zip(results) {
        points.push(SweepPoint { energy, result: res? });
    }
    if !points.is_empty() && points.iter().all(|p| p.result.is_none()) {
        return Err(Error::AllEnergiesFailed { count: points.len() });
    }
    Ok(TransmissionSweep {
        n_regions: stair.n_regions(),
        points,
    })
}

/// Transmission spectrum of `model` discretised with `n` regions per smooth piece.
pub fn sweep_transmission(
    model: &PotentialModel,
    spec: &SweepSpec,
    n: usize,
    strategy: DivisionStrategy,
) -> Result<TransmissionSweep> {
    let stair = build_staircase(model, n, strategy)?;
    sweep_staircase(&stair, &spec.energies())
}

/// A transmission maximum located between grid energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub energy: f64,
    pub transmittance: f64,
}

fn transmittance_or_zero(stair: &Staircase, e: f64) -> f64 {
    match scattering(stair, e) {
        Ok(r) => r.transmittance,
        Err(_) => 0.0,
    }
}

/// Golden-section maximisation of `T` on `[a, b]`.
fn golden_max(stair: &Staircase, mut a: f64, mut b: f64) -> Peak {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (transmittance_or_zero(stair, c), transmittance_or_zero(stair, d));
    while b - a > 1e-14 * b.abs().max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = transmittance_or_zero(stair, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = transmittance_or_zero(stair, d);
        }
    }
    let energy = 0.5 * (a + b);
    Peak {
        energy,
        transmittance: transmittance_or_zero(stair, energy),
    }
}

/// Transmission maxima of `stair`, located by refining every interior local
/// maximum of `sweep` inside its two neighbouring grid intervals. Only peaks
/// whose refined `T` reaches `min_t` are returned.
pub fn resonance_peaks(stair: &Staircase, sweep: &TransmissionSweep, min_t: f64) -> Vec<Peak> {
    let t: Vec<Option<f64>> = sweep.transmittance().collect();
    let e: Vec<f64> = sweep.points.iter().map(|p| p.energy).collect();
    let candidates: Vec<usize> = (1..t.len().saturating_sub(1))
        .filter(|&i| match (t[i - 1], t[i], t[i + 1]) {
            (Some(l), Some(c), Some(r)) => c >= l && c > r,
            _ => false,
        })
        .collect();
    let mut peaks: Vec<Peak> = candidates
        .par_iter()
        .map(|&i| golden_max(stair, e[i - 1], e[i + 1]))
        .filter(|p| p.transmittance >= min_t)
        .collect();
    peaks.sort_by(|p, q| p.energy.total_cmp(&q.energy));
    peaks.dedup_by(|b, a| (b.energy - a.energy).abs() < 1e-12);
    peaks
}

/// Half-width of the margin kept inside the bound window.
const WINDOW_MARGIN: f64 = 1e-9;
/// Bisection stops once the bracket is narrower than this (eV).
const BISECTION_TOL: f64 = 1e-12;

/// Energy interval `(lo, hi)` that contains every bound state of `stair`.
///
/// `hi` is the lower lead. `lo` is the lowest region potential, further
/// lowered by the binding energy of a single delta well carrying the total
/// attractive delta strength, which bounds the ground state from below.
pub fn bound_window(stair: &Staircase) -> Result<(f64, f64)> {
    let hi = stair.u_left().min(stair.u_right());
    let attractive: f64 = stair.deltas().values().filter(|&&g| g < 0.0).map(|g| -g).sum();
    let depth = stair.material().m_rel() * attractive * attractive / (4.0 * H2_OVER_2M0);
    let u_min = stair.min_potential();
    let lo = u_min - depth * 1.01;
    if !(lo < hi) {
        return Err(Error::NoBoundWindow { u_min, u_lead: hi });
    }
    Ok((lo, hi))
}

/// Scan density: 400 samples per eV of window, at least 100.
pub fn default_scan_points(window: (f64, f64)) -> usize {
    ((window.1 - window.0) * 400.0).ceil().max(100.0) as usize
}

/// Level count at `e`, stepping off a breakpoint node if the sweep lands on one.
fn level_count(stair: &Staircase, e: f64) -> Result<usize> {
    let mut probe = e;
    for _ in 0..4 {
        match count_levels_below(stair, probe) {
            Err(Error::Pole { .. }) => probe += 4.0 * f64::EPSILON * probe.abs().max(1e-3),
            other => return other,
        }
    }
    count_levels_below(stair, probe)
}

/// Energy at which the level count first exceeds `level`, given
/// `count(lo) <= level < count(hi)`.
fn bisect_level(stair: &Staircase, mut lo: f64, mut hi: f64, level: usize) -> Result<f64> {
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if level_count(stair, mid)? > level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bound states of a fixed staircase.
///
/// The level count is tabulated on `scan_points` energies across the bound
/// window; every step of the count is then bisected to `1e-12` eV. Each
/// returned energy is a zero of `F` at which `Im F` changes sign.
pub fn bound_states_of(stair: &Staircase, scan_points: usize) -> Result<Vec<f64>> {
    if scan_points < 10 {
        return Err(Error::param("scan_points", format!("need at least 10, got {scan_points}")));
    }
    let (lo, hi) = bound_window(stair)?;
    let (a, b) = (lo + WINDOW_MARGIN, hi - WINDOW_MARGIN);
    let grid: Vec<f64> = (0..scan_points)
        .map(|i| {
            if i == scan_points - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (scan_points - 1) as f64
            }
        })
        .collect();
    let counts = grid
        .par_iter()
        .map(|&e| level_count(stair, e))
        .collect::<Result<Vec<usize>>>()?;

    let mut jobs = Vec::new();
    let mut floor = counts[0];
    for i in 1..grid.len() {
        for level in floor..counts[i] {
            jobs.push((grid[i - 1], grid[i], level));
        }
        floor = floor.max(counts[i]);
    }
    let mut roots = jobs
        .par_iter()
        .map(|&(ea, eb, level)| bisect_level(stair, ea, eb, level))
        .collect::<Result<Vec<f64>>>()?;
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Bound states of `model` at `n` regions per smooth piece.
pub fn find_bound_states(
    model: &PotentialModel,
    n: usize,
    strategy: DivisionStrategy,
    scan_points: usize,
) -> Result<Vec<f64>> {
    let stair = build_staircase(model, n, strategy)?;
    bound_states_of(&stair, scan_points)
}

/// Greedy nearest-energy pairing; returns the largest pair distance.
fn max_level_shift(a: &[f64], b: &[f64]) -> f64 {
    let mut pairs: Vec<(f64, usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| b.iter().enumerate().map(move |(j, &y)| ((x - y).abs(), i, j)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Repeats the bound-state search at `n0, 2·n0, …` until every level moves
/// by less than `epsilon` between consecutive refinements.
///
/// `scan_points = None` picks [`default_scan_points`] per staircase.
pub fn converge_bound(
    model: &PotentialModel,
    policy: &ConvergencePolicy,
    strategy: DivisionStrategy,
    scan_points: Option<usize>,
) -> Result<BoundStateReport> {
    let run = |n: usize| -> Result<(Vec<f64>, usize)> {
        let stair = build_staircase(model, n, strategy)?;
        let points = match scan_points {
            Some(p) => p,
            None => default_scan_points(bound_window(&stair)?),
        };
        Ok((bound_states_of(&stair, points)?, stair.n_regions()))
    };
    let mut n = policy.n0;
    let (mut previous, mut n_regions) = run(n)?;
    let mut trace = vec![(n, previous.clone())];
    let mut converged = false;
    while let Some(next) = n.checked_mul(2).filter(|&m| m <= policy.n_max) {
        n = next;
        let (current, regions) = run(n)?;
        trace.push((n, current.clone()));
        n_regions = regions;
        if current.len() != previous.len() {
            if n >= 4 * policy.n0 {
                return Err(Error::LevelCountUnstable {
                    n,
                    previous,
                    current,
                });
            }
        } else if max_level_shift(&previous, &current) < policy.epsilon {
            previous = current;
            converged = true;
            break;
        }
        previous = current;
    }
    Ok(BoundStateReport {
        energies: previous,
        trace,
        converged,
        epsilon: policy.epsilon,
        n_regions,
    })
}

/// ε̄(N) together with how many grid energies entered the average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport {
    pub n: usize,
    pub eps_bar: f64,
    pub used: usize,
    pub gaps: usize,
}

fn mean_abs_difference(n: usize, fine: &TransmissionSweep, coarse: &TransmissionSweep) -> AccuracyReport {
    let (mut sum, mut used, mut gaps) = (0.0, 0usize, 0usize);
    for (a, b) in fine.transmittance().zip(coarse.transmittance()) {
        match (a, b) {
            (Some(a), Some(b)) => {
                sum += (a - b).abs();
                used += 1;
            }
            _ => gaps += 1,
        }
    }
    AccuracyReport {
        n,
        eps_bar: if used > 0 { sum / used as f64 } else { f64::NAN },
        used,
        gaps,
    }
}

fn check_accuracy_n(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::param("n_regions", format!("must be even and at least 4, got {n}")));
    }
    Ok(())
}

/// Mean absolute change of `T` between `N/2` and `N` regions over the grid.
pub fn accuracy_metric(
    model: &PotentialModel,
    spec: &SweepSpec,
    n_regions: usize,
    strategy: DivisionStrategy,
) -> Result<AccuracyReport> {
    check_accuracy_n(n_regions)?;
    let fine = sweep_transmission(model, spec, n_regions, strategy)?;
    let coarse = sweep_transmission(model, spec, n_regions / 2, strategy)?;
    Ok(mean_abs_difference(n_regions, &fine, &coarse))
}

/// ε̄(N) for every `N` in `ns`, sharing the sweeps between neighbouring levels.
pub fn accuracy_curve(
    model: &PotentialModel,
    spec: &SweepSpec,
    ns: &[usize],
    strategy: DivisionStrategy,
) -> Result<Vec<AccuracyReport>> {
    let mut cache: Vec<(usize, TransmissionSweep)> = Vec::new();
    let mut get = |n: usize| -> Result<TransmissionSweep> {
        if let Some((_, s)) = cache.iter().find(|(m, _)| *m == n) {
            return Ok(s.clone());
        }
        let s = sweep_transmission(model, spec, n, strategy)?;
        cache.push((n, s.clone()));
        Ok(s)
    };
    ns.iter()
        .map(|&n| {
            check_accuracy_n(n)?;
            let coarse = get(n / 2)?;
            let fine = get(n)?;
            Ok(mean_abs_difference(n, &fine, &coarse))
        })
        .collect()
}

//! Staircase construction from a [`PotentialModel`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{wavenumber, Piece, PotentialModel, Staircase, EDGE_TOLERANCE};

/// How breakpoints are placed inside a smooth piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivisionStrategy {
    /// `Δx_i` constant.
    EqualWidth,
    /// `Δx_i·|U(x_i)|` constant.
    EqualArea,
    /// `Δx_i·k(x_i)` constant for the local wavenumber at `e_ref`.
    EqualPhase { e_ref: f64 },
    /// Equal widths, at least `n` of them and no wider than
    /// `fraction` of the shortest local wavelength at `e_ref`.
    WavelengthBounded { fraction: f64, e_ref: f64 },
}

impl DivisionStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            DivisionStrategy::EqualWidth => "equal-width",
            DivisionStrategy::EqualArea => "equal-area",
            DivisionStrategy::EqualPhase { .. } => "equal-phase",
            DivisionStrategy::WavelengthBounded { .. } => "wavelength-bounded",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DivisionStrategy::WavelengthBounded { fraction, e_ref } => {
                if !(fraction > 0.0 && fraction < 1.0) {
                    return Err(Error::param("fraction", format!("must lie in (0, 1), got {fraction}")));
                }
                if !e_ref.is_finite() {
                    return Err(Error::param("e_ref", "must be finite"));
                }
            }
            DivisionStrategy::EqualPhase { e_ref } if !e_ref.is_finite() => {
                return Err(Error::param("e_ref", "must be finite"));
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for DivisionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisionStrategy::EqualPhase { e_ref } => write!(f, "equal-phase:{e_ref}"),
            DivisionStrategy::WavelengthBounded { fraction, e_ref } => {
                write!(f, "wavelength-bounded:{fraction}:{e_ref}")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Parses `equal-width`, `equal-area`, `equal-phase:<e_ref>` or
/// `wavelength-bounded:<fraction>:<e_ref>`.
impl FromStr for DivisionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let mut num = |what: &'static str| -> Result<f64> {
            let raw = parts
                .next()
                .ok_or_else(|| Error::param("strategy", format!("`{head}` needs {what}")))?;
            raw.trim()
                .parse()
                .map_err(|_| Error::param("strategy", format!("bad {what} `{raw}`")))
        };
        let strategy = match head {
            "equal-width" => DivisionStrategy::EqualWidth,
            "equal-area" => DivisionStrategy::EqualArea,
            "equal-phase" => DivisionStrategy::EqualPhase { e_ref: num("e_ref")? },
            "wavelength-bounded" => {
                let fraction = num("fraction")?;
                DivisionStrategy::WavelengthBounded {
                    fraction,
                    e_ref: num("e_ref")?,
                }
            }
            other => return Err(Error::param("strategy", format!("unknown strategy `{other}`"))),
        };
        if parts.next().is_some() {
            return Err(Error::param("strategy", format!("trailing fields in `{s}`")));
        }
        strategy.validate()?;
        Ok(strategy)
    }
}

/// Number of probe points used to scan a smooth profile.
const PROBES: usize = 1024;

fn probe(piece: &Piece) -> impl Iterator<Item = f64> + '_ {
    (0..=PROBES).map(move |i| {
        let t = i as f64 / PROBES as f64;
        piece.potential_at(piece.x_lo + t * piece.width())
    })
}

fn equal_width(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    x.push(hi);
    x
}

/// Breakpoints with `Δx_i · weight(x_i)` equal across the `n` regions.
/// `weight` must be positive on `[lo, hi]`.
fn equal_product(lo: f64, hi: f64, n: usize, weight: impl Fn(f64) -> f64) -> Vec<f64> {
    let march = |c: f64| {
        let mut x = lo;
        for _ in 0..n {
            x += c / weight(x.min(hi));
        }
        x
    };
    let w_max = (0..=PROBES)
        .map(|i| weight(lo + (hi - lo) * i as f64 / PROBES as f64))
        .fold(0.0, f64::max);
    let (mut c_lo, mut c_hi) = (0.0, (hi - lo) * w_max * 2.0);
    for _ in 0..300 {
        let mid = 0.5 * (c_lo + c_hi);
        if mid <= c_lo || mid >= c_hi {
            break;
        }
        if march(mid) < hi {
            c_lo = mid;
        } else {
            c_hi = mid;
        }
    }
    let c = 0.5 * (c_lo + c_hi);
    let mut x = Vec::with_capacity(n + 1);
    let mut at = lo;
    x.push(at);
    for _ in 1..n {
        at += c / weight(at.min(hi));
        x.push(at.min(hi));
    }
    x.push(hi);
    x
}

fn smooth_breakpoints(piece: &Piece, n: usize, strategy: DivisionStrategy, model: &PotentialModel) -> Result<Vec<f64>> {
    let (lo, hi) = (piece.x_lo, piece.x_hi);
    let m = model.material;
    match strategy {
        DivisionStrategy::EqualWidth => Ok(equal_width(lo, hi, n)),
        DivisionStrategy::EqualArea => {
            if probe(piece).any(|u| u.abs() < 1e-9) {
                // Δx·U = const degenerates where U vanishes
                Ok(equal_width(lo, hi, n))
            } else {
                Ok(equal_product(lo, hi, n, |x| piece.potential_at(x).abs()))
            }
        }
        DivisionStrategy::EqualPhase { e_ref } => {
            let u_max = probe(piece).fold(f64::NEG_INFINITY, f64::max);
            if e_ref <= u_max {
                return Err(Error::StrategyInapplicable {
                    strategy: strategy.name(),
                    reason: format!(
                        "e_ref = {e_ref} eV does not exceed the piece maximum {u_max} eV on [{lo}, {hi}]"
                    ),
                });
            }
            Ok(equal_product(lo, hi, n, |x| wavenumber(e_ref, piece.potential_at(x), m).re))
        }
        DivisionStrategy::WavelengthBounded { fraction, e_ref } => {
            let k_max = probe(piece)
                .map(|u| wavenumber(e_ref, u, m).norm())
                .fold(0.0, f64::max);
            let count = if k_max > 0.0 {
                let lambda = 2.0 * std::f64::consts::PI / k_max;
                let needed = ((hi - lo) / (fraction * lambda)).ceil();
                n.max(needed as usize)
            } else {
                n
            };
            Ok(equal_width(lo, hi, count))
        }
    }
}

/// Approximates `model` by a staircase with `n` regions per smooth piece.
///
/// Constant pieces stay single regions. A smooth region `[x_i, x_{i+1}]`
/// takes `(U(x_i) + U(x_{i+1}))/2`. Deltas attach to a breakpoint at their
/// exact position, which is inserted when missing; coincident deltas add.
pub fn build_staircase(model: &PotentialModel, n: usize, strategy: DivisionStrategy) -> Result<Staircase> {
    if n == 0 {
        return Err(Error::param("n", "at least one region per smooth piece is required"));
    }
    strategy.validate()?;

    let (x0, _) = model.support();
    let mut x = vec![x0];
    let mut u = Vec::new();
    for piece in &model.pieces {
        // consecutive pieces share the previous right edge
        let start = *x.last().unwrap();
        if piece.is_constant() {
            x.push(piece.x_hi);
            u.push(piece.potential_at(piece.x_lo));
            continue;
        }
        let shifted = Piece {
            x_lo: start,
            ..piece.clone()
        };
        let bps = smooth_breakpoints(&shifted, n, strategy, model)?;
        for w in bps.windows(2) {
            u.push(0.5 * (piece.potential_at(w[0]) + piece.potential_at(w[1])));
            x.push(w[1]);
        }
    }

    for d in &model.deltas {
        let idx = x.partition_point(|&b| b < d.x);
        let hit_right = idx < x.len() && (x[idx] - d.x).abs() <= EDGE_TOLERANCE;
        let hit_left = idx > 0 && (d.x - x[idx - 1]).abs() <= EDGE_TOLERANCE;
        if !hit_right && !hit_left {
            // strictly inside region idx − 1: split it
            x.insert(idx, d.x);
            u.insert(idx, u[idx - 1]);
        }
    }
    let mut delta_at: BTreeMap<usize, f64> = BTreeMap::new();
    for d in &model.deltas {
        let idx = x.partition_point(|&b| b < d.x - EDGE_TOLERANCE);
        *delta_at.entry(idx).or_insert(0.0) += d.g;
    }
    delta_at.retain(|_, g| *g != 0.0);

    Staircase::new(x, u, model.u_left, model.u_right, delta_at, model.material)
}

/// The next refinement level: `build_staircase` with `2·n_prev` regions.
pub fn refine(model: &PotentialModel, strategy: DivisionStrategy, n_prev: usize) -> Result<Staircase> {
    if n_prev == 0 {
        return Err(Error::param("n_prev", "must be at least 1"));
    }
    build_staircase(model, 2 * n_prev, strategy)
}

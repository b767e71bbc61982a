//! Domain types, the unit system and the wavenumber branch rule.
//!
//! Energies are in eV, lengths in nm. Impedances are carried in reduced form
//! `k / m_rel` (nm⁻¹): the cascade recurrence and the reflection amplitude
//! are homogeneous of degree one in every impedance, so the factor `ħ/m₀`
//! never has to be materialised.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physical constants. `ħ²/(2m₀)` is the only energy↔wavenumber conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConsts;

impl PhysConsts {
    /// ħ²/(2m₀) in eV·nm².
    pub const H2_OVER_2M0: f64 = 0.038_099_821_2;
}

/// Shorthand for [`PhysConsts::H2_OVER_2M0`].
pub const H2_OVER_2M0: f64 = PhysConsts::H2_OVER_2M0;

/// Relative effective mass `m*/m₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    m_rel: f64,
}

impl Material {
    pub fn new(m_rel: f64) -> Result<Self> {
        if !(m_rel.is_finite() && m_rel > 0.0) {
            return Err(Error::param("m_rel", format!("must be positive, got {m_rel}")));
        }
        Ok(Self { m_rel })
    }

    /// Bare electron mass.
    pub fn electron() -> Self {
        Self { m_rel: 1.0 }
    }

    #[inline]
    pub fn m_rel(&self) -> f64 {
        self.m_rel
    }
}

/// Local wavenumber `k = sqrt(m_rel (E − U) / (ħ²/2m₀))`.
///
/// Principal branch with `Im k ≥ 0`: real and positive above the potential,
/// purely imaginary below it, exactly zero at `E = U`.
pub fn wavenumber(e: f64, u: f64, m: Material) -> Complex64 {
    let d = m.m_rel * (e - u) / H2_OVER_2M0;
    if d > 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else if d < 0.0 {
        Complex64::new(0.0, (-d).sqrt())
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Impedance in reduced units (nm⁻¹): physical `z·m₀/ħ`, i.e. `k / m_rel`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedImpedance(pub Complex64);

impl ReducedImpedance {
    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<Complex64> for ReducedImpedance {
    fn from(z: Complex64) -> Self {
        Self(z)
    }
}

/// Potential shape over one piece of the support.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// `U(x) = a (x − vertex)²`.
    Parabola { a: f64, vertex: f64 },
    /// Arbitrary smooth profile. Compared by pointer identity.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Profile {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(u) => *u,
            Profile::Parabola { a, vertex } => a * (x - vertex) * (x - vertex),
            Profile::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(u) => f.debug_tuple("Constant").field(u).finish(),
            Profile::Parabola { a, vertex } => f
                .debug_struct("Parabola")
                .field("a", a)
                .field("vertex", vertex)
                .finish(),
            Profile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PartialEq for Profile {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Profile::Constant(a), Profile::Constant(b)) => a == b,
            (
                Profile::Parabola { a, vertex },
                Profile::Parabola {
                    a: a2,
                    vertex: vertex2,
                },
            ) => a == a2 && vertex == vertex2,
            (Profile::Custom(f), Profile::Custom(g)) => Arc::ptr_eq(f, g),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub x_lo: f64,
    pub x_hi: f64,
    pub profile: Profile,
}

impl Piece {
    pub fn constant(x_lo: f64, x_hi: f64, u: f64) -> Self {
        Self {
            x_lo,
            x_hi,
            profile: Profile::Constant(u),
        }
    }

    pub fn smooth(x_lo: f64, x_hi: f64, profile: Profile) -> Self {
        Self { x_lo, x_hi, profile }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.profile, Profile::Constant(_))
    }

    #[inline]
    pub fn potential_at(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }
}

/// Zero-range term `g·δ(x − x₀)`; `g > 0` is a barrier, `g < 0` a well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub x: f64,
    /// Strength in eV·nm.
    pub g: f64,
}

impl DeltaTerm {
    pub fn new(x: f64, g: f64) -> Result<Self> {
        if g == 0.0 || !g.is_finite() || !x.is_finite() {
            return Err(Error::param("g", format!("delta strength must be finite and nonzero, got {g}")));
        }
        Ok(Self { x, g })
    }
}

/// Edge mismatch tolerated between consecutive pieces (nm).
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// Symbolic description of a 1D system: two leads, a contiguous run of
/// pieces and any number of delta terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    pub u_left: f64,
    pub u_right: f64,
    pub pieces: Vec<Piece>,
    pub deltas: Vec<DeltaTerm>,
    pub material: Material,
}

impl PotentialModel {
    /// Validates and builds a model. Pieces are sorted by left edge; they must
    /// tile one interval without gaps or overlaps. A model without pieces has
    /// a single-point support at the common position of its deltas (or 0).
    pub fn new(
        u_left: f64,
        u_right: f64,
        mut pieces: Vec<Piece>,
        deltas: Vec<DeltaTerm>,
        material: Material,
    ) -> Result<Self> {
        if !u_left.is_finite() || !u_right.is_finite() {
            return Err(Error::InvalidModel("lead potentials must be finite".into()));
        }
        pieces.sort_by(|a, b| a.x_lo.total_cmp(&b.x_lo));
        for (i, p) in pieces.iter().enumerate() {
            if !(p.x_lo.is_finite() && p.x_hi.is_finite() && p.x_lo < p.x_hi) {
                return Err(Error::InvalidModel(format!(
                    "piece {i} has invalid extent [{}, {}]",
                    p.x_lo, p.x_hi
                )));
            }
            if let Profile::Constant(u) = p.profile {
                if !u.is_finite() {
                    return Err(Error::InvalidModel(format!("piece {i} has non-finite potential")));
                }
            }
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let gap = w[1].x_lo - w[0].x_hi;
            if gap < -EDGE_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "pieces {i} and {} overlap on [{}, {}]",
                    i + 1,
                    w[1].x_lo,
                    w[0].x_hi
                )));
            }
            if gap > EDGE_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "gap between pieces {i} and {} on [{}, {}]",
                    i + 1,
                    w[0].x_hi,
                    w[1].x_lo
                )));
            }
        }
        let model = Self {
            u_left,
            u_right,
            pieces,
            deltas,
            material,
        };
        let (lo, hi) = model.support();
        for d in &model.deltas {
            if d.g == 0.0 || !d.g.is_finite() {
                return Err(Error::InvalidModel(format!("delta at x = {} has zero strength", d.x)));
            }
            if d.x < lo - EDGE_TOLERANCE || d.x > hi + EDGE_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "delta at x = {} lies outside the support [{lo}, {hi}]",
                    d.x
                )));
            }
        }
        Ok(model)
    }

    /// Closed support interval `[x₀, x_end]`.
    pub fn support(&self) -> (f64, f64) {
        match (self.pieces.first(), self.pieces.last()) {
            (Some(first), Some(last)) => (first.x_lo, last.x_hi),
            _ => {
                let x = self.deltas.first().map_or(0.0, |d| d.x);
                (x, x)
            }
        }
    }

    /// True when every piece is constant, i.e. any staircase is exact.
    pub fn is_exact(&self) -> bool {
        self.pieces.iter().all(Piece::is_constant)
    }

    /// Potential at `x` (deltas excluded). Leads outside the support; on a
    /// shared edge the right-hand piece wins.
    pub fn potential_at(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo {
            return self.u_left;
        }
        if x > hi {
            return self.u_right;
        }
        self.pieces
            .iter()
            .rev()
            .find(|p| x >= p.x_lo)
            .or_else(|| self.pieces.first())
            .map_or(self.u_left, |p| p.potential_at(x))
    }
}

/// Discretised cascade.
///
/// Indexing: `x[0] < x[1] < … < x[n]` are the breakpoints and region `j`
/// spans `[x[j], x[j+1]]` with constant potential `u[j]`, so
/// `x.len() == u.len() + 1`. The left lead occupies `x < x[0]` and the right
/// lead `x > x[n]`. `delta_at` keys are breakpoint indices in `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    x: Vec<f64>,
    u: Vec<f64>,
    u_left: f64,
    u_right: f64,
    delta_at: BTreeMap<usize, f64>,
    material: Material,
}

impl Staircase {
    pub fn new(
        x: Vec<f64>,
        u: Vec<f64>,
        u_left: f64,
        u_right: f64,
        delta_at: BTreeMap<usize, f64>,
        material: Material,
    ) -> Result<Self> {
        if x.len() != u.len() + 1 {
            return Err(Error::InvalidModel(format!(
                "staircase needs exactly one more breakpoint than regions ({} breakpoints, {} regions)",
                x.len(),
                u.len()
            )));
        }
        if x.iter().chain(&u).any(|v| !v.is_finite()) || !u_left.is_finite() || !u_right.is_finite() {
            return Err(Error::InvalidModel("staircase values must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidModel("breakpoints must be strictly increasing".into()));
        }
        if let Some((&k, _)) = delta_at.iter().find(|(&k, _)| k >= x.len()) {
            return Err(Error::InvalidModel(format!("delta attached to missing breakpoint {k}")));
        }
        if delta_at.values().any(|g| !g.is_finite()) {
            return Err(Error::InvalidModel("delta strengths must be finite".into()));
        }
        Ok(Self {
            x,
            u,
            u_left,
            u_right,
            delta_at,
            material,
        })
    }

    /// Rectangular layers given as `(width, potential)` starting at `x0`.
    pub fn from_layers(
        x0: f64,
        layers: &[(f64, f64)],
        u_left: f64,
        u_right: f64,
        delta_at: BTreeMap<usize, f64>,
        material: Material,
    ) -> Result<Self> {
        let mut x = Vec::with_capacity(layers.len() + 1);
        x.push(x0);
        let mut at = x0;
        for &(w, _) in layers {
            at += w;
            x.push(at);
        }
        let u = layers.iter().map(|&(_, u)| u).collect();
        Self::new(x, u, u_left, u_right, delta_at, material)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.x
    }

    pub fn potentials(&self) -> &[f64] {
        &self.u
    }

    pub fn u_left(&self) -> f64 {
        self.u_left
    }

    pub fn u_right(&self) -> f64 {
        self.u_right
    }

    pub fn deltas(&self) -> &BTreeMap<usize, f64> {
        &self.delta_at
    }

    pub fn material(&self) -> Material {
        self.material
    }

    pub fn n_regions(&self) -> usize {
        self.u.len()
    }

    pub fn x_left(&self) -> f64 {
        self.x[0]
    }

    pub fn x_right(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Width of region `j`.
    pub fn width(&self, j: usize) -> f64 {
        self.x[j + 1] - self.x[j]
    }

    /// Staircase potential at `x`; breakpoints belong to the region on their right.
    pub fn potential_at(&self, x: f64) -> f64 {
        if x < self.x_left() {
            return self.u_left;
        }
        if x >= self.x_right() {
            return self.u_right;
        }
        let j = self.x.partition_point(|&b| b <= x) - 1;
        self.u[j]
    }

    /// Lowest potential over regions and leads, deltas excluded.
    pub fn min_potential(&self) -> f64 {
        self.u
            .iter()
            .copied()
            .fold(self.u_left.min(self.u_right), f64::min)
    }

    /// Spatial mirror image `x → −x`.
    pub fn mirrored(&self) -> Self {
        let n = self.x.len() - 1;
        let x = self.x.iter().rev().map(|&v| -v).collect();
        let u = self.u.iter().rev().copied().collect();
        let delta_at = self.delta_at.iter().map(|(&k, &g)| (n - k, g)).collect();
        Self {
            x,
            u,
            u_left: self.u_right,
            u_right: self.u_left,
            delta_at,
            material: self.material,
        }
    }
}

/// Scattering outcome at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub energy: f64,
    /// Reflection amplitude `r`.
    pub amplitude: Complex64,
    /// `R = |r|²`.
    pub reflectance: f64,
    /// `T = 1 − R`.
    pub transmittance: f64,
    pub n_regions: usize,
}

/// Outcome of the N-doubling bound-state controller.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateReport {
    pub energies: Vec<f64>,
    /// `(N, levels at N)` for every refinement performed.
    pub trace: Vec<(usize, Vec<f64>)>,
    pub converged: bool,
    pub epsilon: f64,
    /// Regions in the final staircase.
    pub n_regions: usize,
}

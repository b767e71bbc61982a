//! Independent reference solvers.
//!
//! Nothing here calls into [`crate::impedance`]; the transfer-matrix solver
//! propagates `(ψ, ψ')` through the staircase and converts to plane-wave
//! amplitudes only at the leads, and the closed forms are textbook results.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Material, ScatteringResult, Staircase, H2_OVER_2M0};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Entries above this magnitude trigger renormalisation of a running product.
const RENORMALIZE_ABOVE: f64 = 1e100;

/// Longest decay exponent `|Im k|·w` propagated in one factor.
const MAX_DECAY_PER_FACTOR: f64 = 300.0;

/// 2×2 complex matrix with a separate real scale: the represented matrix is
/// `exp(log_scale) · [[m11, m12], [m21, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
    pub log_scale: f64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default(), Complex64::new(1.0, 0.0))
    }

    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self {
            m11,
            m12,
            m21,
            m22,
            log_scale: 0.0,
        }
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
            log_scale: self.log_scale + rhs.log_scale,
        }
    }

    /// Determinant of the represented (scaled) matrix.
    pub fn det(&self) -> Complex64 {
        (self.m11 * self.m22 - self.m12 * self.m21) * (2.0 * self.log_scale).exp()
    }

    fn max_entry(&self) -> f64 {
        self.m11.norm().max(self.m12.norm()).max(self.m21.norm()).max(self.m22.norm())
    }

    /// Divides the entries by their largest magnitude and folds it into `log_scale`.
    pub fn renormalize(&mut self) {
        let s = self.max_entry();
        if s > 0.0 && s.is_finite() {
            self.m11 /= s;
            self.m12 /= s;
            self.m21 /= s;
            self.m22 /= s;
            self.log_scale += s.ln();
        }
    }

    /// `(ψ, ψ')` propagation across a constant region of wavenumber `k` and width `w`.
    pub fn propagation(k: Complex64, w: f64) -> Self {
        let kw = k * w;
        let (cos, sin) = (kw.cos(), kw.sin());
        // sin(kw)/k, continuous through k = 0
        let sin_over_k = if kw.norm() < 1e-8 {
            Complex64::new(w, 0.0) * (1.0 - kw * kw / 6.0)
        } else {
            sin / k
        };
        Self::new(cos, sin_over_k, -k * sin, cos)
    }

    /// Derivative jump `ψ'(x⁺) − ψ'(x⁻) = m_rel·g/(ħ²/2m₀)·ψ(x)` of `g·δ(x)`.
    pub fn delta(g: f64, m: Material) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, Complex64::default(), Complex64::new(m.m_rel() * g / H2_OVER_2M0, 0.0), one)
    }
}

fn lead_wavenumber(e: f64, u: f64, m: Material) -> f64 {
    (m.m_rel() * (e - u) / H2_OVER_2M0).sqrt()
}

fn region_wavenumber(e: f64, u: f64, m: Material) -> Complex64 {
    let d = m.m_rel() * (e - u) / H2_OVER_2M0;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

/// Product of `(ψ, ψ')` factors from `x₀⁻` to `x_N⁺`, renormalised on the fly.
pub fn state_chain(stair: &Staircase, e: f64) -> TransferMatrix {
    let m = stair.material();
    let x = stair.breakpoints();
    let u = stair.potentials();
    let deltas = stair.deltas();
    let mut acc = TransferMatrix::identity();
    let absorb = |acc: &mut TransferMatrix, factor: TransferMatrix| {
        *acc = factor.mul(acc);
        if acc.max_entry() > RENORMALIZE_ABOVE {
            acc.renormalize();
        }
    };
    for j in 0..=u.len() {
        if let Some(&g) = deltas.get(&j) {
            absorb(&mut acc, TransferMatrix::delta(g, m));
        }
        if j == u.len() {
            break;
        }
        let k = region_wavenumber(e, u[j], m);
        let w = x[j + 1] - x[j];
        let pieces = ((k.im.abs() * w) / MAX_DECAY_PER_FACTOR).ceil().max(1.0) as usize;
        let sub = TransferMatrix::propagation(k, w / pieces as f64);
        for _ in 0..pieces {
            absorb(&mut acc, sub);
        }
    }
    acc
}

/// Plane-wave transfer matrix mapping left-lead amplitudes `(A, B)` of
/// `A e^{ik(x−x₀)} + B e^{−ik(x−x₀)}` to right-lead amplitudes referenced at `x_N`.
pub fn plane_wave_matrix(stair: &Staircase, e: f64) -> TransferMatrix {
    let m = stair.material();
    let kl = lead_wavenumber(e, stair.u_left(), m);
    let kr = lead_wavenumber(e, stair.u_right(), m);
    let chain = state_chain(stair, e);
    // (ψ, ψ') = W (A, B), W = [[1, 1], [ik, −ik]]
    let w_left = TransferMatrix::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        I * kl,
        -I * kl,
    );
    let inv = 1.0 / (-2.0 * I * kr);
    let w_right_inv = TransferMatrix::new(-I * kr * inv, -inv, -I * kr * inv, inv);
    w_right_inv.mul(&chain).mul(&w_left)
}

/// Transfer-matrix scattering for equal leads, `E > u_left`.
///
/// `r = −m21/m22` (rephased to the global origin) and
/// `t = det/m22` with the analytic `det = 1`; `T = |t|²` is computed
/// independently of `R` and the flux balance is checked, not imposed.
pub fn transfer_matrix_scattering(stair: &Staircase, e: f64) -> Result<ScatteringResult> {
    if stair.u_left() != stair.u_right() {
        return Err(Error::AsymmetricLeads {
            u_left: stair.u_left(),
            u_right: stair.u_right(),
        });
    }
    if !(e > stair.u_left()) {
        return Err(Error::NoPropagatingChannel {
            energy: e,
            u_left: stair.u_left(),
        });
    }
    let mut mat = plane_wave_matrix(stair, e);
    mat.renormalize();
    if mat.m22.norm() < 1e-14 {
        return Err(Error::Pole {
            energy: Some(e),
            region: None,
        });
    }
    let k = lead_wavenumber(e, stair.u_left(), stair.material());
    let r_local = -mat.m21 / mat.m22;
    let amplitude = r_local * Complex64::from_polar(1.0, 2.0 * k * stair.x_left());
    let reflectance = r_local.norm_sqr();
    let t_abs_ln = -(mat.log_scale + mat.m22.norm().ln());
    let transmittance = (2.0 * t_abs_ln).exp();
    let sum = reflectance + transmittance;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::FluxMismatch { sum });
    }
    Ok(ScatteringResult {
        energy: e,
        amplitude,
        reflectance,
        transmittance,
        n_regions: stair.n_regions(),
    })
}

/// Reflectance of a potential step from 0 to `u` (left lead at 0).
/// Total reflection (`R = 1`) for `E ≤ u`.
pub fn analytic_step(e: f64, u: f64, m: Material) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::NoPropagatingChannel { energy: e, u_left: 0.0 });
    }
    if e <= u {
        return Ok(1.0);
    }
    let k1 = lead_wavenumber(e, 0.0, m);
    let k2 = lead_wavenumber(e, u, m);
    let r = (k1 - k2) / (k1 + k2);
    Ok(r * r)
}

/// `sinh(x)/x` for real `x ≥ 0`, or `sin(y)/y` when `x = i·y`; returned as
/// `ln|·|` so thick barriers do not overflow.
fn ln_abs_shc(q: f64, above: bool) -> f64 {
    if q < 1e-8 {
        return if above { -q * q / 6.0 } else { q * q / 6.0 };
    }
    if above {
        (q.sin() / q).abs().ln()
    } else if q < 300.0 {
        (q.sinh() / q).ln()
    } else {
        q - std::f64::consts::LN_2 - q.ln()
    }
}

/// Transmission through a rectangular barrier of height `u0` and width `a`
/// between zero leads.
///
/// Below the top: `T = [1 + U0² sinh²(κa) / (4E(U0 − E))]⁻¹`; above it
/// `sinh → sin` and `U0 − E → E − U0`. Both are written as
/// `T = [1 + U0² a² (m_rel/(ħ²/2m₀)) shc² / (4E)]⁻¹` with
/// `shc = sinh(κa)/(κa)` (or `sin(ka)/(ka)`), which is continuous at `E = U0`
/// where `shc = 1` and `T = [1 + m_rel U0 a² / (4 ħ²/2m₀)]⁻¹`.
pub fn analytic_rect_barrier(e: f64, u0: f64, a: f64, m: Material) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::param("e", format!("energy must be positive, got {e}")));
    }
    if a <= 0.0 || u0 == 0.0 {
        return Ok(1.0);
    }
    let above = e > u0;
    let q = (m.m_rel() * (e - u0).abs() / H2_OVER_2M0).sqrt() * a;
    let ln_pref = 2.0 * (u0.abs() * a).ln() + (m.m_rel() / H2_OVER_2M0).ln() - (4.0 * e).ln();
    let ln_x = ln_pref + 2.0 * ln_abs_shc(q, above);
    // T = 1 / (1 + X)
    Ok(if ln_x > 700.0 {
        (-ln_x).exp()
    } else {
        1.0 / (1.0 + ln_x.exp())
    })
}

/// Bound-state energy `−m_rel g² / (4 ħ²/2m₀)` of an isolated delta well.
pub fn delta_well_energy(g: f64, m: Material) -> Result<f64> {
    if !(g < 0.0) {
        return Err(Error::NoBoundState { g });
    }
    Ok(-m.m_rel() * g * g / (4.0 * H2_OVER_2M0))
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Levels of a finite square well of `depth` and `width` between zero leads,
/// from the even (`ξ tan ξ = η`) and odd (`−ξ cot ξ = η`) conditions with
/// `ξ² + η² = ξ₀²`, `ξ₀ = (width/2)·sqrt(m_rel·depth/(ħ²/2m₀))`.
pub fn square_well_levels(depth: f64, width: f64, m: Material) -> Result<Vec<f64>> {
    if !(depth > 0.0) {
        return Err(Error::param("depth", format!("must be positive, got {depth}")));
    }
    if !(width > 0.0) {
        return Err(Error::param("width", format!("must be positive, got {width}")));
    }
    let xi0 = 0.5 * width * (m.m_rel() * depth / H2_OVER_2M0).sqrt();
    let eta = |xi: f64| (xi0 * xi0 - xi * xi).max(0.0).sqrt();
    // multiplied through by cos/sin to remove the tan/cot poles
    let even = |xi: f64| xi * xi.sin() - eta(xi) * xi.cos();
    let odd = |xi: f64| xi * xi.cos() + eta(xi) * xi.sin();
    let energy = |xi: f64| H2_OVER_2M0 * (2.0 * xi / width).powi(2) / m.m_rel() - depth;
    let half_pi = std::f64::consts::FRAC_PI_2;

    let mut levels = Vec::new();
    let mut j = 0usize;
    loop {
        let start = j as f64 * half_pi;
        if start >= xi0 {
            break;
        }
        let end = ((j + 1) as f64 * half_pi).min(xi0);
        let f: &dyn Fn(f64) -> f64 = if j % 2 == 0 { &even } else { &odd };
        let (fa, fb) = (f(start), f(end));
        if fa == 0.0 && start > 0.0 {
            levels.push(energy(start));
        } else if fa * fb < 0.0 || fb == 0.0 {
            levels.push(energy(bisect(start, end, f)));
        }
        j += 1;
    }
    levels.retain(|&e| e < 0.0 && e > -depth);
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

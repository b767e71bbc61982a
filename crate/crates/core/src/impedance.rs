//! Backward impedance sweep over a staircase.
//!
//! Starting from the right lead's characteristic impedance, each constant
//! region maps its load impedance to an input impedance with the homographic
//! (transmission-line) transform, and each delta term shifts the impedance by
//! `i·g/(ħ²/2m₀)`. The impedance arriving at the left edge yields the
//! reflection amplitude or, below both leads, the bound-state condition.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{wavenumber, Material, ReducedImpedance, ScatteringResult, Staircase, H2_OVER_2M0};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Above this `|Re(γΔx)|` ch and sh are taken relative to `e^{|Re γΔx|}/2`.
const NORMALIZE_ABOVE: f64 = 20.0;

/// Relative size below which a transform denominator counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// Which one-sided limit a profile value represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from the left; only emitted at delta breakpoints.
    L,
    /// Limit from the right (the value on continuous points).
    R,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::L => "L",
            Side::R => "R",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub x: f64,
    pub z: ReducedImpedance,
    pub side: Side,
}

/// `Z(x)` sampled along the sweep, sorted by ascending `x`. At a delta
/// breakpoint the left limit precedes the right limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceProfile {
    pub energy: f64,
    pub samples: Vec<ProfileSample>,
}

/// Characteristic impedance `k / m_rel` of a constant region.
pub fn char_impedance(e: f64, u: f64, m: Material) -> ReducedImpedance {
    ReducedImpedance(wavenumber(e, u, m) / m.m_rel())
}

/// Input impedance of a uniform section with characteristic impedance `z`
/// and complex electrical length `gamma_dx`, terminated by `load`:
///
/// `z (load·ch − z·sh) / (z·ch − load·sh)`
///
/// Degree-one homogeneous in `(load, z)`; a matched load (`load == z`) maps
/// to itself. Returns `Error::Pole` when the denominator is negligible
/// against `(|z| + |load|)(|ch| + |sh|)`.
pub fn transform(load: Complex64, z: Complex64, gamma_dx: Complex64) -> Result<Complex64> {
    if load == z {
        return Ok(z);
    }
    let (num, den, scale) = if gamma_dx.re.abs() > NORMALIZE_ABOVE {
        // ch and sh divided by e^{|Re w|}/2: ch ∝ 1 + q, sh ∝ s(1 − q), q = e^{−2 s w}
        let s = gamma_dx.re.signum();
        let q = (-2.0 * s * gamma_dx).exp();
        let (ch, sh) = (1.0 + q, s * (1.0 - q));
        (load * ch - z * sh, z * ch - load * sh, (z.norm() + load.norm()) * (ch.norm() + sh.norm()))
    } else {
        let (ch, sh) = (gamma_dx.cosh(), gamma_dx.sinh());
        let scale = (z.norm() + load.norm()) * (ch.norm() + sh.norm());
        (load * ch - z * sh, z * ch - load * sh, scale)
    };
    if !(den.norm() > POLE_TOLERANCE * scale) {
        return Err(Error::Pole {
            energy: None,
            region: None,
        });
    }
    Ok(z * num / den)
}

/// Carries the impedance `z_right` at the right face of a region of width
/// `dx` and characteristic impedance `z_region` back to its left face.
pub fn step_back(
    z_right: ReducedImpedance,
    z_region: ReducedImpedance,
    dx: f64,
    m: Material,
) -> Result<ReducedImpedance> {
    if !(dx > 0.0) {
        return Err(Error::param("dx", format!("region width must be positive, got {dx}")));
    }
    let k = z_region.0 * m.m_rel();
    let load = z_right.0;
    if k.norm() * dx < 1e-150 {
        // E = U: Z' = −i·m·Z², so 1/Z grows linearly leftwards
        let den = 1.0 - I * m.m_rel() * load * dx;
        if !(den.norm() > POLE_TOLERANCE * (1.0 + (den - 1.0).norm())) {
            return Err(Error::Pole {
                energy: None,
                region: None,
            });
        }
        return Ok(ReducedImpedance(load / den));
    }
    // γΔx = i·k·Δx, assembled so that purely real or imaginary k keep exact zeros
    let gamma_dx = Complex64::new(-k.im * dx, k.re * dx);
    transform(load, z_region.0, gamma_dx).map(ReducedImpedance)
}

/// Shift across a delta term of strength `g` (eV·nm); the left-side value is
/// `Z + i·g/(ħ²/2m₀)`.
#[inline]
pub fn apply_delta(z: ReducedImpedance, g: f64) -> ReducedImpedance {
    ReducedImpedance(z.0 + I * (g / H2_OVER_2M0))
}

fn with_context(err: Error, energy: f64, region: Option<usize>) -> Error {
    match err {
        Error::Pole { .. } => Error::Pole {
            energy: Some(energy),
            region,
        },
        other => other,
    }
}

fn delta_shift(stair: &Staircase, idx: usize, z: ReducedImpedance) -> Option<ReducedImpedance> {
    stair.deltas().get(&idx).map(|&g| apply_delta(z, g))
}

/// Impedance seen from the left lead at `x₀` (delta at `x₀` included).
pub fn left_impedance(stair: &Staircase, e: f64) -> Result<ReducedImpedance> {
    let m = stair.material();
    let x = stair.breakpoints();
    let u = stair.potentials();
    let n = u.len();
    let mut z = char_impedance(e, stair.u_right(), m);
    if let Some(s) = delta_shift(stair, n, z) {
        z = s;
    }
    for j in (0..n).rev() {
        let zr = char_impedance(e, u[j], m);
        z = step_back(z, zr, x[j + 1] - x[j], m).map_err(|err| with_context(err, e, Some(j)))?;
        if let Some(s) = delta_shift(stair, j, z) {
            z = s;
        }
    }
    Ok(z)
}

/// Full sweep returning `Z` at the left edge and the profile at breakpoints.
pub fn sweep(stair: &Staircase, e: f64) -> Result<(ReducedImpedance, ImpedanceProfile)> {
    sweep_sampled(stair, e, 0)
}

/// Sweep with `per_region` extra equally spaced samples inside every region.
pub fn sweep_sampled(
    stair: &Staircase,
    e: f64,
    per_region: usize,
) -> Result<(ReducedImpedance, ImpedanceProfile)> {
    let m = stair.material();
    let x = stair.breakpoints();
    let u = stair.potentials();
    let n = u.len();
    let mut samples = Vec::with_capacity(x.len() * (per_region + 1) + stair.deltas().len());

    let mut z = char_impedance(e, stair.u_right(), m);
    samples.push(ProfileSample {
        x: x[n],
        z,
        side: Side::R,
    });
    if let Some(s) = delta_shift(stair, n, z) {
        z = s;
        samples.push(ProfileSample { x: x[n], z, side: Side::L });
    }
    for j in (0..n).rev() {
        let zr = char_impedance(e, u[j], m);
        let w = x[j + 1] - x[j];
        for s in (1..=per_region).rev() {
            let xs = x[j] + w * s as f64 / (per_region + 1) as f64;
            let zs = step_back(z, zr, x[j + 1] - xs, m).map_err(|err| with_context(err, e, Some(j)))?;
            samples.push(ProfileSample {
                x: xs,
                z: zs,
                side: Side::R,
            });
        }
        z = step_back(z, zr, w, m).map_err(|err| with_context(err, e, Some(j)))?;
        samples.push(ProfileSample {
            x: x[j],
            z,
            side: Side::R,
        });
        if let Some(s) = delta_shift(stair, j, z) {
            z = s;
            samples.push(ProfileSample { x: x[j], z, side: Side::L });
        }
    }
    samples.reverse();
    Ok((z, ImpedanceProfile { energy: e, samples }))
}

/// Reflection amplitude `r = exp(2γ₀x₀)·(z₀ − Z₀)/(z₀ + Z₀)` for a wave
/// incident from the left lead, with `γ₀ = i·k_left`.
pub fn reflection(z0_in: ReducedImpedance, stair: &Staircase, e: f64) -> Result<Complex64> {
    if !(e > stair.u_left()) {
        return Err(Error::NoPropagatingChannel {
            energy: e,
            u_left: stair.u_left(),
        });
    }
    let m = stair.material();
    let k = wavenumber(e, stair.u_left(), m).re;
    let z0 = char_impedance(e, stair.u_left(), m).0;
    let phase = Complex64::from_polar(1.0, 2.0 * k * stair.x_left());
    Ok(phase * (z0 - z0_in.0) / (z0 + z0_in.0))
}

/// Reflection and transmission at energy `e` (leads must coincide).
pub fn scattering(stair: &Staircase, e: f64) -> Result<ScatteringResult> {
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
    let z0 = left_impedance(stair, e)?;
    let r = reflection(z0, stair, e)?;
    let reflectance = r.norm_sqr();
    Ok(ScatteringResult {
        energy: e,
        amplitude: r,
        reflectance,
        transmittance: 1.0 - reflectance,
        n_regions: stair.n_regions(),
    })
}

/// Relative real-part allowance in the bound-state condition.
const BOUND_REAL_TOLERANCE: f64 = 1e-9;

/// `F(E) = Z₀(E) + z₀(E)`; bound states are zeros of `F`. Purely imaginary
/// inside the bound window for real staircases.
pub fn bound_condition(stair: &Staircase, e: f64) -> Result<Complex64> {
    let hi = stair.u_left().min(stair.u_right());
    if !(e < hi) {
        return Err(Error::OutsideBoundWindow {
            energy: e,
            lo: f64::NEG_INFINITY,
            hi,
        });
    }
    let f = left_impedance(stair, e)?.0 + char_impedance(e, stair.u_left(), stair.material()).0;
    if f.re.abs() > BOUND_REAL_TOLERANCE * f.norm() {
        return Err(Error::NonImaginaryCondition {
            energy: e,
            re: f.re,
            abs: f.norm(),
        });
    }
    Ok(f)
}

/// Zeros of `ψ` inside one region, given the log-derivative `l = ψ'/ψ` at
/// its right face, wavenumber `k` and width `w`.
fn zeros_in_region(l: f64, k: Complex64, w: f64) -> usize {
    if k.re > 0.0 {
        // ψ ∝ sin θ with cot θ = l/k at the right face; θ falls by k·w leftwards
        let theta_l = k.re.atan2(l) - k.re * w;
        if theta_l < 0.0 {
            (-theta_l / std::f64::consts::PI).floor() as usize + 1
        } else {
            0
        }
    } else if k.im > 0.0 {
        let kappa = k.im;
        usize::from(l > kappa && (kappa / l).atanh() < kappa * w)
    } else {
        usize::from(l * w > 1.0)
    }
}

/// Number of bound states of `stair` strictly below `e`.
///
/// Counts the zeros of the solution that decays into the right lead, read
/// off from the impedance during the backward sweep. The count steps up by
/// one exactly where `F(E)` vanishes, however narrow that zero is.
pub fn count_levels_below(stair: &Staircase, e: f64) -> Result<usize> {
    let hi = stair.u_left().min(stair.u_right());
    if !(e < hi) {
        return Err(Error::OutsideBoundWindow {
            energy: e,
            lo: f64::NEG_INFINITY,
            hi,
        });
    }
    let m = stair.material();
    let x = stair.breakpoints();
    let u = stair.potentials();
    let n = u.len();
    let log_derivative = |z: ReducedImpedance| -m.m_rel() * z.0.im;
    let mut z = char_impedance(e, stair.u_right(), m);
    if let Some(s) = delta_shift(stair, n, z) {
        z = s;
    }
    let mut count = 0;
    for j in (0..n).rev() {
        let zr = char_impedance(e, u[j], m);
        let w = x[j + 1] - x[j];
        count += zeros_in_region(log_derivative(z), zr.0 * m.m_rel(), w);
        z = step_back(z, zr, w, m).map_err(|err| with_context(err, e, Some(j)))?;
        if let Some(s) = delta_shift(stair, j, z) {
            z = s;
        }
    }
    let kappa = wavenumber(e, stair.u_left(), m).im;
    Ok(count + usize::from(log_derivative(z) > kappa))
}

/// Maximum normalised residual of `Z' + i·m·Z² = i(E − U)/(ħ²/2m₀)` over a
/// sampled profile, using the staircase's own region potentials.
pub fn ode_residual(profile: &ImpedanceProfile, stair: &Staircase, e: f64) -> Result<f64> {
    let u = stair.potentials();
    residual_with(profile, stair, e, |j, _| u[j])
}

/// Same residual, but against an arbitrary potential `U(x)`, e.g. the
/// smooth potential the staircase approximates.
pub fn ode_residual_against(
    profile: &ImpedanceProfile,
    stair: &Staircase,
    e: f64,
    potential: impl Fn(f64) -> f64,
) -> Result<f64> {
    residual_with(profile, stair, e, |_, x| potential(x))
}

fn residual_with(
    profile: &ImpedanceProfile,
    stair: &Staircase,
    e: f64,
    potential: impl Fn(usize, f64) -> f64,
) -> Result<f64> {
    let x = stair.breakpoints();
    let m = stair.material().m_rel();
    let s = &profile.samples;
    let mut worst: f64 = 0.0;
    let mut cursor = 0;
    for j in 0..stair.n_regions() {
        let (lo, hi) = (x[j], x[j + 1]);
        // left edge: right-side limit at x[j]
        while cursor < s.len() && (s[cursor].x < lo || (s[cursor].x == lo && s[cursor].side == Side::L)) {
            cursor += 1;
        }
        let mut pts: Vec<(f64, Complex64)> = Vec::new();
        let mut i = cursor;
        while i < s.len() && s[i].x < hi {
            pts.push((s[i].x, s[i].z.0));
            i += 1;
        }
        // right edge: left-side limit if a delta sits there, otherwise the single value
        if i < s.len() && s[i].x == hi {
            pts.push((hi, s[i].z.0));
        }
        if pts.len() < 3 {
            return Err(Error::TooFewSamples {
                region: j,
                count: pts.len(),
            });
        }
        for w in pts.windows(2) {
            let ((xa, za), (xb, zb)) = (w[0], w[1]);
            let h = xb - xa;
            // Z_a·Z_b in place of Z_m²; exact when only the Z² term acts
            let rhs = I * ((e - potential(j, 0.5 * (xa + xb))) / H2_OVER_2M0);
            let quad = I * m * za * zb;
            let res = (zb - za) / h + quad - rhs;
            let norm = rhs.norm() + quad.norm();
            if norm > 0.0 {
                worst = worst.max(res.norm() / norm);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Material;
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn char_impedance_branches() {
        let m = Material::electron();
        let z = char_impedance(1.0, 0.0, m).0;
        assert_eq!(z, c((1.0 / H2_OVER_2M0).sqrt(), 0.0));
        assert_eq!(char_impedance(0.7, 0.7, m).0, c(0.0, 0.0));
        let barrier = char_impedance(0.5, 0.956, Material::new(0.1).unwrap()).0;
        assert_eq!(barrier.re, 0.0);
        assert!(barrier.im > 0.0);
    }

    #[test]
    fn matched_load_is_fixed_point() {
        let m = Material::new(0.3).unwrap();
        for &(e, u) in &[(1.0, 0.2), (0.1, 0.9), (2.0, -1.0)] {
            let z = char_impedance(e, u, m);
            for &dx in &[1e-6, 0.3, 7.0, 40.0] {
                let out = step_back(z, z, dx, m).unwrap().0;
                assert!((out - z.0).norm() <= 4.0 * f64::EPSILON * z.0.norm(), "{out} vs {}", z.0);
            }
        }
    }

    #[test]
    fn zero_width_limit_is_continuous() {
        let m = Material::electron();
        let z = char_impedance(0.4, 1.0, m);
        let load = ReducedImpedance(c(0.7, -0.2));
        let out = step_back(load, z, 1e-9, m).unwrap().0;
        // |Z'| is about 16 nm⁻² here
        assert!((out - load.0).norm() < 1e-7);
    }

    #[test]
    fn band_edge_region_uses_limit() {
        let m = Material::new(0.5).unwrap();
        let load = ReducedImpedance(c(0.8, 0.1));
        let at_edge = step_back(load, char_impedance(0.3, 0.3, m), 2.0, m).unwrap().0;
        let near = step_back(load, char_impedance(0.3, 0.3 - 1e-12, m), 2.0, m).unwrap().0;
        assert!((at_edge - near).norm() < 1e-8, "{at_edge} vs {near}");
    }

    #[test]
    fn strongly_evanescent_region_does_not_overflow() {
        let m = Material::electron();
        let z = char_impedance(0.01, 5.0, m);
        let out = step_back(ReducedImpedance(c(1.0, 0.0)), z, 500.0, m).unwrap().0;
        assert!(out.re.is_finite() && out.im.is_finite());
        // a thick barrier only passes its right-decaying solution, whose impedance is z
        assert!((out - z.0).norm() < 1e-12 * z.0.norm());
    }

    #[test]
    fn delta_shift_sign_and_inverse() {
        let z = ReducedImpedance(c(1.5, 0.25));
        let barrier = apply_delta(z, 0.3).0;
        assert!(barrier.im > z.0.im);
        assert_eq!(apply_delta(apply_delta(z, 0.3), -0.3), z);
    }

    #[test]
    fn free_particle_profile_is_constant() {
        let m = Material::electron();
        let stair = Staircase::from_layers(0.0, &[(1.0, 0.0), (2.0, 0.0)], 0.0, 0.0, BTreeMap::new(), m).unwrap();
        let (z0, profile) = sweep_sampled(&stair, 0.5, 3).unwrap();
        let zc = char_impedance(0.5, 0.0, m).0;
        assert!((z0.0 - zc).norm() < 1e-14);
        for s in &profile.samples {
            assert!((s.z.0 - zc).norm() < 1e-14);
        }
        let r = scattering(&stair, 0.5).unwrap();
        assert!(r.reflectance < 1e-28);
        assert_eq!(r.transmittance, 1.0 - r.reflectance);
    }

    #[test]
    fn profile_records_both_sides_of_a_delta() {
        let m = Material::electron();
        let stair = Staircase::from_layers(
            -1.0,
            &[(1.0, 0.0), (1.0, 0.0)],
            0.0,
            0.0,
            BTreeMap::from([(1, 0.2)]),
            m,
        )
        .unwrap();
        let (_, profile) = sweep(&stair, 1.0).unwrap();
        let at_zero: Vec<_> = profile.samples.iter().filter(|s| s.x == 0.0).collect();
        assert_eq!(at_zero.len(), 2);
        assert_eq!(at_zero[0].side, Side::L);
        assert_eq!(at_zero[1].side, Side::R);
        let jump = at_zero[0].z.0 - at_zero[1].z.0;
        assert!((jump - c(0.0, 0.2 / H2_OVER_2M0)).norm() < 1e-12);
        assert!(profile.samples.windows(2).all(|w| w[0].x <= w[1].x));
    }

    #[test]
    fn step_reflection_matches_textbook() {
        let m = Material::electron();
        let stair = Staircase::new(vec![0.0], vec![], 0.0, 0.4, BTreeMap::new(), m).unwrap();
        let e = 1.0;
        let z0 = left_impedance(&stair, e).unwrap();
        let r = reflection(z0, &stair, e).unwrap();
        let k1 = (e / H2_OVER_2M0).sqrt();
        let k2 = ((e - 0.4) / H2_OVER_2M0).sqrt();
        assert!((r.norm() - (k1 - k2) / (k1 + k2)).abs() < 1e-15);
    }

    #[test]
    fn matched_system_has_no_reflection() {
        let m = Material::electron();
        let stair = Staircase::new(vec![0.0], vec![], 0.0, 0.0, BTreeMap::new(), m).unwrap();
        let z0 = char_impedance(1.0, 0.0, m);
        assert_eq!(reflection(z0, &stair, 1.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn scattering_rejects_bad_configurations() {
        let m = Material::electron();
        let asym = Staircase::new(vec![0.0], vec![], 0.0, 0.1, BTreeMap::new(), m).unwrap();
        assert!(matches!(scattering(&asym, 1.0), Err(Error::AsymmetricLeads { .. })));
        let sym = Staircase::new(vec![0.0], vec![], 0.2, 0.2, BTreeMap::new(), m).unwrap();
        assert!(matches!(scattering(&sym, 0.1), Err(Error::NoPropagatingChannel { .. })));
        assert!(matches!(bound_condition(&sym, 0.3), Err(Error::OutsideBoundWindow { .. })));
    }

    #[test]
    fn barrier_delta_reduces_transmission() {
        let m = Material::electron();
        let stair = Staircase::new(vec![0.0], vec![], 0.0, 0.0, BTreeMap::from([(0, 0.05)]), m).unwrap();
        let res = scattering(&stair, 0.5).unwrap();
        assert!(res.transmittance < 1.0 && res.transmittance > 0.0);
    }

    #[test]
    fn delta_well_bound_condition_vanishes_at_closed_form() {
        // −ħ²/2m ψ'' + g δ ψ: E = −m_rel g² / (4 ħ²/2m₀)
        let m = Material::new(0.5).unwrap();
        let g = -0.4;
        let e_star = -m.m_rel() * g * g / (4.0 * H2_OVER_2M0);
        let stair = Staircase::new(vec![0.0], vec![], 0.0, 0.0, BTreeMap::from([(0, g)]), m).unwrap();
        let f = bound_condition(&stair, e_star).unwrap();
        assert!(f.norm() < 1e-12 * (g / H2_OVER_2M0).abs(), "{f}");
        let below = bound_condition(&stair, e_star * 1.01).unwrap().im;
        let above = bound_condition(&stair, e_star * 0.99).unwrap().im;
        assert!(below * above < 0.0);
    }

    #[test]
    fn window_edge_limit() {
        let m = Material::electron();
        let stair =
            Staircase::from_layers(0.0, &[(2.0, -0.3)], 0.0, 0.0, BTreeMap::new(), m).unwrap();
        let e = -1e-14;
        let f = bound_condition(&stair, e).unwrap();
        let z0 = left_impedance(&stair, e).unwrap().0;
        assert!((f - z0).norm() < 1e-5);
    }

    #[test]
    fn pole_is_reported_with_context() {
        // z·ch − Z·sh = 0 for a half-wave: cos(kΔx) = 0 and Z = 0
        let m = Material::electron();
        let k = (1.0 / H2_OVER_2M0).sqrt();
        let dx = std::f64::consts::FRAC_PI_2 / k;
        let err = step_back(ReducedImpedance(c(0.0, 0.0)), char_impedance(1.0, 0.0, m), dx, m);
        assert!(matches!(err, Err(Error::Pole { .. })));
    }

    #[test]
    fn residual_of_matched_region_is_zero() {
        let m = Material::electron();
        let stair = Staircase::from_layers(0.0, &[(3.0, 0.2)], 0.2, 0.2, BTreeMap::new(), m).unwrap();
        let (_, profile) = sweep_sampled(&stair, 1.0, 5).unwrap();
        assert!(ode_residual(&profile, &stair, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn residual_needs_interior_samples() {
        let m = Material::electron();
        let stair = Staircase::from_layers(0.0, &[(3.0, 0.2)], 0.0, 0.0, BTreeMap::new(), m).unwrap();
        let (_, profile) = sweep(&stair, 1.0).unwrap();
        assert!(matches!(
            ode_residual(&profile, &stair, 1.0),
            Err(Error::TooFewSamples { region: 0, count: 2 })
        ));
    }

    #[test]
    fn residual_is_second_order_in_sample_spacing() {
        let m = Material::new(0.1).unwrap();
        let stair = Staircase::from_layers(0.0, &[(30.0, 0.956)], 0.0, 0.0, BTreeMap::new(), m).unwrap();
        for &e in &[0.3, 1.4] {
            let (_, coarse) = sweep_sampled(&stair, e, 159).unwrap();
            let (_, fine) = sweep_sampled(&stair, e, 319).unwrap();
            let ratio = ode_residual(&coarse, &stair, e).unwrap() / ode_residual(&fine, &stair, e).unwrap();
            assert!((ratio - 4.0).abs() < 0.3, "E = {e}: ratio {ratio}");
        }
    }
}

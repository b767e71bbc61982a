#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;

use qwi::{Material, Staircase};

/// Random staircase: up to 50 regions of width 0.1..20 nm and potential in
/// [-2, 2] eV, equal leads, up to three deltas with |g| <= 1 eV nm.
pub fn random_staircase(rng: &mut impl Rng) -> Staircase {
    let n = rng.gen_range(1..=50);
    let layers: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.1..20.0), rng.gen_range(-2.0..2.0)))
        .collect();
    let lead = rng.gen_range(-2.0..2.0);
    let mut deltas = BTreeMap::new();
    for _ in 0..rng.gen_range(0..=3) {
        let g: f64 = rng.gen_range(-1.0..1.0);
        if g != 0.0 {
            *deltas.entry(rng.gen_range(0..=n)).or_insert(0.0) += g;
        }
    }
    deltas.retain(|_, g| *g != 0.0);
    let material = Material::new(rng.gen_range(0.05..1.0)).unwrap();
    Staircase::from_layers(rng.gen_range(-50.0..50.0), &layers, lead, lead, deltas, material).unwrap()
}

/// Energies above the leads, up to 3 eV above the highest region.
pub fn scattering_energies(rng: &mut impl Rng, stair: &Staircase, count: usize) -> Vec<f64> {
    let top = stair.potentials().iter().copied().fold(stair.u_left(), f64::max);
    (0..count)
        .map(|_| stair.u_left() + rng.gen_range(1e-3..(top - stair.u_left() + 3.0)))
        .collect()
}

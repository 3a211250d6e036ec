#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use triphoton::kinematics::{geometry_from_angles, DecayGeometry};
use triphoton::tensor::{PureState, C64};

/// Normalized three-qubit state with Gaussian amplitudes.
pub fn random_state(seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> =
        (0..8).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    PureState::normalized(3, amps).unwrap()
}

/// Uniform over the feasible triangle θ12, θ13, θ23 ∈ (0°, 180°).
pub fn random_feasible_geometry(rng: &mut ChaCha8Rng) -> DecayGeometry {
    loop {
        let a = 180.0 * rng.random::<f64>();
        let b = 180.0 * rng.random::<f64>();
        if a > 0.0 && b > 0.0 && a + b > 180.0 {
            let g = geometry_from_angles(a, b).unwrap();
            if g.is_feasible() {
                return g;
            }
        }
    }
}

/// Expanded Cayley hyperdeterminant of the amplitude tensor a_ijk.
pub fn cayley(s: &PureState) -> C64 {
    let a = |i: usize, j: usize, k: usize| s.amplitude(4 * i + 2 * j + k);
    let sq = |x: C64| x * x;
    sq(a(0, 0, 0)) * sq(a(1, 1, 1))
        + sq(a(0, 0, 1)) * sq(a(1, 1, 0))
        + sq(a(0, 1, 0)) * sq(a(1, 0, 1))
        + sq(a(1, 0, 0)) * sq(a(0, 1, 1))
        - 2.0
            * (a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1)
                + a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1)
                + a(0, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 1)
                + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0)
                + a(0, 0, 1) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 0)
                + a(0, 1, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 0, 1))
        + 4.0 * (a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 1) * a(1, 1, 0) + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0) * a(1, 1, 1))
}

/// Tr ρ² of one party's reduced state, by explicit partial trace.
pub fn purity_oracle(s: &PureState, party: usize) -> f64 {
    let shift = 2 - party;
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for x in 0..8usize {
        for y in 0..8usize {
            if (x & !(1 << shift)) == (y & !(1 << shift)) {
                rho[(x >> shift) & 1][(y >> shift) & 1] += s.amplitude(x) * s.amplitude(y).conj();
            }
        }
    }
    let mut p = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            p += (rho[i][j] * rho[j][i]).re;
        }
    }
    p
}

/// sin⁶(δ/2) / (4(1 + cos³(δ/2))²)
pub fn delta_tangle_closed_form(delta_deg: f64) -> f64 {
    let h = (delta_deg / 2.0).to_radians();
    h.sin().powi(6) / (4.0 * (1.0 + h.cos().powi(3)).powi(2))
}

/// ⟨x y y⟩ of the δ family: −sin²(δ/2)/(1 + cos³(δ/2)).
pub fn delta_xyy_closed_form(delta_deg: f64) -> f64 {
    let h = (delta_deg / 2.0).to_radians();
    -h.sin().powi(2) / (1.0 + h.cos().powi(3))
}

/// Zero of the δ-family violation, 2·arccos(√3 − 1).
pub fn violation_threshold_deg() -> f64 {
    2.0 * (3f64.sqrt() - 1.0).acos().to_degrees()
}

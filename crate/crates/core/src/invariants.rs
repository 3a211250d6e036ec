//! Local-unitary invariants of three-qubit states and the tangle map over
//! decay geometries.

use rayon::prelude::*;

use crate::error::{validation, Result};
use crate::kinematics::geometry_from_angles;
use crate::states::{ortho_state, SpinZ};
use crate::table::{Cell, Table};
use crate::tensor::{reduced_density, PureState, C64};

/// ε₀₀ = ε₁₁ = 0, ε₀₁ = −ε₁₀ = 1
const EPS: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

/// Cayley hyperdeterminant of the 2×2×2 amplitude tensor, as the
/// ε-contraction
///
/// Σ ε_{i₁i₂} ε_{i₃i₄} ε_{j₁j₂} ε_{j₃j₄} ε_{k₁k₃} ε_{k₂k₄} t_{i₁j₁k₁} t_{i₂j₂k₂} t_{i₃j₃k₃} t_{i₄j₄k₄}
///
/// halved. The bare sum counts each monomial twice (for GHZ it is −1/2), so
/// the factor ½ puts GHZ at modulus 1/4. The result is the negative of the
/// expanded Cayley polynomial a₀₀₀²a₁₁₁² + … − 2(…) + 4(…); only the modulus
/// enters the tangle.
#[allow(clippy::needless_range_loop)]
pub fn hyperdeterminant(s: &PureState) -> Result<C64> {
    s.require_three()?;
    let t = |i: usize, j: usize, k: usize| s.amplitude((i << 2) | (j << 1) | k);
    let mut sum = C64::new(0.0, 0.0);
    for i1 in 0..2 {
        for i2 in 0..2 {
            let e_i12 = EPS[i1][i2];
            if e_i12 == 0.0 {
                continue;
            }
            for i3 in 0..2 {
                for i4 in 0..2 {
                    let e_i = e_i12 * EPS[i3][i4];
                    if e_i == 0.0 {
                        continue;
                    }
                    for j1 in 0..2 {
                        for j2 in 0..2 {
                            for j3 in 0..2 {
                                for j4 in 0..2 {
                                    let e_j = EPS[j1][j2] * EPS[j3][j4];
                                    if e_j == 0.0 {
                                        continue;
                                    }
                                    for k1 in 0..2 {
                                        for k3 in 0..2 {
                                            for k2 in 0..2 {
                                                for k4 in 0..2 {
                                                    let e_k = EPS[k1][k3] * EPS[k2][k4];
                                                    if e_k == 0.0 {
                                                        continue;
                                                    }
                                                    sum += t(i1, j1, k1)
                                                        * t(i2, j2, k2)
                                                        * t(i3, j3, k3)
                                                        * t(i4, j4, k4)
                                                        * (e_i * e_j * e_k);
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(sum * 0.5)
}

/// τ = |Hdet(t)| ∈ [0, 1/4] for a normalized three-qubit state.
pub fn tangle(s: &PureState) -> Result<f64> {
    s.require_three()?;
    s.require_normalized()?;
    Ok(hyperdeterminant(s)?.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantFingerprint {
    pub tangle: f64,
    pub purities: [f64; 3],
}

impl InvariantFingerprint {
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.purities
            .iter()
            .zip(other.purities)
            .map(|(a, b)| (a - b).abs())
            .fold((self.tangle - other.tangle).abs(), f64::max)
    }
}

pub fn invariant_fingerprint(s: &PureState) -> Result<InvariantFingerprint> {
    let tangle = tangle(s)?;
    let mut purities = [0.0; 3];
    for (p, out) in purities.iter_mut().enumerate() {
        *out = reduced_density(s, p)?.purity();
    }
    Ok(InvariantFingerprint { tangle, purities })
}

/// Tangle of ψ₀ over a rectangular grid of opening angles (θ₁₂, θ₁₃).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub step: f64,
    /// Grid coordinates, shared by both axes.
    pub angles: Vec<f64>,
    /// Row-major: `values[i * angles.len() + j]` is the cell (angles[i], angles[j]).
    pub values: Vec<f64>,
    pub feasible: Vec<bool>,
}

impl ScanGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.angles.len() + j]
    }

    /// (θ₁₂, θ₁₃, τ) of the largest cell; first in row-major order on ties.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let n = self.angles.len();
        let mut best = 0;
        for (idx, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = idx;
            }
        }
        (self.angles[best / n], self.angles[best % n], self.values[best])
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["theta12_deg", "theta13_deg", "tangle"]);
        let n = self.angles.len();
        for (idx, v) in self.values.iter().enumerate() {
            t.push(vec![Cell::Num(self.angles[idx / n]), Cell::Num(self.angles[idx % n]), Cell::Num(*v)]);
        }
        t
    }
}

/// Grid points k·step for k = 1, 2, … strictly below 360°.
fn scan_angles(step: f64) -> Vec<f64> {
    (1..).map(|k| k as f64 * step).take_while(|&a| a < 360.0 - 1e-9).collect()
}

/// Tangle of the S_z = 0 decay state over (0°, 360°)²; geometries that
/// cannot conserve momentum are recorded as 0.
pub fn tangle_scan(step: f64) -> Result<ScanGrid> {
    if !(step > 0.0 && step <= 10.0) {
        return Err(validation(format!("scan step {step}° must lie in (0, 10]")));
    }
    let angles = scan_angles(step);
    let n = angles.len();
    let cells: Vec<(f64, bool)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let g = geometry_from_angles(angles[idx / n], angles[idx % n]).expect("grid angles in range");
            if !g.is_feasible() {
                return Ok((0.0, false));
            }
            Ok((tangle(&ortho_state(&g, SpinZ::Zero)?)?, true))
        })
        .collect::<Result<Vec<_>>>()?;
    let (values, feasible) = cells.into_iter().unzip();
    Ok(ScanGrid { step, angles, values, feasible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::mercedes_state;
    use crate::tensor::{c, tensor3};

    #[test]
    fn reference_tangles() {
        assert!((tangle(&PureState::ghz()).unwrap() - 0.25).abs() < 1e-15);
        assert!((tangle(&mercedes_state()).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        let u = PureState::qubit(C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let v = PureState::real_qubit(1.0, 0.0);
        assert!(tangle(&tensor3(&u, &v, &u).unwrap()).unwrap() < 1e-16);
    }

    #[test]
    fn tangle_rejects_unnormalized() {
        assert!(tangle(&PureState::ghz().scale(c(1.1))).is_err());
    }

    #[test]
    fn fingerprints() {
        let f = invariant_fingerprint(&PureState::ghz()).unwrap();
        assert!(f.purities.iter().all(|p| (p - 0.5).abs() < 1e-15));
        let f = invariant_fingerprint(&PureState::basis(3, 0).unwrap()).unwrap();
        assert_eq!(f, InvariantFingerprint { tangle: 0.0, purities: [1.0; 3] });
        let f = invariant_fingerprint(&mercedes_state()).unwrap();
        for p in f.purities {
            assert!((p - 13.0 / 18.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scan_step_validation() {
        assert!(tangle_scan(0.0).is_err());
        assert!(tangle_scan(10.5).is_err());
        assert!(tangle_scan(f64::NAN).is_err());
    }

    #[test]
    fn coarse_scan() {
        let g = tangle_scan(10.0).unwrap();
        assert_eq!(g.angles.len(), 35);
        let (a, b, v) = g.argmax();
        assert_eq!((a, b), (120.0, 120.0));
        assert!((v - 1.0 / 12.0).abs() < 1e-12);
        for (v, f) in g.values.iter().zip(&g.feasible) {
            if !f {
                assert_eq!(*v, 0.0);
            }
        }
    }
}

//! Exact small-scale complex linear algebra for one to three qubits.
//!
//! Basis convention used everywhere in the crate: helicity `+` is bit 0,
//! helicity `−` is bit 1, and party A is the most significant bit, so the
//! amplitude `t_ijk` lives at index `4i + 2j + k`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{validation, Error, Result};

pub type C64 = Complex64;

/// A 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

/// Tolerance for "normalized" and for unitarity/hermiticity checks.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on the length of a Bloch vector.
pub const UNIT_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (col, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    out
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat_max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut d: f64 = 0.0;
    for r in 0..2 {
        for col in 0..2 {
            d = d.max((a[r][col] - b[r][col]).norm());
        }
    }
    d
}

/// The Pauli matrices σx, σy, σz.
pub fn pauli() -> [Mat2; 3] {
    [[[ZERO, ONE], [ONE, ZERO]], [[ZERO, -I], [I, ZERO]], [[ONE, ZERO], [ZERO, -ONE]]]
}

/// `v·σ` for a complex 3-vector.
pub fn sigma_dot(v: &[C64; 3]) -> Mat2 {
    let s = pauli();
    let mut out = [[ZERO; 2]; 2];
    for (k, sk) in s.iter().enumerate() {
        for r in 0..2 {
            for col in 0..2 {
                out[r][col] += v[k] * sk[r][col];
            }
        }
    }
    out
}

/// Pure state of one, two or three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if !(1..=3).contains(&n_qubits) {
            return Err(validation(format!("{n_qubits} qubits not supported (1 to 3)")));
        }
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(Error::Dimension { expected, found: amps.len() });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(validation("non-finite amplitude"));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Builds the state and rescales it to unit norm.
    pub fn normalized(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let s = Self::new(n_qubits, amps)?;
        let norm = s.norm();
        if norm == 0.0 {
            return Err(validation("zero vector cannot be normalized"));
        }
        Ok(s.scale(c(1.0 / norm)))
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n_qubits, amps.iter().map(|&a| c(a)).collect())
    }

    pub fn qubit(a0: C64, a1: C64) -> Self {
        Self { n_qubits: 1, amps: vec![a0, a1] }
    }

    pub fn real_qubit(a0: f64, a1: f64) -> Self {
        Self::qubit(c(a0), c(a1))
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(validation(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(n_qubits, amps)
    }

    /// (|000⟩ + |111⟩)/√2
    pub fn ghz() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = c(h);
        amps[7] = c(h);
        Self { n_qubits: 3, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(validation(format!("state is not normalized (|ψ|² = {})", self.norm_sqr())))
        }
    }

    pub(crate) fn require_three(&self) -> Result<()> {
        if self.n_qubits == 3 {
            Ok(())
        } else {
            Err(Error::Dimension { expected: 8, found: self.amps.len() })
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { n_qubits: self.n_qubits, amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { n_qubits: self.n_qubits, amps })
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_shape(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest amplitude-wise difference.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest amplitude-wise difference after removing the best global phase.
    pub fn max_diff_up_to_phase(&self, other: &Self) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.scale(phase).max_diff(other)
    }

    /// Relabels the parties: party `p` of the result is party `perm[p]` of `self`.
    pub fn permute_parties(&self, perm: [usize; 3]) -> Result<Self> {
        self.require_three()?;
        let mut sorted = perm;
        sorted.sort_unstable();
        if sorted != [0, 1, 2] {
            return Err(validation(format!("{perm:?} is not a permutation of the parties")));
        }
        let mut amps = vec![ZERO; 8];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let mut src = [0usize; 3];
            for p in 0..3 {
                src[perm[p]] = bits[p];
            }
            *amp = self.amps[(src[0] << 2) | (src[1] << 1) | src[2]];
        }
        Ok(Self { n_qubits: 3, amps })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n_qubits == other.n_qubits {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.amps.len(), found: other.amps.len() })
        }
    }
}

/// Single-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOperator {
    m: Mat2,
}

impl LocalOperator {
    pub fn new(m: Mat2) -> Self {
        Self { m }
    }

    pub fn unitary(m: Mat2) -> Result<Self> {
        let op = Self { m };
        if op.is_unitary(NORM_TOL) {
            Ok(op)
        } else {
            Err(validation("operator is not unitary"))
        }
    }

    pub fn hermitian(m: Mat2) -> Result<Self> {
        let op = Self { m };
        if op.is_hermitian(NORM_TOL) {
            Ok(op)
        } else {
            Err(validation("operator is not Hermitian"))
        }
    }

    pub fn identity() -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// diag(1, −1)
    pub fn pauli_z() -> Self {
        Self { m: pauli()[2] }
    }

    pub fn entries(&self) -> &Mat2 {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self { m: adjoint(&self.m) }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: mat_mul(&self.m, &other.m) }
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = mat_mul(&adjoint(&self.m), &self.m);
        mat_max_diff(&prod, &Self::identity().m) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        mat_max_diff(&self.m, &adjoint(&self.m)) <= tol
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    /// Rotation matrix R with U (n·σ) U† = (R n)·σ.
    pub fn bloch_rotation(&self) -> [[f64; 3]; 3] {
        let s = pauli();
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let m = mat_mul(&mat_mul(&s[i], &self.m), &mat_mul(&s[j], &adjoint(&self.m)));
                r[i][j] = 0.5 * (m[0][0] + m[1][1]).re;
            }
        }
        r
    }
}

/// Single-party reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    pub fn entries(&self) -> &Mat2 {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1].norm();
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - half_gap, mean + half_gap]
    }

    /// tr(ρ²)
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for r in 0..2 {
            for col in 0..2 {
                p += (self.m[r][col] * self.m[col][r]).re;
            }
        }
        p
    }

    /// U ρ U†
    pub fn conjugate_by(&self, u: &LocalOperator) -> Self {
        Self { m: mat_mul(&mat_mul(u.entries(), &self.m), &adjoint(u.entries())) }
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        mat_max_diff(&self.m, &other.m)
    }
}

/// |u⟩ ⊗ |v⟩ ⊗ |w⟩
pub fn tensor3(u: &PureState, v: &PureState, w: &PureState) -> Result<PureState> {
    for s in [u, v, w] {
        if s.n_qubits != 1 {
            return Err(Error::Dimension { expected: 2, found: s.amps.len() });
        }
    }
    let mut amps = Vec::with_capacity(8);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                amps.push(u.amps[i] * v.amps[j] * w.amps[k]);
            }
        }
    }
    PureState::new(3, amps)
}

/// t'_ijk = Σ U^A_iα U^B_jβ U^C_kγ t_αβγ, for unitary operators.
pub fn apply_local(ua: &LocalOperator, ub: &LocalOperator, uc: &LocalOperator, s: &PureState) -> Result<PureState> {
    for u in [ua, ub, uc] {
        if !u.is_unitary(NORM_TOL) {
            return Err(validation("apply_local requires unitary operators"));
        }
    }
    s.require_three()?;
    Ok(apply_product(ua, ub, uc, s))
}

/// Same contraction as [`apply_local`] with no unitarity requirement.
pub(crate) fn apply_product(a: &LocalOperator, b: &LocalOperator, cc: &LocalOperator, s: &PureState) -> PureState {
    let t = &s.amps;
    let (a, b, cc) = (a.entries(), b.entries(), cc.entries());
    let mut out = vec![ZERO; 8];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut acc = ZERO;
                for al in 0..2 {
                    for be in 0..2 {
                        for ga in 0..2 {
                            acc += a[i][al] * b[j][be] * cc[k][ga] * t[(al << 2) | (be << 1) | ga];
                        }
                    }
                }
                out[(i << 2) | (j << 1) | k] = acc;
            }
        }
    }
    PureState { n_qubits: 3, amps: out }
}

/// ρ = tr over the other two parties of |s⟩⟨s|.
pub fn reduced_density(s: &PureState, party: usize) -> Result<DensityMatrix> {
    s.require_three()?;
    if party > 2 {
        return Err(validation(format!("party index {party} out of range (0..=2)")));
    }
    s.require_normalized()?;
    let shift = 2 - party;
    let mut m = [[ZERO; 2]; 2];
    for x in 0..8usize {
        for y in 0..8usize {
            // the traced-out bits must agree
            if (x & !(1 << shift)) != (y & !(1 << shift)) {
                continue;
            }
            m[(x >> shift) & 1][(y >> shift) & 1] += s.amps[x] * s.amps[y].conj();
        }
    }
    Ok(DensityMatrix { m })
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// n·σ for a unit vector n.
pub fn bloch_observable(n: [f64; 3]) -> Result<LocalOperator> {
    Ok(BlochVector::new(n)?.observable())
}

/// Haar-distributed 2×2 unitary, deterministic in `seed`.
pub fn random_local_unitary(seed: u64) -> LocalOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a uniform point on S³ gives the SU(2) part
    let g: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = C64::new(g[0], g[1]) / norm;
    let b = C64::new(g[2], g[3]) / norm;
    let phase = C64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
    LocalOperator::new([[phase * a, -phase * b.conj()], [phase * b, phase * a.conj()]])
}

/// A unit vector on the Bloch sphere, the direction of a Stern-Gerlach measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub const X: BlochVector = BlochVector([1.0, 0.0, 0.0]);
    pub const Y: BlochVector = BlochVector([0.0, 1.0, 0.0]);
    pub const Z: BlochVector = BlochVector([0.0, 0.0, 1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(validation("non-finite Bloch vector"));
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (len - 1.0).abs() > UNIT_TOL {
            return Err(validation(format!("Bloch vector has length {len}, expected 1")));
        }
        Ok(Self(v))
    }

    /// (sinθ cosφ, sinθ sinφ, cosθ), angles in degrees.
    pub fn from_angles(theta_deg: f64, phi_deg: f64) -> Self {
        let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
        Self::from_radians(t, p)
    }

    pub(crate) fn from_radians(t: f64, p: f64) -> Self {
        Self([t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn observable(&self) -> LocalOperator {
        let [x, y, z] = self.0;
        LocalOperator::new([[c(z), C64::new(x, -y)], [C64::new(x, y), c(-z)]])
    }

    /// (I ± n·σ)/2, the projector onto outcome +1 (`positive`) or −1.
    pub fn projector(&self, positive: bool) -> LocalOperator {
        let sign = if positive { 1.0 } else { -1.0 };
        let [x, y, z] = self.0.map(|v| 0.5 * sign * v);
        LocalOperator::new([[c(0.5 + z), C64::new(x, -y)], [C64::new(x, y), c(0.5 - z)]])
    }

    /// The direction R n with U (n·σ) U† = (R n)·σ.
    pub fn rotated_by(&self, u: &LocalOperator) -> Self {
        let r = u.bloch_rotation();
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| r[i][j] * self.0[j]).sum();
        }
        Self(out)
    }
}

/// ⟨s| A⊗B⊗C |s⟩
pub fn expectation3(s: &PureState, a: &LocalOperator, b: &LocalOperator, cc: &LocalOperator) -> Result<C64> {
    s.require_three()?;
    s.inner(&apply_product(a, b, cc, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mercedes() -> PureState {
        let v = 1.0 / 6f64.sqrt();
        PureState::from_real(3, &[0.0, v, v, v, v, v, v, 0.0]).unwrap()
    }

    #[test]
    fn tensor3_of_zeros_is_000() {
        let z = PureState::real_qubit(1.0, 0.0);
        let s = tensor3(&z, &z, &z).unwrap();
        assert_eq!(s, PureState::basis(3, 0).unwrap());
    }

    #[test]
    fn tensor3_rejects_wrong_length() {
        let z = PureState::real_qubit(1.0, 0.0);
        let two = PureState::basis(2, 0).unwrap();
        assert!(matches!(tensor3(&z, &two, &z), Err(Error::Dimension { expected: 2, found: 4 })));
    }

    #[test]
    fn two_product_form_from_tensor3() {
        // u = (1/2, √3/2); (2/3)(|000⟩ + |uuu⟩) expanded by hand
        let u = PureState::real_qubit(0.5, 3f64.sqrt() / 2.0);
        let uuu = tensor3(&u, &u, &u).unwrap();
        let s = uuu.add(&PureState::basis(3, 0).unwrap()).unwrap().scale(c(2.0 / 3.0));
        let r3 = 3f64.sqrt();
        let expected = [0.75, r3 / 12.0, r3 / 12.0, 0.25, r3 / 12.0, 0.25, 0.25, r3 / 4.0];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-15);
        }
        assert!(s.is_normalized());
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let id = LocalOperator::identity();
        let s = mercedes();
        assert_eq!(apply_local(&id, &id, &id, &s).unwrap(), s);
    }

    #[test]
    fn apply_local_rejects_non_unitary() {
        let m = LocalOperator::new([[c(2.0), ZERO], [ZERO, ONE]]);
        let id = LocalOperator::identity();
        assert!(matches!(apply_local(&m, &id, &id, &mercedes()), Err(Error::Validation(_))));
    }

    #[test]
    fn z_cubed_flips_mercedes_to_minus_psi1() {
        let z = LocalOperator::pauli_z();
        let out = apply_local(&z, &z, &z, &mercedes()).unwrap();
        // ψ1 signs on |++-⟩,|+-+⟩,|+--⟩,|-++⟩,|--+⟩,|-+-⟩ at indices 1,2,3,4,6,5
        let v = 1.0 / 6f64.sqrt();
        let psi1 = PureState::from_real(3, &[0.0, v, v, -v, v, -v, -v, 0.0]).unwrap();
        assert!(out.max_diff(&psi1.scale(c(-1.0))).unwrap() < 1e-15);
    }

    #[test]
    fn reduced_density_examples() {
        let rho = reduced_density(&PureState::basis(3, 0).unwrap(), 1).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert_eq!(rho.entries()[0][0], ONE);

        for p in 0..3 {
            let rho = reduced_density(&PureState::ghz(), p).unwrap();
            assert!((rho.purity() - 0.5).abs() < 1e-15);
        }

        let rho = reduced_density(&mercedes(), 0).unwrap();
        let m = rho.entries();
        assert!((m[0][0] - c(0.5)).norm() < 1e-15);
        assert!((m[0][1] - c(1.0 / 3.0)).norm() < 1e-15);
        assert!((m[1][0] - c(1.0 / 3.0)).norm() < 1e-15);
        assert!((rho.purity() - 13.0 / 18.0).abs() < 1e-15);
        assert!(rho.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn reduced_density_errors() {
        assert!(matches!(reduced_density(&mercedes(), 3), Err(Error::Validation(_))));
        let unnorm = mercedes().scale(c(2.0));
        assert!(reduced_density(&unnorm, 0).is_err());
    }

    #[test]
    fn pauli_observables() {
        let z = bloch_observable([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(*z.entries(), pauli()[2]);
        let x = bloch_observable([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(*x.entries(), pauli()[0]);
        let y = bloch_observable([0.0, 1.0, 0.0]).unwrap();
        assert_eq!(*y.entries(), [[ZERO, -I], [I, ZERO]]);
        assert!(bloch_observable([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn random_unitaries() {
        assert_eq!(random_local_unitary(7), random_local_unitary(7));
        assert_ne!(random_local_unitary(7), random_local_unitary(8));
        let mut mean = 0.0;
        for seed in 0..1000 {
            let u = random_local_unitary(seed);
            assert!(u.is_unitary(1e-12));
            assert!((u.det().norm() - 1.0).abs() < 1e-12);
            mean += u.entries()[0][0].norm_sqr();
        }
        mean /= 1000.0;
        assert!((mean - 0.5).abs() < 0.05, "mean |U00|² = {mean}");
    }

    #[test]
    fn bloch_rotation_matches_conjugation() {
        let u = random_local_unitary(3);
        let n = BlochVector::from_angles(40.0, 70.0);
        let lhs = u.compose(&n.observable()).compose(&u.adjoint());
        let rhs = n.rotated_by(&u).observable();
        assert!(mat_max_diff(lhs.entries(), rhs.entries()) < 1e-14);
    }

    #[test]
    fn permute_parties_moves_bits() {
        // |100⟩ with party A's bit moved to C
        let s = PureState::basis(3, 0b100).unwrap();
        let p = s.permute_parties([1, 2, 0]).unwrap();
        assert_eq!(p, PureState::basis(3, 0b001).unwrap());
        assert!(s.permute_parties([0, 0, 1]).is_err());
    }
}

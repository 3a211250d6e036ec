//! Photon polarization states from positronium decay, and the symmetric
//! two-product family they belong to.

use crate::error::{validation, Result};
use crate::kinematics::{complexify, cross, dot, CVec3, DecayGeometry, Helicity};
use crate::tensor::{c, mat_max_diff, sigma_dot, tensor3, Mat2, PureState, C64};

const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// A(k̂, λ₁; −k̂, λ₂) = −(i/2)(λ₁ + λ₂)
pub fn scalar_amplitude_a(l1: Helicity, l2: Helicity) -> C64 {
    C64::new(0.0, -0.5 * (l1.sign() + l2.sign()))
}

/// (|++⟩ − |−−⟩)/√2
pub fn para_state() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_real(2, &[h, 0.0, 0.0, -h]).expect("four amplitudes")
}

fn conj_polarizations(g: &DecayGeometry, hel: [Helicity; 3]) -> [CVec3; 3] {
    [0, 1, 2].map(|i| g.polarization(i, hel[i]).conj())
}

/// The amplitude vector V as the cyclic sum of
/// (λᵢ − λⱼ)(λⱼ + λₖ) ε*ᵢ (ε*ⱼ·ε*ₖ).
pub fn amplitude_vector_v(g: &DecayGeometry, hel: [Helicity; 3]) -> Result<CVec3> {
    g.require_feasible()?;
    let e = conj_polarizations(g, hel);
    let lam = hel.map(Helicity::sign);
    let mut v = [c(0.0); 3];
    for (i, j, k) in CYCLIC {
        let coeff = (lam[i] - lam[j]) * (lam[j] + lam[k]);
        let scalar = dot(&e[j], &e[k]) * coeff;
        for a in 0..3 {
            v[a] += e[i][a] * scalar;
        }
    }
    Ok(v)
}

/// M₃ evaluated term by term from the cyclic sum over
/// ((ε*ⱼ·ε*ₖ − δⱼ·δₖ) ε*ᵢ + (ε*ⱼ·δₖ + ε*ₖ·δⱼ) δᵢ)·σ, with δᵢ = k̂ᵢ × ε*ᵢ.
///
/// With the polarization vectors of [`crate::kinematics::polarization_vector`]
/// this equals −σ·V exactly (see [`amplitude_vector_v`]).
pub fn m3_matrix(g: &DecayGeometry, hel: [Helicity; 3]) -> Result<Mat2> {
    g.require_feasible()?;
    let e = conj_polarizations(g, hel);
    let k = g.directions().map(complexify);
    let d = [0, 1, 2].map(|i| cross(&k[i], &e[i]));
    let mut w = [c(0.0); 3];
    for (i, j, kk) in CYCLIC {
        let s1 = dot(&e[j], &e[kk]) - dot(&d[j], &d[kk]);
        let s2 = dot(&e[j], &d[kk]) + dot(&e[kk], &d[j]);
        for a in 0..3 {
            w[a] += s1 * e[i][a] + s2 * d[i][a];
        }
    }
    Ok(sigma_dot(&w))
}

/// V and M₃ for all eight helicity triples of one geometry.
#[derive(Debug, Clone)]
pub struct HelicityAmplitudeTable {
    pub geometry: DecayGeometry,
    /// Indexed like the basis: `entries[Helicity::triple_index(t)]`.
    pub entries: Vec<HelicityAmplitude>,
}

#[derive(Debug, Clone, Copy)]
pub struct HelicityAmplitude {
    pub helicities: [Helicity; 3],
    pub v: CVec3,
    pub m3: Mat2,
}

impl HelicityAmplitudeTable {
    pub fn new(g: &DecayGeometry) -> Result<Self> {
        let entries = Helicity::triples()
            .into_iter()
            .map(|t| Ok(HelicityAmplitude { helicities: t, v: amplitude_vector_v(g, t)?, m3: m3_matrix(g, t)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { geometry: *g, entries })
    }

    /// Largest entry of M₃ + σ·V over all triples.
    pub fn m3_residual(&self) -> f64 {
        self.entries.iter().map(|e| mat_max_diff(&e.m3, &sigma_dot(&e.v.map(|x| -x)))).fold(0.0, f64::max)
    }
}

/// Third component of the ortho-positronium spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinZ {
    Up,
    Zero,
    Down,
}

impl TryFrom<i32> for SpinZ {
    type Error = crate::error::Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(SpinZ::Up),
            0 => Ok(SpinZ::Zero),
            -1 => Ok(SpinZ::Down),
            other => Err(validation(format!("S_z must be -1, 0 or 1, got {other}"))),
        }
    }
}

/// Three-photon polarization state of ortho-positronium decay, normalized.
///
/// S_z = 0 gives ψ₀, with weight (1 − k̂ᵢ·k̂ⱼ) on both kets whose odd photon
/// is the third one, all with a plus sign. S_z = ±1 gives ψ₁, which puts a
/// minus sign on |−−+⟩, |−+−⟩ and |+−−⟩.
pub fn ortho_state(g: &DecayGeometry, sz: SpinZ) -> Result<PureState> {
    g.require_feasible()?;
    let w12 = 1.0 - g.cos_between(0, 1);
    let w13 = 1.0 - g.cos_between(0, 2);
    let w23 = 1.0 - g.cos_between(1, 2);
    let minus = if sz == SpinZ::Zero { 1.0 } else { -1.0 };
    let mut a = [0.0; 8];
    a[0b001] = w12; // ++-
    a[0b110] = minus * w12; // --+
    a[0b010] = w13; // +-+
    a[0b101] = minus * w13; // -+-
    a[0b100] = w23; // -++
    a[0b011] = minus * w23; // +--
    PureState::normalized(3, a.iter().map(|&x| c(x)).collect())
}

/// Three-photon state assembled from the amplitude vector, one helicity
/// triple at a time: V₁ + iV₂ for S_z = +1, −√2 V₃ for S_z = 0 and
/// −V₁ + iV₂ for S_z = −1. Normalized; the global phase is arbitrary.
pub fn ortho_state_from_amplitudes(g: &DecayGeometry, sz: SpinZ) -> Result<PureState> {
    g.require_feasible()?;
    let i = C64::new(0.0, 1.0);
    let mut amps = Vec::with_capacity(8);
    for t in Helicity::triples() {
        let v = amplitude_vector_v(g, t)?;
        amps.push(match sz {
            SpinZ::Up => v[0] + i * v[1],
            SpinZ::Zero => -std::f64::consts::SQRT_2 * v[2],
            SpinZ::Down => -v[0] + i * v[1],
        });
    }
    PureState::normalized(3, amps)
}

/// ψ₀ at the Mercedes-star geometry: (1/√6) times the sum of the six kets
/// with mixed helicities.
pub fn mercedes_state() -> PureState {
    ortho_state(&DecayGeometry::mercedes(), SpinZ::Zero).expect("Mercedes geometry is feasible")
}

/// The coupled-basis kets |3/2, +1/2⟩ and |3/2, −1/2⟩ of three spin-½.
pub fn spin_three_halves(m_half: Helicity) -> PureState {
    let v = 1.0 / 3f64.sqrt();
    let mut a = [0.0; 8];
    let idx = match m_half {
        Helicity::Plus => [0b001, 0b010, 0b100],
        Helicity::Minus => [0b110, 0b101, 0b011],
    };
    for i in idx {
        a[i] = v;
    }
    PureState::from_real(3, &a).expect("eight amplitudes")
}

fn check_delta(delta_deg: f64) -> Result<()> {
    if !(0.0..=180.0).contains(&delta_deg) {
        return Err(validation(format!("δ = {delta_deg}° outside [0°, 180°]")));
    }
    Ok(())
}

/// α_δ = 1/√(2(1 + cos³(δ/2)))
pub fn delta_family_alpha(delta_deg: f64) -> f64 {
    let h = (delta_deg / 2.0).to_radians().cos();
    1.0 / (2.0 * (1.0 + h * h * h)).sqrt()
}

/// The local spinors (c_δ, s_δ) with c_δ = cos((π − δ)/4), s_δ = sin((π − δ)/4).
pub fn delta_family_spinor(delta_deg: f64) -> (f64, f64) {
    let a = (std::f64::consts::PI - delta_deg.to_radians()) / 4.0;
    (a.cos(), a.sin())
}

/// α_δ(|uuu⟩ + |vvv⟩) with u = (c_δ, s_δ), v = (s_δ, c_δ); δ is the angle
/// between the Bloch vectors of u and v. δ = 180° is GHZ, δ = 120° is
/// locally equivalent to the Mercedes state.
pub fn delta_family_state(delta_deg: f64) -> Result<PureState> {
    check_delta(delta_deg)?;
    let (cd, sd) = delta_family_spinor(delta_deg);
    let u = PureState::real_qubit(cd, sd);
    let v = PureState::real_qubit(sd, cd);
    let sum = tensor3(&u, &u, &u)?.add(&tensor3(&v, &v, &v)?)?;
    PureState::normalized(3, sum.amplitudes().to_vec())
}

/// The same family in its minimal-coefficient basis:
/// 2α_δ(sin²δ' cosδ' (|001⟩ + |010⟩ + |100⟩) + cos³δ' |111⟩), δ' = δ/4.
pub fn delta_family_minimal_form(delta_deg: f64) -> Result<PureState> {
    check_delta(delta_deg)?;
    let q = (delta_deg / 4.0).to_radians();
    let scale = 2.0 * delta_family_alpha(delta_deg);
    let w = scale * q.sin().powi(2) * q.cos();
    let mut a = [0.0; 8];
    a[0b001] = w;
    a[0b010] = w;
    a[0b100] = w;
    a[0b111] = scale * q.cos().powi(3);
    PureState::from_real(3, &a)
}

/// Inclusive range of δ values in degrees, `from + k·step` for k = 0, 1, …
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRange {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl DeltaRange {
    pub fn new(from: f64, to: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(validation(format!("δ step {step} must be positive")));
        }
        check_delta(from)?;
        check_delta(to)?;
        if from > to {
            return Err(validation(format!("δ range {from}:{to} is empty")));
        }
        Ok(Self { from, to, step })
    }

    /// Integer stepping, so 90:180:10 yields exactly ten values ending at 180.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.from + k as f64 * self.step).collect()
    }
}

impl std::str::FromStr for DeltaRange {
    type Err = crate::Error;

    /// Parses `FROM:TO:STEP`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, st] = parts[..] else {
            return Err(validation(format!("δ range '{s}' must look like FROM:TO:STEP")));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| validation(format!("'{t}' is not a number")));
        Self::new(num(a)?, num(b)?, num(st)?)
    }
}

/// weight × Σ (u ⊗ v ⊗ w) over the listed product terms.
#[derive(Debug, Clone)]
pub struct ProductDecomposition {
    pub weight: f64,
    pub factors: Vec<[PureState; 3]>,
    pub target: PureState,
}

impl ProductDecomposition {
    pub fn reconstruct(&self) -> Result<PureState> {
        let mut acc = PureState::new(3, vec![c(0.0); 8])?;
        for [u, v, w] in &self.factors {
            acc = acc.add(&tensor3(u, v, w)?)?;
        }
        Ok(acc.scale(c(self.weight)))
    }

    pub fn residual(&self) -> Result<f64> {
        self.reconstruct()?.max_diff(&self.target)
    }
}

fn symmetric_two_product_target(weight: f64, u: (f64, f64), v: (f64, f64)) -> PureState {
    // coefficient of a ket with `ones` bits set: u₀^(3-ones) u₁^ones + same for v
    let amps: Vec<f64> = (0..8u32)
        .map(|idx| {
            let ones = idx.count_ones() as i32;
            weight * (u.0.powi(3 - ones) * u.1.powi(ones) + v.0.powi(3 - ones) * v.1.powi(ones))
        })
        .collect();
    PureState::from_real(3, &amps).expect("eight amplitudes")
}

/// The three representations of the Mercedes state used for the Mermin
/// analysis:
/// (i) (2/3)(|000⟩ + |aaa⟩) with a = (1/2, √3/2),
/// (ii) (2/3)(|ccc⟩ + |sss⟩) with (c, s) = (cos15°, sin15°),
/// (iii) (1/(2√3))(|001⟩ + |010⟩ + |100⟩) + (√3/2)|111⟩.
pub fn mercedes_decompositions() -> (ProductDecomposition, ProductDecomposition, PureState) {
    let r3 = 3f64.sqrt();
    let zero = PureState::real_qubit(1.0, 0.0);
    let a = PureState::real_qubit(0.5, r3 / 2.0);
    let two_product = ProductDecomposition {
        weight: 2.0 / 3.0,
        factors: vec![[zero.clone(), zero.clone(), zero], [a.clone(), a.clone(), a]],
        target: symmetric_two_product_target(2.0 / 3.0, (1.0, 0.0), (0.5, r3 / 2.0)),
    };

    let (cs, sn) = (15f64.to_radians().cos(), 15f64.to_radians().sin());
    let u = PureState::real_qubit(cs, sn);
    let v = PureState::real_qubit(sn, cs);
    let rotated = ProductDecomposition {
        weight: 2.0 / 3.0,
        factors: vec![[u.clone(), u.clone(), u], [v.clone(), v.clone(), v]],
        target: symmetric_two_product_target(2.0 / 3.0, (cs, sn), (sn, cs)),
    };

    let p = 1.0 / (2.0 * r3);
    let minimal = PureState::from_real(3, &[0.0, p, p, 0.0, p, 0.0, 0.0, r3 / 2.0]).expect("eight amplitudes");
    (two_product, rotated, minimal)
}

/// Three-letter basis label such as `++-`.
pub fn basis_label(index: usize) -> String {
    (0..3).rev().map(|b| Helicity::from_bit(index >> b).symbol()).collect()
}

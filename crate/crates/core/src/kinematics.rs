//! Photon directions, circular polarization vectors and energy closure for
//! coplanar three-photon decays.
//!
//! The decay plane is XY with k̂₁ along +x, k̂₂ at azimuth θ₁₂ and k̂₃ at
//! azimuth −θ₁₃. All public angles are in degrees.

use crate::error::{validation, Error, Result};
use crate::tensor::{c, C64};

pub type CVec3 = [C64; 3];

/// Photon helicity λ = ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub const BOTH: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    /// Basis bit of this helicity (`+` ↦ 0, `−` ↦ 1).
    pub fn bit(self) -> usize {
        match self {
            Helicity::Plus => 0,
            Helicity::Minus => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Helicity::Plus
        } else {
            Helicity::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Helicity::Plus => '+',
            Helicity::Minus => '-',
        }
    }

    /// All eight triples in basis-index order.
    pub fn triples() -> [[Helicity; 3]; 8] {
        let mut out = [[Helicity::Plus; 3]; 8];
        for (idx, t) in out.iter_mut().enumerate() {
            *t = [Self::from_bit(idx >> 2), Self::from_bit(idx >> 1), Self::from_bit(idx)];
        }
        out
    }

    pub fn triple_index(t: [Helicity; 3]) -> usize {
        (t[0].bit() << 2) | (t[1].bit() << 1) | t[2].bit()
    }
}

impl TryFrom<i32> for Helicity {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            other => Err(validation(format!("helicity must be ±1, got {other}"))),
        }
    }
}

pub fn dot(a: &CVec3, b: &CVec3) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn conj(a: &CVec3) -> CVec3 {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

pub fn complexify(v: [f64; 3]) -> CVec3 {
    [c(v[0]), c(v[1]), c(v[2])]
}

pub(crate) fn real_dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Direction (sinθ cosφ, sinθ sinφ, cosθ) in degrees.
pub fn direction(theta_deg: f64, phi_deg: f64) -> [f64; 3] {
    let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

/// Circular polarization vector ε(k̂, λ) for a photon moving along k̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector {
    pub components: CVec3,
    pub helicity: Helicity,
    pub direction: [f64; 3],
}

impl PolarizationVector {
    pub fn conj(&self) -> CVec3 {
        conj(&self.components)
    }

    /// Largest violation of the three defining identities:
    /// k̂·ε = 0, k̂×ε = −iλε and ε·ε = 0.
    pub fn identity_residual(&self) -> f64 {
        let k = complexify(self.direction);
        let e = &self.components;
        let transverse = dot(&k, e).norm();
        let kxe = cross(&k, e);
        let lam = self.helicity.sign();
        let helical = (0..3).map(|i| (kxe[i] - C64::new(0.0, -lam) * e[i]).norm()).fold(0.0, f64::max);
        let null = dot(e, e).norm();
        transverse.max(helical).max(null)
    }
}

/// ε = −(λ/√2)(cosθ cosφ − iλ sinφ, cosθ sinφ + iλ cosφ, −sinθ)
pub fn polarization_vector(theta_deg: f64, phi_deg: f64, helicity: Helicity) -> PolarizationVector {
    let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
    let lam = helicity.sign();
    let pre = -lam / std::f64::consts::SQRT_2;
    let components = [
        C64::new(t.cos() * p.cos(), -lam * p.sin()) * pre,
        C64::new(t.cos() * p.sin(), lam * p.cos()) * pre,
        c(-t.sin() * pre),
    ];
    PolarizationVector { components, helicity, direction: direction(theta_deg, phi_deg) }
}

/// Three coplanar photon directions fixed by two opening angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayGeometry {
    theta12: f64,
    theta13: f64,
}

impl DecayGeometry {
    pub fn theta12(&self) -> f64 {
        self.theta12
    }

    pub fn theta13(&self) -> f64 {
        self.theta13
    }

    pub fn theta23(&self) -> f64 {
        360.0 - self.theta12 - self.theta13
    }

    /// Feasible iff all three opening angles lie strictly in (0°, 180°).
    pub fn is_feasible(&self) -> bool {
        [self.theta12, self.theta13, self.theta23()].iter().all(|&a| a > 0.0 && a < 180.0)
    }

    pub(crate) fn require_feasible(&self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(Error::Infeasible { theta12: self.theta12, theta13: self.theta13 })
        }
    }

    /// Azimuths of k̂₁, k̂₂, k̂₃ in degrees.
    pub fn azimuths(&self) -> [f64; 3] {
        [0.0, self.theta12, -self.theta13]
    }

    pub fn directions(&self) -> [[f64; 3]; 3] {
        self.azimuths().map(|phi| direction(90.0, phi))
    }

    /// k̂ᵢ·k̂ⱼ
    pub fn cos_between(&self, i: usize, j: usize) -> f64 {
        let d = self.directions();
        real_dot(d[i], d[j])
    }

    /// Polarization vector of photon `i`, in the θ = 90° gauge.
    pub fn polarization(&self, i: usize, helicity: Helicity) -> PolarizationVector {
        polarization_vector(90.0, self.azimuths()[i], helicity)
    }

    /// The Mercedes-star configuration, 120° between every pair.
    pub fn mercedes() -> Self {
        Self { theta12: 120.0, theta13: 120.0 }
    }
}

/// Geometry from the two opening angles θ₁₂, θ₁₃ (degrees, each in (0, 360)).
/// Infeasible geometries are returned, flagged by [`DecayGeometry::is_feasible`].
pub fn geometry_from_angles(theta12: f64, theta13: f64) -> Result<DecayGeometry> {
    if !theta12.is_finite() || !theta13.is_finite() {
        return Err(validation("opening angles must be finite"));
    }
    if !(theta12 > 0.0 && theta12 < 360.0 && theta13 > 0.0 && theta13 < 360.0) {
        return Err(validation(format!("opening angles ({theta12}, {theta13}) must lie in (0, 360)")));
    }
    Ok(DecayGeometry { theta12, theta13 })
}

/// Photon energies in units of the electron mass, summing to 2m.
///
/// Eᵢ ∝ sin θⱼₖ, which closes Σ Eᵢ k̂ᵢ = 0 (the sine rule for the momentum
/// triangle).
pub fn photon_energies(g: &DecayGeometry) -> Result<[f64; 3]> {
    g.require_feasible()?;
    let raw = [g.theta23(), g.theta13(), g.theta12()].map(|a| a.to_radians().sin());
    let total: f64 = raw.iter().sum();
    Ok(raw.map(|e| 2.0 * e / total))
}

/// |Σ Eᵢ k̂ᵢ|
pub fn momentum_residual(g: &DecayGeometry, energies: &[f64; 3]) -> f64 {
    let d = g.directions();
    let mut p = [0.0; 3];
    for (e, k) in energies.iter().zip(d) {
        for a in 0..3 {
            p[a] += e * k[a];
        }
    }
    real_dot(p, p).sqrt()
}

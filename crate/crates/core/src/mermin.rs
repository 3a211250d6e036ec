//! Triple correlations, the Mermin combination ⟨a'bc + ab'c + abc' − a'b'c'⟩
//! and its extremization over Stern-Gerlach directions.

use rayon::prelude::*;

use crate::error::{validation, Result};
use crate::optimize::{shifted_halton, NelderMead};
use crate::states::{delta_family_state, DeltaRange};
use crate::table::{Cell, Table};
use crate::tensor::{expectation3, BlochVector, LocalOperator, PureState};

/// Central-difference step for gradients, in radians.
pub const GRADIENT_STEP: f64 = 1e-5;

/// Gradient norm below which a point counts as stationary.
pub const STATIONARY_TOL: f64 = 1e-6;

/// Symmetric settings: the unprimed direction (θ, φ) is shared by a, b, c
/// and the primed one (θ', φ') by a', b', c'. Degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSettings {
    pub theta: f64,
    pub phi: f64,
    pub theta_p: f64,
    pub phi_p: f64,
}

impl ObservableSettings {
    /// Unprimed along y, primed along x: a = σy, a' = σx on every party.
    pub const Y_X: ObservableSettings = ObservableSettings { theta: 90.0, phi: 90.0, theta_p: 90.0, phi_p: 0.0 };

    pub fn new(theta: f64, phi: f64, theta_p: f64, phi_p: f64) -> Self {
        Self { theta, phi, theta_p, phi_p }
    }

    fn from_radians(x: &[f64]) -> Self {
        Self::new(x[0].to_degrees(), x[1].to_degrees(), x[2].to_degrees(), x[3].to_degrees())
    }

    fn radians(&self) -> [f64; 4] {
        [self.theta, self.phi, self.theta_p, self.phi_p].map(f64::to_radians)
    }

    pub fn unprimed(&self) -> BlochVector {
        BlochVector::from_angles(self.theta, self.phi)
    }

    pub fn primed(&self) -> BlochVector {
        BlochVector::from_angles(self.theta_p, self.phi_p)
    }

    /// Same directions with θ ∈ [0°, 180°] and φ ∈ [0°, 360°).
    pub fn canonical(&self) -> Self {
        let (t, p) = canonical_angles(self.theta, self.phi);
        let (tp, pp) = canonical_angles(self.theta_p, self.phi_p);
        Self::new(t, p, tp, pp)
    }

    /// The unprimed direction reversed, n → −n.
    pub fn unprimed_reversed(&self) -> Self {
        Self::new(180.0 - self.theta, self.phi + 180.0, self.theta_p, self.phi_p).canonical()
    }

    /// Reflection y → −y of both directions.
    pub fn mirrored(&self) -> Self {
        Self::new(self.theta, -self.phi, self.theta_p, -self.phi_p).canonical()
    }

    fn key(&self) -> [i64; 4] {
        // micro-degree resolution for ordering
        [self.theta, self.phi, self.theta_p, self.phi_p].map(|a| (a * 1e6).round() as i64)
    }
}

fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(360.0);
    let mut p = phi;
    if t > 180.0 {
        t = 360.0 - t;
        p += 180.0;
    }
    let mut p = p.rem_euclid(360.0);
    if p >= 360.0 - 1e-9 {
        p = 0.0;
    }
    (t, p)
}

/// One direction per observable: a, a', b, b', c, c'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerminObservables {
    pub a: BlochVector,
    pub a_p: BlochVector,
    pub b: BlochVector,
    pub b_p: BlochVector,
    pub c: BlochVector,
    pub c_p: BlochVector,
}

impl From<&ObservableSettings> for MerminObservables {
    fn from(s: &ObservableSettings) -> Self {
        let (n, np) = (s.unprimed(), s.primed());
        Self { a: n, a_p: np, b: n, b_p: np, c: n, c_p: np }
    }
}

impl MerminObservables {
    /// Directions seen after the state is acted on by U_A ⊗ U_B ⊗ U_C.
    pub fn rotated_by(&self, ua: &LocalOperator, ub: &LocalOperator, uc: &LocalOperator) -> Self {
        Self {
            a: self.a.rotated_by(ua),
            a_p: self.a_p.rotated_by(ua),
            b: self.b.rotated_by(ub),
            b_p: self.b_p.rotated_by(ub),
            c: self.c.rotated_by(uc),
            c_p: self.c_p.rotated_by(uc),
        }
    }
}

/// ⟨s| (n_a·σ) ⊗ (n_b·σ) ⊗ (n_c·σ) |s⟩
pub fn triple_expectation(s: &PureState, a: &BlochVector, b: &BlochVector, c: &BlochVector) -> Result<f64> {
    s.require_normalized()?;
    let e = expectation3(s, &a.observable(), &b.observable(), &c.observable())?;
    debug_assert!(e.im.abs() < 1e-10, "Hermitian expectation has imaginary part {}", e.im);
    Ok(e.re)
}

/// ⟨a'bc + ab'c + abc' − a'b'c'⟩
pub fn mermin_combination(s: &PureState, o: &MerminObservables) -> Result<f64> {
    Ok(triple_expectation(s, &o.a_p, &o.b, &o.c)?
        + triple_expectation(s, &o.a, &o.b_p, &o.c)?
        + triple_expectation(s, &o.a, &o.b, &o.c_p)?
        - triple_expectation(s, &o.a_p, &o.b_p, &o.c_p)?)
}

/// The Mermin combination under symmetric settings. For states symmetric
/// under permutation of the parties this is 3⟨a'bc⟩ − ⟨a'b'c'⟩.
pub fn mermin_value(s: &PureState, settings: &ObservableSettings) -> Result<f64> {
    mermin_combination(s, &settings.into())
}

fn objective(s: &PureState, x: &[f64]) -> f64 {
    let n = BlochVector::from_radians(x[0], x[1]);
    let np = BlochVector::from_radians(x[2], x[3]);
    let o = MerminObservables { a: n, a_p: np, b: n, b_p: np, c: n, c_p: np };
    mermin_combination(s, &o).expect("state validated before the search")
}

/// Central-difference gradient of the Mermin value with respect to
/// (θ, φ, θ', φ') in radians.
pub fn mermin_gradient(s: &PureState, settings: &ObservableSettings) -> Result<[f64; 4]> {
    s.require_normalized()?;
    s.require_three()?;
    let x = settings.radians();
    let mut g = [0.0; 4];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut up = x;
        let mut dn = x;
        up[i] += GRADIENT_STEP;
        dn[i] -= GRADIENT_STEP;
        *gi = (objective(s, &up) - objective(s, &dn)) / (2.0 * GRADIENT_STEP);
    }
    Ok(g)
}

/// Outcome of a local search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerminResult {
    pub value: f64,
    pub settings: ObservableSettings,
    pub gradient_norm: f64,
    pub stationary: bool,
}

fn finish(s: &PureState, value: f64, settings: ObservableSettings) -> Result<MerminResult> {
    // n → −n leaves every term (n appears twice) unchanged; for a real state
    // complex conjugation maps y to −y on all directions. Report the image
    // with the smallest (φ, φ').
    let mut images = vec![settings.canonical(), settings.unprimed_reversed()];
    if s.amplitudes().iter().all(|a| a.im == 0.0) {
        images.extend(images.clone().iter().map(ObservableSettings::mirrored));
    }
    let settings = images
        .into_iter()
        .min_by(|a, b| a.phi.total_cmp(&b.phi).then(a.phi_p.total_cmp(&b.phi_p)))
        .expect("at least one image");
    let g = mermin_gradient(s, &settings)?;
    let gradient_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(MerminResult { value, settings, gradient_norm, stationary: gradient_norm <= STATIONARY_TOL })
}

/// Nelder-Mead descent on the Mermin value from one starting point.
pub fn mermin_local(s: &PureState, start: &ObservableSettings) -> Result<MerminResult> {
    s.require_three()?;
    s.require_normalized()?;
    let m = NelderMead::default().minimize(|x| objective(s, x), &start.radians());
    finish(s, m.f, ObservableSettings::from_radians(&m.x))
}

/// All distinct stationary minima found by a multi-start search.
#[derive(Debug, Clone, PartialEq)]
pub struct MerminSearch {
    /// Lowest value; ties go to the lexicographically smallest settings.
    pub best: MerminResult,
    /// One representative per distinct minimum value, ascending.
    pub minima: Vec<MerminResult>,
    pub starts: usize,
    /// Starts whose local search ended away from a stationary point.
    pub skipped: usize,
}

/// Values closer than this are reported as the same minimum.
const DISTINCT_TOL: f64 = 1e-7;

/// Multi-start minimization of the Mermin value over symmetric settings.
/// Starts come from a shifted Halton sequence; the result does not depend
/// on the number of worker threads.
pub fn mermin_extremize(s: &PureState, starts: usize, seed: u64) -> Result<MerminSearch> {
    if starts == 0 {
        return Err(validation("at least one start is required"));
    }
    s.require_three()?;
    s.require_normalized()?;
    let points = shifted_halton(starts, 4, seed);
    let results: Vec<MerminResult> = points
        .par_iter()
        .map(|u| {
            let start = ObservableSettings::new(180.0 * u[0], 360.0 * u[1], 180.0 * u[2], 360.0 * u[3]);
            mermin_local(s, &start)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut good: Vec<MerminResult> = results.iter().copied().filter(|r| r.stationary).collect();
    let skipped = results.len() - good.len();
    if good.is_empty() {
        // nothing stationary: fall back to the raw best so the caller still sees a value
        good = results;
    }
    good.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.settings.key().cmp(&b.settings.key())));

    let mut minima: Vec<MerminResult> = Vec::new();
    let mut i = 0;
    while i < good.len() {
        let floor = good[i].value;
        let mut j = i;
        while j < good.len() && good[j].value - floor <= DISTINCT_TOL {
            j += 1;
        }
        let rep = good[i..j]
            .iter()
            .min_by(|a, b| a.settings.key().cmp(&b.settings.key()).then(a.value.total_cmp(&b.value)))
            .copied()
            .expect("non-empty group");
        minima.push(rep);
        i = j;
    }
    Ok(MerminSearch { best: minima[0], minima, starts, skipped })
}

/// Diagnostic: minimize the Mermin combination over all six directions
/// independently (12 angles). Returns the best value and its directions.
pub fn mermin_extremize_unrestricted(s: &PureState, starts: usize, seed: u64) -> Result<(f64, MerminObservables)> {
    if starts == 0 {
        return Err(validation("at least one start is required"));
    }
    s.require_three()?;
    s.require_normalized()?;
    let to_obs = |x: &[f64]| {
        let v = |k: usize| BlochVector::from_radians(x[2 * k], x[2 * k + 1]);
        MerminObservables { a: v(0), a_p: v(1), b: v(2), b_p: v(3), c: v(4), c_p: v(5) }
    };
    let f = |x: &[f64]| mermin_combination(s, &to_obs(x)).expect("validated state");
    let nm = NelderMead { max_evals: 60_000, ..NelderMead::default() };
    let runs: Vec<(f64, Vec<f64>)> = shifted_halton(starts, 12, seed)
        .par_iter()
        .map(|u| {
            let x0: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(i, v)| if i % 2 == 0 { std::f64::consts::PI * v } else { std::f64::consts::TAU * v })
                .collect();
            let m = nm.minimize(f, &x0);
            (m.f, m.x)
        })
        .collect();
    let (value, x) = runs.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one start");
    Ok((value, to_obs(&x)))
}

/// One assignment of predetermined outcomes (a, a', b, b', c, c') ∈ {±1}⁶.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LrAssignment {
    pub outcomes: [i8; 6],
    pub combination: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrConstraintReport {
    pub assignments: Vec<LrAssignment>,
}

impl LrConstraintReport {
    /// True when every assignment gives a'bc + ab'c + abc' − a'b'c' = ±2.
    pub fn holds(&self) -> bool {
        self.assignments.iter().all(|a| a.combination.abs() == 2)
    }
}

/// Enumerates all 64 local-realistic outcome assignments.
pub fn lr_constraint_check() -> LrConstraintReport {
    let assignments = (0..64u8)
        .map(|bits| {
            let o: [i8; 6] = std::array::from_fn(|k| if bits >> k & 1 == 0 { 1 } else { -1 });
            let [a, ap, b, bp, c, cp] = o;
            LrAssignment { outcomes: o, combination: ap * b * c + a * bp * c + a * b * cp - ap * bp * cp }
        })
        .collect();
    LrConstraintReport { assignments }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerminSweepRow {
    pub delta: f64,
    pub value: f64,
    /// −value − 2; positive means the inequality is violated.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MerminSweep {
    pub rows: Vec<MerminSweepRow>,
}

impl MerminSweep {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["delta_deg", "mermin_value", "violation"]);
        for r in &self.rows {
            t.push(vec![Cell::Num(r.delta), Cell::Num(r.value), Cell::Num(r.violation)]);
        }
        t
    }

    /// First δ, by linear interpolation, where the violation changes sign.
    pub fn zero_crossing(&self) -> Option<f64> {
        self.rows.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            if a.violation == 0.0 {
                Some(a.delta)
            } else if (a.violation < 0.0) != (b.violation < 0.0) {
                Some(a.delta + (b.delta - a.delta) * a.violation / (a.violation - b.violation))
            } else {
                None
            }
        })
    }
}

/// Mermin value of the δ family at the fixed y/x settings, over a range of δ.
pub fn mermin_delta_sweep(range: &DeltaRange) -> Result<MerminSweep> {
    let rows = range
        .values()
        .into_par_iter()
        .map(|delta| {
            let value = mermin_value(&delta_family_state(delta)?, &ObservableSettings::Y_X)?;
            Ok(MerminSweepRow { delta, value, violation: -value - 2.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MerminSweep { rows })
}

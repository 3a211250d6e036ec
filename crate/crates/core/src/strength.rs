//! How many trials an experiment needs before a local-realistic (LR)
//! description becomes untenable: base-10 information distances, the
//! confidence depressing factor, and the LR model that delays the verdict
//! the longest.

use rayon::prelude::*;

use crate::error::{validation, Error, Result};
use crate::mermin::{mermin_local, triple_expectation, ObservableSettings};
use crate::states::{delta_family_state, DeltaRange};
use crate::table::{Cell, Table};
use crate::tensor::PureState;

/// log₁₀ of the depressing factor at which the experimenter gives up on LR.
pub const DEFAULT_TARGET_EXPONENT: f64 = 4.0;

/// Trial count for the two-party singlet test, a literature value.
pub const SINGLET_TRIALS: f64 = 200.0;

/// Sweep cells at or above this many trials are flagged.
pub const SWEEP_FLAG_TRIALS: f64 = 200.0;

const BISECTION_TOL: f64 = 1e-12;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(validation(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// p·log₁₀(p/r) with the p = 0 term taken as 0; `None` when it diverges.
fn kl_term(p: f64, r: f64) -> Option<f64> {
    if p == 0.0 {
        Some(0.0)
    } else if r == 0.0 {
        None
    } else {
        Some(p * (p / r).log10())
    }
}

fn info_distance_ext(q: f64, r: f64) -> f64 {
    match (kl_term(q, r), kl_term(1.0 - q, 1.0 - r)) {
        (Some(a), Some(b)) => (a + b).max(0.0),
        _ => f64::INFINITY,
    }
}

/// K(q, r) = q·log₁₀(q/r) + (1 − q)·log₁₀((1 − q)/(1 − r)).
pub fn info_distance(q: f64, r: f64) -> Result<f64> {
    check_probability("q", q)?;
    check_probability("r", r)?;
    match (kl_term(q, r), kl_term(1.0 - q, 1.0 - r)) {
        (Some(a), Some(b)) => Ok((a + b).max(0.0)),
        _ => Err(Error::Domain(format!("K({q}, {r}) diverges: r assigns zero probability to a possible outcome"))),
    }
}

/// target_exponent / K(q, r); infinite when q = r.
pub fn trials_to_depress(q: f64, r: f64, target_exponent: f64) -> Result<f64> {
    if !(target_exponent > 0.0 && target_exponent.is_finite()) {
        return Err(validation(format!("target exponent {target_exponent} must be positive")));
    }
    let k = info_distance(q, r)?;
    Ok(if k == 0.0 { f64::INFINITY } else { target_exponent / k })
}

/// log₁₀ D after `m` positive outcomes in `n` trials, where
/// D = (q/r)^m ((1 − q)/(1 − r))^(n − m). ±∞ when one hypothesis rules the
/// observed counts out entirely.
pub fn log10_depressing_factor(q: f64, r: f64, n: u64, m: u64) -> Result<f64> {
    check_probability("q", q)?;
    check_probability("r", r)?;
    if m > n {
        return Err(validation(format!("m = {m} exceeds n = {n}")));
    }
    let part = |count: u64, p: f64, rr: f64| -> Result<f64> {
        if count == 0 {
            return Ok(0.0);
        }
        match (p == 0.0, rr == 0.0) {
            (true, true) => Err(Error::Domain("outcome impossible under both hypotheses".into())),
            (true, false) => Ok(f64::NEG_INFINITY),
            (false, true) => Ok(f64::INFINITY),
            (false, false) => Ok(count as f64 * (p / rr).log10()),
        }
    };
    let a = part(m, q, r)?;
    let b = part(n - m, 1.0 - q, 1.0 - r)?;
    if a.is_infinite() && b.is_infinite() && a != b {
        return Err(Error::Domain("counts are impossible under both hypotheses".into()));
    }
    Ok(a + b)
}

/// Which side of |Mermin| ≤ 2 the LR model saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSign {
    /// Combination = −2, i.e. r₂ = 3r₁ with r₁ ∈ [0, 1/3].
    Lower,
    /// Combination = +2, i.e. r₂ = 3r₁ − 2 with r₁ ∈ [2/3, 1].
    Upper,
}

impl BoundSign {
    fn r2(self, r1: f64) -> f64 {
        match self {
            BoundSign::Lower => 3.0 * r1,
            BoundSign::Upper => 3.0 * r1 - 2.0,
        }
    }

    fn r1_range(self) -> (f64, f64) {
        match self {
            BoundSign::Lower => (0.0, 1.0 / 3.0),
            BoundSign::Upper => (2.0 / 3.0, 1.0),
        }
    }
}

/// Quantum probabilities of the two event types: q₁ for a single-primed
/// product (a'bc and its permutations) being +1, q₂ for a'b'c' being +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventModel {
    pub q1: f64,
    pub q2: f64,
    pub bound_sign: BoundSign,
}

impl EventModel {
    pub fn new(q1: f64, q2: f64, bound_sign: BoundSign) -> Result<Self> {
        check_probability("q1", q1)?;
        check_probability("q2", q2)?;
        Ok(Self { q1, q2, bound_sign })
    }

    /// Lower-bound model, the side the decay states violate.
    pub fn lower(q1: f64, q2: f64) -> Result<Self> {
        Self::new(q1, q2, BoundSign::Lower)
    }

    /// Event probabilities of `s` measured along symmetric settings. The
    /// three single-primed expectations are averaged.
    pub fn from_state(s: &PureState, settings: &ObservableSettings) -> Result<Self> {
        let (n, np) = (settings.unprimed(), settings.primed());
        let e1 = (triple_expectation(s, &np, &n, &n)?
            + triple_expectation(s, &n, &np, &n)?
            + triple_expectation(s, &n, &n, &np)?)
            / 3.0;
        let e2 = triple_expectation(s, &np, &np, &np)?;
        let mermin = 3.0 * e1 - e2;
        let sign = if mermin <= 0.0 { BoundSign::Lower } else { BoundSign::Upper };
        Self::new(snap((1.0 + e1) / 2.0), snap((1.0 + e2) / 2.0), sign)
    }

    /// y/x-settings model tested against the lower bound, whichever side
    /// the value falls on.
    fn lower_from(s: &PureState) -> Result<Self> {
        let m = Self::from_state(s, &ObservableSettings::Y_X)?;
        Ok(Self { bound_sign: BoundSign::Lower, ..m })
    }

    fn violates(&self) -> bool {
        match self.bound_sign {
            BoundSign::Lower => 3.0 * self.q1 < self.q2,
            BoundSign::Upper => 3.0 * self.q1 - 2.0 > self.q2,
        }
    }
}

/// Pulls rounding noise back onto the certain outcomes 0 and 1.
fn snap(p: f64) -> f64 {
    if p.abs() < 1e-12 {
        0.0
    } else if (p - 1.0).abs() < 1e-12 {
        1.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

/// The event type the experimenter should test against the LR model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingEvent {
    SinglePrimed,
    AllPrimed,
    /// Interior optimum: both events need the same number of trials.
    Equalized,
    /// The quantum predictions are reproducible by LR; no test separates them.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthReport {
    pub q1: f64,
    pub q2: f64,
    pub r1: f64,
    pub r2: f64,
    pub k1: f64,
    pub k2: f64,
    pub n_trials: f64,
    pub binding_event: BindingEvent,
}

/// The LR model (r₁, r₂) on the saturated Mermin bound that maximizes the
/// smaller of the two trial counts, with the default target D = 10⁴.
pub fn best_lr_model(model: &EventModel) -> Result<StrengthReport> {
    best_lr_model_with_target(model, DEFAULT_TARGET_EXPONENT)
}

/// As [`best_lr_model`] with log₁₀ D = `target_exponent`.
///
/// min(n₁, n₂) is maximal where max(K₁, K₂) is minimal. K₁ is convex in r₁
/// with its minimum at q₁, K₂ likewise at the r₁ mapping onto q₂, so the
/// optimum is one of those two (clamped) minimizers or the crossing of K₁
/// and K₂ between them.
pub fn best_lr_model_with_target(model: &EventModel, target_exponent: f64) -> Result<StrengthReport> {
    if !(target_exponent > 0.0 && target_exponent.is_finite()) {
        return Err(validation(format!("target exponent {target_exponent} must be positive")));
    }
    let EventModel { q1, q2, bound_sign } = *model;
    check_probability("q1", q1)?;
    check_probability("q2", q2)?;
    if !model.violates() {
        return Ok(StrengthReport {
            q1,
            q2,
            r1: q1,
            r2: q2,
            k1: 0.0,
            k2: 0.0,
            n_trials: f64::INFINITY,
            binding_event: BindingEvent::None,
        });
    }

    let (lo, hi) = bound_sign.r1_range();
    let k1 = |r1: f64| info_distance_ext(q1, r1);
    let k2 = |r1: f64| info_distance_ext(q2, bound_sign.r2(r1).clamp(0.0, 1.0));
    let a = q1.clamp(lo, hi);
    let b = match bound_sign {
        BoundSign::Lower => q2 / 3.0,
        BoundSign::Upper => (q2 + 2.0) / 3.0,
    }
    .clamp(lo, hi);

    let (r1, binding) = if k2(a) <= k1(a) {
        (a, BindingEvent::SinglePrimed)
    } else if k1(b) <= k2(b) {
        (b, BindingEvent::AllPrimed)
    } else {
        // K₁ − K₂ changes sign between a and b
        let (mut x0, mut x1) = (a, b);
        let g0 = k1(x0) - k2(x0);
        while (x1 - x0).abs() > BISECTION_TOL {
            let mid = 0.5 * (x0 + x1);
            let g = k1(mid) - k2(mid);
            if g == 0.0 {
                x0 = mid;
                x1 = mid;
            } else if (g < 0.0) == (g0 < 0.0) {
                x0 = mid;
            } else {
                x1 = mid;
            }
        }
        (0.5 * (x0 + x1), BindingEvent::Equalized)
    };
    let (k1v, k2v) = (k1(r1), k2(r1));
    let k = k1v.max(k2v);
    Ok(StrengthReport {
        q1,
        q2,
        r1,
        r2: bound_sign.r2(r1),
        k1: k1v,
        k2: k2v,
        n_trials: if k == 0.0 { f64::INFINITY } else { target_exponent / k },
        binding_event: binding,
    })
}

/// Settings near the second stationary point of the Mermin value of the
/// decay state, used as the starting guess for the alternate model.
pub const ALTERNATE_START: ObservableSettings =
    ObservableSettings { theta: 90.0, phi: 24.0, theta_p: 90.0, phi_p: 126.0 };

/// Event model of the Mercedes decay state at the ≈ −3.046 stationary settings.
pub fn alternate_settings_model() -> Result<EventModel> {
    let s = delta_family_state(120.0)?;
    let r = mermin_local(&s, &ALTERNATE_START)?;
    EventModel::from_state(&s, &r.settings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Computed,
    Reference,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Computed => "computed",
            Source::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrengthRow {
    pub state: &'static str,
    pub n_trials: f64,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrengthTable {
    pub rows: Vec<StrengthRow>,
}

impl StrengthTable {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["state", "n_trials", "source"]);
        for r in &self.rows {
            t.push(vec![Cell::Text(r.state.into()), Cell::Num(r.n_trials), Cell::Text(r.source.as_str().into())]);
        }
        t
    }
}

/// Trials needed against the best LR model: GHZ and the positronium state
/// at the y/x settings, and the singlet reference value.
pub fn strength_table() -> Result<StrengthTable> {
    let computed = |s: PureState| -> Result<f64> {
        Ok(best_lr_model(&EventModel::from_state(&s, &ObservableSettings::Y_X)?)?.n_trials)
    };
    Ok(StrengthTable {
        rows: vec![
            StrengthRow { state: "GHZ", n_trials: computed(PureState::ghz())?, source: Source::Computed },
            StrengthRow {
                state: "positronium",
                n_trials: computed(delta_family_state(120.0)?)?,
                source: Source::Computed,
            },
            StrengthRow { state: "singlet", n_trials: SINGLET_TRIALS, source: Source::Reference },
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthSweepRow {
    pub delta: f64,
    pub report: StrengthReport,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrengthSweep {
    pub rows: Vec<StrengthSweepRow>,
}

impl StrengthSweep {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["delta_deg", "q1", "r1", "n_trials", "flagged_over_200"]);
        for r in &self.rows {
            t.push(vec![
                Cell::Num(r.delta),
                Cell::Num(r.report.q1),
                Cell::Num(r.report.r1),
                Cell::Num(r.report.n_trials),
                Cell::Bool(r.flagged),
            ]);
        }
        t
    }
}

/// Trial counts for the δ family at the fixed y/x settings.
pub fn strength_delta_sweep(range: &DeltaRange) -> Result<StrengthSweep> {
    let rows = range
        .values()
        .into_par_iter()
        .map(|delta| {
            let model = EventModel::lower_from(&delta_family_state(delta)?)?;
            let report = best_lr_model(&model)?;
            Ok(StrengthSweepRow { delta, report, flagged: report.n_trials >= SWEEP_FLAG_TRIALS })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrengthSweep { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        assert_eq!(info_distance(0.3, 0.3).unwrap(), 0.0);
        assert!((info_distance(1.0, 0.75).unwrap() - (4.0f64 / 3.0).log10()).abs() < 1e-15);
        assert!((info_distance(1.0 / 6.0, 0.315).unwrap() - 0.02486).abs() < 1e-5);
        assert!(info_distance(0.5, 0.0).is_err());
        assert!(info_distance(0.5, 1.0).is_err());
        assert!(info_distance(1.2, 0.5).is_err());
        assert_eq!(info_distance(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn trial_counts() {
        let n = trials_to_depress(0.0, 0.25, 4.0).unwrap();
        assert!((n - 4.0 / (4.0f64 / 3.0).log10()).abs() < 1e-12);
        assert!((trials_to_depress(1.0 / 6.0, 0.315, 4.0).unwrap() - 160.9).abs() < 0.5);
        assert_eq!(trials_to_depress(0.4, 0.4, 4.0).unwrap(), f64::INFINITY);
        assert!(trials_to_depress(0.4, 0.3, 0.0).is_err());
    }

    #[test]
    fn depressing_factor() {
        let d = log10_depressing_factor(1.0, 0.75, 10, 10).unwrap();
        assert!((d - 10.0 * (4.0f64 / 3.0).log10()).abs() < 1e-13);
        assert_eq!(log10_depressing_factor(1.0, 0.75, 10, 9).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log10_depressing_factor(0.5, 0.0, 10, 1).unwrap(), f64::INFINITY);
        assert!(log10_depressing_factor(0.5, 0.5, 3, 4).is_err());
        let d = log10_depressing_factor(0.25, 0.5, 8, 2).unwrap();
        assert!((d - 8.0 * info_distance(0.25, 0.5).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn positronium_model() {
        let r = best_lr_model(&EventModel::lower(1.0 / 6.0, 1.0).unwrap()).unwrap();
        assert!((r.r1 - 0.315).abs() < 1e-3, "{r:?}");
        assert!((r.n_trials - 161.0).abs() < 1.0);
        assert_eq!(r.binding_event, BindingEvent::Equalized);
        assert!((r.k1 - r.k2).abs() < 1e-9);
        assert!((r.r2 - 3.0 * r.r1).abs() < 1e-12);
    }

    #[test]
    fn ghz_model() {
        let r = best_lr_model(&EventModel::lower(0.0, 1.0).unwrap()).unwrap();
        assert!((r.r1 - 0.25).abs() < 1e-6);
        assert!((r.n_trials - 32.0).abs() < 1.0);
    }

    #[test]
    fn no_violation() {
        let r = best_lr_model(&EventModel::lower(0.4, 1.0).unwrap()).unwrap();
        assert_eq!(r.n_trials, f64::INFINITY);
        assert_eq!(r.binding_event, BindingEvent::None);
    }

    #[test]
    fn upper_bound_mirrors_lower() {
        // flipping every outcome maps q → 1 − q and the lower bound onto the upper
        let lo = best_lr_model(&EventModel::lower(0.1, 0.9).unwrap()).unwrap();
        let up = best_lr_model(&EventModel::new(0.9, 0.1, BoundSign::Upper).unwrap()).unwrap();
        assert!((lo.n_trials - up.n_trials).abs() < 1e-6 * lo.n_trials);
        assert!((lo.r1 - (1.0 - up.r1)).abs() < 1e-9);
    }

    #[test]
    fn boundary_optimum() {
        // q1 just below the bound on r1: K₂ vanishes there, so r1 = q2/3 binds
        let r = best_lr_model(&EventModel::lower(0.3, 0.95).unwrap()).unwrap();
        assert!(r.n_trials.is_finite());
        assert!(r.r1 <= 1.0 / 3.0 && r.r1 >= 0.0);
    }

    #[test]
    fn table_rows() {
        let t = strength_table().unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!((t.rows[0].n_trials - 32.0).abs() < 1.0);
        assert!((t.rows[1].n_trials - 161.0).abs() < 1.0);
        assert_eq!(t.rows[2].n_trials, 200.0);
        assert_eq!(t.rows[2].source, Source::Reference);
        assert!(t.to_table().to_csv().starts_with("state,n_trials,source\nGHZ,32.01"));
    }

    #[test]
    fn alternate_model() {
        let r = best_lr_model(&alternate_settings_model().unwrap()).unwrap();
        assert!((r.n_trials - 166.0).abs() < 1.0, "{r:?}");
    }

    #[test]
    fn sweep_decreases() {
        let s = strength_delta_sweep(&DeltaRange::new(100.0, 180.0, 10.0).unwrap()).unwrap();
        assert_eq!(s.rows.len(), 9);
        for w in s.rows.windows(2) {
            assert!(w[1].report.n_trials < w[0].report.n_trials);
        }
        let low = strength_delta_sweep(&DeltaRange::new(0.0, 80.0, 20.0).unwrap()).unwrap();
        assert!(low.rows.iter().all(|r| r.report.n_trials.is_infinite() && r.flagged));
    }
}

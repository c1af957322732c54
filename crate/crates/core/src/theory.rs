//! Finite-sample theory: time-uniform confidence widths, the polynomial
//! log-log inversion bound, and the clipping-phase length predictor.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::scalar::Scalar;

/// Error budget split between the count and second-moment confidence sequences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceParams<T> {
    pub delta: T,
    pub delta_count: T,
    pub delta_moment: T,
}

impl<T: Scalar> ConfidenceParams<T> {
    /// `delta_count = delta/3`, `delta_moment = 2 delta/3`.
    pub fn new(delta: T) -> Result<Self> {
        if !(delta > T::zero() && delta < T::one()) {
            return Err(Error::PreconditionViolated(format!("delta = {delta} outside (0, 1)")));
        }
        let delta_count = delta / T::lit(3.0);
        Ok(Self {
            delta,
            delta_count,
            delta_moment: delta - delta_count,
        })
    }
}

/// `log log max(t, 3) + 0.72 log(5.2 / delta)`.
///
/// The `max(t, 3)` guard keeps the iterated logarithm defined and
/// nonnegative for `t` in `{1, 2}`; it only widens the bound.
pub fn loglog_term<T: Scalar>(t: T, delta: T) -> T {
    let t = t.max(T::lit(3.0));
    t.ln().ln() + T::lit(0.72) * (T::lit(5.2) / delta).ln()
}

/// Half-width of the time-uniform confidence sequence for a count of
/// Bernoulli trials around the sum of their success probabilities.
pub fn count_width<T: Scalar>(t: T, delta: T) -> T {
    T::lit(0.85) * (t * loglog_term(t, delta)).sqrt()
}

/// Half-width of the time-uniform confidence sequence for the square root of
/// an empirical second moment after `t` observations.
pub fn moment_width<T: Scalar>(t: T, delta: T, s: T) -> Result<T> {
    if !(s > T::zero()) {
        return Err(Error::DegenerateInstance(format!(
            "second-moment width needs S > 0 (got {s})"
        )));
    }
    Ok(T::lit(0.85) * (loglog_term(t, delta) / (s * t)).sqrt())
}

/// Upper bound on `min { t : t^p >= c1 + c2 log log t }`.
///
/// Requires `log c1 > p`, `c1 log c1 > c2` and, when `c2 > 0`, `c1 > e` so
/// that `log log c1` is positive.
pub fn loglog_inversion<T: Scalar>(c1: T, c2: T, p: T) -> Result<T> {
    loglog_inversion_base(c1, c2, p).map(|base| base.powf(p.recip()))
}

/// The quantity raised to `1/p` in [`loglog_inversion`].
fn loglog_inversion_base<T: Scalar>(c1: T, c2: T, p: T) -> Result<T> {
    if !(p > T::zero() && c1 > T::zero() && c2 >= T::zero()) {
        return Err(Error::PreconditionViolated(format!(
            "need c1 > 0, c2 >= 0, p > 0 (got c1 = {c1}, c2 = {c2}, p = {p})"
        )));
    }
    let log_c1 = c1.ln();
    if !(log_c1 > p) {
        return Err(Error::PreconditionViolated(format!("log c1 = {log_c1} <= p = {p}")));
    }
    if !(c1 * log_c1 > c2) {
        return Err(Error::PreconditionViolated(format!(
            "c1 log c1 = {} <= c2 = {c2}",
            c1 * log_c1
        )));
    }
    if c2 == T::zero() {
        return Ok(c1);
    }
    let ll = log_c1.ln();
    if !(ll > T::zero()) {
        return Err(Error::PreconditionViolated(format!(
            "c1 = {c1} <= e, log log c1 is not positive"
        )));
    }
    Ok(c1 + c2 * ll * inversion_factor(c1, c2, p))
}

/// `[(log log c1 - log p) / log log c1] * [c1 log c1 / (c1 log c1 - c2)]`.
fn inversion_factor<T: Scalar>(c1: T, c2: T, p: T) -> T {
    let log_c1 = c1.ln();
    let ll = log_c1.ln();
    (ll - p.ln()) / ll * (c1 * log_c1 / (c1 * log_c1 - c2))
}

/// Constants for one side (floor or ceiling) of the clipping guard.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchConstants<T> {
    pub k1: T,
    pub k2: T,
    pub k3: T,
    /// `k1 + k2 k3 log log k1`.
    pub base: T,
    /// `base^(1 / (2 beta_bar))`; NaN when the branch is invalid.
    pub t: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClipPhasePrediction<T> {
    pub t_lower: T,
    pub t_upper: T,
    pub t_clip: T,
    /// `min(alpha, (1 - alpha) / 2)`.
    pub beta_bar: T,
    pub lower: BranchConstants<T>,
    pub upper: BranchConstants<T>,
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// `min(alpha, (1 - alpha) / 2)`.
pub fn worst_case_exponent<T: Scalar>(alpha: T) -> T {
    alpha.min((T::one() - alpha) / T::two())
}

/// High-probability bound on the round after which the clipping guard never
/// binds again, for guard exponent `alpha` and error probability `delta`.
///
/// Invalid inputs or constants outside the inversion lemma's domain produce a
/// prediction flagged `valid = false` with NaN times.
pub fn predict_clip_phase<T: Scalar>(inst: &ProblemInstance<T>, alpha: T, delta: T) -> ClipPhasePrediction<T> {
    let nan = T::nan();
    let beta_bar = worst_case_exponent(alpha);
    let empty = BranchConstants {
        k1: nan,
        k2: nan,
        k3: nan,
        base: nan,
        t: nan,
    };
    let mut out = ClipPhasePrediction {
        t_lower: nan,
        t_upper: nan,
        t_clip: nan,
        beta_bar,
        lower: empty,
        upper: empty,
        valid: false,
        reasons: Vec::new(),
    };
    if !(alpha > T::zero() && alpha < T::one()) {
        out.reasons.push(format!("alpha = {alpha} outside (0, 1)"));
    }
    let conf = match ConfidenceParams::new(delta) {
        Ok(c) => Some(c),
        Err(e) => {
            out.reasons.push(e.to_string());
            None
        }
    };
    let pi_star = match inst.pi_star() {
        Ok(p) => Some(p),
        Err(e) => {
            out.reasons.push(e.to_string());
            None
        }
    };
    let (Some(conf), Some(pi_star)) = (conf, pi_star) else {
        return out;
    };
    if !out.reasons.is_empty() {
        return out;
    }

    let (s0, s1) = (inst.s0(), inst.s1());
    let inv_roots = s0.sqrt().recip() + s1.sqrt().recip();
    let log_term = (T::lit(5.2) / conf.delta_moment).ln();
    let p = T::two() * beta_bar;
    let four = T::lit(4.0);

    let branch = |label: &str, pi: T, s: T, reasons: &mut Vec<String>| {
        let k2 = four / s * inv_roots;
        let k1 = T::two() / (pi * pi) + k2 * log_term;
        let mut bc = BranchConstants {
            k1,
            k2,
            k3: nan,
            base: nan,
            t: nan,
        };
        if k1.ln().ln() > T::zero() {
            bc.k3 = inversion_factor(k1, k2, p);
        }
        match loglog_inversion_base(k1, k2, p) {
            Ok(base) => {
                bc.base = base;
                bc.t = base.powf(p.recip());
            }
            Err(e) => reasons.push(format!("{label} branch: {e}")),
        }
        bc
    };

    out.lower = branch("lower", pi_star, s1, &mut out.reasons);
    out.upper = branch("upper", T::one() - pi_star, s0, &mut out.reasons);
    out.t_lower = out.lower.t;
    out.t_upper = out.upper.t;
    out.valid = out.reasons.is_empty();
    if out.valid {
        out.t_clip = out.t_lower.max(out.t_upper);
    }
    out
}

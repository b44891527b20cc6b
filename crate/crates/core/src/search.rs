//! Extremal and counterexample search on the unit sphere.
//!
//! For each subset M, multi-restart descent minimises a scale-invariant
//! objective (`Re Q(x)/‖x‖²` or `Re h(x)/‖x‖²`) using central finite
//! differences, renormalising onto the ℓ^p unit sphere after every step and
//! halving the step until the objective improves. Results are merged in
//! ascending subset-mask order, then restart order, so parallel and serial
//! runs agree.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{all_subsets, random_subsets, IndexSet, Pasf};
use crate::identities::{BoundEvaluator, FrameContext};
use crate::io::serialize_vector;
use crate::rng::{random_nonzero_vector, stream_id, stream_rng};
use crate::sip::{lp_norm, Field, SipSpace, Vector};

/// Subsets enumerated exhaustively up to this frame size.
pub const EXHAUSTIVE_SEARCH_LIMIT: usize = 12;
/// Subsets sampled beyond [`EXHAUSTIVE_SEARCH_LIMIT`].
pub const SAMPLED_SUBSETS: usize = 256;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// `h(x)/‖x‖²` below this counts as a hypothesis violation.
pub const VIOLATION_THRESHOLD: f64 = -1e-8;

// Coordinates smaller than this are zeroed before differencing.
const CLAMP: f64 = 1e-12;
// Restricted mode gives up on a restart if no admissible start is found.
const ADMISSIBLE_START_TRIES: usize = 32;

/// Which subsets M to visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsetPolicy {
    Exhaustive,
    Sample(usize),
}

impl SubsetPolicy {
    /// Exhaustive up to `limit`, otherwise `sample` random subsets.
    pub fn auto(n: usize, limit: usize, sample: usize) -> Self {
        if n <= limit {
            SubsetPolicy::Exhaustive
        } else {
            SubsetPolicy::Sample(sample)
        }
    }

    /// Subsets in ascending mask order (exhaustive) or draw order (sampled).
    pub fn subsets(&self, n: usize, seed: u64) -> Vec<IndexSet> {
        match *self {
            SubsetPolicy::Exhaustive => all_subsets(n).collect(),
            SubsetPolicy::Sample(k) => {
                let mut rng = stream_rng(seed, stream_id(&[0x5b5e7, n as u64]));
                random_subsets(&mut rng, n, k)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub seed: u64,
    /// Descent on a restart stops once the step falls below this.
    pub tol_step: f64,
    /// Only accept iterates at which the hypothesis `h(x) ≥ 0` holds.
    pub restricted: bool,
    /// `None` picks exhaustive for `N ≤ 12`, otherwise 256 samples.
    pub subsets: Option<SubsetPolicy>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 300,
            step_init: 0.25,
            seed: 0,
            tol_step: 1e-12,
            restricted: false,
            subsets: None,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0;
        if self.restarts == 0 || !positive(self.step_init) || !positive(self.tol_step) {
            return Err(Error::Format(
                "search config needs restarts >= 1, step_init > 0, tol_step > 0".into(),
            ));
        }
        Ok(())
    }

    fn policy(&self, n: usize) -> SubsetPolicy {
        self.subsets
            .unwrap_or_else(|| SubsetPolicy::auto(n, EXHAUSTIVE_SEARCH_LIMIT, SAMPLED_SUBSETS))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    /// Empirical minimum of `Re Q(x)/‖x‖²`.
    pub best_ratio: f64,
    #[serde(serialize_with = "serialize_vector")]
    pub best_x: Vector,
    #[serde(serialize_with = "serialize_subset")]
    pub best_m: IndexSet,
    pub hypothesis_value_at_best: f64,
    /// `(iteration, ratio)` for the winning restart; non-increasing.
    pub trace: Vec<(usize, f64)>,
    pub subsets_searched: usize,
    pub restarts_run: usize,
}

fn serialize_subset<S: serde::Serializer>(m: &IndexSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&m.bitstring())
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisViolation {
    #[serde(serialize_with = "serialize_subset")]
    pub m: IndexSet,
    #[serde(serialize_with = "serialize_vector")]
    pub x: Vector,
    /// `Re h(x)` at the unit-norm witness.
    pub h_value: f64,
}

/// Minimises `Re Q(x)/‖x‖²` over subsets and the unit sphere.
pub fn minimize_ratio(f: &Pasf, config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let ctx = FrameContext::new(f);
    require_parseval(&ctx)?;
    let subsets = config.policy(f.len()).subsets(f.len(), config.seed);
    let space = *f.space();

    let per_subset: Vec<Option<RunResult>> = subsets
        .par_iter()
        .map(|m| {
            let eval = ctx.bound_evaluator(m);
            let objective = |x: &[Complex64]| eval.ratio(x);
            let admissible = |x: &[Complex64]| {
                !config.restricted || eval.hypothesis_ratio(x) >= -crate::identities::HYPOTHESIS_SLACK
            };
            best_over_restarts(&space, m, config, &objective, &admissible)
        })
        .collect();

    let mut best: Option<(usize, RunResult)> = None;
    for (i, run) in per_subset.into_iter().enumerate() {
        if let Some(run) = run {
            if best.as_ref().is_none_or(|(_, b)| run.value < b.value) {
                best = Some((i, run));
            }
        }
    }
    let restarts_run = config.restarts * subsets.len();
    let (idx, run) = match best {
        Some(b) => b,
        None => {
            // Restricted mode with no admissible start anywhere: report the
            // full set, where Q(x) = ‖x‖² and h(x) = ‖x‖²/4.
            let m = IndexSet::full(f.len());
            let x = space.basis(0)?;
            let eval = ctx.bound_evaluator(&m);
            let r = eval.evaluate(x.coords());
            return Ok(SearchOutcome {
                best_ratio: r.ratio,
                best_x: x,
                best_m: m,
                hypothesis_value_at_best: r.hypothesis_value,
                trace: vec![(0, r.ratio)],
                subsets_searched: subsets.len(),
                restarts_run,
            });
        }
    };
    let best_m = subsets[idx].clone();
    let best_x = Vector::new(space, run.x)?;
    let at_best = ctx.bound_evaluator(&best_m).evaluate(best_x.coords());
    Ok(SearchOutcome {
        best_ratio: at_best.ratio,
        best_x,
        best_m,
        hypothesis_value_at_best: at_best.hypothesis_value,
        trace: run.trace,
        subsets_searched: subsets.len(),
        restarts_run,
    })
}

/// Looks for `(M, x)` with `Re h(x)/‖x‖² < -1e-8`, minimising the
/// hypothesis quantity per subset. Returns the violation on the first such
/// subset in visiting order.
pub fn find_hypothesis_violation(
    f: &Pasf,
    config: &SearchConfig,
) -> Result<Option<HypothesisViolation>> {
    config.validate()?;
    let ctx = FrameContext::new(f);
    require_parseval(&ctx)?;
    let subsets = config.policy(f.len()).subsets(f.len(), config.seed);
    let space = *f.space();

    let per_subset: Vec<Option<RunResult>> = subsets
        .par_iter()
        .map(|m| {
            let eval: BoundEvaluator<'_> = ctx.bound_evaluator(m);
            let objective = |x: &[Complex64]| eval.hypothesis_ratio(x);
            best_over_restarts(&space, m, config, &objective, &|_| true)
        })
        .collect();

    for (m, run) in subsets.iter().zip(per_subset) {
        if let Some(run) = run {
            if run.value < VIOLATION_THRESHOLD {
                let x = Vector::new(space, run.x)?.normalized();
                let h = ctx.bound_evaluator(m).evaluate(x.coords()).hypothesis_value;
                return Ok(Some(HypothesisViolation {
                    m: m.clone(),
                    x,
                    h_value: h,
                }));
            }
        }
    }
    Ok(None)
}

fn require_parseval(ctx: &FrameContext<'_>) -> Result<()> {
    if !ctx.frame().is_parseval() {
        return Err(Error::NotParseval {
            residual: ctx.parseval_residual(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct RunResult {
    value: f64,
    x: Vec<Complex64>,
    trace: Vec<(usize, f64)>,
}

fn best_over_restarts(
    space: &SipSpace,
    m: &IndexSet,
    config: &SearchConfig,
    objective: &dyn Fn(&[Complex64]) -> f64,
    admissible: &dyn Fn(&[Complex64]) -> bool,
) -> Option<RunResult> {
    let mut best: Option<RunResult> = None;
    for restart in 0..config.restarts {
        let mut rng = stream_rng(config.seed, stream_id(&[m.mask(), restart as u64]));
        let Some(x0) = admissible_start(&mut rng, space, admissible) else {
            continue;
        };
        let run = descend(space, x0, config, objective, admissible);
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    best
}

fn admissible_start<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SipSpace,
    admissible: &dyn Fn(&[Complex64]) -> bool,
) -> Option<Vec<Complex64>> {
    (0..ADMISSIBLE_START_TRIES)
        .map(|_| random_nonzero_vector(rng, space).normalized().into_coords())
        .find(|x| admissible(x))
}

fn descend(
    space: &SipSpace,
    mut x: Vec<Complex64>,
    config: &SearchConfig,
    objective: &dyn Fn(&[Complex64]) -> f64,
    admissible: &dyn Fn(&[Complex64]) -> bool,
) -> RunResult {
    let p = space.p();
    let mut value = objective(&x);
    let mut trace = vec![(0, value)];
    let mut step = config.step_init;
    for iter in 1..=config.max_iters {
        let grad = numerical_gradient(objective, &x, space.field(), FD_STEP);
        let gnorm = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if gnorm == 0.0 || !gnorm.is_finite() {
            break;
        }
        let mut accepted = false;
        while step >= config.tol_step {
            let trial: Vec<Complex64> = x.iter().zip(&grad).map(|(xi, gi)| xi - gi * step).collect();
            let n = lp_norm(&trial, p);
            if n > 0.0 {
                let trial: Vec<Complex64> = trial.into_iter().map(|c| c / n).collect();
                let v = objective(&trial);
                if v < value && admissible(&trial) {
                    x = trial;
                    value = v;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push((iter, value));
        step = (step * 2.0).min(config.step_init);
    }
    RunResult { value, x, trace }
}

/// Central-difference gradient of a real objective with respect to the real
/// (and, for complex fields, imaginary) parts of each coordinate. Entry `i`
/// packs `∂/∂re` and `∂/∂im` of coordinate `i`.
pub fn numerical_gradient(
    objective: &dyn Fn(&[Complex64]) -> f64,
    x: &[Complex64],
    field: Field,
    h: f64,
) -> Vec<Complex64> {
    let mut base: Vec<Complex64> = x.to_vec();
    for c in base.iter_mut() {
        if c.norm() < CLAMP {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let mut grad = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut probe = base.clone();
    for i in 0..x.len() {
        let orig = base[i];
        probe[i] = orig + h;
        let up = objective(&probe);
        probe[i] = orig - h;
        let down = objective(&probe);
        grad[i].re = (up - down) / (2.0 * h);
        if field == Field::Complex {
            probe[i] = orig + Complex64::new(0.0, h);
            let up = objective(&probe);
            probe[i] = orig - Complex64::new(0.0, h);
            let down = objective(&probe);
            grad[i].im = (up - down) / (2.0 * h);
        }
        probe[i] = orig;
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{duplicated_extremal_frame, random_pasf};

    fn small_config(seed: u64) -> SearchConfig {
        SearchConfig {
            restarts: 4,
            max_iters: 100,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn extremal_frame_hits_three_quarters() {
        let f = duplicated_extremal_frame(2.0, Field::Real).unwrap();
        let out = minimize_ratio(&f, &small_config(1)).unwrap();
        assert!((out.best_ratio - 0.75).abs() < 1e-8, "{}", out.best_ratio);
        assert_eq!(out.subsets_searched, 4);
        // {0} has mask 1, the smallest attaining mask.
        assert_eq!(out.best_m.bitstring(), "10");
    }

    #[test]
    fn hilbert_random_parseval_stays_above_bound() {
        let s = SipSpace::new(2, 2.0, Field::Complex).unwrap();
        let f = random_pasf(s, 4, 3, true).unwrap();
        for restricted in [false, true] {
            let cfg = SearchConfig {
                restricted,
                ..small_config(2)
            };
            let out = minimize_ratio(&f, &cfg).unwrap();
            assert!(out.best_ratio >= 0.75 - 1e-6);
            assert!(out.trace.windows(2).all(|w| w[1].1 <= w[0].1));
        }
    }

    #[test]
    fn deterministic() {
        let s = SipSpace::new(2, 3.0, Field::Real).unwrap();
        let f = random_pasf(s, 4, 9, true).unwrap();
        let a = minimize_ratio(&f, &small_config(5)).unwrap();
        let b = minimize_ratio(&f, &small_config(5)).unwrap();
        assert_eq!(a.best_ratio.to_bits(), b.best_ratio.to_bits());
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn rejects_non_parseval() {
        let s = SipSpace::new(2, 2.0, Field::Real).unwrap();
        let f = Pasf::standard_basis(s).scale_tau(Complex64::new(2.0, 0.0));
        assert!(matches!(
            minimize_ratio(&f, &small_config(0)),
            Err(Error::NotParseval { .. })
        ));
        assert!(matches!(
            find_hypothesis_violation(&f, &small_config(0)),
            Err(Error::NotParseval { .. })
        ));
    }

    #[test]
    fn no_violation_in_hilbert_or_one_dimension() {
        let s = SipSpace::new(2, 2.0, Field::Complex).unwrap();
        let f = random_pasf(s, 4, 4, true).unwrap();
        assert!(find_hypothesis_violation(&f, &small_config(3)).unwrap().is_none());
        for p in [1.5, 3.0] {
            let s = SipSpace::new(1, p, Field::Real).unwrap();
            let f = random_pasf(s, 3, 1, true).unwrap();
            assert!(find_hypothesis_violation(&f, &small_config(3)).unwrap().is_none());
        }
    }

    #[test]
    fn invalid_config() {
        let f = duplicated_extremal_frame(2.0, Field::Real).unwrap();
        let cfg = SearchConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(minimize_ratio(&f, &cfg).is_err());
    }
}

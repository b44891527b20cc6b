//! Batch verification of one frame: every identity over a family of
//! subsets and random points, summarised per suite.
//!
//! Work is split by subset and run in parallel; per-subset results are
//! merged in subset order, so the summary is identical for any worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::frames::{IndexSet, Pasf};
use crate::identities::{
    hilbert_suite, lemma_uv_check, FrameContext, DEFAULT_TOL_REL, PARSEVAL_TOL_REL, PATH_TOL,
};
use crate::io::{vector_entries, Entry};
use crate::operators::LinearOperator;
use crate::rng::{random_nonzero_vector, stream_id, stream_rng};
use crate::search::SubsetPolicy;

/// Exhaustive subsets up to this frame size during verification.
pub const EXHAUSTIVE_VERIFY_LIMIT: usize = 8;
pub const SAMPLED_VERIFY_SUBSETS: usize = 100;
/// Failures recorded per suite; further failures are only counted.
pub const MAX_RECORDED_FAILURES: usize = 16;
/// 3/4 bound slack when the hypothesis holds.
pub const BOUND_SLACK: f64 = 1e-6;
/// Imaginary leakage allowed in Q(x) and h(x) at p = 2.
pub const IMAG_LEAK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub subsets: Option<SubsetPolicy>,
    /// Random points per subset.
    pub samples: usize,
    pub seed: u64,
    /// Relative tolerance for the general identity.
    pub tol_rel: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            subsets: None,
            samples: 20,
            seed: 0,
            tol_rel: DEFAULT_TOL_REL,
        }
    }
}

impl VerifyConfig {
    pub fn policy(&self, n: usize) -> SubsetPolicy {
        self.subsets.unwrap_or_else(|| {
            SubsetPolicy::auto(n, EXHAUSTIVE_VERIFY_LIMIT, SAMPLED_VERIFY_SUBSETS)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteStatus {
    Pass,
    Fail,
    Skipped,
}

/// A failing `(M, x)` with enough data to replay it against the frame file.
#[derive(Debug, Clone, Serialize)]
pub struct FailureCase {
    pub subset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Entry>>,
    pub value: f64,
    pub limit: f64,
    pub what: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub status: SuiteStatus,
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<f64>,
    pub cases_run: usize,
    pub failure_count: usize,
    pub failures: Vec<FailureCase>,
    /// Suite-specific statistics.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SuiteResult {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            status: SuiteStatus::Pass,
            max_residual: None,
            min_ratio: None,
            cases_run: 0,
            failure_count: 0,
            failures: Vec::new(),
            stats: BTreeMap::new(),
            note: None,
        }
    }

    fn skipped(suite: &str, why: &str) -> Self {
        let mut r = Self::new(suite);
        r.status = SuiteStatus::Skipped;
        r.note = Some(why.to_string());
        r
    }

    fn residual(&mut self, v: f64) {
        self.max_residual = Some(self.max_residual.map_or(v, |m| m.max(v)));
    }

    fn ratio(&mut self, v: f64) {
        self.min_ratio = Some(self.min_ratio.map_or(v, |m| m.min(v)));
    }

    fn stat_max(&mut self, key: &str, v: f64) {
        let e = self.stats.entry(key.to_string()).or_insert(v);
        *e = e.max(v);
    }

    fn stat_add(&mut self, key: &str, v: f64) {
        *self.stats.entry(key.to_string()).or_insert(0.0) += v;
    }

    fn fail(&mut self, case: FailureCase) {
        self.failure_count += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(case);
        }
        self.status = SuiteStatus::Fail;
    }

    /// Folds a per-subset partial result into `self`.
    fn absorb(&mut self, other: SuiteResult) {
        if let Some(r) = other.max_residual {
            self.residual(r);
        }
        if let Some(r) = other.min_ratio {
            self.ratio(r);
        }
        self.cases_run += other.cases_run;
        for (k, v) in other.stats {
            if k.starts_with("count_") {
                self.stat_add(&k, v);
            } else if k.starts_with("min_") {
                let e = self.stats.entry(k).or_insert(v);
                *e = e.min(v);
            } else {
                self.stat_max(&k, v);
            }
        }
        for f in other.failures {
            self.fail(f);
        }
    }

    pub fn passed(&self) -> bool {
        self.status != SuiteStatus::Fail
    }
}

fn case(m: &IndexSet, x: Option<&crate::sip::Vector>, value: f64, limit: f64, what: &str) -> FailureCase {
    FailureCase {
        subset: m.bitstring(),
        x: x.map(vector_entries),
        value,
        limit,
        what: what.to_string(),
    }
}

/// Runs every applicable suite. Errors only when `S` is not invertible.
pub fn run_suites(f: &Pasf, config: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    // Surfaces NotInvertible before any work.
    f.frame_operator().invert()?;
    let ctx = FrameContext::new(f);
    let subsets = config.policy(f.len()).subsets(f.len(), config.seed);
    let parseval = f.is_parseval();
    let hilbert = f.space().is_hilbert();

    let partials: Vec<[SuiteResult; 5]> = subsets
        .par_iter()
        .map(|m| subset_suites(&ctx, m, config, parseval, hilbert))
        .collect::<Result<Vec<_>>>()?;

    let names = [
        "lemma",
        "general_identity",
        "parseval_identity",
        "operator_identity",
        "lower_bound",
    ];
    let mut merged: Vec<SuiteResult> = names.iter().map(|n| SuiteResult::new(n)).collect();
    for part in partials {
        for (dst, src) in merged.iter_mut().zip(part) {
            let failures_before = src.failure_count - src.failures.len();
            dst.absorb(src);
            dst.failure_count += failures_before;
        }
    }
    if !parseval {
        let why = format!(
            "frame is not Parseval (|S - I| = {:e})",
            ctx.parseval_residual()
        );
        for r in merged.iter_mut().skip(2) {
            *r = SuiteResult::skipped(&r.suite.clone(), &why);
        }
    } else if let Some(lb) = merged.get_mut(4) {
        let total = lb.cases_run as f64;
        let holds = lb.stats.get("count_hypothesis_holds").copied().unwrap_or(0.0);
        if total > 0.0 {
            lb.stats.insert("hypothesis_frequency".into(), holds / total);
        }
        lb.stats.insert("parseval_residual".into(), ctx.parseval_residual());
    }

    let mut hil = SuiteResult::new("hilbert");
    if hilbert {
        let rep = hilbert_suite(f, config.samples.max(1), stream_id(&[config.seed, 0x4115]))?;
        hil.cases_run = rep.cases;
        hil.residual(rep.frame_identity_max_residual.max(rep.parseval_identity_max_residual));
        hil.ratio(rep.min_ratio);
        hil.stats.insert("frame_identity_max_residual".into(), rep.frame_identity_max_residual);
        hil.stats.insert(
            "parseval_identity_max_residual".into(),
            rep.parseval_identity_max_residual,
        );
        hil.stats.insert("bound_symmetry_gap".into(), rep.bound_symmetry_gap);
        if !rep.passed {
            hil.status = SuiteStatus::Fail;
            hil.failure_count = 1;
            hil.failures.push(FailureCase {
                subset: rep.min_ratio_subset.clone(),
                x: None,
                value: rep.min_ratio,
                limit: 0.75,
                what: "hilbert suite".into(),
            });
        }
    } else {
        hil = SuiteResult::skipped("hilbert", "p != 2");
    }
    merged.push(hil);
    Ok(merged)
}

fn subset_suites(
    ctx: &FrameContext<'_>,
    m: &IndexSet,
    config: &VerifyConfig,
    parseval: bool,
    hilbert: bool,
) -> Result<[SuiteResult; 5]> {
    let f = ctx.frame();
    let space = *f.space();
    let mut lemma = SuiteResult::new("lemma");
    let mut general = SuiteResult::new("general_identity");
    let mut pars = SuiteResult::new("parseval_identity");
    let mut op = SuiteResult::new("operator_identity");
    let mut bound = SuiteResult::new("lower_bound");

    // U = S⁻¹S_M, V = I - U (= S⁻¹S_{M^c}).
    let s_inv = f.frame_operator().invert()?.inverse;
    let u = s_inv.compose(&f.partial_frame_operator(m)?)?;
    let v = LinearOperator::identity(space).sub(&u)?;
    let r = lemma_uv_check(&u, &v)?;
    lemma.cases_run += 1;
    lemma.residual(r.residual / r.scale);
    if !r.passed {
        lemma.fail(case(m, None, r.residual, r.tol * r.scale, "(U-V) != U^2-V^2"));
    }

    if parseval {
        let res = ctx.operator_identity_residual(m)?;
        let limit = 1e-9 + 10.0 * ctx.parseval_residual();
        op.cases_run += 1;
        op.residual(res);
        if res > limit {
            op.fail(case(m, None, res, limit, "S_M + S_Mc^2 != S_Mc + S_M^2"));
        }
    }

    let mut rng = stream_rng(config.seed, stream_id(&[0x7e51, m.mask()]));
    let eval = parseval.then(|| ctx.bound_evaluator(m));
    for _ in 0..config.samples {
        let x = random_nonzero_vector(&mut rng, &space);

        let g = ctx.general_identity(m, &x, config.tol_rel)?;
        general.cases_run += 1;
        general.residual(g.relative());
        general.stat_max("max_path_gap", g.path_gap / g.scale);
        if !g.passed {
            general.fail(case(m, Some(&x), g.relative(), g.tol, "general identity"));
        } else if g.path_gap > PATH_TOL * g.scale {
            general.fail(case(m, Some(&x), g.path_gap / g.scale, PATH_TOL, "summation vs operator route"));
        }

        let Some(eval) = eval.as_ref() else { continue };

        let pr = ctx.parseval_identity(m, &x, PARSEVAL_TOL_REL)?;
        pars.cases_run += 1;
        pars.residual(pr.relative());
        pars.stat_max("max_path_gap", pr.path_gap / pr.scale);
        if !pr.passed {
            pars.fail(case(m, Some(&x), pr.relative(), pr.tol, "Parseval identity"));
        } else if pr.path_gap > PATH_TOL * pr.scale {
            pars.fail(case(m, Some(&x), pr.path_gap / pr.scale, PATH_TOL, "summation vs operator route"));
        }

        let b = eval.evaluate(x.coords());
        let scale = 1f64.max(b.q_value.abs());
        bound.cases_run += 1;
        bound.residual(b.symmetric_gap / scale);
        bound.stat_max("max_q_imag", b.q_imag.abs() / scale);
        bound.stat_max("max_h_imag", b.hypothesis_imag.abs() / b.norm_sq.max(1e-300));
        bound.stat_max("max_negative_hypothesis", (-b.hypothesis_value / b.norm_sq).max(0.0));
        bound.stats.entry("min_ratio_all".into()).or_insert(b.ratio);
        if let Some(v) = bound.stats.get_mut("min_ratio_all") {
            *v = v.min(b.ratio);
        }
        if b.hypothesis_holds {
            bound.stat_add("count_hypothesis_holds", 1.0);
            bound.ratio(b.ratio);
            if b.ratio < 0.75 - BOUND_SLACK {
                bound.fail(case(m, Some(&x), b.ratio, 0.75 - BOUND_SLACK, "3/4 bound"));
            }
        } else if hilbert {
            bound.fail(case(m, Some(&x), b.hypothesis_value, 0.0, "hypothesis negative at p = 2"));
        }
        if b.symmetric_gap > config.tol_rel * scale {
            bound.fail(case(m, Some(&x), b.symmetric_gap / scale, config.tol_rel, "Q(M) != Q(M^c) form"));
        }
        if hilbert && b.q_imag.abs() > IMAG_LEAK_TOL * scale {
            bound.fail(case(m, Some(&x), b.q_imag.abs() / scale, IMAG_LEAK_TOL, "imaginary Q at p = 2"));
        }
    }
    Ok([lemma, general, pars, op, bound])
}

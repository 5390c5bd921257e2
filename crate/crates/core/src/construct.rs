//! The greedy block constructor: given t ≠ 0 and a complex target λ,
//! stream disjoint blocks S_k of consecutive integers whose twisted
//! harmonic sums drive the residual λ_k = λ − Σ_{emitted} n^{-1-it} to
//! zero exponentially, while the harmonic budget Σ 1/n stays under
//! |λ|/(1 − ρ·(1+|1+it|)).
//!
//! Every step audits the per-block inequalities
//!     Σ_{n∈S_k} 1/n ≤ |c_k|,
//!     |c_k − Σ_{n∈S_k} n^{-1-it}| ≤ (1+|1+it|)·|c_k|² + angular slack,
//! and the residual decrease they imply, against certified error bounds.
//! A violation is a bug or a tolerance misconfiguration and is reported as
//! a structured error, never ignored.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::FromPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certified::{err_add, CertifiedReal, CertifiedSum};
use crate::dd::{self, Dd};
use crate::powersum::{harmonic_mass, interval_sum, phase, BigStart, SumPolicy};
use crate::setrep::{Block, BlockSet, SetError};

/// Admissible phase branches examined before declaring the solve stuck.
/// Candidate spacing shrinks like |t|/x, so the first branch succeeds in
/// practice; the cap guards against misconfiguration.
const PHASE_SEARCH_CAP: u64 = 1_000_000;

/// Measurement cushion folded into every audited inequality, on top of the
/// certified bounds (which it dwarfs by design): covers arg/norm rounding
/// of the target and the documented phase-computation error.
const ANGULAR_EPS: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("invalid spec: {field}: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("phase solve exhausted after {tried} branches (internal error)")]
    PhaseSearchExhausted { tried: u64 },
    #[error("lemma audit failed: {which} exceeds its certified bound by {excess:.3e}")]
    LemmaAuditFailed { which: &'static str, excess: f64 },
    #[error(
        "residual decrease violated at step {k}: |lambda| went to {after:.6e}, allowed {allowed:.6e}"
    )]
    DecreaseViolation { k: usize, after: f64, allowed: f64 },
    #[error(transparent)]
    Set(#[from] SetError),
}

/// The construction problem instance.
#[derive(Clone, Debug)]
pub struct TargetSpec {
    /// Imaginary shift of the exponent; the construction needs t ≠ 0.
    pub t: f64,
    /// Target of Σ n^{-1-it}.
    pub lambda: Complex64,
    /// Stop once |λ_k| ≤ epsilon.
    pub epsilon: f64,
    /// Floor: every emitted element is ≥ n0.
    pub n0: BigStart,
    /// Clamp radius for each correction c_k; must satisfy 0 < rho ≤ r(t).
    /// Smaller rho buys a tighter harmonic budget at the cost of more blocks.
    pub rho: f64,
    pub max_blocks: usize,
    /// When λ = 0, emit one block targeting rho and then cancel it, instead
    /// of returning the empty set.
    pub detour: bool,
    pub policy: SumPolicy,
}

/// The clamp radius r = (2 + 2|1+it|)^{-1}: the step-size cap under which a
/// block's quadratic error loses to its linear gain.
pub fn clamp_radius(t: f64) -> f64 {
    1.0 / (2.0 + 2.0 * (1.0 + t * t).sqrt())
}

/// Shrink lambda onto the disk of radius rho, preserving its argument.
pub fn clamp(lambda: Complex64, rho: f64) -> Complex64 {
    let m = lambda.norm();
    if m <= rho {
        lambda
    } else {
        lambda * (rho / m)
    }
}

impl TargetSpec {
    /// Spec with the exact scheme defaults: rho = r(t), n0 = 2, ε = 1e-9.
    pub fn new(t: f64, lambda: Complex64) -> Result<Self, ConstructError> {
        let spec = TargetSpec {
            t,
            lambda,
            epsilon: 1e-9,
            n0: BigUint::from(2u32),
            rho: clamp_radius(t),
            max_blocks: 4096,
            detour: false,
            policy: SumPolicy::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Choose rho so the certified harmonic budget is |λ| + delta:
    /// rho = 2·r·δ/(|λ|+δ), capped at r.
    pub fn with_budget_delta(mut self, delta: f64) -> Result<Self, ConstructError> {
        if delta <= 0.0 || !delta.is_finite() {
            return Err(ConstructError::InvalidSpec {
                field: "delta",
                reason: format!("must be positive and finite, got {delta}"),
            });
        }
        let r = clamp_radius(self.t);
        self.rho = (2.0 * r * delta / (self.lambda.norm() + delta)).min(r);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        let fail = |field: &'static str, reason: String| {
            Err(ConstructError::InvalidSpec { field, reason })
        };
        if self.t == 0.0 || !self.t.is_finite() {
            return fail("t", format!("must be nonzero and finite, got {}", self.t));
        }
        if !self.lambda.re.is_finite() || !self.lambda.im.is_finite() {
            return fail("lambda", "must be finite".into());
        }
        // below ~1e-140 the |c|^{-2} floor overflows f64 and the certified
        // error budget has long stopped being meaningful anyway
        if self.epsilon < 1e-140 || !self.epsilon.is_finite() {
            return fail(
                "epsilon",
                format!("must lie in [1e-140, inf), got {}", self.epsilon),
            );
        }
        let r = clamp_radius(self.t);
        if self.rho <= 0.0 || self.rho > r || self.rho.is_nan() {
            return fail(
                "rho",
                format!("must satisfy 0 < rho <= r = {r}, got {}", self.rho),
            );
        }
        if self.n0 < BigUint::from(2u32) {
            return fail("n0", format!("must be >= 2, got {}", self.n0));
        }
        if self.max_blocks == 0 {
            return fail("max_blocks", "must be positive".into());
        }
        Ok(())
    }

    /// Rough decimal-digit size of the final block start; block starts grow
    /// by a factor ≈ e^(2π/|t|) per step, so small |t| explodes. The CLI
    /// refuses estimates above 10^4 digits without an explicit override.
    pub fn predicted_final_digits(&self) -> f64 {
        let lam = self.lambda.norm();
        let phase1 = (2.0 * lam / self.rho).ceil();
        let phase2 = (self.rho / self.epsilon).log2().ceil().max(0.0);
        let steps = phase1 + phase2 + 2.0;
        let ln_floor = (2.0 * (1.0 / self.epsilon).ln()).max(0.0);
        let ln_n0 = self.n0.bits() as f64 * std::f64::consts::LN_2;
        let ln_final = ln_n0.max(ln_floor) + steps * (std::f64::consts::TAU / self.t.abs());
        ln_final / std::f64::consts::LN_10
    }
}

/// State threaded through the recursion.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    /// 1-based step index of the next block.
    pub k: usize,
    /// Remaining target λ − Σ over emitted blocks.
    pub lambda_k: Complex64,
    /// Floor for the next block: strictly past every emitted element.
    pub n_k: BigStart,
    /// |c_k| per emitted step.
    pub c_history: Vec<f64>,
    /// Accumulated certified error of the emitted block sums.
    pub err_budget: f64,
}

impl ConstructionState {
    pub fn initial(spec: &TargetSpec) -> Self {
        ConstructionState {
            k: 1,
            lambda_k: spec.lambda,
            n_k: spec.n0.clone().max(BigUint::from(2u32)),
            c_history: Vec::new(),
            err_budget: 0.0,
        }
    }
}

/// Output of one Lemma-1 block choice.
#[derive(Clone, Debug)]
pub struct LemmaBlock {
    /// None exactly when c = 0 (the empty set suffices).
    pub block: Option<Block>,
    pub sum: CertifiedSum,
    pub mass: CertifiedReal,
    /// Measured phase mismatch of the chosen start against arg(c).
    pub phase_gap: f64,
    /// Slack left in |c − sum| ≤ (1+|1+it|)|c|² + angular + 10·err.
    pub margin_sum: f64,
    /// Slack left in mass ≤ |c| + 10·err.
    pub margin_mass: f64,
}

/// Smallest integer ≥ v (v ≥ 0 finite), as a BigUint.
fn ceil_to_big(v: f64) -> BigUint {
    debug_assert!(v >= 0.0 && v.is_finite());
    BigUint::from_f64(v.ceil()).expect("nonnegative finite")
}

/// ⌊x·c⌋ computed exactly: c is a dyadic rational mant·2^e.
fn mul_floor_dyadic(x: &BigUint, c: f64) -> BigUint {
    debug_assert!(c > 0.0 && c.is_finite());
    let bits = c.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, e) = if exp_field == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1 << 52), exp_field - 1075)
    };
    let p = x * mant;
    if e >= 0 {
        p << e as usize
    } else {
        p >> (-e) as usize
    }
}

/// Pick one correction block S' = [x, x+s) whose twisted sum approximates
/// c: x is the smallest admissible integer ≥ max(N, |c|^{-1}, |c|^{-2})
/// whose phase matches arg(c), and s = ⌊x·|c|⌋, so that
/// Σ_{n∈S'} 1/n ≤ |c| and
/// |c − Σ_{n∈S'} n^{-1-it}| ≤ (1+|1+it|)·|c|² + angular slack.
///
/// The returned sums carry certified bounds, and both inequalities are
/// audited before returning.
pub fn lemma_block(
    n_floor: &BigStart,
    c: Complex64,
    t: f64,
    policy: &SumPolicy,
) -> Result<LemmaBlock, ConstructError> {
    if t == 0.0 || !t.is_finite() {
        return Err(ConstructError::InvalidSpec {
            field: "t",
            reason: "lemma block needs t != 0".into(),
        });
    }
    let ac = c.norm();
    if ac == 0.0 {
        return Ok(LemmaBlock {
            block: None,
            sum: CertifiedSum::zero(),
            mass: CertifiedReal::zero(),
            phase_gap: 0.0,
            margin_sum: 0.0,
            margin_mass: 0.0,
        });
    }
    let inv1 = (1.0 / ac) * (1.0 + 1e-14);
    let inv2 = (1.0 / (ac * ac)) * (1.0 + 1e-14);
    if !inv2.is_finite() {
        return Err(ConstructError::InvalidSpec {
            field: "c",
            reason: format!("|c| = {ac} too small: |c|^-2 floor overflows"),
        });
    }
    // raise the floor so that 1/x ≤ |c|² and s ≥ 1 are guaranteed
    let n_req = n_floor
        .clone()
        .max(ceil_to_big(inv1))
        .max(ceil_to_big(inv2))
        .max(BigUint::from(2u32));

    let mut psi = c.arg();
    if psi < 0.0 {
        psi += dd::TAU.hi + dd::TAU.lo;
    }
    let psi = psi.clamp(0.0, dd::TAU.hi);

    // solve t·ln x ≡ -psi (mod 2π) with ln x ≥ ln n_req:
    // ln x = (2πj - psi)/t for the branch index j, stepped so ln x grows
    let ln_floor = dd::big_ln(&n_req);
    let q = ln_floor.mul_f64(t).add_f64(psi).div(dd::TAU).to_f64();
    let (j0, dir) = if t > 0.0 {
        (q.ceil() as i64, 1i64)
    } else {
        (q.floor() as i64, -1i64)
    };

    let mut chosen: Option<(BigUint, f64)> = None;
    for iter in 0..PHASE_SEARCH_CAP {
        let j = j0 + dir * iter as i64;
        let u = dd::TAU.mul_f64(j as f64).add_f64(-psi).div(Dd::from_f64(t));
        if u.hi < 0.6 {
            continue;
        }
        let x = dd::exp_round(u).max(n_req.clone());
        let phi = phase(&x, t);
        let d = (phi - psi).abs();
        let gap = d.min(dd::TAU.hi - d);
        let x_minus_1 = &x - 1u32;
        let tol = 0.5 * t.abs() * dd::recip_upper(&x_minus_1) + 1e-12;
        if gap <= tol {
            chosen = Some((x, gap));
            break;
        }
    }
    let (x, gap) = chosen.ok_or(ConstructError::PhaseSearchExhausted {
        tried: PHASE_SEARCH_CAP,
    })?;

    let s = mul_floor_dyadic(&x, ac).max(BigUint::from(1u32));
    let sum = interval_sum(&x, &s, t, policy);
    let mass = harmonic_mass(&x, &s, policy);

    // audit both lemma inequalities with 10x the certified error as slack
    let m1 = 1.0 + (1.0 + t * t).sqrt(); // 1 + |1+it| = 1/(2r)
    let bound_sum = m1 * ac * ac + ac * (gap + ANGULAR_EPS) + 10.0 * sum.err;
    let dev = (c - sum.value).norm();
    if dev > bound_sum {
        return Err(ConstructError::LemmaAuditFailed {
            which: "|c - sum|",
            excess: dev - bound_sum,
        });
    }
    let bound_mass = ac + 10.0 * mass.err;
    if mass.value > bound_mass {
        return Err(ConstructError::LemmaAuditFailed {
            which: "mass",
            excess: mass.value - bound_mass,
        });
    }

    let block = Block::new(x, s)?;
    Ok(LemmaBlock {
        block: Some(block),
        sum,
        mass,
        phase_gap: gap,
        margin_sum: bound_sum - dev,
        margin_mass: bound_mass - mass.value,
    })
}

/// Everything recorded about one emitted block.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub k: usize,
    pub c: Complex64,
    pub start: BigStart,
    pub len: BigStart,
    pub sum: CertifiedSum,
    pub mass: CertifiedReal,
    pub lemma_margin_1: f64,
    pub lemma_margin_2: f64,
    /// Measured phase mismatch of the chosen start against arg(c).
    pub phase_gap: f64,
    pub lambda_before: Complex64,
    pub lambda_after: Complex64,
}

/// One step of the recursion: clamp the residual, choose the block, update
/// the state, and assert the residual-decrease inequality.
pub fn step(
    state: &mut ConstructionState,
    set: &mut BlockSet,
    spec: &TargetSpec,
) -> Result<Option<StepRecord>, ConstructError> {
    let k = state.k;
    let lambda_before = state.lambda_k;
    let c = clamp(lambda_before, spec.rho);
    if c.norm() == 0.0 {
        state.k += 1;
        return Ok(None);
    }
    let lb = lemma_block(&state.n_k, c, spec.t, &spec.policy)?;
    let block = lb.block.expect("c != 0 yields a block");
    let lambda_after = lambda_before - lb.sum.value;

    // |λ_{k+1}| ≤ |λ_k| − |c|(1 − ρ(1+|1+it|)) + slack
    let ac = c.norm();
    let m1 = 1.0 + (1.0 + spec.t * spec.t).sqrt();
    let slack = ac * (lb.phase_gap + ANGULAR_EPS)
        + 10.0 * lb.sum.err
        + 4.0 * f64::EPSILON * lambda_before.norm();
    let allowed = lambda_before.norm() - ac * (1.0 - m1 * spec.rho) + slack;
    if lambda_after.norm() > allowed {
        return Err(ConstructError::DecreaseViolation {
            k,
            after: lambda_after.norm(),
            allowed,
        });
    }

    let record = StepRecord {
        k,
        c,
        start: block.start().clone(),
        len: block.len().clone(),
        sum: lb.sum,
        mass: lb.mass,
        lemma_margin_1: lb.margin_sum,
        lemma_margin_2: lb.margin_mass,
        phase_gap: lb.phase_gap,
        lambda_before,
        lambda_after,
    };
    state.n_k = block.end();
    state.lambda_k = lambda_after;
    state.err_budget = err_add(state.err_budget, lb.sum.err);
    state.c_history.push(ac);
    state.k += 1;
    set.append_block(block, lb.sum, lb.mass)?;
    Ok(Some(record))
}

/// Full run of the constructor.
#[derive(Clone, Debug)]
pub struct ConstructOutcome {
    pub set: BlockSet,
    /// λ − Σ over emitted blocks, at the computed-value level.
    pub residual: Complex64,
    pub report: ConstructReport,
}

#[derive(Clone, Debug)]
pub struct ConstructReport {
    pub converged: bool,
    pub steps: Vec<StepRecord>,
    pub residual: Complex64,
    /// |λ − Σ_true| ≤ |residual| + err_budget: the shipped guarantee.
    pub err_budget: f64,
    pub sum_abs_c: f64,
    pub total_mass: CertifiedReal,
    /// Steps entered with |λ_k| > rho (the linear-decrease phase).
    pub steps_above_rho: usize,
}

impl ConstructReport {
    pub fn certified_gap(&self) -> f64 {
        self.residual.norm() + self.err_budget
    }

    pub fn to_json(&self, spec: &TargetSpec) -> String {
        #[derive(Serialize)]
        struct BlockRow {
            k: usize,
            c_re: f64,
            c_im: f64,
            start: String,
            len: String,
            sum_re: f64,
            sum_im: f64,
            sum_err: f64,
            mass: f64,
            lemma_margin_1: f64,
            lemma_margin_2: f64,
        }
        #[derive(Serialize)]
        struct Doc {
            t: f64,
            lambda_re: f64,
            lambda_im: f64,
            epsilon: f64,
            rho: f64,
            converged: bool,
            blocks: Vec<BlockRow>,
            residual_re: f64,
            residual_im: f64,
            residual_abs: f64,
            err_budget: f64,
            certified_gap: f64,
            sum_abs_c: f64,
            total_mass: f64,
            total_mass_err: f64,
            steps_above_rho: usize,
        }
        let doc = Doc {
            t: spec.t,
            lambda_re: spec.lambda.re,
            lambda_im: spec.lambda.im,
            epsilon: spec.epsilon,
            rho: spec.rho,
            converged: self.converged,
            blocks: self
                .steps
                .iter()
                .map(|s| BlockRow {
                    k: s.k,
                    c_re: s.c.re,
                    c_im: s.c.im,
                    start: s.start.to_string(),
                    len: s.len.to_string(),
                    sum_re: s.sum.value.re,
                    sum_im: s.sum.value.im,
                    sum_err: s.sum.err,
                    mass: s.mass.value,
                    lemma_margin_1: s.lemma_margin_1,
                    lemma_margin_2: s.lemma_margin_2,
                })
                .collect(),
            residual_re: self.residual.re,
            residual_im: self.residual.im,
            residual_abs: self.residual.norm(),
            err_budget: self.err_budget,
            certified_gap: self.certified_gap(),
            sum_abs_c: self.sum_abs_c,
            total_mass: self.total_mass.value,
            total_mass_err: self.total_mass.err,
            steps_above_rho: self.steps_above_rho,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

/// Run the recursion until |λ_k| ≤ ε or max_blocks is exhausted.
///
/// Non-convergence is not an error: the outcome is returned with
/// `report.converged = false` so callers can never mistake it for success.
pub fn construct(spec: &TargetSpec) -> Result<ConstructOutcome, ConstructError> {
    spec.validate()?;
    let mut set = BlockSet::new(spec.t);
    let mut state = ConstructionState::initial(spec);
    let mut steps = Vec::new();
    let mut steps_above_rho = 0usize;

    if spec.detour && spec.lambda.norm() == 0.0 {
        // emit one block targeting rho on the real axis, then cancel it
        let c0 = Complex64::new(spec.rho, 0.0);
        let lb = lemma_block(&state.n_k, c0, spec.t, &spec.policy)?;
        let block = lb.block.expect("rho > 0");
        let lambda_after = state.lambda_k - lb.sum.value;
        steps.push(StepRecord {
            k: state.k,
            c: c0,
            start: block.start().clone(),
            len: block.len().clone(),
            sum: lb.sum,
            mass: lb.mass,
            lemma_margin_1: lb.margin_sum,
            lemma_margin_2: lb.margin_mass,
            phase_gap: lb.phase_gap,
            lambda_before: state.lambda_k,
            lambda_after,
        });
        state.n_k = block.end();
        state.lambda_k = lambda_after;
        state.err_budget = err_add(state.err_budget, lb.sum.err);
        state.c_history.push(spec.rho);
        state.k += 1;
        set.append_block(block, lb.sum, lb.mass)?;
    }

    while state.lambda_k.norm() > spec.epsilon {
        if steps.len() >= spec.max_blocks {
            break;
        }
        if state.lambda_k.norm() > spec.rho {
            steps_above_rho += 1;
        }
        if let Some(rec) = step(&mut state, &mut set, spec)? {
            steps.push(rec);
        }
    }

    let converged = state.lambda_k.norm() <= spec.epsilon;
    let sum_abs_c = state.c_history.iter().sum();
    let report = ConstructReport {
        converged,
        steps,
        residual: state.lambda_k,
        err_budget: state.err_budget,
        sum_abs_c,
        total_mass: set.total_mass(),
        steps_above_rho,
    };
    Ok(ConstructOutcome {
        residual: state.lambda_k,
        report,
        set,
    })
}

/// One named check of the independent re-audit.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Result of `verify`: per-invariant pass/fail plus the certified target gap.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
    pub recomputed_sum: CertifiedSum,
    pub recomputed_mass: CertifiedReal,
    /// |λ − Σ_fresh| over the recomputed block sums.
    pub lambda_gap: f64,
    /// Upper bound on |λ − Σ_true|: lambda_gap + the fresh certified error.
    pub certified_bound: f64,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Re-audit a block set against a spec, trusting nothing the constructor
/// recorded: per-block sums and masses are recomputed from scratch, the
/// structural invariants are rechecked, and — because the constructor is
/// deterministic — the whole set is rebuilt from the spec and compared
/// element-exactly. The rebuild is what catches a ±1 tamper on a block so
/// far out that its numerical footprint is below every error bound.
pub fn verify(set: &BlockSet, spec: &TargetSpec) -> VerifyReport {
    let mut checks = Vec::new();
    let mut check = |name: &'static str, pass: bool, detail: String| {
        checks.push(VerifyCheck { name, pass, detail });
    };

    check(
        "t-match",
        set.t() == spec.t,
        format!("set t = {}, spec t = {}", set.t(), spec.t),
    );

    let floor = spec.n0.clone().max(BigUint::from(2u32));
    let floor_ok = set.blocks().iter().all(|b| b.start() >= &floor);
    check("floor", floor_ok, format!("every start >= {floor}"));

    let mut ordered = true;
    for w in set.blocks().windows(2) {
        if w[1].start() < &w[0].end() {
            ordered = false;
        }
    }
    check(
        "ordering",
        ordered,
        "blocks strictly increasing and disjoint".into(),
    );

    // fresh per-block recomputation, in parallel, merged in block order
    let fresh: Vec<(CertifiedSum, CertifiedReal)> = set
        .blocks()
        .par_iter()
        .map(|b| {
            (
                interval_sum(b.start(), b.len(), set.t(), &spec.policy),
                harmonic_mass(b.start(), b.len(), &spec.policy),
            )
        })
        .collect();
    let mut sum = CertifiedSum::zero();
    let mut mass = CertifiedReal::zero();
    for (s, m) in &fresh {
        sum = sum.add(s);
        mass = mass.add(m);
    }

    let mass_gap = (mass.value - set.total_mass().value).abs();
    let mass_tol = 10.0 * (mass.err + set.total_mass().err) + 1e-15;
    check(
        "mass-consistency",
        mass_gap <= mass_tol,
        format!("recomputed vs stored mass gap {mass_gap:.3e} (tol {mass_tol:.3e})"),
    );

    let sum_gap = (sum.value - set.total_sum().value).norm();
    let sum_tol = 10.0 * (sum.err + set.total_sum().err) + 1e-15;
    check(
        "sum-consistency",
        sum_gap <= sum_tol,
        format!("recomputed vs stored sum gap {sum_gap:.3e} (tol {sum_tol:.3e})"),
    );

    let lambda_gap = (spec.lambda - sum.value).norm();
    let certified_bound = lambda_gap + sum.err;
    check(
        "target",
        lambda_gap <= spec.epsilon + 10.0 * sum.err,
        format!(
            "|lambda - sum| = {lambda_gap:.3e} vs epsilon {:.3e} (+10x err {:.3e})",
            spec.epsilon, sum.err
        ),
    );

    match construct(spec) {
        Ok(out) => {
            let rebuilt = out.set.blocks();
            let same = rebuilt.len() == set.blocks().len()
                && rebuilt
                    .iter()
                    .zip(set.blocks())
                    .all(|(a, b)| a.start() == b.start() && a.len() == b.len());
            check(
                "reconstruction",
                same,
                format!(
                    "deterministic rebuild: {} blocks vs {} stored, element-exact = {same}",
                    rebuilt.len(),
                    set.blocks().len()
                ),
            );
        }
        Err(e) => check("reconstruction", false, format!("rebuild failed: {e}")),
    }

    VerifyReport {
        checks,
        recomputed_sum: sum,
        recomputed_mass: mass,
        lambda_gap,
        certified_bound,
    }
}

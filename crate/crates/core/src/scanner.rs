//! Certified zero-free scanning of g(t) = 1 + Σ_{n∈S} n^{-1-it}.
//!
//! The certification rule is the midpoint Lipschitz argument: with
//! L ≥ sup|g'| = Σ (ln n)/n, a cell [t0, t0+h] contains no zero whenever
//! min(|g(t0)|, |g(t0+h)|) > L·h/2 + eval_err. Cells that fail are bisected
//! down to a floor width and anything still uncertified is reported —
//! never silently dropped.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certified::{Certified, CertifiedSum};
use crate::powersum::{IntervalEval, SumPolicy};
use crate::setrep::BlockSet;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("interval is empty or reversed: [{t0}, {t1}]")]
    EmptyInterval { t0: f64, t1: f64 },
    #[error("grid step must be positive and finite, got {h}")]
    BadStep { h: f64 },
    #[error("bad element: {0}")]
    BadElements(String),
}

/// Anything whose twisted harmonic series Σ n^{-1-it} can be evaluated with
/// a certified bound and globally Lipschitz-bounded in t.
pub trait Series: Sync {
    /// Σ_{n∈S} n^{-1-it} (without the leading 1).
    fn sum_at(&self, t: f64) -> CertifiedSum;
    /// An upper bound on Σ_{n∈S} (ln n)/n, hence on sup_t |g'(t)|.
    fn lipschitz(&self) -> f64;
}

/// g(t) = 1 + Σ_{n∈S} n^{-1-it}.
pub fn g<S: Series + ?Sized>(series: &S, t: f64) -> CertifiedSum {
    let s = series.sum_at(t);
    Certified::new(s.value + Complex64::new(1.0, 0.0), s.err)
}

/// The Lipschitz bound L = Σ (ln n)/n, rounded up.
pub fn lipschitz_bound<S: Series + ?Sized>(series: &S) -> f64 {
    series.lipschitz()
}

/// An explicit finite set of integers ≥ 2, held sorted and deduplicated.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSet {
    elements: Vec<u64>,
    ln_cache: Vec<f64>,
}

impl FiniteSet {
    pub fn new(mut elements: Vec<u64>) -> Result<Self, ScanError> {
        elements.sort_unstable();
        elements.dedup();
        if let Some(&n) = elements.iter().find(|&&n| n < 2) {
            return Err(ScanError::BadElements(format!("{n} is below 2")));
        }
        let ln_cache = elements.iter().map(|&n| (n as f64).ln()).collect();
        Ok(FiniteSet { elements, ln_cache })
    }

    /// Parse "2,3,5" (whitespace tolerated).
    pub fn parse_csv(s: &str) -> Result<Self, ScanError> {
        let mut elements = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let n: u64 = part
                .parse()
                .map_err(|_| ScanError::BadElements(format!("{part:?} is not an integer")))?;
            elements.push(n);
        }
        FiniteSet::new(elements)
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

impl Series for FiniteSet {
    fn sum_at(&self, t: f64) -> CertifiedSum {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        let mut absum = 0.0f64;
        let mut err = 0.0f64;
        for (&n, &ln_n) in self.elements.iter().zip(&self.ln_cache) {
            let theta = -t * ln_n;
            let (s, c) = theta.sin_cos();
            let r = 1.0 / n as f64;
            re += r * c;
            im += r * s;
            absum += r;
            err += r * f64::EPSILON * (2.5 * t.abs() * ln_n + 6.0);
        }
        // plain accumulation; charge its worst-case rounding
        err += self.elements.len() as f64 * f64::EPSILON * absum;
        Certified::new(Complex64::new(re, im), err * (1.0 + 1e-14))
    }

    fn lipschitz(&self) -> f64 {
        if self.elements.is_empty() {
            return 0.0;
        }
        let mut l = 0.0f64;
        for (&n, &ln_n) in self.elements.iter().zip(&self.ln_cache) {
            l += ln_n / n as f64;
        }
        (l * (1.0 + 1e-13)).next_up()
    }
}

/// Block-represented set evaluated through the Euler–Maclaurin endpoints,
/// so constructed sets with astronomically long blocks scan in O(blocks)
/// per grid point. Endpoint data is precomputed once per block.
pub struct BlockSeries {
    intervals: Vec<IntervalEval>,
    lip: f64,
}

impl BlockSeries {
    pub fn new(set: &BlockSet) -> Self {
        // short blocks sum directly; long ones go through order-2
        // Euler–Maclaurin, whose remainder at the shortest EM-eligible
        // start is already below 1e-12
        let policy = SumPolicy {
            direct_cap: 4096,
            em_order: 2,
        };
        let mut intervals = Vec::with_capacity(set.blocks().len());
        let mut lip = 0.0f64;
        for b in set.blocks() {
            intervals.push(IntervalEval::new(b.start(), b.len(), &policy));
            // Σ_{n∈block} (ln n)/n ≤ ln(end)·Σ 1/n
            let mass = crate::powersum::harmonic_mass(b.start(), b.len(), &policy);
            let ln_end = crate::dd::big_ln(&b.end()).to_f64() * (1.0 + 1e-14);
            lip += ln_end * (mass.value + mass.err);
        }
        let lip = if intervals.is_empty() {
            0.0
        } else {
            (lip * (1.0 + 1e-13)).next_up()
        };
        BlockSeries { intervals, lip }
    }
}

impl Series for BlockSeries {
    fn sum_at(&self, t: f64) -> CertifiedSum {
        let mut acc = CertifiedSum::zero();
        for iv in &self.intervals {
            acc = acc.add(&iv.eval(t));
        }
        acc
    }

    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanParams {
    pub t0: f64,
    pub t1: f64,
    /// Base grid step.
    pub h: f64,
    /// Bisection floor: cells this narrow that still fail the rule are
    /// reported as uncertified ("suspect"), not asserted either way.
    pub h_min: f64,
}

impl ScanParams {
    pub fn new(t0: f64, t1: f64, h: f64) -> Self {
        ScanParams {
            t0,
            t1,
            h,
            h_min: 1e-12,
        }
    }
}

/// Result of a certified scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub interval: [f64; 2],
    pub grid_step: f64,
    #[serde(rename = "lipschitz_L")]
    pub lipschitz_l: f64,
    pub min_abs_g: f64,
    pub argmin_t: f64,
    pub certified_zero_free: bool,
    pub uncertified_cells: Vec<[f64; 2]>,
    pub evaluations: u64,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

struct CellOutcome {
    uncertified: Vec<[f64; 2]>,
    min_abs: f64,
    argmin: f64,
    evals: u64,
}

/// |g| and its 10x-safety evaluation error at one point.
#[derive(Clone, Copy)]
struct Sample {
    abs_g: f64,
    guard: f64,
}

fn sample<S: Series + ?Sized>(series: &S, t: f64) -> Sample {
    let v = g(series, t);
    Sample {
        abs_g: v.value.norm(),
        guard: 10.0 * v.err,
    }
}

struct CertCtx<'a, S: ?Sized> {
    series: &'a S,
    lip: f64,
    h_min: f64,
}

fn certify_cell<S: Series + ?Sized>(
    ctx: &CertCtx<'_, S>,
    lo: f64,
    hi: f64,
    s_lo: Sample,
    s_hi: Sample,
    out: &mut CellOutcome,
) {
    let width = hi - lo;
    let threshold = ctx.lip * width / 2.0 + s_lo.guard.max(s_hi.guard);
    if s_lo.abs_g.min(s_hi.abs_g) > threshold {
        return; // certified zero-free
    }
    if width <= ctx.h_min {
        out.uncertified.push([lo, hi]);
        return;
    }
    let mid = 0.5 * (lo + hi);
    let s_mid = sample(ctx.series, mid);
    out.evals += 1;
    if s_mid.abs_g < out.min_abs {
        out.min_abs = s_mid.abs_g;
        out.argmin = mid;
    }
    certify_cell(ctx, lo, mid, s_lo, s_mid, out);
    certify_cell(ctx, mid, hi, s_mid, s_hi, out);
}

/// Scan [t0, t1] on a grid of step h, certifying cells zero-free or
/// bisecting them down to h_min. Grid cells are processed in parallel and
/// merged in order, so the report is deterministic.
pub fn scan<S: Series + ?Sized>(series: &S, params: &ScanParams) -> Result<ScanReport, ScanError> {
    scan_impl(series, params, None::<&mut std::io::Sink>)
}

/// Like `scan`, streaming base-grid rows `t,re_g,im_g,abs_g` to `csv`.
pub fn scan_with_csv<S: Series + ?Sized, W: Write>(
    series: &S,
    params: &ScanParams,
    csv: &mut W,
) -> Result<ScanReport, ScanError> {
    scan_impl(series, params, Some(csv))
}

fn scan_impl<S: Series + ?Sized, W: Write>(
    series: &S,
    params: &ScanParams,
    csv: Option<&mut W>,
) -> Result<ScanReport, ScanError> {
    let ScanParams { t0, t1, h, h_min } = *params;
    if t0 >= t1 || !t0.is_finite() || !t1.is_finite() {
        return Err(ScanError::EmptyInterval { t0, t1 });
    }
    if h <= 0.0 || !h.is_finite() {
        return Err(ScanError::BadStep { h });
    }
    let cells = (((t1 - t0) / h).ceil() as usize).max(1);
    let points: Vec<f64> = (0..=cells)
        .map(|j| if j == cells { t1 } else { t0 + j as f64 * h })
        .collect();

    let values: Vec<CertifiedSum> = points.par_iter().map(|&t| g(series, t)).collect();

    if let Some(w) = csv {
        writeln!(w, "t,re_g,im_g,abs_g").map_err(io_to_scan)?;
        for (t, v) in points.iter().zip(&values) {
            writeln!(w, "{},{},{},{}", t, v.value.re, v.value.im, v.value.norm())
                .map_err(io_to_scan)?;
        }
    }

    let lip = series.lipschitz();
    let samples: Vec<Sample> = values
        .iter()
        .map(|v| Sample {
            abs_g: v.value.norm(),
            guard: 10.0 * v.err,
        })
        .collect();

    let ctx = CertCtx { series, lip, h_min };
    let outcomes: Vec<CellOutcome> = (0..cells)
        .into_par_iter()
        .map(|j| {
            let mut out = CellOutcome {
                uncertified: Vec::new(),
                min_abs: f64::INFINITY,
                argmin: points[j],
                evals: 0,
            };
            certify_cell(
                &ctx,
                points[j],
                points[j + 1],
                samples[j],
                samples[j + 1],
                &mut out,
            );
            out
        })
        .collect();

    let mut evaluations = (cells + 1) as u64;
    let mut uncertified = Vec::new();
    let (mut min_abs, mut argmin) = (f64::INFINITY, t0);
    for (j, s) in samples.iter().enumerate() {
        if s.abs_g < min_abs {
            min_abs = s.abs_g;
            argmin = points[j];
        }
    }
    for out in outcomes {
        evaluations += out.evals;
        uncertified.extend(out.uncertified);
        if out.min_abs < min_abs {
            min_abs = out.min_abs;
            argmin = out.argmin;
        }
    }

    // refine the global minimum inside its bracketing cells
    let lo = (argmin - h).max(t0);
    let hi = (argmin + h).min(t1);
    if lo < hi {
        let refined = refine_min(series, lo, hi, (h * 1e-9).max(1e-13));
        evaluations += refined.evals;
        if refined.abs_g < min_abs {
            min_abs = refined.abs_g;
            argmin = refined.t;
        }
    }

    Ok(ScanReport {
        interval: [t0, t1],
        grid_step: h,
        lipschitz_l: lip,
        min_abs_g: min_abs,
        argmin_t: argmin,
        certified_zero_free: uncertified.is_empty(),
        uncertified_cells: uncertified,
        evaluations,
    })
}

fn io_to_scan(e: std::io::Error) -> ScanError {
    ScanError::BadElements(format!("csv write failed: {e}"))
}

/// Result of a golden-section refinement of a local minimum of |g|.
#[derive(Clone, Copy, Debug)]
pub struct RefineResult {
    pub t: f64,
    pub abs_g: f64,
    /// False when the interior never beat the endpoints — the input did not
    /// bracket a minimum and the best endpoint value is returned instead.
    pub bracketed: bool,
    pub evals: u64,
}

/// Golden-section minimization of |g(t)|² on [lo, hi] down to width `tol`.
pub fn refine_min<S: Series + ?Sized>(series: &S, lo: f64, hi: f64, tol: f64) -> RefineResult {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |t: f64| g(series, t).value.norm_sqr();

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let f_lo = f(a);
    let f_hi = f(b);
    let mut evals = 4u64;

    while (b - a).abs() > tol && evals < 300 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    let (mut t, mut fv) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let mut bracketed = true;
    // endpoints win => not a bracket; fall back to the better endpoint
    if f_lo < fv {
        t = lo;
        fv = f_lo;
        bracketed = false;
    }
    if f_hi < fv {
        t = hi;
        fv = f_hi;
        bracketed = false;
    }
    RefineResult {
        t,
        abs_g: fv.sqrt(),
        bracketed,
        evals,
    }
}

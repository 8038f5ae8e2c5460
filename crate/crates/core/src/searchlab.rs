//! Deterministic multi-start searches over Ω_4 and K_4.
//!
//! Points are reached through unconstrained parameters: Ω_4 as
//! softplus-normalized weights on the 24 permutation matrices, K_4 as 16
//! softplus-normalized entries scaled to sum 4, and α through
//! `lo + (hi - lo)·sin²(v)`. Each restart runs an adaptive Nelder–Mead
//! method from its own seeded start; restarts run in parallel and are
//! aggregated in index order.

use std::f64::consts::FRAC_PI_2;

use itertools::Itertools;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::dittert::phi;
use crate::error::{Error, Result};
use crate::lihwang::{gap_direct, quartic_features, quartic_paper_from_features};
use crate::matcore::{birkhoff_combination, seeded_rng, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchDomain {
    Omega4QuarticPaper,
    Omega4GapTrue,
    K4Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Evaluation budget per restart.
    pub max_evals: usize,
    pub seed: u64,
    pub domain: SearchDomain,
    pub interval: (f64, f64),
    pub tol_x: f64,
    pub tol_f: f64,
    /// Keep the improvement history of every restart.
    pub trace: bool,
}

impl SearchConfig {
    pub fn new(domain: SearchDomain, interval: (f64, f64), restarts: usize, seed: u64) -> Self {
        SearchConfig {
            restarts,
            max_evals: 20_000,
            seed,
            domain,
            interval,
            tol_x: 1e-10,
            tol_f: 1e-13,
            trace: false,
        }
    }

    fn validate(&self, expected: SearchDomain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::invalid(format!(
                "search expects domain {expected:?}, config has {:?}",
                self.domain
            )));
        }
        if self.restarts == 0 || self.max_evals == 0 {
            return Err(Error::invalid("restarts and max_evals must be positive"));
        }
        let (lo, hi) = self.interval;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] not inside [0, 1]")));
        }
        Ok(())
    }

    /// Seed of restart `index`.
    pub fn restart_seed(&self, index: usize) -> u64 {
        self.seed
            .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// One improvement of the best value within a restart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub eval: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
    pub alpha: Option<f64>,
    pub matrix: Mat<f64>,
    pub evals: usize,
    pub converged: bool,
    /// Max-norm distance of the final matrix to J_4.
    pub distance_to_uniform: f64,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub domain: SearchDomain,
    pub interval: (f64, f64),
    /// Minimum for the Ω_4 searches, maximum for φ.
    pub best_value: f64,
    pub best_alpha: Option<f64>,
    pub best_matrix: Mat<f64>,
    pub best_restart: usize,
    pub evals_used: usize,
    /// Set when no restart converged within its budget.
    pub budget_exhausted: bool,
    pub per_restart: Vec<RestartOutcome>,
}

impl SearchResult {
    pub fn per_restart_values(&self) -> Vec<f64> {
        self.per_restart.iter().map(|r| r.value).collect()
    }

    /// Trace rows `restart,eval,value` with 17 significant digits.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("restart,eval,value\n");
        for r in &self.per_restart {
            for p in &r.trace {
                out.push_str(&format!("{},{},{:.16e}\n", r.index, p.eval, p.value));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Nelder–Mead

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    pub tol_x: f64,
    pub tol_f: f64,
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
    /// Strict improvements of the best value, with the evaluation count.
    pub history: Vec<TracePoint>,
}

/// Adaptive Nelder–Mead (dimension-dependent coefficients), re-initialized
/// around the best vertex after each convergence until a fresh simplex
/// brings no improvement.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadOutcome {
    let d = x0.len();
    let df = d as f64;
    let (rho, chi, gamma, sigma) = if d >= 2 {
        (1.0, 1.0 + 2.0 / df, 0.75 - 1.0 / (2.0 * df), 1.0 - 1.0 / df)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut evals = 0usize;
    let mut history = Vec::new();
    let mut best_seen = f64::INFINITY;
    let mut eval = |x: &[f64], evals: &mut usize, history: &mut Vec<TracePoint>, best: &mut f64| {
        let v = f(x);
        *evals += 1;
        if v < *best {
            *best = v;
            history.push(TracePoint { eval: *evals, value: v });
        }
        v
    };

    let mut center = x0.to_vec();
    let mut center_value = f64::INFINITY;
    let mut converged = false;
    loop {
        let mut simplex: Vec<Vec<f64>> = vec![center.clone()];
        for i in 0..d {
            let mut v = center.clone();
            v[i] += if v[i].abs() > 1e-3 { opts.initial_step * v[i].abs().max(1.0) } else { opts.initial_step };
            simplex.push(v);
        }
        let mut values: Vec<f64> = Vec::with_capacity(d + 1);
        for v in &simplex {
            if evals >= opts.max_evals {
                break;
            }
            values.push(eval(v, &mut evals, &mut history, &mut best_seen));
        }
        if values.len() < simplex.len() {
            break;
        }
        let mut round_converged = false;
        let mut last_gain_eval = evals;
        let mut round_best = values.iter().copied().fold(f64::INFINITY, f64::min);
        while evals < opts.max_evals {
            let current = values.iter().copied().fold(f64::INFINITY, f64::min);
            if current < round_best - opts.tol_f * (1.0 + current.abs()) {
                round_best = current;
                last_gain_eval = evals;
            }
            let order: Vec<usize> = (0..=d).sorted_by(|&a, &b| values[a].total_cmp(&values[b])).collect();
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();
            let spread = values[d] - values[0];
            let diameter = simplex[1..]
                .iter()
                .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            // Redundant parameterizations leave flat directions in which the
            // simplex never shrinks, so a long stall also counts as converged.
            let stalled = evals - last_gain_eval > 50 * (d + 1);
            if spread <= opts.tol_f * (1.0 + values[0].abs()) && (diameter <= opts.tol_x || stalled) {
                round_converged = true;
                break;
            }
            let centroid: Vec<f64> = (0..d)
                .map(|k| simplex[..d].iter().map(|v| v[k]).sum::<f64>() / df)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[d]).map(|(c, w)| c + t * (c - w)).collect()
            };
            let xr = along(rho);
            let fr = eval(&xr, &mut evals, &mut history, &mut best_seen);
            if fr < values[0] {
                let xe = along(rho * chi);
                let fe = eval(&xe, &mut evals, &mut history, &mut best_seen);
                if fe < fr {
                    simplex[d] = xe;
                    values[d] = fe;
                } else {
                    simplex[d] = xr;
                    values[d] = fr;
                }
                continue;
            }
            if fr < values[d - 1] {
                simplex[d] = xr;
                values[d] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[d] {
                let xc = along(rho * gamma);
                let fc = eval(&xc, &mut evals, &mut history, &mut best_seen);
                (xc, fc)
            } else {
                let xc = along(-gamma);
                let fc = eval(&xc, &mut evals, &mut history, &mut best_seen);
                (xc, fc)
            };
            if fc < values[d].min(fr) {
                simplex[d] = xc;
                values[d] = fc;
                continue;
            }
            for i in 1..=d {
                if evals >= opts.max_evals {
                    break;
                }
                let shrunk: Vec<f64> = simplex[0]
                    .iter()
                    .zip(&simplex[i])
                    .map(|(b, v)| b + sigma * (v - b))
                    .collect();
                values[i] = eval(&shrunk, &mut evals, &mut history, &mut best_seen);
                simplex[i] = shrunk;
            }
        }
        let (bi, bv) = values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("simplex is nonempty");
        let improved = bv < center_value - opts.tol_f * (1.0 + bv.abs());
        if bv < center_value {
            center = simplex[bi].clone();
            center_value = bv;
        }
        if !round_converged {
            break;
        }
        if !improved {
            converged = true;
            break;
        }
    }
    NelderMeadOutcome {
        x: center,
        value: center_value,
        evals,
        converged,
        history,
    }
}

// ---------------------------------------------------------------------------
// Parameterizations

pub fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else {
        u.exp().ln_1p()
    }
}

fn softplus_inverse(v: f64) -> f64 {
    if v > 30.0 {
        v
    } else {
        v.exp_m1().ln()
    }
}

/// The 24 permutations of {0,1,2,3} in lexicographic order.
pub fn permutations4() -> Vec<Vec<usize>> {
    (0..4).permutations(4).collect()
}

fn normalized_softplus(u: &[f64], total: f64) -> Vec<f64> {
    let w: Vec<f64> = u.iter().map(|&v| softplus(v)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| total * v / s).collect()
}

/// Ω_4 point for parameters `u[0..24]`.
pub fn omega4_point(u: &[f64], perms: &[Vec<usize>]) -> Mat<f64> {
    birkhoff_combination(&normalized_softplus(&u[..perms.len()], 1.0), perms)
}

/// K_4 point for parameters `u[0..16]`.
pub fn k4_point(u: &[f64]) -> Mat<f64> {
    Mat::from_entries(4, normalized_softplus(u, 4.0)).expect("softplus entries are positive")
}

pub fn alpha_from(v: f64, interval: (f64, f64)) -> f64 {
    let (lo, hi) = interval;
    let s = v.sin();
    (lo + (hi - lo) * s * s).clamp(lo, hi)
}

fn random_start<R: Rng>(dim: usize, rng: &mut R, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Odd restarts start near a random face of the polytope: a few active
/// coordinates lifted above the rest. Even restarts use a dense start.
fn mixed_start<R: Rng>(index: usize, dim: usize, rng: &mut R) -> Vec<f64> {
    if index % 2 == 0 {
        return random_start(dim, rng, 2.0);
    }
    let active = rng.random_range(1..=4usize);
    let mut u = random_start(dim, rng, 0.5);
    for v in u.iter_mut() {
        *v -= 4.0;
    }
    for _ in 0..active {
        let k = rng.random_range(0..dim);
        u[k] += 8.0;
    }
    u
}

fn nm_options(cfg: &SearchConfig) -> NelderMeadOptions {
    NelderMeadOptions {
        max_evals: cfg.max_evals,
        tol_x: cfg.tol_x,
        tol_f: cfg.tol_f,
        initial_step: 0.5,
    }
}

fn aggregate(cfg: &SearchConfig, per_restart: Vec<RestartOutcome>, maximize: bool) -> SearchResult {
    let key = |r: &RestartOutcome| if maximize { -r.value } else { r.value };
    let best = per_restart
        .iter()
        .min_by(|a, b| key(a).total_cmp(&key(b)).then(a.seed.cmp(&b.seed)))
        .expect("at least one restart");
    SearchResult {
        domain: cfg.domain,
        interval: cfg.interval,
        best_value: best.value,
        best_alpha: best.alpha,
        best_matrix: best.matrix.clone(),
        best_restart: best.index,
        evals_used: per_restart.iter().map(|r| r.evals).sum(),
        budget_exhausted: per_restart.iter().all(|r| !r.converged),
        per_restart,
    }
}

fn uniform_distance(m: &Mat<f64>) -> f64 {
    m.max_abs_diff(&Mat::uniform(m.order()))
}

/// Runs `restart` for every index in parallel and aggregates in index order.
fn multistart(
    cfg: &SearchConfig,
    maximize: bool,
    restart: impl Fn(usize, u64) -> RestartOutcome + Sync,
) -> SearchResult {
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| restart(i, cfg.restart_seed(i)))
        .collect();
    aggregate(cfg, outcomes, maximize)
}

fn omega4_search(cfg: &SearchConfig, objective: impl Fn(&Mat<f64>, f64) -> f64 + Sync) -> SearchResult {
    let perms = permutations4();
    let interval = cfg.interval;
    let opts = nm_options(cfg);
    multistart(cfg, false, |index, seed| {
        let mut rng = seeded_rng(seed);
        let mut u0 = mixed_start(index, 24, &mut rng);
        // Starting α values are stratified over the interval.
        let frac = (index as f64 + rng.random_range(0.0..1.0)) / cfg.restarts as f64;
        u0.push(frac.sqrt().asin());
        let f = |u: &[f64]| objective(&omega4_point(u, &perms), alpha_from(u[24], interval));
        let out = nelder_mead(f, &u0, &opts);
        let matrix = omega4_point(&out.x, &perms);
        RestartOutcome {
            index,
            seed,
            value: out.value,
            alpha: Some(alpha_from(out.x[24], interval)),
            distance_to_uniform: uniform_distance(&matrix),
            matrix,
            evals: out.evals,
            converged: out.converged,
            trace: if cfg.trace { out.history } else { Vec::new() },
        }
    })
}

/// Minimizes the printed quartic over Ω_4 × [lo, hi].
pub fn minimize_quartic_paper(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate(SearchDomain::Omega4QuarticPaper)?;
    Ok(omega4_search(cfg, |a, alpha| {
        let f = quartic_features(a).expect("search points lie in Ω_4 by construction");
        quartic_paper_from_features(&f).eval(&alpha)
    }))
}

/// Minimizes `32·gap(A, α)` over Ω_4 × [lo, hi].
pub fn minimize_gap_true(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate(SearchDomain::Omega4GapTrue)?;
    Ok(omega4_search(cfg, |a, alpha| {
        32.0 * gap_direct(a, &alpha).expect("search points lie in Ω_4 by construction")
    }))
}

fn k4_restart(cfg: &SearchConfig, index: usize, seed: u64, u0: Vec<f64>) -> RestartOutcome {
    let out = nelder_mead(
        |u: &[f64]| -phi(&k4_point(u)).expect("search points lie in K_4 by construction"),
        &u0,
        &nm_options(cfg),
    );
    let matrix = k4_point(&out.x);
    let trace = if cfg.trace {
        out.history
            .iter()
            .map(|p| TracePoint { eval: p.eval, value: -p.value })
            .collect()
    } else {
        Vec::new()
    };
    RestartOutcome {
        index,
        seed,
        value: -out.value,
        alpha: None,
        distance_to_uniform: uniform_distance(&matrix),
        matrix,
        evals: out.evals,
        converged: out.converged,
        trace,
    }
}

/// Maximizes φ over K_4.
pub fn maximize_phi_k4(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate(SearchDomain::K4Phi)?;
    Ok(multistart(cfg, true, |index, seed| {
        let mut rng = seeded_rng(seed);
        let u0 = random_start(16, &mut rng, 2.0);
        k4_restart(cfg, index, seed, u0)
    }))
}

/// A single φ ascent started near `start` (entries below `floor` are lifted
/// to `floor` so the softplus parameterization can represent them).
pub fn maximize_phi_k4_from(cfg: &SearchConfig, start: &Mat<f64>, floor: f64) -> Result<RestartOutcome> {
    cfg.validate(SearchDomain::K4Phi)?;
    if start.order() != 4 || !start.is_nonnegative() {
        return Err(Error::domain("start must be a nonnegative 4x4 matrix"));
    }
    let u0 = start.entries().iter().map(|&v| softplus_inverse(v.max(floor))).collect();
    Ok(k4_restart(cfg, 0, cfg.seed, u0))
}

/// Minimum of `32·gap(A, α)` over α ∈ [lo, hi] for a fixed A, from `starts`
/// evenly spread one-dimensional searches.
pub fn minimize_gap_on_slice(a: &Mat<f64>, interval: (f64, f64), starts: usize) -> Result<(f64, f64)> {
    crate::matcore::require_doubly_stochastic(a, "minimize_gap_on_slice")?;
    let opts = NelderMeadOptions {
        max_evals: 2_000,
        tol_x: 1e-12,
        tol_f: 1e-15,
        initial_step: 0.1,
    };
    let mut best = (f64::INFINITY, interval.0);
    for k in 0..starts.max(1) {
        let v0 = FRAC_PI_2 * (k as f64 + 0.5) / starts.max(1) as f64;
        let out = nelder_mead(
            |v: &[f64]| 32.0 * gap_direct(a, &alpha_from(v[0], interval)).expect("validated"),
            &[v0],
            &opts,
        );
        if out.value < best.0 {
            best = (out.value, alpha_from(out.x[0], interval));
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Published minimum table

/// One row of the published minimum table for the printed quartic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub interval: (f64, f64),
    pub paper_alpha: f64,
    pub paper_min: f64,
}

pub const TABLE1: [Table1Row; 7] = [
    Table1Row { interval: (0.5, 1.0), paper_alpha: 0.5, paper_min: 0.1250 },
    Table1Row { interval: (0.4, 1.0), paper_alpha: 0.4, paper_min: -0.5472 },
    Table1Row { interval: (0.45, 1.0), paper_alpha: 0.45, paper_min: -0.2654 },
    Table1Row { interval: (0.48, 1.0), paper_alpha: 0.48, paper_min: -0.0452 },
    // The printed α lies outside its own interval; kept as printed.
    Table1Row { interval: (0.485, 1.0), paper_alpha: 0.45, paper_min: -0.0044 },
    Table1Row { interval: (0.486, 1.0), paper_alpha: 0.486, paper_min: 0.0039 },
    Table1Row { interval: (0.0, 1.0), paper_alpha: 0.2545, paper_min: -0.8675 },
];

pub const TABLE1_VALUE_TOL: f64 = 0.02;
pub const TABLE1_ALPHA_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Outcome {
    pub row: Table1Row,
    pub found_alpha: f64,
    pub found_min: f64,
    /// Minimum of `32·gap` over the same interval, for comparison.
    pub true_gap_min: f64,
    pub true_gap_alpha: f64,
    pub value_matches: bool,
    pub alpha_matches: bool,
    /// Found value lower than the published one by more than the tolerance.
    pub lower_than_published: bool,
    pub budget_exhausted: bool,
}

impl Table1Outcome {
    /// Matches within tolerance, or improves on the published value.
    pub fn passes(&self) -> bool {
        (self.value_matches && self.alpha_matches) || self.lower_than_published
    }
}

/// Width of the α slices searched separately for the true gap.
const GAP_SLICE: f64 = 0.2;

/// Minimum of `32·gap` over the configured interval, searched slice by slice
/// so that small-α regions get their own restarts.
fn sliced_gap_min(cfg: &SearchConfig) -> Result<(f64, f64)> {
    let (lo, hi) = cfg.interval;
    let pieces = (((hi - lo) / GAP_SLICE).ceil() as usize).max(1);
    let mut best = (f64::INFINITY, f64::NAN);
    for k in 0..pieces {
        let a = lo + (hi - lo) * k as f64 / pieces as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / pieces as f64;
        let mut c = cfg.clone();
        c.domain = SearchDomain::Omega4GapTrue;
        c.interval = (a, b);
        c.seed = cfg.seed.wrapping_add(k as u64);
        let r = minimize_gap_true(&c)?;
        if r.best_value < best.0 {
            best = (r.best_value, r.best_alpha.unwrap_or(f64::NAN));
        }
    }
    Ok(best)
}

/// Runs both searches for every row of the table.
pub fn table1(restarts: usize, seed: u64, max_evals: usize) -> Result<Vec<Table1Outcome>> {
    TABLE1
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let mut cfg = SearchConfig::new(SearchDomain::Omega4QuarticPaper, row.interval, restarts, seed.wrapping_add(k as u64));
            cfg.max_evals = max_evals;
            let printed = minimize_quartic_paper(&cfg)?;
            let truth = sliced_gap_min(&cfg)?;
            let found_alpha = printed.best_alpha.unwrap_or(f64::NAN);
            Ok(Table1Outcome {
                row: *row,
                found_alpha,
                found_min: printed.best_value,
                true_gap_min: truth.0,
                true_gap_alpha: truth.1,
                value_matches: (printed.best_value - row.paper_min).abs() <= TABLE1_VALUE_TOL,
                alpha_matches: (found_alpha - row.paper_alpha).abs() <= TABLE1_ALPHA_TOL,
                lower_than_published: printed.best_value < row.paper_min - TABLE1_VALUE_TOL,
                budget_exhausted: printed.budget_exhausted,
            })
        })
        .collect()
}

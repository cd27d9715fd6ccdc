//! Attack-cost accounting and a desk-scale Stern low-weight-codeword search.
//!
//! The closed-form side evaluates, entirely in the log2 domain:
//!
//! * the Stern information-set-decoding work factor
//!   `WF = Cost / P_success` with
//!   `Cost = (n-k)^2 (n+k) / 2  +  2 C(k/2,p) p l  +  2 p (n-k) C(k/2,p)^2 / 2^l`
//!   and `P = C(k/2,p)^2 C(n-k-l, w-2p) / C(n,w)`, plus an exhaustive grid
//!   search over `(p, l)`;
//! * brute-force counts of equivalent codes, scramblers and permutations;
//! * public/private key sizes.
//!
//! Odd `k`: the halves split as `floor(k/2)` / `ceil(k/2)`, so the collision
//! count `C(k/2,p)^2` becomes `C(floor,p) C(ceil,p)` and the enumeration term
//! `2 C(k/2,p)` becomes their sum. Even `k` reduces to the formulas above.
//!
//! The search side implements one honest Stern iteration on a generator
//! matrix: random column permutation, reduction to `[I | R]`, collision of
//! weight-`p` half-patterns on an `l`-bit window, weight test on survivors.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, Gf2Error, Permutation};

#[derive(Debug, Error, PartialEq)]
pub enum SecurityError {
    #[error("binomial coefficient undefined: k={k} > n={n}")]
    BinomialDomain { n: usize, k: usize },
    #[error("parameters must satisfy 0 < k < n")]
    BadCodeParams,
    #[error("infeasible Stern parameters (p={p}, l={ell}) for (n={n}, k={k}, w={w})")]
    InfeasibleParams {
        n: usize,
        k: usize,
        w: usize,
        p: usize,
        ell: usize,
    },
    #[error("no feasible point in the Stern parameter grid")]
    EmptyGrid,
    #[error("collision window of {0} bits exceeds the 128-bit limit")]
    WindowTooWide(usize),
    #[error("generator matrix is rank deficient")]
    RankDeficient,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Stern algorithm parameters: the per-half column weight `p` and the
/// collision window size `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SternParams {
    pub p: usize,
    pub ell: usize,
}

const LN_2: f64 = std::f64::consts::LN_2;

/// `log2 C(n, k)` via log-gamma; good to well over ten significant digits for
/// `n` up to a million.
pub fn log2_binomial(n: usize, k: usize) -> Result<f64, SecurityError> {
    if k > n {
        return Err(SecurityError::BinomialDomain { n, k });
    }
    let lg = |x: usize| libm::lgamma((x + 1) as f64);
    Ok((lg(n) - lg(k) - lg(n - k)) / LN_2)
}

/// `log2(2^a + 2^b)` without leaving the log domain.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + ((lo - hi) * LN_2).exp()).log2()
}

fn log2_sum(terms: &[f64]) -> f64 {
    terms
        .iter()
        .copied()
        .reduce(log2_add)
        .expect("at least one term")
}

fn split_halves(k: usize) -> (usize, usize) {
    (k / 2, k - k / 2)
}

/// Work factor (log2) of one full Stern attack at fixed `(p, l)`.
pub fn stern_workfactor(
    n: usize,
    k: usize,
    w: usize,
    params: &SternParams,
) -> Result<f64, SecurityError> {
    if k == 0 || k >= n {
        return Err(SecurityError::BadCodeParams);
    }
    let SternParams { p, ell } = *params;
    let infeasible = SecurityError::InfeasibleParams { n, k, w, p, ell };
    let (lo, hi) = split_halves(k);
    if 2 * p > w || ell > n - k || p > lo || n - k - ell < w - 2 * p {
        return Err(infeasible);
    }
    let c_lo = log2_binomial(lo, p)?;
    let c_hi = log2_binomial(hi, p)?;

    let elimination = -1.0 + 2.0 * ((n - k) as f64).log2() + ((n + k) as f64).log2();
    let mut cost_terms = vec![elimination];
    if p > 0 && ell > 0 {
        cost_terms.push(log2_add(c_lo, c_hi) + ((p * ell) as f64).log2());
    }
    if p > 0 {
        cost_terms.push(((2 * p * (n - k)) as f64).log2() + c_lo + c_hi - ell as f64);
    }
    let cost = log2_sum(&cost_terms);
    let success = c_lo + c_hi + log2_binomial(n - k - ell, w - 2 * p)? - log2_binomial(n, w)?;
    Ok(cost - success)
}

/// Exhaustive grid minimum of the work factor over
/// `0 <= p <= min(w/2, k/2)`, `0 <= l <= n-k`; ties break toward smaller `p`
/// then smaller `l`.
pub fn optimize_stern(n: usize, k: usize, w: usize) -> Result<(SternParams, f64), SecurityError> {
    if k == 0 || k >= n {
        return Err(SecurityError::BadCodeParams);
    }
    let mut best: Option<(SternParams, f64)> = None;
    for p in 0..=(w / 2).min(k / 2) {
        for ell in 0..=(n - k) {
            let params = SternParams { p, ell };
            let Ok(wf) = stern_workfactor(n, k, w, &params) else {
                continue;
            };
            if best.is_none_or(|(_, b)| wf < b) {
                best = Some((params, wf));
            }
        }
    }
    best.ok_or(SecurityError::EmptyGrid)
}

/// Brute-force counts (log2): equivalent codes `N_c = C(n,k)`, scramblers
/// `N_s = N_c`, and permutations `N_p = C(n,k) * (n-k)` — the last exactly as
/// the reference tables print the formula, which is inconsistent with their
/// own N_p column; see [`permutation_count_factorial_log2`] for the
/// `(n-k)!`-based variant.
pub fn count_equivalents(n: usize, k: usize) -> Result<(f64, f64, f64), SecurityError> {
    if k == 0 || k >= n {
        return Err(SecurityError::BadCodeParams);
    }
    let nc = log2_binomial(n, k)?;
    let np = nc + ((n - k) as f64).log2();
    Ok((nc, nc, np))
}

/// The permutation count with the second block counted as `(n-k)!`
/// bijections: `log2(C(n,k) * (n-k)!)`.
pub fn permutation_count_factorial_log2(n: usize, k: usize) -> Result<f64, SecurityError> {
    if k == 0 || k >= n {
        return Err(SecurityError::BadCodeParams);
    }
    Ok(log2_binomial(n, k)? + libm::lgamma((n - k + 1) as f64) / LN_2)
}

/// Key sizes: the public key needs `k(n-k)/8` bytes of `Q` payload; the
/// private-key bound is `ceil(log2 n) * (n-k)` bits for the frozen set plus
/// `n(n-k)` bits for the permutation.
pub fn key_sizes(n: usize, k: usize) -> Result<(f64, u64), SecurityError> {
    if k == 0 || k >= n {
        return Err(SecurityError::BadCodeParams);
    }
    let pub_bytes = (k as f64) * ((n - k) as f64) / 8.0;
    let ceil_log2 = (usize::BITS - (n - 1).leading_zeros()) as u64;
    let pri_bits = ceil_log2 * (n - k) as u64 + (n as u64) * (n - k) as u64;
    Ok((pub_bytes, pri_bits))
}

/// Everything the estimator knows about one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub n: usize,
    pub k: usize,
    pub omega: usize,
    /// Grid-optimal Stern work factor (log2) and where it is attained.
    pub wf_log2: f64,
    pub best: SternParams,
    pub nc_log2: f64,
    pub ns_log2: f64,
    pub np_log2: f64,
    pub m_pub_bytes: f64,
    pub m_pri_bits: u64,
}

impl SecurityReport {
    pub fn analyze(n: usize, k: usize, omega: usize) -> Result<Self, SecurityError> {
        let (best, wf_log2) = optimize_stern(n, k, omega)?;
        let (nc_log2, ns_log2, np_log2) = count_equivalents(n, k)?;
        let (m_pub_bytes, m_pri_bits) = key_sizes(n, k)?;
        Ok(SecurityReport {
            n,
            k,
            omega,
            wf_log2,
            best,
            nc_log2,
            ns_log2,
            np_log2,
            m_pub_bytes,
            m_pri_bits,
        })
    }
}

/// Decoding-attack cost: the intercepted word joins the generator as an extra
/// row, so the search runs on the `(n, k+1)` extended code at weight `t`.
pub fn message_recovery_wf(
    n: usize,
    k: usize,
    t: usize,
) -> Result<(SternParams, f64), SecurityError> {
    if k == 0 || k + 1 >= n {
        return Err(SecurityError::BadCodeParams);
    }
    optimize_stern(n, k + 1, t)
}

/// Runs Stern iterations until a codeword of weight at most `omega` appears
/// or `max_iters` iterations pass. A returned word is always a member of the
/// row space of `gen`; `None` is not a disproof of existence.
pub fn stern_search<R: Rng + ?Sized>(
    gen: &BitMatrix,
    omega: usize,
    params: &SternParams,
    rng: &mut R,
    max_iters: usize,
) -> Result<Option<BitVector>, SecurityError> {
    for _ in 0..max_iters {
        if let Some(word) = stern_search_iteration(gen, omega, params, rng)? {
            return Ok(Some(word));
        }
    }
    Ok(None)
}

/// One Stern iteration: permute columns, reduce to `[I | R]`, collide
/// weight-`p` patterns from the two information-set halves on the `l`-bit
/// window, and weight-test the collisions.
pub fn stern_search_iteration<R: Rng + ?Sized>(
    gen: &BitMatrix,
    omega: usize,
    params: &SternParams,
    rng: &mut R,
) -> Result<Option<BitVector>, SecurityError> {
    let k = gen.rows();
    let n = gen.cols();
    if k == 0 || k >= n {
        return Err(SecurityError::BadCodeParams);
    }
    if params.ell > n - k {
        return Err(SecurityError::InfeasibleParams {
            n,
            k,
            w: omega,
            p: params.p,
            ell: params.ell,
        });
    }
    if params.ell > 128 {
        return Err(SecurityError::WindowTooWide(params.ell));
    }
    if params.p == 0 {
        return Ok(None);
    }

    let colperm = Permutation::random(n, rng);
    let mut work = gen.permute_columns(&colperm, false)?;
    let pivots = work.row_reduce();
    if pivots.len() < k {
        return Err(SecurityError::RankDeficient);
    }
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let window: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).take(params.ell).collect();

    // each selected row contributes exactly its own pivot one inside the
    // information set, so a collision candidate has weight 2p there
    let sig_of_row = |r: usize| -> u128 {
        let mut sig = 0u128;
        for (b, &c) in window.iter().enumerate() {
            if work.get(r, c) {
                sig |= 1u128 << b;
            }
        }
        sig
    };

    let half = k / 2;
    let mut table: HashMap<u128, Vec<Vec<usize>>> = HashMap::new();
    let lo_rows: Vec<usize> = (0..half).collect();
    let hi_rows: Vec<usize> = (half..k).collect();

    for_each_combination(&lo_rows, params.p, |subset| {
        let sig = subset.iter().fold(0u128, |s, &r| s ^ sig_of_row(r));
        table.entry(sig).or_default().push(subset.to_vec());
        None::<()>
    });

    let hit = for_each_combination(&hi_rows, params.p, |subset| {
        let sig = subset.iter().fold(0u128, |s, &r| s ^ sig_of_row(r));
        let matches = table.get(&sig)?;
        for left in matches {
            let mut cand = BitVector::zeros(n);
            for &r in left.iter().chain(subset.iter()) {
                cand.xor_with(&work.row(r)).expect("row width");
            }
            if !cand.is_zero() && cand.weight() <= omega {
                return Some(cand);
            }
        }
        None
    });

    match hit {
        Some(cand) => Ok(Some(colperm.apply(&cand, true)?)),
        None => Ok(None),
    }
}

/// Calls `f` on every size-`p` subset of `base` until it returns `Some`.
fn for_each_combination<T>(
    base: &[usize],
    p: usize,
    mut f: impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    if p > base.len() {
        return None;
    }
    if p == 0 {
        return f(&[]);
    }
    let mut idx: Vec<usize> = (0..p).collect();
    let mut sel = vec![0usize; p];
    loop {
        for (s, &i) in sel.iter_mut().zip(&idx) {
            *s = base[i];
        }
        if let Some(out) = f(&sel) {
            return Some(out);
        }
        // lexicographic successor
        let mut i = p;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] != i + base.len() - p {
                idx[i] += 1;
                for j in i + 1..p {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

//! Polar-code construction over a design BEC, encoding, and successive
//! cancellation (SC) decoding.
//!
//! Construction follows the erasure-channel doubling recursion for the
//! per-sub-channel Bhattacharyya parameters: a length-`2l` profile is built
//! from a length-`l` profile as `2Z - Z^2` on the first half and `Z^2` on the
//! second half, starting from `Z_1 = eps`. The generator matrix convention is
//! the plain Kronecker power in natural order (no bit-reversal): it is lower
//! triangular with unit diagonal, so every principal submatrix is invertible,
//! which the key generator relies on. `Permutation::bit_reversal` is available
//! for cross-checks against the reversed-order convention.

use crate::gf2::{BitMatrix, BitVector, Gf2Error, Permutation};
use thiserror::Error;

/// Scaling exponent of the BEC, used by the cutoff-rate bound.
pub const BEC_SCALING_EXPONENT: f64 = 3.627;

#[derive(Debug, Error, PartialEq)]
pub enum PolarError {
    #[error("block length {0} must be a power of two")]
    InvalidBlockLength(usize),
    #[error("channel parameter {0} lies outside its open interval")]
    InvalidChannelParam(f64),
    #[error("index {index} out of range for block length {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate index {0} in information set")]
    DuplicateIndex(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("hard-decision LLRs need a BSC model; erasures carry no hard mark")]
    HardLlrNeedsBsc,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// The memoryless channel a code is designed for or decoded against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    /// Binary erasure channel with erasure probability in (0, 1).
    Bec { erasure: f64 },
    /// Binary symmetric channel with crossover probability in (0, 0.5).
    Bsc { crossover: f64 },
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<(), PolarError> {
        match *self {
            ChannelSpec::Bec { erasure } if erasure > 0.0 && erasure < 1.0 => Ok(()),
            ChannelSpec::Bsc { crossover } if crossover > 0.0 && crossover < 0.5 => Ok(()),
            ChannelSpec::Bec { erasure } => Err(PolarError::InvalidChannelParam(erasure)),
            ChannelSpec::Bsc { crossover } => Err(PolarError::InvalidChannelParam(crossover)),
        }
    }

    /// Channel capacity: `1 - eps` for the BEC, `1 - h2(p)` for the BSC.
    pub fn capacity(&self) -> f64 {
        match *self {
            ChannelSpec::Bec { erasure } => 1.0 - erasure,
            ChannelSpec::Bsc { crossover } => 1.0 - binary_entropy(crossover),
        }
    }
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Which sub-channels count as usable when drawing an information set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// Treat every sub-channel as good (noiseless-channel convention).
    All,
    /// Keep the `floor(n * R_0)` most reliable sub-channels.
    R0,
}

/// Reliability profile of the `n` synthesized sub-channels.
#[derive(Debug, Clone)]
pub struct CodeProfile {
    pub n: usize,
    /// Bhattacharyya parameter of sub-channel `i`, each in `[0, 1]`.
    pub z: Vec<f64>,
    /// Sorting permutation: `pi.map()[j]` is the index of the `j`-th most
    /// reliable sub-channel; ties break toward the lower index.
    pub pi: Permutation,
    /// Cutoff rate for this block length and design channel.
    pub r0: f64,
    pub mu: f64,
}

/// Builds the BEC reliability profile by the doubling recursion from `Z_1 = eps`.
pub fn bhattacharyya_profile(n: usize, eps: f64) -> Result<CodeProfile, PolarError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(PolarError::InvalidBlockLength(n));
    }
    ChannelSpec::Bec { erasure: eps }.validate()?;
    let mut z = vec![eps];
    while z.len() < n {
        let l = z.len();
        let mut next = Vec::with_capacity(2 * l);
        next.extend(z.iter().map(|&x| 2.0 * x - x * x));
        next.extend(z.iter().map(|&x| x * x));
        z = next;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap().then(a.cmp(&b)));
    let pi = Permutation::from_map(order).expect("sorted indices form a bijection");
    let mu = BEC_SCALING_EXPONENT;
    let r0 = cutoff_rate(n, &ChannelSpec::Bec { erasure: eps }, mu);
    Ok(CodeProfile { n, z, pi, r0, mu })
}

/// Largest rate reliably supported at block length `n`:
/// `R_0 = I(W) - n^(-1/mu)`, clamped to `[0, 1]`.
pub fn cutoff_rate(n: usize, channel: &ChannelSpec, mu: f64) -> f64 {
    let penalty = (n as f64).powf(-1.0 / mu);
    (channel.capacity() - penalty).clamp(0.0, 1.0)
}

/// Indices usable for information bits under the given policy, most reliable
/// first. `All` returns every index (in natural order).
pub fn good_set(profile: &CodeProfile, policy: SelectionPolicy) -> Vec<usize> {
    match policy {
        SelectionPolicy::All => (0..profile.n).collect(),
        SelectionPolicy::R0 => {
            let count = (profile.n as f64 * profile.r0).floor() as usize;
            profile.pi.map()[..count.min(profile.n)].to_vec()
        }
    }
}

/// An `(n, k)` polar code: an information/frozen partition of the rows of the
/// Kronecker-power matrix.
#[derive(Debug, Clone)]
pub struct PolarCode {
    pub n: usize,
    pub k: usize,
    /// Information indices, sorted ascending.
    pub info_set: Vec<usize>,
    /// Frozen indices, sorted ascending.
    pub frozen_set: Vec<usize>,
    /// The `k × n` generator: rows of the full matrix selected by `info_set`.
    pub gen: BitMatrix,
    /// The `(n-k) × n` frozen-row matrix.
    pub frozen_gen: BitMatrix,
}

impl PolarCode {
    /// Builds the code from an already materialized full `n × n` matrix.
    pub fn from_full_matrix(g_n: &BitMatrix, info_set: &[usize]) -> Result<Self, PolarError> {
        let n = g_n.rows();
        if n == 0 || !n.is_power_of_two() || g_n.cols() != n {
            return Err(PolarError::InvalidBlockLength(n));
        }
        let mut info: Vec<usize> = info_set.to_vec();
        info.sort_unstable();
        for (pos, &i) in info.iter().enumerate() {
            if i >= n {
                return Err(PolarError::IndexOutOfRange { index: i, size: n });
            }
            if pos > 0 && info[pos - 1] == i {
                return Err(PolarError::DuplicateIndex(i));
            }
        }
        let mut is_info = vec![false; n];
        for &i in &info {
            is_info[i] = true;
        }
        let frozen: Vec<usize> = (0..n).filter(|&i| !is_info[i]).collect();
        let all: Vec<usize> = (0..n).collect();
        let gen = g_n.submatrix(&info, &all)?;
        let frozen_gen = g_n.submatrix(&frozen, &all)?;
        Ok(PolarCode {
            n,
            k: info.len(),
            info_set: info,
            frozen_set: frozen,
            gen,
            frozen_gen,
        })
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// Builds an `(n, k)` code from the profile's block length and a chosen
/// information set (any distinct in-range indices).
pub fn build_code(profile: &CodeProfile, info_set: &[usize]) -> Result<PolarCode, PolarError> {
    let m = profile.n.trailing_zeros();
    let g_n = BitMatrix::kron_power(m)?;
    PolarCode::from_full_matrix(&g_n, info_set)
}

/// The bit-reversed-order full matrix `B_n · G_2^{⊗m}`, for cross-checks
/// against the other common convention. `B_n` commutes with the Kronecker
/// power, so this is the natural-order matrix with its rows (equivalently
/// columns) shuffled by bit reversal; it shares the natural encoder's
/// synthesized-channel profile.
pub fn reversed_order_matrix(m: u32) -> Result<BitMatrix, PolarError> {
    let n = 1usize << m;
    let g = BitMatrix::kron_power(m)?;
    let rev = Permutation::bit_reversal(n)?;
    // left-multiplying by the permutation matrix gathers row rev(i) into row i
    let rows: Vec<crate::gf2::BitVector> = rev.map().iter().map(|&i| g.row(i)).collect();
    Ok(BitMatrix::from_rows(&rows)?)
}

/// Parity check matrix `H` (`n × (n-k)`): the columns of the full matrix with
/// frozen indices. Codewords generated with an all-zero frozen subvector
/// satisfy `x · H = 0`.
pub fn build_parity_check(code: &PolarCode) -> Result<BitMatrix, PolarError> {
    let m = code.n.trailing_zeros();
    let g_n = BitMatrix::kron_power(m)?;
    let all: Vec<usize> = (0..code.n).collect();
    Ok(g_n.submatrix(&all, &code.frozen_set)?)
}

/// Encodes `x = u_A G_A + u_{A^c} G_{A^c}`; `info` bits land on `info_set`
/// positions in ascending order, `frozen` bits on `frozen_set` positions.
pub fn encode(
    code: &PolarCode,
    info: &BitVector,
    frozen: &BitVector,
) -> Result<BitVector, PolarError> {
    if info.len() != code.k {
        return Err(PolarError::LengthMismatch {
            expected: code.k,
            actual: info.len(),
        });
    }
    if frozen.len() != code.n - code.k {
        return Err(PolarError::LengthMismatch {
            expected: code.n - code.k,
            actual: frozen.len(),
        });
    }
    let mut x = info.matmul(&code.gen)?;
    if !frozen.is_zero() {
        x.xor_with(&frozen.matmul(&code.frozen_gen)?)?;
    }
    Ok(x)
}

/// Per-bit LLRs for a hard received word over a BSC: `ln((1-p)/p)` where the
/// bit is 0 and the negation where it is 1. The BEC is rejected — a hard word
/// has no way to mark erasures.
pub fn llr_from_hard(word: &BitVector, model: &ChannelSpec) -> Result<Vec<f64>, PolarError> {
    let crossover = match *model {
        ChannelSpec::Bsc { crossover } => crossover,
        ChannelSpec::Bec { .. } => return Err(PolarError::HardLlrNeedsBsc),
    };
    model.validate()?;
    let mag = ((1.0 - crossover) / crossover).ln();
    Ok((0..word.len())
        .map(|i| if word.get(i) { -mag } else { mag })
        .collect())
}

/// Successive cancellation decoding.
///
/// `llr` holds one log-likelihood ratio per code position (positive means the
/// transmitted bit is more likely 0; `±inf` marks a hard-known bit, `0` an
/// erasure). `frozen_values` supplies the frozen bits in ascending index
/// order. Returns the full estimated input vector `û` of length `n`: frozen
/// positions carry their given values, information positions the hard
/// decisions; a tie (LLR exactly zero) decides 0.
///
/// Runs in `O(n log n)` with per-call scratch, so concurrent calls are safe.
pub fn sc_decode(
    code: &PolarCode,
    llr: &[f64],
    frozen_values: &BitVector,
) -> Result<BitVector, PolarError> {
    if llr.len() != code.n {
        return Err(PolarError::LengthMismatch {
            expected: code.n,
            actual: llr.len(),
        });
    }
    if frozen_values.len() != code.n - code.k {
        return Err(PolarError::LengthMismatch {
            expected: code.n - code.k,
            actual: frozen_values.len(),
        });
    }
    let n = code.n;
    let mut frozen_of = vec![None; n];
    for (j, &i) in code.frozen_set.iter().enumerate() {
        frozen_of[i] = Some(frozen_values.get(j));
    }
    let mut u_hat = BitVector::zeros(n);
    let mut codeword = vec![false; n];
    let mut scratch = vec![0.0f64; n];
    sc_node(llr, &mut scratch, 0, &frozen_of, &mut u_hat, &mut codeword);
    Ok(u_hat)
}

/// Check-node combination (exact boxplus), split into two regimes so the
/// magnitude keeps full relative accuracy: repeated combining shrinks it
/// quadratically, and the min-plus-correction form would cancel the true
/// value below the rounding noise and scramble the sign.
fn llr_f(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let sign = if (a < 0.0) ^ (b < 0.0) { -1.0 } else { 1.0 };
    let amin = a.abs().min(b.abs());
    let amax = a.abs().max(b.abs());
    if amin.is_infinite() {
        return sign * f64::INFINITY;
    }
    if amin < 1.0 {
        // 2 atanh(tanh(x/2) tanh(y/2)); tanh of the larger side may saturate
        // to 1.0, which is the right limit. Underflow would erase the sign,
        // so pin the magnitude at the smallest normal instead.
        let mag = 2.0 * ((amin / 2.0).tanh() * (amax / 2.0).tanh()).atanh();
        return sign * if mag == 0.0 { f64::MIN_POSITIVE } else { mag };
    }
    sign * (amin + (-(amax + amin)).exp().ln_1p() - (amin - amax).exp().ln_1p())
}

/// Variable-node combination given the partial-sum bit from the sibling.
/// Two conflicting hard-known inputs cancel to an erasure.
fn llr_g(a: f64, b: f64, partial: bool) -> f64 {
    let out = if partial { b - a } else { b + a };
    if out.is_nan() {
        0.0
    } else {
        out
    }
}

fn sc_node(
    llr: &[f64],
    scratch: &mut [f64],
    base: usize,
    frozen_of: &[Option<bool>],
    u_hat: &mut BitVector,
    codeword: &mut [bool],
) {
    let size = llr.len();
    if size == 1 {
        let bit = match frozen_of[base] {
            Some(v) => v,
            None => llr[0] < 0.0,
        };
        u_hat.set(base, bit);
        codeword[0] = bit;
        return;
    }
    let half = size / 2;
    let (child, rest) = scratch.split_at_mut(half);
    for i in 0..half {
        child[i] = llr_f(llr[i], llr[i + half]);
    }
    sc_node(child, rest, base, frozen_of, u_hat, &mut codeword[..half]);
    for i in 0..half {
        child[i] = llr_g(llr[i], llr[i + half], codeword[i]);
    }
    {
        let (cw_left, cw_right) = codeword.split_at_mut(half);
        sc_node(child, rest, base + half, frozen_of, u_hat, cw_right);
        for i in 0..half {
            cw_left[i] ^= cw_right[i];
        }
    }
}

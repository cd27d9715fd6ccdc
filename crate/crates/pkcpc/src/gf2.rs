//! Bit-packed linear algebra over GF(2).
//!
//! Everything in the cryptosystem — codewords, keys, ciphertexts — lives in
//! the three types defined here. Bits are packed into `u64` limbs,
//! least-significant-bit first within each byte, so that serialized material
//! is bit-exact across platforms. All indices are 0-based.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

const WORD_BITS: usize = 64;

/// Largest supported Kronecker exponent; `kron_power` allocates `4^m` bits.
const MAX_KRON_EXPONENT: u32 = 15;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("index list must be strictly increasing")]
    NonMonotoneIndices,
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("permutation map is not a bijection")]
    NotBijective,
    #[error("requested size exceeds supported capacity ({0})")]
    CapacityExceeded(usize),
    #[error("padding bits beyond the logical length must be zero")]
    DirtyPadding,
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A row vector over GF(2). Padding bits beyond `len` are kept zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from 0/1 entries; any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            len,
            words: (0..words_for(len)).map(|_| rng.gen()).collect(),
        };
        v.mask_padding();
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_with(&mut self, other: &BitVector) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                left: self.len,
                right: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in 0..self.len {
            out.set(i, self.get(i));
        }
        for i in 0..other.len {
            out.set(self.len + i, other.get(i));
        }
        out
    }

    /// Gathers the bits at the given positions, in order.
    pub fn extract(&self, positions: &[usize]) -> Result<BitVector, Gf2Error> {
        let mut out = BitVector::zeros(positions.len());
        for (j, &i) in positions.iter().enumerate() {
            if i >= self.len {
                return Err(Gf2Error::IndexOutOfRange {
                    index: i,
                    size: self.len,
                });
            }
            out.set(j, self.get(i));
        }
        Ok(out)
    }

    /// Row-vector × matrix product over GF(2).
    pub fn matmul(&self, m: &BitMatrix) -> Result<BitVector, Gf2Error> {
        if self.len != m.rows {
            return Err(Gf2Error::DimensionMismatch {
                left: self.len,
                right: m.rows,
            });
        }
        let mut out = BitVector::zeros(m.cols);
        for i in self.iter_ones() {
            let src = m.row_words(i);
            for (dst, s) in out.words.iter_mut().zip(src) {
                *dst ^= s;
            }
        }
        Ok(out)
    }

    /// Serializes to `ceil(len/8)` bytes, LSB-first within each byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(nbytes);
        out
    }

    /// Parses `ceil(len/8)` bytes, LSB-first; rejects nonzero padding bits.
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<Self, Gf2Error> {
        let nbytes = len.div_ceil(8);
        if bytes.len() != nbytes {
            return Err(Gf2Error::DimensionMismatch {
                left: bytes.len(),
                right: nbytes,
            });
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        let v = Self { len, words };
        let mut masked = v.clone();
        masked.mask_padding();
        if masked.words != v.words {
            return Err(Gf2Error::DirtyPadding);
        }
        Ok(v)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    fn mask_padding(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2) with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row-major 0/1 entries (test and toy-example helper).
    pub fn from_bits(rows: usize, cols: usize, bits: &[u8]) -> Self {
        assert_eq!(bits.len(), rows * cols, "entry count must be rows*cols");
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if bits[r * cols + c] != 0 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: &[BitVector]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, BitVector::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            if v.len() != cols {
                return Err(Gf2Error::DimensionMismatch {
                    left: v.len(),
                    right: cols,
                });
            }
            m.row_words_mut(r).copy_from_slice(&v.words);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r},{c}) out of range"
        );
        (self.words[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r},{c}) out of range"
        );
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.words[r * self.stride + c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = if dst < src {
            let (lo, hi) = self.words.split_at_mut(src * self.stride);
            (
                &mut lo[dst * self.stride..dst * self.stride + self.stride],
                &hi[..self.stride],
            )
        } else {
            let (lo, hi) = self.words.split_at_mut(dst * self.stride);
            (
                &mut hi[..self.stride],
                &lo[src * self.stride..src * self.stride + self.stride],
            )
        };
        for (d, s) in a.iter_mut().zip(b) {
            *d ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.words.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// The m-th Kronecker power of `[[1,0],[1,1]]`: an `n×n` lower-triangular
    /// matrix with unit diagonal, `n = 2^m`. Entry `(i,j)` is one exactly when
    /// the bits of `j` are a subset of the bits of `i`.
    pub fn kron_power(m: u32) -> Result<Self, Gf2Error> {
        if m > MAX_KRON_EXPONENT {
            return Err(Gf2Error::CapacityExceeded(1usize << m));
        }
        let n = 1usize << m;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            // Walk the subsets of i; there are 2^popcount(i) of them.
            let mut s = i;
            loop {
                out.set(i, s, true);
                if s == 0 {
                    break;
                }
                s = (s - 1) & i;
            }
        }
        Ok(out)
    }

    /// GF(2) matrix product.
    pub fn matmul(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != rhs.rows {
            return Err(Gf2Error::DimensionMismatch {
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let j = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let src_base = j * rhs.stride;
                    let dst_base = r * out.stride;
                    for k in 0..rhs.stride {
                        out.words[dst_base + k] ^= rhs.words[src_base + k];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse over GF(2) by Gauss-Jordan elimination on `[A | I]`.
    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                left: self.rows,
                right: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for (w, &word) in self.row_words(r).iter().enumerate() {
                aug.words[r * aug.stride + w] = word;
            }
            aug.set(r, n + r, true);
        }
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| aug.get(r, col))
                .ok_or(Gf2Error::Singular)?;
            aug.swap_rows(pivot, col);
            for r in 0..n {
                if r != col && aug.get(r, col) {
                    aug.xor_rows(r, col);
                }
            }
        }
        let all: Vec<usize> = (0..n).collect();
        let right: Vec<usize> = (n..2 * n).collect();
        aug.submatrix(&all, &right)
    }

    /// In-place Gauss-Jordan reduction. Returns the pivot columns in order;
    /// afterwards row `r` is the unique row with a one in pivot column `r`.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        for col in 0..self.cols {
            let rank = pivots.len();
            if rank == self.rows {
                break;
            }
            if let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, col)) {
                self.swap_rows(pivot, rank);
                for r in 0..self.rows {
                    if r != rank && self.get(r, col) {
                        self.xor_rows(r, rank);
                    }
                }
                pivots.push(col);
            }
        }
        pivots
    }

    /// Rank over GF(2) (on a scratch copy).
    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Copies out the rows/columns selected by two strictly increasing index lists.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<BitMatrix, Gf2Error> {
        check_monotone(row_idx, self.rows)?;
        check_monotone(col_idx, self.cols)?;
        let mut out = BitMatrix::zeros(row_idx.len(), col_idx.len());
        for (ri, &r) in row_idx.iter().enumerate() {
            for (ci, &c) in col_idx.iter().enumerate() {
                if self.get(r, c) {
                    out.set(ri, ci, true);
                }
            }
        }
        Ok(out)
    }

    /// Right-multiplication by a permutation matrix, i.e. a column shuffle.
    pub fn permute_columns(&self, p: &Permutation, inverse: bool) -> Result<BitMatrix, Gf2Error> {
        if p.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                left: p.len(),
                right: self.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for j in 0..self.cols {
                if inverse {
                    if self.get(r, j) {
                        out.set(r, p.map[j], true);
                    }
                } else if self.get(r, p.map[j]) {
                    out.set(r, j, true);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check_monotone(idx: &[usize], bound: usize) -> Result<(), Gf2Error> {
    for (pos, &i) in idx.iter().enumerate() {
        if i >= bound {
            return Err(Gf2Error::IndexOutOfRange {
                index: i,
                size: bound,
            });
        }
        if pos > 0 && idx[pos - 1] >= i {
            return Err(Gf2Error::NonMonotoneIndices);
        }
    }
    Ok(())
}

/// A permutation of `{0, …, n-1}`, stored as an index array rather than a
/// dense matrix: `map[j]` is the source index of output position `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self, Gf2Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n || seen[i] {
                return Err(Gf2Error::NotBijective);
            }
            seen[i] = true;
        }
        Ok(Self { map })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Self { map }
    }

    /// The bit-reversal permutation: position `j` maps to the index whose
    /// `log2(n)`-bit binary representation is reversed.
    pub fn bit_reversal(n: usize) -> Result<Self, Gf2Error> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Gf2Error::NotPowerOfTwo(n));
        }
        let m = n.trailing_zeros();
        let map = (0..n).map(|j| reverse_bits(j, m)).collect();
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { map: inv }
    }

    /// `self` followed by `then`: `apply(compose, v) == apply(then, apply(self, v))`.
    pub fn compose(&self, then: &Permutation) -> Result<Permutation, Gf2Error> {
        if self.len() != then.len() {
            return Err(Gf2Error::DimensionMismatch {
                left: self.len(),
                right: then.len(),
            });
        }
        Ok(Permutation {
            map: then.map.iter().map(|&j| self.map[j]).collect(),
        })
    }

    /// Right-multiplies `v` by the permutation matrix (or by its inverse).
    /// Weight is preserved either way.
    pub fn apply(&self, v: &BitVector, inverse: bool) -> Result<BitVector, Gf2Error> {
        if v.len() != self.len() {
            return Err(Gf2Error::DimensionMismatch {
                left: v.len(),
                right: self.len(),
            });
        }
        let mut out = BitVector::zeros(v.len());
        for (j, &i) in self.map.iter().enumerate() {
            if inverse {
                if v.get(j) {
                    out.set(i, true);
                }
            } else if v.get(i) {
                out.set(j, true);
            }
        }
        Ok(out)
    }

    /// Materializes the dense matrix `P` with `v·P == apply(v, false)`.
    /// Only meant for tests and cross-checks.
    pub fn to_matrix(&self) -> BitMatrix {
        let n = self.map.len();
        let mut m = BitMatrix::zeros(n, n);
        for (j, &i) in self.map.iter().enumerate() {
            m.set(i, j, true);
        }
        m
    }
}

fn reverse_bits(x: usize, bits: u32) -> usize {
    let mut out = 0;
    for b in 0..bits {
        if x & (1 << b) != 0 {
            out |= 1 << (bits - 1 - b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn kron_power_small() {
        let g0 = BitMatrix::kron_power(0).unwrap();
        assert_eq!(g0, BitMatrix::from_bits(1, 1, &[1]));

        let g1 = BitMatrix::kron_power(1).unwrap();
        assert_eq!(g1, BitMatrix::from_bits(2, 2, &[1, 0, 1, 1]));

        let g2 = BitMatrix::kron_power(2).unwrap();
        #[rustfmt::skip]
        let expect = BitMatrix::from_bits(4, 4, &[
            1, 0, 0, 0,
            1, 1, 0, 0,
            1, 0, 1, 0,
            1, 1, 1, 1,
        ]);
        assert_eq!(g2, expect);
    }

    #[test]
    fn kron_power_capacity() {
        assert!(matches!(
            BitMatrix::kron_power(40),
            Err(Gf2Error::CapacityExceeded(_))
        ));
    }

    #[test]
    fn kron_power_involution_and_triangularity() {
        for m in 0..=12 {
            let g = BitMatrix::kron_power(m).unwrap();
            let n = g.rows();
            for i in 0..n {
                assert!(g.get(i, i), "unit diagonal at m={m}");
            }
            // lower triangular: no entry above the diagonal
            for i in 0..n {
                for j in (i + 1)..n {
                    assert!(!g.get(i, j), "entry above diagonal at m={m}");
                }
            }
            let prod = g.matmul(&g).unwrap();
            assert_eq!(prod, BitMatrix::identity(n), "involution fails at m={m}");
        }
    }

    #[test]
    fn matmul_examples() {
        let g2 = BitMatrix::kron_power(1).unwrap();
        assert_eq!(g2.matmul(&g2).unwrap(), BitMatrix::identity(2));

        let q = BitMatrix::from_bits(3, 2, &[1, 0, 0, 1, 1, 1]);
        assert_eq!(BitMatrix::identity(3).matmul(&q).unwrap(), q);

        let a = BitMatrix::from_bits(2, 3, &[1, 1, 0, 0, 1, 1]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn vec_mat_mul_examples() {
        let a = BitMatrix::from_bits(2, 4, &[1, 0, 1, 0, 0, 1, 0, 1]);
        let v = BitVector::from_bits(&[1, 1]);
        assert_eq!(v.matmul(&a).unwrap(), BitVector::from_bits(&[1, 1, 1, 1]));

        let zero = BitVector::zeros(2);
        assert!(zero.matmul(&a).unwrap().is_zero());

        // unit vector selects a row
        let mut e1 = BitVector::zeros(2);
        e1.set(1, true);
        assert_eq!(e1.matmul(&a).unwrap(), a.row(1));

        let bad = BitVector::zeros(3);
        assert!(bad.matmul(&a).is_err());
    }

    #[test]
    fn inverse_examples() {
        let i4 = BitMatrix::identity(4);
        assert_eq!(i4.inverse().unwrap(), i4);

        let g2 = BitMatrix::kron_power(1).unwrap();
        assert_eq!(g2.inverse().unwrap(), g2);

        let g8 = BitMatrix::kron_power(3).unwrap();
        let inv = g8.inverse().unwrap();
        assert_eq!(inv, g8, "kron power is self-inverse over GF(2)");
        assert_eq!(g8.matmul(&inv).unwrap(), BitMatrix::identity(8));

        let singular = BitMatrix::from_bits(2, 2, &[1, 1, 1, 1]);
        assert_eq!(singular.inverse(), Err(Gf2Error::Singular));
    }

    #[test]
    fn inverse_matches_rank_criterion() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for n in [3usize, 5, 8, 17, 33] {
            for _ in 0..50 {
                let mut m = BitMatrix::zeros(n, n);
                for r in 0..n {
                    for c in 0..n {
                        if rng.gen::<bool>() {
                            m.set(r, c, true);
                        }
                    }
                }
                let inv = m.inverse();
                if m.rank() == n {
                    let inv = inv.expect("full rank must invert");
                    assert_eq!(m.matmul(&inv).unwrap(), BitMatrix::identity(n));
                } else {
                    assert_eq!(inv, Err(Gf2Error::Singular));
                }
            }
        }
    }

    #[test]
    fn submatrix_examples() {
        let g2 = BitMatrix::kron_power(2).unwrap();
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(g2.submatrix(&all, &all).unwrap(), g2);

        // rows/cols {3,4} in 1-based indexing
        let sel = [2usize, 3];
        let sub = g2.submatrix(&sel, &sel).unwrap();
        assert_eq!(sub, BitMatrix::from_bits(2, 2, &[1, 0, 1, 1]));

        let single = g2.submatrix(&[1], &[0]).unwrap();
        assert_eq!(single, BitMatrix::from_bits(1, 1, &[1]));

        assert_eq!(
            g2.submatrix(&[1, 1], &[0]),
            Err(Gf2Error::NonMonotoneIndices)
        );
        assert_eq!(
            g2.submatrix(&[2, 1], &[0]),
            Err(Gf2Error::NonMonotoneIndices)
        );
        assert!(matches!(
            g2.submatrix(&[0, 9], &[0]),
            Err(Gf2Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn principal_submatrices_invertible() {
        // any same-index principal submatrix of a Kronecker power is invertible
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for m in 4..=10u32 {
            let n = 1usize << m;
            let g = BitMatrix::kron_power(m).unwrap();
            for _ in 0..500 {
                let size = rng.gen_range(1..=n);
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut rng);
                let mut sel: Vec<usize> = idx[..size].to_vec();
                sel.sort_unstable();
                let sub = g.submatrix(&sel, &sel).unwrap();
                assert!(
                    sub.inverse().is_ok(),
                    "singular principal submatrix at m={m}"
                );
            }
        }
    }

    #[test]
    fn bit_reversal_examples() {
        assert_eq!(Permutation::bit_reversal(2).unwrap().map(), &[0, 1]);
        assert_eq!(Permutation::bit_reversal(4).unwrap().map(), &[0, 2, 1, 3]);
        assert_eq!(
            Permutation::bit_reversal(8).unwrap().map(),
            &[0, 4, 2, 6, 1, 5, 3, 7]
        );
        assert_eq!(
            Permutation::bit_reversal(3),
            Err(Gf2Error::NotPowerOfTwo(3))
        );
    }

    #[test]
    fn permutation_apply_roundtrip_and_weight() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..100);
            let p = Permutation::random(n, &mut rng);
            let v = BitVector::random(n, &mut rng);
            let fwd = p.apply(&v, false).unwrap();
            assert_eq!(fwd.weight(), v.weight());
            let back = p.apply(&fwd, true).unwrap();
            assert_eq!(back, v);
        }
        let id = Permutation::identity(9);
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0, 0, 0, 1, 0]);
        assert_eq!(id.apply(&v, false).unwrap(), v);
    }

    #[test]
    fn permutation_matches_dense_matrix() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let p = Permutation::random(n, &mut rng);
            let v = BitVector::random(n, &mut rng);
            let dense = p.to_matrix();
            assert_eq!(p.apply(&v, false).unwrap(), v.matmul(&dense).unwrap());
            let inv_dense = p.inverse().to_matrix();
            assert_eq!(p.apply(&v, true).unwrap(), v.matmul(&inv_dense).unwrap());
            assert_eq!(dense.matmul(&inv_dense).unwrap(), BitMatrix::identity(n));
        }
    }

    #[test]
    fn permutation_composition_associative() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..50);
            let a = Permutation::random(n, &mut rng);
            let b = Permutation::random(n, &mut rng);
            let c = Permutation::random(n, &mut rng);
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert_eq!(left, right);
            let v = BitVector::random(n, &mut rng);
            let via_compose = left.apply(&v, false).unwrap();
            let step = c
                .apply(
                    &b.apply(&a.apply(&v, false).unwrap(), false).unwrap(),
                    false,
                )
                .unwrap();
            assert_eq!(via_compose, step);
        }
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert_eq!(
            Permutation::from_map(vec![0, 0, 2]),
            Err(Gf2Error::NotBijective)
        );
        assert_eq!(
            Permutation::from_map(vec![0, 3, 1]),
            Err(Gf2Error::NotBijective)
        );
    }

    #[test]
    fn column_permutation_consistent_with_vector_apply() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..50 {
            let rows = rng.gen_range(1..10);
            let cols = rng.gen_range(1..40);
            let mut m = BitMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen::<bool>() {
                        m.set(r, c, true);
                    }
                }
            }
            let p = Permutation::random(cols, &mut rng);
            let fwd = m.permute_columns(&p, false).unwrap();
            let back = fwd.permute_columns(&p, true).unwrap();
            assert_eq!(back, m);
            for r in 0..rows {
                assert_eq!(fwd.row(r), p.apply(&m.row(r), false).unwrap());
            }
        }
    }

    #[test]
    fn byte_roundtrip_lsb_first() {
        let v = BitVector::from_bits(&[1, 0, 0, 0, 0, 0, 0, 0, 1, 1]);
        assert_eq!(v.to_bytes(), vec![0x01, 0x03]);
        let back = BitVector::from_bytes(10, &v.to_bytes()).unwrap();
        assert_eq!(back, v);
        // dirty padding rejected
        assert_eq!(
            BitVector::from_bytes(10, &[0x01, 0xFF]),
            Err(Gf2Error::DirtyPadding)
        );
        assert!(BitVector::from_bytes(10, &[0x01]).is_err());
    }

    #[test]
    fn extract_and_concat() {
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0]);
        let picked = v.extract(&[2, 0, 4]).unwrap();
        assert_eq!(picked, BitVector::from_bits(&[1, 1, 0]));
        assert!(v.extract(&[9]).is_err());
        let w = BitVector::from_bits(&[0, 1]);
        assert_eq!(v.concat(&w), BitVector::from_bits(&[1, 0, 1, 1, 0, 0, 1]));
    }
}

//! Key generation and the fixed on-disk key formats.
//!
//! A key pair hides which `k` of the `n` synthesized sub-channels carry
//! message bits. The secret information set `A(s)` is drawn uniformly from
//! the good sub-channels; the scrambler `S` is the principal submatrix of the
//! Kronecker-power matrix at those indices (invertible because the matrix is
//! lower triangular with unit diagonal), and the permutation `P` pins its
//! first `k` columns to `A(s)` in ascending order so that `G_{A(s)} P`
//! splits as `[S | G''']`. Publishing `Q = S^{-1} G'''` then gives the
//! systematic encryption matrix `[I_k | Q]` at a storage cost of `k(n-k)`
//! bits; only `Q` is ever written out.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, Gf2Error, Permutation};
use crate::polar::{bhattacharyya_profile, good_set, PolarCode, PolarError, SelectionPolicy};

pub const PUBLIC_MAGIC: &[u8; 4] = b"PKPC";
pub const PRIVATE_MAGIC: &[u8; 4] = b"PKPS";
pub const FORMAT_VERSION: u8 = 0x01;

/// Index fields are 16-bit on disk, so block lengths stop at `2^16`.
const MAX_M: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum PkcError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("good sub-channel set has {available} entries but the key needs {needed}")]
    GoodSetTooSmall { available: usize, needed: usize },
    #[error("error vector weight {weight} exceeds the bound {bound}")]
    WeightExceedsBound { weight: usize, bound: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("decoding failed: re-encoded word differs from the ciphertext in {distance} > {bound} positions")]
    DecodeFailure { distance: usize, bound: usize },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0:#04x}")]
    BadVersion(u8),
    #[error("key data truncated")]
    Truncated,
    #[error("trailing bytes after key payload")]
    TrailingBytes,
    #[error("invalid key data: {0}")]
    InvalidKeyData(String),
    #[error("internal consistency check failed: {0}")]
    SelfCheck(&'static str),
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Default bound on the intentional error weight: `floor(2*sqrt(n) - 1)`.
pub fn weight_bound(n: usize) -> usize {
    (2.0 * (n as f64).sqrt() - 1.0).floor() as usize
}

/// Default BSC crossover used to form decryption LLRs: `t/n`, kept inside the
/// open interval the decoder accepts.
pub fn default_decode_p(t: usize, n: usize) -> f64 {
    (t as f64 / n as f64).clamp(1e-3, 0.4999)
}

/// Everything a key pair is generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Block-length exponent, `n = 2^m`.
    pub m: u32,
    /// Code dimension (message bits per block).
    pub k: usize,
    /// Design erasure probability for the reliability profile.
    pub design_eps: f64,
    /// Which sub-channels may enter the secret information set.
    pub policy: SelectionPolicy,
    /// Maximum intentional error weight accepted by `encrypt`.
    pub t: usize,
    /// BSC crossover assumed when turning a ciphertext into LLRs.
    pub decode_p: f64,
    /// Seed material for deterministic key generation.
    pub seed: u64,
}

impl SystemParams {
    /// Parameters with the defaults: design BEC(0.5), every sub-channel good,
    /// `t = floor(2*sqrt(n) - 1)` and `decode_p = t/n`.
    pub fn new(m: u32, k: usize, seed: u64) -> Result<Self, PkcError> {
        let n = 1usize
            .checked_shl(m)
            .filter(|_| (1..=MAX_M).contains(&m))
            .ok_or_else(|| PkcError::InvalidParams(format!("m={m} outside 1..={MAX_M}")))?;
        let t = weight_bound(n);
        let params = SystemParams {
            m,
            k,
            design_eps: 0.5,
            policy: SelectionPolicy::All,
            t,
            decode_p: default_decode_p(t, n),
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_policy(
        mut self,
        policy: SelectionPolicy,
        design_eps: f64,
    ) -> Result<Self, PkcError> {
        self.policy = policy;
        self.design_eps = design_eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_error_weight(mut self, t: usize) -> Result<Self, PkcError> {
        self.t = t;
        self.decode_p = default_decode_p(t, self.n());
        self.validate()?;
        Ok(self)
    }

    pub fn with_decode_p(mut self, decode_p: f64) -> Result<Self, PkcError> {
        self.decode_p = decode_p;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), PkcError> {
        if !(1..=MAX_M).contains(&self.m) {
            return Err(PkcError::InvalidParams(format!(
                "m={} outside 1..={MAX_M}",
                self.m
            )));
        }
        let n = self.n();
        if self.k == 0 || self.k >= n {
            return Err(PkcError::InvalidParams(format!(
                "k={} must satisfy 0 < k < n={n}",
                self.k
            )));
        }
        if self.t > weight_bound(n) {
            return Err(PkcError::InvalidParams(format!(
                "t={} exceeds the weight bound {}",
                self.t,
                weight_bound(n)
            )));
        }
        if !(self.design_eps > 0.0 && self.design_eps < 1.0) {
            return Err(PkcError::InvalidParams(format!(
                "design_eps={} outside (0,1)",
                self.design_eps
            )));
        }
        if !(self.decode_p > 0.0 && self.decode_p < 0.5) {
            return Err(PkcError::InvalidParams(format!(
                "decode_p={} outside (0,0.5)",
                self.decode_p
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    /// Deterministic generator stream for this parameter set.
    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }
}

/// The secret key: the frozen complement of `A(s)` plus the permutation,
/// with the derived material (`A(s)`, `S`, `S^{-1}`, `G_{A(s)}`) cached.
#[derive(Debug, Clone)]
pub struct PrivateKey {
    params: SystemParams,
    frozen_secret: Vec<usize>,
    perm: Permutation,
    code: PolarCode,
    scrambler: BitMatrix,
    scrambler_inv: BitMatrix,
}

impl PrivateKey {
    /// Rebuilds a key from its stored parts, validating every invariant:
    /// the frozen indices must be strictly ascending and in range, the
    /// permutation a bijection whose first `k` columns pin `A(s)` in
    /// ascending order.
    pub fn from_parts(
        params: SystemParams,
        frozen_secret: Vec<usize>,
        perm: Permutation,
    ) -> Result<Self, PkcError> {
        params.validate()?;
        let n = params.n();
        let k = params.k;
        if frozen_secret.len() != n - k {
            return Err(PkcError::InvalidKeyData(format!(
                "expected {} frozen indices, got {}",
                n - k,
                frozen_secret.len()
            )));
        }
        let mut seen = vec![false; n];
        for (pos, &i) in frozen_secret.iter().enumerate() {
            if i >= n {
                return Err(PkcError::InvalidKeyData(format!(
                    "frozen index {i} out of range"
                )));
            }
            if pos > 0 && frozen_secret[pos - 1] >= i {
                return Err(PkcError::InvalidKeyData(
                    "frozen indices must be strictly ascending".into(),
                ));
            }
            seen[i] = true;
        }
        let info_secret: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
        if perm.len() != n {
            return Err(PkcError::InvalidKeyData(format!(
                "permutation length {} does not match n={n}",
                perm.len()
            )));
        }
        if perm.map()[..k] != info_secret[..] {
            return Err(PkcError::InvalidKeyData(
                "permutation does not pin the information set in ascending order".into(),
            ));
        }
        let g_n = BitMatrix::kron_power(params.m)?;
        let code = PolarCode::from_full_matrix(&g_n, &info_secret)?;
        let scrambler = g_n.submatrix(&info_secret, &info_secret)?;
        let scrambler_inv = scrambler.inverse().map_err(|_| {
            PkcError::SelfCheck("principal submatrix of the Kronecker power must be invertible")
        })?;
        Ok(PrivateKey {
            params,
            frozen_secret,
            perm,
            code,
            scrambler,
            scrambler_inv,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// `A^c(s)`, ascending.
    pub fn frozen_secret(&self) -> &[usize] {
        &self.frozen_secret
    }

    /// `A(s)`, ascending.
    pub fn info_secret(&self) -> &[usize] {
        &self.code.info_set
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// The scrambler `S = (G_n)_{A(s)A(s)}`.
    pub fn scrambler(&self) -> &BitMatrix {
        &self.scrambler
    }

    pub fn scrambler_inv(&self) -> &BitMatrix {
        &self.scrambler_inv
    }

    /// The secret polar code (generator rows `G_{A(s)}` and the frozen rest).
    pub fn code(&self) -> &PolarCode {
        &self.code
    }

    /// Replaces the decode-side parameters; useful after loading a key file,
    /// which stores neither `t` nor `decode_p`.
    pub fn with_decode_overrides(
        mut self,
        t: Option<usize>,
        decode_p: Option<f64>,
    ) -> Result<Self, PkcError> {
        if let Some(t) = t {
            self.params.t = t;
            if decode_p.is_none() {
                self.params.decode_p = default_decode_p(t, self.params.n());
            }
        }
        if let Some(p) = decode_p {
            self.params.decode_p = p;
        }
        self.params.validate()?;
        Ok(self)
    }
}

/// The public key: `(n, k, t)` and the `k × (n-k)` submatrix `Q`. The implied
/// encryption matrix `[I_k | Q]` is never stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicKey {
    n: usize,
    k: usize,
    t: usize,
    q: BitMatrix,
}

impl PublicKey {
    /// Derives the public key and runs the systematic self-check
    /// `S^{-1} G_{A(s)} P == [I_k | Q]`.
    pub fn from_private(sk: &PrivateKey) -> Result<Self, PkcError> {
        let n = sk.params.n();
        let k = sk.params.k;
        // G'' = G_{A(s)} P splits as [S | G''']
        let g2 = sk.code.gen.permute_columns(&sk.perm, false)?;
        let left: Vec<usize> = (0..k).collect();
        let right: Vec<usize> = (k..n).collect();
        let rows: Vec<usize> = (0..k).collect();
        if g2.submatrix(&rows, &left)? != sk.scrambler {
            return Err(PkcError::SelfCheck(
                "pinned columns of G'' must equal the scrambler",
            ));
        }
        let g3 = g2.submatrix(&rows, &right)?;
        let q = sk.scrambler_inv.matmul(&g3)?;
        let encryption = sk.scrambler_inv.matmul(&g2)?;
        if encryption.submatrix(&rows, &left)? != BitMatrix::identity(k)
            || encryption.submatrix(&rows, &right)? != q
        {
            return Err(PkcError::SelfCheck("encryption matrix is not [I | Q]"));
        }
        Ok(PublicKey {
            n,
            k,
            t: sk.params.t,
            q,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn q(&self) -> &BitMatrix {
        &self.q
    }
}

/// Samples the secret information set and permutation, then derives both
/// keys. `A(s)` is `k` indices drawn uniformly without replacement from the
/// good set; `P` pins column `j < k` to row `A(s)[j]` and scatters the
/// remaining rows over the last `n-k` columns by a uniform bijection.
pub fn keygen<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey), PkcError> {
    params.validate()?;
    let n = params.n();
    let k = params.k;
    let profile = bhattacharyya_profile(n, params.design_eps)?;
    let good = good_set(&profile, params.policy);
    if good.len() < k {
        return Err(PkcError::GoodSetTooSmall {
            available: good.len(),
            needed: k,
        });
    }
    let mut info: Vec<usize> = rand::seq::index::sample(rng, good.len(), k)
        .iter()
        .map(|i| good[i])
        .collect();
    info.sort_unstable();

    let mut in_info = vec![false; n];
    for &i in &info {
        in_info[i] = true;
    }
    let mut rest: Vec<usize> = (0..n).filter(|&i| !in_info[i]).collect();
    let frozen = rest.clone();
    rest.shuffle(rng);

    let mut map = info.clone();
    map.extend(rest);
    let perm = Permutation::from_map(map)?;

    let sk = PrivateKey::from_parts(params.clone(), frozen, perm)?;
    let pk = PublicKey::from_private(&sk)?;
    Ok((pk, sk))
}

/// Deterministic key generation from `params.seed`.
pub fn keygen_from_seed(params: &SystemParams) -> Result<(PublicKey, PrivateKey), PkcError> {
    let mut rng = params.rng();
    keygen(params, &mut rng)
}

/// Public key file: magic `PKPC`, version byte, `m` (1 byte), `k` (u32 LE),
/// `t` (u16 LE), then `Q` row-major with each row padded to whole bytes,
/// LSB-first.
pub fn serialize_public(pk: &PublicKey) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(PUBLIC_MAGIC);
    out.push(FORMAT_VERSION);
    out.push(pk.n.trailing_zeros() as u8);
    out.extend_from_slice(&(pk.k as u32).to_le_bytes());
    out.extend_from_slice(&(pk.t as u16).to_le_bytes());
    for r in 0..pk.q.rows() {
        out.extend_from_slice(&pk.q.row(r).to_bytes());
    }
    out
}

pub fn deserialize_public(bytes: &[u8]) -> Result<PublicKey, PkcError> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != PUBLIC_MAGIC {
        return Err(PkcError::BadMagic);
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(PkcError::BadVersion(version));
    }
    let m = r.u8()? as u32;
    let k = r.u32()? as usize;
    let t = r.u16()? as usize;
    if !(1..=MAX_M).contains(&m) {
        return Err(PkcError::InvalidKeyData(format!("m={m} out of range")));
    }
    let n = 1usize << m;
    if k == 0 || k >= n {
        return Err(PkcError::InvalidKeyData(format!(
            "k={k} out of range for n={n}"
        )));
    }
    let row_bytes = (n - k).div_ceil(8);
    let mut q = BitMatrix::zeros(k, n - k);
    for row in 0..k {
        let raw = r.take(row_bytes)?;
        let bits = crate::gf2::BitVector::from_bytes(n - k, raw)
            .map_err(|e| PkcError::InvalidKeyData(e.to_string()))?;
        for c in bits.iter_ones() {
            q.set(row, c, true);
        }
    }
    r.finish()?;
    Ok(PublicKey { n, k, t, q })
}

/// Private key file: magic `PKPS`, version byte, `m` (1 byte), `k` (u32 LE),
/// the `n-k` indices of `A^c(s)` as u16 LE ascending, then the `n` u16 LE
/// entries of the permutation index array (entry `j` = row of the one in
/// column `j`). The scrambler and generator are recomputed on load.
pub fn serialize_private(sk: &PrivateKey) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(PRIVATE_MAGIC);
    out.push(FORMAT_VERSION);
    out.push(sk.params.m as u8);
    out.extend_from_slice(&(sk.params.k as u32).to_le_bytes());
    for &i in &sk.frozen_secret {
        out.extend_from_slice(&(i as u16).to_le_bytes());
    }
    for &i in sk.perm.map() {
        out.extend_from_slice(&(i as u16).to_le_bytes());
    }
    out
}

/// Parses a private key file. The format stores neither `t` nor `decode_p`;
/// both come back as their defaults and can be replaced with
/// [`PrivateKey::with_decode_overrides`].
pub fn deserialize_private(bytes: &[u8]) -> Result<PrivateKey, PkcError> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != PRIVATE_MAGIC {
        return Err(PkcError::BadMagic);
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(PkcError::BadVersion(version));
    }
    let m = r.u8()? as u32;
    let k = r.u32()? as usize;
    if !(1..=MAX_M).contains(&m) {
        return Err(PkcError::InvalidKeyData(format!("m={m} out of range")));
    }
    let n = 1usize << m;
    if k == 0 || k >= n {
        return Err(PkcError::InvalidKeyData(format!(
            "k={k} out of range for n={n}"
        )));
    }
    let mut frozen = Vec::with_capacity(n - k);
    for _ in 0..n - k {
        frozen.push(r.u16()? as usize);
    }
    let mut map = Vec::with_capacity(n);
    for _ in 0..n {
        map.push(r.u16()? as usize);
    }
    r.finish()?;
    let perm = Permutation::from_map(map)
        .map_err(|_| PkcError::InvalidKeyData("permutation entries are not a bijection".into()))?;
    let params = SystemParams::new(m, k, 0)?;
    PrivateKey::from_parts(params, frozen, perm)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], PkcError> {
        if self.pos + n > self.bytes.len() {
            return Err(PkcError::Truncated);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, PkcError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, PkcError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, PkcError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<(), PkcError> {
        if self.pos != self.bytes.len() {
            return Err(PkcError::TrailingBytes);
        }
        Ok(())
    }
}

//! Encryption with intentional errors and SC-based decryption.
//!
//! Encryption is a systematic product: `c = [m | mQ] + e` with
//! `w_H(e) <= t`. Decryption undoes the permutation, forms BSC LLRs for the
//! resulting noisy codeword, runs successive cancellation with the secret
//! frozen set pinned to zero, and unscrambles the decoded information bits
//! with `S`. A re-encode pass flags decode failures: if the recovered message
//! re-encrypts to something further than `t` from the ciphertext, the call
//! errors instead of returning garbage.

use rand::Rng;

use crate::gf2::BitVector;
use crate::keys::{PkcError, PrivateKey, PublicKey};
use crate::polar::{encode, llr_from_hard, sc_decode, ChannelSpec};

/// An encrypted block; always exactly `n` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    body: BitVector,
}

impl Ciphertext {
    pub fn from_vector(body: BitVector) -> Self {
        Self { body }
    }

    pub fn body(&self) -> &BitVector {
        &self.body
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Raw wire form: `ceil(n/8)` bytes, LSB-first.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.body.to_bytes()
    }

    pub fn from_bytes(n: usize, bytes: &[u8]) -> Result<Self, PkcError> {
        Ok(Self {
            body: BitVector::from_bytes(n, bytes)?,
        })
    }
}

/// A uniformly random vector of exact weight `w`.
pub fn error_sample<R: Rng + ?Sized>(
    n: usize,
    w: usize,
    rng: &mut R,
) -> Result<BitVector, PkcError> {
    if w > n {
        return Err(PkcError::WeightExceedsBound {
            weight: w,
            bound: n,
        });
    }
    let mut e = BitVector::zeros(n);
    for i in rand::seq::index::sample(rng, n, w) {
        e.set(i, true);
    }
    Ok(e)
}

/// `c = [m | mQ] + e` for a caller-supplied error vector.
pub fn encrypt_with_error(
    pk: &PublicKey,
    message: &BitVector,
    error: &BitVector,
) -> Result<Ciphertext, PkcError> {
    if message.len() != pk.k() {
        return Err(PkcError::LengthMismatch {
            expected: pk.k(),
            actual: message.len(),
        });
    }
    if error.len() != pk.n() {
        return Err(PkcError::LengthMismatch {
            expected: pk.n(),
            actual: error.len(),
        });
    }
    let weight = error.weight();
    if weight > pk.t() {
        return Err(PkcError::WeightExceedsBound {
            weight,
            bound: pk.t(),
        });
    }
    let mut body = message.concat(&message.matmul(pk.q())?);
    body.xor_with(error)?;
    Ok(Ciphertext { body })
}

/// Encrypts with a freshly sampled error of exact weight `w`.
pub fn encrypt<R: Rng + ?Sized>(
    pk: &PublicKey,
    message: &BitVector,
    w: usize,
    rng: &mut R,
) -> Result<Ciphertext, PkcError> {
    if w > pk.t() {
        return Err(PkcError::WeightExceedsBound {
            weight: w,
            bound: pk.t(),
        });
    }
    let e = error_sample(pk.n(), w, rng)?;
    encrypt_with_error(pk, message, &e)
}

/// Recovers the message: `c' = c P^{-1}`, SC decode with `A^c(s)` frozen to
/// zero, then `m = û_{A(s)} S`. With a zero error vector the result equals
/// the encrypted message exactly.
pub fn decrypt(sk: &PrivateKey, ct: &Ciphertext) -> Result<BitVector, PkcError> {
    let params = sk.params();
    let n = params.n();
    if ct.len() != n {
        return Err(PkcError::LengthMismatch {
            expected: n,
            actual: ct.len(),
        });
    }
    let c_prime = sk.perm().apply(ct.body(), true)?;
    let llr = llr_from_hard(
        &c_prime,
        &ChannelSpec::Bsc {
            crossover: params.decode_p,
        },
    )?;
    let zero_frozen = BitVector::zeros(n - params.k);
    let u_hat = sc_decode(sk.code(), &llr, &zero_frozen)?;
    let info_bits = u_hat.extract(sk.info_secret())?;
    let message = info_bits.matmul(sk.scrambler())?;

    // re-encode sanity check: the decoded word must sit within t of c
    let x_hat = encode(sk.code(), &info_bits, &zero_frozen)?;
    let mut diff = sk.perm().apply(&x_hat, false)?;
    diff.xor_with(ct.body())?;
    let distance = diff.weight();
    if distance > params.t {
        return Err(PkcError::DecodeFailure {
            distance,
            bound: params.t,
        });
    }
    Ok(message)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::Permutation;
    use crate::keys::{keygen_from_seed, PrivateKey, PublicKey, SystemParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_key() -> (PublicKey, PrivateKey) {
        let params = SystemParams::new(2, 2, 0)
            .unwrap()
            .with_decode_p(0.25)
            .unwrap();
        let perm = Permutation::from_map(vec![2, 3, 0, 1]).unwrap();
        let sk = PrivateKey::from_parts(params, vec![0, 1], perm).unwrap();
        let pk = PublicKey::from_private(&sk).unwrap();
        (pk, sk)
    }

    #[test]
    fn toy_encrypt_decrypt() {
        let (pk, sk) = toy_key();
        let m = BitVector::from_bits(&[1, 1]);
        let ct = encrypt_with_error(&pk, &m, &BitVector::zeros(4)).unwrap();
        assert_eq!(ct.body(), &BitVector::from_bits(&[1, 1, 1, 1]));
        let back = decrypt(&sk, &ct).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn error_sample_edges() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(error_sample(16, 0, &mut rng).unwrap().is_zero());
        assert_eq!(error_sample(16, 16, &mut rng).unwrap().weight(), 16);
        assert!(error_sample(16, 17, &mut rng).is_err());
        for w in [1usize, 5, 9] {
            assert_eq!(error_sample(33, w, &mut rng).unwrap().weight(), w);
        }
    }

    #[test]
    fn error_sample_is_uniform_per_position() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let n = 32;
        let w = 5;
        let draws = 10_000;
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            let e = error_sample(n, w, &mut rng).unwrap();
            for i in e.iter_ones() {
                counts[i] += 1;
            }
        }
        let q = w as f64 / n as f64;
        let sigma = (q * (1.0 - q) / draws as f64).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - q).abs() <= 3.0 * sigma,
                "position {i}: freq {freq} vs expected {q} (3 sigma = {})",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn encrypt_zero_error_is_systematic() {
        let params = SystemParams::new(6, 48, 42).unwrap();
        let (pk, _) = keygen_from_seed(&params).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let m = BitVector::random(48, &mut rng);
        let ct = encrypt_with_error(&pk, &m, &BitVector::zeros(64)).unwrap();
        let expected = m.concat(&m.matmul(pk.q()).unwrap());
        assert_eq!(ct.body(), &expected);
    }

    #[test]
    fn encrypt_error_bookkeeping() {
        let params = SystemParams::new(6, 48, 42).unwrap();
        let (pk, _) = keygen_from_seed(&params).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let m = BitVector::random(48, &mut rng);
        let t = pk.t();
        let e = error_sample(64, t, &mut rng).unwrap();
        let ct = encrypt_with_error(&pk, &m, &e).unwrap();
        let mut diff = ct.body().clone();
        diff.xor_with(&m.concat(&m.matmul(pk.q()).unwrap()))
            .unwrap();
        assert_eq!(diff.weight(), t);

        let heavy = error_sample(64, t + 1, &mut rng).unwrap();
        assert!(matches!(
            encrypt_with_error(&pk, &m, &heavy),
            Err(PkcError::WeightExceedsBound { .. })
        ));
        assert!(matches!(
            encrypt(&pk, &m, t + 1, &mut rng),
            Err(PkcError::WeightExceedsBound { .. })
        ));
        assert!(encrypt(&pk, &BitVector::zeros(47), 0, &mut rng).is_err());
    }

    #[test]
    fn roundtrip_without_errors() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for (m, k) in [(4u32, 12usize), (6, 48), (8, 192)] {
            let params = SystemParams::new(m, k, 1000 + m as u64).unwrap();
            let (pk, sk) = keygen_from_seed(&params).unwrap();
            for _ in 0..20 {
                let msg = BitVector::random(k, &mut rng);
                let ct = encrypt(&pk, &msg, 0, &mut rng).unwrap();
                assert_eq!(decrypt(&sk, &ct).unwrap(), msg);
            }
        }
    }

    #[test]
    fn ciphertext_wire_roundtrip() {
        let (pk, _) = toy_key();
        let m = BitVector::from_bits(&[0, 1]);
        let ct = encrypt_with_error(&pk, &m, &BitVector::zeros(4)).unwrap();
        let bytes = ct.to_bytes();
        assert_eq!(bytes.len(), 1);
        assert_eq!(Ciphertext::from_bytes(4, &bytes).unwrap(), ct);
    }

    #[test]
    fn heavy_corruption_is_flagged() {
        // a ciphertext mauled far beyond t must not silently decrypt
        let params = SystemParams::new(8, 192, 7).unwrap();
        let (pk, sk) = keygen_from_seed(&params).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let msg = BitVector::random(192, &mut rng);
        let ct = encrypt(&pk, &msg, 0, &mut rng).unwrap();
        let mut mauled = ct.body().clone();
        for i in rand::seq::index::sample(&mut rng, 256, 128) {
            mauled.set(i, !mauled.get(i));
        }
        match decrypt(&sk, &Ciphertext::from_vector(mauled)) {
            Err(PkcError::DecodeFailure { distance, bound }) => {
                assert!(distance > bound);
            }
            Ok(recovered) => {
                assert_ne!(recovered, msg, "mauled ciphertext decoded to the original")
            }
            Err(e) => panic!("unexpected error: {e}"),
        }
    }

    #[test]
    fn decrypt_rejects_wrong_length() {
        let (_, sk) = toy_key();
        let ct = Ciphertext::from_vector(BitVector::zeros(8));
        assert!(matches!(
            decrypt(&sk, &ct),
            Err(PkcError::LengthMismatch { .. })
        ));
    }
}

//! McEliece-style public-key encryption built on polar codes.
//!
//! The crate provides four layers:
//!
//! * [`gf2`] — bit-packed vectors, matrices and permutations over GF(2);
//! * [`polar`] — polar-code construction over a design BEC, encoding, and
//!   successive cancellation decoding;
//! * [`keys`] / [`cipher`] — key generation with a concealed generator
//!   matrix, systematic public keys, encryption with intentional errors and
//!   SC-based decryption, plus the fixed on-disk key formats;
//! * [`security`] — closed-form attack-cost accounting (Stern work factors
//!   with parameter optimization, equivalent-code counting, key sizes) and a
//!   desk-scale Stern low-weight-codeword search.
//!
//! # Security warning
//!
//! This is research software. The raw scheme implemented here is malleable
//! and carries no CCA2 conversion: flipping ciphertext bits flips predictable
//! plaintext relations, and an attacker with a decryption oracle can strip
//! messages. Do not use it to protect real data.

pub mod cipher;
pub mod gf2;
pub mod keys;
pub mod polar;
pub mod security;

pub use cipher::{decrypt, encrypt, encrypt_with_error, error_sample, Ciphertext};
pub use gf2::{BitMatrix, BitVector, Permutation};
pub use keys::{
    deserialize_private, deserialize_public, keygen, keygen_from_seed, serialize_private,
    serialize_public, PkcError, PrivateKey, PublicKey, SystemParams,
};
pub use polar::{ChannelSpec, CodeProfile, PolarCode, SelectionPolicy};
pub use security::{SecurityReport, SternParams};

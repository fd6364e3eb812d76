//! One-pass encrypt-to-self authenticated encryption.
//!
//! Encrypt-to-self covers the setting where the party encrypting a record is
//! the same party that later decrypts it, e.g. a constrained device parking
//! data on untrusted storage. Alongside the ciphertext, encryption yields a
//! short *binding tag* the encryptor keeps for itself; a holder of an
//! authentic tag never accepts a forged ciphertext, even if the key leaks.
//!
//! The construction drives a (tweakable) compression function over an
//! injective, alignment-preserving encoding of the associated data and the
//! message, using intermediate chaining values as keystream. One pass
//! produces both the ciphertext and the tag.
//!
//! Crate layout:
//!
//! * [`backend`] — compression functions (SHA-256, SHA-512, BLAKE2b, plus a
//!   miniature test function) and the tweak adapter.
//! * [`encoding`] — the injective `(ad, payload)` → block/tweak/offset
//!   encoder, its inverse, and a naive reference encoder.
//! * [`engine`] — `enc`/`dec` of the scheme itself.
//! * [`games`] — executable correctness/integrity/indistinguishability
//!   games with a programmatic adversary interface.
//! * [`selftest`] — known-answer tests and quick end-to-end checks.

pub mod backend;
pub mod encoding;
pub mod engine;
mod error;
pub mod games;
pub mod selftest;

pub use backend::{tweaked_call, BackendId, BackendProfile, Tweak};
pub use encoding::{decode, encode, encode_reference, plan_layout};
pub use engine::EtsContext;
pub use error::Error;

//! The encryption engine.
//!
//! One pass drives the streaming encoder over `(ad, payload)`, XORs the key
//! into every block up to the last payload-carrying one, uses the running
//! chain value as keystream for payload fragments, and derives the binding
//! tag from the final chain value XORed with the offset. Decryption replays
//! the same pass, recovering plaintext fragments before each compression
//! call, and releases the message only if the recomputed tag matches.

use crate::backend::{tweaked_call, BackendProfile};
use crate::encoding::{plan_layout, EncodedItem, Encoder};
use crate::Error;

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    Encrypt,
    Decrypt,
}

/// Immutable encryption context: profile, key, and tag length.
///
/// Contexts are cheap to clone and safe to share; `enc` and `dec` hold no
/// mutable state.
#[derive(Debug, Clone)]
pub struct EtsContext {
    profile: BackendProfile,
    key: Vec<u8>,
    taglen: usize,
}

impl EtsContext {
    /// Builds a context. The key must be 1 to `block_len - chain_len` bytes
    /// long, which keeps the key mask inside the associated-data region of
    /// every payload-carrying block; the tag length must be 1 to
    /// `chain_len` bytes.
    pub fn new(profile: BackendProfile, key: &[u8], taglen: usize) -> Result<EtsContext, Error> {
        if key.is_empty() || key.len() > profile.max_key_len() {
            return Err(Error::Parameter("key length out of range"));
        }
        if taglen == 0 || taglen > profile.chain_len() {
            return Err(Error::Parameter("tag length out of range"));
        }
        Ok(EtsContext {
            profile,
            key: key.to_vec(),
            taglen,
        })
    }

    /// Context with the profile's default tag length.
    pub fn with_default_taglen(profile: BackendProfile, key: &[u8]) -> Result<EtsContext, Error> {
        let taglen = profile.taglen_default();
        EtsContext::new(profile, key, taglen)
    }

    pub fn profile(&self) -> &BackendProfile {
        &self.profile
    }

    pub fn taglen(&self) -> usize {
        self.taglen
    }

    /// Encrypts `m` under associated data `ad`, returning the binding tag
    /// and a ciphertext of exactly `m.len()` bytes.
    pub fn enc(&self, ad: &[u8], m: &[u8]) -> (Vec<u8>, Vec<u8>) {
        self.process(ad, m, Direction::Encrypt)
    }

    /// Decrypts `ct` under associated data `ad`, releasing the message only
    /// if the recomputed binding tag equals `bt`. The comparison is
    /// constant-time; on mismatch the recovered buffer is wiped and a
    /// uniform authentication error is returned.
    pub fn dec(&self, bt: &[u8], ad: &[u8], ct: &[u8]) -> Result<Vec<u8>, Error> {
        if bt.len() != self.taglen {
            return Err(Error::Parameter("binding tag length mismatch"));
        }
        let (expected, mut m) = self.process(ad, ct, Direction::Decrypt);
        if constant_time_eq(&expected, bt) {
            Ok(m)
        } else {
            wipe(&mut m);
            Err(Error::Authentication)
        }
    }

    /// Tag-ignoring decryption; only the game harness uses this to build a
    /// deliberately broken scheme.
    pub(crate) fn dec_unchecked(&self, ad: &[u8], ct: &[u8]) -> Vec<u8> {
        self.process(ad, ct, Direction::Decrypt).1
    }

    /// Shared pass: returns the binding tag computed over the stream and
    /// the transformed payload (ciphertext when encrypting, plaintext when
    /// decrypting).
    fn process(&self, ad: &[u8], payload: &[u8], direction: Direction) -> (Vec<u8>, Vec<u8>) {
        let profile = &self.profile;
        let c = profile.chain_len();
        let d = profile.block_len();
        let plan = plan_layout(profile, ad.len(), payload.len());
        let last = plan.last_payload_block;

        let mut chain = profile.iv().to_vec();
        let mut out = Vec::with_capacity(payload.len());
        let mut index = 0usize;

        for item in Encoder::new(profile, ad, payload) {
            match item {
                EncodedItem::Body { mut block, tweak } => {
                    index += 1;
                    if index == 1 || index <= last {
                        // mask the block head; the key never reaches the
                        // payload region (|key| <= d - c <= d - fragment)
                        for (b, k) in block.iter_mut().zip(&self.key) {
                            *b ^= k;
                        }
                    }
                    if index >= 2 && index <= last {
                        // keystream starts at block 2: the chain value
                        // entering block 1 is public
                        let (start, frag_len) = if index < last {
                            (d - c, c)
                        } else if plan.payload_padded {
                            (d - plan.final_fragment, plan.residual)
                        } else {
                            (d - c, c)
                        };
                        for offset in 0..frag_len {
                            let transformed = block[start + offset] ^ chain[offset];
                            out.push(transformed);
                            if direction == Direction::Decrypt {
                                // restore the plaintext before compressing
                                block[start + offset] = transformed;
                            }
                        }
                    }
                    tweaked_call(profile, &block, tweak, &mut chain)
                        .expect("profile geometry does not match backend");
                }
                EncodedItem::Final(offset) => {
                    let omega = profile.offset(offset.is_padded());
                    let bt = chain
                        .iter()
                        .zip(omega)
                        .take(self.taglen)
                        .map(|(a, b)| a ^ b)
                        .collect();
                    return (bt, out);
                }
            }
        }
        unreachable!("encoder always terminates with a final item");
    }
}

fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut diff = 0u8;
    for (x, y) in a.iter().zip(b) {
        diff |= x ^ y;
    }
    diff == 0
}

fn wipe(buf: &mut [u8]) {
    for b in buf.iter_mut() {
        // volatile so the wipe is not elided ahead of the drop
        unsafe { std::ptr::write_volatile(b, 0) };
    }
}

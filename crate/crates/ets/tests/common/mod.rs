//! Shared oracles and input generators for the integration suites.

use ets::backend::{tweaked_call, BackendProfile};
use ets::encoding::{encode, encode_reference, EncodedItem, EncodedStream, Offset};
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

/// Independent replay of the encryption dataflow on top of the naive
/// reference encoder: chain from IV, key mask on every block up to the last
/// payload block, keystream from the running chain, tag from the offset.
/// Exists to cross-check the engine; shares no code with it.
pub fn reference_enc(
    profile: &BackendProfile,
    key: &[u8],
    ad: &[u8],
    m: &[u8],
    taglen: usize,
) -> (Vec<u8>, Vec<u8>) {
    let stream = encode_reference(profile, ad, m);
    replay_stream(profile, key, m.len(), &stream, taglen)
}

/// Mutations applied to a replayed stream before deriving the tag.
#[derive(Clone, Copy)]
pub enum StreamMutation {
    None,
    /// Flip the tweak of the 1-based body at this index.
    FlipTweak(usize),
    FlipOffset,
}

/// Binding tag obtained by replaying the encryption pass over a mutated
/// stream. With `StreamMutation::None` this must reproduce the engine's tag.
pub fn replayed_tag(
    profile: &BackendProfile,
    key: &[u8],
    ad: &[u8],
    m: &[u8],
    taglen: usize,
    mutation: StreamMutation,
) -> Vec<u8> {
    let mut items = encode(profile, ad, m).into_items();
    match mutation {
        StreamMutation::None => {}
        StreamMutation::FlipTweak(index) => {
            if let EncodedItem::Body { tweak, .. } = &mut items[index - 1] {
                *tweak = ets::Tweak(!tweak.0);
            }
        }
        StreamMutation::FlipOffset => {
            if let EncodedItem::Final(offset) = items.last_mut().unwrap() {
                *offset = Offset::from_padded(!offset.is_padded());
            }
        }
    }
    let stream = EncodedStream::from_items(items).unwrap();
    replay_stream(profile, key, m.len(), &stream, taglen).0
}

fn replay_stream(
    profile: &BackendProfile,
    key: &[u8],
    payload_len: usize,
    stream: &EncodedStream,
    taglen: usize,
) -> (Vec<u8>, Vec<u8>) {
    let c = profile.chain_len();
    let d = profile.block_len();
    let align = profile.align();

    // geometry, recomputed from scratch
    let (last_payload, residual, fragment) = if payload_len == 0 {
        (0, 0, 0)
    } else {
        let r = payload_len % c;
        let fragments = payload_len.div_ceil(c);
        let s = if r != 0 { (r / align + 1) * align } else { c };
        (1 + fragments, r, s)
    };

    let mut chain = profile.iv().to_vec();
    let mut ct = Vec::new();
    let mut index = 0usize;
    for (block, tweak) in stream.bodies() {
        index += 1;
        let mut block = block.to_vec();
        if index == 1 || index <= last_payload {
            for (b, k) in block.iter_mut().zip(key) {
                *b ^= k;
            }
        }
        if index >= 2 && index <= last_payload {
            let (start, frag_len) = if index < last_payload {
                (d - c, c)
            } else if residual != 0 {
                (d - fragment, residual)
            } else {
                (d - c, c)
            };
            for i in 0..frag_len {
                ct.push(block[start + i] ^ chain[i]);
            }
        }
        tweaked_call(profile, &block, tweak, &mut chain).unwrap();
    }
    let omega = profile.offset(stream.final_offset().is_padded());
    let bt = chain.iter().zip(omega).take(taglen).map(|(a, b)| a ^ b).collect();
    (bt, ct)
}

const BOUNDARY_BYTES: [u8; 3] = [0x00, 0x80, 0xa5];

/// The toy-scale input family used by the exhaustive criteria: for every
/// length pair (|ad| <= 20, |m| <= 12) a cyclic two-symbol base string, every
/// single-position boundary-byte substitution, and all boundary-fill
/// combinations; plus the full five-symbol content product for every shape
/// with |ad| + |m| <= 6.
pub fn toy_input_family() -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut family = Vec::new();
    for ad_len in 0..=20usize {
        for m_len in 0..=12usize {
            let base_ad: Vec<u8> = (0..ad_len).map(|i| 0x41 + (i % 2) as u8).collect();
            let base_m: Vec<u8> = (0..m_len).map(|i| 0x61 + (i % 2) as u8).collect();
            family.push((base_ad.clone(), base_m.clone()));
            for &byte in &BOUNDARY_BYTES {
                for pos in 0..ad_len {
                    let mut ad = base_ad.clone();
                    ad[pos] = byte;
                    family.push((ad, base_m.clone()));
                }
                for pos in 0..m_len {
                    let mut m = base_m.clone();
                    m[pos] = byte;
                    family.push((base_ad.clone(), m));
                }
                for &fill in &BOUNDARY_BYTES {
                    family.push((vec![byte; ad_len], vec![fill; m_len]));
                }
            }
        }
    }
    // full content product over the five-symbol alphabet at small scale
    let alphabet = [0x41u8, 0x42, 0x00, 0x80, 0xa5];
    for total in 0..=6usize {
        for ad_len in 0..=total {
            let m_len = total - ad_len;
            let mut counters = vec![0usize; total];
            loop {
                let ad: Vec<u8> = counters[..ad_len].iter().map(|&i| alphabet[i]).collect();
                let m: Vec<u8> = counters[ad_len..].iter().map(|&i| alphabet[i]).collect();
                family.push((ad, m));
                // odometer over the alphabet
                let mut pos = 0;
                loop {
                    if pos == total {
                        break;
                    }
                    counters[pos] += 1;
                    if counters[pos] < alphabet.len() {
                        break;
                    }
                    counters[pos] = 0;
                    pos += 1;
                }
                if pos == total {
                    break;
                }
            }
        }
    }
    family
}

/// Layout branches the randomized criteria must cover.
pub const BRANCH_CLASSES: usize = 6;

/// Draws an (ad_len, m_len) pair from the given branch class: empty ad,
/// empty m, zero residual, aligned nonzero residual, trailing ad blocks,
/// payload reaching the final block.
pub fn branch_shape(profile: &BackendProfile, class: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let c = profile.chain_len();
    let d = profile.block_len();
    let align = profile.align();
    match class % BRANCH_CLASSES {
        0 => (0, 1 + rng.random_range(0..3 * c)),
        1 => (rng.random_range(0..3 * d), 0),
        2 => (rng.random_range(0..2 * d), c * (1 + rng.random_range(0..4))),
        3 => {
            // residual a nonzero multiple of the alignment value, below c
            let steps = c / align; // at least 2 for every built-in profile
            let r = align * (1 + rng.random_range(0..steps - 1));
            (rng.random_range(0..2 * d), c * rng.random_range(0..3) + r)
        }
        4 => {
            // associated data outlives the payload
            let m_len = 1 + rng.random_range(0..2 * c);
            let through_payload = ets::plan_layout(profile, 0, m_len).ad_capacity;
            (through_payload + 1 + rng.random_range(0..2 * d), m_len)
        }
        _ => {
            // payload reaches the final block
            let m_len = 1 + rng.random_range(0..2 * c);
            let through_payload = ets::plan_layout(profile, 0, m_len).ad_capacity;
            (rng.random_range(0..=through_payload), m_len)
        }
    }
}

pub fn random_bytes(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut buf = vec![0u8; len];
    rng.fill_bytes(&mut buf);
    buf
}

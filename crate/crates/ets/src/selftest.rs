//! Known-answer tests and quick end-to-end checks.
//!
//! The digest helpers frame whole messages for the block compression
//! functions; they exist so the known-answer checks can compare against
//! published reference digests, not as general hashing APIs.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backend::{blake2b, sha256, sha512, toy, BackendProfile};
use crate::encoding::{decode, encode, encode_reference};
use crate::games::{
    mutation_adversary, random_query_adversary, run_int, run_safe, sample_key, SaboteurScheme,
};
use crate::EtsContext;

/// Merkle-Damgård framing: message, 0x80, zeros, big-endian bit length.
fn md_frame(msg: &[u8], block_len: usize, length_field: usize) -> Vec<u8> {
    let mut framed = msg.to_vec();
    framed.push(0x80);
    while (framed.len() + length_field) % block_len != 0 {
        framed.push(0);
    }
    let bits = (msg.len() as u128) * 8;
    if length_field == 8 {
        framed.extend_from_slice(&((bits as u64).to_be_bytes()));
    } else {
        framed.extend_from_slice(&bits.to_be_bytes());
    }
    framed
}

/// SHA-256 digest of a whole message via the block compression function.
pub fn sha256_digest(msg: &[u8]) -> [u8; 32] {
    let framed = md_frame(msg, sha256::BLOCK_LEN, 8);
    let mut chain = sha256::iv();
    for block in framed.chunks_exact(sha256::BLOCK_LEN) {
        chain = sha256::compress(block.try_into().unwrap(), &chain);
    }
    chain
}

/// SHA-512 digest of a whole message via the block compression function.
pub fn sha512_digest(msg: &[u8]) -> [u8; 64] {
    let framed = md_frame(msg, sha512::BLOCK_LEN, 16);
    let mut chain = sha512::iv();
    for block in framed.chunks_exact(sha512::BLOCK_LEN) {
        chain = sha512::compress(block.try_into().unwrap(), &chain);
    }
    chain
}

/// Unkeyed BLAKE2b-512 digest via the compression function (RFC 7693
/// sequential mode, parameter block with fanout 1 and depth 1).
pub fn blake2b512_digest(msg: &[u8]) -> [u8; 64] {
    let mut chain = blake2b::iv();
    let mut h0 = u64::from_le_bytes(chain[0..8].try_into().unwrap());
    h0 ^= 0x0101_0040; // digest length 64, fanout 1, depth 1
    chain[0..8].copy_from_slice(&h0.to_le_bytes());

    if msg.is_empty() {
        return blake2b::compress_full(&[0u8; 128], &chain, 0, 0, true, false);
    }
    let mut counter: u128 = 0;
    let mut rest = msg;
    while rest.len() > blake2b::BLOCK_LEN {
        let (head, tail) = rest.split_at(blake2b::BLOCK_LEN);
        counter += blake2b::BLOCK_LEN as u128;
        chain = blake2b::compress_full(
            head.try_into().unwrap(),
            &chain,
            counter as u64,
            (counter >> 64) as u64,
            false,
            false,
        );
        rest = tail;
    }
    let mut last = [0u8; 128];
    last[..rest.len()].copy_from_slice(rest);
    counter += rest.len() as u128;
    blake2b::compress_full(
        &last,
        &chain,
        counter as u64,
        (counter >> 64) as u64,
        true,
        false,
    )
}

/// First failing check and what went wrong.
#[derive(Debug, Clone)]
pub struct SelftestFailure {
    pub check: &'static str,
    pub detail: String,
}

impl std::fmt::Display for SelftestFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn expect_digest(name: &str, got: &[u8], want_hex: &str) -> Result<(), String> {
    if hex(got) == want_hex {
        Ok(())
    } else {
        Err(format!("{name}: got {}, want {want_hex}", hex(got)))
    }
}

fn check_sha256_kat() -> Result<(), String> {
    expect_digest(
        "sha256(\"\")",
        &sha256_digest(b""),
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
    )?;
    expect_digest(
        "sha256(\"abc\")",
        &sha256_digest(b"abc"),
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    )?;
    expect_digest(
        "sha256(two-block)",
        &sha256_digest(b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1",
    )
}

fn check_sha512_kat() -> Result<(), String> {
    expect_digest(
        "sha512(\"\")",
        &sha512_digest(b""),
        "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce\
         47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e",
    )?;
    expect_digest(
        "sha512(\"abc\")",
        &sha512_digest(b"abc"),
        "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a\
         2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f",
    )?;
    expect_digest(
        "sha512(two-block)",
        &sha512_digest(
            b"abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmno\
              ijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu",
        ),
        "8e959b75dae313da8cf4f72814fc143f8f7779c6eb9f7fa17299aeadb6889018\
         501d289e4900f7e4331b99dec4b5433ac7d329eeb6dd26545e96e55b874be909",
    )
}

fn check_blake2b_kat() -> Result<(), String> {
    expect_digest(
        "blake2b-512(\"\")",
        &blake2b512_digest(b""),
        "786a02f742015903c6c6fd852552d272912f4740e15847618a86e217f71f5419\
         d25e1031afee585313896444934eb04b903a685b1448b755d56f701afe9be2ce",
    )?;
    expect_digest(
        "blake2b-512(\"abc\")",
        &blake2b512_digest(b"abc"),
        "ba80a53f981c4d0d6a2797b69f12f6e94c212f14685ac4b74b12bb6fdbffa2d1\
         7d87c5392aab792dc252d5de4533cc9518d38aa8dbf1925ab92386edd4009923",
    )
}

fn check_toy_formula() -> Result<(), String> {
    let cases: [([u8; 8], bool, [u8; 4], [u8; 4]); 3] = [
        ([0; 8], false, [0; 4], [0x00, 0x01, 0x02, 0x03]),
        ([0; 8], true, [0; 4], [0xa5, 0xa6, 0xa7, 0xa8]),
        (
            [0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08],
            false,
            [0x10, 0x20, 0x30, 0x40],
            [0x16, 0x29, 0x3c, 0x4f],
        ),
    ];
    for (block, tweak, chain, want) in cases {
        let got = toy::compress(&block, tweak, &chain);
        if got != want {
            return Err(format!("toy({block:02x?}, {tweak}, {chain:02x?}) = {got:02x?}"));
        }
    }
    Ok(())
}

fn check_encoding_sweep() -> Result<(), String> {
    let profile = BackendProfile::toy();
    let mut seen: std::collections::HashMap<Vec<u8>, (Vec<u8>, Vec<u8>)> =
        std::collections::HashMap::new();
    for ad_len in 0..=12usize {
        for m_len in 0..=8usize {
            for variant in 0..3u8 {
                let ad: Vec<u8> = (0..ad_len)
                    .map(|i| match variant {
                        0 => 0x41 + (i % 2) as u8,
                        1 => 0x00,
                        _ => 0x80,
                    })
                    .collect();
                let m: Vec<u8> = (0..m_len)
                    .map(|i| match variant {
                        0 => 0x61 + (i % 2) as u8,
                        1 => 0x80,
                        _ => 0x00,
                    })
                    .collect();
                let stream = encode(&profile, &ad, &m);
                if stream != encode_reference(&profile, &ad, &m) {
                    return Err(format!("reference mismatch at ad={ad:02x?} m={m:02x?}"));
                }
                match decode(&profile, &stream) {
                    Ok(pair) if pair == (ad.clone(), m.clone()) => {}
                    other => return Err(format!("roundtrip failed: {other:?}")),
                }
                if let Some(previous) = seen.insert(stream.to_bytes(), (ad.clone(), m.clone())) {
                    if previous != (ad, m) {
                        return Err(format!("stream collision with {previous:02x?}"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_engine_roundtrips() -> Result<(), String> {
    let golden = EtsContext::new(BackendProfile::toy(), &[0x11, 0x22, 0x33, 0x44], 4)
        .map_err(|e| e.to_string())?;
    let (bt, ct) = golden.enc(&[], &[0x41]);
    if ct != [0xd3] || bt != [0xed, 0xab, 0x30, 0x3e] {
        return Err(format!("golden tuple mismatch: bt={bt:02x?} ct={ct:02x?}"));
    }

    let shapes: [(usize, usize); 8] =
        [(0, 0), (0, 5), (3, 0), (10, 8), (10, 6), (40, 5), (2, 13), (18, 4)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    for profile in BackendProfile::real_profiles() {
        let key = sample_key(&mut rng, profile.max_key_len());
        let ctx = EtsContext::with_default_taglen(profile, &key).map_err(|e| e.to_string())?;
        for (ad_len, m_len) in shapes {
            let mut ad = vec![0u8; ad_len];
            let mut m = vec![0u8; m_len];
            rng.fill_bytes(&mut ad);
            rng.fill_bytes(&mut m);
            let (bt, ct) = ctx.enc(&ad, &m);
            if ct.len() != m.len() {
                return Err("ciphertext length mismatch".into());
            }
            match ctx.dec(&bt, &ad, &ct) {
                Ok(back) if back == m => {}
                other => return Err(format!("roundtrip failed: {other:?}")),
            }
        }
    }
    Ok(())
}

fn check_tamper_rejection() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a3b);
    for profile in BackendProfile::real_profiles() {
        let key = sample_key(&mut rng, 32);
        let ctx = EtsContext::with_default_taglen(profile, &key).map_err(|e| e.to_string())?;
        let mut ad = vec![0u8; 16];
        let mut m = vec![0u8; 50];
        rng.fill_bytes(&mut ad);
        rng.fill_bytes(&mut m);
        let (bt, ct) = ctx.enc(&ad, &m);
        for _ in 0..70 {
            let (bad_ad, bad_ct) = crate::games::mutate_pair(&ad, &ct, &mut rng);
            if ctx.dec(&bt, &bad_ad, &bad_ct).is_ok() {
                return Err(format!("mutation accepted: ad={bad_ad:02x?}"));
            }
        }
    }
    Ok(())
}

fn check_games() -> Result<(), String> {
    let profile = BackendProfile::toy();
    for seed in 0..100u64 {
        let factory = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let key = sample_key(&mut rng, 4);
            EtsContext::with_default_taglen(BackendProfile::toy(), &key).unwrap()
        };
        if run_safe(factory, b"ad", b"msg", random_query_adversary(seed, 4)) {
            return Err(format!("correctness promise violated at seed {seed}"));
        }
        // integrity runs on a real backend; the toy function is forgeable
        let factory = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let key = sample_key(&mut rng, 32);
            EtsContext::with_default_taglen(BackendProfile::sha256(), &key).unwrap()
        };
        if run_int(factory, b"ad", b"message!", mutation_adversary(seed)) {
            return Err(format!("forgery accepted at seed {seed}"));
        }
    }
    // control: the harness must detect wins against a broken scheme
    let factory = || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let key = sample_key(&mut rng, profile.max_key_len());
        SaboteurScheme(EtsContext::with_default_taglen(BackendProfile::toy(), &key).unwrap())
    };
    if !run_int(factory, b"ad", b"forge me", mutation_adversary(1)) {
        return Err("integrity game failed to catch the broken scheme".into());
    }
    Ok(())
}

/// Runs every check, reporting each passing check's name to `progress`;
/// stops at the first failure.
pub fn run_all(mut progress: impl FnMut(&str)) -> Result<(), SelftestFailure> {
    let checks: [(&'static str, fn() -> Result<(), String>); 8] = [
        ("sha256-kat", check_sha256_kat),
        ("sha512-kat", check_sha512_kat),
        ("blake2b-kat", check_blake2b_kat),
        ("toy-formula", check_toy_formula),
        ("encoding-sweep", check_encoding_sweep),
        ("engine-roundtrips", check_engine_roundtrips),
        ("tamper-rejection", check_tamper_rejection),
        ("security-games", check_games),
    ];
    for (check, run) in checks {
        run().map_err(|detail| SelftestFailure { check, detail })?;
        progress(check);
    }
    Ok(())
}

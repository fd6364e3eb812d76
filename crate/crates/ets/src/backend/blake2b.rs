//! BLAKE2b compression function F (RFC 7693).
//!
//! BLAKE2b is a HAIFA-style design: besides the block and the chain value,
//! F takes a byte counter and two finalization flags. The last-node flag
//! gives a native one-bit domain-separation channel, so this backend is
//! tweakable without chain-value tricks.

/// Chain (state) size in bytes.
pub const CHAIN_LEN: usize = 64;
/// Message block size in bytes.
pub const BLOCK_LEN: usize = 128;

const IV: [u64; 8] = [
    0x6a09e667f3bcc908, 0xbb67ae8584caa73b, 0x3c6ef372fe94f82b, 0xa54ff53a5f1d36f1,
    0x510e527fade682d1, 0x9b05688c2b3e6c1f, 0x1f83d9abfb41bd6b, 0x5be0cd19137e2179,
];

const SIGMA: [[usize; 16]; 12] = [
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
    [14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3],
    [11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4],
    [7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8],
    [9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13],
    [2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9],
    [12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11],
    [13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10],
    [6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5],
    [10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0],
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
    [14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3],
];

/// Raw initial chain value (the unparameterized IV), serialized little-endian.
pub fn iv() -> [u8; CHAIN_LEN] {
    let mut out = [0u8; CHAIN_LEN];
    for (i, w) in IV.iter().enumerate() {
        out[i * 8..i * 8 + 8].copy_from_slice(&w.to_le_bytes());
    }
    out
}

#[inline(always)]
fn g(v: &mut [u64; 16], a: usize, b: usize, c: usize, d: usize, x: u64, y: u64) {
    v[a] = v[a].wrapping_add(v[b]).wrapping_add(x);
    v[d] = (v[d] ^ v[a]).rotate_right(32);
    v[c] = v[c].wrapping_add(v[d]);
    v[b] = (v[b] ^ v[c]).rotate_right(24);
    v[a] = v[a].wrapping_add(v[b]).wrapping_add(y);
    v[d] = (v[d] ^ v[a]).rotate_right(16);
    v[c] = v[c].wrapping_add(v[d]);
    v[b] = (v[b] ^ v[c]).rotate_right(63);
}

/// The full compression function F with explicit byte counter `(t0, t1)`,
/// final-block flag `f0`, and last-node flag `f1`.
pub fn compress_full(
    block: &[u8; BLOCK_LEN],
    chain: &[u8; CHAIN_LEN],
    t0: u64,
    t1: u64,
    f0: bool,
    f1: bool,
) -> [u8; CHAIN_LEN] {
    let mut m = [0u64; 16];
    for (i, word) in m.iter_mut().enumerate() {
        *word = u64::from_le_bytes(block[i * 8..i * 8 + 8].try_into().unwrap());
    }
    let mut h = [0u64; 8];
    for (i, word) in h.iter_mut().enumerate() {
        *word = u64::from_le_bytes(chain[i * 8..i * 8 + 8].try_into().unwrap());
    }

    let mut v = [0u64; 16];
    v[..8].copy_from_slice(&h);
    v[8..].copy_from_slice(&IV);
    v[12] ^= t0;
    v[13] ^= t1;
    if f0 {
        v[14] = !v[14];
    }
    if f1 {
        v[15] = !v[15];
    }

    for s in &SIGMA {
        g(&mut v, 0, 4, 8, 12, m[s[0]], m[s[1]]);
        g(&mut v, 1, 5, 9, 13, m[s[2]], m[s[3]]);
        g(&mut v, 2, 6, 10, 14, m[s[4]], m[s[5]]);
        g(&mut v, 3, 7, 11, 15, m[s[6]], m[s[7]]);
        g(&mut v, 0, 5, 10, 15, m[s[8]], m[s[9]]);
        g(&mut v, 1, 6, 11, 12, m[s[10]], m[s[11]]);
        g(&mut v, 2, 7, 8, 13, m[s[12]], m[s[13]]);
        g(&mut v, 3, 4, 9, 14, m[s[14]], m[s[15]]);
    }

    let mut out = [0u8; CHAIN_LEN];
    for i in 0..8 {
        out[i * 8..i * 8 + 8].copy_from_slice(&(h[i] ^ v[i] ^ v[i + 8]).to_le_bytes());
    }
    out
}

/// Tweaked call: counter pinned to zero, no final-block flag, tweak carried
/// on the last-node flag.
pub fn compress(block: &[u8; BLOCK_LEN], tweak: bool, chain: &[u8; CHAIN_LEN]) -> [u8; CHAIN_LEN] {
    compress_full(block, chain, 0, 0, false, tweak)
}

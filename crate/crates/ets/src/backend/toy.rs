//! Miniature deterministic compression function for exhaustive testing.
//!
//! With a 4-byte chain and an 8-byte block, whole input families fit in a
//! test run and every output is checkable by hand. No security is claimed.

/// Chain (state) size in bytes.
pub const CHAIN_LEN: usize = 4;
/// Message block size in bytes.
pub const BLOCK_LEN: usize = 8;

/// Fixed initial chain value.
pub fn iv() -> [u8; CHAIN_LEN] {
    [0x01, 0x23, 0x45, 0x67]
}

/// out[i] = (chain[i] + block[i] + block[i+4] + tweak * 0xa5 + i) mod 256.
pub fn compress(block: &[u8; BLOCK_LEN], tweak: bool, chain: &[u8; CHAIN_LEN]) -> [u8; CHAIN_LEN] {
    let t = if tweak { 0xa5u8 } else { 0 };
    let mut out = [0u8; CHAIN_LEN];
    for i in 0..CHAIN_LEN {
        out[i] = chain[i]
            .wrapping_add(block[i])
            .wrapping_add(block[i + 4])
            .wrapping_add(t)
            .wrapping_add(i as u8);
    }
    out
}

//! Compression backends and the tweak adapter.
//!
//! Each backend is described by a [`BackendProfile`]: an immutable parameter
//! bundle (chain size, block size, alignment granularity, IV, tweak and
//! offset constants, default tag length). [`tweaked_call`] is the single
//! entry point the encoder and engine use: it turns every backend into a
//! tweakable compression function, either natively (BLAKE2b, toy) or by
//! masking the chain value (SHA-2).

pub mod blake2b;
pub mod sha256;
pub mod sha512;
pub mod toy;

use crate::Error;

/// Byte repeated to build the offset applied when associated data filled its
/// capacity exactly.
pub const OFFSET_EXACT_BYTE: u8 = 0x00;
/// Byte repeated to build the offset applied when associated data was padded.
/// Differs from [`OFFSET_EXACT_BYTE`] in every byte, so the two offsets stay
/// distinct under any truncation of at least one byte.
pub const OFFSET_PADDED_BYTE: u8 = 0xa5;
/// Byte repeated to build the chain mask realizing tweak = 1 on backends
/// without a native tweak input. Nonzero and distinct from both offsets.
pub const TWEAK_MASK_BYTE: u8 = 0x5a;

/// One-bit domain-separation input of a tweakable compression function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tweak(pub bool);

impl Tweak {
    pub const CLEAR: Tweak = Tweak(false);
    pub const SET: Tweak = Tweak(true);

    pub fn bit(self) -> u8 {
        self.0 as u8
    }
}

/// Identifies a compression backend on the wire and in containers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendId {
    Sha256 = 1,
    Sha512 = 2,
    Blake2b = 3,
    /// Test-only miniature function; never used for real data.
    Toy = 255,
}

impl BackendId {
    pub fn from_byte(byte: u8) -> Option<BackendId> {
        match byte {
            1 => Some(BackendId::Sha256),
            2 => Some(BackendId::Sha512),
            3 => Some(BackendId::Blake2b),
            255 => Some(BackendId::Toy),
            _ => None,
        }
    }

    pub fn as_byte(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendId::Sha256 => "sha256",
            BackendId::Sha512 => "sha512",
            BackendId::Blake2b => "blake2b",
            BackendId::Toy => "toy",
        }
    }
}

/// Immutable parameter bundle for one compression backend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendProfile {
    id: BackendId,
    chain_len: usize,
    block_len: usize,
    align: usize,
    iv: Vec<u8>,
    tweak_mask: Vec<u8>,
    offsets: [Vec<u8>; 2],
    taglen_default: usize,
}

impl BackendProfile {
    /// Builds a profile, asserting the parameter invariants:
    /// `align` divides both sizes, the chain is strictly smaller than the
    /// block, and the chain length divides 256 (so a payload length fits a
    /// single byte and residues stay well-defined).
    pub fn new(
        id: BackendId,
        chain_len: usize,
        block_len: usize,
        align: usize,
        iv: Vec<u8>,
        taglen_default: usize,
    ) -> BackendProfile {
        assert!(chain_len > 0 && block_len > 0 && align > 0, "zero parameter");
        assert!(chain_len < block_len, "chain must be smaller than block");
        assert!(chain_len % align == 0, "alignment must divide chain size");
        assert!(block_len % align == 0, "alignment must divide block size");
        assert!(chain_len <= 256, "chain size above 256 bytes");
        assert!(256 % chain_len == 0, "chain size must divide 256");
        assert!(iv.len() == chain_len, "IV length mismatch");
        assert!(
            (1..=chain_len).contains(&taglen_default),
            "default tag length out of range"
        );
        let offsets = [
            vec![OFFSET_EXACT_BYTE; chain_len],
            vec![OFFSET_PADDED_BYTE; chain_len],
        ];
        let tweak_mask = vec![TWEAK_MASK_BYTE; chain_len];
        debug_assert!(offsets[0] != offsets[1] && offsets[0][0] != offsets[1][0]);
        debug_assert!(tweak_mask.iter().any(|&b| b != 0) && tweak_mask != offsets[1]);
        BackendProfile {
            id,
            chain_len,
            block_len,
            align,
            iv,
            tweak_mask,
            offsets,
            taglen_default,
        }
    }

    pub fn sha256() -> BackendProfile {
        BackendProfile::new(BackendId::Sha256, 32, 64, 8, sha256::iv().to_vec(), 32)
    }

    pub fn sha512() -> BackendProfile {
        BackendProfile::new(BackendId::Sha512, 64, 128, 8, sha512::iv().to_vec(), 32)
    }

    pub fn blake2b() -> BackendProfile {
        BackendProfile::new(BackendId::Blake2b, 64, 128, 8, blake2b::iv().to_vec(), 32)
    }

    /// Miniature profile (chain 4, block 8, alignment 2) for exhaustive tests.
    pub fn toy() -> BackendProfile {
        BackendProfile::new(BackendId::Toy, 4, 8, 2, toy::iv().to_vec(), 4)
    }

    /// Profile for a backend id byte as stored in containers and vectors.
    pub fn by_id(byte: u8) -> Option<BackendProfile> {
        Some(match BackendId::from_byte(byte)? {
            BackendId::Sha256 => BackendProfile::sha256(),
            BackendId::Sha512 => BackendProfile::sha512(),
            BackendId::Blake2b => BackendProfile::blake2b(),
            BackendId::Toy => BackendProfile::toy(),
        })
    }

    /// Profile for a human-readable backend name.
    pub fn by_name(name: &str) -> Option<BackendProfile> {
        match name {
            "sha256" => Some(BackendProfile::sha256()),
            "sha512" => Some(BackendProfile::sha512()),
            "blake2b" => Some(BackendProfile::blake2b()),
            "toy" => Some(BackendProfile::toy()),
            _ => None,
        }
    }

    /// The three production backends.
    pub fn real_profiles() -> [BackendProfile; 3] {
        [
            BackendProfile::sha256(),
            BackendProfile::sha512(),
            BackendProfile::blake2b(),
        ]
    }

    pub fn id(&self) -> BackendId {
        self.id
    }

    /// Chain (state) size in bytes.
    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    /// Block (data) size in bytes.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Memory alignment granularity in bytes.
    pub fn align(&self) -> usize {
        self.align
    }

    pub fn iv(&self) -> &[u8] {
        &self.iv
    }

    /// Chain mask used by the tweak adapter on plain backends.
    pub fn tweak_mask(&self) -> &[u8] {
        &self.tweak_mask
    }

    /// Final offset constant; `padded` selects the one signalling that the
    /// associated data was padded.
    pub fn offset(&self, padded: bool) -> &[u8] {
        &self.offsets[padded as usize]
    }

    pub fn taglen_default(&self) -> usize {
        self.taglen_default
    }

    /// Maximum key length the engine accepts for this profile.
    pub fn max_key_len(&self) -> usize {
        self.block_len - self.chain_len
    }
}

fn as_array<const N: usize>(bytes: &[u8]) -> Result<&[u8; N], Error> {
    bytes
        .try_into()
        .map_err(|_| Error::Parameter("profile geometry does not match backend"))
}

/// One tweaked compression call `C <- F_t(B, C)`, updating `chain` in place.
///
/// SHA-2 backends realize the tweak by masking the chain value; BLAKE2b and
/// the toy function take the tweak bit natively.
pub fn tweaked_call(
    profile: &BackendProfile,
    block: &[u8],
    tweak: Tweak,
    chain: &mut [u8],
) -> Result<(), Error> {
    if block.len() != profile.block_len {
        return Err(Error::Parameter("block length mismatch"));
    }
    if chain.len() != profile.chain_len {
        return Err(Error::Parameter("chain length mismatch"));
    }
    match profile.id {
        BackendId::Sha256 => {
            let mut c: [u8; sha256::CHAIN_LEN] = *as_array(chain)?;
            if tweak.0 {
                for (b, m) in c.iter_mut().zip(&profile.tweak_mask) {
                    *b ^= m;
                }
            }
            chain.copy_from_slice(&sha256::compress(as_array(block)?, &c));
        }
        BackendId::Sha512 => {
            let mut c: [u8; sha512::CHAIN_LEN] = *as_array(chain)?;
            if tweak.0 {
                for (b, m) in c.iter_mut().zip(&profile.tweak_mask) {
                    *b ^= m;
                }
            }
            chain.copy_from_slice(&sha512::compress(as_array(block)?, &c));
        }
        BackendId::Blake2b => {
            let out = blake2b::compress(as_array(block)?, tweak.0, as_array(chain)?);
            chain.copy_from_slice(&out);
        }
        BackendId::Toy => {
            let out = toy::compress(as_array(block)?, tweak.0, as_array(chain)?);
            chain.copy_from_slice(&out);
        }
    }
    Ok(())
}

use std::fmt;

/// Errors reported by this crate.
///
/// Decoding and decryption deliberately report a single opaque error each:
/// distinguishing failure causes would hand an attacker an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// An input violates a length or range precondition.
    Parameter(&'static str),
    /// An unknown backend identifier.
    UnknownBackend(u8),
    /// The stream is not the encoding of any `(ad, payload)` pair.
    Decode,
    /// The recomputed binding tag does not match the supplied one.
    Authentication,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(what) => write!(f, "invalid parameter: {what}"),
            Error::UnknownBackend(id) => write!(f, "unknown backend id {id}"),
            Error::Decode => write!(f, "malformed encoded stream"),
            Error::Authentication => write!(f, "authentication failure"),
        }
    }
}

impl std::error::Error for Error {}

//! Executable security games.
//!
//! Three games exercise a scheme through a decryption oracle: a correctness
//! game (the challenge pair must always decrypt back to the challenge
//! message), a ciphertext-integrity game (any accepted non-challenge pair is
//! a forgery and wins), and a pair of indistinguishability games (the
//! adversary must tell which of two same-length messages was encrypted).
//! Queries on the authentic challenge pair never release the message; the
//! oracle answers with a suppression marker instead. Scheme failures are
//! reported to the adversary as rejections.
//!
//! The harness is scheme-agnostic: anything implementing [`Scheme`] can be
//! plugged in, including deliberately broken variants used to prove the
//! games can detect wins.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, EtsContext};

/// Message equivalence used by the indistinguishability games: ciphertext
/// length is not hidden, so only same-length messages are comparable.
pub fn msg_equiv(m0: &[u8], m1: &[u8]) -> bool {
    m0.len() == m1.len()
}

/// The enc/dec surface the games drive.
pub trait Scheme {
    fn enc(&self, ad: &[u8], m: &[u8]) -> Result<(Vec<u8>, Vec<u8>), Error>;
    fn dec(&self, bt: &[u8], ad: &[u8], ct: &[u8]) -> Result<Vec<u8>, Error>;
}

impl Scheme for EtsContext {
    fn enc(&self, ad: &[u8], m: &[u8]) -> Result<(Vec<u8>, Vec<u8>), Error> {
        Ok(EtsContext::enc(self, ad, m))
    }

    fn dec(&self, bt: &[u8], ad: &[u8], ct: &[u8]) -> Result<Vec<u8>, Error> {
        EtsContext::dec(self, bt, ad, ct)
    }
}

/// The real scheme with the tag check removed. A negative control: the
/// integrity game must be able to win against it.
pub struct SaboteurScheme(pub EtsContext);

impl Scheme for SaboteurScheme {
    fn enc(&self, ad: &[u8], m: &[u8]) -> Result<(Vec<u8>, Vec<u8>), Error> {
        Ok(self.0.enc(ad, m))
    }

    fn dec(&self, bt: &[u8], ad: &[u8], ct: &[u8]) -> Result<Vec<u8>, Error> {
        if bt.len() != self.0.taglen() {
            return Err(Error::Parameter("binding tag length mismatch"));
        }
        Ok(self.0.dec_unchecked(ad, ct))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameId {
    Safe,
    Int,
    Ind,
}

/// Oracle answer for one decryption query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleReply {
    /// Decryption succeeded on a non-challenge pair; plaintext released.
    Plaintext(Vec<u8>),
    /// The query hit the challenge pair; the message is withheld.
    Suppressed,
    /// Decryption failed; the failure itself is visible to the adversary.
    Rejected,
}

#[derive(Debug, Clone)]
pub struct QueryRecord {
    pub ad: Vec<u8>,
    pub ct: Vec<u8>,
    pub reply: OracleReply,
}

/// Record of one game run: the challenge, the query log, and the outcome.
#[derive(Debug, Clone)]
pub struct GameTranscript {
    pub game: GameId,
    pub challenge_ad: Vec<u8>,
    pub challenge_ct: Vec<u8>,
    pub queries: Vec<QueryRecord>,
    pub outcome: bool,
}

/// Decryption oracle handed to adversaries. Usable any number of times.
pub struct DecOracle<'a, S: Scheme> {
    scheme: &'a S,
    game: GameId,
    bt: &'a [u8],
    challenge_ad: &'a [u8],
    challenge_ct: &'a [u8],
    challenge_m: &'a [u8],
    queries: Vec<QueryRecord>,
    win: Option<bool>,
}

impl<S: Scheme> DecOracle<'_, S> {
    pub fn query(&mut self, ad: &[u8], ct: &[u8]) -> OracleReply {
        let result = self.scheme.dec(self.bt, ad, ct);
        let authentic = ad == self.challenge_ad && ct == self.challenge_ct;
        let reply = match (authentic, result) {
            (true, Ok(m)) => {
                // the correctness game promises the challenge decrypts to
                // the challenge message
                if self.game == GameId::Safe && m != self.challenge_m && self.win.is_none() {
                    self.win = Some(true);
                }
                OracleReply::Suppressed
            }
            (true, Err(_)) => OracleReply::Rejected,
            (false, Ok(m)) => {
                // accepted non-challenge pair: a forgery
                if self.game == GameId::Int && self.win.is_none() {
                    self.win = Some(true);
                }
                OracleReply::Plaintext(m)
            }
            (false, Err(_)) => OracleReply::Rejected,
        };
        self.queries.push(QueryRecord {
            ad: ad.to_vec(),
            ct: ct.to_vec(),
            reply: reply.clone(),
        });
        reply
    }
}

fn run_game<S, F, A>(game: GameId, factory: F, ad: &[u8], m: &[u8], adversary: A) -> GameTranscript
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>),
{
    let scheme = factory();
    let (bt, ct) = match scheme.enc(ad, m) {
        Ok(pair) => pair,
        Err(_) => {
            return GameTranscript {
                game,
                challenge_ad: ad.to_vec(),
                challenge_ct: Vec::new(),
                queries: Vec::new(),
                outcome: false,
            }
        }
    };
    let mut oracle = DecOracle {
        scheme: &scheme,
        game,
        bt: &bt,
        challenge_ad: ad,
        challenge_ct: &ct,
        challenge_m: m,
        queries: Vec::new(),
        win: None,
    };
    adversary(ad, &ct, &mut oracle);
    GameTranscript {
        game,
        challenge_ad: ad.to_vec(),
        challenge_ct: ct.clone(),
        queries: oracle.queries,
        outcome: oracle.win.unwrap_or(false),
    }
}

/// Correctness game. Returns true iff the scheme broke its promise that the
/// authentic pair decrypts to the challenge message.
pub fn run_safe<S, F, A>(factory: F, ad: &[u8], m: &[u8], adversary: A) -> bool
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>),
{
    run_safe_transcript(factory, ad, m, adversary).outcome
}

/// [`run_safe`] with the full transcript.
pub fn run_safe_transcript<S, F, A>(factory: F, ad: &[u8], m: &[u8], adversary: A) -> GameTranscript
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>),
{
    run_game(GameId::Safe, factory, ad, m, adversary)
}

/// Ciphertext-integrity game. Returns true iff some query other than the
/// challenge pair was accepted by decryption.
pub fn run_int<S, F, A>(factory: F, ad: &[u8], m: &[u8], adversary: A) -> bool
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>),
{
    run_int_transcript(factory, ad, m, adversary).outcome
}

/// [`run_int`] with the full transcript.
pub fn run_int_transcript<S, F, A>(factory: F, ad: &[u8], m: &[u8], adversary: A) -> GameTranscript
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>),
{
    run_game(GameId::Int, factory, ad, m, adversary)
}

/// Indistinguishability game for one world bit. Loses immediately unless
/// the candidate messages are equivalent; otherwise encrypts the selected
/// message and returns the adversary's output bit as the game outcome.
pub fn run_ind<S, F, A>(
    factory: F,
    world: bool,
    ad: &[u8],
    m0: &[u8],
    m1: &[u8],
    adversary: A,
) -> bool
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &[u8], &[u8], &mut DecOracle<'_, S>) -> bool,
{
    run_ind_transcript(factory, world, ad, m0, m1, adversary).outcome
}

/// [`run_ind`] with the full transcript.
pub fn run_ind_transcript<S, F, A>(
    factory: F,
    world: bool,
    ad: &[u8],
    m0: &[u8],
    m1: &[u8],
    adversary: A,
) -> GameTranscript
where
    S: Scheme,
    F: FnOnce() -> S,
    A: FnOnce(&[u8], &[u8], &[u8], &[u8], &mut DecOracle<'_, S>) -> bool,
{
    if !msg_equiv(m0, m1) {
        return GameTranscript {
            game: GameId::Ind,
            challenge_ad: ad.to_vec(),
            challenge_ct: Vec::new(),
            queries: Vec::new(),
            outcome: false,
        };
    }
    let scheme = factory();
    let chosen = if world { m1 } else { m0 };
    let (bt, ct) = match scheme.enc(ad, chosen) {
        Ok(pair) => pair,
        Err(_) => {
            return GameTranscript {
                game: GameId::Ind,
                challenge_ad: ad.to_vec(),
                challenge_ct: Vec::new(),
                queries: Vec::new(),
                outcome: false,
            }
        }
    };
    let mut oracle = DecOracle {
        scheme: &scheme,
        game: GameId::Ind,
        bt: &bt,
        challenge_ad: ad,
        challenge_ct: &ct,
        challenge_m: chosen,
        queries: Vec::new(),
        win: None,
    };
    let bit = adversary(ad, &ct, m0, m1, &mut oracle);
    GameTranscript {
        game: GameId::Ind,
        challenge_ad: ad.to_vec(),
        challenge_ct: ct.clone(),
        queries: oracle.queries,
        outcome: bit,
    }
}

/// Fresh uniformly random key. Game factories use this with a seeded RNG so
/// runs stay reproducible.
pub fn sample_key<R: RngCore>(rng: &mut R, len: usize) -> Vec<u8> {
    let mut key = vec![0u8; len];
    rng.fill_bytes(&mut key);
    key
}

fn flip_random_bit(buf: &mut [u8], rng: &mut ChaCha8Rng) {
    let bit = rng.random_range(0..buf.len() * 8);
    buf[bit / 8] ^= 1 << (bit % 8);
}

/// Derives one mutated pair, guaranteed different from `(ad, ct)`.
pub fn mutate_pair(ad: &[u8], ct: &[u8], rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>) {
    let mut ad = ad.to_vec();
    let mut ct = ct.to_vec();
    let kind = rng.random_range(0..4u8);
    match kind {
        0 if !ct.is_empty() => flip_random_bit(&mut ct, rng),
        1 if !ad.is_empty() => flip_random_bit(&mut ad, rng),
        2 if !ct.is_empty() => {
            ct.pop();
        }
        _ => ct.push(rng.random()),
    }
    (ad, ct)
}

/// Single-query adversary replaying a seeded mutation of the challenge.
pub fn mutation_adversary<S: Scheme>(
    seed: u64,
) -> impl FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>) {
    move |ad, ct, oracle| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (bad_ad, bad_ct) = mutate_pair(ad, ct, &mut rng);
        oracle.query(&bad_ad, &bad_ct);
    }
}

/// Adversary issuing `queries` seeded random pairs plus one authentic replay.
pub fn random_query_adversary<S: Scheme>(
    seed: u64,
    queries: usize,
) -> impl FnOnce(&[u8], &[u8], &mut DecOracle<'_, S>) {
    move |ad, ct, oracle| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..queries {
            let ad_len = rng.random_range(0..24);
            let ct_len = rng.random_range(0..24);
            let mut q_ad = vec![0u8; ad_len];
            let mut q_ct = vec![0u8; ct_len];
            rng.fill_bytes(&mut q_ad);
            rng.fill_bytes(&mut q_ct);
            oracle.query(&q_ad, &q_ct);
        }
        oracle.query(ad, ct);
    }
}

//! Injective encoding of `(ad, payload)` into block/tweak pairs plus an
//! offset.
//!
//! Every block holds associated data in its front and payload in its tail;
//! all region boundaries fall on multiples of the profile's alignment
//! granularity, so bulk copies never shift data by sub-word amounts. The
//! encoding rules:
//!
//! * Block 1 carries associated data only. If the payload is nonempty, each
//!   following block carries one payload fragment of `chain_len` bytes at
//!   its tail (the final fragment is padded up to a multiple of the
//!   alignment value, with its last byte recording the payload length mod
//!   256); once the payload is exhausted, remaining associated data fills
//!   whole blocks.
//! * Associated data that runs out before its capacity is terminated with
//!   [`AD_TERMINATOR`] and zero-filled.
//! * Tweaks disambiguate: block 1 is tweaked iff the payload is empty; the
//!   last payload block is tweaked iff associated data continues after it;
//!   the last block is tweaked iff the payload was padded.
//! * The final offset signals whether the associated data was padded.
//!
//! [`decode`] inverts [`encode`] on its image and rejects everything else;
//! [`encode_reference`] is a naive non-streaming oracle for tests.

use crate::backend::{BackendProfile, Tweak};
use crate::Error;

/// Byte marking the end of associated data inside zero padding.
pub const AD_TERMINATOR: u8 = 0x80;

/// Selects one of the two final offset constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Offset {
    /// Associated data filled its capacity exactly.
    Exact,
    /// Associated data was padded.
    Padded,
}

impl Offset {
    pub fn from_padded(padded: bool) -> Offset {
        if padded {
            Offset::Padded
        } else {
            Offset::Exact
        }
    }

    pub fn is_padded(self) -> bool {
        matches!(self, Offset::Padded)
    }

    pub fn selector(self) -> u8 {
        self.is_padded() as u8
    }
}

/// One element of an encoded stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodedItem {
    /// A block/tweak pair fed to the compression function.
    Body { block: Vec<u8>, tweak: Tweak },
    /// Stream terminator carrying the offset selector.
    Final(Offset),
}

/// An ordered sequence of body items terminated by exactly one final item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedStream {
    items: Vec<EncodedItem>,
}

impl EncodedStream {
    /// Wraps raw items after checking the stream shape: one or more bodies
    /// followed by exactly one final item.
    pub fn from_items(items: Vec<EncodedItem>) -> Result<EncodedStream, Error> {
        if items.len() < 2 {
            return Err(Error::Decode);
        }
        let (last, bodies) = items.split_last().unwrap();
        if !matches!(last, EncodedItem::Final(_)) {
            return Err(Error::Decode);
        }
        if bodies.iter().any(|it| matches!(it, EncodedItem::Final(_))) {
            return Err(Error::Decode);
        }
        Ok(EncodedStream { items })
    }

    pub fn items(&self) -> &[EncodedItem] {
        &self.items
    }

    pub fn into_items(self) -> Vec<EncodedItem> {
        self.items
    }

    pub fn body_count(&self) -> usize {
        self.items.len() - 1
    }

    /// Blocks and tweaks in stream order.
    pub fn bodies(&self) -> impl Iterator<Item = (&[u8], Tweak)> {
        self.items.iter().filter_map(|it| match it {
            EncodedItem::Body { block, tweak } => Some((block.as_slice(), *tweak)),
            EncodedItem::Final(_) => None,
        })
    }

    pub fn final_offset(&self) -> Offset {
        match self.items.last() {
            Some(EncodedItem::Final(offset)) => *offset,
            _ => unreachable!("stream shape checked at construction"),
        }
    }

    /// Wire form used by vector files: each body as `tweak byte || block`,
    /// the final item as `0xff || selector byte`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                EncodedItem::Body { block, tweak } => {
                    out.push(tweak.bit());
                    out.extend_from_slice(block);
                }
                EncodedItem::Final(offset) => {
                    out.push(0xff);
                    out.push(offset.selector());
                }
            }
        }
        out
    }
}

/// Derived geometry of one encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutPlan {
    /// Total number of body blocks.
    pub block_count: usize,
    /// 1-based index of the last payload-carrying block; 0 when the payload
    /// is empty.
    pub last_payload_block: usize,
    /// Residual payload length: `payload_len % chain_len`.
    pub residual: usize,
    /// Size of the final payload fragment region after padding.
    pub final_fragment: usize,
    /// Whether the payload was padded (residual nonzero).
    pub payload_padded: bool,
    /// Whether the associated data falls short of its capacity.
    pub ad_padded: bool,
    /// Total associated-data capacity over all blocks.
    pub ad_capacity: usize,
}

/// Computes the normative geometry for the given input lengths.
pub fn plan_layout(profile: &BackendProfile, ad_len: usize, payload_len: usize) -> LayoutPlan {
    let c = profile.chain_len();
    let d = profile.block_len();
    let align = profile.align();

    if payload_len == 0 {
        let block_count = usize::max(1, ad_len.div_ceil(d));
        let ad_capacity = block_count * d;
        return LayoutPlan {
            block_count,
            last_payload_block: 0,
            residual: 0,
            final_fragment: 0,
            payload_padded: false,
            ad_padded: ad_len < ad_capacity,
            ad_capacity,
        };
    }

    let residual = payload_len % c;
    let fragments = payload_len.div_ceil(c);
    let last_payload_block = 1 + fragments;
    let payload_padded = residual != 0;
    // Padding always leaves room for the length byte, so a residual that is
    // already a multiple of the alignment value still grows by one step.
    let final_fragment = if payload_padded {
        (residual / align + 1) * align
    } else {
        c
    };
    let capacity_through_last = d + (fragments - 1) * (d - c) + (d - final_fragment);
    let extra_blocks = ad_len.saturating_sub(capacity_through_last).div_ceil(d);
    let block_count = last_payload_block + extra_blocks;
    let ad_capacity = capacity_through_last + extra_blocks * d;
    LayoutPlan {
        block_count,
        last_payload_block,
        residual,
        final_fragment,
        payload_padded,
        ad_padded: ad_len < ad_capacity,
        ad_capacity,
    }
}

fn tweak_for(plan: &LayoutPlan, index: usize) -> Tweak {
    let n = plan.block_count;
    let j = plan.last_payload_block;
    if j == 0 {
        return Tweak(index == 1);
    }
    let switches_to_ad = index == j && j < n;
    let flags_padding = index == n && plan.payload_padded;
    Tweak(switches_to_ad || flags_padding)
}

/// Receives one record per block region the encoder fills. Used to audit
/// that every region offset and length is a multiple of the profile's
/// alignment granularity.
pub trait RegionAudit {
    fn record(&mut self, offset: usize, len: usize);
}

/// Streaming producer of [`EncodedItem`]s.
///
/// Reads `ad` and `payload` strictly left to right, one block per step;
/// state is bounded by one block buffer plus counters. Consumed input is
/// never revisited.
pub struct Encoder<'a> {
    profile: &'a BackendProfile,
    plan: LayoutPlan,
    ad: &'a [u8],
    payload: &'a [u8],
    ad_pos: usize,
    payload_pos: usize,
    next_block: usize,
    finished: bool,
    audit: Option<&'a mut dyn RegionAudit>,
}

impl<'a> Encoder<'a> {
    pub fn new(profile: &'a BackendProfile, ad: &'a [u8], payload: &'a [u8]) -> Encoder<'a> {
        Encoder {
            profile,
            plan: plan_layout(profile, ad.len(), payload.len()),
            ad,
            payload,
            ad_pos: 0,
            payload_pos: 0,
            next_block: 1,
            finished: false,
            audit: None,
        }
    }

    /// Like [`Encoder::new`], but reporting every region fill to `audit`.
    pub fn with_audit(
        profile: &'a BackendProfile,
        ad: &'a [u8],
        payload: &'a [u8],
        audit: &'a mut dyn RegionAudit,
    ) -> Encoder<'a> {
        let mut enc = Encoder::new(profile, ad, payload);
        enc.audit = Some(audit);
        enc
    }

    pub fn plan(&self) -> LayoutPlan {
        self.plan
    }

    fn record_region(&mut self, offset: usize, len: usize) {
        debug_assert!(offset % self.profile.align() == 0);
        debug_assert!(len % self.profile.align() == 0);
        if let Some(audit) = self.audit.as_deref_mut() {
            audit.record(offset, len);
        }
    }

    /// Fills `len` bytes at `offset` from the conceptual ad stream
    /// `ad || AD_TERMINATOR || 0*`. The terminator is only emitted when the
    /// plan says the associated data is padded.
    fn fill_ad_region(&mut self, block: &mut [u8], offset: usize, len: usize) {
        self.record_region(offset, len);
        let start = self.ad_pos;
        let avail = self.ad.len().saturating_sub(start);
        let take = avail.min(len);
        if take > 0 {
            block[offset..offset + take].copy_from_slice(&self.ad[start..start + take]);
        }
        if self.plan.ad_padded && take < len && start + take == self.ad.len() {
            block[offset + take] = AD_TERMINATOR;
        }
        self.ad_pos += len;
    }

    /// Fills a payload region of `region_len` bytes at `offset`, of which
    /// `frag_len` are payload; the remainder is zero padding.
    fn fill_payload_region(
        &mut self,
        block: &mut [u8],
        offset: usize,
        region_len: usize,
        frag_len: usize,
    ) {
        self.record_region(offset, region_len);
        let start = self.payload_pos;
        block[offset..offset + frag_len].copy_from_slice(&self.payload[start..start + frag_len]);
        self.payload_pos += frag_len;
    }
}

impl Iterator for Encoder<'_> {
    type Item = EncodedItem;

    fn next(&mut self) -> Option<EncodedItem> {
        if self.finished {
            return None;
        }
        let plan = self.plan;
        if self.next_block > plan.block_count {
            self.finished = true;
            return Some(EncodedItem::Final(Offset::from_padded(plan.ad_padded)));
        }
        let index = self.next_block;
        self.next_block += 1;

        let c = self.profile.chain_len();
        let d = self.profile.block_len();
        let j = plan.last_payload_block;
        let mut block = vec![0u8; d];

        if j == 0 || index == 1 || index > j {
            // associated data only
            self.fill_ad_region(&mut block, 0, d);
        } else if index < j {
            self.fill_ad_region(&mut block, 0, d - c);
            self.fill_payload_region(&mut block, d - c, c, c);
        } else {
            let region = plan.final_fragment;
            let frag = if plan.payload_padded { plan.residual } else { c };
            self.fill_ad_region(&mut block, 0, d - region);
            self.fill_payload_region(&mut block, d - region, region, frag);
            if plan.payload_padded {
                block[d - 1] = (self.payload.len() & 0xff) as u8;
            }
        }
        Some(EncodedItem::Body {
            block,
            tweak: tweak_for(&plan, index),
        })
    }
}

/// Encodes `(ad, payload)` by materializing the streaming producer.
pub fn encode(profile: &BackendProfile, ad: &[u8], payload: &[u8]) -> EncodedStream {
    EncodedStream {
        items: Encoder::new(profile, ad, payload).collect(),
    }
}

/// Naive non-streaming encoder, kept as an independent oracle for tests.
///
/// Builds the padded ad stream and the padded payload in full, slices both
/// into regions, and derives all geometry from scratch. Must agree with
/// [`encode`] on every input.
pub fn encode_reference(profile: &BackendProfile, ad: &[u8], payload: &[u8]) -> EncodedStream {
    let c = profile.chain_len();
    let d = profile.block_len();
    let align = profile.align();

    // geometry, recomputed independently of plan_layout
    let (block_count, last_payload_block, fragment_region) = if payload.is_empty() {
        (usize::max(1, ad.len().div_ceil(d)), 0, 0)
    } else {
        let residual = payload.len() % c;
        let fragments = payload.len().div_ceil(c);
        let region = if residual != 0 {
            (residual / align + 1) * align
        } else {
            c
        };
        let through_last = d + (fragments - 1) * (d - c) + (d - region);
        let extra = ad.len().saturating_sub(through_last).div_ceil(d);
        (1 + fragments + extra, 1 + fragments, region)
    };
    let n = block_count;
    let j = last_payload_block;
    let ad_capacity = if j == 0 {
        n * d
    } else {
        d + (j - 2) * (d - c) + (d - fragment_region) + (n - j) * d
    };

    let mut ad_stream = ad.to_vec();
    if ad.len() < ad_capacity {
        ad_stream.push(AD_TERMINATOR);
        ad_stream.resize(ad_capacity, 0);
    }
    let payload_padded = !payload.is_empty() && payload.len() % c != 0;
    let mut padded_payload = payload.to_vec();
    if payload_padded {
        padded_payload.resize(payload.len() - payload.len() % c + fragment_region, 0);
        *padded_payload.last_mut().unwrap() = (payload.len() & 0xff) as u8;
    }

    let mut items = Vec::with_capacity(n + 1);
    let mut ad_pos = 0;
    let mut m_pos = 0;
    for index in 1..=n {
        let (ad_take, m_take) = if j == 0 || index == 1 || index > j {
            (d, 0)
        } else if index < j {
            (d - c, c)
        } else {
            (d - fragment_region, fragment_region)
        };
        let mut block = vec![0u8; d];
        block[..ad_take].copy_from_slice(&ad_stream[ad_pos..ad_pos + ad_take]);
        ad_pos += ad_take;
        if m_take > 0 {
            block[d - m_take..].copy_from_slice(&padded_payload[m_pos..m_pos + m_take]);
            m_pos += m_take;
        }
        // tweak rules, restated: first block iff payload empty; last payload
        // block iff ad continues; last block iff payload padded.
        let tweak = if j == 0 {
            index == 1
        } else {
            (index == j && j < n) || (index == n && payload_padded)
        };
        items.push(EncodedItem::Body {
            block,
            tweak: Tweak(tweak),
        });
    }
    items.push(EncodedItem::Final(Offset::from_padded(ad.len() < ad_capacity)));
    EncodedStream { items }
}

fn unpad_ad(mut stream: Vec<u8>, offset: Offset) -> Result<Vec<u8>, Error> {
    match offset {
        Offset::Exact => Ok(stream),
        Offset::Padded => {
            while stream.last() == Some(&0) {
                stream.pop();
            }
            if stream.pop() != Some(AD_TERMINATOR) {
                return Err(Error::Decode);
            }
            Ok(stream)
        }
    }
}

/// Recovers `(ad, payload)` from a stream produced by [`encode`].
///
/// Any stream outside the image of [`encode`] is rejected with a uniform
/// error; no partial result is exposed.
pub fn decode(profile: &BackendProfile, stream: &EncodedStream) -> Result<(Vec<u8>, Vec<u8>), Error> {
    let c = profile.chain_len();
    let d = profile.block_len();
    let align = profile.align();

    let bodies: Vec<(&[u8], Tweak)> = stream.bodies().collect();
    if bodies.iter().any(|(block, _)| block.len() != d) {
        return Err(Error::Decode);
    }
    let n = bodies.len();
    let tweaked = |index: usize| bodies[index - 1].1 .0; // 1-based
    let offset = stream.final_offset();

    let (ad, payload) = if tweaked(1) {
        // payload empty: every block is associated data
        if (2..=n).any(tweaked) {
            return Err(Error::Decode);
        }
        let mut ad_stream = Vec::with_capacity(n * d);
        for (block, _) in &bodies {
            ad_stream.extend_from_slice(block);
        }
        (unpad_ad(ad_stream, offset)?, Vec::new())
    } else {
        if n < 2 {
            return Err(Error::Decode);
        }
        // the unique switch tweak in 2..n-1 marks the last payload block;
        // absent, the payload runs to the final block
        let mut j = n;
        let mut found = false;
        for index in 2..n {
            if tweaked(index) {
                if found {
                    return Err(Error::Decode);
                }
                j = index;
                found = true;
            }
        }
        let payload_padded = tweaked(n);
        let (residual, region) = if payload_padded {
            let length_byte = bodies[j - 1].0[d - 1];
            let residual = (length_byte as usize) % c;
            if residual == 0 {
                return Err(Error::Decode);
            }
            let region = (residual / align + 1) * align;
            let padding = &bodies[j - 1].0[d - region + residual..d - 1];
            if padding.iter().any(|&b| b != 0) {
                return Err(Error::Decode);
            }
            let total = (j - 2) * c + residual;
            if length_byte != (total & 0xff) as u8 {
                return Err(Error::Decode);
            }
            (residual, region)
        } else {
            (c, c)
        };

        let mut payload = Vec::with_capacity((j - 2) * c + residual);
        for index in 2..j {
            payload.extend_from_slice(&bodies[index - 1].0[d - c..]);
        }
        payload.extend_from_slice(&bodies[j - 1].0[d - region..d - region + residual]);

        let mut ad_stream = Vec::new();
        ad_stream.extend_from_slice(bodies[0].0);
        for index in 2..j {
            ad_stream.extend_from_slice(&bodies[index - 1].0[..d - c]);
        }
        ad_stream.extend_from_slice(&bodies[j - 1].0[..d - region]);
        for index in j + 1..=n {
            ad_stream.extend_from_slice(bodies[index - 1].0);
        }
        (unpad_ad(ad_stream, offset)?, payload)
    };

    // a valid stream is exactly the re-encoding of its preimage; this also
    // rejects non-minimal streams and stray padding content
    if encode(profile, &ad, &payload) != *stream {
        return Err(Error::Decode);
    }
    Ok((ad, payload))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::BackendId;

    fn tiny_profile() -> BackendProfile {
        // chain 1 / block 2 / alignment 1: the smallest legal geometry
        BackendProfile::new(BackendId::Toy, 1, 2, 1, vec![0x00], 1)
    }

    fn body(block: &[u8], tweak: bool) -> EncodedItem {
        EncodedItem::Body {
            block: block.to_vec(),
            tweak: Tweak(tweak),
        }
    }

    #[test]
    fn plan_toy_example() {
        let plan = plan_layout(&BackendProfile::toy(), 10, 5);
        assert_eq!(plan.block_count, 3);
        assert_eq!(plan.last_payload_block, 3);
        assert_eq!(plan.residual, 1);
        assert_eq!(plan.final_fragment, 2);
        assert!(plan.payload_padded);
        assert_eq!(plan.ad_capacity, 18);
        assert!(plan.ad_padded);
    }

    #[test]
    fn plan_empty_everything() {
        for profile in [BackendProfile::toy(), BackendProfile::sha256()] {
            let plan = plan_layout(&profile, 0, 0);
            assert_eq!(plan.block_count, 1);
            assert_eq!(plan.last_payload_block, 0);
            assert_eq!(plan.ad_capacity, profile.block_len());
            assert!(plan.ad_padded);
        }
    }

    #[test]
    fn plan_ad_only_exact_fit() {
        let plan = plan_layout(&tiny_profile(), 8, 0);
        assert_eq!(plan.block_count, 4);
        assert_eq!(plan.last_payload_block, 0);
        assert_eq!(plan.ad_capacity, 8);
        assert!(!plan.ad_padded);
    }

    #[test]
    fn encode_ad_only_stream() {
        let profile = tiny_profile();
        let ad = [0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08];
        let stream = encode(&profile, &ad, &[]);
        assert_eq!(
            stream.items(),
            &[
                body(&[0x01, 0x02], true),
                body(&[0x03, 0x04], false),
                body(&[0x05, 0x06], false),
                body(&[0x07, 0x08], false),
                EncodedItem::Final(Offset::Exact),
            ]
        );
    }

    #[test]
    fn encode_payload_only_stream() {
        let profile = tiny_profile();
        let stream = encode(&profile, &[], &[0x41, 0x42, 0x43]);
        assert_eq!(
            stream.items(),
            &[
                body(&[0x80, 0x00], false),
                body(&[0x00, 0x41], false),
                body(&[0x00, 0x42], false),
                body(&[0x00, 0x43], false),
                EncodedItem::Final(Offset::Padded),
            ]
        );
    }

    #[test]
    fn encode_toy_mixed_stream() {
        let profile = BackendProfile::toy();
        let ad: Vec<u8> = (0xa0..0xaa).collect();
        let payload: Vec<u8> = (0xb0..0xb5).collect();
        let stream = encode(&profile, &ad, &payload);
        assert_eq!(
            stream.items(),
            &[
                body(&[0xa0, 0xa1, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7], false),
                body(&[0xa8, 0xa9, 0x80, 0x00, 0xb0, 0xb1, 0xb2, 0xb3], false),
                body(&[0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xb4, 0x05], true),
                EncodedItem::Final(Offset::Padded),
            ]
        );
    }

    #[test]
    fn encode_empty_everything() {
        let stream = encode(&BackendProfile::toy(), &[], &[]);
        assert_eq!(
            stream.items(),
            &[
                body(&[0x80, 0, 0, 0, 0, 0, 0, 0], true),
                EncodedItem::Final(Offset::Padded),
            ]
        );
        // determinism
        assert_eq!(stream, encode(&BackendProfile::toy(), &[], &[]));
    }

    #[test]
    fn decode_inverts_the_examples() {
        let tiny = tiny_profile();
        let toy = BackendProfile::toy();
        let cases: [(&BackendProfile, Vec<u8>, Vec<u8>); 4] = [
            (&tiny, (1..=8).collect(), vec![]),
            (&tiny, vec![], vec![0x41, 0x42, 0x43]),
            (&toy, (0xa0..0xaa).collect(), (0xb0..0xb5).collect()),
            (&toy, vec![], vec![]),
        ];
        for (profile, ad, payload) in cases {
            let stream = encode(profile, &ad, &payload);
            assert_eq!(decode(profile, &stream).unwrap(), (ad, payload));
        }
    }

    #[test]
    fn decode_rejects_double_switch_tweak() {
        let profile = BackendProfile::toy();
        let ad: Vec<u8> = (0xa0..0xaa).collect();
        let payload: Vec<u8> = (0xb0..0xb5).collect();
        // force a second candidate for the last payload block
        let mut items = encode(&profile, &ad, &payload).into_items();
        let n = items.len() - 1;
        for item in items.iter_mut().take(n).skip(1).take(1) {
            if let EncodedItem::Body { tweak, .. } = item {
                *tweak = Tweak(true);
            }
        }
        let stream = EncodedStream::from_items(items).unwrap();
        assert_eq!(decode(&profile, &stream), Err(Error::Decode));
    }

    #[test]
    fn tweak_and_offset_mutations_never_alias_the_input() {
        // A flipped tweak or offset may still be a valid stream, but then it
        // is the encoding of a different pair; it must never decode to the
        // original input, and a successful decode must re-encode to the
        // mutated stream exactly.
        let profile = BackendProfile::toy();
        let ad: Vec<u8> = (1..=11).collect();
        let payload: Vec<u8> = (0x30..0x3a).collect();
        let original = encode(&profile, &ad, &payload);
        let items = original.items();

        for position in 0..items.len() {
            let mut mutated = items.to_vec();
            match &mut mutated[position] {
                EncodedItem::Body { tweak, .. } => *tweak = Tweak(!tweak.0),
                EncodedItem::Final(offset) => {
                    *offset = Offset::from_padded(!offset.is_padded())
                }
            }
            let stream = EncodedStream::from_items(mutated).unwrap();
            match decode(&profile, &stream) {
                Err(err) => assert_eq!(err, Error::Decode),
                Ok(pair) => {
                    assert_ne!(pair, (ad.clone(), payload.clone()), "position {position}");
                    assert_eq!(encode(&profile, &pair.0, &pair.1), stream);
                }
            }
        }
    }

    #[test]
    fn truncated_streams_never_decode_to_the_input() {
        // no shorter valid encoding of the same input exists
        let profile = BackendProfile::toy();
        let inputs: [(Vec<u8>, Vec<u8>); 3] = [
            ((1..=11).collect(), (0x30..0x3a).collect()),
            ((1..=16).collect(), vec![]),
            (vec![], (0x30..0x39).collect()),
        ];
        for (ad, payload) in inputs {
            let mut items = encode(&profile, &ad, &payload).into_items();
            items.remove(items.len() - 2);
            match EncodedStream::from_items(items) {
                Ok(stream) => match decode(&profile, &stream) {
                    Err(err) => assert_eq!(err, Error::Decode),
                    Ok(pair) => assert_ne!(pair, (ad.clone(), payload.clone())),
                },
                Err(err) => assert_eq!(err, Error::Decode),
            }
        }
    }

    #[test]
    fn decode_rejects_nonzero_padding() {
        let profile = BackendProfile::toy();
        // residual 2 pads to a region of 4, leaving one zero byte between
        // the payload tail and the length byte
        let payload: Vec<u8> = (0x50..0x5a).collect(); // 10 bytes, residual 2
        let stream = encode(&profile, &[], &payload);
        let mut items = stream.into_items();
        let body_count = items.len() - 1;
        if let EncodedItem::Body { block, .. } = &mut items[body_count - 1] {
            // zero gap sits between payload tail and length byte
            let d = profile.block_len();
            assert_eq!(block[d - 2], 0);
            block[d - 2] = 0x01;
        }
        let stream = EncodedStream::from_items(items).unwrap();
        assert_eq!(decode(&profile, &stream), Err(Error::Decode));
    }

    #[test]
    fn decode_rejects_missing_terminator() {
        let profile = tiny_profile();
        // hand-built: claims padded ad but carries no terminator
        let stream = EncodedStream::from_items(vec![
            body(&[0x00, 0x00], true),
            EncodedItem::Final(Offset::Padded),
        ])
        .unwrap();
        assert_eq!(decode(&profile, &stream), Err(Error::Decode));
    }

    #[test]
    fn length_byte_wraps_at_256() {
        let profile = BackendProfile::toy();
        let payload: Vec<u8> = (0..=256).map(|i| (i % 251) as u8).collect(); // 257 bytes
        let ad = [0xccu8; 3];
        let stream = encode(&profile, &ad, &payload);
        // residual 1, so the length byte records 257 mod 256 = 1
        let last_block = stream.bodies().last().unwrap().0;
        assert_eq!(*last_block.last().unwrap(), 0x01);
        assert_eq!(decode(&profile, &stream).unwrap(), (ad.to_vec(), payload));
    }

    #[test]
    fn reference_encoder_agrees_on_small_sweep() {
        for profile in [tiny_profile(), BackendProfile::toy()] {
            for ad_len in 0..=12 {
                for payload_len in 0..=9 {
                    let ad: Vec<u8> = (0..ad_len).map(|i| 0x41 + (i % 2) as u8).collect();
                    let payload: Vec<u8> = (0..payload_len).map(|i| 0x61 + (i % 2) as u8).collect();
                    assert_eq!(
                        encode(&profile, &ad, &payload),
                        encode_reference(&profile, &ad, &payload),
                        "ad_len={ad_len} payload_len={payload_len}"
                    );
                }
            }
        }
    }

    #[test]
    fn stream_shape_matches_plan() {
        let profile = BackendProfile::toy();
        for ad_len in [0usize, 1, 7, 8, 9, 17, 24] {
            for payload_len in [0usize, 1, 2, 4, 5, 8, 11] {
                let ad = vec![0x21u8; ad_len];
                let payload = vec![0x22u8; payload_len];
                let plan = plan_layout(&profile, ad_len, payload_len);
                let stream = encode(&profile, &ad, &payload);
                assert_eq!(stream.body_count(), plan.block_count);
                assert_eq!(stream.final_offset().is_padded(), plan.ad_padded);
            }
        }
    }

    #[test]
    fn from_items_rejects_malformed_shapes() {
        assert!(EncodedStream::from_items(vec![]).is_err());
        assert!(EncodedStream::from_items(vec![EncodedItem::Final(Offset::Exact)]).is_err());
        assert!(EncodedStream::from_items(vec![body(&[0; 8], false)]).is_err());
        assert!(EncodedStream::from_items(vec![
            EncodedItem::Final(Offset::Exact),
            EncodedItem::Final(Offset::Exact),
        ])
        .is_err());
    }

    struct Regions(Vec<(usize, usize)>);

    impl RegionAudit for Regions {
        fn record(&mut self, offset: usize, len: usize) {
            self.0.push((offset, len));
        }
    }

    #[test]
    fn regions_respect_alignment() {
        let profile = BackendProfile::toy();
        for ad_len in 0..=20 {
            for payload_len in 0..=12 {
                let ad = vec![0x5au8; ad_len];
                let payload = vec![0xc3u8; payload_len];
                let mut sink = Regions(Vec::new());
                let _: Vec<_> =
                    Encoder::with_audit(&profile, &ad, &payload, &mut sink).collect();
                for (offset, len) in sink.0 {
                    assert_eq!(offset % profile.align(), 0);
                    assert_eq!(len % profile.align(), 0);
                }
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::word::ArxWord;
use crate::{Error, Result};

/// Rotation constants of the extended quarter-round.
pub const ECHACHA_ROTATIONS: [u32; 6] = [16, 12, 8, 7, 4, 2];

/// Line ordering of the quarter-round.
///
/// `PaperOrder` is the six-line sequence
///
/// ```text
/// a += b; d = (d ^ a) <<< r0
/// b += c; c = (c ^ b) <<< r1
/// c += d; b = (b ^ c) <<< r2
/// d += a; c = (c ^ d) <<< r3
/// a += b; d = (d ^ a) <<< r4
/// b += c; c = (c ^ b) <<< r5
/// ```
///
/// `RfcStyle` keeps ChaCha's targets (`a += b; d ^= a` / `c += d; b ^= c`
/// alternating) and appends a third pair for the two extra rotations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QrfVariant {
    #[default]
    PaperOrder,
    RfcStyle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QrfQuad<W = u32> {
    pub a: W,
    pub b: W,
    pub c: W,
    pub d: W,
}

impl<W: ArxWord> QrfQuad<W> {
    pub const fn new(a: W, b: W, c: W, d: W) -> Self {
        QrfQuad { a, b, c, d }
    }

    pub fn to_array(self) -> [W; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn xor(self, other: Self) -> Self {
        QrfQuad::new(self.a ^ other.a, self.b ^ other.b, self.c ^ other.c, self.d ^ other.d)
    }

    pub fn weight(self) -> u32 {
        self.a.weight() + self.b.weight() + self.c.weight() + self.d.weight()
    }

    pub fn is_zero(self) -> bool {
        self == QrfQuad::default()
    }

    /// Bit `i` of the 4·BITS-bit quad, words in `a, b, c, d` order.
    pub fn bit(self, i: u32) -> bool {
        let w = self.to_array()[(i / W::BITS) as usize];
        w.bit(i % W::BITS)
    }

    pub fn flip_bit(self, i: u32) -> Self {
        let mut arr = self.to_array();
        arr[(i / W::BITS) as usize] = arr[(i / W::BITS) as usize] ^ W::with_bit(i % W::BITS);
        arr.into()
    }
}

impl<W: ArxWord> From<[W; 4]> for QrfQuad<W> {
    fn from(q: [W; 4]) -> Self {
        QrfQuad::new(q[0], q[1], q[2], q[3])
    }
}

/// A parameterized quarter-round: line ordering plus six rotation amounts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Qrf {
    pub variant: QrfVariant,
    pub rotations: [u32; 6],
}

impl Default for Qrf {
    fn default() -> Self {
        Qrf::echacha()
    }
}

impl Qrf {
    pub const fn echacha() -> Self {
        Qrf {
            variant: QrfVariant::PaperOrder,
            rotations: ECHACHA_ROTATIONS,
        }
    }

    pub const fn rfc_style() -> Self {
        Qrf {
            variant: QrfVariant::RfcStyle,
            rotations: ECHACHA_ROTATIONS,
        }
    }

    /// Quarter-round with substituted rotation constants, each in `1..=31`.
    pub fn with_rotations(variant: QrfVariant, rotations: [u32; 6]) -> Result<Self> {
        if let Some(&r) = rotations.iter().find(|&&r| r == 0 || r >= 32) {
            return Err(Error::RotationOutOfRange(r));
        }
        Ok(Qrf { variant, rotations })
    }

    #[inline]
    pub fn apply<W: ArxWord>(&self, q: QrfQuad<W>) -> QrfQuad<W> {
        let QrfQuad {
            mut a,
            mut b,
            mut c,
            mut d,
        } = q;
        let r = &self.rotations;
        match self.variant {
            QrfVariant::PaperOrder => {
                a = a.add(b);
                d = (d ^ a).rotl(r[0]);
                b = b.add(c);
                c = (c ^ b).rotl(r[1]);
                c = c.add(d);
                b = (b ^ c).rotl(r[2]);
                d = d.add(a);
                c = (c ^ d).rotl(r[3]);
                a = a.add(b);
                d = (d ^ a).rotl(r[4]);
                b = b.add(c);
                c = (c ^ b).rotl(r[5]);
            }
            QrfVariant::RfcStyle => {
                a = a.add(b);
                d = (d ^ a).rotl(r[0]);
                c = c.add(d);
                b = (b ^ c).rotl(r[1]);
                a = a.add(b);
                d = (d ^ a).rotl(r[2]);
                c = c.add(d);
                b = (b ^ c).rotl(r[3]);
                a = a.add(b);
                d = (d ^ a).rotl(r[4]);
                c = c.add(d);
                b = (b ^ c).rotl(r[5]);
            }
        }
        QrfQuad { a, b, c, d }
    }

    /// Inverse of [`Qrf::apply`], undoing the lines last to first.
    pub fn invert<W: ArxWord>(&self, q: QrfQuad<W>) -> QrfQuad<W> {
        let QrfQuad {
            mut a,
            mut b,
            mut c,
            mut d,
        } = q;
        let r = &self.rotations;
        match self.variant {
            QrfVariant::PaperOrder => {
                c = c.rotr(r[5]) ^ b;
                b = b.sub(c);
                d = d.rotr(r[4]) ^ a;
                a = a.sub(b);
                c = c.rotr(r[3]) ^ d;
                d = d.sub(a);
                b = b.rotr(r[2]) ^ c;
                c = c.sub(d);
                c = c.rotr(r[1]) ^ b;
                b = b.sub(c);
                d = d.rotr(r[0]) ^ a;
                a = a.sub(b);
            }
            QrfVariant::RfcStyle => {
                b = b.rotr(r[5]) ^ c;
                c = c.sub(d);
                d = d.rotr(r[4]) ^ a;
                a = a.sub(b);
                b = b.rotr(r[3]) ^ c;
                c = c.sub(d);
                d = d.rotr(r[2]) ^ a;
                a = a.sub(b);
                b = b.rotr(r[1]) ^ c;
                c = c.sub(d);
                d = d.rotr(r[0]) ^ a;
                a = a.sub(b);
            }
        }
        QrfQuad { a, b, c, d }
    }

    /// `rounds` successive applications; zero rounds is the identity.
    pub fn apply_rounds<W: ArxWord>(&self, mut q: QrfQuad<W>, rounds: usize) -> QrfQuad<W> {
        for _ in 0..rounds {
            q = self.apply(q);
        }
        q
    }
}

/// The EChaCha20 quarter-round with its default constants.
pub fn qrf(quad: QrfQuad) -> QrfQuad {
    Qrf::echacha().apply(quad)
}

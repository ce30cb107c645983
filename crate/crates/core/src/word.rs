//! Machine words for ARX arithmetic.
//!
//! The quarter-round and the differential harness are generic over
//! [`ArxWord`] so the same code drives both the real 32-bit cipher and the
//! reduced 8-bit model used for exhaustive cross-checks.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::BitXor;

pub trait ArxWord: Copy + Eq + Hash + Debug + Default + BitXor<Output = Self> + Send + Sync {
    const BITS: u32;
    const ZERO: Self;

    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    /// Left rotation; the amount is reduced modulo `BITS`.
    fn rotl(self, n: u32) -> Self;
    fn rotr(self, n: u32) -> Self;
    fn weight(self) -> u32;
    fn bit(self, i: u32) -> bool;
    fn with_bit(i: u32) -> Self;
    /// Keeps the low `BITS` bits of `x`.
    fn truncate(x: u64) -> Self;
}

macro_rules! arx_word {
    ($t:ty) => {
        impl ArxWord for $t {
            const BITS: u32 = <$t>::BITS;
            const ZERO: Self = 0;

            #[inline(always)]
            fn add(self, rhs: Self) -> Self {
                self.wrapping_add(rhs)
            }
            #[inline(always)]
            fn sub(self, rhs: Self) -> Self {
                self.wrapping_sub(rhs)
            }
            #[inline(always)]
            fn rotl(self, n: u32) -> Self {
                self.rotate_left(n % Self::BITS)
            }
            #[inline(always)]
            fn rotr(self, n: u32) -> Self {
                self.rotate_right(n % Self::BITS)
            }
            #[inline(always)]
            fn weight(self) -> u32 {
                self.count_ones()
            }
            #[inline(always)]
            fn bit(self, i: u32) -> bool {
                (self >> i) & 1 == 1
            }
            #[inline(always)]
            fn with_bit(i: u32) -> Self {
                1 << i
            }
            #[inline(always)]
            fn truncate(x: u64) -> Self {
                x as $t
            }
        }
    };
}

arx_word!(u8);
arx_word!(u16);
arx_word!(u32);

/// Hamming weight of a word slice.
pub fn hamming<W: ArxWord>(words: &[W]) -> u32 {
    words.iter().map(|w| w.weight()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_mod_width() {
        assert_eq!(ArxWord::rotl(1u32, 33), 2);
        assert_eq!(ArxWord::rotl(0x81u8, 9), 0x03);
        assert_eq!(ArxWord::rotr(ArxWord::rotl(0xdeadbeefu32, 13), 13), 0xdeadbeef);
    }

    #[test]
    fn wrapping_add() {
        assert_eq!(ArxWord::add(u32::MAX, 2), 1);
        assert_eq!(ArxWord::sub(0u8, 1), 0xff);
    }
}

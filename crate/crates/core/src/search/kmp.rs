use super::{Engine, MatchReport, Symbol, WordPattern};
use crate::{Error, Result};

/// KMP failure function: `pi[j]` is the length of the longest proper prefix
/// of `P[0..=j]` that is also a suffix of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixTable(Vec<usize>);

impl PrefixTable {
    pub fn from_symbols<T: Symbol>(pattern: &[T]) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let m = pattern.len();
        let mut pi = vec![0usize; m];
        let mut k = 0;
        for i in 1..m {
            while k > 0 && pattern[i] != pattern[k] {
                k = pi[k - 1];
            }
            if pattern[i] == pattern[k] {
                k += 1;
            }
            pi[i] = k;
        }
        Ok(PrefixTable(pi))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for PrefixTable {
    type Output = usize;

    fn index(&self, j: usize) -> &usize {
        &self.0[j]
    }
}

pub fn kmp_preprocess<T: Symbol>(pattern: &WordPattern<T>) -> PrefixTable {
    PrefixTable::from_symbols(pattern.symbols()).expect("WordPattern is never empty")
}

/// Left-to-right KMP scan. Every text symbol is compared once plus once per
/// fallback, so `comparisons <= 2 * text.len()`.
pub fn kmp_search<T: Symbol>(text: &[T], pattern: &WordPattern<T>, table: &PrefixTable) -> MatchReport {
    let p = pattern.symbols();
    let m = p.len();
    let mut report = MatchReport::new(&pattern.id, Engine::Kmp);
    let mut j = 0;
    for (i, &t) in text.iter().enumerate() {
        loop {
            report.comparisons += 1;
            if t == p[j] {
                j += 1;
                break;
            }
            if j == 0 {
                break;
            }
            j = table[j - 1];
        }
        if j == m {
            report.positions.push(i + 1 - m);
            j = table[m - 1];
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(p: &[u8]) -> Vec<usize> {
        PrefixTable::from_symbols(p).unwrap().0
    }

    #[test]
    fn hand_evaluated_tables() {
        assert_eq!(pi(b"AAAA"), vec![0, 1, 2, 3]);
        assert_eq!(pi(b"ABAB"), vec![0, 0, 1, 2]);
        assert_eq!(pi(b"ABCDEFG"), vec![0; 7]);
        assert_eq!(pi(b"AABAAAB"), vec![0, 1, 0, 1, 2, 2, 3]);
    }

    #[test]
    fn word_alphabet_table() {
        let t = PrefixTable::from_symbols(&[7u32, 7, 9, 7, 7, 7]).unwrap();
        assert_eq!(t.as_slice(), &[0, 1, 0, 1, 2, 2]);
    }

    #[test]
    fn empty_rejected() {
        assert!(PrefixTable::from_symbols::<u32>(&[]).is_err());
    }

    #[test]
    fn overlapping_matches() {
        let pat = WordPattern::new("aa", b"AA".to_vec()).unwrap();
        let r = kmp_search(b"AAAA", &pat, &kmp_preprocess(&pat));
        assert_eq!(r.positions, vec![0, 1, 2]);
    }

    #[test]
    fn text_equals_pattern_and_absent() {
        let pat = WordPattern::new("p", vec![1u32, 2, 3]).unwrap();
        let t = kmp_preprocess(&pat);
        assert_eq!(kmp_search(&[1, 2, 3], &pat, &t).positions, vec![0]);
        assert!(kmp_search(&[4, 4, 4, 4], &pat, &t).positions.is_empty());
        assert!(kmp_search(&[], &pat, &t).positions.is_empty());
    }
}

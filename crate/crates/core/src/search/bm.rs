use std::collections::HashMap;

use super::{Engine, MatchReport, Symbol, WordPattern};

/// Rightmost occurrence of each pattern symbol. Stored sparsely so a 2³²
/// word alphabet costs O(m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadCharTable<T: Symbol> {
    last: HashMap<T, usize>,
    m: usize,
}

impl<T: Symbol> BadCharTable<T> {
    pub fn new(pattern: &[T]) -> Self {
        let last = pattern.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        BadCharTable {
            last,
            m: pattern.len(),
        }
    }

    pub fn last_occurrence(&self, c: T) -> Option<usize> {
        self.last.get(&c).copied()
    }

    /// `max(1, m - 1 - last(c))` if `c` occurs in the pattern, else `m`.
    #[inline]
    pub fn shift(&self, c: T) -> usize {
        match self.last.get(&c) {
            Some(&l) => (self.m - 1 - l).max(1),
            None => self.m,
        }
    }
}

/// Strong good-suffix shifts indexed by the number `k` of pattern symbols
/// already matched from the right (`0..=m`). `gs[m]` is the shift after a
/// full match, i.e. the pattern's smallest period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSuffixTable(Vec<usize>);

impl GoodSuffixTable {
    pub fn new<T: Symbol>(p: &[T]) -> Self {
        let m = p.len();
        let suff = suffixes(p);
        // by_pos[j]: shift when the mismatch happens at pattern position j.
        let mut by_pos = vec![m; m];
        let mut j = 0;
        for i in (0..m).rev() {
            if suff[i] == i + 1 {
                while j < m - 1 - i {
                    if by_pos[j] == m {
                        by_pos[j] = m - 1 - i;
                    }
                    j += 1;
                }
            }
        }
        for i in 0..m.saturating_sub(1) {
            by_pos[m - 1 - suff[i]] = m - 1 - i;
        }
        let mut gs: Vec<usize> = (0..m).map(|k| by_pos[m - 1 - k]).collect();
        gs.push(by_pos[0]);
        GoodSuffixTable(gs)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Index<usize> for GoodSuffixTable {
    type Output = usize;

    fn index(&self, k: usize) -> &usize {
        &self.0[k]
    }
}

/// `suff[i]`: length of the longest common suffix of `p[..=i]` and `p`.
fn suffixes<T: Symbol>(p: &[T]) -> Vec<usize> {
    let m = p.len();
    let mut suff = vec![0usize; m];
    suff[m - 1] = m;
    let mut g = m as isize - 1;
    let mut f = m - 1;
    for i in (0..m - 1).rev() {
        let ii = i as isize;
        if ii > g && suff[i + m - 1 - f] < (ii - g) as usize {
            suff[i] = suff[i + m - 1 - f];
        } else {
            if ii < g {
                g = ii;
            }
            f = i;
            while g >= 0 && p[g as usize] == p[(g + (m - 1 - f) as isize) as usize] {
                g -= 1;
            }
            suff[i] = (f as isize - g) as usize;
        }
    }
    suff
}

pub fn bm_preprocess<T: Symbol>(pattern: &WordPattern<T>) -> (BadCharTable<T>, GoodSuffixTable) {
    (
        BadCharTable::new(pattern.symbols()),
        GoodSuffixTable::new(pattern.symbols()),
    )
}

/// Right-to-left Boyer-Moore scan. After `k` matched symbols and a
/// mismatch on text symbol `c`, the window advances by
/// `max(gs[k], bad.shift(c) - k)`; after a full match by `gs[m]`.
pub fn bm_search<T: Symbol>(
    text: &[T],
    pattern: &WordPattern<T>,
    tables: &(BadCharTable<T>, GoodSuffixTable),
) -> MatchReport {
    let (bad, gs) = tables;
    let p = pattern.symbols();
    let m = p.len();
    let n = text.len();
    let mut report = MatchReport::new(&pattern.id, Engine::BoyerMoore);
    let mut s = 0;
    while s + m <= n {
        let mut k = 0;
        while k < m {
            report.comparisons += 1;
            if p[m - 1 - k] != text[s + m - 1 - k] {
                break;
            }
            k += 1;
        }
        if k == m {
            report.positions.push(s);
            s += gs[m];
        } else {
            let c = text[s + m - 1 - k];
            let bc = bad.shift(c) as isize - k as isize;
            s += (gs[k] as isize).max(bc) as usize;
        }
    }
    report
}

use super::{Engine, MatchReport, Symbol, WordPattern};

/// Checks every alignment left to right. O(n·m); the reference the other
/// engines are measured against.
pub fn brute_force_search<T: Symbol>(text: &[T], pattern: &WordPattern<T>) -> MatchReport {
    let p = pattern.symbols();
    let m = p.len();
    let mut report = MatchReport::new(&pattern.id, Engine::BruteForce);
    if text.len() < m {
        return report;
    }
    for s in 0..=text.len() - m {
        let mut j = 0;
        while j < m {
            report.comparisons += 1;
            if text[s + j] != p[j] {
                break;
            }
            j += 1;
        }
        if j == m {
            report.positions.push(s);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let pat = WordPattern::new("p", b"ab".to_vec()).unwrap();
        assert_eq!(brute_force_search(b"ab", &pat).positions, vec![0]);
        assert_eq!(brute_force_search(b"xabab", &pat).positions, vec![1, 3]);
        assert!(brute_force_search(b"a", &pat).positions.is_empty());
        assert!(brute_force_search(b"zzzz", &pat).positions.is_empty());
    }
}

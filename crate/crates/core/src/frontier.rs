/// Non-dominated `(time, log-risk)` pairs at one node.
///
/// Entries are kept sorted by time ascending with log-risk strictly
/// decreasing, so a dominance test is one binary search and an insertion
/// removes a contiguous run of newly dominated entries.
#[derive(Debug, Clone)]
pub struct ParetoFrontier<T> {
    entries: Vec<FrontierEntry<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierEntry<T> {
    pub g_t: f64,
    pub g_ell: f64,
    pub payload: T,
}

impl<T> Default for ParetoFrontier<T> {
    fn default() -> Self {
        ParetoFrontier { entries: Vec::new() }
    }
}

impl<T: Copy> ParetoFrontier<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FrontierEntry<T>] {
        &self.entries
    }

    /// True if some entry is no worse in both time and log-risk.
    pub fn is_dominated(&self, g_t: f64, g_ell: f64) -> bool {
        let idx = self.entries.partition_point(|e| e.g_t <= g_t);
        idx > 0 && self.entries[idx - 1].g_ell <= g_ell
    }

    /// Inserts unless dominated. Entries the newcomer dominates are removed
    /// and handed to `evicted`. Returns whether the pair was inserted.
    pub fn insert(&mut self, g_t: f64, g_ell: f64, payload: T, mut evicted: impl FnMut(T)) -> bool {
        if self.is_dominated(g_t, g_ell) {
            return false;
        }
        let start = self.entries.partition_point(|e| e.g_t < g_t);
        let end = start + self.entries[start..].partition_point(|e| e.g_ell >= g_ell);
        for e in self.entries.drain(start..end) {
            evicted(e.payload);
        }
        self.entries.insert(start, FrontierEntry { g_t, g_ell, payload });
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
        a.0 <= b.0 && a.1 <= b.1
    }

    #[test]
    fn basic_insert_and_evict() {
        let mut f = ParetoFrontier::new();
        assert!(f.insert(5.0, 5.0, 0, |_| {}));
        assert!(f.insert(3.0, 7.0, 1, |_| {}));
        assert!(!f.insert(6.0, 6.0, 2, |_| {}));
        assert!(!f.insert(5.0, 5.0, 3, |_| {}));
        let mut gone = vec![];
        assert!(f.insert(2.0, 4.0, 4, |p| gone.push(p)));
        gone.sort();
        assert_eq!(gone, vec![0, 1]);
        assert_eq!(f.len(), 1);
    }

    proptest! {
        // Small integer grid so ties and exact duplicates are common.
        #[test]
        fn matches_brute_force(points in prop::collection::vec((0u8..12, 0u8..12), 1..60)) {
            let mut f = ParetoFrontier::new();
            let mut alive: Vec<(f64, f64, usize)> = Vec::new();
            for (i, &(t, l)) in points.iter().enumerate() {
                let p = (t as f64, l as f64);
                let expect_dominated = alive.iter().any(|&(at, al, _)| dominates((at, al), p));
                prop_assert_eq!(f.is_dominated(p.0, p.1), expect_dominated);
                let mut evicted = Vec::new();
                let inserted = f.insert(p.0, p.1, i, |x| evicted.push(x));
                prop_assert_eq!(inserted, !expect_dominated);
                if inserted {
                    let mut expect_evicted: Vec<usize> = alive.iter().filter(|&&(at, al, _)| dominates(p, (at, al))).map(|a| a.2).collect();
                    alive.retain(|&(at, al, _)| !dominates(p, (at, al)));
                    alive.push((p.0, p.1, i));
                    expect_evicted.sort();
                    evicted.sort();
                    prop_assert_eq!(evicted, expect_evicted);
                }
                let e = f.entries();
                prop_assert_eq!(e.len(), alive.len());
                for w in e.windows(2) {
                    prop_assert!(w[0].g_t < w[1].g_t && w[0].g_ell > w[1].g_ell);
                }
            }
        }
    }
}

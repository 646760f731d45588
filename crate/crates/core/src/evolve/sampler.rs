//! Weighted sampling and membership structures backing the simulator.

/// Fenwick tree over non-negative weights with append and inverse-CDF lookup.
#[derive(Debug, Clone, Default)]
pub(crate) struct WeightTree {
    tree: Vec<f64>,
    values: Vec<f64>,
    positive: usize,
}

impl WeightTree {
    /// Number of entries with strictly positive weight.
    pub fn positive(&self) -> usize {
        self.positive
    }

    fn prefix(&self, mut i: usize) -> f64 {
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i - 1];
            i &= i - 1;
        }
        s
    }

    pub fn push(&mut self, w: f64) {
        let i = self.values.len() + 1;
        let lowbit = i & i.wrapping_neg();
        let node = w + self.prefix(i - 1) - self.prefix(i - lowbit);
        self.tree.push(node);
        self.values.push(w);
        if w > 0.0 {
            self.positive += 1;
        }
    }

    pub fn set(&mut self, i: usize, w: f64) {
        let old = self.values[i];
        if old == w {
            return;
        }
        match (old > 0.0, w > 0.0) {
            (false, true) => self.positive += 1,
            (true, false) => self.positive -= 1,
            _ => {}
        }
        self.values[i] = w;
        let delta = w - old;
        let mut j = i + 1;
        while j <= self.tree.len() {
            self.tree[j - 1] += delta;
            j += j & j.wrapping_neg();
        }
    }

    pub fn total(&self) -> f64 {
        if self.positive == 0 {
            0.0
        } else {
            self.prefix(self.tree.len()).max(0.0)
        }
    }

    /// Index whose cumulative interval contains `u · total` for `u ∈ [0, 1)`.
    ///
    /// Returns `None` when every weight is zero.
    pub fn sample(&self, u: f64) -> Option<usize> {
        if self.positive == 0 {
            return None;
        }
        let mut target = u * self.total();
        let n = self.tree.len();
        let mut pos = 0usize;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next - 1] <= target {
                pos = next;
                target -= self.tree[next - 1];
            }
            step >>= 1;
        }
        let idx = pos.min(n - 1);
        if self.values[idx] > 0.0 {
            Some(idx)
        } else {
            // Accumulated rounding landed on a zero-weight slot; redo exactly.
            self.sample_linear(u)
        }
    }

    fn sample_linear(&self, u: f64) -> Option<usize> {
        let total: f64 = self.values.iter().sum();
        let target = u * total;
        let mut acc = 0.0;
        let mut last = None;
        for (i, &w) in self.values.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                last = Some(i);
                if target < acc {
                    return Some(i);
                }
            }
        }
        last
    }
}

/// Set of node ids with O(1) insert, remove and uniform draw.
#[derive(Debug, Clone, Default)]
pub(crate) struct IndexedSet {
    items: Vec<usize>,
    slot: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl IndexedSet {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.slot.get(id).is_some_and(|&s| s != ABSENT)
    }

    pub fn get(&self, i: usize) -> usize {
        self.items[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().copied()
    }

    pub fn insert(&mut self, id: usize) {
        if id >= self.slot.len() {
            self.slot.resize(id + 1, ABSENT);
        }
        if self.slot[id] == ABSENT {
            self.slot[id] = self.items.len();
            self.items.push(id);
        }
    }

    pub fn remove(&mut self, id: usize) {
        if !self.contains(id) {
            return;
        }
        let pos = self.slot[id];
        self.items.swap_remove(pos);
        if pos < self.items.len() {
            self.slot[self.items[pos]] = pos;
        }
        self.slot[id] = ABSENT;
    }

    pub fn set(&mut self, id: usize, present: bool) {
        if present {
            self.insert(id);
        } else {
            self.remove(id);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sampling_follows_cumulative_intervals() {
        let mut t = WeightTree::default();
        for w in [1.0, 0.0, 3.0, 0.0, 4.0] {
            t.push(w);
        }
        assert_eq!(t.total(), 8.0);
        assert_eq!(t.sample(0.0), Some(0));
        assert_eq!(t.sample(0.124), Some(0));
        assert_eq!(t.sample(0.125), Some(2));
        assert_eq!(t.sample(0.49), Some(2));
        assert_eq!(t.sample(0.5), Some(4));
        assert_eq!(t.sample(0.999_999), Some(4));
        t.set(4, 0.0);
        t.set(2, 0.0);
        t.set(0, 0.0);
        assert_eq!(t.positive(), 0);
        assert_eq!(t.sample(0.3), None);
    }

    proptest! {
        #[test]
        fn prop_tree_matches_linear_scan(
            init in proptest::collection::vec(0u32..5, 1..60),
            updates in proptest::collection::vec((0usize..60, 0u32..5), 0..60),
            u in 0.0f64..1.0,
        ) {
            let mut t = WeightTree::default();
            let mut plain: Vec<f64> = Vec::new();
            for w in init {
                t.push(w as f64);
                plain.push(w as f64);
            }
            for (i, w) in updates {
                let i = i % plain.len();
                t.set(i, w as f64);
                plain[i] = w as f64;
            }
            let total: f64 = plain.iter().sum();
            prop_assert!((t.total() - total).abs() < 1e-9);
            let expected = if total == 0.0 {
                None
            } else {
                let target = u * total;
                let mut acc = 0.0;
                plain.iter().position(|&w| { acc += w; w > 0.0 && target < acc })
            };
            prop_assert_eq!(t.sample(u), expected);
        }

        #[test]
        fn prop_indexed_set_membership(ops in proptest::collection::vec((0usize..40, any::<bool>()), 0..200)) {
            let mut s = IndexedSet::default();
            let mut reference = std::collections::BTreeSet::new();
            for (id, present) in ops {
                s.set(id, present);
                if present { reference.insert(id); } else { reference.remove(&id); }
            }
            prop_assert_eq!(s.len(), reference.len());
            let mut items: Vec<usize> = s.iter().collect();
            items.sort_unstable();
            prop_assert_eq!(items, reference.into_iter().collect::<Vec<_>>());
        }
    }
}

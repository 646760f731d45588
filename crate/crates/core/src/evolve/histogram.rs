use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NodeKind;

/// Which nodes a histogram counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindFilter {
    Cluster,
    Normal,
    All,
}

impl KindFilter {
    pub fn matches(self, kind: NodeKind) -> bool {
        match self {
            KindFilter::All => true,
            KindFilter::Cluster => kind == NodeKind::Cluster,
            KindFilter::Normal => kind == NodeKind::Normal,
        }
    }
}

/// Exact degree counts over one node kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub filter: KindFilter,
    pub counts: BTreeMap<u32, u64>,
    pub total: u64,
}

impl DegreeHistogram {
    pub fn from_degrees(filter: KindFilter, degrees: impl IntoIterator<Item = u32>) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for d in degrees {
            *counts.entry(d).or_insert(0) += 1;
            total += 1;
        }
        Self {
            filter,
            counts,
            total,
        }
    }

    /// Pool several histograms of the same filter.
    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (&d, &c) in &other.counts {
            *self.counts.entry(d).or_insert(0) += c;
        }
        self.total += other.total;
    }

    /// Smallest degree `d` such that at least a fraction `q` of the nodes
    /// have degree `<= d`.
    pub fn quantile(&self, q: f64) -> Option<u32> {
        if self.total == 0 {
            return None;
        }
        let needed = (q.clamp(0.0, 1.0) * self.total as f64).ceil().max(1.0) as u64;
        let mut acc = 0;
        for (&d, &c) in &self.counts {
            acc += c;
            if acc >= needed {
                return Some(d);
            }
        }
        self.counts.keys().next_back().copied()
    }

    /// `(degree, fraction of nodes)` for every observed degree.
    pub fn density(&self) -> Vec<(u32, f64)> {
        self.counts
            .iter()
            .map(|(&d, &c)| (d, c as f64 / self.total as f64))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let s: u64 = self.counts.iter().map(|(&d, &c)| d as u64 * c).sum();
        s as f64 / self.total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_quantiles() {
        let h = DegreeHistogram::from_degrees(KindFilter::All, [1, 1, 2, 3, 3, 3, 7, 1, 2, 5]);
        assert_eq!(h.total, 10);
        assert_eq!(h.counts.values().sum::<u64>(), 10);
        assert_eq!(h.quantile(0.3), Some(1));
        assert_eq!(h.quantile(0.5), Some(2));
        assert_eq!(h.quantile(0.95), Some(7));
        assert_eq!(h.quantile(0.9), Some(5));
        assert!((h.mean() - 2.8).abs() < 1e-12);
        let empty = DegreeHistogram::from_degrees(KindFilter::Normal, []);
        assert_eq!(empty.quantile(0.5), None);
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = DegreeHistogram::from_degrees(KindFilter::Cluster, [1, 2]);
        let b = DegreeHistogram::from_degrees(KindFilter::Cluster, [2, 4]);
        a.merge(&b);
        assert_eq!(a.total, 4);
        assert_eq!(a.counts[&2], 2);
    }
}

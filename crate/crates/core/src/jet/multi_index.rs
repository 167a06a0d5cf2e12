use std::fmt;

/// A symmetric multi-index: a multiset of base-coordinate positions kept
/// sorted, so `y_xt` and `y_tx` name the same jet coordinate.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        MultiIndex(entries)
    }

    pub fn single(direction: usize) -> Self {
        MultiIndex(vec![direction])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// `Λ + λ`
    pub fn with(&self, direction: usize) -> MultiIndex {
        let mut entries = self.0.clone();
        let at = entries.partition_point(|&e| e <= direction);
        entries.insert(at, direction);
        MultiIndex(entries)
    }

    /// Every multi-index over `dims` directions with `1 <= |Λ| <= max_len`,
    /// shortest first.
    pub fn enumerate(dims: usize, max_len: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut layer = vec![MultiIndex::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for idx in &layer {
                let start = idx.0.last().copied().unwrap_or(0);
                for d in start..dims {
                    let mut entries = idx.0.clone();
                    entries.push(d);
                    next.push(MultiIndex(entries));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{:?}", self.0)
    }
}

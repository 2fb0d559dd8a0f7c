//! Disjoint sets with path compression and union by rank.
//!
//! Each root also remembers the smallest vertex index in its set, which is the
//! elder of the component when all vertices are born at radius zero.

#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
    eldest: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            eldest: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Smallest vertex index in the set containing `x`.
    pub fn eldest(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.eldest[r]
    }

    /// Merges the sets of `a` and `b`. Returns the eldest vertex of the set
    /// that dies (the larger of the two eldest indices), or `None` when they
    /// were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (ea, eb) = (self.eldest[ra], self.eldest[rb]);
        let (hi, lo) = if self.rank[ra] < self.rank[rb] {
            (rb, ra)
        } else {
            (ra, rb)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        self.eldest[hi] = ea.min(eb);
        Some(ea.max(eb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_report_younger_component() {
        let mut ds = DisjointSets::new(4);
        assert_eq!(ds.union(2, 3), Some(3));
        assert_eq!(ds.union(0, 1), Some(1));
        assert_eq!(ds.union(3, 1), Some(2));
        assert_eq!(ds.union(0, 2), None);
        assert_eq!(ds.eldest(3), 0);
    }
}

//! Permutations of `{0, …, k-1}` in one-line notation.
//!
//! Composition is right to left: `(σ∘τ)(i) = σ(τ(i))`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Permutation> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x >= map.len() || seen[x] {
                return Err(Error::Parse(format!("{map:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(k: usize) -> Permutation {
        Permutation { map: (0..k).collect() }
    }

    /// The full cycle `i ↦ i+1 mod k`.
    pub fn full_cycle(k: usize) -> Permutation {
        Permutation {
            map: (0..k).map(|i| (i + 1) % k).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(k: usize, cycles: &[Vec<usize>]) -> Result<Permutation> {
        let mut map: Vec<usize> = (0..k).collect();
        let mut seen = vec![false; k];
        for cyc in cycles {
            for (t, &x) in cyc.iter().enumerate() {
                if x >= k || seen[x] {
                    return Err(Error::Parse(format!("bad cycle list {cycles:?}")));
                }
                seen[x] = true;
                map[x] = cyc[(t + 1) % cyc.len()];
            }
        }
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { map: inv }
    }

    /// Cycles, each starting at its smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.map[x];
            }
            out.push(cyc);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    /// Minimal number of transpositions: `k - #cycles`.
    pub fn length(&self) -> usize {
        self.len() - self.num_cycles()
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// A representative permutation with the given cycle type, using
    /// consecutive runs of points.
    pub fn of_cycle_type(cycle_type: &[usize]) -> Permutation {
        let k = cycle_type.iter().sum();
        let mut cycles = Vec::new();
        let mut next = 0;
        for &len in cycle_type {
            cycles.push((next..next + len).collect());
            next += len;
        }
        Permutation::from_cycles(k, &cycles).expect("runs are disjoint")
    }

    /// All permutations of `k` points in lexicographic order of one-line form.
    pub fn all(k: usize) -> AllPermutations {
        AllPermutations {
            next: Some((0..k).collect()),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.iter().all(|c| c.len() == 1) {
            return f.write_str("()");
        }
        for c in cycles.iter().filter(|c| c.len() > 1) {
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut a = cur.clone();
        let n = a.len();
        if n >= 2 {
            let mut i = n - 1;
            while i > 0 && a[i - 1] >= a[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while a[j] <= a[i - 1] {
                    j -= 1;
                }
                a.swap(i - 1, j);
                a[i..].reverse();
                self.next = Some(a);
            }
        }
        Some(Permutation { map: cur })
    }
}

/// All integer partitions of `k` as non-increasing part lists, largest first.
pub fn integer_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_right_to_left() {
        let s = Permutation::new(vec![1, 0, 2]).unwrap();
        let t = Permutation::new(vec![0, 2, 1]).unwrap();
        // s(t(1)) = s(2) = 2
        assert_eq!(s.compose(&t).apply(1), 2);
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(3));
    }

    #[test]
    fn counts_and_types() {
        assert_eq!(Permutation::all(4).count(), 24);
        assert_eq!(Permutation::all(0).count(), 1);
        assert_eq!(Permutation::full_cycle(5).cycle_type(), vec![5]);
        assert_eq!(Permutation::identity(3).length(), 0);
        assert_eq!(Permutation::of_cycle_type(&[2, 1]).cycle_type(), vec![2, 1]);
        assert_eq!(integer_partitions(4).len(), 5);
        assert_eq!(integer_partitions(7).len(), 15);
        assert_eq!(Permutation::full_cycle(3).to_string(), "(1 2 3)");
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }
}

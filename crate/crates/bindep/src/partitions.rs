//! Set partitions of `{0, …, n-1}`: block relations, envelopes, the
//! non-crossing lattice, Kreweras complements, Möbius values and enumerators.
//!
//! Elements are 0-based in memory. The text format (`"13|2|4"`) and
//! `Display` are 1-based.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{guard, Error, Result};
use crate::perm::Permutation;

/// Largest ground set accepted by the exhaustive enumerator.
pub const MAX_ENUMERATE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    /// Sorted blocks, ordered by minimum.
    blocks: Vec<Vec<usize>>,
    /// Block index of each element.
    labels: Vec<usize>,
}

/// How two distinct blocks sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockRelation {
    Crossing,
    Separated,
    NestedFirstInSecond,
    NestedSecondInFirst,
}

impl SetPartition {
    /// Builds a partition from blocks in any order; checks that they cover
    /// `0..n` disjointly.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<SetPartition> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &x in block {
                if x >= n || labels[x] != usize::MAX {
                    return Err(Error::Parse(format!("element {} repeated or out of range", x + 1)));
                }
                labels[x] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::Parse("blocks do not cover the ground set".into()));
        }
        Ok(SetPartition::from_labels(&labels))
    }

    /// Builds a partition from any labelling `element ↦ key`; equal keys share
    /// a block.
    pub fn from_labels<K: Ord + Clone>(keys: &[K]) -> SetPartition {
        let mut first: BTreeMap<K, usize> = BTreeMap::new();
        let mut labels = Vec::with_capacity(keys.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, k) in keys.iter().enumerate() {
            let b = *first.entry(k.clone()).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            labels.push(b);
        }
        SetPartition {
            n: keys.len(),
            blocks,
            labels,
        }
    }

    pub fn singletons(n: usize) -> SetPartition {
        SetPartition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn one_block(n: usize) -> SetPartition {
        SetPartition::from_labels(&vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    #[inline]
    pub fn block_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    /// Whether blocks `a` and `b` cross.
    pub fn crosses(&self, a: usize, b: usize) -> bool {
        a != b && self.alternations(a, b) >= 4
    }

    /// Whether block `b` is nested inside block `a`, that is `b` lies strictly
    /// between two consecutive elements of `a`.
    pub fn nested_in(&self, b: usize, a: usize) -> bool {
        a != b && self.alternations(a, b) == 3 && self.blocks[a][0] < self.blocks[b][0]
    }

    /// Number of runs when the elements of the two blocks are read left to
    /// right and labelled by block.
    fn alternations(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.blocks[a], &self.blocks[b]);
        let (mut i, mut j) = (0, 0);
        let mut runs = 0;
        let mut last = None;
        while i < x.len() || j < y.len() {
            let take_x = j == y.len() || (i < x.len() && x[i] < y[j]);
            if take_x {
                i += 1;
            } else {
                j += 1;
            }
            if last != Some(take_x) {
                runs += 1;
                last = Some(take_x);
            }
        }
        runs
    }

    pub fn block_relation(&self, a: usize, b: usize) -> BlockRelation {
        assert_ne!(a, b, "block_relation needs two distinct blocks");
        match self.alternations(a, b) {
            2 => BlockRelation::Separated,
            3 if self.blocks[a][0] < self.blocks[b][0] => BlockRelation::NestedSecondInFirst,
            3 => BlockRelation::NestedFirstInSecond,
            _ => BlockRelation::Crossing,
        }
    }

    pub fn is_noncrossing(&self) -> bool {
        let m = self.num_blocks();
        (0..m).all(|a| ((a + 1)..m).all(|b| !self.crosses(a, b)))
    }

    /// Every block is a set of consecutive integers.
    pub fn is_interval(&self) -> bool {
        self.blocks.iter().all(|b| b[b.len() - 1] - b[0] + 1 == b.len())
    }

    /// Whether the interval envelope is a single block.
    pub fn is_irreducible(&self) -> bool {
        self.n > 0 && self.interval_envelope().num_blocks() == 1
    }

    /// Whether the non-crossing envelope is a single block.
    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.nc_envelope().num_blocks() == 1
    }

    /// Least interval partition above `self`.
    pub fn interval_envelope(&self) -> SetPartition {
        let mut labels = vec![0usize; self.n];
        let mut reach = 0;
        let mut current = 0;
        for i in 0..self.n {
            if i > reach && i > 0 {
                current += 1;
            }
            let b = &self.blocks[self.labels[i]];
            reach = reach.max(b[b.len() - 1]);
            labels[i] = current;
        }
        SetPartition::from_labels(&labels)
    }

    /// Least non-crossing partition above `self`.
    pub fn nc_envelope(&self) -> SetPartition {
        let mut cur = self.clone();
        loop {
            let m = cur.num_blocks();
            let mut merged = None;
            'outer: for a in 0..m {
                for b in (a + 1)..m {
                    if cur.crosses(a, b) {
                        merged = Some((a, b));
                        break 'outer;
                    }
                }
            }
            match merged {
                None => return cur,
                Some((a, b)) => cur = cur.merge_blocks(a, b),
            }
        }
    }

    /// The partition with blocks `a` and `b` joined.
    pub fn merge_blocks(&self, a: usize, b: usize) -> SetPartition {
        let labels: Vec<usize> = self.labels.iter().map(|&l| if l == b { a } else { l }).collect();
        SetPartition::from_labels(&labels)
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &SetPartition) -> bool {
        self.n == other.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| other.labels[x] == other.labels[b[0]]))
    }

    /// Restriction to a sorted subset, relabelled to `0..subset.len()` by
    /// position.
    pub fn restrict(&self, subset: &[usize]) -> SetPartition {
        let keys: Vec<usize> = subset.iter().map(|&x| self.labels[x]).collect();
        SetPartition::from_labels(&keys)
    }

    /// Inverse of block-wise restriction: `parts[b]` partitions the `b`-th block
    /// of `outer` (in position order) and the results are unioned.
    pub fn recompose(outer: &SetPartition, parts: &[SetPartition]) -> Result<SetPartition> {
        if parts.len() != outer.num_blocks() {
            return Err(Error::DimMismatch {
                expected: outer.num_blocks(),
                got: parts.len(),
            });
        }
        let mut keys = vec![(0usize, 0usize); outer.n];
        for (b, (block, part)) in outer.blocks.iter().zip(parts).enumerate() {
            if part.n != block.len() {
                return Err(Error::DimMismatch {
                    expected: block.len(),
                    got: part.n,
                });
            }
            for (pos, &x) in block.iter().enumerate() {
                keys[x] = (b, part.labels[pos]);
            }
        }
        Ok(SetPartition::from_labels(&keys))
    }

    /// Replaces the restriction to each color class by its non-crossing
    /// envelope.
    pub fn join_colorwise(&self, colors: &[usize]) -> Result<SetPartition> {
        self.check_monochromatic(colors)?;
        let mut keys = vec![(0usize, 0usize); self.n];
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in colors.iter().enumerate() {
            classes.entry(c).or_default().push(i);
        }
        for (&c, members) in &classes {
            let env = self.restrict(members).nc_envelope();
            for (pos, &x) in members.iter().enumerate() {
                keys[x] = (c, env.labels[pos]);
            }
        }
        Ok(SetPartition::from_labels(&keys))
    }

    pub fn check_monochromatic(&self, colors: &[usize]) -> Result<()> {
        if colors.len() != self.n {
            return Err(Error::DimMismatch {
                expected: self.n,
                got: colors.len(),
            });
        }
        if self.blocks.iter().all(|b| b.iter().all(|&x| colors[x] == colors[b[0]])) {
            Ok(())
        } else {
            Err(Error::NotMonochromatic)
        }
    }

    /// The permutation whose cycles are the blocks, each in increasing order.
    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(self.n, &self.blocks).expect("blocks are disjoint")
    }

    pub fn from_permutation(p: &Permutation) -> SetPartition {
        SetPartition::from_blocks(p.len(), p.cycles()).expect("cycles partition the points")
    }

    /// Formats with 1-based elements; `separator` goes between elements of a
    /// block.
    fn format_with(&self, separator: &str) -> String {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|x| (x + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(separator)
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n <= 9 { "" } else { "," };
        f.write_str(&self.format_with(sep))
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Blocks are separated by `|`. Inside a block, elements are separated by
    /// commas; a block without commas is read as one digit per element, or as
    /// a single number when the digit reading does not give a partition.
    fn from_str(s: &str) -> Result<SetPartition> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SetPartition::singletons(0));
        }
        let parse_blocks = |digits: bool| -> Result<SetPartition> {
            let mut blocks = Vec::new();
            for part in s.split('|') {
                let part = part.trim();
                let elems: Vec<usize> = if part.contains(',') || !digits {
                    part.split(',')
                        .map(|t| {
                            t.trim()
                                .parse::<usize>()
                                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
                        })
                        .collect::<Result<_>>()?
                } else {
                    part.chars()
                        .map(|ch| {
                            ch.to_digit(10)
                                .map(|d| d as usize)
                                .ok_or_else(|| Error::Parse(format!("unexpected `{ch}` in `{s}`")))
                        })
                        .collect::<Result<_>>()?
                };
                if elems.contains(&0) {
                    return Err(Error::Parse("elements are 1-based".into()));
                }
                blocks.push(elems.into_iter().map(|x| x - 1).collect::<Vec<_>>());
            }
            let n = blocks.iter().map(Vec::len).sum();
            SetPartition::from_blocks(n, blocks)
        };
        parse_blocks(true).or_else(|e| parse_blocks(false).map_err(|_| e))
    }
}

/// Streams every partition of an `n`-set exactly once, by restricted growth
/// strings.
pub struct AllPartitions {
    rgs: Vec<usize>,
    prefix_max: Vec<usize>,
    done: bool,
}

impl AllPartitions {
    fn new(n: usize) -> AllPartitions {
        AllPartitions {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        }
    }

    fn advance(&mut self) {
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in (i + 1)..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for AllPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let p = SetPartition::from_labels(&self.rgs);
        self.advance();
        Some(p)
    }
}

/// Every partition of an `n`-set; `n ≤ 12`.
pub fn enumerate_all(n: usize) -> Result<AllPartitions> {
    guard("partition size", n, MAX_ENUMERATE)?;
    Ok(AllPartitions::new(n))
}

/// Non-crossing partitions of an `n`-set.
pub fn enumerate_nc(n: usize) -> Result<impl Iterator<Item = SetPartition>> {
    Ok(enumerate_all(n)?.filter(SetPartition::is_noncrossing))
}

/// Irreducible non-crossing partitions of an `n`-set.
pub fn enumerate_nc_irreducible(n: usize) -> Result<impl Iterator<Item = SetPartition>> {
    Ok(enumerate_nc(n)?.filter(SetPartition::is_irreducible))
}

/// The `2^(n-1)` interval partitions of an `n`-set, for `n ≥ 1`.
pub fn enumerate_interval(n: usize) -> Result<Vec<SetPartition>> {
    guard("partition size", n, MAX_ENUMERATE)?;
    if n == 0 {
        return Ok(vec![SetPartition::singletons(0)]);
    }
    Ok((0u32..(1u32 << (n - 1)))
        .map(|cuts| {
            let mut labels = vec![0usize; n];
            for i in 1..n {
                labels[i] = labels[i - 1] + ((cuts >> (i - 1)) & 1) as usize;
            }
            SetPartition::from_labels(&labels)
        })
        .collect())
}

pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..n as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("non-empty")];
        for &x in &row {
            let last = *next.last().expect("non-empty");
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Kreweras complement as a permutation: `σ⁻¹ ∘ γ` with `γ = (1 2 … k)`.
pub fn kreweras_permutation(sigma: &Permutation) -> Permutation {
    sigma.inverse().compose(&Permutation::full_cycle(sigma.len()))
}

/// Kreweras complement of a non-crossing partition.
pub fn kreweras(p: &SetPartition) -> Result<SetPartition> {
    if !p.is_noncrossing() {
        return Err(Error::NotNonCrossing);
    }
    Ok(SetPartition::from_permutation(&kreweras_permutation(
        &p.to_permutation(),
    )))
}

/// `μ(0̂_n, 1̂_n)` in the non-crossing lattice: `(-1)^(n-1) Cat(n-1)`.
pub fn moebius_nc_full(n: usize) -> i64 {
    let c = catalan(n.saturating_sub(1)) as i64;
    if n % 2 == 1 {
        c
    } else {
        -c
    }
}

/// Möbius function `μ(σ, τ)` of the non-crossing lattice.
pub fn moebius_nc(sigma: &SetPartition, tau: &SetPartition) -> Result<i64> {
    if !sigma.is_noncrossing() || !tau.is_noncrossing() {
        return Err(Error::NotNonCrossing);
    }
    if !sigma.leq(tau) {
        return Err(Error::NotComparable);
    }
    let mut mu = 1i64;
    for block in tau.blocks() {
        let kr = kreweras(&sigma.restrict(block))?;
        for b in kr.blocks() {
            mu *= moebius_nc_full(b.len());
        }
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_all(1).unwrap().count(), 1);
        assert_eq!(enumerate_all(3).unwrap().count(), 5);
        assert_eq!(enumerate_all(4).unwrap().count(), 15);
        for n in 0..=8 {
            assert_eq!(enumerate_all(n).unwrap().count() as u64, bell(n));
            assert_eq!(enumerate_nc(n).unwrap().count() as u64, catalan(n));
            assert_eq!(enumerate_interval(n).unwrap().len(), 1 << n.saturating_sub(1));
        }
        assert!(matches!(enumerate_all(13), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn relations() {
        let x = p("13|24");
        assert_eq!(x.block_relation(0, 1), BlockRelation::Crossing);
        let x = p("14|23");
        assert_eq!(x.block_relation(0, 1), BlockRelation::NestedSecondInFirst);
        assert_eq!(x.block_relation(1, 0), BlockRelation::NestedFirstInSecond);
        assert!(x.nested_in(1, 0));
        let x = p("12|34");
        assert_eq!(x.block_relation(0, 1), BlockRelation::Separated);
        // a block sitting between the ends but across an inner element is
        // not nested
        let x = p("135|24");
        assert_eq!(x.block_relation(0, 1), BlockRelation::Crossing);
        let x = p("135|2|4");
        assert!(x.nested_in(1, 0) && x.nested_in(2, 0));
    }

    #[test]
    fn flags() {
        let x = p("13|24");
        assert!(!x.is_noncrossing() && x.is_connected() && x.is_irreducible());
        let x = p("12|3");
        assert!(x.is_noncrossing() && !x.is_irreducible());
        let x = p("14|23");
        assert!(x.is_noncrossing() && x.is_irreducible() && !x.is_connected());
    }

    #[test]
    fn envelopes() {
        let x = p("14|23");
        assert_eq!(x.nc_envelope(), x);
        assert_eq!(p("13|24").nc_envelope(), SetPartition::one_block(4));
        assert_eq!(p("13|24").interval_envelope(), SetPartition::one_block(4));
        assert_eq!(p("13|2|4").interval_envelope(), p("123|4"));
        assert_eq!(p("14|2|3").interval_envelope(), SetPartition::one_block(4));
    }

    #[test]
    fn text_format() {
        assert_eq!(p("13|2|4").to_string(), "13|2|4");
        assert_eq!(p("4|2|31").to_string(), "13|2|4");
        let big = SetPartition::singletons(10);
        assert_eq!(big.to_string(), "1|2|3|4|5|6|7|8|9|10");
        assert_eq!(big.to_string().parse::<SetPartition>().unwrap(), big);
        assert!("12|2".parse::<SetPartition>().is_err());
        assert!("1|3".parse::<SetPartition>().is_err());
    }

    #[test]
    fn kreweras_examples() {
        assert_eq!(
            kreweras(&SetPartition::singletons(4)).unwrap(),
            SetPartition::one_block(4)
        );
        assert_eq!(
            kreweras(&SetPartition::one_block(4)).unwrap(),
            SetPartition::singletons(4)
        );
        assert_eq!(kreweras(&p("12|34")).unwrap(), p("1|24|3"));
        assert_eq!(kreweras(&p("13|24")), Err(Error::NotNonCrossing));
    }

    #[test]
    fn moebius_examples() {
        let x = p("12|3");
        assert_eq!(moebius_nc(&x, &x).unwrap(), 1);
        assert_eq!(
            moebius_nc(&SetPartition::singletons(2), &SetPartition::one_block(2)).unwrap(),
            -1
        );
        assert_eq!(
            moebius_nc(&SetPartition::singletons(3), &SetPartition::one_block(3)).unwrap(),
            2
        );
        assert_eq!(moebius_nc(&p("12|3"), &p("1|23")), Err(Error::NotComparable));
    }

    #[test]
    fn restrict_and_join() {
        let x = p("13|2|4");
        assert_eq!(x.restrict(&[0, 2]), SetPartition::one_block(2));
        let colors = [0, 0, 0, 0];
        assert_eq!(p("13|24").join_colorwise(&colors).unwrap(), SetPartition::one_block(4));
        let y = p("14|23");
        assert_eq!(y.join_colorwise(&colors).unwrap(), y);
        assert_eq!(p("12").join_colorwise(&[0, 1]), Err(Error::NotMonochromatic));
        let outer = p("14|23");
        let parts = vec![SetPartition::singletons(2), SetPartition::one_block(2)];
        assert_eq!(SetPartition::recompose(&outer, &parts).unwrap(), p("1|23|4"));
    }
}

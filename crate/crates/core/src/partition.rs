//! Partition subalgebras of `⊕ R·eᵢ` and the bracket notation for them.
//!
//! A partition of `{1..m}` stands for the span of its block sums
//! `f_b = Σ_{i∈b} eᵢ`. Internally indices are 0-based; the bracket notation
//! and JSON are 1-based.

use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::algebra::{AlgebraError, IdempotentAlgebra, RingElement};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("index {0} appears in more than one block")]
    OverlappingBlocks(usize),
    #[error("index {index} is out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("empty block")]
    EmptyBlock,
    #[error("partitions live on different index sets ({0} vs {1})")]
    AlgebraMismatch(usize, usize),
    #[error("{0} is not coarser than the given subalgebra")]
    NotCoarsening(String),
}

/// A partition of `{0..m}` in canonical form: blocks sorted internally and by
/// their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionSubalgebra {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl PartitionSubalgebra {
    /// All singletons: the whole algebra.
    pub fn discrete(m: usize) -> Self {
        Self::from_labels(&(0..m).collect::<Vec<_>>())
    }

    /// One block: the span of `1_A`.
    pub fn indiscrete(m: usize) -> Self {
        Self::from_labels(&vec![0; m])
    }

    /// Builds from arbitrary labels; indices with equal labels share a block.
    pub fn from_labels<L: Eq + Clone + std::hash::Hash>(labels: &[L]) -> Self {
        let mut first: std::collections::HashMap<L, usize> = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = vec![0; labels.len()];
        for (i, l) in labels.iter().enumerate() {
            let b = *first.entry(l.clone()).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            block_of[i] = b;
        }
        PartitionSubalgebra { blocks, block_of }
    }

    /// Builds from 0-based blocks. Indices not mentioned become singletons.
    pub fn from_blocks(m: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut label: Vec<usize> = (0..m).map(|i| i + m).collect();
        let mut seen = vec![false; m];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &i in block {
                if i >= m {
                    return Err(PartitionError::IndexOutOfRange { index: i + 1, dim: m });
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(PartitionError::OverlappingBlocks(i + 1));
                }
                label[i] = b;
            }
        }
        Ok(Self::from_labels(&label))
    }

    pub fn dim(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.dim()
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.block_of[i] == self.block_of[j]
    }

    /// Blocks as 1-based index lists.
    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
    }

    /// Intersection of the two subalgebras: blocks are the connected
    /// components of the union of both block relations.
    pub fn meet_as_intersection(&self, other: &Self) -> Result<Self, PartitionError> {
        if self.dim() != other.dim() {
            return Err(PartitionError::AlgebraMismatch(self.dim(), other.dim()));
        }
        let mut uf = UnionFind::<usize>::new(self.dim());
        for p in [self, other] {
            for b in &p.blocks {
                for w in b.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        Ok(Self::from_labels(&uf.into_labeling()))
    }

    /// True iff every block of `self` is a union of blocks of `finer`,
    /// i.e. `self ⊆ finer` as subalgebras.
    pub fn coarsens(&self, finer: &Self) -> bool {
        self.dim() == finer.dim()
            && finer.blocks.iter().all(|b| b.iter().all(|&i| self.block_of[i] == self.block_of[b[0]]))
    }

    /// Block idempotents `f_b` in block order.
    pub fn block_idempotents(&self, algebra: &IdempotentAlgebra) -> Result<Vec<RingElement>, AlgebraError> {
        if algebra.dim != self.dim() {
            return Err(AlgebraError::AlgebraMismatch);
        }
        self.blocks.iter().map(|b| algebra.indicator(b.iter().copied())).collect()
    }

    /// Membership: an element lies in the subalgebra iff it is constant on blocks.
    pub fn contains(&self, x: &RingElement) -> bool {
        x.coeffs().len() == self.dim() && self.blocks.iter().all(|b| b.iter().all(|&i| x.coeff(i) == x.coeff(b[0])))
    }

    /// Bracket notation with singleton blocks omitted; empty for the whole algebra.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for b in self.blocks.iter().filter(|b| b.len() > 1) {
            out.push('[');
            let items: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&items.join(","));
            out.push(']');
        }
        out
    }

    /// Parses bracket notation over `m` indices. `…` or `...` between two
    /// numbers fills in the range; the string `A` denotes all singletons.
    pub fn parse(s: &str, m: usize) -> Result<Self, PartitionError> {
        let t = s.trim();
        if t == "A" {
            return Ok(Self::discrete(m));
        }
        let blocks = parse_brackets(t)?;
        let mut zero_based = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut out = Vec::with_capacity(b.len());
            for i in b {
                if i == 0 || i > m {
                    return Err(PartitionError::IndexOutOfRange { index: i, dim: m });
                }
                out.push(i - 1);
            }
            zero_based.push(out);
        }
        Self::from_blocks(m, &zero_based)
    }
}

impl fmt::Display for PartitionSubalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_discrete() {
            write!(f, "A")
        } else {
            write!(f, "{}", self.render())
        }
    }
}

/// Bound on the length of a range written with an ellipsis.
const MAX_RANGE: usize = 1 << 16;

#[derive(Clone, Copy, PartialEq)]
enum Item {
    Num(usize),
    Ellipsis,
}

/// Tokenizes `[1,2][3,…,7]` into 1-based blocks, without range checks.
pub fn parse_brackets(s: &str) -> Result<Vec<Vec<usize>>, PartitionError> {
    let err = |pos: usize, msg: &str| PartitionError::Parse { pos, msg: msg.to_string() };
    let bytes = s.as_bytes();
    let mut pos = 0;
    let mut blocks = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    loop {
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] != b'[' {
            return Err(err(pos, "expected `[`"));
        }
        pos += 1;
        let mut items = Vec::new();
        loop {
            skip_ws(&mut pos);
            if pos == bytes.len() {
                return Err(err(pos, "unterminated block"));
            }
            if s[pos..].starts_with('…') {
                items.push(Item::Ellipsis);
                pos += '…'.len_utf8();
            } else if s[pos..].starts_with("...") {
                items.push(Item::Ellipsis);
                pos += 3;
            } else if bytes[pos].is_ascii_digit() {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let n: usize = s[start..pos].parse().map_err(|_| err(start, "number too large"))?;
                items.push(Item::Num(n));
            } else {
                return Err(err(pos, "expected a number"));
            }
            skip_ws(&mut pos);
            match bytes.get(pos) {
                Some(b',') => pos += 1,
                Some(b']') => {
                    pos += 1;
                    break;
                }
                _ => return Err(err(pos, "expected `,` or `]`")),
            }
        }
        blocks.push(expand(&items).map_err(|msg| err(pos, msg))?);
    }
    Ok(blocks)
}

fn expand(items: &[Item]) -> Result<Vec<usize>, &'static str> {
    let mut out = Vec::new();
    for (k, item) in items.iter().enumerate() {
        match *item {
            Item::Num(n) => out.push(n),
            Item::Ellipsis => {
                let (Some(Item::Num(a)), Some(Item::Num(b))) =
                    (k.checked_sub(1).map(|j| items[j]), items.get(k + 1).copied())
                else {
                    return Err("ellipsis must sit between two numbers");
                };
                if b <= a + 1 {
                    if b <= a {
                        return Err("ellipsis range must increase");
                    }
                    continue;
                }
                if b - a > MAX_RANGE {
                    return Err("ellipsis range too long");
                }
                out.extend(a + 1..b);
            }
        }
    }
    Ok(out)
}

//! Independent oracles for checking the production algorithms.
//!
//! Everything here works from definitions with exact rational linear
//! algebra or exhaustive search, reading actions only through their
//! supports and `(from, to)` pairs.

use fixedbitset::FixedBitSet;
use groupoid_galois::{FiniteGroupoid, Morphism, PartialAction};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub mod suite;

pub type Q = BigRational;
pub type Vector = Vec<Q>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut [Vector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..rows[i].len() {
                    let d = f.clone() * rows[r][j].clone();
                    rows[i][j] = rows[i][j].clone() - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(vectors: &[Vector], cols: usize) -> usize {
    let mut rows = vectors.to_vec();
    rref(&mut rows, cols).len()
}

/// Whether `A x = b` has a solution; rows are `[A | b]`.
pub fn consistent(augmented: &[Vector], unknowns: usize) -> bool {
    let mut rows = augmented.to_vec();
    let pivots = rref(&mut rows, unknowns + 1);
    !pivots.contains(&unknowns)
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace(a: &[Vector], cols: usize) -> Vec<Vector> {
    let mut rows = a.to_vec();
    let pivots = rref(&mut rows, cols);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -rows[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Whether two families span the same subspace.
pub fn same_span(a: &[Vector], b: &[Vector], cols: usize) -> bool {
    let ra = rank(a, cols);
    let rb = rank(b, cols);
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    ra == rb && rank(&both, cols) == ra
}

/// Basis of `span(a) ∩ span(b)`.
pub fn span_intersection(a: &[Vector], b: &[Vector], cols: usize) -> Vec<Vector> {
    // Solve Σ λᵢ aᵢ − Σ μⱼ bⱼ = 0 and map the λ part back.
    let unknowns = a.len() + b.len();
    let system: Vec<Vector> =
        (0..cols).map(|k| a.iter().map(|v| v[k].clone()).chain(b.iter().map(|v| -v[k].clone())).collect()).collect();
    let mut rows: Vec<Vector> = nullspace(&system, unknowns)
        .into_iter()
        .map(|sol| {
            let mut v = vec![Q::zero(); cols];
            for (i, ai) in a.iter().enumerate() {
                for k in 0..cols {
                    v[k] = v[k].clone() + sol[i].clone() * ai[k].clone();
                }
            }
            v
        })
        .collect();
    let r = rref(&mut rows, cols).len();
    rows.truncate(r);
    rows
}

/// Indicator vectors of blocks given as 0-based lists.
pub fn block_vectors(blocks: &[Vec<usize>], m: usize) -> Vec<Vector> {
    blocks
        .iter()
        .map(|b| {
            let mut v = vec![Q::zero(); m];
            for &i in b {
                v[i] = Q::one();
            }
            v
        })
        .collect()
}

/// `α_g(a · 1_{g⁻¹})`, evaluated from the pair list of `g`.
pub fn act(alpha: &PartialAction, g: Morphism, a: &[Q]) -> Vector {
    let mut out = vec![Q::zero(); alpha.dim()];
    for (from, to) in alpha.pairs(g) {
        out[to] = a[from].clone();
    }
    out
}

fn unit(alpha: &PartialAction, g: Morphism) -> Vector {
    (0..alpha.dim()).map(|i| if alpha.support(g).contains(i) { Q::one() } else { Q::zero() }).collect()
}

fn hadamard(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).collect()
}

fn basis(m: usize, i: usize) -> Vector {
    let mut v = vec![Q::zero(); m];
    v[i] = Q::one();
    v
}

/// Solvability of `Σᵢ xᵢ α_g(yᵢ 1_{g⁻¹}) = δ_{g∈𝒢₀} 1_g` for all `g`.
///
/// The left side is bilinear in `(x, y)`, so it depends only on
/// `U = Σᵢ xᵢ ⊗ yᵢ`, and every `U` arises. Unknown `U[a][b]` carries the
/// coefficient `eₐ · α_g(e_b 1_{g⁻¹})`, giving a linear system in `m²`
/// unknowns.
pub fn galois_gram_oracle(alpha: &PartialAction) -> bool {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let n = m * m;
    let mut rows: Vec<Vector> = Vec::new();
    for x in g.morphisms() {
        let images: Vec<Vector> = (0..m).map(|b| act(alpha, x, &basis(m, b))).collect();
        let target = if g.is_object(x) { unit(alpha, x) } else { vec![Q::zero(); m] };
        for coord in 0..m {
            let mut row = vec![Q::zero(); n + 1];
            // (eₐ · v)[coord] vanishes unless a = coord.
            for b in 0..m {
                row[coord * m + b] = images[b][coord].clone();
            }
            row[n] = target[coord].clone();
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
    }
    consistent(&rows, n)
}

/// Basis of `{a : α_h(a 1_{h⁻¹}) = a 1_h for every h in members}`.
pub fn invariants_kernel(alpha: &PartialAction, members: &FixedBitSet) -> Vec<Vector> {
    let m = alpha.dim();
    let mut rows = Vec::new();
    for h in members.ones().map(Morphism) {
        let u = unit(alpha, h);
        // Column b of the map a ↦ α_h(a1_{h⁻¹}) − a1_h is its value at e_b.
        let cols: Vec<Vector> = (0..m)
            .map(|b| {
                let e = basis(m, b);
                let lhs = act(alpha, h, &e);
                let rhs = hadamard(&e, &u);
                lhs.into_iter().zip(rhs).map(|(p, q)| p - q).collect()
            })
            .collect();
        for coord in 0..m {
            rows.push((0..m).map(|b| cols[b][coord].clone()).collect());
        }
    }
    nullspace(&rows, m)
}

/// All `c` with `c² = c` and support inside `support`.
///
/// `c² = c` splits into one equation per coordinate, so the roots of
/// `v² = v` among `-2..=2` are found by search and combined in every way.
pub fn idempotents_by_search(m: usize, support: &[usize]) -> Vec<Vec<i64>> {
    let roots: Vec<i64> = (-2i64..=2).filter(|v| v * v == *v).collect();
    let mut out = vec![vec![0i64; m]];
    for &i in support {
        out = out
            .into_iter()
            .flat_map(|c| {
                roots.iter().map(move |&r| {
                    let mut c = c.clone();
                    c[i] = r;
                    c
                })
            })
            .collect();
    }
    out
}

/// `𝒢_C` from its definition, tested on a spanning set of `C`.
pub fn stabilizer_by_definition(alpha: &PartialAction, c_blocks: &[Vec<usize>]) -> FixedBitSet {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let span = block_vectors(c_blocks, m);
    let mut out = FixedBitSet::with_capacity(g.len());
    for x in g.morphisms() {
        let u = unit(alpha, x);
        let fixed = span.iter().all(|a| act(alpha, x, a) == hadamard(a, &u));
        out.set(x.0, fixed);
    }
    out
}

/// The α-strong condition checked over every nonzero idempotent of
/// `A_g ∪ A_h`. Elements of `C` are tested on a spanning set, which is
/// exact because the condition fails only if it fails for all of `C`.
pub fn alpha_strong_exhaustive(alpha: &PartialAction, c_blocks: &[Vec<usize>]) -> bool {
    let g = alpha.groupoid();
    let m = alpha.dim();
    let stab = stabilizer_by_definition(alpha, c_blocks);
    let span = block_vectors(c_blocks, m);
    let mut idempotents: Vec<Vec<Vec<i64>>> = Vec::with_capacity(g.len());
    for x in g.morphisms() {
        let s: Vec<usize> = alpha.support(x).ones().collect();
        idempotents.push(idempotents_by_search(m, &s));
    }
    let moved: Vec<Vec<Vector>> = g.morphisms().map(|x| span.iter().map(|a| act(alpha, x, a)).collect()).collect();
    for x in g.morphisms() {
        for y in g.morphisms().filter(|&y| g.ran(y) == g.ran(x)) {
            let k = g.compose(g.inverse(x), y).expect("common range");
            if stab.contains(k.0) {
                continue;
            }
            for e in idempotents[x.0].iter().chain(&idempotents[y.0]) {
                if e.iter().all(|&v| v == 0) {
                    continue;
                }
                let separated =
                    (0..span.len()).any(|b| (0..m).any(|i| e[i] != 0 && moved[x.0][b][i] != moved[y.0][b][i]));
                if !separated {
                    return false;
                }
            }
        }
    }
    true
}

/// Every wide subgroupoid, by filtering all subsets of non-identities.
pub fn brute_force_wide_subgroupoids(g: &FiniteGroupoid) -> Vec<FixedBitSet> {
    let others: Vec<usize> = g.morphisms().filter(|&x| !g.is_object(x)).map(|x| x.0).collect();
    assert!(others.len() < 24, "too many morphisms for brute force");
    let mut out = Vec::new();
    for mask in 0u32..(1 << others.len()) {
        let mut set = FixedBitSet::with_capacity(g.len());
        for &e in g.objects() {
            set.insert(e.0);
        }
        for (k, &x) in others.iter().enumerate() {
            if mask >> k & 1 == 1 {
                set.insert(x);
            }
        }
        let closed = set.ones().all(|a| {
            set.contains(g.inverse(Morphism(a)).0)
                && set.ones().all(|b| g.compose(Morphism(a), Morphism(b)).is_none_or(|c| set.contains(c.0)))
        });
        if closed {
            out.push(set);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: i64) -> Q {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn linear_algebra_basics() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rank(&a, 2), 1);
        let ns = nullspace(&a, 2);
        assert_eq!(ns, vec![vec![q(-2), q(1)]]);
        assert!(consistent(&[vec![q(1), q(1), q(2)], vec![q(2), q(2), q(4)]], 2));
        assert!(!consistent(&[vec![q(1), q(1), q(2)], vec![q(1), q(1), q(3)]], 2));
        let x = vec![vec![q(1), q(1), q(0)]];
        let y = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]];
        let i = span_intersection(&x, &y, 3);
        assert!(same_span(&i, &x, 3));
        assert!(span_intersection(&x, &[vec![q(0), q(0), q(1)]], 3).is_empty());
    }

    #[test]
    fn idempotent_search_finds_zero_one_vectors() {
        let found = idempotents_by_search(3, &[0, 2]);
        assert_eq!(found.len(), 4);
        assert!(found.iter().all(|c| c[1] == 0 && c.iter().all(|&v| v == 0 || v == 1)));
    }
}

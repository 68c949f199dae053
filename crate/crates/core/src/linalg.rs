//! Exact linear algebra over the rationals: rank, span comparison, and
//! nullspaces. Used for comparing constraint ideals slice-wise and for the
//! linear part of the gluing classifier.

use std::collections::BTreeSet;

use num::Zero;

use crate::param::{ParamPoly, Rat};

/// Row-reduce in place; returns the rank.
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for col in 0..ncols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() / inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in 0..ncols {
                    let sub = rows[r][c].clone() * f.clone();
                    rows[i][c] = rows[i][c].clone() - sub;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Express a list of parameter polynomials as vectors over the union of
/// their exponent supports.
pub fn vectorize(polys: &[&ParamPoly]) -> Vec<Vec<Rat>> {
    let keys: BTreeSet<Vec<u16>> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(e, _)| e.clone()))
        .collect();
    let keys: Vec<Vec<u16>> = keys.into_iter().collect();
    polys
        .iter()
        .map(|p| {
            keys.iter()
                .map(|k| {
                    p.terms()
                        .find(|(e, _)| *e == k)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(Rat::zero)
                })
                .collect()
        })
        .collect()
}

/// Rational linear-span equality, verified by rank computations in both
/// directions (rank A = rank B = rank [A; B]).
pub fn spans_equal(a: &[ParamPoly], b: &[ParamPoly]) -> bool {
    let all: Vec<&ParamPoly> = a.iter().chain(b.iter()).collect();
    let rows = vectorize(&all);
    let (ra_rows, rb_rows) = rows.split_at(a.len());
    let rank_a = rank(ra_rows.to_vec());
    let rank_b = rank(rb_rows.to_vec());
    let rank_ab = rank(rows.clone());
    rank_a == rank_ab && rank_b == rank_ab
}

pub fn span_dimension(a: &[ParamPoly]) -> usize {
    let refs: Vec<&ParamPoly> = a.iter().collect();
    rank(vectorize(&refs))
}

/// Nullspace basis of the homogeneous system rows·x = 0 with `ncols`
/// unknowns.
pub fn nullspace_basis(rows: Vec<Vec<Rat>>, ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows;
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    // reduced row echelon form
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() / inv.clone();
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in 0..ncols {
                    let sub = m[r][c].clone() * f.clone();
                    m[i][c] = m[i][c].clone() - sub;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rat::zero(); ncols];
        v[f] = Rat::from_integer(1.into());
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -row[f].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::rat_int;

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ];
        assert_eq!(rank(rows.clone()), 2);
        let ns = nullspace_basis(rows, 3);
        assert_eq!(ns.len(), 1);
        // v = (-1, -1, 1) up to scale
        let v = &ns[0];
        assert_eq!(v[0].clone() - v[1].clone(), rat_int(0));
    }

    #[test]
    fn span_equality() {
        let a = vec![
            ParamPoly::param(2, 0),
            ParamPoly::param(2, 0).add(&ParamPoly::param(2, 1)),
        ];
        let b = vec![ParamPoly::param(2, 1), ParamPoly::param(2, 0)];
        assert!(spans_equal(&a, &b));
        let c = vec![ParamPoly::param(2, 1)];
        assert!(!spans_equal(&a, &c));
        assert_eq!(span_dimension(&a), 2);
    }
}

//! Exact linear algebra over a [`Field`].
//!
//! Linear maps are passed as lists of *row images*: `rows[i]` is the image of
//! the i-th domain basis vector. Kernels are therefore left kernels and images
//! are row spans. The workhorse is [`Echelon`], an incrementally built row
//! echelon form with sparse rows that can optionally track how every stored
//! row is expressed in terms of the inserted vectors.

use std::collections::BTreeMap;

use crate::field::Field;

pub type SparseVec<E> = Vec<(usize, E)>;

#[derive(Clone, Debug)]
struct Row<E> {
    entries: SparseVec<E>,
    /// Expression of this row as a combination of inserted vectors.
    combo: SparseVec<E>,
}

/// Row echelon form over `F`, keyed by pivot column. Every stored row has a
/// unit pivot and zeros left of it.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    ncols: usize,
    rows: BTreeMap<usize, Row<F::Elem>>,
    inserted: usize,
}

/// Result of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert<E> {
    /// The vector was independent; its new pivot column.
    Added(usize),
    /// The vector was dependent: `combo` is a nontrivial relation among the
    /// inserted vectors (coefficients indexed by insertion order).
    Dependent(Vec<E>),
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, ncols: usize) -> Self {
        Echelon { field, ncols, rows: BTreeMap::new(), inserted: 0 }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors inserted so far, dependent ones included.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Stored rows as dense vectors, in pivot order.
    pub fn basis(&self) -> Vec<Vec<F::Elem>> {
        self.rows
            .values()
            .map(|r| {
                let mut v = vec![self.field.zero(); self.ncols];
                for (c, e) in &r.entries {
                    v[*c] = e.clone();
                }
                v
            })
            .collect()
    }

    /// Reduces `v` in place against the stored rows. Returns the combination
    /// of inserted vectors that was subtracted, i.e. `v_in = v_out + Σ c_i input_i`.
    pub fn reduce_tracking(&self, v: &mut [F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.ncols, "vector length does not match echelon width");
        let f = &self.field;
        let mut combo = vec![f.zero(); self.inserted];
        for (pivot, row) in &self.rows {
            if f.is_zero(&v[*pivot]) {
                continue;
            }
            let c = v[*pivot].clone();
            for (col, e) in &row.entries {
                f.sub_mul_assign(&mut v[*col], &c, e);
            }
            for (i, e) in &row.combo {
                let prod = f.mul(&c, e);
                f.add_assign(&mut combo[*i], &prod);
            }
        }
        combo
    }

    pub fn reduce(&self, v: &mut [F::Elem]) {
        assert_eq!(v.len(), self.ncols, "vector length does not match echelon width");
        let f = &self.field;
        for (pivot, row) in &self.rows {
            if f.is_zero(&v[*pivot]) {
                continue;
            }
            let c = v[*pivot].clone();
            for (col, e) in &row.entries {
                f.sub_mul_assign(&mut v[*col], &c, e);
            }
        }
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|e| self.field.is_zero(e))
    }

    /// Inserts `v`; the insertion index is the number of earlier calls.
    pub fn insert(&mut self, v: &[F::Elem]) -> Insert<F::Elem> {
        let f = self.field.clone();
        let idx = self.inserted;
        let mut w = v.to_vec();
        let mut combo = self.reduce_tracking(&mut w);
        self.inserted += 1;
        combo.push(f.zero());
        // relation: input_idx - Σ combo_i input_i = w
        let mut rel: Vec<F::Elem> = combo.iter().map(|c| f.neg(c)).collect();
        rel[idx] = f.one();
        match w.iter().position(|e| !f.is_zero(e)) {
            None => Insert::Dependent(rel),
            Some(p) => {
                let s = f.inv(&w[p]).expect("nonzero pivot");
                let entries =
                    w.iter().enumerate().filter(|(_, e)| !f.is_zero(e)).map(|(c, e)| (c, f.mul(e, &s))).collect();
                let combo =
                    rel.iter().enumerate().filter(|(_, e)| !f.is_zero(e)).map(|(c, e)| (c, f.mul(e, &s))).collect();
                self.rows.insert(p, Row { entries, combo });
                Insert::Added(p)
            }
        }
    }

    /// Inserts `v` only if independent; returns whether it was added.
    pub fn insert_if_new(&mut self, v: &[F::Elem]) -> bool {
        matches!(self.insert(v), Insert::Added(_))
    }
}

pub fn is_zero_vec<F: Field>(f: &F, v: &[F::Elem]) -> bool {
    v.iter().all(|e| f.is_zero(e))
}

pub fn rank<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize) -> usize {
    let mut e = Echelon::new(f.clone(), ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of `{c : Σ c_i rows_i = 0}`, deterministic for fixed input.
pub fn left_kernel<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut e = Echelon::new(f.clone(), ncols);
    let n = rows.len();
    let mut out = Vec::new();
    for r in rows {
        if let Insert::Dependent(mut rel) = e.insert(r) {
            rel.resize(n, f.zero());
            out.push(rel);
        }
    }
    out
}

/// Some `c` with `Σ c_i rows_i = target`, or `None` if `target` is outside the row span.
pub fn solve<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize, target: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let mut e = Echelon::new(f.clone(), ncols);
    for r in rows {
        e.insert(r);
    }
    let mut w = target.to_vec();
    let mut c = e.reduce_tracking(&mut w);
    if !is_zero_vec(f, &w) {
        return None;
    }
    c.resize(rows.len(), f.zero());
    Some(c)
}

/// Applies a row-image matrix to a coordinate vector: `Σ x_i rows_i`.
pub fn apply<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize, x: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); ncols];
    for (xi, r) in x.iter().zip(rows) {
        if f.is_zero(xi) {
            continue;
        }
        for (o, e) in out.iter_mut().zip(r) {
            let prod = f.mul(xi, e);
            f.add_assign(o, &prod);
        }
    }
    out
}

pub fn add_scaled<F: Field>(f: &F, acc: &mut [F::Elem], c: &F::Elem, v: &[F::Elem]) {
    if f.is_zero(c) {
        return;
    }
    for (a, e) in acc.iter_mut().zip(v) {
        if !f.is_zero(e) {
            let prod = f.mul(c, e);
            f.add_assign(a, &prod);
        }
    }
}

pub fn unit_vector<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

pub fn to_sparse<F: Field>(f: &F, v: &[F::Elem]) -> SparseVec<F::Elem> {
    v.iter().enumerate().filter(|(_, e)| !f.is_zero(e)).map(|(i, e)| (i, e.clone())).collect()
}

pub fn to_dense<F: Field>(f: &F, v: &SparseVec<F::Elem>, n: usize) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); n];
    for (i, e) in v {
        out[*i] = e.clone();
    }
    out
}

/// A subspace with a fixed basis and exact coordinate extraction.
#[derive(Clone, Debug)]
pub struct CoordinateSpace<F: Field> {
    echelon: Echelon<F>,
    basis: Vec<Vec<F::Elem>>,
}

impl<F: Field> CoordinateSpace<F> {
    /// `basis` must be linearly independent.
    pub fn new(f: &F, ncols: usize, basis: Vec<Vec<F::Elem>>) -> Self {
        let mut echelon = Echelon::new(f.clone(), ncols);
        for b in &basis {
            let added = echelon.insert_if_new(b);
            assert!(added, "coordinate basis must be independent");
        }
        CoordinateSpace { echelon, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.echelon.ncols()
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }

    pub fn coords(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let mut w = v.to_vec();
        let c = self.echelon.reduce_tracking(&mut w);
        if is_zero_vec(self.echelon.field(), &w) {
            Some(c)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.echelon.contains(v)
    }
}

/// Greedy complement: indices of `candidates` (in order) that extend the span
/// of `base` without creating dependencies among themselves.
pub fn greedy_complement<F: Field>(
    f: &F,
    ncols: usize,
    base: &[Vec<F::Elem>],
    candidates: &[Vec<F::Elem>],
) -> Vec<usize> {
    let mut e = Echelon::new(f.clone(), ncols);
    for b in base {
        e.insert(b);
    }
    candidates.iter().enumerate().filter_map(|(i, c)| e.insert_if_new(c).then_some(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        Rationals.from_i64(n)
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let f = Rationals;
        let rows = vec![vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(0)]];
        let k = left_kernel(&f, &rows, 2);
        assert_eq!(k.len(), 2);
        for c in &k {
            assert!(is_zero_vec(&f, &apply(&f, &rows, 2, c)));
        }
        assert_eq!(rank(&f, &rows, 2), 1);
    }

    #[test]
    fn solve_recovers_combination() {
        let f = PrimeField::new(7).unwrap();
        let rows = vec![vec![1, 0, 2], vec![0, 1, 3]];
        let target = vec![2, 5, (2 * 2 + 5 * 3) % 7];
        let c = solve(&f, &rows, 3, &target).unwrap();
        assert_eq!(apply(&f, &rows, 3, &c), target);
        assert!(solve(&f, &rows, 3, &[0, 0, 1]).is_none());
    }

    #[test]
    fn coordinates_in_subspace() {
        let f = Rationals;
        let basis = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        let sp = CoordinateSpace::new(&f, 3, basis);
        let v = vec![q(3), q(1), q(-2)];
        assert_eq!(sp.coords(&v), Some(vec![q(3), q(-2)]));
        assert_eq!(sp.coords(&[q(1), q(0), q(0)]), None);
    }

    #[test]
    fn greedy_complement_is_in_order() {
        let f = Rationals;
        let base = vec![vec![q(1), q(0), q(0)]];
        let cands =
            vec![vec![q(2), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]];
        assert_eq!(greedy_complement(&f, 3, &base, &cands), vec![1, 3]);
    }
}

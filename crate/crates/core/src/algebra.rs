//! Finite graded connected algebras and graded modules, stored as per-degree
//! bases with structure constants, plus the constructions built on them:
//! quotient rings, trivial extensions, fibre products and module restriction.
//!
//! Everything lives in degrees `0..=d_cap`. An object flagged `finite` is
//! known to vanish above its cap; for any other object, asking about a degree
//! above the cap is an error rather than a silent zero.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, CoordinateSpace, Echelon, SparseVec};
use crate::poly::{Degree, HomogeneousIdeal, Monomial, Poly, PolyRing};

/// How an algebra was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Quotient,
    TrivialExtension,
    FibreProduct,
    IteratedFibre(usize),
    /// Quotient of an abstract algebra by a homogeneous ideal.
    Residue,
}

/// Standard-monomial data of a quotient `S/I`.
#[derive(Clone, Debug)]
pub struct QuotientData<F: Field> {
    ideal: HomogeneousIdeal<F>,
    monomials: Vec<Vec<Monomial>>,
    index: HashMap<Monomial, usize>,
}

impl<F: Field> QuotientData<F> {
    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        self.ideal.ring()
    }

    pub fn ideal(&self) -> &HomogeneousIdeal<F> {
        &self.ideal
    }

    pub fn monomials(&self, d: usize) -> &[Monomial] {
        &self.monomials[d]
    }

    /// Coordinates of the class of `p` in degree `d`. `p` must be zero or
    /// homogeneous of degree `d`.
    pub fn coords(&self, p: &Poly<F>, d: usize) -> Result<Vec<F::Elem>> {
        match p.weighted_degree() {
            Degree::Zero => {}
            Degree::Homogeneous(e) if e as usize == d => {}
            Degree::Homogeneous(e) => return Err(Error::Dimension(format!("{p} has degree {e}, expected {d}"))),
            Degree::NotHomogeneous => return Err(Error::NotHomogeneous(p.to_string())),
        }
        if d >= self.monomials.len() {
            return Err(Error::BeyondCap { requested: d, cap: self.monomials.len() - 1 });
        }
        let f = p.field();
        let nf = self.ideal.groebner().normal_form(p);
        let mut v = vec![f.zero(); self.monomials[d].len()];
        for (m, c) in nf.terms() {
            let i = self.index[m];
            v[i] = c.clone();
        }
        Ok(v)
    }

    /// The polynomial with standard monomials weighted by `v`.
    pub fn poly(&self, d: usize, v: &[F::Elem]) -> Poly<F> {
        Poly::from_terms(self.ring(), self.monomials[d].iter().cloned().zip(v.iter().cloned()))
    }
}

/// Connected graded commutative algebra, finite-dimensional in each degree.
#[derive(Clone, Debug)]
pub struct GradedAlgebra<F: Field> {
    field: F,
    d_cap: usize,
    finite: bool,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    // table[d][e][i * dims[e] + j] = b_{d,i} * b_{e,j}, stored for d + e <= d_cap
    table: Vec<Vec<Vec<SparseVec<F::Elem>>>>,
    provenance: Provenance,
    quotient: Option<QuotientData<F>>,
}

fn sparse_mul_into<F: Field>(f: &F, out: &mut [F::Elem], c: &F::Elem, v: &SparseVec<F::Elem>) {
    for (k, e) in v {
        let p = f.mul(c, e);
        f.add_assign(&mut out[*k], &p);
    }
}

/// `2*x + y`-style rendering of a vector against basis labels.
pub fn format_vector<F: Field>(f: &F, v: &[F::Elem], labels: &[String]) -> String {
    let mut parts = Vec::new();
    for (c, l) in v.iter().zip(labels) {
        if f.is_zero(c) {
            continue;
        }
        let neg = f.is_negative(c);
        let abs = if neg { f.neg(c) } else { c.clone() };
        let body = if f.is_one(&abs) { l.clone() } else { format!("{}*{}", f.format(&abs), l) };
        parts.push((neg, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (neg, body)) in parts.into_iter().enumerate() {
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&body);
    }
    s
}

impl<F: Field> GradedAlgebra<F> {
    /// Assembles an algebra from basis labels and a product of basis elements.
    /// The product is queried for every pair with `d + e <= d_cap`.
    pub fn build(
        field: F,
        d_cap: usize,
        finite: bool,
        labels: Vec<Vec<String>>,
        provenance: Provenance,
        mut prod: impl FnMut(usize, usize, usize, usize) -> Vec<F::Elem>,
    ) -> Result<Self> {
        if labels.len() != d_cap + 1 {
            return Err(Error::Dimension(format!("expected {} graded pieces, got {}", d_cap + 1, labels.len())));
        }
        if labels[0].len() != 1 {
            return Err(Error::Construction(format!(
                "algebra is not connected: degree 0 has dimension {}",
                labels[0].len()
            )));
        }
        let dims: Vec<usize> = labels.iter().map(|l| l.len()).collect();
        let mut table = Vec::with_capacity(d_cap + 1);
        for d in 0..=d_cap {
            let mut row = Vec::with_capacity(d_cap + 1 - d);
            for e in 0..=(d_cap - d) {
                let mut cell = Vec::with_capacity(dims[d] * dims[e]);
                for i in 0..dims[d] {
                    for j in 0..dims[e] {
                        let v = prod(d, i, e, j);
                        if v.len() != dims[d + e] {
                            return Err(Error::Dimension(format!(
                                "product of degrees {d} and {e} has length {} instead of {}",
                                v.len(),
                                dims[d + e]
                            )));
                        }
                        cell.push(linalg::to_sparse(&field, &v));
                    }
                }
                row.push(cell);
            }
            table.push(row);
        }
        Ok(GradedAlgebra { field, d_cap, finite, dims, labels, table, provenance, quotient: None })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn d_cap(&self) -> usize {
        self.d_cap
    }

    /// Whether the algebra is known to vanish above the cap.
    pub fn is_finite(&self) -> bool {
        self.finite
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn quotient_data(&self) -> Option<&QuotientData<F>> {
        self.quotient.as_ref()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension in degree `d`; panics above the cap of a non-finite algebra.
    pub fn dim(&self, d: usize) -> usize {
        if d <= self.d_cap {
            self.dims[d]
        } else {
            assert!(self.finite, "degree {d} beyond cap {} of a truncated algebra", self.d_cap);
            0
        }
    }

    pub fn try_dim(&self, d: usize) -> Result<usize> {
        if d <= self.d_cap || self.finite {
            Ok(self.dim(d))
        } else {
            Err(Error::BeyondCap { requested: d, cap: self.d_cap })
        }
    }

    pub fn labels(&self, d: usize) -> &[String] {
        &self.labels[d]
    }

    pub fn top_degree(&self) -> Option<usize> {
        if !self.finite {
            return None;
        }
        (0..=self.d_cap).rev().find(|d| self.dims[*d] > 0)
    }

    pub fn hilbert(&self) -> Vec<usize> {
        self.dims.clone()
    }

    pub fn one(&self) -> Vec<F::Elem> {
        vec![self.field.one()]
    }

    /// `b_{d,i} * b_{e,j}`; requires `d + e <= d_cap`.
    pub fn basis_product(&self, d: usize, i: usize, e: usize, j: usize) -> &SparseVec<F::Elem> {
        if d <= e {
            &self.table[d][e][i * self.dims[e] + j]
        } else {
            &self.table[e][d][j * self.dims[d] + i]
        }
    }

    /// Product of `a` in degree `d` with `b` in degree `e`. Above the cap of
    /// a finite algebra the result is the empty vector.
    pub fn mul(&self, d: usize, a: &[F::Elem], e: usize, b: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        if d + e > self.d_cap {
            assert!(self.finite, "product lands in degree {} beyond cap {}", d + e, self.d_cap);
            return Vec::new();
        }
        let mut out = vec![f.zero(); self.dims[d + e]];
        for (i, ai) in a.iter().enumerate() {
            if f.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if f.is_zero(bj) {
                    continue;
                }
                let c = f.mul(ai, bj);
                sparse_mul_into(f, &mut out, &c, &self.table[d][e][i * self.dims[e] + j]);
            }
        }
        out
    }

    /// Left multiplication by `b_{e,i}` on degree `d`, as row images.
    pub fn mult_matrix(&self, e: usize, i: usize, d: usize) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let n = self.dim(d + e);
        (0..self.dims[d])
            .map(|j| {
                if d + e > self.d_cap {
                    return Vec::new();
                }
                linalg::to_dense(f, self.basis_product(e, i, d, j), n)
            })
            .collect()
    }

    /// Checks unit, commutativity and associativity on all stored basis triples.
    pub fn check_axioms(&self) -> Result<()> {
        let f = &self.field;
        for d in 0..=self.d_cap {
            for i in 0..self.dims[d] {
                let v = linalg::to_dense(f, &self.table[0][d][i], self.dims[d]);
                if v != linalg::unit_vector(f, self.dims[d], i) {
                    return Err(Error::Internal(format!("unit law fails on basis element ({d},{i})")));
                }
            }
        }
        for d in 0..=self.d_cap {
            for e in 0..=(self.d_cap - d) {
                for i in 0..self.dims[d] {
                    for j in 0..self.dims[e] {
                        if self.table[d][e][i * self.dims[e] + j] != self.table[e][d][j * self.dims[d] + i] {
                            return Err(Error::Internal(format!("commutativity fails in degrees {d},{e}")));
                        }
                    }
                }
            }
        }
        for d in 1..=self.d_cap {
            for e in 1..=(self.d_cap - d) {
                for g in 1..=(self.d_cap - d - e) {
                    for i in 0..self.dims[d] {
                        for j in 0..self.dims[e] {
                            for k in 0..self.dims[g] {
                                let bi = linalg::unit_vector(f, self.dims[d], i);
                                let bj = linalg::unit_vector(f, self.dims[e], j);
                                let bk = linalg::unit_vector(f, self.dims[g], k);
                                let l = self.mul(d + e, &self.mul(d, &bi, e, &bj), g, &bk);
                                let r = self.mul(d, &bi, e + g, &self.mul(e, &bj, g, &bk));
                                if l != r {
                                    return Err(Error::Internal(format!("associativity fails in degrees {d},{e},{g}")));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Basis of `(m^2)_d`, spanned by products of positive-degree basis elements.
    fn square_of_max_ideal(&self, d: usize) -> Vec<Vec<F::Elem>> {
        let mut out = Vec::new();
        for e in 1..=d / 2 {
            for i in 0..self.dims[e] {
                for j in 0..self.dims[d - e] {
                    out.push(linalg::to_dense(&self.field, self.basis_product(e, i, d - e, j), self.dims[d]));
                }
            }
        }
        out
    }

    /// Minimal generators of the maximal ideal: in each degree, the first
    /// basis vectors completing `(m^2)_d` to `m_d`.
    pub fn min_gens(&self) -> MaxIdealData<F> {
        let f = &self.field;
        let mut gens = Vec::new();
        for d in 1..=self.d_cap {
            let base = self.square_of_max_ideal(d);
            let cands: Vec<Vec<F::Elem>> = (0..self.dims[d]).map(|i| linalg::unit_vector(f, self.dims[d], i)).collect();
            for i in linalg::greedy_complement(f, self.dims[d], &base, &cands) {
                gens.push((d, cands[i].clone()));
            }
        }
        MaxIdealData { gens }
    }

    /// The classes of the variables of a quotient presentation, in variable order.
    pub fn variable_generators(&self) -> Result<Vec<(usize, Vec<F::Elem>)>> {
        let q = self
            .quotient
            .as_ref()
            .ok_or_else(|| Error::Construction("algebra has no polynomial presentation".into()))?;
        let ring = q.ring();
        (0..ring.nvars())
            .map(|i| {
                let d = ring.weights()[i] as usize;
                Ok((d, q.coords(&Poly::var(ring, i), d)?))
            })
            .collect()
    }

    /// `self / (gens)` together with the projection.
    pub fn quotient_by(self: &Arc<Self>, gens: &[(usize, Vec<F::Elem>)]) -> Result<(Arc<Self>, AlgebraMap<F>)> {
        let reg = GradedModule::regular(self);
        let sub = reg.span_of(gens)?;
        if !sub[0].is_empty() {
            return Err(Error::UnitIdeal);
        }
        let f = self.field.clone();
        let mut echelons = Vec::new();
        let mut keep: Vec<Vec<usize>> = Vec::new();
        for d in 0..=self.d_cap {
            let mut e = Echelon::new(f.clone(), self.dims[d]);
            for v in &sub[d] {
                e.insert(v);
            }
            keep.push((0..self.dims[d]).filter(|c| !e.is_pivot(*c)).collect());
            echelons.push(e);
        }
        let project = |d: usize, v: &[F::Elem]| -> Vec<F::Elem> {
            let mut w = v.to_vec();
            echelons[d].reduce(&mut w);
            keep[d].iter().map(|c| w[*c].clone()).collect()
        };
        let labels: Vec<Vec<String>> =
            (0..=self.d_cap).map(|d| keep[d].iter().map(|c| self.labels[d][*c].clone()).collect()).collect();
        let q = GradedAlgebra::build(f.clone(), self.d_cap, self.finite, labels, Provenance::Residue, |d, i, e, j| {
            let a = linalg::unit_vector(&f, self.dims[d], keep[d][i]);
            let b = linalg::unit_vector(&f, self.dims[e], keep[e][j]);
            project(d + e, &self.mul(d, &a, e, &b))
        })?;
        let q = Arc::new(q);
        let mats = (0..=self.d_cap)
            .map(|d| (0..self.dims[d]).map(|i| project(d, &linalg::unit_vector(&f, self.dims[d], i))).collect())
            .collect();
        let map = AlgebraMap { source: self.clone(), target: q.clone(), mats };
        Ok((q, map))
    }
}

/// Minimal generators of the maximal ideal as `(degree, vector)` pairs,
/// sorted by degree and then stored order.
#[derive(Clone, Debug)]
pub struct MaxIdealData<F: Field> {
    pub gens: Vec<(usize, Vec<F::Elem>)>,
}

impl<F: Field> MaxIdealData<F> {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.gens.iter().map(|(d, _)| *d).collect()
    }
}

/// Anything graded over a [`GradedAlgebra`] that the resolution machinery can act on.
pub trait GradedSpace<F: Field> {
    fn algebra(&self) -> &Arc<GradedAlgebra<F>>;
    fn dim(&self, d: usize) -> usize;
    /// `b_{e,i} · v` for `v` in degree `d`.
    fn act_basis(&self, e: usize, i: usize, d: usize, v: &[F::Elem]) -> Vec<F::Elem>;

    /// `a · v` for `a` in degree `e` and `v` in degree `d`.
    fn act(&self, e: usize, a: &[F::Elem], d: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra().field().clone();
        let mut out = vec![f.zero(); self.dim(d + e)];
        for (i, c) in a.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let w = self.act_basis(e, i, d, v);
            linalg::add_scaled(&f, &mut out, c, &w);
        }
        out
    }
}

/// Graded module over a [`GradedAlgebra`], in degrees `0..=d_cap` of the algebra.
#[derive(Clone, Debug)]
pub struct GradedModule<F: Field> {
    algebra: Arc<GradedAlgebra<F>>,
    finite: bool,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    // table[e][d][i * dims[d] + j] = b_{e,i} · m_{d,j}, stored for e + d <= d_cap
    table: Vec<Vec<Vec<SparseVec<F::Elem>>>>,
    regular: bool,
}

impl<F: Field> GradedSpace<F> for GradedModule<F> {
    fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        &self.algebra
    }

    fn dim(&self, d: usize) -> usize {
        GradedModule::dim(self, d)
    }

    fn act_basis(&self, e: usize, i: usize, d: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra.field();
        if d + e > self.cap() {
            assert!(self.finite, "action lands beyond the cap of a truncated module");
            return Vec::new();
        }
        let mut out = vec![f.zero(); self.dims[d + e]];
        for (j, c) in v.iter().enumerate() {
            if !f.is_zero(c) {
                sparse_mul_into(f, &mut out, c, &self.table[e][d][i * self.dims[d] + j]);
            }
        }
        out
    }
}

impl<F: Field> GradedModule<F> {
    /// Assembles a module from labels and the action of basis elements.
    pub fn build(
        algebra: &Arc<GradedAlgebra<F>>,
        finite: bool,
        labels: Vec<Vec<String>>,
        mut act: impl FnMut(usize, usize, usize, usize) -> Vec<F::Elem>,
    ) -> Result<Self> {
        let cap = algebra.d_cap();
        if labels.len() != cap + 1 {
            return Err(Error::Dimension(format!("expected {} graded pieces, got {}", cap + 1, labels.len())));
        }
        let f = algebra.field().clone();
        let dims: Vec<usize> = labels.iter().map(|l| l.len()).collect();
        let mut table = Vec::with_capacity(cap + 1);
        for e in 0..=cap {
            let mut row = Vec::with_capacity(cap + 1 - e);
            for d in 0..=(cap - e) {
                let mut cell = Vec::with_capacity(algebra.dim(e) * dims[d]);
                for i in 0..algebra.dim(e) {
                    for j in 0..dims[d] {
                        let v = act(e, i, d, j);
                        if v.len() != dims[d + e] {
                            return Err(Error::Dimension(format!(
                                "action of degree {e} on degree {d} has length {} instead of {}",
                                v.len(),
                                dims[d + e]
                            )));
                        }
                        cell.push(linalg::to_sparse(&f, &v));
                    }
                }
                row.push(cell);
            }
            table.push(row);
        }
        Ok(GradedModule { algebra: algebra.clone(), finite, dims, labels, table, regular: false })
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        &self.algebra
    }

    pub fn field(&self) -> &F {
        self.algebra.field()
    }

    pub fn cap(&self) -> usize {
        self.algebra.d_cap()
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, d: usize) -> usize {
        if d <= self.cap() {
            self.dims[d]
        } else {
            assert!(self.finite, "degree {d} beyond cap {} of a truncated module", self.cap());
            0
        }
    }

    pub fn labels(&self, d: usize) -> &[String] {
        &self.labels[d]
    }

    pub fn is_zero(&self) -> bool {
        self.finite && self.dims.iter().all(|d| *d == 0)
    }

    pub fn top_degree(&self) -> Option<usize> {
        if !self.finite {
            return None;
        }
        (0..=self.cap()).rev().find(|d| self.dims[*d] > 0)
    }

    /// Lowest nonzero degree.
    pub fn bottom_degree(&self) -> Option<usize> {
        (0..=self.cap()).find(|d| self.dims[*d] > 0)
    }

    pub fn hilbert(&self) -> Vec<usize> {
        self.dims.clone()
    }

    /// The algebra as a module over itself.
    pub fn regular(algebra: &Arc<GradedAlgebra<F>>) -> Self {
        let f = algebra.field().clone();
        let labels = (0..=algebra.d_cap()).map(|d| algebra.labels(d).to_vec()).collect();
        let mut m = Self::build(algebra, algebra.is_finite(), labels, |e, i, d, j| {
            linalg::to_dense(&f, algebra.basis_product(e, i, d, j), algebra.dim(d + e))
        })
        .expect("regular module is well formed");
        m.regular = true;
        m
    }

    /// Whether this is the algebra as a module over itself.
    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// The residue field `k` in degree 0 with trivial action of the maximal ideal.
    pub fn residue_field(algebra: &Arc<GradedAlgebra<F>>) -> Self {
        let f = algebra.field().clone();
        let labels = (0..=algebra.d_cap()).map(|d| if d == 0 { vec!["1".to_string()] } else { vec![] }).collect();
        Self::build(algebra, true, labels, |e, _, d, _| {
            if e == 0 && d == 0 {
                vec![f.one()]
            } else {
                vec![f.zero(); if d + e == 0 { 1 } else { 0 }]
            }
        })
        .expect("residue field is well formed")
    }

    /// Per-degree basis of the submodule generated by `gens`.
    pub fn span_of(&self, gens: &[(usize, Vec<F::Elem>)]) -> Result<Vec<Vec<Vec<F::Elem>>>> {
        let f = self.field().clone();
        for (d, v) in gens {
            if *d > self.cap() || v.len() != self.dims[*d] {
                return Err(Error::Dimension(format!("generator of degree {d} has the wrong shape")));
            }
        }
        let mut out = Vec::with_capacity(self.cap() + 1);
        for d in 0..=self.cap() {
            let mut e = Echelon::new(f.clone(), self.dims[d]);
            let mut basis = Vec::new();
            for (g, v) in gens {
                if *g > d {
                    continue;
                }
                for i in 0..self.algebra.dim(d - g) {
                    let w = self.act_basis(d - g, i, *g, v);
                    if e.insert_if_new(&w) {
                        basis.push(w);
                    }
                }
            }
            out.push(basis);
        }
        Ok(out)
    }

    /// Module structure on a graded subspace closed under the action.
    pub fn subspace_module(&self, basis: Vec<Vec<Vec<F::Elem>>>) -> Result<Self> {
        let f = self.field().clone();
        let spaces: Vec<CoordinateSpace<F>> =
            basis.iter().enumerate().map(|(d, b)| CoordinateSpace::new(&f, self.dims[d], b.clone())).collect();
        let labels = (0..=self.cap())
            .map(|d| basis[d].iter().map(|v| format_vector(&f, v, &self.labels[d])).collect())
            .collect();
        let mut failure = None;
        let m = Self::build(&self.algebra, self.finite, labels, |e, i, d, j| {
            let w = self.act_basis(e, i, d, &basis[d][j]);
            match spaces[d + e].coords(&w) {
                Some(c) => c,
                None => {
                    failure = Some((e, d));
                    vec![f.zero(); spaces[d + e].dim()]
                }
            }
        })?;
        if let Some((e, d)) = failure {
            return Err(Error::Construction(format!(
                "subspace is not closed under the action (degree {e} on degree {d})"
            )));
        }
        Ok(m)
    }

    pub fn generated_submodule(&self, gens: &[(usize, Vec<F::Elem>)]) -> Result<Self> {
        let basis = self.span_of(gens)?;
        self.subspace_module(basis)
    }

    /// `self / (gens)`.
    pub fn quotient_by(&self, gens: &[(usize, Vec<F::Elem>)]) -> Result<Self> {
        let f = self.field().clone();
        let sub = self.span_of(gens)?;
        let mut echelons = Vec::new();
        let mut keep: Vec<Vec<usize>> = Vec::new();
        for d in 0..=self.cap() {
            let mut e = Echelon::new(f.clone(), self.dims[d]);
            for v in &sub[d] {
                e.insert(v);
            }
            keep.push((0..self.dims[d]).filter(|c| !e.is_pivot(*c)).collect());
            echelons.push(e);
        }
        let labels = (0..=self.cap()).map(|d| keep[d].iter().map(|c| self.labels[d][*c].clone()).collect()).collect();
        Self::build(&self.algebra, self.finite, labels, |e, i, d, j| {
            let mut w = self.act_basis(e, i, d, &linalg::unit_vector(&f, self.dims[d], keep[d][j]));
            if d + e > self.cap() {
                return w;
            }
            echelons[d + e].reduce(&mut w);
            keep[d + e].iter().map(|c| w[*c].clone()).collect()
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) {
            return Err(Error::Construction("direct sum of modules over different algebras".into()));
        }
        let f = self.field().clone();
        let labels = (0..=self.cap())
            .map(|d| {
                let mut l: Vec<String> = self.labels[d].iter().map(|s| format!("({s}, 0)")).collect();
                l.extend(other.labels[d].iter().map(|s| format!("(0, {s})")));
                l
            })
            .collect();
        let (a, b) = (&self.dims, &other.dims);
        Self::build(&self.algebra, self.finite && other.finite, labels, |e, i, d, j| {
            if d + e > self.cap() {
                return Vec::new();
            }
            let mut out = vec![f.zero(); a[d + e] + b[d + e]];
            if j < a[d] {
                let w = self.act_basis(e, i, d, &linalg::unit_vector(&f, a[d], j));
                out[..a[d + e]].clone_from_slice(&w);
            } else {
                let w = other.act_basis(e, i, d, &linalg::unit_vector(&f, b[d], j - a[d]));
                out[a[d + e]..].clone_from_slice(&w);
            }
            out
        })
    }

    /// `N` regarded as a module over the source of `map` via `a · n = map(a) n`.
    pub fn restrict_along(map: &AlgebraMap<F>, n: &GradedModule<F>) -> Result<Self> {
        if !Arc::ptr_eq(map.target(), &n.algebra) {
            return Err(Error::Construction("module is not over the target of the map".into()));
        }
        let src = map.source();
        let cap = src.d_cap();
        if cap > n.cap() && !n.finite {
            return Err(Error::BeyondCap { requested: cap, cap: n.cap() });
        }
        let f = src.field().clone();
        let labels = (0..=cap).map(|d| if d <= n.cap() { n.labels[d].clone() } else { vec![] }).collect();
        Self::build(src, n.finite, labels, |e, i, d, j| {
            if d + e > n.cap() {
                return Vec::new();
            }
            let a = map.apply(e, &linalg::unit_vector(&f, src.dim(e), i));
            n.act(e, &a, d, &linalg::unit_vector(&f, n.dim(d), j))
        })
    }

    /// `M(-s)`: the piece of degree `d` is `M_{d-s}`. Whatever is pushed past
    /// the cap is lost, and the result is finite only if nothing was.
    pub fn shifted(&self, s: usize) -> Result<Self> {
        let cap = self.cap();
        let lost = (cap + 1).saturating_sub(s)..=cap;
        let finite = self.finite && lost.clone().all(|d| self.dims[d] == 0);
        let labels = (0..=cap).map(|d| if d >= s { self.labels[d - s].clone() } else { vec![] }).collect();
        let f = self.field().clone();
        Self::build(&self.algebra, finite, labels, |e, i, d, j| {
            self.act_basis(e, i, d - s, &linalg::unit_vector(&f, self.dims[d - s], j))
        })
    }

    /// The ideal generated by `gens`, as a module.
    pub fn ideal_as_module(algebra: &Arc<GradedAlgebra<F>>, gens: &[(usize, Vec<F::Elem>)]) -> Result<Self> {
        Self::regular(algebra).generated_submodule(gens)
    }

    /// Minimal generators: per degree, basis vectors completing `(mM)_d`.
    pub fn min_gens(&self) -> Vec<(usize, Vec<F::Elem>)> {
        let f = self.field().clone();
        let mut out = Vec::new();
        for d in 0..=self.cap() {
            let mut base = Vec::new();
            for e in 1..=d {
                for i in 0..self.algebra.dim(e) {
                    for j in 0..self.dims[d - e] {
                        base.push(self.act_basis(e, i, d - e, &linalg::unit_vector(&f, self.dims[d - e], j)));
                    }
                }
            }
            let cands: Vec<Vec<F::Elem>> =
                (0..self.dims[d]).map(|i| linalg::unit_vector(&f, self.dims[d], i)).collect();
            for i in linalg::greedy_complement(&f, self.dims[d], &base, &cands) {
                out.push((d, cands[i].clone()));
            }
        }
        out
    }

    /// Checks the unit law and `a(bm) = (ab)m` on all stored basis triples.
    pub fn check_axioms(&self) -> Result<()> {
        let f = self.field().clone();
        let a = &self.algebra;
        for d in 0..=self.cap() {
            for j in 0..self.dims[d] {
                let m = linalg::unit_vector(&f, self.dims[d], j);
                if self.act_basis(0, 0, d, &m) != m {
                    return Err(Error::Internal(format!("unit does not act as identity on ({d},{j})")));
                }
            }
        }
        for e1 in 1..=self.cap() {
            for e2 in 1..=(self.cap() - e1) {
                for d in 0..=(self.cap() - e1 - e2) {
                    for i1 in 0..a.dim(e1) {
                        for i2 in 0..a.dim(e2) {
                            for j in 0..self.dims[d] {
                                let m = linalg::unit_vector(&f, self.dims[d], j);
                                let inner = self.act_basis(e2, i2, d, &m);
                                let l = self.act_basis(e1, i1, d + e2, &inner);
                                let ab = a.mul(
                                    e1,
                                    &linalg::unit_vector(&f, a.dim(e1), i1),
                                    e2,
                                    &linalg::unit_vector(&f, a.dim(e2), i2),
                                );
                                let r = self.act(e1 + e2, &ab, d, &m);
                                if l != r {
                                    return Err(Error::Internal(format!(
                                        "module associativity fails in degrees {e1},{e2},{d}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Degree-preserving algebra homomorphism given by per-degree row images.
#[derive(Clone, Debug)]
pub struct AlgebraMap<F: Field> {
    source: Arc<GradedAlgebra<F>>,
    target: Arc<GradedAlgebra<F>>,
    // mats[d][i] = image of source basis element (d, i)
    mats: Vec<Vec<Vec<F::Elem>>>,
}

impl<F: Field> AlgebraMap<F> {
    pub fn new(
        source: &Arc<GradedAlgebra<F>>,
        target: &Arc<GradedAlgebra<F>>,
        mats: Vec<Vec<Vec<F::Elem>>>,
    ) -> Result<Self> {
        if mats.len() != source.d_cap() + 1 {
            return Err(Error::Dimension("map must be given in every stored degree".into()));
        }
        for (d, m) in mats.iter().enumerate() {
            if m.len() != source.dim(d) || m.iter().any(|r| r.len() != target.try_dim(d).unwrap_or(usize::MAX)) {
                return Err(Error::Dimension(format!("map matrix in degree {d} has the wrong shape")));
            }
        }
        Ok(AlgebraMap { source: source.clone(), target: target.clone(), mats })
    }

    pub fn identity(a: &Arc<GradedAlgebra<F>>) -> Self {
        let f = a.field();
        let mats =
            (0..=a.d_cap()).map(|d| (0..a.dim(d)).map(|i| linalg::unit_vector(f, a.dim(d), i)).collect()).collect();
        AlgebraMap { source: a.clone(), target: a.clone(), mats }
    }

    /// The natural map `S/I -> S/J` for `I ⊆ J` in the same polynomial ring.
    pub fn between_quotients(source: &Arc<GradedAlgebra<F>>, target: &Arc<GradedAlgebra<F>>) -> Result<Self> {
        let (qs, qt) = match (source.quotient_data(), target.quotient_data()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Construction("both algebras must be polynomial quotients".into())),
        };
        if qs.ring() != qt.ring() {
            return Err(Error::RingMismatch);
        }
        for g in qs.ideal().gens() {
            if !qt.ideal().contains(g) {
                return Err(Error::Construction(format!("{g} is not in the target ideal")));
            }
        }
        let mut mats = Vec::new();
        for d in 0..=source.d_cap() {
            let mut rows = Vec::new();
            for m in qs.monomials(d) {
                let p = Poly::term(qs.ring(), source.field().one(), m.clone());
                if d > target.d_cap() {
                    if !target.is_finite() {
                        return Err(Error::BeyondCap { requested: d, cap: target.d_cap() });
                    }
                    rows.push(Vec::new());
                } else {
                    rows.push(qt.coords(&p, d)?);
                }
            }
            mats.push(rows);
        }
        Ok(AlgebraMap { source: source.clone(), target: target.clone(), mats })
    }

    pub fn source(&self) -> &Arc<GradedAlgebra<F>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedAlgebra<F>> {
        &self.target
    }

    pub fn matrix(&self, d: usize) -> &[Vec<F::Elem>] {
        &self.mats[d]
    }

    pub fn apply(&self, d: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.source.field();
        let n = self.target.dim(d);
        linalg::apply(f, &self.mats[d], n, v)
    }

    /// Surjective in every degree of the source window.
    pub fn is_surjective(&self) -> bool {
        let f = self.source.field();
        (0..=self.source.d_cap().min(self.target.d_cap()))
            .all(|d| linalg::rank(f, &self.mats[d], self.target.dim(d)) == self.target.dim(d))
    }

    pub fn compose(&self, after: &AlgebraMap<F>) -> Result<AlgebraMap<F>> {
        if !Arc::ptr_eq(&self.target, &after.source) {
            return Err(Error::Construction("maps are not composable".into()));
        }
        let mats =
            (0..=self.source.d_cap()).map(|d| self.mats[d].iter().map(|r| after.apply(d, r)).collect()).collect();
        Ok(AlgebraMap { source: self.source.clone(), target: after.target.clone(), mats })
    }

    /// Checks `f(ab) = f(a) f(b)` on basis pairs and `f(1) = 1`.
    pub fn check_multiplicative(&self) -> Result<()> {
        let f = self.source.field();
        let s = &self.source;
        if self.apply(0, &s.one()) != self.target.one() {
            return Err(Error::Internal("map does not preserve the unit".into()));
        }
        let cap = s.d_cap().min(self.target.d_cap());
        for d in 1..=cap {
            for e in d..=(cap - d) {
                for i in 0..s.dim(d) {
                    for j in 0..s.dim(e) {
                        let a = linalg::unit_vector(f, s.dim(d), i);
                        let b = linalg::unit_vector(f, s.dim(e), j);
                        let l = self.apply(d + e, &s.mul(d, &a, e, &b));
                        let r = self.target.mul(d, &self.apply(d, &a), e, &self.apply(e, &b));
                        if l != r {
                            return Err(Error::Internal(format!("map is not multiplicative in degrees {d},{e}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Per-degree basis of the kernel.
    pub fn kernel(&self) -> Vec<Vec<Vec<F::Elem>>> {
        let f = self.source.field();
        (0..=self.source.d_cap()).map(|d| linalg::left_kernel(f, &self.mats[d], self.target.dim(d))).collect()
    }

    pub fn is_identity(&self) -> bool {
        Arc::ptr_eq(&self.source, &self.target)
            && self.mats.iter().enumerate().all(|(d, m)| {
                m.iter().enumerate().all(|(i, r)| *r == linalg::unit_vector(self.source.field(), self.source.dim(d), i))
            })
    }
}

/// `S/I` with graded pieces spanned by standard monomials.
pub fn quotient_algebra<F: Field>(ideal: &HomogeneousIdeal<F>, d_cap: usize) -> Result<Arc<GradedAlgebra<F>>> {
    let ring = ideal.ring().clone();
    let max_w = *ring.weights().iter().max().expect("ring has variables") as usize;
    if d_cap < 2 * max_w {
        return Err(Error::CapTooSmall(format!(
            "degree cap {d_cap} is below twice the largest variable weight {max_w}"
        )));
    }
    let g = ideal.groebner();
    if g.is_unit() {
        return Err(Error::UnitIdeal);
    }
    let monomials: Vec<Vec<Monomial>> = (0..=d_cap).map(|d| g.standard_monomials(d as u32)).collect();
    let mut index = HashMap::new();
    for ms in &monomials {
        for (i, m) in ms.iter().enumerate() {
            index.insert(m.clone(), i);
        }
    }
    let finite = g.top_degree().is_some_and(|t| t as usize <= d_cap);
    let labels = monomials.iter().map(|ms| ms.iter().map(|m| m.format(ring.names())).collect()).collect();
    let q = QuotientData { ideal: ideal.clone(), monomials, index };
    let f = ring.field().clone();
    let mut alg = GradedAlgebra::build(f.clone(), d_cap, finite, labels, Provenance::Quotient, |d, i, e, j| {
        let m = q.monomials[d][i].mul(&q.monomials[e][j]);
        let p = Poly::term(&ring, f.one(), m);
        q.coords(&p, d + e).expect("product of standard monomials is homogeneous")
    })?;
    alg.quotient = Some(q);
    Ok(Arc::new(alg))
}

/// The polynomial ring itself, truncated at `d_cap`.
pub fn polynomial_algebra<F: Field>(ring: &Arc<PolyRing<F>>, d_cap: usize) -> Result<Arc<GradedAlgebra<F>>> {
    quotient_algebra(&HomogeneousIdeal::zero(ring), d_cap)
}

/// An algebra `A` with a subalgebra `R` split off by one or more sections.
#[derive(Clone, Debug)]
pub struct Retract<F: Field> {
    pub algebra: Arc<GradedAlgebra<F>>,
    pub base: Arc<GradedAlgebra<F>>,
    /// `j: R -> A`
    pub inclusion: AlgebraMap<F>,
    /// Sections `p: A -> R` with `p ∘ j = id`.
    pub sections: Vec<AlgebraMap<F>>,
}

impl<F: Field> Retract<F> {
    /// Per-degree basis of `ker(sections[k])`.
    pub fn kernel(&self, k: usize) -> Vec<Vec<Vec<F::Elem>>> {
        self.sections[k].kernel()
    }

    /// `ker(sections[k])` as an `R`-module via the inclusion.
    pub fn kernel_as_base_module(&self, k: usize) -> Result<GradedModule<F>> {
        let a_over_r = GradedModule::restrict_along(&self.inclusion, &GradedModule::regular(&self.algebra))?;
        a_over_r.subspace_module(self.kernel(k))
    }

    /// `ker(sections[k])` as an `A`-module.
    pub fn kernel_as_module(&self, k: usize) -> Result<GradedModule<F>> {
        GradedModule::regular(&self.algebra).subspace_module(self.kernel(k))
    }

    /// An `R`-module regarded as an `A`-module through `sections[k]`.
    pub fn restrict_to_algebra(&self, k: usize, n: &GradedModule<F>) -> Result<GradedModule<F>> {
        GradedModule::restrict_along(&self.sections[k], n)
    }

    /// Checks `p ∘ j = id` for every section.
    pub fn check(&self) -> Result<()> {
        self.inclusion.check_multiplicative()?;
        for p in &self.sections {
            p.check_multiplicative()?;
            if !self.inclusion.compose(p)?.is_identity() {
                return Err(Error::Internal("section is not a left inverse of the inclusion".into()));
            }
        }
        Ok(())
    }

    /// Whether every product of an element of `ker p_a` with one of `ker p_b` vanishes.
    pub fn kernels_annihilate(&self, a: usize, b: usize) -> bool {
        let ka = self.kernel(a);
        let kb = self.kernel(b);
        let alg = &self.algebra;
        let f = alg.field();
        for d in 0..=alg.d_cap() {
            for e in 0..=(alg.d_cap() - d) {
                for x in &ka[d] {
                    for y in &kb[e] {
                        if !linalg::is_zero_vec(f, &alg.mul(d, x, e, y)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// `R ⋉ M`: `R ⊕ M` with `(r, m)(r', m') = (rr', rm' + r'm)`.
pub fn trivial_extension<F: Field>(r: &Arc<GradedAlgebra<F>>, m: &GradedModule<F>) -> Result<Retract<F>> {
    if !Arc::ptr_eq(r, m.algebra()) {
        return Err(Error::Construction("module is not over the given algebra".into()));
    }
    if m.dim(0) != 0 {
        return Err(Error::Construction(
            "module has a generator in degree 0; the trivial extension would not be connected".into(),
        ));
    }
    let f = r.field().clone();
    let cap = r.d_cap();
    let rd = r.dims().to_vec();
    let md = m.dims().to_vec();
    let labels = (0..=cap)
        .map(|d| {
            let mut l = r.labels(d).to_vec();
            l.extend(m.labels(d).iter().map(|s| format!("[{s}]")));
            l
        })
        .collect();
    let alg = GradedAlgebra::build(
        f.clone(),
        cap,
        r.is_finite() && m.is_finite(),
        labels,
        Provenance::TrivialExtension,
        |d, i, e, j| {
            let mut out = vec![f.zero(); rd[d + e] + md[d + e]];
            match (i < rd[d], j < rd[e]) {
                (true, true) => {
                    let p = linalg::to_dense(&f, r.basis_product(d, i, e, j), rd[d + e]);
                    out[..rd[d + e]].clone_from_slice(&p);
                }
                (true, false) => {
                    let p = m.act_basis(d, i, e, &linalg::unit_vector(&f, md[e], j - rd[e]));
                    out[rd[d + e]..].clone_from_slice(&p);
                }
                (false, true) => {
                    let p = m.act_basis(e, j, d, &linalg::unit_vector(&f, md[d], i - rd[d]));
                    out[rd[d + e]..].clone_from_slice(&p);
                }
                (false, false) => {}
            }
            out
        },
    )?;
    let alg = Arc::new(alg);
    let inc = (0..=cap).map(|d| (0..rd[d]).map(|i| linalg::unit_vector(&f, rd[d] + md[d], i)).collect()).collect();
    let proj = (0..=cap)
        .map(|d| {
            (0..rd[d] + md[d])
                .map(|i| if i < rd[d] { linalg::unit_vector(&f, rd[d], i) } else { vec![f.zero(); rd[d]] })
                .collect()
        })
        .collect();
    Ok(Retract {
        inclusion: AlgebraMap::new(r, &alg, inc)?,
        sections: vec![AlgebraMap::new(&alg, r, proj)?],
        algebra: alg,
        base: r.clone(),
    })
}

/// Subalgebra of `R_1 × … × R_n` cut out by `ε_1(r_1) = ε_i(r_i)`, together
/// with the coordinate projections.
fn kernel_subalgebra<F: Field>(
    eps: &[&AlgebraMap<F>],
    provenance: Provenance,
) -> Result<(Arc<GradedAlgebra<F>>, Vec<AlgebraMap<F>>)> {
    let n = eps.len();
    let target = eps[0].target().clone();
    for e in eps {
        if !Arc::ptr_eq(e.target(), &target) {
            return Err(Error::Construction("maps have different targets".into()));
        }
        if !e.is_surjective() {
            return Err(Error::Construction("map is not surjective in every stored degree".into()));
        }
    }
    let f = target.field().clone();
    let cap = eps.iter().map(|e| e.source().d_cap()).min().expect("at least one factor");
    if cap > target.d_cap() && !target.is_finite() {
        return Err(Error::BeyondCap { requested: cap, cap: target.d_cap() });
    }
    let factors: Vec<Arc<GradedAlgebra<F>>> = eps.iter().map(|e| e.source().clone()).collect();
    let mut offsets: Vec<Vec<usize>> = Vec::new();
    let mut spaces: Vec<CoordinateSpace<F>> = Vec::new();
    for d in 0..=cap {
        let mut off = vec![0];
        for r in &factors {
            off.push(off.last().unwrap() + r.dim(d));
        }
        let total = *off.last().unwrap();
        let sd = target.dim(d);
        let width = (n - 1) * sd;
        let mut rows = Vec::with_capacity(total);
        for (k, r) in factors.iter().enumerate() {
            for i in 0..r.dim(d) {
                let img = eps[k].apply(d, &linalg::unit_vector(&f, r.dim(d), i));
                let mut row = vec![f.zero(); width];
                if k == 0 {
                    for b in 0..n - 1 {
                        row[b * sd..(b + 1) * sd].clone_from_slice(&img);
                    }
                } else {
                    let neg: Vec<F::Elem> = img.iter().map(|x| f.neg(x)).collect();
                    row[(k - 1) * sd..k * sd].clone_from_slice(&neg);
                }
                rows.push(row);
            }
        }
        let ker = linalg::left_kernel(&f, &rows, width);
        let mut ech = Echelon::new(f.clone(), total);
        for v in &ker {
            ech.insert(v);
        }
        spaces.push(CoordinateSpace::new(&f, total, ech.basis()));
        offsets.push(off);
    }
    let labels = (0..=cap)
        .map(|d| {
            spaces[d]
                .basis()
                .iter()
                .map(|v| {
                    let parts: Vec<String> = factors
                        .iter()
                        .enumerate()
                        .map(|(k, r)| format_vector(&f, &v[offsets[d][k]..offsets[d][k + 1]], r.labels(d)))
                        .collect();
                    format!("({})", parts.join(", "))
                })
                .collect()
        })
        .collect();
    let finite = factors.iter().all(|r| r.is_finite());
    let alg = GradedAlgebra::build(f.clone(), cap, finite, labels, provenance, |d, i, e, j| {
        let a = &spaces[d].basis()[i];
        let b = &spaces[e].basis()[j];
        let mut prod = Vec::with_capacity(spaces[d + e].ambient_dim());
        for (k, r) in factors.iter().enumerate() {
            let x = &a[offsets[d][k]..offsets[d][k + 1]];
            let y = &b[offsets[e][k]..offsets[e][k + 1]];
            prod.extend(r.mul(d, x, e, y));
        }
        spaces[d + e].coords(&prod).expect("fibre product is closed under multiplication")
    })?;
    let alg = Arc::new(alg);
    let mut projections = Vec::new();
    for (k, r) in factors.iter().enumerate() {
        let mats = (0..=cap)
            .map(|d| spaces[d].basis().iter().map(|v| v[offsets[d][k]..offsets[d][k + 1]].to_vec()).collect())
            .collect();
        projections.push(AlgebraMap::new(&alg, r, mats)?);
    }
    Ok((alg, projections))
}

/// The residue field `k` as a (finite) graded algebra.
pub fn residue_algebra<F: Field>(field: &F, d_cap: usize) -> Arc<GradedAlgebra<F>> {
    let labels = (0..=d_cap).map(|d| if d == 0 { vec!["1".to_string()] } else { vec![] }).collect();
    let one = field.one();
    let alg = GradedAlgebra::build(field.clone(), d_cap, true, labels, Provenance::Residue, |d, _, e, _| {
        if d + e == 0 {
            vec![one.clone()]
        } else {
            vec![]
        }
    })
    .expect("residue field is well formed");
    Arc::new(alg)
}

/// The augmentation `R -> k`.
pub fn augmentation<F: Field>(r: &Arc<GradedAlgebra<F>>, k: &Arc<GradedAlgebra<F>>) -> Result<AlgebraMap<F>> {
    if k.hilbert().iter().skip(1).any(|d| *d != 0) || !k.is_finite() {
        return Err(Error::Construction("target is not the residue field".into()));
    }
    let f = r.field();
    let mats =
        (0..=r.d_cap()).map(|d| (0..r.dim(d)).map(|_| if d == 0 { vec![f.one()] } else { vec![] }).collect()).collect();
    AlgebraMap::new(r, k, mats)
}

/// `R_1 ×_S R_2` for surjections `ε_i: R_i -> S`, with its two projections.
pub fn fibre_product<F: Field>(
    eps1: &AlgebraMap<F>,
    eps2: &AlgebraMap<F>,
) -> Result<(Arc<GradedAlgebra<F>>, Vec<AlgebraMap<F>>)> {
    kernel_subalgebra(&[eps1, eps2], Provenance::FibreProduct)
}

/// `A_n = R ×_{R/I} ⋯ ×_{R/I} R` (n factors) as a retract of `R` with the
/// diagonal inclusion and the `n` coordinate projections as sections.
pub fn iterated_fibre<F: Field>(
    r: &Arc<GradedAlgebra<F>>,
    ideal: &[(usize, Vec<F::Elem>)],
    n: usize,
) -> Result<Retract<F>> {
    if n < 2 {
        return Err(Error::Construction(format!("iterated fibre product needs n >= 2, got {n}")));
    }
    let (_, eps) = r.quotient_by(ideal)?;
    let maps: Vec<&AlgebraMap<F>> = (0..n).map(|_| &eps).collect();
    let prov = if n == 2 { Provenance::FibreProduct } else { Provenance::IteratedFibre(n) };
    let (alg, projections) = kernel_subalgebra(&maps, prov)?;
    let f = r.field().clone();
    // diagonal r -> (r, ..., r), solved against the stacked projections
    let mut inc = Vec::new();
    for d in 0..=alg.d_cap() {
        let mut rows_full: Vec<Vec<F::Elem>> = Vec::new();
        for i in 0..alg.dim(d) {
            let u = linalg::unit_vector(&f, alg.dim(d), i);
            let mut v = Vec::new();
            for p in &projections {
                v.extend(p.apply(d, &u));
            }
            rows_full.push(v);
        }
        let mut rows = Vec::new();
        for i in 0..r.dim(d) {
            let u = linalg::unit_vector(&f, r.dim(d), i);
            let mut target = Vec::new();
            for _ in 0..n {
                target.extend(u.iter().cloned());
            }
            let c = linalg::solve(&f, &rows_full, n * r.dim(d), &target)
                .ok_or_else(|| Error::Internal("diagonal does not lie in the fibre product".into()))?;
            rows.push(c);
        }
        inc.push(rows);
    }
    let inclusion = AlgebraMap::new(r, &alg, inc)?;
    Ok(Retract { algebra: alg, base: r.clone(), inclusion, sections: projections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    fn quotient(names: &[&str], gens: &[&str], cap: usize) -> Arc<GradedAlgebra<Rationals>> {
        let r = PolyRing::standard(Rationals, names).unwrap();
        quotient_algebra(&HomogeneousIdeal::parse(&r, gens).unwrap(), cap).unwrap()
    }

    #[test]
    fn cubic_truncation() {
        let a = quotient(&["x"], &["x^3"], 5);
        assert_eq!(a.hilbert(), vec![1, 1, 1, 0, 0, 0]);
        assert!(a.is_finite());
        assert_eq!(a.top_degree(), Some(2));
        a.check_axioms().unwrap();
        assert_eq!(a.min_gens().len(), 1);
    }

    #[test]
    fn cap_must_cover_products_of_generators() {
        let r = PolyRing::standard(Rationals, &["x"]).unwrap();
        let i = HomogeneousIdeal::parse(&r, &["x^3"]).unwrap();
        assert!(matches!(quotient_algebra(&i, 1), Err(Error::CapTooSmall(_))));
        let u = HomogeneousIdeal::parse(&r, &["1"]).unwrap();
        assert!(matches!(quotient_algebra(&u, 4), Err(Error::UnitIdeal)));
    }

    #[test]
    fn polynomial_ring_is_truncated() {
        let r = PolyRing::standard(Rationals, &["x", "y"]).unwrap();
        let s = polynomial_algebra(&r, 4).unwrap();
        assert!(!s.is_finite());
        assert_eq!(s.hilbert(), vec![1, 2, 3, 4, 5]);
        assert!(matches!(s.try_dim(5), Err(Error::BeyondCap { .. })));
    }

    #[test]
    fn min_gens_of_square_of_max_ideal() {
        let a = quotient(&["x", "y"], &["x^2", "x*y", "y^2"], 4);
        assert_eq!(a.min_gens().degrees(), vec![1, 1]);
        let b = quotient(&["x", "y"], &["x^2", "y^2"], 4);
        let g = b.min_gens();
        assert_eq!(g.gens[0].1, vec![Rationals.one(), Rationals.zero()]);
    }

    #[test]
    fn module_constructions() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 4);
        let reg = GradedModule::regular(&a);
        reg.check_axioms().unwrap();
        let k = GradedModule::residue_field(&a);
        k.check_axioms().unwrap();
        assert_eq!(k.hilbert(), vec![1, 0, 0, 0, 0]);
        let x = (1, vec![Rationals.one(), Rationals.zero()]);
        let ideal = GradedModule::ideal_as_module(&a, std::slice::from_ref(&x)).unwrap();
        assert_eq!(ideal.hilbert(), vec![0, 1, 1, 0, 0]);
        ideal.check_axioms().unwrap();
        let quo = reg.quotient_by(&[x]).unwrap();
        assert_eq!(quo.hilbert(), vec![1, 1, 0, 0, 0]);
        quo.check_axioms().unwrap();
        let sum = quo.direct_sum(&ideal).unwrap();
        assert_eq!(sum.hilbert(), vec![1, 2, 1, 0, 0]);
        sum.check_axioms().unwrap();
        assert_eq!(sum.min_gens().len(), 2);
        let k1 = k.shifted(1).unwrap();
        assert_eq!(k1.hilbert(), vec![0, 1, 0, 0, 0]);
        assert!(k1.is_finite());
    }

    #[test]
    fn trivial_extension_of_residue_field() {
        let r = quotient(&["x"], &["x^3"], 5);
        let k1 = GradedModule::residue_field(&r).shifted(1).unwrap();
        let t = trivial_extension(&r, &k1).unwrap();
        t.check().unwrap();
        assert_eq!(t.algebra.hilbert(), vec![1, 2, 1, 0, 0, 0]);
        t.algebra.check_axioms().unwrap();
        let other = quotient(&["x", "y"], &["x^3", "x*y", "y^2"], 5);
        assert_eq!(t.algebra.hilbert(), other.hilbert());
        assert!(trivial_extension(&r, &GradedModule::residue_field(&r)).is_err());
    }

    #[test]
    fn iterated_fibre_products() {
        let r = quotient(&["x"], &["x^3"], 5);
        let x = (1, vec![Rationals.one()]);
        let a2 = iterated_fibre(&r, std::slice::from_ref(&x), 2).unwrap();
        a2.check().unwrap();
        a2.algebra.check_axioms().unwrap();
        assert_eq!(a2.algebra.hilbert(), vec![1, 2, 2, 0, 0, 0]);
        assert!(a2.kernels_annihilate(0, 1));
        let a3 = iterated_fibre(&r, &[x], 3).unwrap();
        a3.check().unwrap();
        assert_eq!(a3.algebra.hilbert(), vec![1, 3, 3, 0, 0, 0]);
        let i = a3.kernel_as_base_module(0).unwrap();
        i.check_axioms().unwrap();
        assert_eq!(i.hilbert(), vec![0, 2, 2, 0, 0, 0]);
    }

    #[test]
    fn quotient_of_abstract_algebra_and_maps() {
        let s = quotient(&["x", "y"], &["x^3", "y^3"], 6);
        let r = quotient(&["x", "y"], &["x^3", "y^3", "x*y"], 6);
        let pi = AlgebraMap::between_quotients(&s, &r).unwrap();
        pi.check_multiplicative().unwrap();
        assert!(pi.is_surjective());
        let xy = s.quotient_data().unwrap().coords(&parse(&s, "x*y"), 2).unwrap();
        let (q, map) = s.quotient_by(&[(2, xy)]).unwrap();
        assert_eq!(q.hilbert(), r.hilbert());
        map.check_multiplicative().unwrap();
        q.check_axioms().unwrap();
        let restricted = GradedModule::restrict_along(&pi, &GradedModule::regular(&r)).unwrap();
        restricted.check_axioms().unwrap();
        assert_eq!(restricted.min_gens().len(), 1);
    }

    fn parse(a: &GradedAlgebra<Rationals>, text: &str) -> Poly<Rationals> {
        crate::poly::parse_poly(text, a.quotient_data().unwrap().ring()).unwrap()
    }
}

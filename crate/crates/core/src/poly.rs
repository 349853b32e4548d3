//! Sparse multivariate polynomials over a [`Field`] in a ring with positive
//! integer variable weights.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::groebner::GroebnerBasis;

mod parse;

pub use parse::parse_poly;

/// Exponent vector. Exponents are `u16`; products that overflow panic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| *e as u32 * w).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0.iter().zip(&other.0).map(|(a, b)| a.checked_add(*b).expect("monomial exponent overflow")).collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn format(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Weighted graded reverse lexicographic comparison: weighted degree first,
/// ties broken by the smaller exponent in the last differing variable winning.
pub fn grevlex_cmp(weights: &[u32], a: &Monomial, b: &Monomial) -> Ordering {
    let da = a.weighted_degree(weights);
    let db = b.weighted_degree(weights);
    da.cmp(&db).then_with(|| {
        for (x, y) in a.0.iter().zip(&b.0).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing<F: Field> {
    field: F,
    names: Vec<String>,
    weights: Vec<u32>,
}

impl<F: Field> PolyRing<F> {
    pub fn new(field: F, names: Vec<String>, weights: Vec<u32>) -> Result<Arc<Self>> {
        if names.len() != weights.len() {
            return Err(Error::InvalidRing(format!("{} variable names but {} weights", names.len(), weights.len())));
        }
        if names.is_empty() {
            return Err(Error::InvalidRing("no variables".into()));
        }
        if let Some(i) = weights.iter().position(|w| *w == 0) {
            return Err(Error::InvalidRing(format!("variable {} has weight 0", names[i])));
        }
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidRing(format!("invalid variable name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidRing(format!("duplicate variable name {n}")));
            }
        }
        Ok(Arc::new(PolyRing { field, names, weights }))
    }

    /// Standard-graded ring (all weights 1).
    pub fn standard(field: F, names: &[&str]) -> Result<Arc<Self>> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let w = vec![1; names.len()];
        Self::new(field, names, w)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// All monomials of weighted degree `d`, in descending monomial order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u16; self.nvars()];
        fn rec(w: &[u32], i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            if i == w.len() {
                if left == 0 {
                    out.push(Monomial(cur.clone()));
                }
                return;
            }
            let max = left / w[i];
            for e in 0..=max {
                cur[i] = e as u16;
                rec(w, i + 1, left - e * w[i], cur, out);
            }
            cur[i] = 0;
        }
        rec(&self.weights, 0, d, &mut cur, &mut out);
        out.sort_by(|a, b| grevlex_cmp(&self.weights, b, a));
        out
    }
}

/// Result of [`Poly::weighted_degree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Zero,
    Homogeneous(u32),
    NotHomogeneous,
}

#[derive(Clone)]
pub struct Poly<F: Field> {
    ring: Arc<PolyRing<F>>,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl<F: Field> Eq for Poly<F> {}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

pub(crate) fn same_ring<F: Field>(a: &Arc<PolyRing<F>>, b: &Arc<PolyRing<F>>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<F: Field> Poly<F> {
    pub fn zero(ring: &Arc<PolyRing<F>>) -> Self {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<PolyRing<F>>, c: F::Elem) -> Self {
        Self::term(ring, c, Monomial::one(ring.nvars()))
    }

    pub fn one(ring: &Arc<PolyRing<F>>) -> Self {
        Self::constant(ring, ring.field().one())
    }

    pub fn var(ring: &Arc<PolyRing<F>>, i: usize) -> Self {
        Self::term(ring, ring.field().one(), Monomial::var(ring.nvars(), i))
    }

    pub fn term(ring: &Arc<PolyRing<F>>, c: F::Elem, m: Monomial) -> Self {
        assert_eq!(m.0.len(), ring.nvars(), "exponent vector length mismatch");
        let mut terms = BTreeMap::new();
        if !ring.field().is_zero(&c) {
            terms.insert(m, c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &Arc<PolyRing<F>>, it: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut p = Self::zero(ring);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        self.ring.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &F::Elem) {
        let f = self.ring.field().clone();
        if f.is_zero(c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                f.add_assign(e, c);
                if f.is_zero(e) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_ring(&self, other: &Poly<F>) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Poly<F>) -> Result<Poly<F>> {
        self.check_ring(other)?;
        Ok(self.plus(other))
    }

    pub fn sub(&self, other: &Poly<F>) -> Result<Poly<F>> {
        self.check_ring(other)?;
        Ok(self.plus(&other.neg()))
    }

    pub fn mul(&self, other: &Poly<F>) -> Result<Poly<F>> {
        self.check_ring(other)?;
        Ok(self.times(other))
    }

    pub(crate) fn plus(&self, other: &Poly<F>) -> Poly<F> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub(crate) fn minus(&self, other: &Poly<F>) -> Poly<F> {
        self.plus(&other.neg())
    }

    pub(crate) fn times(&self, other: &Poly<F>) -> Poly<F> {
        let f = self.field().clone();
        let mut out = Poly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &f.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Poly<F> {
        let f = self.field();
        if f.is_zero(c) {
            return Poly::zero(&self.ring);
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, e)| (m.clone(), f.mul(e, c))).collect() }
    }

    /// `c · m · self`
    pub fn mul_term(&self, c: &F::Elem, m: &Monomial) -> Poly<F> {
        let f = self.field();
        if f.is_zero(c) {
            return Poly::zero(&self.ring);
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(k, e)| (k.mul(m), f.mul(e, c))).collect() }
    }

    pub fn neg(&self) -> Poly<F> {
        let f = self.field();
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, e)| (m.clone(), f.neg(e))).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly<F> {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..n {
            acc = acc.times(self);
        }
        acc
    }

    pub fn weighted_degree(&self) -> Degree {
        let w = self.ring.weights();
        let mut degs = self.terms.keys().map(|m| m.weighted_degree(w));
        match degs.next() {
            None => Degree::Zero,
            Some(d) => {
                if degs.all(|e| e == d) {
                    Degree::Homogeneous(d)
                } else {
                    Degree::NotHomogeneous
                }
            }
        }
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial_derivative(&self, i: usize) -> Poly<F> {
        let f = self.field().clone();
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, &f.mul(c, &f.from_i64(e as i64)));
        }
        out
    }

    /// Leading term under the weighted grevlex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &F::Elem)> {
        let w = self.ring.weights();
        self.terms.iter().max_by(|a, b| grevlex_cmp(w, a.0, b.0))
    }

    /// Terms in descending monomial order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &F::Elem)> {
        let w = self.ring.weights();
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| grevlex_cmp(w, b.0, a.0));
        t
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let f = self.field();
        let names = self.ring.names();
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = f.is_negative(c);
            let abs = if neg { f.neg(c) } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(out, "-")?,
                (0, false) => {}
                (_, true) => write!(out, " - ")?,
                (_, false) => write!(out, " + ")?,
            }
            if m.is_one() {
                write!(out, "{}", f.format(&abs))?;
            } else if f.is_one(&abs) {
                write!(out, "{}", m.format(names))?;
            } else {
                write!(out, "{}*{}", f.format(&abs), m.format(names))?;
            }
        }
        Ok(())
    }
}

/// Homogeneous ideal given by generators; the Gröbner basis is computed lazily.
#[derive(Clone, Debug)]
pub struct HomogeneousIdeal<F: Field> {
    ring: Arc<PolyRing<F>>,
    gens: Vec<Poly<F>>,
    basis: OnceLock<Arc<GroebnerBasis<F>>>,
}

impl<F: Field> HomogeneousIdeal<F> {
    /// Zero generators are dropped; every other generator must be homogeneous.
    pub fn new(ring: &Arc<PolyRing<F>>, gens: Vec<Poly<F>>) -> Result<Self> {
        let mut kept = Vec::new();
        for g in gens {
            if !same_ring(ring, g.ring()) {
                return Err(Error::RingMismatch);
            }
            match g.weighted_degree() {
                Degree::Zero => {}
                Degree::NotHomogeneous => return Err(Error::NotHomogeneous(g.to_string())),
                Degree::Homogeneous(_) => kept.push(g),
            }
        }
        Ok(HomogeneousIdeal { ring: ring.clone(), gens: kept, basis: OnceLock::new() })
    }

    pub fn parse(ring: &Arc<PolyRing<F>>, gens: &[&str]) -> Result<Self> {
        let polys = gens.iter().map(|s| parse_poly(s, ring)).collect::<Result<Vec<_>>>()?;
        Self::new(ring, polys)
    }

    pub fn zero(ring: &Arc<PolyRing<F>>) -> Self {
        HomogeneousIdeal { ring: ring.clone(), gens: vec![], basis: OnceLock::new() }
    }

    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly<F>] {
        &self.gens
    }

    /// Reduced Gröbner basis (computed once).
    pub fn groebner(&self) -> &Arc<GroebnerBasis<F>> {
        self.basis.get_or_init(|| Arc::new(crate::groebner::buchberger(self)))
    }

    pub fn is_unit(&self) -> bool {
        self.groebner().is_unit()
    }

    pub fn contains(&self, p: &Poly<F>) -> bool {
        crate::groebner::ideal_contains(p, self)
    }

    /// Ideal generated by all partial derivatives of the listed generators.
    pub fn derivative_ideal(&self) -> HomogeneousIdeal<F> {
        let mut gens: Vec<Poly<F>> = Vec::new();
        for g in &self.gens {
            for j in 0..self.ring.nvars() {
                let d = g.partial_derivative(j);
                if !d.is_zero() && !gens.contains(&d) {
                    gens.push(d);
                }
            }
        }
        HomogeneousIdeal { ring: self.ring.clone(), gens, basis: OnceLock::new() }
    }

    /// Sum of this ideal with extra homogeneous generators.
    pub fn extended(&self, extra: Vec<Poly<F>>) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        Self::new(&self.ring, gens)
    }

    /// `self^k` by generator products.
    pub fn power(&self, k: u32) -> Self {
        let mut gens = vec![Poly::one(&self.ring)];
        for _ in 0..k {
            let mut next = Vec::new();
            for a in &gens {
                for b in &self.gens {
                    let p = a.times(b);
                    if !p.is_zero() && !next.contains(&p) {
                        next.push(p);
                    }
                }
            }
            gens = next;
        }
        HomogeneousIdeal { ring: self.ring.clone(), gens, basis: OnceLock::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn qring(names: &[&str]) -> Arc<PolyRing<Rationals>> {
        PolyRing::standard(Rationals, names).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let r = qring(&["x", "y"]);
        let a = parse_poly("x + y", &r).unwrap();
        let b = parse_poly("x - y", &r).unwrap();
        assert_eq!(a.mul(&b).unwrap(), parse_poly("x^2 - y^2", &r).unwrap());
    }

    #[test]
    fn additive_inverse() {
        let r = qring(&["x", "y"]);
        let p = parse_poly("3*x^2*y - 1/2*y^3", &r).unwrap();
        let m = p.scale(&Rationals.from_i64(-1));
        assert!(p.add(&m).unwrap().is_zero());
    }

    #[test]
    fn frobenius_in_characteristic_two() {
        let r = PolyRing::standard(PrimeField::new(2).unwrap(), &["x", "y"]).unwrap();
        let s = parse_poly("(x+y)^2", &r).unwrap();
        assert_eq!(s, parse_poly("x^2 + y^2", &r).unwrap());
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let r1 = qring(&["x", "y"]);
        let r2 = qring(&["x", "z"]);
        let a = Poly::var(&r1, 0);
        let b = Poly::var(&r2, 0);
        assert_eq!(a.add(&b), Err(Error::RingMismatch));
    }

    #[test]
    fn weighted_degrees() {
        let r = qring(&["x", "y"]);
        assert_eq!(parse_poly("x^2*y", &r).unwrap().weighted_degree(), Degree::Homogeneous(3));
        let w = PolyRing::new(Rationals, vec!["x".into(), "y".into()], vec![2, 1]).unwrap();
        assert_eq!(parse_poly("x + y^2", &w).unwrap().weighted_degree(), Degree::Homogeneous(2));
        assert_eq!(parse_poly("x + y", &w).unwrap().weighted_degree(), Degree::NotHomogeneous);
        assert_eq!(parse_poly("0", &w).unwrap().weighted_degree(), Degree::Zero);
    }

    #[test]
    fn partial_derivatives() {
        let r = qring(&["x", "y"]);
        let x3 = parse_poly("x^3", &r).unwrap();
        assert_eq!(x3.partial_derivative(0), parse_poly("3*x^2", &r).unwrap());
        let r3 = PolyRing::standard(PrimeField::new(3).unwrap(), &["x"]).unwrap();
        assert!(parse_poly("x^3", &r3).unwrap().partial_derivative(0).is_zero());
        let x2y = parse_poly("x^2*y", &r).unwrap();
        assert_eq!(x2y.partial_derivative(1), parse_poly("x^2", &r).unwrap());
    }

    #[test]
    fn derivative_ideals() {
        let r1 = qring(&["x"]);
        let i = HomogeneousIdeal::parse(&r1, &["x^3"]).unwrap();
        let d = i.derivative_ideal();
        assert_eq!(d.gens(), &[parse_poly("3*x^2", &r1).unwrap()]);

        let r = qring(&["x", "y"]);
        let i = HomogeneousIdeal::parse(&r, &["x^2", "y^2"]).unwrap();
        let d = i.derivative_ideal();
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        assert!(d.contains(&x) && d.contains(&y));
        assert_eq!(d.gens().len(), 2);

        let i = HomogeneousIdeal::parse(&r, &["x*y"]).unwrap();
        let d = i.derivative_ideal();
        assert!(d.contains(&x) && d.contains(&y));
    }

    #[test]
    fn non_homogeneous_generator_rejected() {
        let r = qring(&["x", "y"]);
        assert!(matches!(HomogeneousIdeal::parse(&r, &["x + y^2"]), Err(Error::NotHomogeneous(_))));
    }

    #[test]
    fn monomials_of_weighted_degree() {
        let w = PolyRing::new(Rationals, vec!["x".into(), "y".into()], vec![2, 1]).unwrap();
        let ms = w.monomials_of_degree(4);
        assert_eq!(ms.len(), 3);
        assert!(ms.iter().all(|m| m.weighted_degree(w.weights()) == 4));
    }

    #[test]
    fn printer_output() {
        let r = qring(&["x", "y"]);
        let p = parse_poly("2*x*y + x^2 - y^2 - 1/2*x*y", &r).unwrap();
        assert_eq!(p.to_string(), "x^2 + 3/2*x*y - y^2");
        assert_eq!(parse_poly("-x + 5", &r).unwrap().to_string(), "-x + 5");
    }
}

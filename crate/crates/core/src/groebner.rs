//! Reduced Gröbner bases of homogeneous ideals under the weighted grevlex
//! order, with normal forms and standard-monomial bases of quotient pieces.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::field::Field;
use crate::poly::{grevlex_cmp, HomogeneousIdeal, Monomial, Poly, PolyRing};

/// The only supported order: graded by weighted degree, ties by reverse lex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MonomialOrder {
    #[default]
    WeightedGrevlex,
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    ring: Arc<PolyRing<F>>,
    order: MonomialOrder,
    /// Reduced, monic, sorted by descending leading monomial.
    basis: Vec<Poly<F>>,
    leading: Vec<Monomial>,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn polys(&self) -> &[Poly<F>] {
        &self.basis
    }

    pub fn leading_monomials(&self) -> &[Monomial] {
        &self.leading
    }

    pub fn is_unit(&self) -> bool {
        self.leading.iter().any(|m| m.is_one())
    }

    pub fn normal_form(&self, p: &Poly<F>) -> Poly<F> {
        normal_form(p, self)
    }

    pub fn standard_monomials(&self, d: u32) -> Vec<Monomial> {
        standard_monomials(self, d)
    }

    /// Whether the quotient is finite-dimensional: every variable has a pure
    /// power among the leading monomials.
    pub fn is_artinian(&self) -> bool {
        (0..self.ring.nvars()).all(|i| self.pure_power(i).is_some())
    }

    fn pure_power(&self, i: usize) -> Option<u16> {
        self.leading.iter().filter(|m| m.0.iter().enumerate().all(|(j, e)| j == i || *e == 0)).map(|m| m.0[i]).min()
    }

    /// Top degree of a finite-dimensional quotient (`None` if not artinian or
    /// the ideal is the unit ideal).
    pub fn top_degree(&self) -> Option<u32> {
        if self.is_unit() || !self.is_artinian() {
            return None;
        }
        let w = self.ring.weights();
        let bound: u32 = (0..self.ring.nvars()).map(|i| (self.pure_power(i).unwrap() as u32 - 1) * w[i]).sum();
        (0..=bound).rev().find(|d| !self.standard_monomials(*d).is_empty())
    }
}

fn monic<F: Field>(p: &Poly<F>) -> Poly<F> {
    let f = p.field();
    match p.leading_term() {
        None => p.clone(),
        Some((_, c)) => p.scale(&f.inv(c).expect("nonzero leading coefficient")),
    }
}

fn s_polynomial<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    // both monic
    let (la, _) = a.leading_term().expect("nonzero");
    let (lb, _) = b.leading_term().expect("nonzero");
    let l = la.lcm(lb);
    let f = a.field();
    let ta = a.mul_term(&f.one(), &la.quotient_of(&l));
    let tb = b.mul_term(&f.one(), &lb.quotient_of(&l));
    ta.minus(&tb)
}

fn reduce_by<F: Field>(p: &Poly<F>, basis: &[Poly<F>], leading: &[Monomial]) -> Poly<F> {
    let f = p.field().clone();
    let w = p.ring().weights().to_vec();
    let mut rest = p.clone();
    let mut rem = Poly::zero(p.ring());
    loop {
        let (m, c) = match rest.terms().max_by(|a, b| grevlex_cmp(&w, a.0, b.0)) {
            None => return rem,
            Some((m, c)) => (m.clone(), c.clone()),
        };
        match leading.iter().position(|l| l.divides(&m)) {
            Some(k) => {
                // basis elements are monic
                let q = leading[k].quotient_of(&m);
                rest = rest.minus(&basis[k].mul_term(&c, &q));
            }
            None => {
                rem.add_term(m.clone(), &c);
                rest.add_term(m, &f.neg(&c));
            }
        }
    }
}

/// Reduced Gröbner basis, processing S-pairs degree by degree.
pub fn buchberger<F: Field>(ideal: &HomogeneousIdeal<F>) -> GroebnerBasis<F> {
    #[derive(Clone, Copy)]
    enum Item {
        Gen(usize),
        Pair(usize, usize),
    }
    let ring = ideal.ring().clone();
    let w = ring.weights().to_vec();
    let inputs = ideal.gens();
    let mut pending: BTreeMap<u32, Vec<Item>> = BTreeMap::new();
    for (i, g) in inputs.iter().enumerate() {
        let d = g.leading_term().expect("nonzero generator").0.weighted_degree(&w);
        pending.entry(d).or_default().push(Item::Gen(i));
    }
    let mut basis: Vec<Poly<F>> = Vec::new();
    let mut leading: Vec<Monomial> = Vec::new();
    while let Some((_, items)) = pending.pop_first() {
        for item in items {
            let p = match item {
                Item::Gen(i) => inputs[i].clone(),
                Item::Pair(i, j) => s_polynomial(&basis[i], &basis[j]),
            };
            let r = reduce_by(&p, &basis, &leading);
            if r.is_zero() {
                continue;
            }
            let r = monic(&r);
            let lt = r.leading_term().unwrap().0.clone();
            let new = basis.len();
            for (k, lk) in leading.iter().enumerate() {
                if lk.is_coprime(&lt) {
                    continue;
                }
                let d = lk.lcm(&lt).weighted_degree(&w);
                pending.entry(d).or_default().push(Item::Pair(k, new));
            }
            basis.push(r);
            leading.push(lt);
        }
    }

    // minimalize
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let redundant =
            (0..basis.len()).any(|j| j != i && leading[j].divides(&leading[i]) && (leading[j] != leading[i] || j < i));
        if !redundant {
            keep.push(i);
        }
    }
    let min_basis: Vec<Poly<F>> = keep.iter().map(|i| basis[*i].clone()).collect();
    let min_lead: Vec<Monomial> = keep.iter().map(|i| leading[*i].clone()).collect();

    // interreduce tails
    let mut reduced: Vec<(Monomial, Poly<F>)> = Vec::new();
    for i in 0..min_basis.len() {
        let others: Vec<Poly<F>> = (0..min_basis.len()).filter(|j| *j != i).map(|j| min_basis[j].clone()).collect();
        let others_lead: Vec<Monomial> =
            (0..min_basis.len()).filter(|j| *j != i).map(|j| min_lead[j].clone()).collect();
        let lt = min_lead[i].clone();
        let tail = min_basis[i].minus(&Poly::term(&ring, ring.field().one(), lt.clone()));
        let r = Poly::term(&ring, ring.field().one(), lt.clone()).plus(&reduce_by(&tail, &others, &others_lead));
        reduced.push((lt, r));
    }
    reduced.sort_by(|a, b| grevlex_cmp(&w, &b.0, &a.0));
    GroebnerBasis {
        ring,
        order: MonomialOrder::WeightedGrevlex,
        leading: reduced.iter().map(|(m, _)| m.clone()).collect(),
        basis: reduced.into_iter().map(|(_, p)| p).collect(),
    }
}

/// Remainder of `p` with no term divisible by a leading monomial of `g`.
pub fn normal_form<F: Field>(p: &Poly<F>, g: &GroebnerBasis<F>) -> Poly<F> {
    reduce_by(p, &g.basis, &g.leading)
}

pub fn ideal_contains<F: Field>(p: &Poly<F>, ideal: &HomogeneousIdeal<F>) -> bool {
    normal_form(p, ideal.groebner()).is_zero()
}

/// Monomials of weighted degree `d` outside the leading-term ideal, in
/// descending monomial order.
pub fn standard_monomials<F: Field>(g: &GroebnerBasis<F>, d: u32) -> Vec<Monomial> {
    g.ring.monomials_of_degree(d).into_iter().filter(|m| !g.leading.iter().any(|l| l.divides(m))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::poly::parse_poly;

    fn ring() -> Arc<PolyRing<Rationals>> {
        PolyRing::standard(Rationals, &["x", "y"]).unwrap()
    }

    fn ideal(r: &Arc<PolyRing<Rationals>>, gens: &[&str]) -> HomogeneousIdeal<Rationals> {
        HomogeneousIdeal::parse(r, gens).unwrap()
    }

    #[test]
    fn monomial_ideal_is_its_own_basis() {
        let r = ring();
        let i = ideal(&r, &["x^2", "y^2"]);
        let g = i.groebner();
        let polys: Vec<String> = g.polys().iter().map(|p| p.to_string()).collect();
        assert_eq!(polys, vec!["x^2", "y^2"]);
    }

    #[test]
    fn sum_and_difference_of_squares() {
        let r = ring();
        let i = ideal(&r, &["x^2 - y^2", "x^2 + y^2"]);
        let polys: Vec<String> = i.groebner().polys().iter().map(|p| p.to_string()).collect();
        assert_eq!(polys, vec!["x^2", "y^2"]);
        for gen in i.gens() {
            assert!(i.contains(gen));
        }
    }

    #[test]
    fn zero_ideal_has_empty_basis() {
        let r = ring();
        let i = HomogeneousIdeal::zero(&r);
        assert!(i.groebner().polys().is_empty());
    }

    #[test]
    fn normal_forms() {
        let r = ring();
        let i = ideal(&r, &["x^2"]);
        assert!(i.groebner().normal_form(&parse_poly("x^3", &r).unwrap()).is_zero());
        let j = ideal(&r, &["x^2", "y^2"]);
        let nf = j.groebner().normal_form(&parse_poly("x^2*y + y", &r).unwrap());
        assert_eq!(nf, parse_poly("y", &r).unwrap());
    }

    #[test]
    fn membership() {
        let r1 = PolyRing::standard(Rationals, &["x"]).unwrap();
        let i = ideal(&r1, &["x^2"]);
        assert!(i.contains(&parse_poly("x^4", &r1).unwrap()));
        assert!(!i.contains(&parse_poly("x", &r1).unwrap()));
    }

    #[test]
    fn squared_derivatives_of_cube_lie_in_cube() {
        let r = ring();
        let m3 = ideal(&r, &["x", "y"]).power(3);
        let d = m3.derivative_ideal();
        for a in d.gens() {
            for b in d.gens() {
                assert!(m3.contains(&a.times(b)));
            }
        }
    }

    #[test]
    fn standard_monomial_examples() {
        let r1 = PolyRing::standard(Rationals, &["x"]).unwrap();
        let g = ideal(&r1, &["x^3"]);
        let s: Vec<String> = g.groebner().standard_monomials(2).iter().map(|m| m.format(r1.names())).collect();
        assert_eq!(s, vec!["x^2"]);

        let r = ring();
        let m2 = ideal(&r, &["x", "y"]).power(2);
        let s1: Vec<String> = m2.groebner().standard_monomials(1).iter().map(|m| m.format(r.names())).collect();
        assert_eq!(s1, vec!["x", "y"]);
        assert!(m2.groebner().standard_monomials(2).is_empty());

        let ci = ideal(&r, &["x^2", "y^2"]);
        let h: Vec<usize> = (0..5).map(|d| ci.groebner().standard_monomials(d).len()).collect();
        assert_eq!(h, vec![1, 2, 1, 0, 0]);
        assert_eq!(ci.groebner().top_degree(), Some(2));
    }

    #[test]
    fn unit_ideal_detected() {
        let r = ring();
        let i = ideal(&r, &["x", "1"]);
        assert!(i.is_unit());
    }
}

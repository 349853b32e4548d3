use std::sync::Arc;

use golodlab::algebra::{quotient_algebra, GradedAlgebra, GradedModule};
use golodlab::golod::{golod_ring_test, serre_bound, GolodOptions, GolodVerdict};
use golodlab::koszul::KoszulComplex;
use golodlab::resolution::{default_cap, Resolution, ResolutionOptions};
use golodlab::{HomogeneousIdeal, Monomial, PolyRing, PrimeField, Rationals};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: usize = 4;

/// Pure powers `x_i^{a_i}` plus extra monomials, as exponent vectors.
fn monomial_ideal() -> impl Strategy<Value = (Vec<u16>, Vec<Vec<u16>>)> {
    (2usize..=3).prop_flat_map(|n| {
        (prop::collection::vec(2u16..=4, n), prop::collection::vec(prop::collection::vec(0u16..3, n), 0..3))
    })
}

fn names(n: usize) -> Vec<&'static str> {
    ["x", "y", "z"][..n].to_vec()
}

fn top(powers: &[u16]) -> usize {
    powers.iter().map(|&a| a as usize - 1).sum()
}

fn algebra(powers: &[u16], extra: &[Vec<u16>]) -> Arc<GradedAlgebra<Rationals>> {
    let n = powers.len();
    let r = PolyRing::standard(Rationals, &names(n)).unwrap();
    let mut gens: Vec<String> = (0..n).map(|i| format!("{}^{}", names(n)[i], powers[i])).collect();
    for e in extra.iter().filter(|e| e.iter().any(|&x| x > 0)) {
        gens.push(Monomial(e.clone()).format(r.names()));
    }
    let gens: Vec<&str> = gens.iter().map(String::as_str).collect();
    let t = top(powers);
    quotient_algebra(&HomogeneousIdeal::parse(&r, &gens).unwrap(), default_cap(H, 1, 0, Some(t), Some(0))).unwrap()
}

/// Whether the monomial with these exponents survives in the quotient.
fn standard(e: &[u16], powers: &[u16], extra: &[Vec<u16>]) -> bool {
    let divides = |g: &[u16]| g.iter().zip(e).all(|(a, b)| a <= b);
    let pure = (0..powers.len()).all(|i| e[i] < powers[i]);
    pure && !extra.iter().filter(|g| g.iter().any(|&x| x > 0)).any(|g| divides(g))
}

fn brute_hilbert(powers: &[u16], extra: &[Vec<u16>], cap: usize) -> Vec<usize> {
    let mut h = vec![0; cap + 1];
    let n = powers.len();
    let mut e = vec![0u16; n];
    loop {
        if standard(&e, powers, extra) {
            h[e.iter().map(|&x| x as usize).sum::<usize>()] += 1;
        }
        let mut i = 0;
        while i < n {
            e[i] += 1;
            if e[i] < powers[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
        if i == n {
            return h;
        }
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hilbert_function_counts_standard_monomials((powers, extra) in monomial_ideal()) {
        let a = algebra(&powers, &extra);
        prop_assert_eq!(a.hilbert(), brute_hilbert(&powers, &extra, a.d_cap()));
        prop_assert_eq!(a.top_degree(), brute_hilbert(&powers, &extra, a.d_cap()).iter().rposition(|&d| d > 0));
    }

    #[test]
    fn residue_field_resolution((powers, extra) in monomial_ideal()) {
        let a = algebra(&powers, &extra);
        let res = Resolution::compute(&GradedModule::residue_field(&a), H, ResolutionOptions::default()).unwrap();
        res.check_minimal().unwrap();
        res.check_exact().unwrap();
        let betti = res.betti();
        prop_assert!(betti.complete.iter().all(|&c| c));
        // Σ_i (-1)^i β_{i,j} convolved with the Hilbert function is 1 in
        // internal degrees up to H; generators of step i sit in degree ≥ i
        let hilb = a.hilbert();
        for j in 0..=H {
            let mut s: i64 = 0;
            for i in 0..=H.min(j) {
                for d in i..=j {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    s += sign * betti.get(i, d) as i64 * hilb[j - d] as i64;
                }
            }
            prop_assert_eq!(s, i64::from(j == 0), "degree {}", j);
        }
        prop_assert_eq!(betti.total(1), hilb[1] as u64);
    }

    #[test]
    fn serre_inequality((powers, extra) in monomial_ideal()) {
        let a = algebra(&powers, &extra);
        let res = Resolution::compute(&GradedModule::residue_field(&a), H, ResolutionOptions::default()).unwrap();
        let p = res.poincare_series();
        let kappa = KoszulComplex::of_algebra(&a).unwrap().koszul_polynomial();
        prop_assert_eq!(kappa[0], 1);
        // the Koszul homology of k is an exterior algebra on dim R_1 generators
        let e = a.dim(1);
        let kappa_k: Vec<i64> = (0..=e).map(|l| binomial(e, l)).collect();
        let bound = serre_bound(&kappa_k, &kappa, H).unwrap();
        for i in 0..=H {
            prop_assert!(p.coeffs[i] <= bound.coeffs[i], "t^{}: {} > {}", i, p.coeffs[i], bound.coeffs[i]);
        }
        // through t^2 the two always agree
        prop_assert_eq!(&p.coeffs[..3], &bound.coeffs[..3]);
    }

    #[test]
    fn koszul_euler_characteristic((powers, extra) in monomial_ideal()) {
        // Σ (-1)^l dim H_l = Σ (-1)^l dim K_l = H_R(t)(1-t)^n at t = 1, which is 0
        let a = algebra(&powers, &extra);
        let k = KoszulComplex::of_algebra(&a).unwrap();
        k.check_d_squared().unwrap();
        let chi: i64 = k.homology_dims().iter().enumerate().map(|(l, &h)| if l % 2 == 0 { h as i64 } else { -(h as i64) }).sum();
        prop_assert_eq!(chi, 0);
    }
}

#[test]
fn powers_of_the_maximal_ideal_are_golod() {
    for (n, k) in [(2, 2), (2, 3), (3, 2)] {
        let r = PolyRing::standard(Rationals, &names(n)).unwrap();
        let m = HomogeneousIdeal::parse(&r, &names(n)).unwrap();
        let a = quotient_algebra(&m.power(k), default_cap(H, 1, 0, Some(k as usize - 1), Some(0))).unwrap();
        let opts = GolodOptions { h_cap: H, certify: false, ..GolodOptions::default() };
        let an = golod_ring_test(&a, &opts).unwrap();
        assert_eq!(an.poincare.coeffs, an.serre_bound.coeffs, "(n, k) = ({n}, {k})");
        assert!(matches!(an.verdict, GolodVerdict::ConsistentUpTo { .. }));
    }
}

#[test]
fn complete_intersections_are_refuted_over_both_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x60_1d);
    for _ in 0..4 {
        let (a, b) = (rng.gen_range(2..5u32), rng.gen_range(2..5u32));
        let gens = [format!("x^{a}"), format!("y^{b}")];
        let gens: Vec<&str> = gens.iter().map(String::as_str).collect();
        let cap = default_cap(H, 1, 0, Some((a + b - 2) as usize), Some(0));
        let opts = GolodOptions { h_cap: H, ..GolodOptions::default() };
        let q = PolyRing::standard(Rationals, &["x", "y"]).unwrap();
        let aq = quotient_algebra(&HomogeneousIdeal::parse(&q, &gens).unwrap(), cap).unwrap();
        assert!(golod_ring_test(&aq, &opts).unwrap().verdict.is_refuted(), "x^{a}, y^{b} over q");
        let p = PolyRing::standard(PrimeField::new(101).unwrap(), &["x", "y"]).unwrap();
        let ap = quotient_algebra(&HomogeneousIdeal::parse(&p, &gens).unwrap(), cap).unwrap();
        let an = golod_ring_test(&ap, &opts).unwrap();
        assert!(an.verdict.is_refuted(), "x^{a}, y^{b} over p:101");
        // P(t) = 1/(1-t)^2
        assert_eq!(an.poincare.coeffs, (1..=H as i64 + 1).collect::<Vec<_>>());
    }
}

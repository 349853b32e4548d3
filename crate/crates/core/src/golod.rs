//! Golod verdicts for modules and rings: the Serre bound, exact refutations
//! (series mismatch, nonzero products, Massey products, Levin's necessity of
//! a Golod ring), the Jacobian certificates and witness re-verification.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{GradedAlgebra, GradedModule, GradedSpace};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::koszul::{
    herzog_cycles, koszul_on_variables, massey_product, presentation_is_minimal, product, verify_massey_witness, Chain,
    KoszulComplex, MasseyResult, MASSEY_BUDGET,
};
use crate::linalg;
use crate::poly::Degree;
use crate::resolution::{BettiTable, Resolution, ResolutionOptions, TruncatedSeries};

/// Coefficients of `κ_M(t) / (1 - t(κ_R(t) - 1))` through `t^h_cap`.
pub fn serre_bound(kappa_m: &[i64], kappa_r: &[i64], h_cap: usize) -> Result<TruncatedSeries> {
    if kappa_r.first() != Some(&1) {
        return Err(Error::Construction("the Koszul polynomial of the ring must have constant term 1".into()));
    }
    // denominator 1 - Σ_{i≥1} κ_i t^{i+1}
    let den = |k: usize| -> i64 {
        match k {
            0 => 1,
            1 => 0,
            _ => kappa_r.get(k - 1).map(|c| -c).unwrap_or(0),
        }
    };
    let num = |k: usize| kappa_m.get(k).copied().unwrap_or(0);
    let mut out: Vec<i64> = Vec::with_capacity(h_cap + 1);
    for n in 0..=h_cap {
        let mut c = num(n);
        for k in 1..=n {
            let t = den(k).checked_mul(out[n - k]).ok_or_else(|| overflow(n))?;
            c = c.checked_sub(t).ok_or_else(|| overflow(n))?;
        }
        out.push(c);
    }
    Ok(TruncatedSeries::exact(out))
}

fn overflow(n: usize) -> Error {
    Error::Overflow(format!("series coefficient of t^{n}"))
}

/// `a · b`, exact on the common complete prefix.
pub fn series_product(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    let len = a.len().min(b.len());
    let prefix = a.complete_prefix().min(b.complete_prefix());
    let mut coeffs = Vec::with_capacity(len);
    for n in 0..len {
        let mut c: i64 = 0;
        for k in 0..=n {
            let t = a.coeffs[k].checked_mul(b.coeffs[n - k]).ok_or_else(|| overflow(n))?;
            c = c.checked_add(t).ok_or_else(|| overflow(n))?;
        }
        coeffs.push(c);
    }
    Ok(TruncatedSeries { coeffs, complete: (0..len).map(|n| n < prefix).collect() })
}

/// `a / b` for `b` with constant term 1, exact on the common complete prefix.
pub fn series_quotient(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    if b.coeffs.first() != Some(&1) {
        return Err(Error::Construction("denominator series must have constant term 1".into()));
    }
    let len = a.len().min(b.len());
    let prefix = a.complete_prefix().min(b.complete_prefix());
    let mut coeffs: Vec<i64> = Vec::with_capacity(len);
    for n in 0..len {
        let mut c = a.coeffs[n];
        for k in 1..=n {
            let t = b.coeffs[k].checked_mul(coeffs[n - k]).ok_or_else(|| overflow(n))?;
            c = c.checked_sub(t).ok_or_else(|| overflow(n))?;
        }
        coeffs.push(c);
    }
    Ok(TruncatedSeries { coeffs, complete: (0..len).map(|n| n < prefix).collect() })
}

/// `a + s·b` coefficientwise.
pub fn series_combine(a: &TruncatedSeries, s: i64, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    let len = a.len().min(b.len());
    let prefix = a.complete_prefix().min(b.complete_prefix());
    let coeffs = (0..len)
        .map(|n| b.coeffs[n].checked_mul(s).and_then(|t| a.coeffs[n].checked_add(t)).ok_or_else(|| overflow(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries { coeffs, complete: (0..len).map(|n| n < prefix).collect() })
}

/// `t · a`, one term longer.
pub fn series_shift(a: &TruncatedSeries) -> TruncatedSeries {
    let mut coeffs = vec![0];
    coeffs.extend(&a.coeffs);
    let mut complete = vec![true];
    complete.extend(&a.complete);
    TruncatedSeries { coeffs, complete }
}

/// A homology basis element: `index` in the basis of `H_{l,d}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRef {
    pub l: usize,
    pub d: usize,
    pub index: usize,
    /// The representing cycle.
    pub cycle: String,
}

/// Why a module is not Golod. Every variant can be re-checked with [`reverify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Refutation {
    /// `P_i` is exact and strictly below the Serre bound.
    SeriesMismatch { i: usize, poincare: i64, bound: i64 },
    /// `x · y` is not a boundary, with `x ∈ H_{≥1}(A)`.
    NonzeroProduct { mode: MasseyMode, left: ClassRef, right: ClassRef, product: String, class: Vec<String> },
    /// A defining system whose value is not a boundary.
    MasseyNonVanishing { mode: MasseyMode, slots: Vec<ClassRef>, value: String, class: Vec<String> },
    /// The algebra is not a Golod ring, so no nonzero module over it is Golod.
    RingNotGolod { ring: Box<Refutation> },
}

impl Refutation {
    pub fn describe(&self) -> String {
        match self {
            Refutation::SeriesMismatch { i, poincare, bound } => {
                format!("series mismatch at t^{i}: P_{i} = {poincare} < bound {bound}")
            }
            Refutation::NonzeroProduct { left, right, .. } => format!(
                "nonzero product H_{},{} · H_{},{}: ({}) · ({})",
                left.l, left.d, right.l, right.d, left.cycle, right.cycle
            ),
            Refutation::MasseyNonVanishing { slots, value, .. } => {
                format!("non-vanishing Massey product of order {} with value {}", slots.len(), value)
            }
            Refutation::RingNotGolod { ring } => format!("the ring is not Golod ({})", ring.describe()),
        }
    }
}

/// Evidence for a proven Golod verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "kebab-case")]
pub enum Certificate {
    /// `∂(I)^2 ⊆ I` and `∂(I)` annihilates `M`.
    HerzogHuneke {
        ideal: Vec<String>,
        derivative_generators: Vec<String>,
        /// Pairwise products of derivative generators shown to lie in `I`.
        memberships: usize,
        /// (derivative generator, module basis element) pairs shown to act by zero.
        annihilations: usize,
    },
    /// Jacobian cycles spanning `H_{≥1}(A)` multiply to zero with each other
    /// and with every cycle of the module's Koszul complex.
    CycleProducts { cycles: usize, products: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certification {
    Certificate { certificate: Certificate },
    NotApplicable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GolodVerdict {
    CertifiedGolod {
        certificate: Certificate,
    },
    RefutedNotGolod {
        witness: Refutation,
    },
    /// Series equal to the bound through `t^h_cap`, no refutation found.
    ConsistentUpTo {
        h_cap: usize,
        d_cap: usize,
    },
    Inconclusive {
        reason: String,
    },
}

impl GolodVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            GolodVerdict::CertifiedGolod { .. } => "certified-golod",
            GolodVerdict::RefutedNotGolod { .. } => "refuted-not-golod",
            GolodVerdict::ConsistentUpTo { .. } => "consistent-up-to",
            GolodVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, GolodVerdict::RefutedNotGolod { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, GolodVerdict::CertifiedGolod { .. })
    }

    /// Certified or consistent.
    pub fn is_positive(&self) -> bool {
        matches!(self, GolodVerdict::CertifiedGolod { .. } | GolodVerdict::ConsistentUpTo { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            GolodVerdict::CertifiedGolod { certificate } => match certificate {
                Certificate::HerzogHuneke { memberships, annihilations, .. } => format!(
                    "CertifiedGolod (∂(I)^2 ⊆ I: {memberships} memberships; ∂(I)·M = 0: {annihilations} checks)"
                ),
                Certificate::CycleProducts { cycles, products } => {
                    format!("CertifiedGolod ({cycles} Jacobian cycles, {products} chain products vanish)")
                }
            },
            GolodVerdict::RefutedNotGolod { witness } => format!("RefutedNotGolod ({})", witness.describe()),
            GolodVerdict::ConsistentUpTo { h_cap, d_cap } => format!("ConsistentUpTo(H={h_cap}, D={d_cap})"),
            GolodVerdict::Inconclusive { reason } => format!("Inconclusive ({reason})"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GolodOptions {
    pub h_cap: usize,
    /// Try the Jacobian certificates.
    pub certify: bool,
    /// Run the Massey refuter for orders `3..=n`.
    pub massey_order: Option<usize>,
    pub jobs: usize,
}

impl Default for GolodOptions {
    fn default() -> Self {
        GolodOptions { h_cap: 6, certify: true, massey_order: None, jobs: 1 }
    }
}

/// Everything a Golod test computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GolodAnalysis {
    pub verdict: GolodVerdict,
    pub betti: BettiTable,
    pub poincare: TruncatedSeries,
    pub kappa_module: Vec<i64>,
    pub kappa_ring: Vec<i64>,
    pub serre_bound: TruncatedSeries,
    pub h_cap: usize,
    pub d_cap: usize,
    /// Side results: skipped refuters, certification attempts, the ring check.
    pub notes: Vec<String>,
}

/// Whether `m` is the residue field `k` (in degree 0).
pub fn is_residue_field<F: Field>(m: &GradedModule<F>) -> bool {
    m.is_finite() && m.dims().first() == Some(&1) && m.dims().iter().skip(1).all(|d| *d == 0)
}

/// Poincaré series through `t^h`; a terminated resolution is padded with exact zeros.
pub fn poincare_through<F: Field>(res: &Resolution<F>, h: usize) -> TruncatedSeries {
    let mut p = res.poincare_series();
    while p.len() <= h {
        p.coeffs.push(0);
        p.complete.push(res.terminated());
    }
    p.truncate(h + 1)
}

pub fn betti_through<F: Field>(res: &Resolution<F>, h: usize) -> BettiTable {
    let mut b = res.betti();
    while b.rows.len() <= h {
        b.rows.push(Default::default());
        b.complete.push(res.terminated());
    }
    b
}

fn classes_of<F: Field>(kc: &KoszulComplex<F>, min_l: usize) -> Vec<(Chain<F>, ClassRef)> {
    kc.basis_classes()
        .into_iter()
        .filter(|(l, _, _)| *l >= min_l)
        .map(|(l, d, i)| {
            let v = kc.representatives(l, d)[i].clone();
            let cycle = kc.format_chain(l, d, &v);
            (Chain { l, d, v }, ClassRef { l, d, index: i, cycle })
        })
        .collect()
}

fn format_coords<F: Field>(f: &F, v: &[F::Elem]) -> Vec<String> {
    v.iter().map(|c| f.format(c)).collect()
}

/// The complexes a module's products live in: `K^A` on the minimal
/// generators, and `K^M` on the same generators.
struct Complexes<F: Field> {
    ring: KoszulComplex<F>,
    module: KoszulComplex<F>,
    ring_mode: bool,
}

impl<F: Field> Complexes<F> {
    fn new(module: &GradedModule<F>) -> Result<Self> {
        let mode = if is_residue_field(module) { MasseyMode::Ring } else { MasseyMode::Module };
        Self::with_mode(module, mode)
    }

    fn with_mode(module: &GradedModule<F>, mode: MasseyMode) -> Result<Self> {
        let ring = KoszulComplex::of_algebra(module.algebra())?;
        let m = KoszulComplex::new(module, ring.generators().to_vec())?;
        Ok(Complexes { ring, module: m, ring_mode: mode == MasseyMode::Ring })
    }

    /// The complex whose classes fill the first slot of a product: `K^A` for
    /// rings (the Golod ring condition), `K^M` otherwise.
    fn first(&self) -> &KoszulComplex<F> {
        if self.ring_mode {
            &self.ring
        } else {
            &self.module
        }
    }

    fn mode(&self) -> MasseyMode {
        if self.ring_mode {
            MasseyMode::Ring
        } else {
            MasseyMode::Module
        }
    }

    fn first_min_l(&self) -> usize {
        usize::from(self.first().is_ring())
    }
}

/// A nonzero product `H_{≥1}(A) · H(M)` (or `H_{≥1}(A)^2` for `M = k`), if any.
pub fn product_witness<F: Field>(module: &GradedModule<F>) -> Result<Option<Refutation>> {
    product_refuter(&Complexes::new(module)?)
}

fn product_refuter<F: Field>(cx: &Complexes<F>) -> Result<Option<Refutation>> {
    let f = cx.ring.field().clone();
    let ring_classes = classes_of(&cx.ring, 1);
    let first_classes = classes_of(cx.first(), cx.first_min_l());
    for (y, yref) in &first_classes {
        for (x, xref) in &ring_classes {
            if x.l + y.l > cx.ring.ngens() {
                continue;
            }
            let out = cx.first();
            let v = product(&cx.ring, x.l, x.d, &x.v, out, y.l, y.d, &y.v)?;
            let (l, d) = (x.l + y.l, x.d + y.d);
            if linalg::is_zero_vec(&f, &v) || out.is_boundary(l, d, &v) {
                continue;
            }
            let class =
                out.class_coords(l, d, &v).ok_or_else(|| Error::Internal("product of cycles is not a cycle".into()))?;
            return Ok(Some(Refutation::NonzeroProduct {
                mode: cx.mode(),
                left: xref.clone(),
                right: yref.clone(),
                product: out.format_chain(l, d, &v),
                class: format_coords(&f, &class),
            }));
        }
    }
    Ok(None)
}

/// Outcome counts of a sweep of Massey products over basis tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasseySweep {
    pub order: usize,
    /// "ring" (all slots in `H_{≥1}(A)`) or "module" (first slot in `H(M)`).
    pub mode: String,
    pub tuples: usize,
    pub vanishing: usize,
    pub non_vanishing: usize,
    pub undefined: usize,
    pub inconclusive: usize,
    /// First non-vanishing product found, already re-verified.
    pub witness: Option<Refutation>,
    pub witness_verified: bool,
    /// Set when the tuple count exceeds the budget and the sweep did not run.
    pub skipped: Option<String>,
}

/// Where the first slot of a Massey product comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MasseyMode {
    /// Every slot in `H_{≥1}(A)`.
    Ring,
    /// `v_1 ∈ H(M)`, the rest in `H_{≥1}(A)`.
    Module,
}

/// All Massey products `⟨v_1, …, v_n⟩` over tuples of homology basis elements.
pub fn massey_sweep<F: Field>(module: &GradedModule<F>, order: usize, mode: MasseyMode) -> Result<MasseySweep> {
    let cx = Complexes::with_mode(module, mode)?;
    sweep(&cx, order)
}

fn sweep<F: Field>(cx: &Complexes<F>, order: usize) -> Result<MasseySweep> {
    if order < 2 {
        return Err(Error::Construction("a Massey product needs at least two entries".into()));
    }
    let f = cx.ring.field().clone();
    let ring_classes = classes_of(&cx.ring, 1);
    let first_classes = classes_of(cx.first(), cx.first_min_l());
    let mut out = MasseySweep {
        order,
        mode: if cx.ring_mode { "ring" } else { "module" }.into(),
        tuples: 0,
        vanishing: 0,
        non_vanishing: 0,
        undefined: 0,
        inconclusive: 0,
        witness: None,
        witness_verified: false,
        skipped: None,
    };
    let total = (ring_classes.len() as u128).pow(order as u32 - 1) * first_classes.len() as u128;
    if total > MASSEY_BUDGET as u128 {
        out.skipped = Some(format!("{total} tuples exceed the budget of {MASSEY_BUDGET}"));
        return Ok(out);
    }
    let total = total as usize;
    let nr = ring_classes.len();
    for code in 0..total {
        let mut c = code;
        let mut picks = Vec::with_capacity(order);
        for _ in 1..order {
            picks.push(c % nr);
            c /= nr;
        }
        picks.reverse();
        let (y, yref) = &first_classes[c];
        let mut slots = vec![y.clone()];
        let mut refs = vec![yref.clone()];
        for p in picks {
            slots.push(ring_classes[p].0.clone());
            refs.push(ring_classes[p].1.clone());
        }
        let l_total: usize = slots.iter().map(|s| s.l).sum::<usize>() + order - 2;
        out.tuples += 1;
        if l_total > cx.ring.ngens() {
            // lands in a zero piece of the complex
            out.vanishing += 1;
            continue;
        }
        match massey_product(cx.first(), &cx.ring, &slots)? {
            MasseyResult::Vanishes => out.vanishing += 1,
            MasseyResult::NoDefiningSystem { .. } => out.undefined += 1,
            MasseyResult::Inconclusive { .. } => out.inconclusive += 1,
            MasseyResult::NonVanishing(w) => {
                out.non_vanishing += 1;
                if out.witness.is_none() {
                    out.witness_verified = verify_massey_witness(cx.first(), &cx.ring, &slots, &w)?;
                    out.witness = Some(Refutation::MasseyNonVanishing {
                        mode: cx.mode(),
                        slots: refs,
                        value: cx.first().format_chain(w.value.l, w.value.d, &w.value.v),
                        class: format_coords(&f, &w.class),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Tests the Serre-bound equality and runs the refuters and certifiers.
pub fn golod_module_test<F: Field>(module: &GradedModule<F>, opts: &GolodOptions) -> Result<GolodAnalysis> {
    let a = module.algebra().clone();
    let h = opts.h_cap;
    let cx = Complexes::new(module)?;
    let kappa_ring = cx.ring.koszul_polynomial();
    let kappa_module = cx.module.koszul_polynomial();
    let res = Resolution::compute(module, h, ResolutionOptions { degree_bound: None, jobs: opts.jobs })?;
    let poincare = poincare_through(&res, h);
    let betti = betti_through(&res, h);
    let bound = serre_bound(&kappa_module, &kappa_ring, h)?;
    let mut notes = Vec::new();

    let mut refutation = None;
    for i in 0..poincare.complete_prefix() {
        let (p, b) = (poincare.coeffs[i], bound.coeffs[i]);
        if p > b {
            return Err(Error::Internal(format!("Serre inequality violated at t^{i}: P_{i} = {p} > {b}")));
        }
        if p < b {
            refutation = Some(Refutation::SeriesMismatch { i, poincare: p, bound: b });
            break;
        }
    }
    if refutation.is_none() {
        refutation = product_refuter(&cx)?;
    }
    if refutation.is_none() {
        if let Some(n) = opts.massey_order {
            for order in 3..=n {
                let s = sweep(&cx, order)?;
                if let Some(reason) = &s.skipped {
                    notes.push(format!("Massey products of order {order} skipped: {reason}"));
                }
                if s.inconclusive > 0 {
                    notes.push(format!(
                        "{} Massey products of order {order} undecided within the budget",
                        s.inconclusive
                    ));
                }
                if let Some(w) = s.witness {
                    if !s.witness_verified {
                        return Err(Error::Internal("Massey witness failed re-verification".into()));
                    }
                    refutation = Some(w);
                    break;
                }
            }
        }
    }
    if refutation.is_none() && !cx.ring_mode && !module.is_zero() {
        let ring = golod_ring_test(&a, opts)?;
        notes.push(format!("ring check: {}", ring.verdict.describe()));
        if let GolodVerdict::RefutedNotGolod { witness } = ring.verdict {
            refutation = Some(Refutation::RingNotGolod { ring: Box::new(witness) });
        }
    }

    let certificate = if opts.certify {
        match certify(module)? {
            Certification::Certificate { certificate } => Some(certificate),
            Certification::NotApplicable { reason } => {
                notes.push(format!("no certificate: {reason}"));
                None
            }
        }
    } else {
        None
    };

    let verdict = match (refutation, certificate) {
        (Some(r), Some(_)) => {
            return Err(Error::Internal(format!("certificate contradicts refutation: {}", r.describe())));
        }
        (Some(witness), None) => GolodVerdict::RefutedNotGolod { witness },
        (None, Some(certificate)) => GolodVerdict::CertifiedGolod { certificate },
        (None, None) if poincare.all_complete() => GolodVerdict::ConsistentUpTo { h_cap: h, d_cap: a.d_cap() },
        (None, None) => GolodVerdict::Inconclusive {
            reason: format!(
                "resolution step {} is incomplete at degree cap {}; the series agrees with the bound on the complete prefix",
                poincare.complete_prefix(),
                a.d_cap()
            ),
        },
    };
    Ok(GolodAnalysis {
        verdict,
        betti,
        poincare,
        kappa_module,
        kappa_ring,
        serre_bound: bound,
        h_cap: h,
        d_cap: a.d_cap(),
        notes,
    })
}

/// Golod test of the residue field.
pub fn golod_ring_test<F: Field>(a: &Arc<GradedAlgebra<F>>, opts: &GolodOptions) -> Result<GolodAnalysis> {
    golod_module_test(&GradedModule::residue_field(a), opts)
}

/// The Jacobian certificate first, then the cycle-product one.
pub fn certify<F: Field>(module: &GradedModule<F>) -> Result<Certification> {
    let first = match herzog_huneke_certify(module)? {
        c @ Certification::Certificate { .. } => return Ok(c),
        Certification::NotApplicable { reason } => reason,
    };
    match cycle_product_certify(module)? {
        c @ Certification::Certificate { .. } => Ok(c),
        Certification::NotApplicable { reason } if reason == first => Ok(Certification::NotApplicable { reason }),
        Certification::NotApplicable { reason } => {
            Ok(Certification::NotApplicable { reason: format!("{first}; {reason}") })
        }
    }
}

fn not_applicable(reason: impl Into<String>) -> Result<Certification> {
    Ok(Certification::NotApplicable { reason: reason.into() })
}

/// Checks `∂(I)^2 ⊆ I` and `∂(I) · M = 0` for `M` over `A = S/I`.
pub fn herzog_huneke_certify<F: Field>(module: &GradedModule<F>) -> Result<Certification> {
    let a = module.algebra();
    let f = a.field().clone();
    if f.characteristic() != 0 {
        return not_applicable("the derivative criterion needs characteristic zero");
    }
    let Some(q) = a.quotient_data() else {
        return not_applicable("the algebra has no polynomial presentation");
    };
    let ideal = q.ideal();
    let d = ideal.derivative_ideal();
    let gens = d.gens();
    let mut memberships = 0;
    for (i, g) in gens.iter().enumerate() {
        for h in &gens[i..] {
            let p = g.mul(h)?;
            if !ideal.contains(&p) {
                return not_applicable(format!("({g})*({h}) is not in I"));
            }
            memberships += 1;
        }
    }
    let mut annihilations = 0;
    for g in gens {
        let e = match g.weighted_degree() {
            Degree::Homogeneous(e) => e as usize,
            _ => return Err(Error::Internal(format!("derivative {g} is not homogeneous"))),
        };
        let class = if e <= a.d_cap() {
            Some(q.coords(g, e)?)
        } else if a.is_finite() {
            None
        } else {
            return not_applicable(format!("{g} lies beyond the degree cap"));
        };
        for md in 0..=module.cap() {
            for j in 0..module.dim(md) {
                if md + e > module.cap() {
                    if !module.is_finite() {
                        return not_applicable(format!("{g} times a module element lies beyond the degree cap"));
                    }
                } else if let Some(c) = &class {
                    let u = linalg::unit_vector(&f, module.dim(md), j);
                    if !linalg::is_zero_vec(&f, &module.act(e, c, md, &u)) {
                        return not_applicable(format!("{g} does not annihilate {}", module.labels(md)[j]));
                    }
                }
                annihilations += 1;
            }
        }
    }
    Ok(Certification::Certificate {
        certificate: Certificate::HerzogHuneke {
            ideal: ideal.gens().iter().map(|p| p.to_string()).collect(),
            derivative_generators: gens.iter().map(|p| p.to_string()).collect(),
            memberships,
            annihilations,
        },
    })
}

/// Jacobian cycles `X` spanning `H_{≥1}(A)` with `X·X = 0` and `X·Z(K^M) = 0`
/// as chains.
pub fn cycle_product_certify<F: Field>(module: &GradedModule<F>) -> Result<Certification> {
    let a = module.algebra();
    let f = a.field().clone();
    if f.characteristic() != 0 {
        return not_applicable("Jacobian cycles need characteristic zero");
    }
    if a.quotient_data().is_none() {
        return not_applicable("the algebra has no polynomial presentation");
    }
    if !presentation_is_minimal(a)? {
        return not_applicable("the presentation is not minimal");
    }
    if !module.is_finite() {
        return not_applicable("the module does not vanish below the degree cap");
    }
    let kr = koszul_on_variables(&GradedModule::regular(a))?;
    let km = koszul_on_variables(module)?;
    let mut xs: Vec<Chain<F>> = Vec::new();
    for l in 1..=kr.ngens() {
        let rep = herzog_cycles(a, l)?;
        if !rep.spans() {
            return not_applicable(format!(
                "Jacobian cycles span {} of {} classes in H_{l}",
                rep.rank, rep.homology_dim
            ));
        }
        xs.extend(rep.cycles);
    }
    let mut products = 0;
    for x in &xs {
        for y in &xs {
            let v = product(&kr, x.l, x.d, &x.v, &kr, y.l, y.d, &y.v)?;
            if !linalg::is_zero_vec(&f, &v) {
                return not_applicable(format!(
                    "Jacobian cycles in H_{} and H_{} multiply to a nonzero chain",
                    x.l, y.l
                ));
            }
            products += 1;
        }
        for l in 0..=km.ngens() {
            for d in 0..=km.top_degree() {
                for y in km.cycles(l, d) {
                    let v = product(&kr, x.l, x.d, &x.v, &km, l, d, y)?;
                    if !linalg::is_zero_vec(&f, &v) {
                        return not_applicable(format!(
                            "a Jacobian cycle in H_{} times a module cycle in K_{l},{d} is nonzero",
                            x.l
                        ));
                    }
                    products += 1;
                }
            }
        }
    }
    Ok(Certification::Certificate { certificate: Certificate::CycleProducts { cycles: xs.len(), products } })
}

/// Re-checks a refutation from scratch against `module` and the stored
/// analysis data.
pub fn reverify<F: Field>(module: &GradedModule<F>, analysis: &GolodAnalysis, opts: &GolodOptions) -> Result<bool> {
    let GolodVerdict::RefutedNotGolod { witness } = &analysis.verdict else {
        return Ok(false);
    };
    reverify_refutation(module, witness, analysis, opts)
}

/// Re-checks a product or Massey witness, which needs no stored series data.
pub fn reverify_witness<F: Field>(module: &GradedModule<F>, witness: &Refutation) -> Result<bool> {
    match witness {
        Refutation::NonzeroProduct { .. } | Refutation::MasseyNonVanishing { .. } => {
            let empty = GolodAnalysis {
                verdict: GolodVerdict::Inconclusive { reason: String::new() },
                betti: BettiTable { rows: Vec::new(), complete: Vec::new() },
                poincare: TruncatedSeries::exact(Vec::new()),
                kappa_module: Vec::new(),
                kappa_ring: Vec::new(),
                serre_bound: TruncatedSeries::exact(Vec::new()),
                h_cap: 0,
                d_cap: 0,
                notes: Vec::new(),
            };
            reverify_refutation(module, witness, &empty, &GolodOptions::default())
        }
        _ => Err(Error::Construction("series and ring witnesses need the analysis they came from".into())),
    }
}

fn find_class<F: Field>(kc: &KoszulComplex<F>, r: &ClassRef) -> Option<Chain<F>> {
    let reps = kc.representatives(r.l, r.d);
    let v = reps.get(r.index)?.clone();
    (kc.format_chain(r.l, r.d, &v) == r.cycle).then_some(Chain { l: r.l, d: r.d, v })
}

fn reverify_refutation<F: Field>(
    module: &GradedModule<F>,
    witness: &Refutation,
    analysis: &GolodAnalysis,
    opts: &GolodOptions,
) -> Result<bool> {
    match witness {
        Refutation::SeriesMismatch { i, poincare, bound } => {
            let b = &analysis.betti;
            let exact = b.complete.iter().take(i + 1).all(|c| *c) && b.complete.len() > *i;
            let recomputed = serre_bound(&analysis.kappa_module, &analysis.kappa_ring, *i)?;
            Ok(exact && b.total(*i) as i64 == *poincare && recomputed.coeffs[*i] == *bound && poincare < bound)
        }
        Refutation::NonzeroProduct { mode, left, right, .. } => {
            let cx = Complexes::with_mode(module, *mode)?;
            let (Some(x), Some(y)) = (find_class(&cx.ring, left), find_class(cx.first(), right)) else {
                return Ok(false);
            };
            let out = cx.first();
            let v = product(&cx.ring, x.l, x.d, &x.v, out, y.l, y.d, &y.v)?;
            let (l, d) = (x.l + y.l, x.d + y.d);
            Ok(out.is_cycle(l, d, &v) && !out.is_boundary(l, d, &v))
        }
        Refutation::MasseyNonVanishing { mode, slots, .. } => {
            let cx = Complexes::with_mode(module, *mode)?;
            let mut chains = Vec::new();
            for (k, r) in slots.iter().enumerate() {
                let kc = if k == 0 { cx.first() } else { &cx.ring };
                match find_class(kc, r) {
                    Some(c) => chains.push(c),
                    None => return Ok(false),
                }
            }
            match massey_product(cx.first(), &cx.ring, &chains)? {
                MasseyResult::NonVanishing(w) => verify_massey_witness(cx.first(), &cx.ring, &chains, &w),
                _ => Ok(false),
            }
        }
        Refutation::RingNotGolod { ring } => {
            let k = GradedModule::residue_field(module.algebra());
            let ra = golod_module_test(&k, opts)?;
            Ok(ra.verdict == (GolodVerdict::RefutedNotGolod { witness: (**ring).clone() })
                && reverify_refutation(&k, ring, &ra, opts)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quotient_algebra;
    use crate::field::{PrimeField, Rationals};
    use crate::poly::{HomogeneousIdeal, PolyRing};

    fn quotient(names: &[&str], gens: &[&str], cap: usize) -> Arc<GradedAlgebra<Rationals>> {
        let r = PolyRing::standard(Rationals, names).unwrap();
        quotient_algebra(&HomogeneousIdeal::parse(&r, gens).unwrap(), cap).unwrap()
    }

    fn opts(h: usize) -> GolodOptions {
        GolodOptions { h_cap: h, ..Default::default() }
    }

    #[test]
    fn serre_bound_examples() {
        assert_eq!(serre_bound(&[1, 1], &[1, 1], 5).unwrap().coeffs, vec![1; 6]);
        assert_eq!(serre_bound(&[1, 2, 1], &[1, 3, 2], 5).unwrap().coeffs, vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(serre_bound(&[1, 2, 1], &[1, 2, 1], 4).unwrap().coeffs, vec![1, 2, 3, 5, 8]);
        assert!(serre_bound(&[1], &[2], 3).is_err());
        assert!(matches!(serre_bound(&[1, 40], &[1, 40], 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn series_arithmetic() {
        let p = TruncatedSeries::exact(vec![1, 1, 1, 1]);
        let q = series_quotient(&TruncatedSeries::exact(vec![1, 0, 0, 0]), &p).unwrap();
        assert_eq!(q.coeffs, vec![1, -1, 0, 0]);
        assert_eq!(series_product(&q, &p).unwrap().coeffs, vec![1, 0, 0, 0]);
        let mut partial = p.clone();
        partial.complete[2] = false;
        let r = series_product(&partial, &p).unwrap();
        assert_eq!(r.complete, vec![true, true, false, false]);
        assert_eq!(series_shift(&p).coeffs, vec![0, 1, 1, 1, 1]);
        assert_eq!(series_combine(&p, -2, &p).unwrap().coeffs, vec![-1; 4]);
    }

    #[test]
    fn hypersurface_is_consistent() {
        let a = quotient(&["x"], &["x^3"], 20);
        let r = golod_ring_test(&a, &GolodOptions { certify: false, ..opts(5) }).unwrap();
        assert_eq!(r.poincare.coeffs, vec![1; 6]);
        assert_eq!(r.serre_bound.coeffs, vec![1; 6]);
        assert_eq!(r.verdict, GolodVerdict::ConsistentUpTo { h_cap: 5, d_cap: 20 });
        // x^3 is also certified: ∂ = (x^2), x^4 ∈ (x^3)
        let c = golod_ring_test(&a, &opts(5)).unwrap();
        assert!(c.verdict.is_certified());
    }

    #[test]
    fn short_ring_doubles() {
        let a = quotient(&["x", "y"], &["x^2", "x*y", "y^2"], 14);
        let r = golod_ring_test(&a, &GolodOptions { certify: false, ..opts(5) }).unwrap();
        assert_eq!(r.poincare.coeffs, vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(r.kappa_ring, vec![1, 3, 2]);
        assert!(matches!(r.verdict, GolodVerdict::ConsistentUpTo { .. }));
    }

    #[test]
    fn complete_intersection_refuted() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 14);
        let o = opts(4);
        let r = golod_ring_test(&a, &o).unwrap();
        assert_eq!(r.poincare.coeffs, vec![1, 2, 3, 4, 5]);
        assert_eq!(r.serre_bound.coeffs, vec![1, 2, 3, 5, 8]);
        assert_eq!(
            r.verdict,
            GolodVerdict::RefutedNotGolod { witness: Refutation::SeriesMismatch { i: 3, poincare: 4, bound: 5 } }
        );
        let k = GradedModule::residue_field(&a);
        assert!(reverify(&k, &r, &o).unwrap());
        let cx = Complexes::new(&k).unwrap();
        let p = product_refuter(&cx).unwrap().unwrap();
        assert!(matches!(&p, Refutation::NonzeroProduct { left, right, .. } if left.l == 1 && right.l == 1));
        let mut forged = r.clone();
        forged.verdict = GolodVerdict::RefutedNotGolod { witness: p };
        assert!(reverify(&k, &forged, &o).unwrap());
        assert!(matches!(herzog_huneke_certify(&k).unwrap(), Certification::NotApplicable { .. }));
    }

    #[test]
    fn cube_of_maximal_ideal_certified() {
        let a = quotient(&["x", "y"], &["x^3", "x^2*y", "x*y^2", "y^3"], 16);
        let r = golod_ring_test(&a, &opts(5)).unwrap();
        assert_eq!(r.poincare.coeffs, r.serre_bound.coeffs);
        assert_eq!(r.kappa_ring, vec![1, 4, 3]);
        match &r.verdict {
            GolodVerdict::CertifiedGolod { certificate: Certificate::HerzogHuneke { derivative_generators, .. } } => {
                assert_eq!(derivative_generators.len(), 5)
            }
            v => panic!("unexpected verdict {v:?}"),
        }
        let k = GradedModule::residue_field(&a);
        match cycle_product_certify(&k).unwrap() {
            Certification::Certificate { certificate: Certificate::CycleProducts { cycles, .. } } => {
                assert!(cycles >= 7)
            }
            c => panic!("unexpected {c:?}"),
        }
        let s = massey_sweep(&k, 3, MasseyMode::Ring).unwrap();
        assert_eq!(s.non_vanishing, 0);
    }

    #[test]
    fn powers_of_an_ideal_certify() {
        // k over S/I^2 with I = (x, y)
        let a = quotient(&["x", "y"], &["x^2", "x*y", "y^2"], 10);
        let k = GradedModule::residue_field(&a);
        assert!(matches!(herzog_huneke_certify(&k).unwrap(), Certification::Certificate { .. }));
    }

    #[test]
    fn module_over_non_golod_ring_refuted() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 12);
        let m = GradedModule::regular(&a).quotient_by(&[(1, vec![Rationals.one(), Rationals.zero()])]).unwrap();
        let o = opts(4);
        let r = golod_module_test(&m, &o).unwrap();
        assert!(r.verdict.is_refuted());
        assert!(reverify(&m, &r, &o).unwrap());
    }

    #[test]
    fn characteristic_p_is_not_certified() {
        let r = PolyRing::standard(PrimeField::new(101).unwrap(), &["x", "y"]).unwrap();
        let a = quotient_algebra(&HomogeneousIdeal::parse(&r, &["x^3", "x^2*y", "x*y^2", "y^3"]).unwrap(), 16).unwrap();
        let v = golod_ring_test(&a, &opts(4)).unwrap();
        assert!(matches!(v.verdict, GolodVerdict::ConsistentUpTo { .. }));
    }

    #[test]
    fn low_cap_is_inconclusive() {
        let a = quotient(&["x", "y"], &["x^2", "x*y", "y^2"], 4);
        let r = golod_ring_test(&a, &GolodOptions { certify: false, ..opts(5) }).unwrap();
        assert!(matches!(r.verdict, GolodVerdict::Inconclusive { .. }), "{:?}", r.verdict);
    }

    #[test]
    fn ring_mode_massey_witness() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 10);
        let s = massey_sweep(&GradedModule::residue_field(&a), 2, MasseyMode::Ring).unwrap();
        assert!(s.non_vanishing > 0 && s.witness_verified);
        let s = massey_sweep(&GradedModule::regular(&a), 2, MasseyMode::Module).unwrap();
        assert_eq!(s.mode, "module");
    }
}

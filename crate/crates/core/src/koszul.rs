//! Koszul complexes of finite modules on a chosen generating set of the
//! maximal ideal, their homology, products, Massey products and the
//! Jacobian cycles of a quotient of a polynomial ring.
//!
//! `K_{l,d} = ⊕_{|S| = l} M_{d - δ_S} e_S` where `δ_S` is the sum of the
//! generator degrees in `S`, and `∂(m e_S) = Σ_p (-1)^p g_{s_p} m e_{S - s_p}`
//! with `s_0 < s_1 < …` the elements of `S`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{polynomial_algebra, AlgebraMap, GradedAlgebra, GradedModule, GradedSpace};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, Echelon};
use crate::poly::{Degree, Monomial, Poly};
use crate::resolution::{resolution_over_poly_ring, FreeModule, Resolution};

#[derive(Clone, Debug)]
struct Piece {
    /// `(subset index, offset, module degree)` for each nonempty block.
    blocks: Vec<(usize, usize, usize)>,
    dim: usize,
}

#[derive(Clone, Debug)]
struct HomologyPiece<F: Field> {
    /// Boundaries first, then the representatives.
    echelon: Echelon<F>,
    boundaries: Echelon<F>,
    reps: Vec<Vec<F::Elem>>,
    rep_index: Vec<usize>,
    cycles: Vec<Vec<F::Elem>>,
}

/// Koszul complex `K(g_1, …, g_n; M)` of a finite module.
#[derive(Clone, Debug)]
pub struct KoszulComplex<F: Field> {
    module: Arc<GradedModule<F>>,
    gens: Vec<(usize, Vec<F::Elem>)>,
    is_ring: bool,
    subsets: Vec<Vec<u64>>,
    subset_index: HashMap<u64, usize>,
    top: usize,
    pieces: Vec<Vec<Piece>>,
    homology: Vec<Vec<HomologyPiece<F>>>,
}

fn subsets_of_size(n: usize, l: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, l: usize, cur: u64, out: &mut Vec<u64>) {
        if l == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            if n - i < l {
                break;
            }
            rec(i + 1, n, l - 1, cur | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, l, 0, &mut out);
    out
}

fn elements(s: u64) -> Vec<usize> {
    (0..64).filter(|i| s & (1 << i) != 0).collect()
}

/// `e_S ∧ e_T = sign · e_{S ∪ T}` for disjoint `S`, `T`.
fn wedge_sign(s: u64, t: u64) -> bool {
    let mut inversions = 0;
    for j in elements(t) {
        inversions += (s >> (j + 1)).count_ones();
    }
    inversions % 2 == 1
}

impl<F: Field> KoszulComplex<F> {
    /// The complex on the given generators of the maximal ideal.
    pub fn new(module: &GradedModule<F>, gens: Vec<(usize, Vec<F::Elem>)>) -> Result<Self> {
        let a = module.algebra();
        let top_m = module.top_degree().or(if module.is_zero() { Some(0) } else { None });
        let n = gens.len();
        if n > 63 {
            return Err(Error::Construction("too many generators".into()));
        }
        for (d, v) in &gens {
            if *d == 0 || *d > a.d_cap() || v.len() != a.dim(*d) {
                return Err(Error::Dimension(format!("generator of degree {d} has the wrong shape")));
            }
        }
        let is_ring = module.is_regular();
        let top = match top_m {
            Some(t) => t + gens.iter().map(|(d, _)| *d).sum::<usize>(),
            // the complex is only known below the cap, which is enough when
            // the homology provably vanishes above it
            None => {
                let bound = if is_ring { koszul_homology_bound(a) } else { None }.ok_or_else(|| {
                    Error::Construction(
                        "Koszul homology needs a module that vanishes above the cap, or the ring itself".into(),
                    )
                })?;
                if bound > a.d_cap() {
                    return Err(Error::CapTooSmall(format!(
                        "Koszul homology of the ring may live up to degree {bound}, above the cap {}",
                        a.d_cap()
                    )));
                }
                bound
            }
        };
        let subsets: Vec<Vec<u64>> = (0..=n).map(|l| subsets_of_size(n, l)).collect();
        let mut subset_index = HashMap::new();
        for level in &subsets {
            for (i, s) in level.iter().enumerate() {
                subset_index.insert(*s, i);
            }
        }
        let delta = |s: u64| -> usize { elements(s).iter().map(|i| gens[*i].0).sum() };
        let mut pieces = Vec::new();
        for level in &subsets {
            let mut row = Vec::new();
            for d in 0..=top {
                let mut blocks = Vec::new();
                let mut off = 0;
                for (i, s) in level.iter().enumerate() {
                    let ds = delta(*s);
                    if ds > d {
                        continue;
                    }
                    let m = module.dim(d - ds);
                    if m > 0 {
                        blocks.push((i, off, d - ds));
                        off += m;
                    }
                }
                row.push(Piece { blocks, dim: off });
            }
            pieces.push(row);
        }
        let mut kc = KoszulComplex {
            module: Arc::new(module.clone()),
            gens,
            is_ring,
            subsets,
            subset_index,
            top,
            pieces,
            homology: Vec::new(),
        };
        kc.compute_homology();
        Ok(kc)
    }

    /// The complex on the minimal generators of the maximal ideal.
    pub fn on_min_gens(module: &GradedModule<F>) -> Result<Self> {
        let gens = module.algebra().min_gens().gens;
        Self::new(module, gens)
    }

    /// The Koszul complex of the algebra itself.
    pub fn of_algebra(a: &Arc<GradedAlgebra<F>>) -> Result<Self> {
        Self::on_min_gens(&GradedModule::regular(a))
    }

    pub fn module(&self) -> &GradedModule<F> {
        &self.module
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        self.module.algebra()
    }

    pub fn field(&self) -> &F {
        self.module.field()
    }

    pub fn generators(&self) -> &[(usize, Vec<F::Elem>)] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    /// Whether the module is the algebra itself.
    pub fn is_ring(&self) -> bool {
        self.is_ring
    }

    /// Largest internal degree with a nonzero piece.
    pub fn top_degree(&self) -> usize {
        self.top
    }

    pub fn dim(&self, l: usize, d: usize) -> usize {
        if l > self.ngens() || d > self.top {
            0
        } else {
            self.pieces[l][d].dim
        }
    }

    fn block_offset(&self, l: usize, d: usize, subset: usize) -> Option<usize> {
        self.pieces[l][d].blocks.iter().find(|(s, _, _)| *s == subset).map(|(_, off, _)| *off)
    }

    /// Row images of `∂: K_{l,d} -> K_{l-1,d}`.
    pub fn differential(&self, l: usize, d: usize) -> Vec<Vec<F::Elem>> {
        let f = self.field().clone();
        if l == 0 || l > self.ngens() || d > self.top {
            return vec![Vec::new(); self.dim(l, d)];
        }
        let width = self.dim(l - 1, d);
        let mut rows = Vec::with_capacity(self.dim(l, d));
        for &(si, _, e) in &self.pieces[l][d].blocks {
            let s = self.subsets[l][si];
            let elems = elements(s);
            for j in 0..self.module.dim(e) {
                let m = linalg::unit_vector(&f, self.module.dim(e), j);
                let mut row = vec![f.zero(); width];
                for (p, &g) in elems.iter().enumerate() {
                    let (dg, x) = &self.gens[g];
                    let t = s & !(1 << g);
                    let ti = self.subset_index[&t];
                    let Some(off) = self.block_offset(l - 1, d, ti) else { continue };
                    let w = self.module.act(*dg, x, e, &m);
                    let c = if p % 2 == 0 { f.one() } else { f.neg(&f.one()) };
                    for (k, y) in w.iter().enumerate() {
                        if !f.is_zero(y) {
                            let v = f.mul(&c, y);
                            f.add_assign(&mut row[off + k], &v);
                        }
                    }
                }
                rows.push(row);
            }
        }
        rows
    }

    pub fn apply_differential(&self, l: usize, d: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        if l == 0 {
            return Vec::new();
        }
        linalg::apply(self.field(), &self.differential(l, d), self.dim(l - 1, d), v)
    }

    /// `∂∂ = 0` on every piece.
    pub fn check_d_squared(&self) -> Result<()> {
        let f = self.field();
        for l in 2..=self.ngens() {
            for d in 0..=self.top {
                let upper = self.differential(l, d);
                for row in &upper {
                    let w = self.apply_differential(l - 1, d, row);
                    if !linalg::is_zero_vec(f, &w) {
                        return Err(Error::Internal(format!("∂² ≠ 0 on K_{{{l},{d}}}")));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_homology(&mut self) {
        let f = self.field().clone();
        let n = self.ngens();
        let mut all = Vec::new();
        for l in 0..=n {
            let mut row = Vec::new();
            for d in 0..=self.top {
                let dim = self.dim(l, d);
                let cycles = if l == 0 {
                    (0..dim).map(|i| linalg::unit_vector(&f, dim, i)).collect()
                } else {
                    linalg::left_kernel(&f, &self.differential(l, d), self.dim(l - 1, d))
                };
                let mut echelon = Echelon::new(f.clone(), dim);
                let mut boundaries = Echelon::new(f.clone(), dim);
                if l < n {
                    for b in self.differential(l + 1, d) {
                        echelon.insert(&b);
                        boundaries.insert(&b);
                    }
                }
                let mut reps = Vec::new();
                let mut rep_index = Vec::new();
                for z in &cycles {
                    let idx = echelon.inserted();
                    if echelon.insert_if_new(z) {
                        reps.push(z.clone());
                        rep_index.push(idx);
                    }
                }
                row.push(HomologyPiece { echelon, boundaries, reps, rep_index, cycles });
            }
            all.push(row);
        }
        self.homology = all;
    }

    pub fn homology_dim(&self, l: usize, d: usize) -> usize {
        if l > self.ngens() || d > self.top {
            0
        } else {
            self.homology[l][d].reps.len()
        }
    }

    /// `dim H_l` summed over internal degrees.
    pub fn homology_dims(&self) -> Vec<usize> {
        (0..=self.ngens()).map(|l| (0..=self.top).map(|d| self.homology_dim(l, d)).sum()).collect()
    }

    /// Coefficients of the Koszul polynomial `Σ dim H_l t^l`.
    pub fn koszul_polynomial(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.homology_dims().into_iter().map(|x| x as i64).collect();
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        v
    }

    /// Cycle representatives of a basis of `H_l` in degree `d`.
    pub fn representatives(&self, l: usize, d: usize) -> &[Vec<F::Elem>] {
        if l > self.ngens() || d > self.top {
            &[]
        } else {
            &self.homology[l][d].reps
        }
    }

    /// All basis classes as `(l, d, index)`, ordered by `l`, then `d`.
    pub fn basis_classes(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for l in 0..=self.ngens() {
            for d in 0..=self.top {
                for i in 0..self.homology_dim(l, d) {
                    out.push((l, d, i));
                }
            }
        }
        out
    }

    pub fn is_cycle(&self, l: usize, d: usize, z: &[F::Elem]) -> bool {
        l == 0 || linalg::is_zero_vec(self.field(), &self.apply_differential(l, d, z))
    }

    /// Exact boundary test by rank comparison against the boundary span.
    pub fn is_boundary(&self, l: usize, d: usize, z: &[F::Elem]) -> bool {
        if linalg::is_zero_vec(self.field(), z) {
            return true;
        }
        if l > self.ngens() || d > self.top {
            return true;
        }
        let b = &self.homology[l][d].boundaries;
        let mut e = b.clone();
        let before = e.rank();
        e.insert(z);
        e.rank() == before
    }

    /// Some `a ∈ K_{l+1,d}` with `∂a = z`.
    pub fn solve_boundary(&self, l: usize, d: usize, z: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = self.field();
        if l >= self.ngens() || d > self.top {
            return if linalg::is_zero_vec(f, z) { Some(vec![f.zero(); self.dim(l + 1, d)]) } else { None };
        }
        linalg::solve(f, &self.differential(l + 1, d), self.dim(l, d), z)
    }

    /// Coordinates of the class of a cycle in the homology basis, or `None`
    /// if `z` is not a cycle.
    pub fn class_coords(&self, l: usize, d: usize, z: &[F::Elem]) -> Option<Vec<F::Elem>> {
        if !self.is_cycle(l, d, z) {
            return None;
        }
        if l > self.ngens() || d > self.top {
            return Some(Vec::new());
        }
        let h = &self.homology[l][d];
        let mut w = z.to_vec();
        let combo = h.echelon.reduce_tracking(&mut w);
        debug_assert!(linalg::is_zero_vec(self.field(), &w));
        Some(h.rep_index.iter().map(|i| combo[*i].clone()).collect())
    }

    /// Basis of the cycles in `K_{l,d}`.
    pub fn cycles(&self, l: usize, d: usize) -> &[Vec<F::Elem>] {
        if l > self.ngens() || d > self.top {
            &[]
        } else {
            &self.homology[l][d].cycles
        }
    }

    /// Human-readable form of `v ∈ K_{l,d}`, e.g. `x*e1 - y*e2`.
    pub fn format_chain(&self, l: usize, d: usize, v: &[F::Elem]) -> String {
        if l > self.ngens() || d > self.top || linalg::is_zero_vec(self.field(), v) {
            return "0".into();
        }
        let f = self.field();
        let mut terms = Vec::new();
        for &(si, off, e) in &self.pieces[l][d].blocks {
            let s = self.subsets[l][si];
            let wedge = if s == 0 {
                String::new()
            } else {
                elements(s).iter().map(|i| format!("e{}", i + 1)).collect::<Vec<_>>().join("^")
            };
            let part = &v[off..off + self.module.dim(e)];
            if linalg::is_zero_vec(f, part) {
                continue;
            }
            let coeff = crate::algebra::format_vector(f, part, self.module.labels(e));
            terms.push(match (wedge.is_empty(), part.iter().filter(|c| !f.is_zero(c)).count() > 1) {
                (true, _) => coeff,
                (false, _) if coeff == "1" => wedge,
                (false, true) => format!("({coeff})*{wedge}"),
                (false, false) => format!("{coeff}*{wedge}"),
            });
        }
        terms.join(" + ")
    }
}

/// Degree above which `H(K^A)` vanishes, for `A = S/I`: the degree of the lcm
/// of the leading monomials of a Gröbner basis. The Taylor resolution of
/// `S/in(I)` lives below it, and Betti numbers only drop from `in(I)` to `I`.
pub fn koszul_homology_bound<F: Field>(a: &Arc<GradedAlgebra<F>>) -> Option<usize> {
    let q = a.quotient_data()?;
    let ring = q.ring();
    let lms = q.ideal().groebner().leading_monomials();
    let lcm = lms.iter().fold(Monomial::one(ring.nvars()), |acc, m| acc.lcm(m));
    Some(lcm.weighted_degree(ring.weights()) as usize)
}

/// `x · y` for `x ∈ left_{l1,d1}` and `y ∈ right_{l2,d2}`. One side must be
/// the Koszul complex of the algebra; the product lives in the other one
/// (the left one if both are). Both complexes must use the same generators.
pub fn product<F: Field>(
    left: &KoszulComplex<F>,
    l1: usize,
    d1: usize,
    x: &[F::Elem],
    right: &KoszulComplex<F>,
    l2: usize,
    d2: usize,
    y: &[F::Elem],
) -> Result<Vec<F::Elem>> {
    if !Arc::ptr_eq(left.algebra(), right.algebra()) || left.gens != right.gens {
        return Err(Error::Construction("Koszul complexes on different generators".into()));
    }
    let ring_on_left = left.is_ring;
    if !ring_on_left && !right.is_ring {
        return Err(Error::Construction("one factor must come from the algebra's Koszul complex".into()));
    }
    let out_kc = if ring_on_left { right } else { left };
    let f = left.field().clone();
    let (l, d) = (l1 + l2, d1 + d2);
    let mut out = vec![f.zero(); out_kc.dim(l, d)];
    if out.is_empty() || l1 > left.ngens() || l2 > right.ngens() || d1 > left.top || d2 > right.top {
        return Ok(out);
    }
    let a = left.algebra().clone();
    for &(si, soff, e1) in &left.pieces[l1][d1].blocks {
        let s = left.subsets[l1][si];
        for &(ti, toff, e2) in &right.pieces[l2][d2].blocks {
            let t = right.subsets[l2][ti];
            if s & t != 0 {
                continue;
            }
            let u = s | t;
            let ui = out_kc.subset_index[&u];
            let Some(uoff) = out_kc.block_offset(l, d, ui) else { continue };
            let neg = wedge_sign(s, t);
            let xs = &x[soff..soff + left.module.dim(e1)];
            let ys = &y[toff..toff + right.module.dim(e2)];
            if linalg::is_zero_vec(&f, xs) || linalg::is_zero_vec(&f, ys) {
                continue;
            }
            let w = if ring_on_left { right.module.act(e1, xs, e2, ys) } else { left.module.act(e2, ys, e1, xs) };
            debug_assert!(a.d_cap() >= e1 + e2 || w.is_empty());
            for (k, c) in w.iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                let c = if neg { f.neg(c) } else { c.clone() };
                f.add_assign(&mut out[uoff + k], &c);
            }
        }
    }
    Ok(out)
}

/// `(-1)^{l+1} v`
fn bar<F: Field>(f: &F, l: usize, v: &[F::Elem]) -> Vec<F::Elem> {
    if l % 2 == 1 {
        v.to_vec()
    } else {
        v.iter().map(|c| f.neg(c)).collect()
    }
}

/// A homogeneous element of a Koszul complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<F: Field> {
    pub l: usize,
    pub d: usize,
    pub v: Vec<F::Elem>,
}

/// A defining system `a_{ij}` together with its final element.
#[derive(Clone, Debug)]
pub struct MasseyWitness<F: Field> {
    pub system: BTreeMap<(usize, usize), Chain<F>>,
    pub value: Chain<F>,
    /// Coordinates of the class of `value` in the homology basis.
    pub class: Vec<F::Elem>,
}

#[derive(Clone, Debug)]
pub enum MasseyResult<F: Field> {
    Vanishes,
    NonVanishing(MasseyWitness<F>),
    /// No defining system exists; `(i, j)` is the first entry that could not be solved.
    NoDefiningSystem {
        pair: (usize, usize),
    },
    Inconclusive {
        reason: String,
    },
}

impl<F: Field> MasseyResult<F> {
    pub fn kind(&self) -> &'static str {
        match self {
            MasseyResult::Vanishes => "vanishes",
            MasseyResult::NonVanishing(_) => "non-vanishing",
            MasseyResult::NoDefiningSystem { .. } => "no-defining-system",
            MasseyResult::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Budget on the number of defining systems enumerated for `n >= 4`.
pub const MASSEY_BUDGET: usize = 10_000;

struct MasseyCtx<'a, F: Field> {
    first: &'a KoszulComplex<F>,
    ring: &'a KoszulComplex<F>,
    slots: &'a [Chain<F>],
}

impl<F: Field> MasseyCtx<'_, F> {
    fn n(&self) -> usize {
        self.slots.len()
    }

    fn complex(&self, i: usize) -> &KoszulComplex<F> {
        if i == 0 {
            self.first
        } else {
            self.ring
        }
    }

    fn degrees(&self, i: usize, j: usize) -> (usize, usize) {
        let l: usize = self.slots[i..j].iter().map(|c| c.l).sum::<usize>() + (j - i - 1);
        let d = self.slots[i..j].iter().map(|c| c.d).sum();
        (l, d)
    }

    /// `Σ_{i<k<j} ā_{ik} a_{kj}`
    fn obstruction(&self, sys: &BTreeMap<(usize, usize), Chain<F>>, i: usize, j: usize) -> Result<Chain<F>> {
        let f = self.ring.field().clone();
        let (l, d) = self.degrees(i, j);
        let (l, d) = (l - 1, d);
        let kc = self.complex(i);
        let mut acc = vec![f.zero(); kc.dim(l, d)];
        for k in i + 1..j {
            let a = &sys[&(i, k)];
            let b = &sys[&(k, j)];
            let p = product(kc, a.l, a.d, &bar(&f, a.l, &a.v), self.ring, b.l, b.d, &b.v)?;
            linalg::add_scaled(&f, &mut acc, &f.one(), &p);
        }
        Ok(Chain { l, d, v: acc })
    }

    /// Fills every `a_{ij}` with `1 < j - i < n` using `choice` to add a
    /// homology representative (`None` for the particular solution).
    fn fill(
        &self,
        choice: &dyn Fn(usize, usize) -> Option<usize>,
    ) -> Result<std::result::Result<BTreeMap<(usize, usize), Chain<F>>, (usize, usize)>> {
        let f = self.ring.field().clone();
        let n = self.n();
        let mut sys = BTreeMap::new();
        for (i, s) in self.slots.iter().enumerate() {
            sys.insert((i, i + 1), s.clone());
        }
        for len in 2..n {
            for i in 0..=(n - len) {
                let j = i + len;
                let t = self.obstruction(&sys, i, j)?;
                let kc = self.complex(i);
                let Some(mut a) = kc.solve_boundary(t.l, t.d, &t.v) else { return Ok(Err((i, j))) };
                if let Some(r) = choice(i, j) {
                    linalg::add_scaled(&f, &mut a, &f.one(), &kc.representatives(t.l + 1, t.d)[r]);
                }
                sys.insert((i, j), Chain { l: t.l + 1, d: t.d, v: a });
            }
        }
        Ok(Ok(sys))
    }

    fn witness(&self, sys: BTreeMap<(usize, usize), Chain<F>>) -> Result<Option<MasseyWitness<F>>> {
        let n = self.n();
        let value = self.obstruction(&sys, 0, n)?;
        if !self.first.is_cycle(value.l, value.d, &value.v) {
            return Err(Error::Internal("Massey value is not a cycle".into()));
        }
        if self.first.is_boundary(value.l, value.d, &value.v) {
            return Ok(None);
        }
        let class = self.first.class_coords(value.l, value.d, &value.v).expect("cycle");
        let mut system = sys;
        system.retain(|k, _| *k != (0, n));
        Ok(Some(MasseyWitness { system, value, class }))
    }

    /// Free parameters: the number of homology representatives available to each `a_{ij}`.
    fn freedom(&self) -> Vec<((usize, usize), usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for len in 2..n {
            for i in 0..=(n - len) {
                let j = i + len;
                let (l, d) = self.degrees(i, j);
                let r = self.complex(i).homology_dim(l, d);
                if r > 0 {
                    out.push(((i, j), r));
                }
            }
        }
        out
    }
}

/// Massey product `⟨v_1, …, v_n⟩`. `slots[0]` lives in `first` (the Koszul
/// complex of a module, or of the algebra), the others in `ring` and must
/// have positive homological degree. Every slot must be a cycle.
pub fn massey_product<F: Field>(
    first: &KoszulComplex<F>,
    ring: &KoszulComplex<F>,
    slots: &[Chain<F>],
) -> Result<MasseyResult<F>> {
    let n = slots.len();
    if n < 2 {
        return Err(Error::Construction("a Massey product needs at least two entries".into()));
    }
    if !ring.is_ring() {
        return Err(Error::Construction("the second complex must be the algebra's own".into()));
    }
    for (i, s) in slots.iter().enumerate() {
        let kc = if i == 0 { first } else { ring };
        if s.v.len() != kc.dim(s.l, s.d) || !kc.is_cycle(s.l, s.d, &s.v) {
            return Err(Error::Construction(format!("entry {} is not a cycle of the right shape", i + 1)));
        }
        if (i > 0 || first.is_ring()) && s.l == 0 {
            return Err(Error::Construction(format!("entry {} must have positive homological degree", i + 1)));
        }
    }
    let ctx = MasseyCtx { first, ring, slots };
    let none = |_: usize, _: usize| None;
    let sys = match ctx.fill(&none)? {
        Ok(s) => s,
        Err(pair) if n <= 3 || ctx.freedom().is_empty() => return Ok(MasseyResult::NoDefiningSystem { pair }),
        Err(_) => return search(&ctx),
    };
    if let Some(w) = ctx.witness(sys.clone())? {
        return Ok(MasseyResult::NonVanishing(w));
    }
    let freedom = ctx.freedom();
    if freedom.is_empty() {
        return Ok(MasseyResult::Vanishes);
    }
    if n == 3 {
        // the value is affine in the free choices, so it suffices to move one at a time
        for &((i, j), r) in &freedom {
            for k in 0..r {
                let pick = |a: usize, b: usize| if (a, b) == (i, j) { Some(k) } else { None };
                if let Ok(s) = ctx.fill(&pick)? {
                    if let Some(w) = ctx.witness(s)? {
                        return Ok(MasseyResult::NonVanishing(w));
                    }
                }
            }
        }
        return Ok(MasseyResult::Vanishes);
    }
    search(&ctx)
}

fn search<F: Field>(ctx: &MasseyCtx<'_, F>) -> Result<MasseyResult<F>> {
    let freedom = ctx.freedom();
    let mut total: usize = 1;
    for (_, r) in &freedom {
        total = total.saturating_mul(r + 1);
    }
    if total > MASSEY_BUDGET {
        return Ok(MasseyResult::Inconclusive {
            reason: format!("{total} candidate defining systems exceed the budget of {MASSEY_BUDGET}"),
        });
    }
    let mut found_system = false;
    let mut first_block = None;
    for code in 0..total {
        let mut c = code;
        let mut picks = HashMap::new();
        for ((i, j), r) in &freedom {
            let k = c % (r + 1);
            c /= r + 1;
            if k > 0 {
                picks.insert((*i, *j), k - 1);
            }
        }
        let pick = |a: usize, b: usize| picks.get(&(a, b)).copied();
        match ctx.fill(&pick)? {
            Ok(sys) => {
                found_system = true;
                if let Some(w) = ctx.witness(sys)? {
                    return Ok(MasseyResult::NonVanishing(w));
                }
            }
            Err(pair) => {
                first_block.get_or_insert(pair);
            }
        }
    }
    Ok(MasseyResult::Inconclusive {
        reason: if found_system {
            "every defining system on the search grid vanishes, but the grid does not exhaust all systems".into()
        } else {
            format!("no defining system on the search grid (first obstruction at {:?})", first_block)
        },
    })
}

/// Re-checks a witness from scratch: the defining-system equations, the
/// slots, and that the value is not a boundary.
pub fn verify_massey_witness<F: Field>(
    first: &KoszulComplex<F>,
    ring: &KoszulComplex<F>,
    slots: &[Chain<F>],
    w: &MasseyWitness<F>,
) -> Result<bool> {
    let n = slots.len();
    let ctx = MasseyCtx { first, ring, slots };
    for (i, s) in slots.iter().enumerate() {
        if w.system.get(&(i, i + 1)) != Some(s) {
            return Ok(false);
        }
    }
    for (&(i, j), a) in &w.system {
        if j - i < 2 {
            continue;
        }
        let t = ctx.obstruction(&w.system, i, j)?;
        let kc = ctx.complex(i);
        if kc.apply_differential(a.l, a.d, &a.v) != t.v {
            return Ok(false);
        }
    }
    let mut full = w.system.clone();
    full.remove(&(0, n));
    let value = ctx.obstruction(&full, 0, n)?;
    Ok(value == w.value && first.is_cycle(value.l, value.d, &value.v) && !first.is_boundary(value.l, value.d, &value.v))
}

/// Class of `x · y` in the homology basis of the product's complex.
pub fn homology_product<F: Field>(
    left: &KoszulComplex<F>,
    x: &Chain<F>,
    right: &KoszulComplex<F>,
    y: &Chain<F>,
) -> Result<Chain<F>> {
    let v = product(left, x.l, x.d, &x.v, right, y.l, y.d, &y.v)?;
    let out = if left.is_ring() { right } else { left };
    let (l, d) = (x.l + y.l, x.d + y.d);
    let coords =
        out.class_coords(l, d, &v).ok_or_else(|| Error::Internal("product of cycles is not a cycle".into()))?;
    Ok(Chain { l, d, v: coords })
}

/// Comparison of Koszul homology with Betti numbers over the polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaCrossCheck {
    pub koszul: Vec<i64>,
    pub over_polynomial_ring: Vec<i64>,
    /// Whether the variables map to minimal generators of the maximal ideal.
    pub minimal_presentation: bool,
    pub agree: bool,
}

/// Whether the variables of a quotient presentation stay linearly independent
/// modulo the square of the maximal ideal.
pub fn presentation_is_minimal<F: Field>(a: &Arc<GradedAlgebra<F>>) -> Result<bool> {
    let vars = a.variable_generators()?;
    Ok(vars.len() == a.min_gens().len() && {
        let mut by_degree: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
        for (d, v) in vars {
            by_degree.entry(d).or_default().push(v);
        }
        let mg = a.min_gens();
        by_degree.iter().all(|(d, vs)| {
            // the minimal generators of degree d complete m^2; the variables must too
            let mut base: Vec<Vec<F::Elem>> = Vec::new();
            for e in 1..=d / 2 {
                for i in 0..a.dim(e) {
                    for j in 0..a.dim(d - e) {
                        let x = linalg::unit_vector(a.field(), a.dim(e), i);
                        let y = linalg::unit_vector(a.field(), a.dim(d - e), j);
                        base.push(a.mul(e, &x, d - e, &y));
                    }
                }
            }
            let added = linalg::greedy_complement(a.field(), a.dim(*d), &base, vs).len();
            added == vs.len() && added == mg.degrees().iter().filter(|g| *g == d).count()
        })
    })
}

/// Koszul polynomial of `M` versus the Betti numbers of `M` over the
/// polynomial ring of the presentation of its algebra.
pub fn cross_check_kappa<F: Field>(module: &GradedModule<F>) -> Result<KappaCrossCheck> {
    let a = module.algebra();
    let q = a.quotient_data().ok_or_else(|| Error::Construction("algebra has no polynomial presentation".into()))?;
    let koszul = KoszulComplex::on_min_gens(module)?.koszul_polynomial();
    let ring = q.ring();
    let top = module.top_degree().ok_or_else(|| Error::Construction("module must vanish above the cap".into()))?;
    let bound = top + ring.weights().iter().map(|w| *w as usize).sum::<usize>();
    let cap = bound.max(2 * *ring.weights().iter().max().unwrap() as usize);
    let s = polynomial_algebra(ring, cap)?;
    let pi = AlgebraMap::between_quotients(&s, a)?;
    let over_s = GradedModule::restrict_along(&pi, module)?;
    let res = resolution_over_poly_ring(&over_s)?;
    let mut betti = res.poincare_series().coeffs;
    while betti.len() > 1 && *betti.last().unwrap() == 0 {
        betti.pop();
    }
    let minimal = presentation_is_minimal(a)?;
    Ok(KappaCrossCheck { agree: koszul == betti, koszul, over_polynomial_ring: betti, minimal_presentation: minimal })
}

/// Outcome of the Jacobian-cycle construction in one homological degree.
#[derive(Clone, Debug)]
pub struct HerzogReport<F: Field> {
    pub l: usize,
    /// Cycles of `K^R` on the variables, with their internal degrees.
    pub cycles: Vec<Chain<F>>,
    /// Rank of their classes in `H_l`.
    pub rank: usize,
    pub homology_dim: usize,
    /// Number of paths through the resolution, i.e. unknown coefficients.
    pub unknowns: usize,
}

impl<F: Field> HerzogReport<F> {
    pub fn spans(&self) -> bool {
        self.rank == self.homology_dim
    }
}

/// Resolution of `S/I` over `S`, with the differentials read off as polynomials.
pub struct PolyResolution<F: Field> {
    resolution: Resolution<F>,
    s: Arc<GradedAlgebra<F>>,
}

impl<F: Field> PolyResolution<F> {
    pub fn new(r: &Arc<GradedAlgebra<F>>) -> Result<Self> {
        let q =
            r.quotient_data().ok_or_else(|| Error::Construction("algebra has no polynomial presentation".into()))?;
        let ring = q.ring();
        let top = r
            .top_degree()
            .ok_or_else(|| Error::Construction("Jacobian cycles need a finite-length quotient".into()))?;
        let cap = (top + ring.weights().iter().map(|w| *w as usize).sum::<usize>())
            .max(2 * *ring.weights().iter().max().unwrap() as usize);
        let s = polynomial_algebra(ring, cap)?;
        let pi = AlgebraMap::between_quotients(&s, r)?;
        let m = GradedModule::restrict_along(&pi, &GradedModule::regular(r))?;
        Ok(PolyResolution { resolution: resolution_over_poly_ring(&m)?, s })
    }

    pub fn resolution(&self) -> &Resolution<F> {
        &self.resolution
    }

    pub fn generator_degrees(&self, i: usize) -> &[usize] {
        self.resolution.steps().get(i).map(|s| s.free.generator_degrees()).unwrap_or(&[])
    }

    /// Entry `α_{jk}` of the differential `F_i -> F_{i-1}` (`i >= 1`).
    pub fn entry(&self, i: usize, j: usize, k: usize) -> Poly<F> {
        let q = self.s.quotient_data().expect("polynomial ring");
        let step = &self.resolution.steps()[i];
        let prev: &FreeModule<F> = &self.resolution.steps()[i - 1].free;
        let g = step.free.generator_degrees()[j];
        let img = &step.images[j];
        for (kk, off) in prev.blocks(g) {
            if kk == k {
                let e = g - prev.generator_degrees()[k];
                return q.poly(e, &img[off..off + self.s.dim(e)]);
            }
        }
        Poly::zero(q.ring())
    }
}

fn determinant<F: Field>(m: &[Vec<Poly<F>>], ring: &Arc<crate::poly::PolyRing<F>>) -> Poly<F> {
    let n = m.len();
    let mut total = Poly::zero(ring);
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm keeps track of the sign through swaps
    fn heap<F: Field>(k: usize, perm: &mut Vec<usize>, sign: &mut bool, m: &[Vec<Poly<F>>], total: &mut Poly<F>) {
        if k == 1 {
            let mut p = Poly::one(m[0][0].ring());
            for (r, c) in perm.iter().enumerate() {
                p = p.times(&m[r][*c]);
                if p.is_zero() {
                    break;
                }
            }
            *total = if *sign { total.minus(&p) } else { total.plus(&p) };
            return;
        }
        heap(k - 1, perm, sign, m, total);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
            *sign = !*sign;
            heap(k - 1, perm, sign, m, total);
        }
    }
    if n == 0 {
        return Poly::one(ring);
    }
    let mut sign = false;
    heap(n, &mut perm, &mut sign, m, &mut total);
    total
}

/// Jacobian cycles in `H_l` of the Koszul complex of `R = S/I` on the
/// variables. For each generator of `F_l` in the minimal `S`-resolution of
/// `R` the candidate is `Σ_path c_path Σ_{|T|=l} (Π_{i∈T} w_i) det(∂α/∂X_T) e_T`,
/// the path running through one generator of each `F_{l-1}, …, F_1`. The
/// coefficients `c` are solved for from `∂z = 0`.
pub fn herzog_cycles<F: Field>(r: &Arc<GradedAlgebra<F>>, l: usize) -> Result<HerzogReport<F>> {
    let f = r.field().clone();
    if f.characteristic() != 0 {
        return Err(Error::Characteristic("Jacobian cycles are only claimed in characteristic zero".into()));
    }
    if l == 0 {
        return Err(Error::Construction("Jacobian cycles live in positive homological degree".into()));
    }
    let q = r.quotient_data().ok_or_else(|| Error::Construction("algebra has no polynomial presentation".into()))?;
    let ring = q.ring().clone();
    let n = ring.nvars();
    let kc = KoszulComplex::new(&GradedModule::regular(r), r.variable_generators()?)?;
    let pr = PolyResolution::new(r)?;
    let homology_dim = kc.homology_dims().get(l).copied().unwrap_or(0);
    let weights = ring.weights().to_vec();
    let mut cycles = Vec::new();
    let mut unknowns = 0;

    for (j1, &deg) in pr.generator_degrees(l).iter().enumerate() {
        // paths j1 -> j2 -> … -> j_l -> 0, one generator per step
        let mut paths: Vec<Vec<usize>> = vec![vec![j1]];
        for step in (1..l).rev() {
            let mut next = Vec::new();
            for p in &paths {
                for k in 0..pr.generator_degrees(step).len() {
                    let mut q2 = p.clone();
                    q2.push(k);
                    next.push(q2);
                }
            }
            paths = next;
        }
        let mut candidates = Vec::new();
        for path in &paths {
            let mut entries = Vec::new();
            for (t, j) in path.iter().enumerate() {
                let i = l - t;
                let k = if i == 1 { 0 } else { path[t + 1] };
                entries.push(pr.entry(i, *j, k));
            }
            if entries.iter().any(|p| p.is_zero()) {
                continue;
            }
            let mut v = vec![f.zero(); kc.dim(l, deg)];
            for t in subsets_of_size(n, l) {
                let vars = elements(t);
                let delta: usize = vars.iter().map(|i| weights[*i] as usize).sum();
                if delta > deg {
                    continue;
                }
                let jac: Vec<Vec<Poly<F>>> =
                    entries.iter().map(|p| vars.iter().map(|i| p.partial_derivative(*i)).collect()).collect();
                let det = determinant(&jac, &ring);
                if det.is_zero() {
                    continue;
                }
                let e = deg - delta;
                match det.weighted_degree() {
                    Degree::Homogeneous(x) if x as usize == e => {}
                    Degree::Zero => continue,
                    _ => return Err(Error::Internal("Jacobian determinant has the wrong degree".into())),
                }
                let w: i64 = vars.iter().map(|i| weights[*i] as i64).product();
                let coords = if e > r.d_cap() {
                    continue;
                } else {
                    q.coords(&det.scale(&f.from_i64(w)), e)?
                };
                let ti = kc.subset_index[&t];
                let Some(off) = kc.block_offset(l, deg, ti) else { continue };
                for (k, c) in coords.into_iter().enumerate() {
                    f.add_assign(&mut v[off + k], &c);
                }
            }
            candidates.push(v);
        }
        unknowns += candidates.len();
        if candidates.is_empty() {
            continue;
        }
        let images: Vec<Vec<F::Elem>> = candidates.iter().map(|v| kc.apply_differential(l, deg, v)).collect();
        for c in linalg::left_kernel(&f, &images, kc.dim(l - 1, deg)) {
            let mut z = vec![f.zero(); kc.dim(l, deg)];
            for (ci, v) in c.iter().zip(&candidates) {
                linalg::add_scaled(&f, &mut z, ci, v);
            }
            if !linalg::is_zero_vec(&f, &z) {
                cycles.push(Chain { l, d: deg, v: z });
            }
        }
    }
    let mut by_degree: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
    for z in &cycles {
        let coords =
            kc.class_coords(z.l, z.d, &z.v).ok_or_else(|| Error::Internal("Jacobian element is not a cycle".into()))?;
        by_degree.entry(z.d).or_default().push(coords);
    }
    let rank = by_degree.iter().map(|(d, rows)| linalg::rank(&f, rows, kc.homology_dim(l, *d))).sum();
    Ok(HerzogReport { l, cycles, rank, homology_dim, unknowns })
}

/// The Koszul complex of `R = S/I` on the variables, the one Jacobian cycles live in.
pub fn koszul_on_variables<F: Field>(module: &GradedModule<F>) -> Result<KoszulComplex<F>> {
    KoszulComplex::new(module, module.algebra().variable_generators()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quotient_algebra;
    use crate::field::Rationals;
    use crate::poly::{HomogeneousIdeal, PolyRing};

    fn quotient(names: &[&str], gens: &[&str], cap: usize) -> Arc<GradedAlgebra<Rationals>> {
        let r = PolyRing::standard(Rationals, names).unwrap();
        quotient_algebra(&HomogeneousIdeal::parse(&r, gens).unwrap(), cap).unwrap()
    }

    #[test]
    fn koszul_polynomials() {
        let cases: &[(&[&str], &[&str], Vec<i64>)] = &[
            (&["x"], &["x^3"], vec![1, 1]),
            (&["x", "y"], &["x^2", "x*y", "y^2"], vec![1, 3, 2]),
            (&["x", "y"], &["x^2", "y^2"], vec![1, 2, 1]),
            (&["x", "y"], &["x^3", "x^2*y", "x*y^2", "y^3"], vec![1, 4, 3]),
        ];
        for (names, gens, kappa) in cases {
            let a = quotient(names, gens, 6);
            let k = KoszulComplex::of_algebra(&a).unwrap();
            k.check_d_squared().unwrap();
            assert_eq!(&k.koszul_polynomial(), kappa, "{gens:?}");
            let kk = KoszulComplex::on_min_gens(&GradedModule::residue_field(&a)).unwrap();
            let n = names.len();
            let binom: Vec<i64> =
                (0..=n).map(|i| (0..i).fold(1, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)).collect();
            assert_eq!(kk.koszul_polynomial(), binom);
            let cc = cross_check_kappa(&GradedModule::regular(&a)).unwrap();
            assert!(cc.agree && cc.minimal_presentation, "{cc:?}");
        }
    }

    #[test]
    fn subsets_in_lex_order() {
        assert_eq!(subsets_of_size(3, 2), vec![0b011, 0b101, 0b110]);
        assert!(!wedge_sign(0b001, 0b010));
        assert!(wedge_sign(0b010, 0b001));
    }

    #[test]
    fn products_in_complete_intersection() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 6);
        let k = KoszulComplex::of_algebra(&a).unwrap();
        let h1: Vec<Chain<Rationals>> = (0..=k.top_degree())
            .flat_map(|d| k.representatives(1, d).iter().map(move |v| (d, v.clone())))
            .map(|(d, v)| Chain { l: 1, d, v })
            .collect();
        assert_eq!(h1.len(), 2);
        let p = homology_product(&k, &h1[0], &k, &h1[1]).unwrap();
        assert!(p.v.iter().any(|c| !Rationals.is_zero(c)));
        let one = Chain { l: 0, d: 0, v: vec![Rationals.one()] };
        let same = homology_product(&k, &one, &k, &h1[0]).unwrap();
        assert_eq!(k.class_coords(1, h1[0].d, &h1[0].v).unwrap(), same.v);
        match massey_product(&k, &k, &[h1[0].clone(), h1[1].clone()]).unwrap() {
            MasseyResult::NonVanishing(w) => {
                assert!(verify_massey_witness(&k, &k, &[h1[0].clone(), h1[1].clone()], &w).unwrap())
            }
            other => panic!("expected a nonvanishing product, got {}", other.kind()),
        }
    }

    #[test]
    fn golod_ring_products_vanish() {
        let a = quotient(&["x", "y"], &["x^3", "x^2*y", "x*y^2", "y^3"], 8);
        let k = KoszulComplex::of_algebra(&a).unwrap();
        let classes: Vec<Chain<Rationals>> = k
            .basis_classes()
            .into_iter()
            .filter(|(l, _, _)| *l >= 1)
            .map(|(l, d, i)| Chain { l, d, v: k.representatives(l, d)[i].clone() })
            .collect();
        for x in &classes {
            for y in &classes {
                let p = homology_product(&k, x, &k, y).unwrap();
                assert!(p.v.iter().all(|c| Rationals.is_zero(c)));
                for z in &classes {
                    let r = massey_product(&k, &k, &[x.clone(), y.clone(), z.clone()]).unwrap();
                    assert!(matches!(r, MasseyResult::Vanishes), "{}", r.kind());
                }
            }
        }
    }

    #[test]
    fn jacobian_cycles_first_degree() {
        for (names, gens) in [(&["x"][..], &["x^3"][..]), (&["x", "y"][..], &["x^2", "y^2"][..])] {
            let a = quotient(names, gens, 6);
            let h = herzog_cycles(&a, 1).unwrap();
            assert!(h.spans());
            assert_eq!(h.rank, gens.len());
        }
    }

    #[test]
    fn jacobian_cycles_higher_degree() {
        let a = quotient(&["x", "y"], &["x^3", "x^2*y", "x*y^2", "y^3"], 8);
        let h = herzog_cycles(&a, 2).unwrap();
        assert_eq!(h.homology_dim, 3);
        assert!(h.spans(), "rank {} of {}", h.rank, h.homology_dim);
    }

    #[test]
    fn homology_ignores_generator_order() {
        let a = quotient(&["x", "y", "z"], &["x^2", "y^2", "y*z", "z^3"], 8);
        let m = GradedModule::regular(&a);
        let mut gens = a.min_gens().gens;
        let k1 = KoszulComplex::new(&m, gens.clone()).unwrap();
        gens.reverse();
        let k2 = KoszulComplex::new(&m, gens).unwrap();
        assert_eq!(k1.homology_dims(), k2.homology_dims());
    }

    #[test]
    fn non_artinian_ring() {
        let r = PolyRing::standard(Rationals, &["x", "y", "z"]).unwrap();
        let a = quotient_algebra(&HomogeneousIdeal::parse(&r, &["x*y", "x*z"]).unwrap(), 6).unwrap();
        assert!(!a.is_finite());
        assert_eq!(koszul_homology_bound(&a), Some(3));
        let k = KoszulComplex::of_algebra(&a).unwrap();
        // Tor^S(S/(xy, xz), k): 1, 2 (degree 2), 1 (degree 3)
        assert_eq!(k.koszul_polynomial(), vec![1, 2, 1]);
        let small = quotient_algebra(&HomogeneousIdeal::parse(&r, &["x*y", "x*z"]).unwrap(), 2).unwrap();
        assert!(matches!(KoszulComplex::of_algebra(&small), Err(Error::CapTooSmall(_))));
    }
}

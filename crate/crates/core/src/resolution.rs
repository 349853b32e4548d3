//! Truncated minimal graded free resolutions, computed one degree at a time,
//! with Betti tables, Poincaré and Hilbert series and comparison maps on Tor.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraMap, GradedAlgebra, GradedModule, GradedSpace};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg;

/// Free module `⊕_k A(-g_k)` with generators in the order they were added.
#[derive(Clone, Debug)]
pub struct FreeModule<F: Field> {
    algebra: Arc<GradedAlgebra<F>>,
    gens: Vec<usize>,
}

impl<F: Field> FreeModule<F> {
    pub fn new(algebra: &Arc<GradedAlgebra<F>>, gens: Vec<usize>) -> Self {
        FreeModule { algebra: algebra.clone(), gens }
    }

    pub fn generator_degrees(&self) -> &[usize] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// `(generator, offset)` for each block present in degree `d`.
    pub fn blocks(&self, d: usize) -> Vec<(usize, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for (k, g) in self.gens.iter().enumerate() {
            if *g <= d {
                out.push((k, off));
                off += self.algebra.dim(d - g);
            }
        }
        out
    }

    /// The basis vector of generator `k` in its own degree.
    pub fn generator(&self, k: usize) -> Vec<F::Elem> {
        let g = self.gens[k];
        let f = self.algebra.field();
        let mut v = vec![f.zero(); GradedSpace::dim(self, g)];
        let (_, off) = self.blocks(g).into_iter().find(|(j, _)| *j == k).expect("generator block");
        v[off] = f.one();
        v
    }

    /// Coefficients on the generators of degree exactly `d`, i.e. the image in `F ⊗ k`.
    pub fn generator_coords(&self, d: usize, v: &[F::Elem]) -> Vec<(usize, F::Elem)> {
        self.blocks(d).into_iter().filter(|(k, _)| self.gens[*k] == d).map(|(k, off)| (k, v[off].clone())).collect()
    }
}

impl<F: Field> GradedSpace<F> for FreeModule<F> {
    fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        &self.algebra
    }

    fn dim(&self, d: usize) -> usize {
        self.gens.iter().filter(|g| **g <= d).map(|g| self.algebra.dim(d - g)).sum()
    }

    fn act_basis(&self, e: usize, i: usize, d: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let a = &self.algebra;
        let f = a.field();
        let dst: BTreeMap<usize, usize> = self.blocks(d + e).into_iter().collect();
        let mut out = vec![f.zero(); GradedSpace::dim(self, d + e)];
        for (k, off) in self.blocks(d) {
            let off2 = dst[&k];
            let dg = d - self.gens[k];
            if dg + e > a.d_cap() {
                continue;
            }
            for j in 0..a.dim(dg) {
                let c = &v[off + j];
                if f.is_zero(c) {
                    continue;
                }
                for (t, x) in a.basis_product(e, i, dg, j) {
                    let p = f.mul(c, x);
                    f.add_assign(&mut out[off2 + t], &p);
                }
            }
        }
        out
    }
}

/// One homological step `F_i -> F_{i-1}` (or `F_0 -> M`).
#[derive(Clone, Debug)]
pub struct Step<F: Field> {
    pub free: FreeModule<F>,
    /// Image of generator `k`, a vector in the previous space in degree `gens[k]`.
    pub images: Vec<Vec<F::Elem>>,
    /// Whether every generator of this step lies inside the degree window.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ResolutionOptions {
    /// Known upper bound for the internal degree of every generator of every
    /// step; steps are complete once the cap reaches it.
    pub degree_bound: Option<usize>,
    /// Worker threads for the per-degree kernel computations.
    pub jobs: usize,
}

/// Minimal free resolution of a module, truncated at `max_h` steps and the
/// algebra's degree cap.
#[derive(Clone, Debug)]
pub struct Resolution<F: Field> {
    algebra: Arc<GradedAlgebra<F>>,
    module: GradedModule<F>,
    steps: Vec<Step<F>>,
    /// Set when a step came out empty inside a complete window, i.e. the
    /// resolution provably stops there.
    terminated: bool,
}

/// Rows of the map `F -> T` in degree `d`: one per basis element of `F_d`.
fn map_rows<F: Field, T: GradedSpace<F>>(
    free: &FreeModule<F>,
    images: &[Vec<F::Elem>],
    target: &T,
    d: usize,
) -> Vec<Vec<F::Elem>> {
    let a = free.algebra.clone();
    let mut rows = Vec::new();
    for (k, _) in free.blocks(d) {
        let g = free.gens[k];
        for j in 0..a.dim(d - g) {
            rows.push(target.act_basis(d - g, j, g, &images[k]));
        }
    }
    rows
}

fn kernels<F: Field, T: GradedSpace<F> + Sync>(
    free: &FreeModule<F>,
    images: &[Vec<F::Elem>],
    target: &T,
    cap: usize,
    jobs: usize,
) -> Vec<Vec<Vec<F::Elem>>> {
    let f = free.algebra.field().clone();
    let one = |d: usize| {
        let rows = map_rows(free, images, target, d);
        linalg::left_kernel(&f, &rows, target.dim(d))
    };
    if jobs <= 1 {
        return (0..=cap).map(one).collect();
    }
    let mut out: Vec<Vec<Vec<F::Elem>>> = vec![Vec::new(); cap + 1];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let one = &one;
                s.spawn(move || (w..=cap).step_by(jobs).map(|d| (d, one(d))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (d, k) in h.join().expect("kernel worker panicked") {
                out[d] = k;
            }
        }
    });
    out
}

/// Minimal generators of the submodule whose degree-`d` piece is `sub[d]`.
fn cover<F: Field, T: GradedSpace<F>>(
    target: &T,
    sub: &[Vec<Vec<F::Elem>>],
    algebra_gens: &[(usize, Vec<F::Elem>)],
) -> (Vec<usize>, Vec<Vec<F::Elem>>) {
    let f = target.algebra().field().clone();
    let mut degs = Vec::new();
    let mut vecs = Vec::new();
    for d in 0..sub.len() {
        if sub[d].is_empty() {
            continue;
        }
        let mut span = Vec::new();
        for (g, x) in algebra_gens {
            if *g > d {
                continue;
            }
            for v in &sub[d - g] {
                span.push(target.act(*g, x, d - g, v));
            }
        }
        for i in linalg::greedy_complement(&f, target.dim(d), &span, &sub[d]) {
            degs.push(d);
            vecs.push(sub[d][i].clone());
        }
    }
    (degs, vecs)
}

impl<F: Field> Resolution<F> {
    /// Resolves `module` over its algebra through homological degree `max_h`.
    pub fn compute(module: &GradedModule<F>, max_h: usize, opts: ResolutionOptions) -> Result<Self> {
        let algebra = module.algebra().clone();
        let cap = algebra.d_cap();
        let f = algebra.field().clone();
        let agens = algebra.min_gens().gens;
        let jobs = opts.jobs.max(1);
        let bound_ok = opts.degree_bound.is_some_and(|b| b <= cap);

        let whole: Vec<Vec<Vec<F::Elem>>> = (0..=cap)
            .map(|d| (0..module.dim(d)).map(|i| linalg::unit_vector(&f, module.dim(d), i)).collect())
            .collect();
        let (degs, images) = cover(module, &whole, &agens);
        let free = FreeModule::new(&algebra, degs);
        let mut complete = module.is_finite() || bound_ok;
        let mut steps = vec![Step { free, images, complete }];
        let mut kernel = kernels(&steps[0].free, &steps[0].images, module, cap, jobs);
        let mut terminated = false;

        for _ in 1..=max_h {
            let prev = steps.last().unwrap();
            let target = &prev.free;
            let (degs, images) = cover(target, &kernel, &agens);
            let maxgen = target.gens.iter().copied().max();
            complete = complete
                && (bound_ok
                    || match (algebra.top_degree(), maxgen) {
                        (_, None) => true,
                        (Some(top), Some(m)) => m + top <= cap,
                        (None, Some(_)) => false,
                    });
            let free = FreeModule::new(&algebra, degs);
            let next_kernel = kernels(&free, &images, target, cap, jobs);
            let empty = free.rank() == 0;
            steps.push(Step { free, images, complete });
            kernel = next_kernel;
            if empty && complete {
                terminated = true;
                break;
            }
        }
        Ok(Resolution { algebra, module: module.clone(), steps, terminated })
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        &self.algebra
    }

    pub fn module(&self) -> &GradedModule<F> {
        &self.module
    }

    pub fn steps(&self) -> &[Step<F>] {
        &self.steps
    }

    /// Whether a zero step was reached inside a complete window.
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Length of the resolution if it terminated.
    pub fn length(&self) -> Option<usize> {
        self.terminated.then(|| self.steps.len() - 2)
    }

    /// Matrix of `d_i` in internal degree `d`, rows indexed by the basis of `F_i`.
    pub fn differential(&self, i: usize, d: usize) -> Vec<Vec<F::Elem>> {
        let s = &self.steps[i];
        if i == 0 {
            map_rows(&s.free, &s.images, &self.module, d)
        } else {
            map_rows(&s.free, &s.images, &self.steps[i - 1].free, d)
        }
    }

    pub fn betti(&self) -> BettiTable {
        let mut rows = Vec::new();
        let mut complete = Vec::new();
        for s in &self.steps {
            let mut row = BTreeMap::new();
            for g in &s.free.gens {
                *row.entry(*g).or_insert(0u64) += 1;
            }
            rows.push(row);
            complete.push(s.complete);
        }
        BettiTable { rows, complete }
    }

    /// Every differential has entries in the maximal ideal.
    pub fn check_minimal(&self) -> Result<()> {
        let f = self.algebra.field();
        for (i, s) in self.steps.iter().enumerate().skip(1) {
            let prev = &self.steps[i - 1].free;
            for (k, img) in s.images.iter().enumerate() {
                let d = s.free.gens[k];
                if prev.generator_coords(d, img).iter().any(|(_, c)| !f.is_zero(c)) {
                    return Err(Error::Internal(format!("step {i} generator {k} maps outside m F_{}", i - 1)));
                }
            }
        }
        Ok(())
    }

    /// Exactness on every stored degree: `rank d_{i+1} + rank d_i = dim F_i`
    /// for `i >= 1`, `d_0` surjective, and `d_i d_{i+1} = 0`.
    pub fn check_exact(&self) -> Result<()> {
        let f = self.algebra.field();
        let cap = self.algebra.d_cap();
        for d in 0..=cap {
            let r0 = linalg::rank(f, &self.differential(0, d), self.module.dim(d));
            if r0 != self.module.dim(d) {
                return Err(Error::Internal(format!("d_0 not surjective in degree {d}")));
            }
            for i in 1..self.steps.len() {
                let fi = &self.steps[i - 1].free;
                let dim = GradedSpace::dim(fi, d);
                let ri = linalg::rank(f, &self.differential(i, d), dim);
                let lower_dim = if i == 1 { self.module.dim(d) } else { GradedSpace::dim(&self.steps[i - 2].free, d) };
                let r_prev = linalg::rank(f, &self.differential(i - 1, d), lower_dim);
                if ri + r_prev != dim {
                    return Err(Error::Internal(format!("not exact at step {} in degree {d}", i - 1)));
                }
                for row in self.differential(i, d) {
                    let back = linalg::apply(f, &self.differential(i - 1, d), lower_dim, &row);
                    if !linalg::is_zero_vec(f, &back) {
                        return Err(Error::Internal(format!("d_{} d_{i} != 0 in degree {d}", i - 1)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn poincare_series(&self) -> TruncatedSeries {
        self.betti().poincare_series()
    }
}

/// `β_{i,j}` with per-step completeness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    /// `rows[i][j] = β_{i,j}`; zero entries omitted.
    pub rows: Vec<BTreeMap<usize, u64>>,
    pub complete: Vec<bool>,
}

impl BettiTable {
    pub fn total(&self, i: usize) -> u64 {
        self.rows[i].values().sum()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.rows.get(i).and_then(|r| r.get(&j)).copied().unwrap_or(0)
    }

    pub fn poincare_series(&self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: (0..self.rows.len()).map(|i| self.total(i) as i64).collect(),
            complete: self.complete.clone(),
        }
    }
}

impl fmt::Display for BettiTable {
    /// Grid with rows `j - i` and columns `i`, in the usual layout.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let maxrow = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.keys().map(move |j| j.saturating_sub(i)))
            .max()
            .unwrap_or(0);
        let cols = self.rows.len();
        let cell = |i: usize, s: usize| -> String {
            match self.get(i, i + s) {
                0 => "-".into(),
                n => n.to_string(),
            }
        };
        let width = (0..cols)
            .flat_map(|i| (0..=maxrow).map(move |s| (i, s)))
            .map(|(i, s)| cell(i, s).len())
            .chain((0..cols).map(|i| i.to_string().len() + 1))
            .max()
            .unwrap_or(1);
        write!(out, "    ")?;
        for i in 0..cols {
            let mark = if self.complete[i] { "" } else { "*" };
            write!(out, " {:>width$}", format!("{i}{mark}"))?;
        }
        writeln!(out)?;
        for s in 0..=maxrow {
            write!(out, "{s:>3}:")?;
            for i in 0..cols {
                write!(out, " {:>width$}", cell(i, s))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Integer power series known through `t^(len-1)`, with a flag saying which
/// coefficients are exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub coeffs: Vec<i64>,
    pub complete: Vec<bool>,
}

impl TruncatedSeries {
    pub fn exact(coeffs: Vec<i64>) -> Self {
        let n = coeffs.len();
        TruncatedSeries { coeffs, complete: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of leading coefficients that are all exact.
    pub fn complete_prefix(&self) -> usize {
        self.complete.iter().take_while(|c| **c).count()
    }

    pub fn all_complete(&self) -> bool {
        self.complete.iter().all(|c| *c)
    }

    pub fn truncate(&self, n: usize) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().take(n).copied().collect(),
            complete: self.complete.iter().take(n).copied().collect(),
        }
    }

    /// `1 + 2t + 4t^2 [complete through t^2]`.
    pub fn display(&self, name: &str) -> String {
        let body = format_series(&self.coeffs);
        let k = self.complete_prefix();
        let tail = if k == 0 {
            " [no coefficient complete]".to_string()
        } else if k == self.len() {
            format!(" [complete through t^{}]", k - 1)
        } else {
            format!(" [complete through t^{}; later terms are lower bounds]", k - 1)
        };
        format!("{name}(t) = {body} + …{tail}")
    }
}

/// `1 + 2t - t^3` style rendering of integer coefficients.
pub fn format_series(coeffs: &[i64]) -> String {
    let mut s = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{i}"),
        };
        let mag = c.unsigned_abs();
        let body = if mag == 1 && i > 0 { mono } else { format!("{mag}{mono}") };
        if s.is_empty() {
            if *c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if *c < 0 { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// Hilbert series of a module through its stored window.
pub fn hilbert_series<F: Field>(m: &GradedModule<F>) -> TruncatedSeries {
    let coeffs = m.dims().iter().map(|d| *d as i64).collect();
    let n = m.dims().len();
    TruncatedSeries { coeffs, complete: vec![true; n] }
}

/// A degree bound valid for every Betti number of a finite-length module
/// over a (truncated) polynomial ring: `top(M) + Σ weights`.
pub fn polynomial_degree_bound<F: Field>(weights: &[u32], module: &GradedModule<F>) -> Option<usize> {
    module.top_degree().map(|t| t + weights.iter().map(|w| *w as usize).sum::<usize>())
}

/// Resolution of a finite-length module over the polynomial ring it is
/// presented over. The algebra must be a polynomial ring (the zero ideal),
/// and its cap must reach `top(M) + Σ weights`.
pub fn resolution_over_poly_ring<F: Field>(module: &GradedModule<F>) -> Result<Resolution<F>> {
    let s = module.algebra();
    let q = s.quotient_data().ok_or_else(|| Error::Construction("module is not over a polynomial ring".into()))?;
    if !q.ideal().groebner().polys().is_empty() {
        return Err(Error::Construction("module is not over a polynomial ring".into()));
    }
    let bound = polynomial_degree_bound(q.ring().weights(), module)
        .ok_or_else(|| Error::Construction("module over the polynomial ring must have finite length".into()))?;
    if bound > s.d_cap() {
        return Err(Error::CapTooSmall(format!(
            "polynomial-ring resolution needs degree cap {bound}, have {}",
            s.d_cap()
        )));
    }
    let n = q.ring().nvars();
    let r = Resolution::compute(module, n + 1, ResolutionOptions { degree_bound: Some(bound), jobs: 1 })?;
    if !r.terminated() {
        return Err(Error::Internal("polynomial-ring resolution did not terminate".into()));
    }
    Ok(r)
}

/// Pivoting rule for the comparison-map lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftRule {
    /// The solution returned by elimination.
    Plain,
    /// That solution plus the sum of a kernel basis; a different chain map.
    Perturbed,
}

/// Matrices of `Tor^A_i(k,k) -> Tor^B_i(k,k)`, rows indexed by generators of
/// the source resolution, columns by generators of the target one.
#[derive(Clone, Debug)]
pub struct TorComparison<F: Field> {
    pub matrices: Vec<Vec<Vec<F::Elem>>>,
    pub source_ranks: Vec<usize>,
    pub target_ranks: Vec<usize>,
    pub complete: Vec<bool>,
}

impl<F: Field> TorComparison<F> {
    pub fn rank(&self, f: &F, i: usize) -> usize {
        linalg::rank(f, &self.matrices[i], self.target_ranks[i])
    }
}

/// Lifts the identity of `k` to a chain map between minimal resolutions of
/// `k` over the source and the target of `map`, then reduces modulo `m`.
pub fn tor_comparison<F: Field>(map: &AlgebraMap<F>, max_h: usize, rule: LiftRule) -> Result<TorComparison<F>> {
    let a = map.source();
    let b = map.target();
    let f = a.field().clone();
    if !map.is_surjective() {
        return Err(Error::Construction("comparison maps need a surjection".into()));
    }
    let cap = a.d_cap().min(b.d_cap());
    let ra = Resolution::compute(&GradedModule::residue_field(a), max_h, ResolutionOptions::default())?;
    let rb = Resolution::compute(&GradedModule::residue_field(b), max_h, ResolutionOptions::default())?;
    let steps = ra.steps().len().min(rb.steps().len());
    // phi[i][k]: image of generator k of F_i, a vector in G_i of the same degree
    let mut phi: Vec<Vec<Vec<F::Elem>>> = Vec::new();
    let mut matrices = Vec::new();
    let mut complete = Vec::new();
    for i in 0..steps {
        let fs = &ra.steps()[i];
        let gs = &rb.steps()[i];
        let mut images = Vec::new();
        for (k, &delta) in fs.free.gens.iter().enumerate() {
            if delta > cap {
                return Err(Error::BeyondCap { requested: delta, cap });
            }
            let target: Vec<F::Elem> = if i == 0 {
                // lift of 1 ∈ k
                vec![f.one()]
            } else {
                let fprev = &ra.steps()[i - 1].free;
                let gprev = &rb.steps()[i - 1].free;
                let mut acc = vec![f.zero(); GradedSpace::dim(gprev, delta)];
                let dz = &fs.images[k];
                for (kk, off) in fprev.blocks(delta) {
                    let e = delta - fprev.gens[kk];
                    let block = &dz[off..off + a.dim(e)];
                    if linalg::is_zero_vec(&f, block) {
                        continue;
                    }
                    let fb = map.apply(e, block);
                    let w = gprev.act(e, &fb, fprev.gens[kk], &phi[i - 1][kk]);
                    linalg::add_scaled(&f, &mut acc, &f.one(), &w);
                }
                acc
            };
            let rows = if i == 0 {
                rb.differential(0, delta)
            } else {
                map_rows(&gs.free, &gs.images, &rb.steps()[i - 1].free, delta)
            };
            let width = target.len();
            let mut sol = linalg::solve(&f, &rows, width, &target)
                .ok_or_else(|| Error::Internal(format!("comparison lift fails at step {i}, degree {delta}")))?;
            if rule == LiftRule::Perturbed {
                for kv in linalg::left_kernel(&f, &rows, width) {
                    linalg::add_scaled(&f, &mut sol, &f.one(), &kv);
                }
            }
            images.push(sol);
        }
        let mut mat = Vec::new();
        for (k, v) in images.iter().enumerate() {
            let mut row = vec![f.zero(); gs.free.rank()];
            for (kk, c) in gs.free.generator_coords(fs.free.gens[k], v) {
                row[kk] = c;
            }
            mat.push(row);
        }
        matrices.push(mat);
        complete.push(fs.complete && gs.complete);
        phi.push(images);
    }
    Ok(TorComparison {
        source_ranks: (0..steps).map(|i| ra.steps()[i].free.rank()).collect(),
        target_ranks: (0..steps).map(|i| rb.steps()[i].free.rank()).collect(),
        matrices,
        complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Largeness {
    SurjectiveUpTo {
        h: usize,
    },
    FailsAt {
        i: usize,
        rank: usize,
        target: usize,
    },
    /// Surjective on the complete steps only.
    Inconclusive {
        complete_through: Option<usize>,
    },
}

pub fn largeness_test<F: Field>(map: &AlgebraMap<F>, max_h: usize) -> Result<Largeness> {
    let cmp = tor_comparison(map, max_h, LiftRule::Plain)?;
    let f = map.source().field();
    let mut last_complete = None;
    for i in 0..cmp.matrices.len() {
        let r = cmp.rank(f, i);
        if cmp.complete[i] {
            if r < cmp.target_ranks[i] {
                return Ok(Largeness::FailsAt { i, rank: r, target: cmp.target_ranks[i] });
            }
            last_complete = Some(i);
        }
    }
    if cmp.complete.iter().all(|c| *c) && cmp.matrices.len() == max_h + 1 {
        Ok(Largeness::SurjectiveUpTo { h: max_h })
    } else {
        Ok(Largeness::Inconclusive { complete_through: last_complete })
    }
}

/// Default degree cap for a resolution through `max_h` steps:
/// `max_h * maxgen(m) + maxgen(M) + 2`, raised so that every step stays
/// complete over a finite algebra.
pub fn default_cap(
    max_h: usize,
    maxgen_m: usize,
    maxgen_module: usize,
    top_algebra: Option<usize>,
    top_module: Option<usize>,
) -> usize {
    let base = max_h * maxgen_m + maxgen_module + 2;
    let over_finite = top_algebra.map(|t| maxgen_module + max_h * t).unwrap_or(0);
    base.max(over_finite).max(top_module.unwrap_or(0)).max(2 * maxgen_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{polynomial_algebra, quotient_algebra};
    use crate::field::Rationals;
    use crate::poly::{HomogeneousIdeal, PolyRing};

    fn quotient(names: &[&str], gens: &[&str], cap: usize) -> Arc<GradedAlgebra<Rationals>> {
        let r = PolyRing::standard(Rationals, names).unwrap();
        quotient_algebra(&HomogeneousIdeal::parse(&r, gens).unwrap(), cap).unwrap()
    }

    fn p_of_k(a: &Arc<GradedAlgebra<Rationals>>, h: usize) -> TruncatedSeries {
        let r = Resolution::compute(&GradedModule::residue_field(a), h, ResolutionOptions::default()).unwrap();
        r.check_minimal().unwrap();
        r.check_exact().unwrap();
        r.poincare_series()
    }

    #[test]
    fn hypersurface_is_periodic() {
        let a = quotient(&["x"], &["x^3"], 12);
        let p = p_of_k(&a, 5);
        assert_eq!(p.coeffs, vec![1; 6]);
        assert!(p.all_complete());
    }

    #[test]
    fn square_of_max_ideal_doubles() {
        let a = quotient(&["x", "y"], &["x^2", "x*y", "y^2"], 8);
        let p = p_of_k(&a, 5);
        assert_eq!(p.coeffs, vec![1, 2, 4, 8, 16, 32]);
        assert!(p.all_complete());
    }

    #[test]
    fn complete_intersection() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 10);
        assert_eq!(p_of_k(&a, 4).coeffs, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn free_module_has_no_syzygies() {
        let a = quotient(&["x"], &["x^3"], 6);
        let r = Resolution::compute(&GradedModule::regular(&a), 3, ResolutionOptions::default()).unwrap();
        assert_eq!(r.poincare_series().coeffs, vec![1, 0]);
        assert!(r.terminated());
    }

    #[test]
    fn ideal_of_hypersurface() {
        let a = quotient(&["x"], &["x^3"], 10);
        let i = GradedModule::ideal_as_module(&a, &[(1, vec![Rationals.one()])]).unwrap();
        let r = Resolution::compute(&i, 4, ResolutionOptions::default()).unwrap();
        assert_eq!(r.poincare_series().coeffs, vec![1; 5]);
    }

    #[test]
    fn over_polynomial_rings() {
        let cases: &[(&[&str], &[&str], Vec<i64>)] = &[
            (&["x", "y"], &["x^2", "x*y", "y^2"], vec![1, 3, 2]),
            (&["x"], &["x^3"], vec![1, 1]),
            (&["x", "y"], &["x^2", "y^2"], vec![1, 2, 1]),
        ];
        for (names, gens, betti) in cases {
            let ring = PolyRing::standard(Rationals, names).unwrap();
            let ideal = HomogeneousIdeal::parse(&ring, gens).unwrap();
            let r = quotient_algebra(&ideal, 8).unwrap();
            let s = polynomial_algebra(&ring, 8).unwrap();
            let pi = AlgebraMap::between_quotients(&s, &r).unwrap();
            let m = GradedModule::restrict_along(&pi, &GradedModule::regular(&r)).unwrap();
            let res = resolution_over_poly_ring(&m).unwrap();
            let p = res.poincare_series();
            assert_eq!(&p.coeffs[..betti.len()], &betti[..]);
            assert_eq!(p.coeffs[betti.len()], 0);
            res.check_minimal().unwrap();
            res.check_exact().unwrap();
        }
    }

    #[test]
    fn identity_comparison_is_identity() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 8);
        let id = AlgebraMap::identity(&a);
        let c = tor_comparison(&id, 3, LiftRule::Plain).unwrap();
        for (i, m) in c.matrices.iter().enumerate() {
            for (r, row) in m.iter().enumerate() {
                assert_eq!(row, &linalg::unit_vector(&Rationals, c.target_ranks[i], r));
            }
        }
    }

    #[test]
    fn retract_section_is_large() {
        let r = quotient(&["x"], &["x^3"], 10);
        let k1 = GradedModule::residue_field(&r).shifted(1).unwrap();
        let t = crate::algebra::trivial_extension(&r, &k1).unwrap();
        let l = largeness_test(&t.sections[0], 4).unwrap();
        assert_eq!(l, Largeness::SurjectiveUpTo { h: 4 });
        let plain = tor_comparison(&t.sections[0], 4, LiftRule::Plain).unwrap();
        let other = tor_comparison(&t.sections[0], 4, LiftRule::Perturbed).unwrap();
        assert_eq!(plain.matrices, other.matrices);
    }

    #[test]
    fn betti_display_and_series_text() {
        let a = quotient(&["x", "y"], &["x^2", "y^2"], 8);
        let r = Resolution::compute(&GradedModule::residue_field(&a), 2, ResolutionOptions::default()).unwrap();
        let text = r.betti().to_string();
        assert!(text.contains("0:"));
        let s = TruncatedSeries::exact(vec![1, 2, 4, 0, 16]);
        assert_eq!(s.display("P"), "P(t) = 1 + 2t + 4t^2 + 16t^4 + … [complete through t^4]");
        assert_eq!(format_series(&[0, -1, 1]), "-t + t^2");
    }

    #[test]
    fn parallel_kernels_match_serial() {
        let a = quotient(&["x", "y"], &["x^2", "x*y^2", "y^3"], 10);
        let k = GradedModule::residue_field(&a);
        let s = Resolution::compute(&k, 4, ResolutionOptions::default()).unwrap();
        let p = Resolution::compute(&k, 4, ResolutionOptions { jobs: 3, ..Default::default() }).unwrap();
        assert_eq!(s.betti(), p.betti());
    }
}

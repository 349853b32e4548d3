//! Builds the algebra objects a spec describes and runs one command on them.

use std::sync::Arc;
use std::time::Instant;

use golodlab::algebra::{
    augmentation, fibre_product, iterated_fibre, quotient_algebra, residue_algebra, trivial_extension, AlgebraMap,
    GradedAlgebra, GradedModule, Retract,
};
use golodlab::golod::{
    betti_through, golod_module_test, herzog_huneke_certify, massey_sweep, poincare_through, product_witness, reverify,
    Certification, GolodAnalysis, GolodOptions, GolodVerdict, MasseyMode, Refutation,
};
use golodlab::koszul::{cross_check_kappa, KoszulComplex};
use golodlab::resolution::{default_cap, hilbert_series, largeness_test, Resolution, ResolutionOptions};
use golodlab::theorems::{self, Outcome, TheoremReport};
use golodlab::{
    parse_poly, Degree, Error, Field, FieldSpec, HomogeneousIdeal, Monomial, Poly, PolyRing, PrimeField, Rationals,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{Completeness, Report, SeriesBlock};
use crate::spec::{Construction, ModuleBlock, ProblemSpec, RingBlock};

/// Largest degree cap a run may request.
pub const MAX_D_CAP: usize = 200;
pub const DEFAULT_H_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Betti,
    Series,
    GolodRing,
    GolodModule,
    CertifyHuneke,
    Massey,
    Construct,
    VerifyTheorem,
    Largeness,
    /// Whatever the spec's own `command` field names.
    Run,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Betti => "betti",
            Command::Series => "series",
            Command::GolodRing => "golod-ring",
            Command::GolodModule => "golod-module",
            Command::CertifyHuneke => "certify-huneke",
            Command::Massey => "massey",
            Command::Construct => "construct",
            Command::VerifyTheorem => "verify-theorem",
            Command::Largeness => "largeness",
            Command::Run => "run",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        use clap::ValueEnum;
        Command::value_variants().iter().copied().find(|c| c.name() == s && *c != Command::Run)
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_h: Option<usize>,
    pub max_d: Option<usize>,
    pub field: Option<String>,
    pub jobs: usize,
    /// Cleared by `--no-certify`; the spec's own flag must also be set.
    pub certify: bool,
    /// Record `elapsed_ms`. Off for byte-identical reruns.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_h: None, max_d: None, field: None, jobs: 1, certify: true, timing: true }
    }
}

pub fn parse_field(s: &str) -> Result<FieldSpec, CliError> {
    if s == "q" {
        return Ok(FieldSpec::Rationals);
    }
    let p = s
        .strip_prefix("p:")
        .and_then(|p| p.parse::<u32>().ok())
        .ok_or_else(|| CliError::Schema(format!("field: expected \"q\" or \"p:PRIME\", got {s:?}")))?;
    if p >= 1 << 31 {
        return Err(CliError::Schema(format!("field: primes must lie below 2^31, got {p}")));
    }
    PrimeField::new(p).map_err(|e| CliError::Schema(format!("field: {e}")))?;
    Ok(FieldSpec::Prime(p))
}

pub fn run(command: Command, spec: &ProblemSpec, opts: &RunOptions) -> Result<Report, CliError> {
    spec.validate()?;
    let command = match command {
        Command::Run => {
            let name = spec
                .command
                .as_deref()
                .ok_or_else(|| CliError::Schema("command: the spec names no command to run".into()))?;
            Command::from_name(name).ok_or_else(|| CliError::Schema(format!("command: unknown command {name:?}")))?
        }
        c => c,
    };
    let start = Instant::now();
    let field = opts.field.clone().unwrap_or_else(|| spec.field.clone());
    let mut report = match parse_field(&field)? {
        FieldSpec::Rationals => Ctx::new(Rationals, spec, opts)?.run(command)?,
        FieldSpec::Prime(p) => {
            let f = PrimeField::new(p).map_err(|e| CliError::Schema(format!("field: {e}")))?;
            Ctx::new(f, spec, opts)?.run(command)?
        }
    };
    if opts.timing {
        report.meta.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

/// Whether a finished report should make the process exit nonzero.
pub fn report_exit_code(r: &Report) -> i32 {
    if r.command == "verify-theorem" && r.details.get("outcome").and_then(Value::as_str) == Some("violated") {
        4
    } else {
        0
    }
}

type Elems<F> = Vec<(usize, Vec<<F as Field>::Elem>)>;

struct Quotient<F: Field> {
    ring: Arc<PolyRing<F>>,
    ideal: HomogeneousIdeal<F>,
}

impl<F: Field> Quotient<F> {
    fn parse(field: &F, block: &RingBlock, at: &str) -> Result<Self, CliError> {
        let weights = block.weights.clone().unwrap_or_else(|| vec![1; block.variables.len()]);
        let ring = PolyRing::new(field.clone(), block.variables.clone(), weights)
            .map_err(CliError::core(format!("{at}.variables")))?;
        let gens = block
            .ideal
            .iter()
            .enumerate()
            .map(|(i, t)| parse_poly(t, &ring).map_err(CliError::core(format!("{at}.ideal[{i}]"))))
            .collect::<Result<Vec<_>, _>>()?;
        let ideal = HomogeneousIdeal::new(&ring, gens).map_err(CliError::core(format!("{at}.ideal")))?;
        if ideal.is_unit() {
            return Err(CliError::core(format!("{at}.ideal"))(Error::UnitIdeal));
        }
        Ok(Quotient { ring, ideal })
    }

    fn max_weight(&self) -> usize {
        self.ring.weights().iter().copied().max().unwrap_or(1) as usize
    }

    fn top(&self) -> Option<usize> {
        self.ideal.groebner().top_degree().map(|t| t as usize)
    }

    /// Degree above which the Koszul homology of the ring vanishes.
    fn koszul_bound(&self) -> usize {
        let lcm = self
            .ideal
            .groebner()
            .leading_monomials()
            .iter()
            .fold(Monomial::one(self.ring.nvars()), |acc, m| acc.lcm(m));
        lcm.weighted_degree(self.ring.weights()) as usize
    }

    fn algebra(&self, d: usize, at: &str) -> Result<Arc<GradedAlgebra<F>>, CliError> {
        quotient_algebra(&self.ideal, d).map_err(CliError::core(at))
    }

    fn degrees(&self, texts: &[String], at: &str) -> Result<Vec<usize>, CliError> {
        let mut out = Vec::new();
        for (i, t) in texts.iter().enumerate() {
            let p = parse_poly(t, &self.ring).map_err(CliError::core(format!("{at}[{i}]")))?;
            match p.weighted_degree() {
                Degree::Zero => {}
                Degree::Homogeneous(e) => out.push(e as usize),
                Degree::NotHomogeneous => {
                    return Err(CliError::core(format!("{at}[{i}]"))(Error::NotHomogeneous(p.to_string())))
                }
            }
        }
        Ok(out)
    }
}

/// Degrees where a module block is generated: (lowest, highest).
fn module_degrees<F: Field>(q: &Quotient<F>, m: &ModuleBlock, at: &str) -> Result<(usize, usize), CliError> {
    match m {
        ModuleBlock::ResidueField | ModuleBlock::Quotient(_) => Ok((0, 0)),
        ModuleBlock::Ideal(g) => {
            let d = q.degrees(g, &format!("{at}.ideal"))?;
            Ok((d.iter().copied().min().unwrap_or(1), d.iter().copied().max().unwrap_or(1)))
        }
        ModuleBlock::Presentation { degrees, .. } => {
            Ok((degrees.iter().copied().min().unwrap_or(0), degrees.iter().copied().max().unwrap_or(0)))
        }
    }
}

/// Elements of an algebra with a polynomial presentation; zero elements and
/// elements above the top of a finite algebra are dropped.
fn elements<F: Field>(a: &Arc<GradedAlgebra<F>>, texts: &[String], at: &str) -> Result<Elems<F>, CliError> {
    let q = a
        .quotient_data()
        .ok_or_else(|| CliError::Schema(format!("{at}: polynomials need an algebra given by a presentation")))?;
    let mut out = Vec::new();
    for (i, t) in texts.iter().enumerate() {
        let here = format!("{at}[{i}]");
        let p = parse_poly(t, q.ring()).map_err(CliError::core(&here))?;
        if let Some(v) = element(a, &p, &here)? {
            out.push(v);
        }
    }
    Ok(out)
}

fn element<F: Field>(
    a: &Arc<GradedAlgebra<F>>,
    p: &Poly<F>,
    at: &str,
) -> Result<Option<(usize, Vec<F::Elem>)>, CliError> {
    let q = a.quotient_data().expect("checked by the caller");
    match p.weighted_degree() {
        Degree::Zero => Ok(None),
        Degree::NotHomogeneous => Err(CliError::core(at)(Error::NotHomogeneous(p.to_string()))),
        Degree::Homogeneous(e) => {
            let e = e as usize;
            if e > a.d_cap() {
                if a.is_finite() {
                    return Ok(None);
                }
                return Err(CliError::core(at)(Error::CapTooSmall(format!(
                    "{p} has degree {e}, above the degree cap {}",
                    a.d_cap()
                ))));
            }
            Ok(Some((e, q.coords(p, e).map_err(CliError::core(at))?)))
        }
    }
}

fn build_module<F: Field>(a: &Arc<GradedAlgebra<F>>, m: &ModuleBlock, at: &str) -> Result<GradedModule<F>, CliError> {
    match m {
        ModuleBlock::ResidueField => Ok(GradedModule::residue_field(a)),
        ModuleBlock::Ideal(g) => {
            let here = format!("{at}.ideal");
            let gens = elements(a, g, &here)?;
            let m = GradedModule::ideal_as_module(a, &gens).map_err(CliError::core(&here))?;
            if m.is_zero() {
                return Err(CliError::Schema(format!(
                    "{here}: the generators vanish in the ring, so the module is zero"
                )));
            }
            Ok(m)
        }
        ModuleBlock::Quotient(g) => {
            let here = format!("{at}.quotient");
            let gens = elements(a, g, &here)?;
            if gens.iter().any(|(d, _)| *d == 0) {
                return Err(CliError::Schema(format!("{here}: a unit generator makes the module zero")));
            }
            GradedModule::regular(a).quotient_by(&gens).map_err(CliError::core(&here))
        }
        ModuleBlock::Presentation { degrees, relations } => {
            presentation(a, degrees, relations, &format!("{at}.presentation"))
        }
    }
}

/// Cokernel of a matrix of ring elements between graded free modules.
fn presentation<F: Field>(
    a: &Arc<GradedAlgebra<F>>,
    degrees: &[usize],
    relations: &[Vec<String>],
    at: &str,
) -> Result<GradedModule<F>, CliError> {
    let q =
        a.quotient_data().ok_or_else(|| CliError::Schema(format!("{at}: needs an algebra given by a presentation")))?;
    let f = a.field().clone();
    let reg = GradedModule::regular(a);
    let mut free: Option<GradedModule<F>> = None;
    for a_i in degrees {
        let piece = reg.shifted(*a_i).map_err(CliError::core(at))?;
        free = Some(match free {
            None => piece,
            Some(s) => s.direct_sum(&piece).map_err(CliError::core(at))?,
        });
    }
    let free = free.expect("validated: at least one generator");
    let mut gens = Vec::new();
    for (j, row) in relations.iter().enumerate() {
        let mut entries = Vec::new();
        let mut target: Option<usize> = None;
        for (i, t) in row.iter().enumerate() {
            let here = format!("{at}.relations[{j}][{i}]");
            let p = parse_poly(t, q.ring()).map_err(CliError::core(&here))?;
            match p.weighted_degree() {
                Degree::Zero => {}
                Degree::NotHomogeneous => return Err(CliError::core(&here)(Error::NotHomogeneous(p.to_string()))),
                Degree::Homogeneous(e) => {
                    let b = e as usize + degrees[i];
                    if target.is_some_and(|t| t != b) {
                        return Err(CliError::Schema(format!(
                            "{here}: entry lands in degree {b}, but earlier entries of the row land in degree {}",
                            target.unwrap()
                        )));
                    }
                    target = Some(b);
                }
            }
            entries.push(p);
        }
        let Some(b) = target else { continue };
        if b > a.d_cap() {
            // only touches degrees outside the window
            continue;
        }
        let mut v = Vec::with_capacity(free.dim(b));
        for (i, p) in entries.iter().enumerate() {
            if degrees[i] > b {
                continue;
            }
            let e = b - degrees[i];
            if p.is_zero() {
                v.extend(std::iter::repeat_n(f.zero(), a.dim(e)));
            } else {
                v.extend(q.coords(p, e).map_err(CliError::core(format!("{at}.relations[{j}][{i}]")))?);
            }
        }
        gens.push((b, v));
    }
    free.quotient_by(&gens).map_err(CliError::core(at))
}

/// What a construction block produced.
enum Built<F: Field> {
    Retract(Retract<F>),
    /// `R ×_k R_2` with its two projections.
    Product(Arc<GradedAlgebra<F>>, Vec<AlgebraMap<F>>),
    /// `R -> R/J`
    Quotient(AlgebraMap<F>),
}

impl<F: Field> Built<F> {
    fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        match self {
            Built::Retract(r) => &r.algebra,
            Built::Product(a, _) => a,
            Built::Quotient(m) => m.target(),
        }
    }

    fn map(&self, k: usize) -> Result<&AlgebraMap<F>, CliError> {
        let maps: Vec<&AlgebraMap<F>> = match self {
            Built::Retract(r) => r.sections.iter().collect(),
            Built::Product(_, p) => p.iter().collect(),
            Built::Quotient(m) => vec![m],
        };
        maps.get(k).copied().ok_or_else(|| {
            CliError::Schema(format!("theorem.section: {k} is out of range, the construction has {} maps", maps.len()))
        })
    }
}

struct Ctx<'a, F: Field> {
    field: F,
    spec: &'a ProblemSpec,
    opts: &'a RunOptions,
    base: Quotient<F>,
    h: usize,
    d: usize,
    certify: bool,
}

impl<'a, F: Field> Ctx<'a, F> {
    fn new(field: F, spec: &'a ProblemSpec, opts: &'a RunOptions) -> Result<Self, CliError> {
        let base = Quotient::parse(&field, &spec.ring, "ring")?;
        let h = opts.max_h.or(spec.caps.h).unwrap_or(DEFAULT_H_CAP);
        let mut ctx = Ctx { field, spec, opts, base, h, d: 0, certify: opts.certify && spec.certify };
        ctx.d = match opts.max_d.or(spec.caps.d) {
            Some(d) => d,
            None => ctx.default_d()?,
        };
        if ctx.d > MAX_D_CAP {
            return Err(CliError::CapLimit(format!("caps.d: degree cap {} exceeds the limit {MAX_D_CAP}", ctx.d)));
        }
        if ctx.d < ctx.base.max_weight() {
            return Err(CliError::core("caps.d")(Error::CapTooSmall(format!(
                "degree cap {} is below the largest variable weight {}",
                ctx.d,
                ctx.base.max_weight()
            ))));
        }
        Ok(ctx)
    }

    /// Large enough for every resolution the command may run to be complete
    /// over a finite algebra.
    fn default_d(&self) -> Result<usize, CliError> {
        let h = self.h;
        let b = &self.base;
        let (wm, top) = (b.max_weight(), b.top());
        let plus = |t: Option<usize>, s: usize| t.map(|t| t + s);
        let mut caps = vec![default_cap(h, wm, 0, top, top)];
        if top.is_none() {
            caps.push(b.koszul_bound());
        }
        let module_case = |m: &ModuleBlock, at: &str, caps: &mut Vec<usize>| -> Result<(), CliError> {
            let (lo, hi) = module_degrees(b, m, at)?;
            caps.push(default_cap(h, wm, hi, top, plus(top, hi)));
            // as the second half of a trivial extension
            let s = usize::from(lo == 0);
            caps.push(default_cap(h, wm.max(hi + s), 0, plus(top, hi + s), plus(top, hi + s)));
            Ok(())
        };
        if let Some(m) = &self.spec.module {
            module_case(m, "module", &mut caps)?;
        }
        let ideal_case = |g: &[String], at: &str, caps: &mut Vec<usize>| -> Result<(), CliError> {
            let gi = b.degrees(g, at)?.into_iter().max().unwrap_or(1);
            caps.push(default_cap(h, wm.max(gi), 0, top, top));
            caps.push(default_cap(h, wm, gi, top, plus(top, gi)));
            Ok(())
        };
        match &self.spec.construction {
            Some(Construction::TrivialExtension { module }) => module_case(module, "construction.module", &mut caps)?,
            Some(Construction::Fibre { ideal }) | Some(Construction::IteratedFibre { ideal, .. }) => {
                ideal_case(ideal, "construction.ideal", &mut caps)?
            }
            Some(Construction::Quotient { ideal }) => {
                let gens = ideal
                    .iter()
                    .enumerate()
                    .map(|(i, t)| parse_poly(t, &b.ring).map_err(CliError::core(format!("construction.ideal[{i}]"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let j = b.ideal.extended(gens).map_err(CliError::core("construction.ideal"))?;
                let t = j.groebner().top_degree().map(|t| t as usize);
                caps.push(default_cap(h, wm, 0, t, t));
            }
            Some(Construction::FibreOverResidue { second }) => {
                let s = Quotient::parse(&self.field, second, "construction.second")?;
                let t = top.zip(s.top()).map(|(a, c)| a.max(c));
                caps.push(default_cap(h, wm.max(s.max_weight()), 0, t, t));
            }
            None => {}
        }
        if let Some(t) = &self.spec.theorem {
            if !t.ideal.is_empty() {
                ideal_case(&t.ideal, "theorem.ideal", &mut caps)?;
            }
            if let Some(second) = &t.second {
                let s = Quotient::parse(&self.field, second, "theorem.second")?;
                let t = top.zip(s.top()).map(|(a, c)| a.max(c));
                caps.push(default_cap(h, wm.max(s.max_weight()), 0, t, t));
            }
        }
        Ok(caps.into_iter().max().unwrap_or(0))
    }

    fn golod_options(&self) -> GolodOptions {
        GolodOptions {
            h_cap: self.h,
            certify: self.certify,
            massey_order: self.spec.massey.as_ref().map(|m| m.order),
            jobs: self.opts.jobs.max(1),
        }
    }

    fn ring(&self) -> Result<Arc<GradedAlgebra<F>>, CliError> {
        self.base.algebra(self.d, "ring")
    }

    fn construction(&self, r: &Arc<GradedAlgebra<F>>) -> Result<Option<Built<F>>, CliError> {
        let Some(c) = &self.spec.construction else { return Ok(None) };
        let built = match c {
            Construction::TrivialExtension { module } => {
                let m = build_module(r, module, "construction.module")?;
                let m = positive(&m).map_err(CliError::core("construction.module"))?;
                Built::Retract(trivial_extension(r, &m).map_err(CliError::core("construction"))?)
            }
            Construction::Fibre { ideal } => {
                let i = elements(r, ideal, "construction.ideal")?;
                Built::Retract(iterated_fibre(r, &i, 2).map_err(CliError::core("construction"))?)
            }
            Construction::IteratedFibre { ideal, n } => {
                let i = elements(r, ideal, "construction.ideal")?;
                Built::Retract(iterated_fibre(r, &i, *n).map_err(CliError::core("construction"))?)
            }
            Construction::FibreOverResidue { second } => {
                let r2 = Quotient::parse(&self.field, second, "construction.second")?
                    .algebra(self.d, "construction.second")?;
                let (a, maps) = product_over_k(r, &r2).map_err(CliError::core("construction"))?;
                Built::Product(a, maps)
            }
            Construction::Quotient { ideal } => {
                let gens = ideal
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        parse_poly(t, &self.base.ring).map_err(CliError::core(format!("construction.ideal[{i}]")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let j = self.base.ideal.extended(gens).map_err(CliError::core("construction.ideal"))?;
                if j.is_unit() {
                    return Err(CliError::core("construction.ideal")(Error::UnitIdeal));
                }
                let target = quotient_algebra(&j, self.d).map_err(CliError::core("construction"))?;
                Built::Quotient(AlgebraMap::between_quotients(r, &target).map_err(CliError::core("construction"))?)
            }
        };
        Ok(Some(built))
    }

    /// The algebra and module most commands act on: the spec's ring and
    /// module, or the constructed algebra and its residue field.
    fn subject(&self) -> Result<(Arc<GradedAlgebra<F>>, GradedModule<F>, Option<Built<F>>), CliError> {
        let r = self.ring()?;
        match self.construction(&r)? {
            Some(b) => {
                let a = b.algebra().clone();
                let m = match &self.spec.module {
                    None | Some(ModuleBlock::ResidueField) => GradedModule::residue_field(&a),
                    Some(block) if a.quotient_data().is_some() => build_module(&a, block, "module")?,
                    Some(_) => {
                        return Err(CliError::Schema(
                            "module: over this construction only residue-field is available".into(),
                        ))
                    }
                };
                Ok((a, m, Some(b)))
            }
            None => {
                let m = match &self.spec.module {
                    None => GradedModule::residue_field(&r),
                    Some(block) => build_module(&r, block, "module")?,
                };
                Ok((r, m, None))
            }
        }
    }

    fn report(&self, command: Command) -> Report {
        Report::new(command.name(), self.spec.clone(), self.h, self.d, self.field.spec().to_string())
    }

    fn run(&self, command: Command) -> Result<Report, CliError> {
        let mut report = self.report(command);
        match command {
            Command::Betti => self.betti(&mut report)?,
            Command::Series => self.series(&mut report)?,
            Command::GolodRing => {
                let (a, _, _) = self.subject()?;
                self.golod(&mut report, &GradedModule::residue_field(&a))?
            }
            Command::GolodModule => {
                let (_, m, _) = self.subject()?;
                self.golod(&mut report, &m)?
            }
            Command::CertifyHuneke => self.certify_huneke(&mut report)?,
            Command::Massey => self.massey(&mut report)?,
            Command::Construct => self.construct(&mut report)?,
            Command::VerifyTheorem => self.verify_theorem(&mut report)?,
            Command::Largeness => self.largeness(&mut report)?,
            Command::Run => unreachable!("resolved before dispatch"),
        }
        Ok(report)
    }

    fn betti(&self, report: &mut Report) -> Result<(), CliError> {
        let (_, m, _) = self.subject()?;
        let res =
            Resolution::compute(&m, self.h, ResolutionOptions { degree_bound: None, jobs: self.opts.jobs.max(1) })
                .map_err(CliError::core("resolution"))?;
        res.check_minimal().map_err(CliError::core("resolution"))?;
        res.check_exact().map_err(CliError::core("resolution"))?;
        let p = poincare_through(&res, self.h);
        report.meta.completeness = Completeness::of(&p);
        report.betti = Some(betti_through(&res, self.h));
        report.details = json!({
            "poincare": p,
            "hilbert": hilbert_series(&m),
            "terminated": res.terminated(),
            "minimal": true,
            "exact": true,
        });
        Ok(())
    }

    fn series(&self, report: &mut Report) -> Result<(), CliError> {
        let (_, m, _) = self.subject()?;
        let res =
            Resolution::compute(&m, self.h, ResolutionOptions { degree_bound: None, jobs: self.opts.jobs.max(1) })
                .map_err(CliError::core("resolution"))?;
        let kappa_ring = KoszulComplex::of_algebra(m.algebra()).map_err(CliError::core("koszul"))?;
        let kappa_module =
            KoszulComplex::new(&m, kappa_ring.generators().to_vec()).map_err(CliError::core("koszul"))?;
        let (km, kr) = (kappa_module.koszul_polynomial(), kappa_ring.koszul_polynomial());
        let bound = golodlab::golod::serre_bound(&km, &kr, self.h).map_err(CliError::core("series"))?;
        let p = poincare_through(&res, self.h);
        report.meta.completeness = Completeness::of(&p);
        report.details =
            json!({ "agrees_with_bound_through": agreement(&p.coeffs, &bound.coeffs, p.complete_prefix()) });
        report.betti = Some(betti_through(&res, self.h));
        report.series = Some(SeriesBlock { poincare: p, kappa_module: km, kappa_ring: kr, serre_bound: bound });
        Ok(())
    }

    fn golod(&self, report: &mut Report, m: &GradedModule<F>) -> Result<(), CliError> {
        let opts = self.golod_options();
        let analysis = golod_module_test(m, &opts).map_err(CliError::core("golod"))?;
        fill_analysis(report, &analysis);
        let mut details = serde_json::Map::new();
        details.insert(
            "agrees_with_bound_through".into(),
            json!(agreement(
                &analysis.poincare.coeffs,
                &analysis.serre_bound.coeffs,
                analysis.poincare.complete_prefix()
            )),
        );
        match &analysis.verdict {
            GolodVerdict::RefutedNotGolod { witness } => {
                let ok = reverify(m, &analysis, &opts).map_err(CliError::core("golod"))?;
                if !ok {
                    return Err(CliError::core("golod")(Error::Internal(format!(
                        "stored witness failed re-verification: {}",
                        witness.describe()
                    ))));
                }
                details.insert("witness_verified".into(), json!(true));
                report.witnesses.push(json!(witness));
                if matches!(witness, Refutation::SeriesMismatch { .. }) {
                    // the product refuter is independent evidence; record it too
                    if let Some(w) = product_witness(m).map_err(CliError::core("golod"))? {
                        let ok = golodlab::golod::reverify_witness(m, &w).map_err(CliError::core("golod"))?;
                        if !ok {
                            return Err(CliError::core("golod")(Error::Internal(
                                "product witness failed re-verification".into(),
                            )));
                        }
                        report.witnesses.push(json!(w));
                    }
                }
            }
            GolodVerdict::CertifiedGolod { certificate } => report.witnesses.push(json!(certificate)),
            _ => {}
        }
        report.details = Value::Object(details);
        Ok(())
    }

    fn certify_huneke(&self, report: &mut Report) -> Result<(), CliError> {
        let (_, m, _) = self.subject()?;
        let c = herzog_huneke_certify(&m).map_err(CliError::core("certify"))?;
        if let Certification::Certificate { certificate } = &c {
            report.verdict = Some(GolodVerdict::CertifiedGolod { certificate: certificate.clone() });
            report.witnesses.push(json!(certificate));
        }
        report.details = json!({ "certification": c });
        Ok(())
    }

    fn massey(&self, report: &mut Report) -> Result<(), CliError> {
        let (_, m, _) = self.subject()?;
        let block = self
            .spec
            .massey
            .as_ref()
            .ok_or_else(|| CliError::Schema("massey: the massey command needs a massey block".into()))?;
        let mode = match block.mode.as_deref() {
            Some("ring") => MasseyMode::Ring,
            Some(_) => MasseyMode::Module,
            None if golodlab::golod::is_residue_field(&m) => MasseyMode::Ring,
            None => MasseyMode::Module,
        };
        let mut sweeps = Vec::new();
        for order in 2..=block.order {
            let s = massey_sweep(&m, order, mode).map_err(CliError::core(format!("massey order {order}")))?;
            if let Some(w) = &s.witness {
                if !s.witness_verified {
                    return Err(CliError::core("massey")(Error::Internal(format!(
                        "witness of order {order} failed re-verification"
                    ))));
                }
                if report.witnesses.is_empty() {
                    report.witnesses.push(json!(w));
                }
            }
            if let Some(r) = &s.skipped {
                report.meta.notes.push(format!("order {order} skipped: {r}"));
            }
            sweeps.push(s);
        }
        report.details = json!({ "sweeps": sweeps });
        Ok(())
    }

    fn construct(&self, report: &mut Report) -> Result<(), CliError> {
        let (a, _, built) = self.subject()?;
        a.check_axioms().map_err(CliError::core("construct"))?;
        let mu = a.min_gens();
        let mut details = serde_json::Map::new();
        details.insert("provenance".into(), json!(format!("{:?}", a.provenance())));
        details.insert("hilbert".into(), json!(a.hilbert()));
        details.insert("finite".into(), json!(a.is_finite()));
        details.insert("top_degree".into(), json!(a.top_degree()));
        details.insert("embedding_dimension".into(), json!(mu.len()));
        details.insert("generator_degrees".into(), json!(mu.degrees()));
        match &built {
            Some(Built::Retract(r)) => {
                r.check().map_err(CliError::core("construct"))?;
                details.insert("retract".into(), json!(true));
                details.insert("sections".into(), json!(r.sections.len()));
                if r.sections.len() >= 2 {
                    details.insert("kernels_annihilate".into(), json!(r.kernels_annihilate(0, 1)));
                }
            }
            Some(Built::Product(_, maps)) => {
                for (i, p) in maps.iter().enumerate() {
                    p.check_multiplicative().map_err(CliError::core(format!("construct: projection {i}")))?;
                }
                details.insert("projections".into(), json!(maps.len()));
            }
            Some(Built::Quotient(p)) => {
                p.check_multiplicative().map_err(CliError::core("construct: projection"))?;
                details.insert("surjective".into(), json!(p.is_surjective()));
            }
            None => {}
        }
        if a.quotient_data().is_some() {
            let x = cross_check_kappa(&GradedModule::residue_field(&a)).map_err(CliError::core("construct"))?;
            details.insert("kappa_cross_check".into(), json!(x));
        }
        report.details = Value::Object(details);
        Ok(())
    }

    fn largeness(&self, report: &mut Report) -> Result<(), CliError> {
        let r = self.ring()?;
        let built = self.construction(&r)?.ok_or_else(|| {
            CliError::Schema("construction: largeness needs a construction that provides a map".into())
        })?;
        let k = self.spec.theorem.as_ref().map(|t| t.section).unwrap_or(0);
        let map = built.map(k)?;
        let l = largeness_test(map, self.h).map_err(CliError::core("largeness"))?;
        report.details = json!({ "map": k, "largeness": l });
        Ok(())
    }

    fn verify_theorem(&self, report: &mut Report) -> Result<(), CliError> {
        let t = self
            .spec
            .theorem
            .as_ref()
            .ok_or_else(|| CliError::Schema("theorem: verify-theorem needs a theorem block".into()))?;
        let opts = self.golod_options();
        let r = self.ring()?;
        let module_over = |a: &Arc<GradedAlgebra<F>>| -> Result<GradedModule<F>, CliError> {
            match &self.spec.module {
                None => Ok(GradedModule::residue_field(a)),
                Some(b) => build_module(a, b, "module"),
            }
        };
        let retract = || -> Result<Retract<F>, CliError> {
            match self.construction(&r)? {
                Some(Built::Retract(x)) => Ok(x),
                _ => Err(CliError::Schema(format!(
                    "construction: theorem {:?} needs a trivial-extension, fibre or iterated-fibre construction",
                    t.name
                ))),
            }
        };
        let fibre_ideal = || -> Result<Elems<F>, CliError> {
            if t.ideal.is_empty() {
                return Err(CliError::Schema(format!("theorem.ideal: theorem {:?} needs the ideal I", t.name)));
            }
            elements(&r, &t.ideal, "theorem.ideal")
        };
        let second = || -> Result<Arc<GradedAlgebra<F>>, CliError> {
            match &t.second {
                Some(b) => Quotient::parse(&self.field, b, "theorem.second")?.algebra(self.d, "theorem.second"),
                None => Ok(r.clone()),
            }
        };
        let core = CliError::core("theorem");
        let rep: TheoremReport = match t.name.as_str() {
            "trivial-extension" => theorems::verify_trivial_extension(&r, &module_over(&r)?, &opts).map_err(core)?,
            "fibre-product" => theorems::verify_fibre_product(&r, &fibre_ideal()?, &opts).map_err(core)?,
            "fibre-tower" => {
                let ns = if t.ns.is_empty() { vec![2, 3] } else { t.ns.clone() };
                theorems::verify_fibre_tower(&r, &fibre_ideal()?, &ns, &opts).map_err(core)?
            }
            "retract-descent" => {
                theorems::verify_retract_descent(&retract()?, t.section, &module_over(&r)?, &opts).map_err(core)?
            }
            "retract-series" => theorems::verify_retract_series(&retract()?, &module_over(&r)?, &opts).map_err(core)?,
            "koszul-identities" => theorems::verify_koszul_identities(&retract()?, &opts).map_err(core)?,
            "retract-equivalence" => {
                theorems::verify_retract_equivalence(&retract()?, &module_over(&r)?, &opts).map_err(core)?
            }
            "multiplicativity" => {
                theorems::verify_multiplicativity(&retract()?, t.section, &module_over(&r)?, &opts).map_err(core)?
            }
            "large-transfer" => {
                let built = self.construction(&r)?.ok_or_else(|| {
                    CliError::Schema("construction: large-transfer needs a construction that provides a map".into())
                })?;
                let map = built.map(t.section)?;
                let m = module_over(map.target())?;
                theorems::verify_large_transfer(map, &m, &opts).map_err(core)?
            }
            "lescot" => theorems::verify_lescot(&r, &second()?, &opts).map_err(core)?,
            "dress-kramer" => theorems::verify_dress_kramer(&r, &second()?, &opts).map_err(core)?,
            other => return Err(CliError::Schema(format!("theorem.name: unknown theorem {other:?}"))),
        };
        for v in &rep.verdicts {
            if let GolodVerdict::RefutedNotGolod { witness } = &v.verdict {
                report.witnesses.push(json!({ "subject": v.name, "witness": witness }));
            }
        }
        if rep.outcome == Outcome::Violated {
            report.meta.notes.push("theorem violated on this instance".into());
        }
        report.details = json!(rep);
        Ok(())
    }
}

fn fill_analysis(report: &mut Report, a: &GolodAnalysis) {
    report.meta.completeness = Completeness::of(&a.poincare);
    report.meta.notes.extend(a.notes.iter().cloned());
    report.betti = Some(a.betti.clone());
    report.series = Some(SeriesBlock {
        poincare: a.poincare.clone(),
        kappa_module: a.kappa_module.clone(),
        kappa_ring: a.kappa_ring.clone(),
        serre_bound: a.serre_bound.clone(),
    });
    report.verdict = Some(a.verdict.clone());
}

/// Number of leading coefficients, among the first `complete`, where `p` and `b` agree.
fn agreement(p: &[i64], b: &[i64], complete: usize) -> usize {
    p.iter().zip(b).take(complete).take_while(|(x, y)| x == y).count()
}

/// Moves a module starting in degree 0 up by one, as a trivial extension needs.
fn positive<F: Field>(m: &GradedModule<F>) -> golodlab::Result<GradedModule<F>> {
    match m.bottom_degree() {
        Some(0) => m.shifted(1),
        _ => Ok(m.clone()),
    }
}

fn product_over_k<F: Field>(
    r1: &Arc<GradedAlgebra<F>>,
    r2: &Arc<GradedAlgebra<F>>,
) -> golodlab::Result<(Arc<GradedAlgebra<F>>, Vec<AlgebraMap<F>>)> {
    let k = residue_algebra(r1.field(), r1.d_cap().max(r2.d_cap()));
    let e1 = augmentation(r1, &k)?;
    let e2 = augmentation(r2, &k)?;
    fibre_product(&e1, &e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> ProblemSpec {
        ProblemSpec::from_json(text).unwrap()
    }

    fn quiet() -> RunOptions {
        RunOptions { timing: false, ..RunOptions::default() }
    }

    #[test]
    fn field_descriptors() {
        assert_eq!(parse_field("q").unwrap(), FieldSpec::Rationals);
        assert_eq!(parse_field("p:101").unwrap(), FieldSpec::Prime(101));
        assert!(parse_field("p:100").is_err());
        assert!(parse_field("p:4294967291").is_err());
        assert!(parse_field("r").unwrap_err().to_string().contains("field"));
    }

    #[test]
    fn cubic_series() {
        let s = spec(r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^3"]}, "caps": {"h": 5}}"#);
        let r = run(Command::Series, &s, &quiet()).unwrap();
        let series = r.series.unwrap();
        assert_eq!(series.poincare.coeffs, vec![1; 6]);
        assert_eq!(series.kappa_ring, vec![1, 1]);
        assert_eq!(r.details["agrees_with_bound_through"], 6);
    }

    #[test]
    fn presentation_of_residue_field() {
        // k = coker(R(-1)^2 -> R) with entries x, y
        let s = spec(
            r#"{"schema": 1, "ring": {"variables": ["x", "y"], "ideal": ["x^2", "y^2"]},
                "module": {"presentation": {"degrees": [0], "relations": [["x"], ["y"]]}}, "caps": {"h": 3}}"#,
        );
        let r = run(Command::Betti, &s, &quiet()).unwrap();
        assert_eq!(r.details["poincare"]["coeffs"], json!([1, 2, 3, 4]));
    }

    #[test]
    fn bad_polynomial_names_its_field() {
        let s = spec(r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^2", "x*z"]}}"#);
        let e = run(Command::Betti, &s, &quiet()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("ring.ideal[1]"), "{e}");
    }

    #[test]
    fn cap_limit() {
        let s = spec(r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^3"]}, "caps": {"d": 1000}}"#);
        assert_eq!(run(Command::Betti, &s, &quiet()).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn run_uses_the_spec_command() {
        let s = spec(
            r#"{"schema": 1, "command": "golod-ring", "ring": {"variables": ["x"], "ideal": ["x^3"]}, "caps": {"h": 4}}"#,
        );
        let r = run(Command::Run, &s, &quiet()).unwrap();
        assert_eq!(r.command, "golod-ring");
        assert!(r.verdict.unwrap().is_positive());
    }
}

//! The acceptance suite: one runner per criterion, shared by the test target and the CLI.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codes::Code;
use crate::equiv::{self, EquivMap};
use crate::error::Result;
use crate::field::{Elem, Field};
use crate::linpoly::{LinPoly, Setting};
use crate::subspace::Subspace;
use crate::verify::{self, Check, ScanMode};
use crate::Ambient;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub jobs: usize,
    pub shards: usize,
    pub budget: u128,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, jobs: 1, shards: 81, budget: equiv::SEARCH_BUDGET }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub limit: Duration,
    pub elapsed: Duration,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn in_time(&self) -> bool {
        self.elapsed <= self.limit
    }

    pub fn pass(&self) -> bool {
        self.in_time() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "criterion {}: {} ... {} ({:.1}s, limit {}s, {} checks)",
            self.id,
            self.title,
            if self.pass() { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.checks.len()
        );
        for c in self.failed_checks() {
            s += &format!("\n    failed {}: {}", c.name, c.details);
        }
        if !self.in_time() {
            s += "\n    over the time limit";
        }
        s
    }
}

pub const TITLES: [&str; 8] = [
    "maximality table",
    "minimum distances by enumeration",
    "intersection characterizations",
    "monomial automorphism containment",
    "equivalence criterion by monomial search",
    "inequivalence certificate by full search",
    "property suites",
    "restricted uniqueness and characterization",
];

const LIMITS: [u64; 8] = [10, 60 + 300, 10, 120, 300, 1800, 60, 120];

pub fn run(id: u32, cfg: &SuiteConfig) -> Result<Outcome> {
    let start = Instant::now();
    let checks = match id {
        1 => criterion_1()?,
        2 => criterion_2()?,
        3 => criterion_3()?,
        4 => criterion_4()?,
        5 => criterion_5()?,
        6 => criterion_6(cfg)?,
        7 => criterion_7(cfg)?,
        8 => criterion_8()?,
        _ => return Err(crate::error::invalid(format!("no criterion {id}"))),
    };
    let i = id as usize - 1;
    Ok(Outcome { id, title: TITLES[i], limit: Duration::from_secs(LIMITS[i]), elapsed: start.elapsed(), checks })
}

/// The codes of the maximality table with their sizes and distances.
pub fn table_codes() -> Result<Vec<(String, Code, BigUint, usize)>> {
    let pow = |b: u32, e: u32| BigUint::from(b).pow(e);
    Ok(vec![
        ("S_{4,2,1}/F_3".into(), Code::schmidt_sym(3, 4, 2, 1)?, pow(3, 8), 2),
        ("S_{5,3,1}/F_2".into(), Code::schmidt_sym(2, 5, 3, 1)?, pow(2, 10), 3),
        ("A_{5,2,1}/F_2".into(), Code::dg_alt(2, 5, 2, 1)?, pow(2, 10), 2),
        ("H_{3,2,1}/q=2".into(), Code::hermitian_h(2, 3, 2, 1)?, pow(2, 6), 2),
        ("E_{3,3,1}/q=2".into(), Code::hermitian_e(2, 3, 3, 1)?, pow(2, 3), 3),
        ("T_{4,3,1}/F_2".into(), Code::punctured_t(2, 4, 3, 1, None)?, pow(2, 5), 3),
        ("new-sym2(3,2,1)".into(), Code::new_sym2(3, 2, 1, None)?, pow(3, 8), 2),
    ])
}

fn code_size(code: &Code) -> BigUint {
    BigUint::from(code.field().p()).pow(code.basis.size_exponent())
}

fn criterion_1() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, code, size, _) in table_codes()? {
        let got = code_size(&code);
        let bound = verify::bound_for(&code)?;
        let ok = got == size && bound.as_ref() == Some(&size);
        checks.push(Check::new(name, ok, format!("size {got}, expected {size}, bound {bound:?}")));
    }
    Ok(checks)
}

fn criterion_2() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut codes = table_codes()?;
    codes.push(("D_{3,1}/q=3,m=2".into(), Code::tz(3, 2, 3, 1, None)?, BigUint::from(3u32).pow(12), 2));
    for (name, code, size, d) in codes {
        let spectrum = verify::rank_spectrum(&code, 1 << 24, ScanMode::Spectrum)?;
        let ok = spectrum.complete
            && spectrum.min_distance() == Some(d)
            && BigUint::from(spectrum.size()) == size
            && spectrum.counts.get(&0) == Some(&1);
        checks.push(Check::new(name, ok, format!("min {:?}, expected {d}, spectrum {:?}", spectrum.min_distance(), spectrum.counts)));
    }
    Ok(checks)
}

fn criterion_3() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, code, _, _) in table_codes()? {
        if code.family == crate::Family::PuncturedT {
            continue;
        }
        for c in verify::check_intersection_char(&code)? {
            checks.push(Check::new(format!("{name} {}", c.name), c.pass, c.details));
        }
    }
    Ok(checks)
}

fn criterion_4() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let codes = [
        ("S_{4,2,1}", Code::schmidt_sym(3, 4, 2, 1)?),
        ("A_{5,2,1}", Code::dg_alt(2, 5, 2, 1)?),
        ("H_{3,2,1}", Code::hermitian_h(2, 3, 2, 1)?),
        ("E_{3,3,1}", Code::hermitian_e(2, 3, 3, 1)?),
    ];
    for (i, (name, code)) in codes.iter().enumerate() {
        let census = equiv::monomial_aut_census(code, 1 << 24)?;
        checks.push(Check::new(
            format!("{name} contains the stated group"),
            census.not_fixing_in_pattern.is_empty() && census.fixing_in_pattern == census.in_pattern,
            format!("{} of {} pattern tuples fix", census.fixing_in_pattern, census.in_pattern),
        ));
        if i == 0 {
            checks.push(Check::new(
                format!("{name} has no fixing tuple outside the pattern"),
                census.outside_pattern.is_empty(),
                format!("{} tuples scanned, {} outside the pattern fix", census.tuples, census.outside_pattern.len()),
            ));
        }
    }
    Ok(checks)
}

fn criterion_5() -> Result<Vec<Check>> {
    let a = Code::schmidt_sym(2, 5, 3, 1)?;
    let b = Code::schmidt_sym(2, 5, 3, 4)?;
    let c = Code::schmidt_sym(2, 5, 3, 2)?;
    let found = equiv::monomial_equiv_search(&a, &b)?;
    let verified = match &found {
        Some(m) => m.apply_code(&a)? == b,
        None => false,
    };
    let none = equiv::monomial_equiv_search(&a, &c)?;
    Ok(vec![
        Check::new("S_{5,3,1} ~ S_{5,3,4}", verified, format!("{:?}", found.map(|m| m.to_json()))),
        Check::new("S_{5,3,1} !~ S_{5,3,2}", none.is_none(), format!("{:?}", none.map(|m| m.to_json()))),
    ])
}

/// The planted control: `S_{4,2,1}` and its image under a seeded random map.
pub fn planted_control(seed: u64) -> Result<(Code, Code, EquivMap)> {
    let c = Code::schmidt_sym(3, 4, 2, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = equiv::random_map(&c, &mut rng)?;
    let image = m.apply_code(&c)?;
    Ok((c, image, m))
}

fn criterion_6(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let new = Code::new_sym2(3, 2, 1, None)?;
    let sym = Code::schmidt_sym(3, 4, 2, 1)?;
    let report = equiv::full_equiv_search(&new, &sym, cfg.shards, cfg.jobs, cfg.budget)?;
    let total = 81u128.pow(4) * 4;
    let mut checks = vec![
        Check::new("no map to S_{4,2,1}", !report.found, format!("{:?}", report.map)),
        Check::new(
            "exhaustive",
            report.candidates_scanned == total,
            format!("{} of {total} (g, rho) candidates, {} scalars each", report.candidates_scanned, report.a_values),
        ),
        Check::new("adjoint closure", report.adjoint_closure.starts_with("skipped"), report.adjoint_closure.clone()),
        Check::new(
            "first-element rejection above 95%",
            report.rejection_rate > 0.95,
            format!("{:.4} rejected at the first basis element", report.rejection_rate),
        ),
    ];
    let (c, image, planted) = planted_control(cfg.seed)?;
    let control = equiv::full_equiv_search(&c, &image, cfg.shards, cfg.jobs, cfg.budget)?;
    let recovered = match &control.map {
        Some(m) => EquivMap::from_json(c.field(), m)?.apply_code(&c)? == image,
        None => false,
    };
    checks.push(Check::new(
        "planted control found",
        recovered,
        format!("planted {:?}, recovered {:?}", planted.to_json(), control.map),
    ));
    Ok(checks)
}

fn criterion_7(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f16 = Arc::new(Field::new(2, 1, 4)?);
    let f81 = Arc::new(Field::new(3, 1, 4)?);
    let f64h = Arc::new(Field::new(2, 2, 3)?);

    let all_polys = |field: &Arc<Field>| -> Result<Vec<LinPoly>> {
        let amb = Ambient::new(field, None)?;
        amb.basis()?.elements(1 << 20)?.iter().map(|v| amb.devectorize(v)).collect()
    };
    let l16 = all_polys(&f16)?;

    let adj = l16.iter().all(|f| f.adjoint().adjoint() == *f);
    let herm = Ambient::new(&f64h, Some(Setting::Hermitian))?;
    let mut tilde = true;
    for f in all_polys(&f64h)? {
        tilde &= f.tilde()?.tilde()? == f;
    }
    let sample: Vec<LinPoly> = (0..64)
        .map(|_| LinPoly::new(&f81, (0..4).map(|_| Elem(rng.gen_range(0..81))).collect()))
        .collect::<Result<_>>()?;
    let adj81 = sample.iter().all(|f| f.adjoint().adjoint() == *f);
    checks.push(Check::new("adjoint involution", adj && adj81, "all of L(4,2) and 64 samples over F_81"));
    checks.push(Check::new("tilde involution", tilde, "all 2^18 q²-polynomials over F_64"));

    let mut trace = true;
    for f in Ambient::new(&f16, None)?.basis()?.rows() {
        let f = Ambient::new(&f16, None)?.devectorize(f)?;
        let ft = f.adjoint();
        for x in f16.elements() {
            for y in f16.elements() {
                trace &= f16.trace(f16.mul(f.eval(x), y)) == f16.trace(f16.mul(x, ft.eval(y)));
            }
        }
    }
    checks.push(Check::new("trace adjoint identity", trace, "basis of L(4,2), all pairs in F_16"));

    let ranks = l16.iter().all(|f| f.rank() == f.adjoint().rank());
    checks.push(Check::new("rank(f) = rank(f^T)", ranks, "all of L(4,2)"));

    let mut even = true;
    for amb in [Ambient::alternating(2, 1, 5)?, Ambient::alternating(3, 1, 4)?] {
        amb.basis()?.enumerate(1 << 20, |v| {
            even &= amb.devectorize(v).map(|f| f.rank() % 2 == 0).unwrap_or(false);
        })?;
    }
    checks.push(Check::new("alternating ranks even", even, "all of A_5(2) and A_4(3)"));

    checks.push(hermitian_rank_check(&herm)?);
    checks.push(matrix_homomorphism_check()?);
    checks.push(gray_vs_naive_check()?);
    checks.push(zassenhaus_check(&mut rng)?);
    Ok(checks)
}

/// `F_q`-rank of a `q²`-polynomial over `F_{q^{2n}}`, read as a `q`-polynomial.
fn rank_over_q(f: &LinPoly, small: &Arc<Field>) -> Result<usize> {
    let n = f.n();
    let mut coeffs = vec![Elem::ZERO; 2 * n];
    for (i, &c) in f.coeffs().iter().enumerate() {
        coeffs[2 * i] = c;
    }
    Ok(LinPoly::new(small, coeffs)?.rank())
}

fn hermitian_rank_check(herm: &Ambient) -> Result<Check> {
    let big = herm.field();
    let small = Arc::new(Field::new(big.p(), big.step() / 2, 2 * big.n())?);
    if small.modulus() != big.modulus() {
        return Ok(Check::new("hermitian ranks", false, "field towers disagree"));
    }
    let mut ok = true;
    let mut seen = BTreeSet::new();
    for v in herm.basis()?.elements(1 << 20)? {
        let f = herm.devectorize(&v)?;
        let (rq, rq2) = (rank_over_q(&f, &small)?, f.rank());
        ok &= rq % 2 == 0 && rq == 2 * rq2;
        seen.insert(rq2);
    }
    Ok(Check::new("hermitian ranks", ok, format!("all of H_3(4), F_q^2-ranks seen {seen:?}")))
}

fn matrix_homomorphism_check() -> Result<Check> {
    let field = Arc::new(Field::new(2, 1, 3)?);
    let amb = Ambient::new(&field, None)?;
    let polys: Vec<LinPoly> =
        amb.basis()?.elements(1 << 10)?.iter().map(|v| amb.devectorize(v)).collect::<Result<_>>()?;
    let mats: Vec<_> = polys.iter().map(|f| f.matrix()).collect();
    let mut ok = true;
    for (f, mf) in polys.iter().zip(&mats) {
        for (g, mg) in polys.iter().zip(&mats) {
            ok &= f.compose(g)?.matrix() == mf.mul(&field, mg);
            let sum = f.add(g)?.matrix();
            ok &= sum.data().iter().zip(mf.data().iter().zip(mg.data())).all(|(&s, (&a, &b))| s == field.add(a, b));
        }
    }
    Ok(Check::new("lp_matrix homomorphism", ok, "all pairs in L(3,2)"))
}

/// Spectrum by plain lexicographic enumeration of `F_q`-coefficient tuples.
pub fn naive_spectrum(code: &Code) -> Result<BTreeMap<usize, u64>> {
    let field = code.field();
    let scalars = field.subfield_elements(code.basis.scalar_degree())?;
    let rows = code.basis.rows();
    let mut counts = BTreeMap::new();
    let mut idx = vec![0usize; rows.len()];
    loop {
        let mut v = vec![Elem::ZERO; code.basis.ambient_dim()];
        for (row, &i) in rows.iter().zip(&idx) {
            for (x, &y) in v.iter_mut().zip(row) {
                *x = field.add(*x, field.mul(scalars[i], y));
            }
        }
        *counts.entry(verify::codeword_rank(code, &v)?).or_insert(0) += 1;
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < scalars.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return Ok(counts);
        }
    }
}

fn gray_vs_naive_check() -> Result<Check> {
    let codes = [
        Code::gabidulin(2, 3, 2, 1)?,
        Code::hermitian_h(2, 3, 2, 1)?,
        Code::hermitian_e(2, 3, 3, 1)?,
        Code::dg_alt(2, 5, 4, 1)?,
        Code::gabidulin(3, 2, 1, 1)?,
        Code::punctured_t(2, 4, 3, 1, None)?,
    ];
    let mut ok = true;
    let mut dims = Vec::new();
    for c in &codes {
        let gray = verify::rank_spectrum(c, 1 << 20, ScanMode::Spectrum)?;
        ok &= c.dim() <= 6 && gray.counts == naive_spectrum(c)?;
        dims.push(c.dim());
    }
    Ok(Check::new("gray vs naive spectra", ok, format!("code dimensions {dims:?}")))
}

fn zassenhaus_check(rng: &mut ChaCha8Rng) -> Result<Check> {
    let field = Arc::new(Field::new(2, 1, 1)?);
    let mut ok = true;
    for _ in 0..200 {
        let mut random_space = || {
            let k = rng.gen_range(0..=9);
            let rows: Vec<Vec<Elem>> = (0..k).map(|_| (0..9).map(|_| Elem(rng.gen_range(0..2))).collect()).collect();
            Subspace::span(&field, 1, 9, &rows)
        };
        let a = random_space()?;
        let b = random_space()?;
        let meet = a.intersect(&b)?;
        let ea: BTreeSet<Vec<Elem>> = a.elements(1 << 10)?.into_iter().collect();
        let brute: BTreeSet<Vec<Elem>> = b.elements(1 << 10)?.into_iter().filter(|v| ea.contains(v)).collect();
        let got: BTreeSet<Vec<Elem>> = meet.elements(1 << 10)?.into_iter().collect();
        ok &= got == brute;
    }
    Ok(Check::new("zassenhaus vs brute force", ok, "200 seeded pairs in F_2^9"))
}

fn criterion_8() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let s = Code::schmidt_sym(2, 5, 3, 1)?;
    let field = s.field().clone();
    let nonzero: Vec<Elem> = field.elements().skip(1).collect();
    let pairs: Vec<(Elem, Elem)> = nonzero.iter().flat_map(|&a| nonzero.iter().map(move |&b| (a, b))).collect();
    let tally = verify::check_uniqueness(&s, &pairs)?;
    checks.push(Check::new(
        "uniqueness at (2,5,3,1)",
        tally.violations == 0 && tally.meeting_code > 0 && tally.meeting_code < tally.spaces,
        format!("{tally:?}"),
    ));

    let c = Code::schmidt_sym(3, 4, 2, 1)?;
    let parent = verify::intersection_parent(&c)?;
    let clauses = verify::check_characterization(&c, &parent)?;
    checks.push(Check::new("clauses at (3,4,2,1)", clauses.iter().all(|k| k.pass), summary(&clauses)));

    let g = Code::gabidulin_in(&c.ambient, 3, 1)?;
    let negative = verify::check_characterization(&c, &g)?;
    let c_fails = negative.iter().any(|k| k.name == "c:intersection" && !k.pass);
    checks.push(Check::new("untwisted control fails (c)", c_fails, summary(&negative)));

    let m = EquivMap::monomial(crate::MapMode::Psi, c.field(), Elem::ONE, c.field().gen(), 1, 0)?;
    let image = m.apply_code(&c)?;
    let moved = m.apply_code(&parent)?;
    let clauses = verify::check_characterization(&image, &moved)?;
    checks.push(Check::new("monomial image passes", clauses.iter().all(|k| k.pass), summary(&clauses)));
    Ok(checks)
}

fn summary(checks: &[Check]) -> String {
    checks.iter().map(|c| format!("{}={}", c.name, c.pass)).collect::<Vec<_>>().join(" ")
}

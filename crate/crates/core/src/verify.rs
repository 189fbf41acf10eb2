//! Minimum distance, rank spectra, bounds and the structural checks run on codes.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::ambient::AmbientSpec;
use crate::codes::{Code, Family, Kind, Params};
use crate::error::{invalid, Error, Result};
use crate::field::Elem;
use crate::io::{FieldSpec, SCHEMA};
use crate::linpoly::{LinPoly, Setting};
use crate::matrix::rank_in_place;
use crate::subspace::{gray_walk, par_cosets};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    /// Visit every codeword.
    Spectrum,
    /// Stop at the first nonzero codeword of rank below the given value.
    AssertAtLeast(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    pub counts: BTreeMap<usize, u64>,
    /// False when an assert scan stopped early.
    pub complete: bool,
}

impl Spectrum {
    pub fn min_distance(&self) -> Option<usize> {
        self.counts.keys().copied().find(|&r| r > 0)
    }

    pub fn size(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Ranks of all codewords, enumerated in parallel cosets of a Gray-code walk.
pub fn rank_spectrum(code: &Code, budget: u128, mode: ScanMode) -> Result<Spectrum> {
    code.basis.check_budget(budget)?;
    let field = code.field();
    let n = code.matrix_size();
    let gens = code
        .basis
        .prime_generators()
        .iter()
        .map(|g| Ok(code.rank_matrix(g)?.data().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let threads = rayon::current_num_threads().max(1);
    let mut split = 0;
    while split < gens.len() && (field.p() as usize).pow(split as u32) < 8 * threads {
        split += 1;
    }
    let stop = AtomicBool::new(false);
    let parts = par_cosets(field, &gens, split, |low, start| {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        let mut work = vec![Elem::ZERO; n * n];
        let mut seen = 0u32;
        gray_walk(field, low, start, |m| {
            work.copy_from_slice(m);
            let r = rank_in_place(field, &mut work, n, n);
            *counts.entry(r).or_default() += 1;
            if let ScanMode::AssertAtLeast(d) = mode {
                if r > 0 && r < d {
                    stop.store(true, Ordering::Relaxed);
                    return false;
                }
                seen = seen.wrapping_add(1);
                if seen.is_multiple_of(1024) && stop.load(Ordering::Relaxed) {
                    return false;
                }
            }
            true
        });
        counts
    });
    let mut total = Spectrum { counts: BTreeMap::new(), complete: !stop.load(Ordering::Relaxed) };
    for part in parts {
        for (r, c) in part {
            *total.counts.entry(r).or_default() += c;
        }
    }
    Ok(total)
}

/// Rank of a single codeword given as a basis-space vector.
pub fn codeword_rank(code: &Code, v: &[Elem]) -> Result<usize> {
    Ok(code.rank_matrix(v)?.rank(code.field()))
}

/// Upper bound on the size of a `d`-code in the given setting (`None`: all `n × n` matrices).
pub fn bound_value(setting: Option<Setting>, q: u64, n: u32, d: u32, additive: bool) -> Result<BigUint> {
    if d < 1 || d > n {
        return Err(invalid(format!("d must lie in 1..={n}")));
    }
    crate::field::split_prime_power(q)?;
    let (n, d) = (n as u64, d as u64);
    let exponent = match setting {
        None => n * (n - d + 1),
        Some(Setting::Symmetric) => {
            if d % 2 == 0 && !additive {
                return Err(invalid("the symmetric bound for even d needs an additive code"));
            }
            if (n - d) % 2 == 0 {
                n * (n - d + 2) / 2
            } else {
                (n + 1) * (n - d + 1) / 2
            }
        }
        Some(Setting::Alternating) => {
            if d % 2 != 0 {
                return Err(invalid("alternating codes have even minimum distance"));
            }
            let m = n / 2;
            let e = d / 2;
            if m == 0 || e > m {
                return Err(invalid(format!("d = {d} is too large for n = {n}")));
            }
            let num = n * (n - 1) * (m - e + 1);
            if num % (2 * m) != 0 {
                return Err(invalid("bound exponent is not an integer"));
            }
            num / (2 * m)
        }
        Some(Setting::Hermitian) => {
            if d % 2 == 0 && !additive {
                return Err(invalid("the Hermitian bound for even d needs an additive code"));
            }
            n * (n - d + 1)
        }
    };
    Ok(BigUint::from(q).pow(exponent as u32))
}

/// The bound that applies to `code`, when one is defined.
pub fn bound_for(code: &Code) -> Result<Option<BigUint>> {
    let Some(d) = declared_distance(code) else { return Ok(None) };
    let (setting, n) = match code.kind {
        Kind::GramOnV => (Some(Setting::Symmetric), code.params.n),
        Kind::Linpoly => {
            if code.ambient.setting().is_none() && code.ambient.is_hermitian_tower() {
                return Ok(None);
            }
            (code.ambient.setting(), code.ambient.n() as u32)
        }
    };
    bound_value(setting, code.ambient.q(), n, d, true).map(Some)
}

/// Minimum distance promised by the family parameters.
pub fn declared_distance(code: &Code) -> Option<u32> {
    let p = &code.params;
    match code.family {
        Family::Gabidulin | Family::Tz => p.k.map(|k| p.n - k + 1).or(p.d),
        _ => p.d,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, details: impl Into<String>) -> Check {
        Check { name: name.into(), pass, details: details.into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub family: Family,
    pub params: Params,
    pub field: FieldSpec,
    pub ambient: AmbientSpec,
    pub kind: Kind,
    pub size: String,
    pub dimension: usize,
    pub min_distance: Option<usize>,
    pub rank_unit: String,
    pub rank_spectrum: BTreeMap<usize, u64>,
    pub spectrum_complete: bool,
    pub bound: Option<String>,
    pub is_maximum: Option<bool>,
    pub checks: Vec<Check>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn verify_code(code: &Code, mode: ScanMode, budget: u128) -> Result<Report> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let size = BigUint::from(code.field().p()).pow(code.basis.size_exponent());
    if let Some(expected) = code.expected_dim() {
        checks.push(Check::new(
            "dimension",
            expected == code.dim(),
            format!("dimension {} (family formula {expected})", code.dim()),
        ));
    }
    let member = code.in_ambient()?;
    checks.push(Check::new("ambient-membership", member, format!("basis inside {}", code.ambient.spec().setting)));
    let declared = declared_distance(code);
    let mode = match (mode, declared) {
        (ScanMode::AssertAtLeast(_), Some(d)) => ScanMode::AssertAtLeast(d as usize),
        (m, _) => m,
    };
    let spectrum = rank_spectrum(code, budget, mode)?;
    let min = spectrum.min_distance();
    if let Some(d) = declared {
        let ok = spectrum.complete && min.is_none_or(|m| m >= d as usize);
        checks.push(Check::new("min-distance", ok, format!("measured {min:?}, declared {d}")));
    }
    let bound = bound_for(code)?;
    let is_maximum = bound.as_ref().map(|b| *b == size);
    if let Some(b) = &bound {
        checks.push(Check::new("maximum", *b == size, format!("size {size}, bound {b}")));
    }
    Ok(Report {
        schema: SCHEMA,
        family: code.family,
        params: code.params.clone(),
        field: FieldSpec::of(code.field()),
        ambient: code.ambient.spec(),
        kind: code.kind,
        size: size.to_string(),
        dimension: code.dim(),
        min_distance: min,
        rank_unit: if code.ambient.is_hermitian_tower() { "F_q^2" } else { "F_q" }.to_string(),
        rank_spectrum: spectrum.counts,
        spectrum_complete: spectrum.complete,
        bound: bound.map(|b| b.to_string()),
        is_maximum,
        checks,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn need(p: Option<u32>, name: &str) -> Result<i64> {
    p.map(|v| v as i64).ok_or_else(|| invalid(format!("missing parameter {name}")))
}

/// The twisted Gabidulin-type space whose intersection with the ambient space gives `code`.
pub fn intersection_parent(code: &Code) -> Result<Code> {
    let p = &code.params;
    let n = p.n as i64;
    match code.family {
        Family::SchmidtSym | Family::DgAlt | Family::HermitianH | Family::HermitianE => {
            let (d, s) = (need(p.d, "d")?, need(p.s, "s")?);
            let g = Code::gabidulin_in(&code.ambient, (n - d + 1) as u32, s as u32)?;
            let shift = match code.family {
                Family::SchmidtSym => s * (n + d) / 2,
                Family::DgAlt => s * d / 2,
                // exponents are powers of q, positions count powers of q²
                Family::HermitianH => s * (n + d + 1) / 2,
                _ => s * (d + 1) / 2,
            };
            g.compose_right(shift)
        }
        Family::NewSym2 => {
            let (m, s) = (need(p.m, "m")?, need(p.s, "s")?);
            let eta = p.eta.map(Elem);
            Code::tz(p.q, m as u32, (2 * m - 1) as u32, s as u32, eta)?.compose_right(s * m)
        }
        other => Err(Error::WrongKind(format!("no intersection description for {other}"))),
    }
}

/// Checks that `code` is the intersection of its parent space with the ambient space,
/// and that the parent is closed under the ambient involution.
pub fn check_intersection_char(code: &Code) -> Result<Vec<Check>> {
    let setting = code.ambient.setting().ok_or_else(|| invalid("code has no restricted ambient"))?;
    let parent = intersection_parent(code)?;
    let mut checks = Vec::new();
    let cut = parent.restrict_to(setting)?;
    checks.push(Check::new(
        "intersection",
        cut == *code,
        format!("parent dim {}, intersection dim {}, code dim {}", parent.dim(), cut.dim(), code.dim()),
    ));
    let dual = match setting {
        Setting::Hermitian => parent.tilde()?,
        _ => parent.adjoint()?,
    };
    if code.family == Family::NewSym2 {
        let cut = dual.restrict_to(setting)?;
        checks.push(Check::new("adjoint-intersection", cut == *code, format!("intersection dim {}", cut.dim())));
    } else {
        checks.push(Check::new("parent-closed", dual == parent, format!("parent dim {}", parent.dim())));
    }
    Ok(checks)
}

/// Clauses of the characterization of `code` by a space `v` of polynomials:
/// dimension, closure under the ambient involution, and intersection.
pub fn check_characterization(code: &Code, v: &Code) -> Result<Vec<Check>> {
    let setting = code.ambient.setting().ok_or_else(|| invalid("code has no restricted ambient"))?;
    let n = code.ambient.n();
    let d = declared_distance(code).ok_or_else(|| invalid("code has no declared distance"))? as usize;
    let factor = if code.ambient.is_hermitian_tower() { 2 } else { 1 };
    let expected = factor * n * (n - d + 1);
    let mut checks = vec![Check::new("a:dimension", v.dim() == expected, format!("dim {} (expected {expected})", v.dim()))];
    let dual = match setting {
        Setting::Hermitian => v.tilde()?,
        _ => v.adjoint()?,
    };
    checks.push(Check::new("b:closed", dual == *v, String::new()));
    let cut = v.restrict_to(setting)?;
    checks.push(Check::new("c:intersection", cut == *code, format!("intersection dim {}", cut.dim())));
    Ok(checks)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessTally {
    pub spaces: usize,
    pub meeting_code: usize,
    pub equal_to_parent: usize,
    pub violations: usize,
}

/// Over all `W = αx^{q^r} ∘ G' ∘ βx^{q^{r'}}`, checks that `W ∩ S_n(q)` equals
/// the symmetric code only when `W` is `G'` itself.
pub fn check_uniqueness(code: &Code, scalars: &[(Elem, Elem)]) -> Result<UniquenessTally> {
    if code.family != Family::SchmidtSym {
        return Err(Error::WrongKind("uniqueness check runs on symmetric codes".into()));
    }
    let parent = intersection_parent(code)?;
    let field = code.field().clone();
    let unrestricted = code.ambient.unrestricted();
    let n = code.ambient.n() as i64;
    let mut tally = UniquenessTally::default();
    for r in 0..n {
        for r2 in 0..n {
            for &(alpha, beta) in scalars {
                let left = LinPoly::monomial(&field, alpha, r);
                let right = LinPoly::monomial(&field, beta, r2);
                let w = parent.map(&unrestricted, |f| left.compose(&f.compose(&right)?))?;
                let meets = w.restrict_to(Setting::Symmetric)? == *code;
                let same = w == parent;
                tally.spaces += 1;
                tally.meeting_code += meets as usize;
                tally.equal_to_parent += same as usize;
                tally.violations += (meets != same) as usize;
            }
        }
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(bound_value(Some(Setting::Symmetric), 3, 4, 2, true).unwrap(), BigUint::from(6561u32));
        assert_eq!(bound_value(Some(Setting::Alternating), 2, 5, 2, true).unwrap(), BigUint::from(1024u32));
        assert_eq!(bound_value(Some(Setting::Hermitian), 2, 3, 2, true).unwrap(), BigUint::from(64u32));
        assert_eq!(bound_value(None, 2, 3, 2, true).unwrap(), BigUint::from(64u32));
        assert_eq!(bound_value(Some(Setting::Symmetric), 2, 4, 3, false).unwrap(), BigUint::from(32u32));
        assert!(bound_value(Some(Setting::Symmetric), 3, 4, 2, false).is_err());
        assert!(bound_value(Some(Setting::Alternating), 2, 5, 3, true).is_err());
        assert!(bound_value(None, 2, 3, 4, true).is_err());
    }

    #[test]
    fn small_spectra() {
        let g = Code::gabidulin(2, 3, 2, 1).unwrap();
        let s = rank_spectrum(&g, 1 << 10, ScanMode::Spectrum).unwrap();
        assert_eq!(s.size(), 64);
        assert_eq!(s.counts[&0], 1);
        assert_eq!(s.min_distance(), Some(2));
        // k = 1 is the spread set; k = n is every 2 x 2 matrix
        let g = Code::gabidulin(2, 2, 1, 1).unwrap();
        let s = rank_spectrum(&g, 1 << 10, ScanMode::Spectrum).unwrap();
        assert_eq!(s.counts, BTreeMap::from([(0, 1), (2, 3)]));
        let g = Code::gabidulin(2, 2, 2, 1).unwrap();
        let s = rank_spectrum(&g, 1 << 10, ScanMode::Spectrum).unwrap();
        assert_eq!(s.counts, BTreeMap::from([(0, 1), (1, 9), (2, 6)]));
    }
}

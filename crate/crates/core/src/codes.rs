//! Constructors for the code families.
//!
//! Every linearized family is described by a list of [`Slot`]s: a free
//! parameter ranging over a subfield, and the coefficient positions it feeds.
//! The `F_q`-basis of a code is obtained by sweeping each slot over an
//! `F_q`-basis of its domain and canonicalizing the span.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::{self, Ambient};
use crate::error::{invalid, Error, Result};
use crate::field::{split_prime_power, Elem, Field};
use crate::linpoly::{LinPoly, Setting};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gabidulin,
    SchmidtSym,
    DgAlt,
    HermitianH,
    HermitianE,
    PuncturedT,
    Tz,
    NewSym2,
    Ambient,
    Derived,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Gabidulin,
        Family::SchmidtSym,
        Family::DgAlt,
        Family::HermitianH,
        Family::HermitianE,
        Family::PuncturedT,
        Family::Tz,
        Family::NewSym2,
        Family::Ambient,
        Family::Derived,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gabidulin => "gabidulin",
            Family::SchmidtSym => "schmidt-sym",
            Family::DgAlt => "dg-alt",
            Family::HermitianH => "hermitian-h",
            Family::HermitianE => "hermitian-e",
            Family::PuncturedT => "punctured-t",
            Family::Tz => "tz",
            Family::NewSym2 => "new-sym2",
            Family::Ambient => "ambient",
            Family::Derived => "derived",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| invalid(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Linpoly,
    GramOnV,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub q: u64,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Canonical encoding of η.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<u32>,
}

/// An additive code given by an `F_q`-basis of vectorized codewords.
#[derive(Clone, Debug)]
pub struct Code {
    pub family: Family,
    pub params: Params,
    pub ambient: Ambient,
    pub kind: Kind,
    pub basis: Subspace,
    /// The complement `V` of `⟨η⟩` for restricted-form codes.
    pub complement: Option<Vec<Elem>>,
}

impl PartialEq for Code {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.basis == other.basis
    }
}

/// A free parameter: ranges over `F_{p^degree}` and contributes
/// `mult · b^{p^t}` to coefficient `pos` for every term `(pos, t, mult)`.
#[derive(Clone, Debug)]
pub struct Slot {
    pub degree: u32,
    pub terms: Vec<(i64, i64, Elem)>,
}

impl Slot {
    fn new(degree: u32) -> Slot {
        Slot { degree, terms: Vec::new() }
    }

    fn term(mut self, pos: i64, t: i64, mult: Elem) -> Slot {
        self.terms.push((pos, t, mult));
        self
    }

    fn instantiate(&self, field: &Arc<Field>, b: Elem) -> LinPoly {
        let n = field.n() as i64;
        let mut coeffs = vec![Elem::ZERO; n as usize];
        for &(pos, t, mult) in &self.terms {
            let i = pos.rem_euclid(n) as usize;
            coeffs[i] = field.add(coeffs[i], field.mul(mult, field.frob_p(b, t)));
        }
        LinPoly::new(field, coeffs).expect("coefficients come from the field")
    }
}

/// Span of all slot instances over `F_q`-bases of their domains.
pub fn span_of_slots(ambient: &Ambient, slots: &[Slot]) -> Result<Subspace> {
    let field = ambient.field();
    let sd = ambient.scalar_degree();
    let mut rows = Vec::new();
    for slot in slots {
        for b in field.subfield_basis(slot.degree, sd)? {
            rows.push(ambient.vectorize(&slot.instantiate(field, b))?);
        }
    }
    Subspace::span(field, sd, ambient.vector_len(), &rows)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg()))
    }
}

fn field_for(q: u64, n: u32) -> Result<Arc<Field>> {
    Ok(Arc::new(Field::for_order(q, n)?))
}

fn hermitian_field(q: u64, n: u32) -> Result<Arc<Field>> {
    let (p, e) = split_prime_power(q)?;
    Ok(Arc::new(Field::new(p, 2 * e, n)?))
}

/// Smallest power of the generator `g` satisfying `pred`, falling back to
/// powers of the primitive element when no power of `g` qualifies.
pub fn default_eta(field: &Field, pred: impl Fn(Elem) -> bool) -> Option<Elem> {
    for base in [field.gen(), field.primitive()] {
        let mut x = Elem::ONE;
        loop {
            if pred(x) {
                return Some(x);
            }
            x = field.mul(x, base);
            if x == Elem::ONE || x.is_zero() {
                break;
            }
        }
    }
    None
}

/// Whether `N(η)` is a non-square of `F_q`, the condition on η for the twisted families.
pub fn has_nonsquare_norm(field: &Field, eta: Elem) -> bool {
    if eta.is_zero() || field.p() == 2 {
        return false;
    }
    field.pow(field.norm(eta), (field.q() - 1) / 2) != Elem::ONE
}

impl Code {
    fn from_slots(family: Family, params: Params, ambient: Ambient, slots: &[Slot]) -> Result<Code> {
        let basis = span_of_slots(&ambient, slots)?;
        Ok(Code { family, params, ambient, kind: Kind::Linpoly, basis, complement: None })
    }

    /// A code given directly by a subspace of vectorized polynomials.
    pub fn from_subspace(family: Family, params: Params, ambient: Ambient, basis: Subspace) -> Result<Code> {
        if basis.ambient_dim() != ambient.vector_len() {
            return Err(Error::AmbientMismatch(ambient.vector_len(), basis.ambient_dim()));
        }
        Ok(Code { family, params, ambient, kind: Kind::Linpoly, basis, complement: None })
    }

    /// `G_{n,k,s}` over `F_{q^n}`.
    pub fn gabidulin(q: u64, n: u32, k: u32, s: u32) -> Result<Code> {
        let ambient = Ambient::new(&field_for(q, n)?, None)?;
        Code::gabidulin_in(&ambient, k, s)
    }

    /// `G_{n,k,s}` in the unrestricted space of `ambient` (over `F_{q²}` for Hermitian towers).
    pub fn gabidulin_in(ambient: &Ambient, k: u32, s: u32) -> Result<Code> {
        let ambient = ambient.unrestricted();
        let n = ambient.n() as u32;
        require(gcd(s as u64, n as u64) == 1, || format!("gcd(s, n) must be 1 (s = {s}, n = {n})"))?;
        require((1..=n).contains(&k), || format!("k must lie in 1..={n}"))?;
        let m = ambient.field().degree();
        let slots: Vec<Slot> = (0..k as i64).map(|i| Slot::new(m).term(s as i64 * i, 0, Elem::ONE)).collect();
        let params = Params { q: ambient.q(), n, k: Some(k), s: Some(s), ..Params::default() };
        Code::from_slots(Family::Gabidulin, params, ambient, &slots)
    }

    pub fn schmidt_sym(q: u64, n: u32, d: u32, s: u32) -> Result<Code> {
        require(gcd(s as u64, n as u64) == 1, || format!("gcd(s, n) must be 1 (s = {s}, n = {n})"))?;
        require((1..=n).contains(&d), || format!("d must lie in 1..={n}"))?;
        require((n - d).is_multiple_of(2), || "n - d must be even".into())?;
        let field = field_for(q, n)?;
        let ambient = Ambient::new(&field, Some(Setting::Symmetric))?;
        let (m, e) = (field.degree(), field.step() as i64);
        let (n, s) = (n as i64, s as i64);
        let mut slots = vec![Slot::new(m).term(0, 0, Elem::ONE)];
        for i in 1..=(n - d as i64) / 2 {
            slots.push(Slot::new(m).term(s * i, 0, Elem::ONE).term(s * (n - i), e * s * (n - i), Elem::ONE));
        }
        let params = Params { q, n: n as u32, d: Some(d), s: Some(s as u32), ..Params::default() };
        Code::from_slots(Family::SchmidtSym, params, ambient, &slots)
    }

    pub fn dg_alt(q: u64, n: u32, d: u32, s: u32) -> Result<Code> {
        require(gcd(s as u64, n as u64) == 1, || format!("gcd(s, n) must be 1 (s = {s}, n = {n})"))?;
        require(n % 2 == 1, || "n must be odd".into())?;
        require(d.is_multiple_of(2) && d >= 2 && d < n, || format!("d must be even with 2 <= d <= {}", n - 1))?;
        let field = field_for(q, n)?;
        let ambient = Ambient::new(&field, Some(Setting::Alternating))?;
        let (m, e) = (field.degree(), field.step() as i64);
        let minus = field.neg(Elem::ONE);
        let (n, s, half) = (n as i64, s as i64, d as i64 / 2);
        let slots: Vec<Slot> = (half..=(n - 1) / 2)
            .map(|i| Slot::new(m).term(s * i, 0, Elem::ONE).term(s * (n - i), e * s * (n - i), minus))
            .collect();
        let params = Params { q, n: n as u32, d: Some(d), s: Some(s as u32), ..Params::default() };
        Code::from_slots(Family::DgAlt, params, ambient, &slots)
    }

    fn hermitian_checks(n: u32, s: u32) -> Result<()> {
        require(gcd(s as u64, 2 * n as u64) == 1, || format!("gcd(s, 2n) must be 1 (s = {s}, n = {n})"))
    }

    /// The Hermitian family whose parameters have opposite parity.
    pub fn hermitian_h(q: u64, n: u32, d: u32, s: u32) -> Result<Code> {
        Code::hermitian_checks(n, s)?;
        require((n + d) % 2 == 1, || "n and d must have opposite parity".into())?;
        require(d >= 1 && d < n, || format!("d must lie in 1..={}", n - 1))?;
        let field = hermitian_field(q, n)?;
        let ambient = Ambient::new(&field, Some(Setting::Hermitian))?;
        let (m, big, half) = (field.degree(), field.step() as i64, field.step() as i64 / 2);
        let (n, s) = (n as i64, s as i64);
        let slots: Vec<Slot> = (1..=(n - d as i64 + 1) / 2)
            .map(|j| {
                Slot::new(m)
                    .term(s * (n - j + 1), big * s * (n - j + 1), Elem::ONE)
                    .term(s * j, half * s, Elem::ONE)
            })
            .collect();
        let params = Params { q, n: n as u32, d: Some(d), s: Some(s as u32), ..Params::default() };
        Code::from_slots(Family::HermitianH, params, ambient, &slots)
    }

    /// The Hermitian family whose parameters are both odd.
    pub fn hermitian_e(q: u64, n: u32, d: u32, s: u32) -> Result<Code> {
        Code::hermitian_checks(n, s)?;
        require(n % 2 == 1 && d % 2 == 1, || "n and d must both be odd".into())?;
        require(d >= 1 && d <= n, || format!("d must lie in 1..={n}"))?;
        let field = hermitian_field(q, n)?;
        let ambient = Ambient::new(&field, Some(Setting::Hermitian))?;
        let (m, half) = (field.degree(), field.step() as i64 / 2);
        let (n, s) = (n as i64, s as i64);
        // exponents are powers of q; positions count powers of q²
        let mut slots = vec![Slot::new(m / 2).term(s * (n + 1) / 2, half * s * (n + 1), Elem::ONE)];
        for j in 1..=(n - d as i64) / 2 {
            slots.push(
                Slot::new(m)
                    .term(s * (n + 2 * j + 1) / 2, half * s * (n + 2 * j + 1), Elem::ONE)
                    .term(s * (n - 2 * j + 1) / 2, half * s, Elem::ONE),
            );
        }
        let params = Params { q, n: n as u32, d: Some(d), s: Some(s as u32), ..Params::default() };
        Code::from_slots(Family::HermitianE, params, ambient, &slots)
    }

    fn twisted_checks(q: u64, m: u32, s: u32) -> Result<Arc<Field>> {
        require(q % 2 == 1, || "q must be odd".into())?;
        require(m >= 2, || "m must be at least 2".into())?;
        require(gcd(s as u64, 2 * m as u64) == 1, || format!("gcd(s, 2m) must be 1 (s = {s}, m = {m})"))?;
        field_for(q, 2 * m)
    }

    fn resolve_eta(field: &Field, eta: Option<Elem>) -> Result<Elem> {
        let eta = match eta {
            Some(e) => field.check(e)?,
            None => default_eta(field, |x| has_nonsquare_norm(field, x)).ok_or_else(|| invalid("no admissible eta"))?,
        };
        require(has_nonsquare_norm(field, eta), || format!("the norm of eta = {} must be a non-square", eta.0))?;
        Ok(eta)
    }

    /// `D_{k,s}(η)` over `F_{q^{2m}}`.
    pub fn tz(q: u64, m: u32, k: u32, s: u32, eta: Option<Elem>) -> Result<Code> {
        let field = Code::twisted_checks(q, m, s)?;
        require(k >= 1 && k < 2 * m, || format!("k must lie in 1..={}", 2 * m - 1))?;
        let eta = Code::resolve_eta(&field, eta)?;
        let ambient = Ambient::new(&field, None)?;
        let (deg, s) = (field.degree(), s as i64);
        let mut slots = vec![Slot::new(deg / 2).term(0, 0, Elem::ONE)];
        for j in 1..k as i64 {
            slots.push(Slot::new(deg).term(j * s, 0, Elem::ONE));
        }
        slots.push(Slot::new(deg / 2).term(k as i64 * s, 0, eta));
        let params = Params { q, n: 2 * m, k: Some(k), s: Some(s as u32), m: Some(m), eta: Some(eta.0), d: None };
        Code::from_slots(Family::Tz, params, ambient, &slots)
    }

    /// The twisted symmetric 2-code over `F_{q^{2m}}`.
    pub fn new_sym2(q: u64, m: u32, s: u32, eta: Option<Elem>) -> Result<Code> {
        let field = Code::twisted_checks(q, m, s)?;
        let eta = Code::resolve_eta(&field, eta)?;
        let ambient = Ambient::new(&field, Some(Setting::Symmetric))?;
        let (deg, e) = (field.degree(), field.step() as i64);
        let (m, s) = (m as i64, s as i64);
        let mut slots = vec![Slot::new(deg).term(0, 0, Elem::ONE)];
        for j in 1..=m - 2 {
            slots.push(Slot::new(deg).term(s * j, 0, Elem::ONE).term(s * (2 * m - j), e * s * (2 * m - j), Elem::ONE));
        }
        let eta_twist = field.frob(eta, s * (m + 1));
        slots.push(Slot::new(deg / 2).term(s * (m - 1), 0, eta).term(s * (m + 1), e * s, eta_twist));
        slots.push(Slot::new(deg / 2).term(s * m, 0, Elem::ONE));
        let params = Params { q, n: 2 * m as u32, d: Some(2), s: Some(s as u32), m: Some(m as u32), eta: Some(eta.0), k: None };
        Code::from_slots(Family::NewSym2, params, ambient, &slots)
    }

    /// The whole restricted space as a code.
    pub fn ambient_code(ambient: &Ambient) -> Result<Code> {
        let params = Params { q: ambient.q(), n: ambient.n() as u32, d: Some(1), ..Params::default() };
        Ok(Code { family: Family::Ambient, params, ambient: ambient.clone(), kind: Kind::Linpoly, basis: ambient.basis()?, complement: None })
    }

    /// The kernel-condition subspace of `G_{n+1,n-d+2,s} ∘ x^{q^{s(n+d+1)/2}}` over `F_{q^{n+1}}`.
    pub fn kernel_subspace(field: &Arc<Field>, n: u32, d: u32, s: u32, eta: Elem) -> Result<Subspace> {
        let ambient = Ambient::new(field, None)?;
        let big_n = n as i64 + 1;
        let s = s as i64;
        let mut rows = Vec::new();
        let mut idx: Vec<i64> = Vec::new();
        for i in 1..=(n as i64 - d as i64 + 1) / 2 {
            idx.push(s * i);
            idx.push(s * (big_n - i));
        }
        for &t in &idx {
            // c (x^{q^t} - x η^{q^t - 1})
            let ratio = field.div(field.frob(eta, t), eta)?;
            for c in field.subfield_basis(field.degree(), field.step())? {
                let f = LinPoly::monomial(field, c, t)
                    .sub(&LinPoly::monomial(field, field.mul(c, ratio), 0))?;
                rows.push(ambient.vectorize(&f)?);
            }
        }
        Subspace::span(field, field.step(), ambient.vector_len(), &rows)
    }

    /// `T_{n,d,s}(η)`: symmetric maps of `F_{q^{n+1}}` killing `η`, restricted to a complement of `⟨η⟩`.
    pub fn punctured_t(q: u64, n: u32, d: u32, s: u32, eta: Option<Elem>) -> Result<Code> {
        require(gcd(s as u64, n as u64 + 1) == 1, || format!("gcd(s, n + 1) must be 1 (s = {s}, n = {n})"))?;
        require(d >= 1 && d < n, || format!("d must lie in 1..={}", n - 1))?;
        require((n - d) % 2 == 1, || "n - d must be odd".into())?;
        let field = field_for(q, n + 1)?;
        let eta = match eta {
            Some(e) => field.check(e)?,
            None => Elem::ONE,
        };
        require(!eta.is_zero(), || "eta must be nonzero".into())?;
        let sym = Ambient::new(&field, Some(Setting::Symmetric))?;
        let u = Code::kernel_subspace(&field, n, d, s, eta)?.intersect(&sym.basis()?)?;
        let v = ambient::complement(&field, eta)?;
        let restricted = restrict_subspace(&sym, &u, &v)?;
        let params = Params { q, n, d: Some(d), s: Some(s), eta: Some(eta.0), ..Params::default() };
        Ok(Code { family: Family::PuncturedT, params, ambient: sym, kind: Kind::GramOnV, basis: restricted, complement: Some(v) })
    }

    /// Builds a family member from its parameter record. `n` is ignored for the
    /// families indexed by `m`.
    pub fn build(family: Family, p: &Params) -> Result<Code> {
        let need = |v: Option<u32>, name: &str| v.ok_or_else(|| invalid(format!("{family} needs --{name}")));
        let s = p.s.unwrap_or(1);
        let eta = p.eta.map(Elem);
        match family {
            Family::Gabidulin => Code::gabidulin(p.q, p.n, need(p.k, "k")?, s),
            Family::SchmidtSym => Code::schmidt_sym(p.q, p.n, need(p.d, "d")?, s),
            Family::DgAlt => Code::dg_alt(p.q, p.n, need(p.d, "d")?, s),
            Family::HermitianH => Code::hermitian_h(p.q, p.n, need(p.d, "d")?, s),
            Family::HermitianE => Code::hermitian_e(p.q, p.n, need(p.d, "d")?, s),
            Family::PuncturedT => Code::punctured_t(p.q, p.n, need(p.d, "d")?, s, eta),
            Family::Tz => Code::tz(p.q, need(p.m, "m")?, need(p.k, "k")?, s, eta),
            Family::NewSym2 => Code::new_sym2(p.q, need(p.m, "m")?, s, eta),
            Family::Ambient | Family::Derived => Err(invalid(format!("{family} codes are not built from parameters"))),
        }
    }

    /// The field a family member lives over.
    pub fn field_of(family: Family, p: &Params) -> Result<Arc<Field>> {
        match family {
            Family::HermitianH | Family::HermitianE => hermitian_field(p.q, p.n),
            Family::PuncturedT => field_for(p.q, p.n + 1),
            Family::Tz | Family::NewSym2 => field_for(p.q, 2 * p.m.ok_or_else(|| invalid(format!("{family} needs --m")))?),
            _ => field_for(p.q, p.n),
        }
    }

    /// Expected `F_q`-dimension by the family formula.
    pub fn expected_dim(&self) -> Option<usize> {
        let p = &self.params;
        let n = p.n as usize;
        let d = p.d.map(|d| d as usize);
        Some(match self.family {
            Family::Gabidulin => {
                let k = p.k? as usize;
                n * k * if self.ambient.is_hermitian_tower() { 2 } else { 1 }
            }
            Family::SchmidtSym => n * (n - d? + 2) / 2,
            Family::DgAlt => n * ((n - 1) / 2 - d? / 2 + 1),
            Family::HermitianH | Family::HermitianE => n * (n - d? + 1),
            Family::PuncturedT => (n + 1) * (n - d? + 1) / 2,
            Family::Tz => n * p.k? as usize,
            Family::NewSym2 => n * n / 2,
            Family::Ambient => self.ambient.expected_dim(),
            Family::Derived => return None,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        self.ambient.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Side length of the matrices whose ranks measure distance.
    pub fn matrix_size(&self) -> usize {
        match self.kind {
            Kind::Linpoly => self.ambient.n(),
            Kind::GramOnV => self.params.n as usize,
        }
    }

    /// Polynomials of the canonical basis.
    pub fn polys(&self) -> Result<Vec<LinPoly>> {
        self.expect_linpoly()?;
        self.basis.rows().iter().map(|r| self.ambient.devectorize(r)).collect()
    }

    pub fn expect_linpoly(&self) -> Result<()> {
        match self.kind {
            Kind::Linpoly => Ok(()),
            Kind::GramOnV => Err(Error::WrongKind("operation needs polynomial codewords".into())),
        }
    }

    /// Matrix whose rank is the weight of the codeword `v`.
    pub fn rank_matrix(&self, v: &[Elem]) -> Result<Matrix> {
        match self.kind {
            Kind::Linpoly => Ok(self.ambient.devectorize(v)?.matrix()),
            Kind::GramOnV => {
                let n = self.matrix_size();
                if v.len() != n * n {
                    return Err(Error::Ragged { expected: n * n, found: v.len() });
                }
                Ok(Matrix::from_flat(n, n, v.to_vec()))
            }
        }
    }

    pub fn contains(&self, f: &LinPoly) -> Result<bool> {
        self.expect_linpoly()?;
        self.basis.contains(&self.ambient.vectorize(f)?)
    }

    /// Applies `op` to every basis polynomial; the result lives in `ambient`.
    pub fn map(&self, ambient: &Ambient, op: impl Fn(&LinPoly) -> Result<LinPoly>) -> Result<Code> {
        self.expect_linpoly()?;
        let basis = self.basis.map_rows(ambient.vector_len(), |r| ambient.vectorize(&op(&self.ambient.devectorize(r)?)?))?;
        Ok(Code {
            family: Family::Derived,
            params: self.params.clone(),
            ambient: ambient.clone(),
            kind: Kind::Linpoly,
            basis,
            complement: None,
        })
    }

    /// `C ∘ x^{q^t}` (powers of the field's step).
    pub fn compose_right(&self, t: i64) -> Result<Code> {
        let ambient = self.ambient.unrestricted();
        self.map(&ambient, |f| Ok(f.shift(t)))
    }

    /// `{f^⊤ : f ∈ C}`.
    pub fn adjoint(&self) -> Result<Code> {
        let mut c = self.map(&self.ambient, |f| Ok(f.adjoint()))?;
        c.family = self.family;
        Ok(c)
    }

    /// `{f̃ : f ∈ C}` for Hermitian towers.
    pub fn tilde(&self) -> Result<Code> {
        let mut c = self.map(&self.ambient, |f| f.tilde())?;
        c.family = self.family;
        Ok(c)
    }

    /// `C ∩ X` where `X` is the restricted space `setting` over the same field.
    pub fn restrict_to(&self, setting: Setting) -> Result<Code> {
        let ambient = self.ambient.with_setting(setting)?;
        let basis = self.basis.intersect(&ambient.basis()?)?;
        Ok(Code { family: Family::Derived, params: self.params.clone(), ambient, kind: Kind::Linpoly, basis, complement: None })
    }

    /// Whether every basis codeword lies in the restricted ambient space.
    pub fn in_ambient(&self) -> Result<bool> {
        match self.kind {
            Kind::Linpoly => {
                for f in self.polys()? {
                    if !self.ambient.contains(&f)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Kind::GramOnV => {
                let n = self.matrix_size();
                Ok(self.basis.rows().iter().all(|r| (0..n).all(|i| (0..n).all(|j| r[i * n + j] == r[j * n + i]))))
            }
        }
    }
}

/// Restrictions to `v` of the maps spanned by `u`, as row-major Gram vectors.
pub fn restrict_subspace(ambient: &Ambient, u: &Subspace, v: &[Elem]) -> Result<Subspace> {
    let rows = u
        .rows()
        .iter()
        .map(|r| Ok(ambient::restrict(&ambient.devectorize(r)?, v).matrix.data().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Subspace::span(ambient.field(), ambient.scalar_degree(), v.len() * v.len(), &rows)
}

//! Rank-preserving maps, monomial automorphism censuses and equivalence searches.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{Code, Family};
use crate::error::{invalid, Error, Result};
use crate::field::{Elem, Field};
use crate::linpoly::{same_field, LinPoly, Setting};
use crate::matrix::rref_rows;

/// Default cap on `(g, ρ)` candidates for a full search.
pub const SEARCH_BUDGET: u128 = 1 << 34;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapMode {
    Phi,
    Psi,
    Theta,
}

/// `f ↦ a · g ∘ f^ρ ∘ R` where `R` is `g^⊤` (psi), the twisted adjoint of `g`
/// (theta), or an explicit right factor (phi).
#[derive(Clone, Debug, PartialEq)]
pub struct EquivMap {
    pub mode: MapMode,
    pub a: Elem,
    pub g: LinPoly,
    pub rho: i64,
    pub right: Option<LinPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub mode: MapMode,
    pub a: u32,
    pub g_coeffs: Vec<u32>,
    pub rho: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_coeffs: Option<Vec<u32>>,
}

impl EquivMap {
    fn checked(mode: MapMode, a: Elem, g: LinPoly, rho: i64, right: Option<LinPoly>) -> Result<EquivMap> {
        if a.is_zero() {
            return Err(invalid("the scalar a must be nonzero"));
        }
        if !g.is_invertible() || right.as_ref().is_some_and(|r| !r.is_invertible()) {
            return Err(Error::NotInvertible);
        }
        if let Some(r) = &right {
            same_field(g.field(), r.field())?;
        }
        if mode == MapMode::Theta && !g.field().step().is_multiple_of(2) {
            return Err(Error::WrongKind("theta maps act on q²-polynomials".into()));
        }
        Ok(EquivMap { mode, a, g, rho, right })
    }

    pub fn psi(a: Elem, g: LinPoly, rho: i64) -> Result<EquivMap> {
        EquivMap::checked(MapMode::Psi, a, g, rho, None)
    }

    pub fn theta(a: Elem, g: LinPoly, rho: i64) -> Result<EquivMap> {
        EquivMap::checked(MapMode::Theta, a, g, rho, None)
    }

    pub fn phi(a: Elem, left: LinPoly, rho: i64, right: LinPoly) -> Result<EquivMap> {
        EquivMap::checked(MapMode::Phi, a, left, rho, Some(right))
    }

    pub fn identity(field: &Arc<Field>) -> EquivMap {
        EquivMap { mode: MapMode::Psi, a: Elem::ONE, g: LinPoly::identity(field), rho: 0, right: None }
    }

    /// The monomial map with `g = γ x^{q^r}` (psi) or `g = γ^q x^{q^{2r}}` (theta).
    pub fn monomial(mode: MapMode, field: &Arc<Field>, a: Elem, gamma: Elem, r: i64, rho: i64) -> Result<EquivMap> {
        match mode {
            MapMode::Psi => EquivMap::psi(a, LinPoly::monomial(field, gamma, r), rho),
            MapMode::Theta => {
                let half = (field.step() / 2) as i64;
                EquivMap::theta(a, LinPoly::monomial(field, field.frob_p(gamma, half), r), rho)
            }
            MapMode::Phi => Err(invalid("monomial maps are psi or theta maps")),
        }
    }

    pub fn right_factor(&self) -> LinPoly {
        match self.mode {
            MapMode::Psi => self.g.adjoint(),
            MapMode::Theta => {
                let f = self.g.field();
                let half = (f.step() / 2) as i64;
                self.g.adjoint().frobtwist(half * (2 * f.n() as i64 - 1))
            }
            MapMode::Phi => self.right.clone().expect("phi maps carry a right factor"),
        }
    }

    pub fn apply(&self, f: &LinPoly) -> Result<LinPoly> {
        same_field(self.g.field(), f.field())?;
        let inner = f.frobtwist(self.rho).compose(&self.right_factor())?;
        Ok(self.g.compose(&inner)?.scale(self.a))
    }

    pub fn apply_code(&self, code: &Code) -> Result<Code> {
        let right = self.right_factor();
        let mut out = code.map(&code.ambient, |f| Ok(self.g.compose(&f.frobtwist(self.rho).compose(&right)?)?.scale(self.a)))?;
        out.family = Family::Derived;
        Ok(out)
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            mode: self.mode,
            a: self.a.0,
            g_coeffs: self.g.coeffs().iter().map(|c| c.0).collect(),
            rho: self.rho,
            right_coeffs: self.right.as_ref().map(|r| r.coeffs().iter().map(|c| c.0).collect()),
        }
    }

    pub fn from_json(field: &Arc<Field>, m: &MapJson) -> Result<EquivMap> {
        let poly = |v: &[u32]| LinPoly::new(field, v.iter().map(|&x| Elem(x)).collect());
        let right = m.right_coeffs.as_deref().map(poly).transpose()?;
        EquivMap::checked(m.mode, field.check(Elem(m.a))?, poly(&m.g_coeffs)?, m.rho, right)
    }
}

/// A random map of the mode fitting `code`'s ambient space.
pub fn random_map(code: &Code, rng: &mut impl Rng) -> Result<EquivMap> {
    let field = code.field();
    let scalars = field.subfield_elements(code.ambient.scalar_degree())?;
    let a = scalars[rng.gen_range(1..scalars.len())];
    let rho = rng.gen_range(0..field.degree()) as i64;
    loop {
        let coeffs = (0..field.n()).map(|_| Elem(rng.gen_range(0..field.size()))).collect();
        let g = LinPoly::new(field, coeffs)?;
        if !g.is_invertible() {
            continue;
        }
        return match code.ambient.setting() {
            Some(Setting::Hermitian) => EquivMap::theta(a, g, rho),
            _ => EquivMap::psi(a, g, rho),
        };
    }
}

fn mode_for(code: &Code) -> MapMode {
    if code.ambient.setting() == Some(Setting::Hermitian) {
        MapMode::Theta
    } else {
        MapMode::Psi
    }
}

/// Whether `map` sends every basis polynomial of `from` into `to`.
fn maps_into(map: &EquivMap, from: &[LinPoly], to: &Code) -> Result<bool> {
    for f in from {
        if !to.contains(&map.apply(f)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialTuple {
    pub a: u32,
    pub gamma: u32,
    pub r: u32,
    pub rho: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub mode: Option<MapMode>,
    pub tuples: u64,
    pub fixing: u64,
    /// Fixing tuples whose Frobenius twist is a power of the step, so that the
    /// map equals an untwisted monomial map.
    pub fixing_in_pattern: u64,
    pub in_pattern: u64,
    pub outside_pattern: Vec<MonomialTuple>,
    pub not_fixing_in_pattern: Vec<MonomialTuple>,
}

/// Every `(a, γ, r, ρ)` with `a ∈ F_q^*`, `γ ∈ F_Q^*`, `r < n`, `ρ < M`,
/// tested for fixing `code` setwise.
pub fn monomial_aut_census(code: &Code, budget: u128) -> Result<Census> {
    code.expect_linpoly()?;
    let field = code.field().clone();
    let mode = mode_for(code);
    let scalars: Vec<Elem> = field.subfield_elements(code.ambient.scalar_degree())?[1..].to_vec();
    let gammas: Vec<Elem> = field.subfield_elements(field.degree())?[1..].to_vec();
    let (n, m) = (field.n(), field.degree());
    let tuples = scalars.len() as u128 * gammas.len() as u128 * n as u128 * m as u128;
    if tuples > budget {
        return Err(Error::BudgetExceeded { required: tuples, budget });
    }
    let basis = code.polys()?;
    let step = field.step();
    let count = gammas.len();
    let rows: Vec<(u32, u32, Elem)> =
        (0..m).flat_map(|rho| (0..n).flat_map(move |r| (0..count).map(move |k| (rho, r, Elem(k as u32))))).collect();
    let results: Vec<Vec<(MonomialTuple, bool)>> = rows
        .par_iter()
        .map(|&(rho, r, k)| {
            let gamma = gammas[k.0 as usize];
            scalars
                .iter()
                .map(|&a| {
                    let map = EquivMap::monomial(mode, &field, a, gamma, r as i64, rho as i64)?;
                    let fixes = maps_into(&map, &basis, code)?;
                    Ok((MonomialTuple { a: a.0, gamma: gamma.0, r, rho }, fixes))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut census = Census { mode: Some(mode), ..Census::default() };
    for (t, fixes) in results.into_iter().flatten() {
        census.tuples += 1;
        let in_pattern = t.rho % step == 0;
        census.in_pattern += in_pattern as u64;
        if fixes {
            census.fixing += 1;
            if in_pattern {
                census.fixing_in_pattern += 1;
            } else {
                census.outside_pattern.push(t);
            }
        } else if in_pattern {
            census.not_fixing_in_pattern.push(t);
        }
    }
    Ok(census)
}

#[derive(Clone, Debug)]
pub struct MonomialSearch {
    pub map: Option<EquivMap>,
    pub candidates_scanned: u64,
}

/// First monomial map, in `(ρ, r, γ = π^k, a)` order, sending `c1` onto `c2`.
pub fn monomial_equiv_search(c1: &Code, c2: &Code) -> Result<Option<EquivMap>> {
    Ok(monomial_search_counted(c1, c2)?.map)
}

pub fn monomial_search_counted(c1: &Code, c2: &Code) -> Result<MonomialSearch> {
    c1.expect_linpoly()?;
    c2.expect_linpoly()?;
    same_field(c1.field(), c2.field())?;
    if c1.ambient != c2.ambient {
        return Err(Error::AmbientMismatch(c1.ambient.vector_len(), c2.ambient.vector_len()));
    }
    let mut out = MonomialSearch { map: None, candidates_scanned: 0 };
    if c1.dim() != c2.dim() {
        return Ok(out);
    }
    let field = c1.field().clone();
    let mode = mode_for(c1);
    let scalars: Vec<Elem> = field.subfield_elements(c1.ambient.scalar_degree())?[1..].to_vec();
    let gammas: Vec<Elem> = field.subfield_elements(field.degree())?[1..].to_vec();
    let basis = c1.polys()?;
    for rho in 0..field.degree() as i64 {
        for r in 0..field.n() as i64 {
            for &gamma in &gammas {
                for &a in &scalars {
                    let map = EquivMap::monomial(mode, &field, a, gamma, r, rho)?;
                    out.candidates_scanned += 1;
                    if maps_into(&map, &basis, c2)? {
                        out.map = Some(map);
                        return Ok(out);
                    }
                }
            }
        }
    }
    Ok(out)
}

// ----- full search -----------------------------------------------------------

trait Arith: Sync {
    fn mul(&self, a: u32, b: u32) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn frob(&self, x: u32, k: usize) -> u32;
}

/// Dense product, sum and Frobenius tables for small fields.
struct Tables {
    size: usize,
    mul: Vec<u16>,
    add: Vec<u16>,
    frob: Vec<u16>,
}

const TABLE_FIELD_LIMIT: u32 = 1024;

impl Tables {
    fn new(field: &Field) -> Tables {
        let size = field.size() as usize;
        let mut mul = vec![0u16; size * size];
        let mut add = vec![0u16; size * size];
        for a in 0..size {
            for b in 0..size {
                mul[a * size + b] = field.mul(Elem(a as u32), Elem(b as u32)).0 as u16;
                add[a * size + b] = field.add(Elem(a as u32), Elem(b as u32)).0 as u16;
            }
        }
        let n = field.n() as usize;
        let mut frob = vec![0u16; n * size];
        for k in 0..n {
            for x in 0..size {
                frob[k * size + x] = field.frob(Elem(x as u32), k as i64).0 as u16;
            }
        }
        Tables { size, mul, add, frob }
    }
}

impl Arith for Tables {
    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.size + b as usize] as u32
    }
    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.size + b as usize] as u32
    }
    #[inline(always)]
    fn frob(&self, x: u32, k: usize) -> u32 {
        self.frob[k * self.size + x as usize] as u32
    }
}

impl Arith for Field {
    fn mul(&self, a: u32, b: u32) -> u32 {
        Field::mul(self, Elem(a), Elem(b)).0
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        Field::add(self, Elem(a), Elem(b)).0
    }
    fn frob(&self, x: u32, k: usize) -> u32 {
        Field::frob(self, Elem(x), k as i64).0
    }
}

/// Membership test for a code via packed `F_p` syndromes.
///
/// The syndrome of a polynomial is the sum over coefficients of per-coefficient
/// lookups; each parity check occupies one lane of `width` bits and a lane is
/// satisfied when its accumulated value is divisible by `p`.
struct Syndromes {
    words: usize,
    width: u32,
    /// `table[(k * size + x) * words + w]`
    table: Vec<u64>,
    /// Whether all lanes of a 16-bit chunk are multiples of `p`.
    chunk_ok: Vec<bool>,
    size: usize,
    xor: bool,
}

impl Syndromes {
    fn new(code: &Code) -> Result<Syndromes> {
        let field = code.field();
        let p = field.p();
        let n = code.ambient.n();
        let size = field.size() as usize;
        let digits_per = field.degree() as usize;
        let len = n * digits_per;
        // F_p generators of the code as digit vectors
        let mut gens: Vec<Vec<Elem>> = Vec::new();
        for row in code.basis.prime_generators() {
            let f = code.ambient.devectorize(&row)?;
            gens.push(f.coeffs().iter().flat_map(|&c| field.digits(c)).map(Elem).collect());
        }
        let prime = Field::new(p, 1, 1)?;
        let pivots = rref_rows(&prime, &mut gens);
        // parity checks: null space of the generator matrix
        let free: Vec<usize> = (0..len).filter(|c| !pivots.contains(c)).collect();
        let checks: Vec<Vec<u32>> = free
            .iter()
            .map(|&fc| {
                let mut h = vec![0u32; len];
                h[fc] = 1;
                for (row, &pc) in gens.iter().zip(&pivots) {
                    h[pc] = prime.neg(row[fc]).0;
                }
                h
            })
            .collect();
        let xor = p == 2;
        let max_lane = if xor { 1 } else { n as u64 * (p as u64 - 1) };
        let bits = 64 - max_lane.leading_zeros();
        let width = bits.next_power_of_two();
        if width > 16 {
            return Err(invalid("syndrome lanes too wide"));
        }
        let per_word = (64 / width) as usize;
        let words = checks.len().div_ceil(per_word).max(1);
        let mut table = vec![0u64; n * size * words];
        for k in 0..n {
            for x in 0..size {
                let d = field.digits(Elem(x as u32));
                for (ci, h) in checks.iter().enumerate() {
                    let v = (0..digits_per).map(|t| h[k * digits_per + t] * d[t]).sum::<u32>() % p;
                    let (w, lane) = (ci / per_word, ci % per_word);
                    table[(k * size + x) * words + w] |= (v as u64) << (lane as u32 * width);
                }
            }
        }
        let lanes_per_chunk = 16 / width;
        let mask = (1u32 << width) - 1;
        let chunk_ok = (0..1u32 << 16)
            .map(|c| (0..lanes_per_chunk).all(|l| ((c >> (l * width)) & mask).is_multiple_of(p)))
            .collect();
        Ok(Syndromes { words, width, table, chunk_ok, size, xor })
    }

    #[inline(always)]
    fn contains(&self, coeffs: &[u32], acc: &mut [u64]) -> bool {
        acc.fill(0);
        for (k, &x) in coeffs.iter().enumerate() {
            let base = (k * self.size + x as usize) * self.words;
            for (w, a) in acc.iter_mut().enumerate() {
                if self.xor {
                    *a ^= self.table[base + w];
                } else {
                    *a += self.table[base + w];
                }
            }
        }
        let _ = self.width;
        acc.iter().all(|&a| {
            (0..4).all(|c| self.chunk_ok[((a >> (16 * c)) & 0xffff) as usize])
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardStats {
    pub shard: usize,
    pub shards: usize,
    pub candidates_scanned: u128,
    pub rejected_first: u128,
    pub survivors_first: u128,
    pub full_survivors: u128,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct ShardResult {
    pub stats: ShardStats,
    /// First hit in scan order: `(ρ, g index, map)`.
    pub found: Option<(u32, u128, EquivMap)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapJson>,
    pub candidates_scanned: u128,
    pub elapsed_ms: u128,
    pub rejected_first: u128,
    pub rejection_rate: f64,
    pub a_values: u64,
    pub rho_values: u32,
    pub shards: Vec<ShardStats>,
    pub adjoint_closure: String,
    /// The map sends `c1` onto the adjoint of `c2`.
    #[serde(default)]
    pub via_adjoint: bool,
    /// Scan position `(ρ, g index)` of the reported map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hit: Option<(u32, u128)>,
}

/// Full search over `g ∈ F_Q^n`, `ρ < M`; `shard` is `(i, N)` over the leading coefficient.
pub struct FullSearch {
    c1: Code,
    c2: Code,
    first: usize,
    basis: Vec<LinPoly>,
    syndromes: Syndromes,
    tables: Option<Tables>,
}

impl FullSearch {
    pub fn new(c1: &Code, c2: &Code) -> Result<FullSearch> {
        c1.expect_linpoly()?;
        c2.expect_linpoly()?;
        same_field(c1.field(), c2.field())?;
        if c1.ambient != c2.ambient {
            return Err(Error::AmbientMismatch(c1.ambient.vector_len(), c2.ambient.vector_len()));
        }
        if mode_for(c1) != MapMode::Psi {
            return Err(Error::WrongKind("full search runs on symmetric or alternating codes".into()));
        }
        let basis = c1.polys()?;
        if basis.is_empty() {
            return Err(invalid("the source code is zero"));
        }
        let ranks: Vec<usize> = basis.iter().map(|f| f.rank()).collect();
        let best = *ranks.iter().max().expect("nonempty");
        let first = ranks.iter().position(|&r| r == best).expect("nonempty");
        let field = c1.field();
        let tables = (field.size() <= TABLE_FIELD_LIMIT).then(|| Tables::new(field));
        Ok(FullSearch { c1: c1.clone(), c2: c2.clone(), first, basis, syndromes: Syndromes::new(c2)?, tables })
    }

    pub fn candidates(&self) -> u128 {
        let f = self.c1.field();
        (f.size() as u128).pow(f.n()) * f.degree() as u128
    }

    fn shard_range(&self, shard: usize, shards: usize) -> (u128, u128) {
        let f = self.c1.field();
        let q = f.size() as u128;
        let lead = q.pow(f.n() - 1);
        let lo = q * shard as u128 / shards as u128;
        let hi = q * (shard as u128 + 1) / shards as u128;
        (lo * lead, hi * lead)
    }

    pub fn run_shard(&self, shard: usize, shards: usize) -> Result<ShardResult> {
        if shards == 0 || shard >= shards {
            return Err(invalid(format!("invalid shard {shard}/{shards}")));
        }
        match &self.tables {
            Some(t) => self.scan(t, shard, shards),
            None => self.scan(&**self.c1.field(), shard, shards),
        }
    }

    fn scan<A: Arith>(&self, ar: &A, shard: usize, shards: usize) -> Result<ShardResult> {
        let start = Instant::now();
        let field = self.c1.field();
        let n = field.n() as usize;
        let q = field.size() as u128;
        let (lo, hi) = self.shard_range(shard, shards);
        let mut stats = ShardStats { shard, shards, ..ShardStats::default() };
        let target_rank = self.basis[self.first].rank();
        let mut acc = vec![0u64; self.syndromes.words];
        let mut y = vec![0u32; n];
        let mut x = vec![0u32; n];
        for rho in 0..field.degree() {
            let f: Vec<u32> = self.basis[self.first].frobtwist(rho as i64).coeffs().iter().map(|c| c.0).collect();
            let mut g = vec![0u32; n];
            let mut rest = lo;
            for gi in g.iter_mut() {
                *gi = (rest % q) as u32;
                rest /= q;
            }
            let mut idx = lo;
            while idx < hi {
                stats.candidates_scanned += 1;
                // Y = f ∘ g^⊤, X = g ∘ Y
                for (k, yk) in y.iter_mut().enumerate() {
                    let mut s = 0u32;
                    for (j, &fj) in f.iter().enumerate() {
                        if fj != 0 {
                            let gv = g[(j + n - k) % n];
                            if gv != 0 {
                                s = ar.add(s, ar.mul(fj, ar.frob(gv, k)));
                            }
                        }
                    }
                    *yk = s;
                }
                for (k, xk) in x.iter_mut().enumerate() {
                    let mut s = 0u32;
                    for (i, &gi) in g.iter().enumerate() {
                        if gi != 0 {
                            let yv = y[(k + n - i) % n];
                            if yv != 0 {
                                s = ar.add(s, ar.mul(gi, ar.frob(yv, i)));
                            }
                        }
                    }
                    *xk = s;
                }
                let pass = self.syndromes.contains(&x, &mut acc) && {
                    let xp = LinPoly::from_vec_unchecked(field, x.iter().map(|&v| Elem(v)).collect());
                    xp.rank() == target_rank
                };
                if pass {
                    stats.survivors_first += 1;
                    if let Some(map) = self.complete(&g, rho as i64)? {
                        stats.full_survivors += 1;
                        stats.elapsed_ms = start.elapsed().as_millis();
                        return Ok(ShardResult { stats, found: Some((rho, idx, map)) });
                    }
                } else {
                    stats.rejected_first += 1;
                }
                idx += 1;
                for gi in g.iter_mut() {
                    *gi += 1;
                    if (*gi as u128) < q {
                        break;
                    }
                    *gi = 0;
                }
            }
        }
        stats.elapsed_ms = start.elapsed().as_millis();
        Ok(ShardResult { stats, found: None })
    }

    /// Checks the remaining basis elements, invertibility and the scalar.
    fn complete(&self, g: &[u32], rho: i64) -> Result<Option<EquivMap>> {
        let field = self.c1.field();
        let g = LinPoly::new(field, g.iter().map(|&v| Elem(v)).collect())?;
        if !g.is_invertible() {
            return Ok(None);
        }
        let scalars: Vec<Elem> = field.subfield_elements(self.c1.ambient.scalar_degree())?[1..].to_vec();
        for a in scalars {
            let map = EquivMap::psi(a, g.clone(), rho)?;
            if maps_into(&map, &self.basis, &self.c2)? && self.c1.dim() == self.c2.dim() {
                return Ok(Some(map));
            }
        }
        Ok(None)
    }
}

/// Which shards of a plan to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShardPlan {
    pub shards: usize,
    pub only: Option<usize>,
}

impl ShardPlan {
    pub fn all(shards: usize) -> ShardPlan {
        ShardPlan { shards, only: None }
    }

    /// Parses `i/N`.
    pub fn parse(text: &str) -> Result<ShardPlan> {
        let (i, n) = text.split_once('/').ok_or_else(|| invalid(format!("shard {text:?} is not of the form i/N")))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| invalid(format!("bad shard {text:?}")));
        let (i, n) = (parse(i)?, parse(n)?);
        if n == 0 || i >= n {
            return Err(invalid(format!("invalid shard {i}/{n}")));
        }
        Ok(ShardPlan { shards: n, only: Some(i) })
    }

    fn indices(&self) -> Vec<usize> {
        match self.only {
            Some(i) => vec![i],
            None => (0..self.shards).collect(),
        }
    }
}

/// Runs every shard (with at most `jobs` in parallel) and merges by scan order.
pub fn full_equiv_search(c1: &Code, c2: &Code, shards: usize, jobs: usize, budget: u128) -> Result<SearchReport> {
    full_equiv_search_plan(c1, c2, ShardPlan::all(shards), jobs, budget)
}

pub fn full_equiv_search_plan(c1: &Code, c2: &Code, plan: ShardPlan, jobs: usize, budget: u128) -> Result<SearchReport> {
    let start = Instant::now();
    let mut report = search_against(c1, c2, plan, jobs, budget)?;
    if c2.adjoint()? == *c2 {
        report.adjoint_closure = "skipped: the target code is closed under adjoints".into();
    } else if !report.found {
        let other = search_against(c1, &c2.adjoint()?, plan, jobs, budget)?;
        report.candidates_scanned += other.candidates_scanned;
        report.rejected_first += other.rejected_first;
        report.shards.extend(other.shards);
        report.found = other.found;
        report.map = other.map;
        report.hit = other.hit;
        report.via_adjoint = other.found;
        report.adjoint_closure = "ran against the adjoint code".into();
    }
    report.rejection_rate = report.rejected_first as f64 / report.candidates_scanned.max(1) as f64;
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

fn search_against(c1: &Code, c2: &Code, plan: ShardPlan, jobs: usize, budget: u128) -> Result<SearchReport> {
    let search = FullSearch::new(c1, c2)?;
    let required = search.candidates();
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let results: Vec<ShardResult> =
        pool.install(|| plan.indices().into_par_iter().map(|i| search.run_shard(i, plan.shards)).collect::<Result<Vec<_>>>())?;
    Ok(merge(c1, results))
}

/// Merges shard results, keeping the first hit in `(ρ, g index)` order.
pub fn merge(c1: &Code, results: Vec<ShardResult>) -> SearchReport {
    let field = c1.field();
    let best = results.iter().filter_map(|r| r.found.as_ref()).min_by_key(|(rho, idx, _)| (*rho, *idx));
    let scalars = c1.ambient.q() - 1;
    SearchReport {
        found: best.is_some(),
        map: best.map(|(_, _, m)| m.to_json()),
        candidates_scanned: results.iter().map(|r| r.stats.candidates_scanned).sum(),
        elapsed_ms: 0,
        rejected_first: results.iter().map(|r| r.stats.rejected_first).sum(),
        rejection_rate: 0.0,
        a_values: scalars,
        rho_values: field.degree(),
        adjoint_closure: "not run".into(),
        via_adjoint: false,
        hit: best.map(|(rho, idx, _)| (*rho, *idx)),
        shards: results.into_iter().map(|r| r.stats).collect(),
    }
}

/// Combines reports of disjoint shards of one plan, keeping the first hit in scan order.
pub fn merge_reports(reports: Vec<SearchReport>) -> Option<SearchReport> {
    let mut it = reports.into_iter();
    let mut acc = it.next()?;
    for r in it {
        acc.candidates_scanned += r.candidates_scanned;
        acc.rejected_first += r.rejected_first;
        acc.elapsed_ms += r.elapsed_ms;
        acc.shards.extend(r.shards);
        let better = match (&acc.hit, &r.hit) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(a), Some(b)) => (r.via_adjoint, *b) < (acc.via_adjoint, *a),
        };
        if better {
            acc.found = r.found;
            acc.map = r.map;
            acc.hit = r.hit;
            acc.via_adjoint = r.via_adjoint;
        }
    }
    acc.shards.sort_by_key(|s| s.shard);
    acc.rejection_rate = acc.rejected_first as f64 / acc.candidates_scanned.max(1) as f64;
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_rank_preservation() {
        let code = Code::schmidt_sym(2, 4, 2, 1).unwrap();
        let field = code.field().clone();
        let id = EquivMap::identity(&field);
        for f in code.polys().unwrap() {
            assert_eq!(id.apply(&f).unwrap(), f);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let m = random_map(&code, &mut rng).unwrap();
            let coeffs = (0..4).map(|_| Elem(rng.gen_range(0..16))).collect();
            let f = LinPoly::new(&field, coeffs).unwrap();
            assert_eq!(m.apply(&f).unwrap().rank(), f.rank());
        }
    }

    #[test]
    fn json_round_trip() {
        let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_map(&code, &mut rng).unwrap();
        let back = EquivMap::from_json(code.field(), &m.to_json()).unwrap();
        assert_eq!(back, m);
        let bad = MapJson { g_coeffs: vec![0; 4], ..m.to_json() };
        assert!(matches!(EquivMap::from_json(code.field(), &bad), Err(Error::NotInvertible)));
    }

    #[test]
    fn syndromes_agree_with_subspace_membership() {
        let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
        let syn = Syndromes::new(&code).unwrap();
        let mut acc = vec![0u64; syn.words];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let elems = code.basis.elements(1 << 16).unwrap();
        for v in elems.iter().step_by(37) {
            let f = code.ambient.devectorize(v).unwrap();
            let c: Vec<u32> = f.coeffs().iter().map(|c| c.0).collect();
            assert!(syn.contains(&c, &mut acc));
        }
        for _ in 0..500 {
            let c: Vec<u32> = (0..4).map(|_| rng.gen_range(0..81)).collect();
            let f = LinPoly::new(code.field(), c.iter().map(|&x| Elem(x)).collect()).unwrap();
            assert_eq!(syn.contains(&c, &mut acc), code.contains(&f).unwrap());
        }
    }
}

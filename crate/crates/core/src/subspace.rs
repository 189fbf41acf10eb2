//! Subspaces of `F_r^N` for a subfield `F_r` of a [`Field`], kept in reduced
//! row echelon form, plus Gray-code enumeration of their elements.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linpoly::same_field;
use crate::matrix::rref_rows;

/// Default cap on the number of vectors an enumeration may visit.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// The enumeration budget, overridable through `RMLAB_BUDGET`.
pub fn budget_from_env() -> u128 {
    std::env::var("RMLAB_BUDGET").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Subset,
    Superset,
    Incomparable,
}

#[derive(Clone)]
pub struct Subspace {
    field: Arc<Field>,
    scalar_degree: u32,
    ambient: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.scalar_degree == other.scalar_degree
            && self.rows == other.rows
            && *self.field == *other.field
    }
}

impl Eq for Subspace {}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subspace")
            .field("ambient", &self.ambient)
            .field("dim", &self.dim())
            .field("pivots", &self.pivots)
            .finish()
    }
}

impl Subspace {
    /// Canonical basis of the span of `vectors`, scalars in `F_{p^scalar_degree}`.
    pub fn span(field: &Arc<Field>, scalar_degree: u32, ambient: usize, vectors: &[Vec<Elem>]) -> Result<Subspace> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::Ragged { expected: ambient, found: v.len() });
            }
            for &c in v {
                field.check(c)?;
                if !field.in_subfield(c, scalar_degree) {
                    return Err(Error::NotInSubfield { value: c.0, degree: scalar_degree });
                }
            }
        }
        let mut rows = vectors.to_vec();
        let pivots = rref_rows(field, &mut rows);
        Ok(Subspace { field: field.clone(), scalar_degree, ambient, rows, pivots })
    }

    /// Kernel of the linear map sending the `j`-th standard basis vector to `images[j]`.
    pub fn kernel(field: &Arc<Field>, scalar_degree: u32, images: &[Vec<Elem>]) -> Result<Subspace> {
        let n = images.len();
        let k = images.first().map_or(0, |v| v.len());
        let mut a: Vec<Vec<Elem>> = (0..k).map(|r| images.iter().map(|col| col[r]).collect()).collect();
        for col in images {
            if col.len() != k {
                return Err(Error::Ragged { expected: k, found: col.len() });
            }
        }
        let pivots = rref_rows(field, &mut a);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<Elem>> = free
            .iter()
            .map(|&fc| {
                let mut x = vec![Elem::ZERO; n];
                x[fc] = Elem::ONE;
                for (row, &pc) in a.iter().zip(&pivots) {
                    x[pc] = field.neg(row[fc]);
                }
                x
            })
            .collect();
        Subspace::span(field, scalar_degree, n, &vectors)
    }

    pub fn zero(field: &Arc<Field>, scalar_degree: u32, ambient: usize) -> Subspace {
        Subspace { field: field.clone(), scalar_degree, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &Arc<Field>, scalar_degree: u32, ambient: usize) -> Subspace {
        let rows = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { Elem::ONE } else { Elem::ZERO }).collect())
            .collect();
        Subspace { field: field.clone(), scalar_degree, ambient, rows, pivots: (0..ambient).collect() }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn scalar_degree(&self) -> u32 {
        self.scalar_degree
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Number of elements as a power of `p`.
    pub fn size_exponent(&self) -> u32 {
        self.dim() as u32 * self.scalar_degree
    }

    fn compatible(&self, other: &Subspace) -> Result<()> {
        same_field(&self.field, &other.field)?;
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.scalar_degree != other.scalar_degree {
            return Err(Error::WrongKind("subspaces over different scalar fields".into()));
        }
        Ok(())
    }

    /// Residue of `v` after reduction against the basis.
    pub fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        let f = &*self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let lead = v[p];
            if lead.is_zero() {
                continue;
            }
            let factor = f.neg(lead);
            for (x, &y) in v.iter_mut().zip(row).skip(p) {
                if !y.is_zero() {
                    *x = f.add(*x, f.mul(factor, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Elem]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::AmbientMismatch(self.ambient, v.len()));
        }
        Ok(self.reduce(v).iter().all(|c| c.is_zero()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.compatible(other)?;
        for r in &self.rows {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn relate(&self, other: &Subspace) -> Result<Relation> {
        let a_in_b = self.is_subspace_of(other)?;
        let b_in_a = other.is_subspace_of(self)?;
        Ok(match (a_in_b, b_in_a) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::Subset,
            (false, true) => Relation::Superset,
            (false, false) => Relation::Incomparable,
        })
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let mut rows: Vec<Vec<Elem>> = self.rows.iter().chain(&other.rows).cloned().collect();
        let pivots = rref_rows(&self.field, &mut rows);
        Ok(Subspace { field: self.field.clone(), scalar_degree: self.scalar_degree, ambient: self.ambient, rows, pivots })
    }

    /// Zassenhaus: reduce `[A A; B 0]`; rows with a zero left half span `A ∩ B`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let n = self.ambient;
        let mut stacked: Vec<Vec<Elem>> = Vec::with_capacity(self.dim() + other.dim());
        for r in &self.rows {
            let mut row = r.clone();
            row.extend_from_slice(r);
            stacked.push(row);
        }
        for r in &other.rows {
            let mut row = r.clone();
            row.extend(std::iter::repeat_n(Elem::ZERO, n));
            stacked.push(row);
        }
        rref_rows(&self.field, &mut stacked);
        let tail: Vec<Vec<Elem>> = stacked
            .into_iter()
            .filter(|r| r[..n].iter().all(|c| c.is_zero()))
            .map(|r| r[n..].to_vec())
            .collect();
        Subspace::span(&self.field, self.scalar_degree, n, &tail)
    }

    /// Applies `map` to every basis row and spans the images.
    pub fn map_rows(&self, ambient: usize, map: impl Fn(&[Elem]) -> Result<Vec<Elem>>) -> Result<Subspace> {
        let images = self.rows.iter().map(|r| map(r)).collect::<Result<Vec<_>>>()?;
        Subspace::span(&self.field, self.scalar_degree, ambient, &images)
    }

    /// Number of vectors in the span, or an error when it exceeds `budget`.
    pub fn check_budget(&self, budget: u128) -> Result<u128> {
        let required = (self.field.p() as u128).checked_pow(self.size_exponent()).unwrap_or(u128::MAX);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        Ok(required)
    }

    /// `F_p`-generators of the span: every row times every power of the scalar-field generator.
    pub fn prime_generators(&self) -> Vec<Vec<Elem>> {
        let f = &*self.field;
        let basis = f.subfield_basis(self.scalar_degree, 1).expect("scalar field is a subfield");
        self.rows
            .iter()
            .flat_map(|r| basis.iter().map(move |&h| r.iter().map(|&c| f.mul(h, c)).collect::<Vec<_>>()))
            .collect()
    }

    /// Visits every vector of the span exactly once in Gray-code order.
    pub fn enumerate(&self, budget: u128, mut visit: impl FnMut(&[Elem])) -> Result<()> {
        self.check_budget(budget)?;
        let gens = self.prime_generators();
        gray_walk(&self.field, &gens, &vec![Elem::ZERO; self.ambient], |v| {
            visit(v);
            true
        });
        Ok(())
    }

    /// Collects every vector of the span.
    pub fn elements(&self, budget: u128) -> Result<Vec<Vec<Elem>>> {
        let mut out = Vec::new();
        self.enumerate(budget, |v| out.push(v.to_vec()))?;
        Ok(out)
    }
}

/// Walks `start + span_{F_p}(gens)` in modular `p`-ary Gray-code order.
///
/// Each step adds exactly one generator. `visit` returns `false` to stop early;
/// the return value reports whether the walk completed.
pub fn gray_walk(field: &Field, gens: &[Vec<Elem>], start: &[Elem], mut visit: impl FnMut(&[Elem]) -> bool) -> bool {
    let p = field.p();
    let mut cur = start.to_vec();
    let mut counter = vec![0u32; gens.len()];
    if !visit(&cur) {
        return false;
    }
    loop {
        let mut k = 0;
        while k < counter.len() && counter[k] == p - 1 {
            counter[k] = 0;
            k += 1;
        }
        if k == counter.len() {
            return true;
        }
        counter[k] += 1;
        for (x, &y) in cur.iter_mut().zip(&gens[k]) {
            if !y.is_zero() {
                *x = field.add(*x, y);
            }
        }
        if !visit(&cur) {
            return false;
        }
    }
}

/// Splits the span of `gens` into cosets of the span of its first `gens.len() - split`
/// generators and runs `job` on each in parallel, collecting the results in coset order.
pub fn par_cosets<T: Send>(
    field: &Field,
    gens: &[Vec<Elem>],
    split: usize,
    job: impl Fn(&[Vec<Elem>], &[Elem]) -> T + Sync,
) -> Vec<T> {
    let split = split.min(gens.len());
    let (low, high) = gens.split_at(gens.len() - split);
    let len = gens.first().map_or(0, |g| g.len());
    let p = field.p() as u64;
    let count = p.pow(split as u32);
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut start = vec![Elem::ZERO; len];
            let mut rest = idx;
            for g in high {
                let digit = rest % p;
                rest /= p;
                for _ in 0..digit {
                    for (x, &y) in start.iter_mut().zip(g) {
                        *x = field.add(*x, y);
                    }
                }
            }
            job(low, &start)
        })
        .collect()
}

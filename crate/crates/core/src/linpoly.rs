//! Linearized polynomials `Σ c_i x^{q^i}` modulo `x^{q^n} - x`.
//!
//! A [`LinPoly`] is an `F_q`-linear endomorphism of `F_Q`, where `q` is the
//! step of its [`Field`]. Hermitian instances use a field whose step is
//! even, so that the step is `q²` and the half step `q` is still available.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;

/// The three restricted settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Symmetric,
    Alternating,
    Hermitian,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::Symmetric => "symmetric",
            Setting::Alternating => "alternating",
            Setting::Hermitian => "hermitian",
        }
    }
}

pub(crate) fn same_field(a: &Arc<Field>, b: &Arc<Field>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

#[derive(Clone)]
pub struct LinPoly {
    field: Arc<Field>,
    coeffs: Vec<Elem>,
}

impl PartialEq for LinPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}

impl Eq for LinPoly {}

impl fmt::Debug for LinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinPoly{:?}", self.coeffs.iter().map(|c| c.0).collect::<Vec<_>>())
    }
}

impl LinPoly {
    pub fn new(field: &Arc<Field>, coeffs: Vec<Elem>) -> Result<LinPoly> {
        let n = field.n() as usize;
        if coeffs.len() != n {
            return Err(Error::Ragged { expected: n, found: coeffs.len() });
        }
        for &c in &coeffs {
            field.check(c)?;
        }
        Ok(LinPoly { field: field.clone(), coeffs })
    }

    pub(crate) fn from_vec_unchecked(field: &Arc<Field>, coeffs: Vec<Elem>) -> LinPoly {
        debug_assert_eq!(coeffs.len(), field.n() as usize);
        LinPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Arc<Field>) -> LinPoly {
        LinPoly { field: field.clone(), coeffs: vec![Elem::ZERO; field.n() as usize] }
    }

    /// The monomial `c x^{q^k}` (`k` taken modulo `n`).
    pub fn monomial(field: &Arc<Field>, c: Elem, k: i64) -> LinPoly {
        let mut p = LinPoly::zero(field);
        let n = field.n() as i64;
        p.coeffs[k.rem_euclid(n) as usize] = c;
        p
    }

    pub fn identity(field: &Arc<Field>) -> LinPoly {
        LinPoly::monomial(field, Elem::ONE, 0)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Elem {
        let n = self.coeffs.len() as i64;
        self.coeffs[k.rem_euclid(n) as usize]
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest `i` with `c_i ≠ 0`.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &*self.field;
        self.coeffs.iter().enumerate().fold(Elem::ZERO, |acc, (i, &c)| {
            if c.is_zero() {
                acc
            } else {
                f.add(acc, f.mul(c, f.frob(x, i as i64)))
            }
        })
    }

    pub fn add(&self, other: &LinPoly) -> Result<LinPoly> {
        same_field(&self.field, &other.field)?;
        let f = &*self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(LinPoly { field: self.field.clone(), coeffs })
    }

    pub fn sub(&self, other: &LinPoly) -> Result<LinPoly> {
        same_field(&self.field, &other.field)?;
        let f = &*self.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(LinPoly { field: self.field.clone(), coeffs })
    }

    /// Left multiplication by a constant: `a·f`.
    pub fn scale(&self, a: Elem) -> LinPoly {
        let f = &*self.field;
        LinPoly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|&c| f.mul(a, c)).collect() }
    }

    /// `self ∘ other`, i.e. `c_k = Σ_{i+j≡k} f_i g_j^{q^i}`.
    pub fn compose(&self, other: &LinPoly) -> Result<LinPoly> {
        same_field(&self.field, &other.field)?;
        let f = &*self.field;
        let n = self.n();
        let mut out = vec![Elem::ZERO; n];
        for (i, &fi) in self.coeffs.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, &gj) in other.coeffs.iter().enumerate() {
                if gj.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                out[k] = f.add(out[k], f.mul(fi, f.frob(gj, i as i64)));
            }
        }
        Ok(LinPoly { field: self.field.clone(), coeffs: out })
    }

    /// Right composition with the monomial `x^{q^t}`: shifts every coefficient by `t`.
    pub fn shift(&self, t: i64) -> LinPoly {
        let n = self.n() as i64;
        let mut out = vec![Elem::ZERO; self.n()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[(i as i64 + t).rem_euclid(n) as usize] = c;
        }
        LinPoly { field: self.field.clone(), coeffs: out }
    }

    /// Adjoint with respect to `(x, y) ↦ Tr(xy)`: `f^⊤ = Σ a_{n-i}^{q^i} x^{q^i}`.
    pub fn adjoint(&self) -> LinPoly {
        let f = &*self.field;
        let n = self.n();
        let coeffs = (0..n).map(|i| f.frob(self.coeffs[(n - i) % n], i as i64)).collect();
        LinPoly { field: self.field.clone(), coeffs }
    }

    /// The Hermitian involution `f ↦ f^{⊤q}(x^{q²})` on `q²`-polynomials:
    /// `Σ a_i x^{q^{2i}} ↦ Σ a_i^{q^{2n-2i+1}} x^{q^{2(n-i+1)}}`.
    pub fn tilde(&self) -> Result<LinPoly> {
        let f = &*self.field;
        if !f.step().is_multiple_of(2) {
            return Err(Error::WrongKind("tilde needs a field whose step is a square q²".into()));
        }
        let half = (f.step() / 2) as i64;
        let n = self.n() as i64;
        let mut out = vec![Elem::ZERO; self.n()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            let i = i as i64;
            let target = (n - i + 1).rem_euclid(n) as usize;
            out[target] = f.frob_p(a, half * (2 * n - 2 * i + 1));
        }
        Ok(LinPoly { field: self.field.clone(), coeffs: out })
    }

    /// Coefficientwise `a ↦ a^{p^t}`.
    pub fn frobtwist(&self, t: i64) -> LinPoly {
        let f = &*self.field;
        LinPoly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|&c| f.frob_p(c, t)).collect() }
    }

    /// Matrix over `F_q` whose column `j` holds the coordinates of `f(g^j)`.
    pub fn matrix(&self) -> Matrix {
        let f = &*self.field;
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let img = self.eval(f.gen_power(j));
            let c = f.coords(img, f.step()).expect("step divides the degree");
            for (r, v) in c.into_iter().enumerate() {
                m.set(r, j, v);
            }
        }
        m
    }

    /// Rank over `F_q` (over `F_{q²}` for Hermitian instances).
    pub fn rank(&self) -> usize {
        self.matrix().rank(&self.field)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n()
    }

    /// Gram matrix of `B(x,y) = Tr(f(x) y)` (or `Tr(f(x) y^q)` when Hermitian)
    /// in the basis `{g^i}`.
    pub fn to_gram(&self, setting: Setting) -> Result<GramMatrix> {
        let f = &*self.field;
        let n = self.n();
        let right = gram_right_basis(f, setting)?;
        let images: Vec<Elem> = (0..n).map(|i| self.eval(f.gen_power(i))).collect();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f.trace(f.mul(images[i], right[j])));
            }
        }
        Ok(GramMatrix { setting, matrix: m })
    }

    /// Inverse of [`LinPoly::to_gram`].
    pub fn from_gram(field: &Arc<Field>, gram: &GramMatrix) -> Result<LinPoly> {
        let f = &**field;
        let n = f.n() as usize;
        if gram.matrix.rows() != n || gram.matrix.cols() != n {
            return Err(Error::Ragged { expected: n, found: gram.matrix.rows() });
        }
        let right = gram_right_basis(f, gram.setting)?;
        // trace-dual basis u_j of the right basis: Tr(u_j b_l) = δ_jl
        let mut t = Matrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                t.set(k, l, f.trace(f.mul(f.gen_power(k), right[l])));
            }
        }
        let u = t.inverse(f).expect("trace form is nondegenerate");
        let dual: Vec<Elem> = (0..n)
            .map(|j| (0..n).fold(Elem::ZERO, |acc, k| f.add(acc, f.mul(u.get(j, k), f.gen_power(k)))))
            .collect();
        // values f(g^i) = Σ_j G_ij u_j
        let values: Vec<Elem> = (0..n)
            .map(|i| (0..n).fold(Elem::ZERO, |acc, j| f.add(acc, f.mul(gram.matrix.get(i, j), dual[j]))))
            .collect();
        // Moore system Σ_k c_k (g^i)^{q^k} = values_i
        let mut moore = Matrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                moore.set(i, k, f.frob(f.gen_power(i), k as i64));
            }
        }
        let minv = moore.inverse(f).expect("Moore matrix of a basis is invertible");
        let coeffs = (0..n)
            .map(|k| (0..n).fold(Elem::ZERO, |acc, i| f.add(acc, f.mul(minv.get(k, i), values[i]))))
            .collect();
        Ok(LinPoly { field: field.clone(), coeffs })
    }
}

fn gram_right_basis(f: &Field, setting: Setting) -> Result<Vec<Elem>> {
    let n = f.n() as usize;
    match setting {
        Setting::Hermitian => {
            if !f.step().is_multiple_of(2) {
                return Err(Error::WrongKind("Hermitian forms need a step q²".into()));
            }
            let half = (f.step() / 2) as i64;
            Ok((0..n).map(|j| f.frob_p(f.gen_power(j), half)).collect())
        }
        _ => Ok((0..n).map(|j| f.gen_power(j)).collect()),
    }
}

/// Gram matrix of a bilinear or sesquilinear form in the basis `{g^i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub setting: Setting,
    pub matrix: Matrix,
}

impl GramMatrix {
    /// Checks the structural pattern of the setting. `conj` maps an entry to
    /// its conjugate `a ↦ a^q` (only used for Hermitian matrices).
    pub fn has_pattern(&self, field: &Field) -> bool {
        let m = &self.matrix;
        let n = m.rows();
        match self.setting {
            Setting::Symmetric => (0..n).all(|i| (0..n).all(|j| m.get(i, j) == m.get(j, i))),
            Setting::Alternating => (0..n).all(|i| {
                m.get(i, i).is_zero() && (0..n).all(|j| m.get(i, j) == field.neg(m.get(j, i)))
            }),
            Setting::Hermitian => {
                let half = (field.step() / 2) as i64;
                (0..n).all(|i| (0..n).all(|j| m.get(i, j) == field.frob_p(m.get(j, i), half)))
            }
        }
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.matrix.rank(field)
    }
}

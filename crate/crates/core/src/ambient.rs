//! The restricted ambient spaces of symmetric, alternating and Hermitian maps,
//! and the coefficient vectorization shared by every code.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Elem, Field};
use crate::linpoly::{same_field, GramMatrix, LinPoly, Setting};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// A space of linearized polynomials over a field, vectorized over `F_q`.
///
/// For Hermitian spaces the field's step is `q²` and the scalars are the
/// half-step subfield `F_q`, so vectors have length `2n²`.
#[derive(Clone, Debug)]
pub struct Ambient {
    field: Arc<Field>,
    setting: Option<Setting>,
    scalar_degree: u32,
}

impl PartialEq for Ambient {
    fn eq(&self, other: &Self) -> bool {
        self.setting == other.setting && self.scalar_degree == other.scalar_degree && *self.field == *other.field
    }
}

/// Header form of an [`Ambient`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpec {
    pub setting: String,
    pub q: u64,
    pub n: u32,
}

impl Ambient {
    /// `F_q`-polynomials over `F_{q^n}`, restricted to `setting` when given.
    /// A Hermitian setting expects a field of step `q²`.
    pub fn new(field: &Arc<Field>, setting: Option<Setting>) -> Result<Ambient> {
        let scalar_degree = if setting == Some(Setting::Hermitian) {
            if !field.step().is_multiple_of(2) {
                return Err(invalid("Hermitian spaces need a field built with step q²"));
            }
            field.step() / 2
        } else {
            field.step()
        };
        Ok(Ambient { field: field.clone(), setting, scalar_degree })
    }

    /// All `q²`-polynomials over `F_{q^{2n}}`, vectorized over `F_q`.
    pub fn hermitian_full(field: &Arc<Field>) -> Result<Ambient> {
        let mut a = Ambient::new(field, Some(Setting::Hermitian))?;
        a.setting = None;
        Ok(a)
    }

    pub fn symmetric(p: u32, e: u32, n: u32) -> Result<Ambient> {
        Ambient::new(&Arc::new(Field::new(p, e, n)?), Some(Setting::Symmetric))
    }

    pub fn alternating(p: u32, e: u32, n: u32) -> Result<Ambient> {
        Ambient::new(&Arc::new(Field::new(p, e, n)?), Some(Setting::Alternating))
    }

    /// `H_n(q²)` for `q = p^e`.
    pub fn hermitian(p: u32, e: u32, n: u32) -> Result<Ambient> {
        Ambient::new(&Arc::new(Field::new(p, 2 * e, n)?), Some(Setting::Hermitian))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn setting(&self) -> Option<Setting> {
        self.setting
    }

    /// Same field and vectorization with the restriction dropped.
    pub fn unrestricted(&self) -> Ambient {
        Ambient { setting: None, ..self.clone() }
    }

    pub fn with_setting(&self, setting: Setting) -> Result<Ambient> {
        let a = Ambient { setting: Some(setting), ..self.clone() };
        if (setting == Setting::Hermitian) != (self.scalar_degree * 2 == self.field.step()) {
            return Err(invalid("setting does not match the field tower"));
        }
        Ok(a)
    }

    /// Degree of the scalar field `F_q` over `F_p`.
    pub fn scalar_degree(&self) -> u32 {
        self.scalar_degree
    }

    pub fn q(&self) -> u64 {
        (self.field.p() as u64).pow(self.scalar_degree)
    }

    pub fn n(&self) -> usize {
        self.field.n() as usize
    }

    pub fn is_hermitian_tower(&self) -> bool {
        self.scalar_degree != self.field.step()
    }

    /// Coordinates of one coefficient.
    pub fn coeff_len(&self) -> usize {
        (self.field.degree() / self.scalar_degree) as usize
    }

    pub fn vector_len(&self) -> usize {
        self.n() * self.coeff_len()
    }

    pub fn spec(&self) -> AmbientSpec {
        AmbientSpec {
            setting: self.setting.map_or("linear", |s| s.name()).to_string(),
            q: self.q(),
            n: self.field.n(),
        }
    }

    pub fn vectorize(&self, f: &LinPoly) -> Result<Vec<Elem>> {
        same_field(&self.field, f.field())?;
        let mut out = Vec::with_capacity(self.vector_len());
        for &c in f.coeffs() {
            self.field.coords_into(c, self.scalar_degree, &mut out)?;
        }
        Ok(out)
    }

    pub fn devectorize(&self, v: &[Elem]) -> Result<LinPoly> {
        if v.len() != self.vector_len() {
            return Err(Error::Ragged { expected: self.vector_len(), found: v.len() });
        }
        let coeffs = v
            .chunks(self.coeff_len())
            .map(|c| self.field.from_coords(c, self.scalar_degree))
            .collect::<Result<Vec<_>>>()?;
        LinPoly::new(&self.field, coeffs)
    }

    /// The polynomial of the `j`-th standard basis vector.
    fn unit(&self, j: usize) -> LinPoly {
        let k = self.coeff_len();
        LinPoly::monomial(&self.field, self.field.gen_power(j % k), (j / k) as i64)
    }

    /// Membership by the coefficient conditions of the setting.
    pub fn contains(&self, f: &LinPoly) -> Result<bool> {
        same_field(&self.field, f.field())?;
        let fld = &*self.field;
        let n = self.n() as i64;
        Ok(match self.setting {
            None => true,
            Some(Setting::Symmetric) => (0..n).all(|i| f.coeff(n - i) == fld.frob(f.coeff(i), n - i)),
            Some(Setting::Alternating) => {
                f.coeff(0).is_zero() && (1..n).all(|i| f.coeff(n - i) == fld.neg(fld.frob(f.coeff(i), n - i)))
            }
            Some(Setting::Hermitian) => {
                let half = self.scalar_degree as i64;
                (0..n).all(|i| f.coeff(n - i + 1) == fld.frob_p(f.coeff(i), half * (2 * n - 2 * i + 1)))
            }
        })
    }

    /// `F_q`-basis of the space, computed as the kernel of the defining linear conditions.
    pub fn basis(&self) -> Result<Subspace> {
        let len = self.vector_len();
        let sd = self.scalar_degree;
        let setting = match self.setting {
            None => return Ok(Subspace::full(&self.field, sd, len)),
            Some(s) => s,
        };
        let images = (0..len)
            .map(|j| {
                let f = self.unit(j);
                let img = match setting {
                    Setting::Symmetric => self.vectorize(&f.sub(&f.adjoint())?)?,
                    Setting::Alternating => {
                        let mut v = self.vectorize(&f.add(&f.adjoint())?)?;
                        self.field.coords_into(f.coeff(0), sd, &mut v)?;
                        v
                    }
                    Setting::Hermitian => self.vectorize(&f.tilde()?.sub(&f)?)?,
                };
                Ok(img)
            })
            .collect::<Result<Vec<_>>>()?;
        Subspace::kernel(&self.field, sd, &images)
    }

    /// Expected dimension of [`Ambient::basis`] over `F_q`.
    pub fn expected_dim(&self) -> usize {
        let n = self.n();
        match self.setting {
            None => self.vector_len(),
            Some(Setting::Symmetric) => n * (n + 1) / 2,
            Some(Setting::Alternating) => n * (n - 1) / 2,
            Some(Setting::Hermitian) => n * n,
        }
    }

    /// Rank of a polynomial in this space: over `F_q`, or over `F_{q²}` for Hermitian towers.
    pub fn rank(&self, f: &LinPoly) -> usize {
        f.rank()
    }
}

/// Completes `{eta}` to an `F_q`-basis of the field by scanning `g^0, g^1, …`
/// and returns the `n - 1` added elements.
pub fn complement(field: &Field, eta: Elem) -> Result<Vec<Elem>> {
    if eta.is_zero() {
        return Err(invalid("eta must be nonzero"));
    }
    let n = field.n() as usize;
    let step = field.step();
    let mut rows = vec![field.coords(eta, step)?];
    let mut kept = Vec::with_capacity(n - 1);
    let mut i = 0;
    while kept.len() + 1 < n {
        let x = field.gen_power(i);
        let mut trial = rows.clone();
        trial.push(field.coords(x, step)?);
        if Matrix::from_rows(&trial).rank(field) == trial.len() {
            rows = trial;
            kept.push(x);
        }
        i += 1;
    }
    Ok(kept)
}

/// Gram matrix of `(x, y) ↦ Tr(f(x) y)` restricted to `v`.
pub fn restrict(f: &LinPoly, v: &[Elem]) -> GramMatrix {
    let field = f.field();
    let images: Vec<Elem> = v.iter().map(|&x| f.eval(x)).collect();
    let mut m = Matrix::zeros(v.len(), v.len());
    for (i, &fx) in images.iter().enumerate() {
        for (j, &y) in v.iter().enumerate() {
            m.set(i, j, field.trace(field.mul(fx, y)));
        }
    }
    GramMatrix { setting: Setting::Symmetric, matrix: m }
}

/// Restriction of a self-adjoint `f` to the complement of `⟨eta⟩`.
pub fn complement_and_restrict(eta: Elem, f: &LinPoly) -> Result<GramMatrix> {
    let v = complement(f.field(), eta)?;
    Ok(restrict(f, &v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(Ambient::symmetric(3, 1, 4).unwrap().basis().unwrap().dim(), 10);
        assert_eq!(Ambient::alternating(2, 1, 5).unwrap().basis().unwrap().dim(), 10);
        let h = Ambient::hermitian(2, 1, 3).unwrap();
        assert_eq!(h.vector_len(), 18);
        assert_eq!(h.basis().unwrap().dim(), 9);
    }

    #[test]
    fn membership_examples() {
        let s = Ambient::symmetric(3, 1, 4).unwrap();
        let a = s.with_setting(Setting::Alternating).unwrap();
        let field = s.field().clone();
        let id = LinPoly::identity(&field);
        assert!(s.contains(&id).unwrap());
        assert!(!a.contains(&id).unwrap());
        for b in field.elements().step_by(7) {
            for i in 1..4 {
                // b x^{q^i} + (b x)^{q^{n-i}}
                let mut f = LinPoly::monomial(&field, b, i);
                f = f.add(&LinPoly::monomial(&field, field.frob(b, 4 - i), 4 - i)).unwrap();
                assert!(s.contains(&f).unwrap());
            }
        }
    }

    #[test]
    fn vectorize_round_trip() {
        let h = Ambient::hermitian(2, 1, 3).unwrap();
        for v in h.basis().unwrap().rows() {
            let f = h.devectorize(v).unwrap();
            assert_eq!(&h.vectorize(&f).unwrap(), v);
            assert!(h.contains(&f).unwrap());
        }
    }

    #[test]
    fn complement_is_a_complement() {
        let field = Field::new(2, 1, 5).unwrap();
        let eta = field.gen();
        let v = complement(&field, eta).unwrap();
        assert_eq!(v.len(), 4);
        let mut rows = vec![field.coords(eta, 1).unwrap()];
        rows.extend(v.iter().map(|&x| field.coords(x, 1).unwrap()));
        assert_eq!(Matrix::from_rows(&rows).rank(&field), 5);
        assert!(complement(&field, Elem::ZERO).is_err());
        let zero = LinPoly::zero(&Arc::new(field));
        assert!(complement_and_restrict(eta, &zero).unwrap().matrix.data().iter().all(|c| c.is_zero()));
    }
}

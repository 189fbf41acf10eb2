//! Finite field towers `F_p ⊂ F_q ⊂ F_Q` with `q = p^e` and `Q = q^n`.
//!
//! Elements are encoded as integers below `p^M` (`M = e·n`) whose base-`p`
//! digits are the coordinates in the power basis of the defining modulus,
//! least significant digit first. Fields with at most [`TABLE_LIMIT`]
//! elements use log/antilog tables; larger fields (up to [`DIRECT_LIMIT`])
//! fall back to polynomial arithmetic.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Largest field order served by table-backed arithmetic.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest field order accepted at all.
pub const DIRECT_LIMIT: u64 = 1 << 31;

const ADD_TABLE_LIMIT: u64 = 1024;
const FROB_TABLE_LIMIT: u64 = 1 << 22;
const COORD_TABLE_LIMIT: u64 = 1 << 22;

/// A field element in canonical encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

enum AddRule {
    Xor,
    Table(Vec<u32>),
    Zech(Vec<u32>),
}

enum Arith {
    Table {
        /// `exp[k] = π^k` for `0 <= k < 2(Q-1)`.
        exp: Vec<u32>,
        /// `log[x]` for nonzero `x`; `log[0]` is unused.
        log: Vec<u32>,
        neg: Vec<u32>,
        add: AddRule,
    },
    Direct,
}

/// Coordinates of `F_Q` over the subfield `F_{p^f}` in the basis `{g^i}`.
struct SubfieldBasis {
    degree: u32,
    dim: usize,
    gen: Elem,
    hpow: Vec<Elem>,
    /// `M × M` matrix over `F_p`, row-major: base-`p` digits → coefficients
    /// of the `F_p`-basis `{h^j g^i}` at index `i·f + j`.
    inv: Vec<u32>,
    table: Option<Vec<Elem>>,
}

/// The finite field `F_{p^M}` with a marked intermediate field `F_q`, `q = p^e`.
pub struct Field {
    p: u32,
    degree: u32,
    step: u32,
    size: u32,
    modulus: Vec<u32>,
    gen: Elem,
    primitive: Elem,
    gpow: Vec<Elem>,
    arith: Arith,
    frob_tab: Option<Vec<u32>>,
    bases: Vec<SubfieldBasis>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.step)
            .field("n", &self.n())
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.step == other.step
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power `q` into `(p, e)`.
pub fn split_prime_power(q: u64) -> Result<(u32, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return Err(Error::InvalidParameters(format!("{q} is not a prime power")));
    }
    let p = factors[0];
    let mut e = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        e += 1;
    }
    Ok((p as u32, e))
}

fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Dense polynomials over `F_p`, coefficients low degree first.
pub(crate) mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        super::mod_pow(a as u64, p as u64 - 2, p as u64) as u32
    }

    /// Remainder of `a` modulo `f` (any nonzero `f`).
    pub fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut f = f.to_vec();
        trim(&mut f);
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p) as u64;
        while r.len() > df {
            let top = r.len() - 1;
            let c = r[top] as u64 * lead_inv % p as u64;
            if c != 0 {
                for (i, &fi) in f.iter().enumerate() {
                    let idx = top - df + i;
                    r[idx] = ((r[idx] as u64 + (p as u64 - c) * fi as u64) % p as u64) as u32;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
        trim(&mut out);
        out
    }

    pub fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), f, p)
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let len = a.len().max(b.len());
        let mut out: Vec<u32> = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^{p^k} mod f`.
    pub fn x_pow_p_pow(k: u32, f: &[u32], p: u32) -> Vec<u32> {
        let mut cur = rem(&[0, 1], f, p);
        for _ in 0..k {
            // raise to the p-th power by square-and-multiply
            let mut acc = vec![1u32];
            let mut base = cur.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base, f, p);
                }
                base = mulmod(&base, &base, f, p);
                e >>= 1;
            }
            cur = acc;
        }
        cur
    }

    /// Rabin's irreducibility test for a monic `f` of degree `m >= 1`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let m = (f.len() - 1) as u32;
        if m == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        if sub(&x_pow_p_pow(m, f, p), &x, p) != Vec::<u32>::new() {
            return false;
        }
        for r in super::prime_factors(m as u64) {
            let h = sub(&x_pow_p_pow(m / r as u32, f, p), &x, p);
            let g = gcd(f, &h, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// Lexicographically least monic irreducible of degree `m` over `F_p`,
/// comparing coefficient lists low degree first.
pub fn least_irreducible(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    for idx in 0..count {
        // c_0 is the most significant digit of idx
        let mut f = vec![0u32; m as usize + 1];
        let mut r = idx;
        for i in (0..m as usize).rev() {
            f[i] = (r % p as u64) as u32;
            r /= p as u64;
        }
        f[m as usize] = 1;
        if m > 1 && f[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn invert_matrix_mod_p(mat: &[u32], dim: usize, p: u32) -> Option<Vec<u32>> {
    let p64 = p as u64;
    let w = 2 * dim;
    let mut a = vec![0u32; dim * w];
    for r in 0..dim {
        a[r * w..r * w + dim].copy_from_slice(&mat[r * dim..(r + 1) * dim]);
        a[r * w + dim + r] = 1;
    }
    for col in 0..dim {
        let piv = (col..dim).find(|&r| a[r * w + col] != 0)?;
        if piv != col {
            for c in 0..w {
                a.swap(piv * w + c, col * w + c);
            }
        }
        let inv = mod_pow(a[col * w + col] as u64, p64 - 2, p64);
        for c in 0..w {
            a[col * w + c] = (a[col * w + c] as u64 * inv % p64) as u32;
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let factor = a[r * w + col] as u64;
            if factor == 0 {
                continue;
            }
            for c in 0..w {
                let v = a[col * w + c] as u64;
                a[r * w + c] = ((a[r * w + c] as u64 + (p64 - factor) * v) % p64) as u32;
            }
        }
    }
    let mut out = vec![0u32; dim * dim];
    for r in 0..dim {
        out[r * dim..(r + 1) * dim].copy_from_slice(&a[r * w + dim..(r + 1) * w]);
    }
    Some(out)
}

impl Field {
    /// Builds `F_{p^{e·n}}` with `F_q = F_{p^e}` marked.
    pub fn new(p: u32, e: u32, n: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 || n == 0 {
            return Err(Error::ZeroDegree);
        }
        let degree = e
            .checked_mul(n)
            .ok_or(Error::ResourceLimit { p: p as u64, degree: u32::MAX, limit: DIRECT_LIMIT })?;
        let size = (p as u128).checked_pow(degree).unwrap_or(u128::MAX);
        if size > DIRECT_LIMIT as u128 {
            return Err(Error::ResourceLimit { p: p as u64, degree, limit: DIRECT_LIMIT });
        }
        let size = size as u32;
        let modulus = least_irreducible(p, degree);
        let gen = if degree == 1 {
            Elem((p - modulus[0]) % p)
        } else {
            Elem(p)
        };
        let mut field = Field {
            p,
            degree,
            step: e,
            size,
            modulus,
            gen,
            primitive: Elem::ONE,
            gpow: Vec::new(),
            arith: Arith::Direct,
            frob_tab: None,
            bases: Vec::new(),
        };
        field.primitive = field.find_primitive();
        if size as u64 <= TABLE_LIMIT {
            field.build_tables();
        }
        let mut gpow = Vec::with_capacity(degree as usize);
        let mut cur = Elem::ONE;
        for _ in 0..degree {
            gpow.push(cur);
            cur = field.mul(cur, field.gen);
        }
        field.gpow = gpow;
        if (size as u64) * (field.n() as u64) <= FROB_TABLE_LIMIT {
            let n = field.n() as usize;
            let mut tab = vec![0u32; n * size as usize];
            for k in 0..n {
                for x in 0..size {
                    tab[k * size as usize + x as usize] = field.pow_q(Elem(x), k as u64).0;
                }
            }
            field.frob_tab = Some(tab);
        }
        let divisors: Vec<u32> = (1..=degree).filter(|f| degree % f == 0).collect();
        for f in divisors {
            let basis = field.build_subfield_basis(f);
            field.bases.push(basis);
        }
        Ok(field)
    }

    /// The tower `F_q ⊂ F_{q^n}` for a prime power `q`.
    pub fn for_order(q: u64, n: u32) -> Result<Field> {
        let (p, e) = split_prime_power(q)?;
        Field::new(p, e, n)
    }

    fn find_primitive(&self) -> Elem {
        if self.size == 2 {
            return Elem::ONE;
        }
        let order = self.size as u64 - 1;
        let factors = prime_factors(order);
        (1..self.size)
            .map(Elem)
            .find(|&c| factors.iter().all(|&r| self.pow_direct(c, order / r) != Elem::ONE))
            .expect("multiplicative group is cyclic")
    }

    fn build_tables(&mut self) {
        let q1 = self.size as usize - 1;
        let mut exp = vec![0u32; 2 * q1.max(1)];
        let mut log = vec![0u32; self.size as usize];
        let mut cur = Elem::ONE;
        for k in 0..q1 {
            exp[k] = cur.0;
            log[cur.0 as usize] = k as u32;
            cur = self.mul_direct(cur, self.primitive);
        }
        for k in q1..2 * q1 {
            exp[k] = exp[k - q1];
        }
        let neg: Vec<u32> = (0..self.size).map(|x| self.neg_direct(Elem(x)).0).collect();
        let add = if self.p == 2 {
            AddRule::Xor
        } else if self.size as u64 <= ADD_TABLE_LIMIT {
            let s = self.size as usize;
            let mut t = vec![0u32; s * s];
            for a in 0..s {
                for b in 0..s {
                    t[a * s + b] = self.add_direct(Elem(a as u32), Elem(b as u32)).0;
                }
            }
            AddRule::Table(t)
        } else {
            // zech[k] = log(1 + π^k), or u32::MAX when 1 + π^k = 0
            let mut z = vec![u32::MAX; q1];
            for (k, zk) in z.iter_mut().enumerate() {
                let s = self.add_direct(Elem::ONE, Elem(exp[k]));
                if !s.is_zero() {
                    *zk = log[s.0 as usize];
                }
            }
            AddRule::Zech(z)
        };
        self.arith = Arith::Table { exp, log, neg, add };
    }

    fn build_subfield_basis(&self, f: u32) -> SubfieldBasis {
        let m = self.degree as usize;
        let dim = (self.degree / f) as usize;
        let order = self.size as u64 - 1;
        let sub_order = (self.p as u64).pow(f) - 1;
        let gen = if f == self.degree {
            self.primitive
        } else {
            self.pow(self.primitive, order / sub_order)
        };
        let mut hpow = Vec::with_capacity(f as usize);
        let mut cur = Elem::ONE;
        for _ in 0..f {
            hpow.push(cur);
            cur = self.mul(cur, gen);
        }
        // columns are digits of h^j g^i, column index i·f + j
        let mut mat = vec![0u32; m * m];
        for i in 0..dim {
            for j in 0..f as usize {
                let v = self.mul(hpow[j], self.gpow[i]);
                let digits = self.digits(v);
                for (r, d) in digits.iter().enumerate() {
                    mat[r * m + i * f as usize + j] = *d;
                }
            }
        }
        let inv = invert_matrix_mod_p(&mat, m, self.p).expect("subfield basis is independent");
        let mut basis = SubfieldBasis { degree: f, dim, gen, hpow, inv, table: None };
        if dim > 1 && self.size as u64 <= TABLE_LIMIT && (self.size as u64) * (dim as u64) <= COORD_TABLE_LIMIT {
            let mut tab = Vec::with_capacity(self.size as usize * dim);
            for x in 0..self.size {
                tab.extend(self.coords_slow(&basis, Elem(x)));
            }
            basis.table = Some(tab);
        }
        basis
    }

    // ----- parameters -------------------------------------------------------

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Total degree `M` over `F_p`.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `e` with `q = p^e`.
    #[inline]
    pub fn step(&self) -> u32 {
        self.step
    }

    /// Degree `n` of `F_Q` over `F_q`.
    #[inline]
    pub fn n(&self) -> u32 {
        self.degree / self.step
    }

    /// Number of elements `p^M`.
    #[inline]
    pub fn size(&self) -> u32 {
        self.size
    }

    /// `q = p^e`.
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.step)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The class of the indeterminate.
    pub fn gen(&self) -> Elem {
        self.gen
    }

    /// The primitive element used for the log tables.
    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    /// `g^i` for `0 <= i < M`.
    pub fn gen_power(&self, i: usize) -> Elem {
        self.gpow[i]
    }

    pub fn is_table_backed(&self) -> bool {
        matches!(self.arith, Arith::Table { .. })
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size).map(Elem)
    }

    pub fn check(&self, x: Elem) -> Result<Elem> {
        if x.0 < self.size {
            Ok(x)
        } else {
            Err(Error::Malformed(format!("{} is not an element of a field of order {}", x.0, self.size)))
        }
    }

    // ----- digits -----------------------------------------------------------

    pub fn digits(&self, x: Elem) -> Vec<u32> {
        let mut out = vec![0u32; self.degree as usize];
        let mut v = x.0;
        for d in out.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        let mut v: u64 = 0;
        for &d in digits.iter().rev() {
            v = v * self.p as u64 + (d % self.p) as u64;
        }
        Elem(v as u32)
    }

    /// Embeds an integer residue into the prime field.
    pub fn from_int(&self, k: i64) -> Elem {
        Elem(k.rem_euclid(self.p as i64) as u32)
    }

    // ----- arithmetic without tables ---------------------------------------

    fn add_direct(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out: u64 = 0;
        let mut place: u64 = 1;
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d as u64 * place;
            place *= self.p as u64;
            x /= self.p;
            y /= self.p;
        }
        Elem(out as u32)
    }

    fn neg_direct(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out: u64 = 0;
        let mut place: u64 = 1;
        while x > 0 {
            let d = (self.p - x % self.p) % self.p;
            out += d as u64 * place;
            place *= self.p as u64;
            x /= self.p;
        }
        Elem(out as u32)
    }

    fn mul_direct(&self, a: Elem, b: Elem) -> Elem {
        let pa = self.digits(a);
        let pb = self.digits(b);
        let prod = poly::mulmod(&pa, &pb, &self.modulus, self.p);
        self.from_digits(&prod)
    }

    fn pow_direct(&self, a: Elem, mut k: u64) -> Elem {
        let mut acc = Elem::ONE;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_direct(acc, base);
            }
            base = self.mul_direct(base, base);
            k >>= 1;
        }
        acc
    }

    // ----- arithmetic -------------------------------------------------------

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Table { exp, log, add, .. } => match add {
                AddRule::Xor => Elem(a.0 ^ b.0),
                AddRule::Table(t) => Elem(t[a.0 as usize * self.size as usize + b.0 as usize]),
                AddRule::Zech(z) => {
                    if a.0 == 0 {
                        return b;
                    }
                    if b.0 == 0 {
                        return a;
                    }
                    let q1 = self.size - 1;
                    let la = log[a.0 as usize];
                    let lb = log[b.0 as usize];
                    let d = if lb >= la { lb - la } else { lb + q1 - la };
                    let zd = z[d as usize];
                    if zd == u32::MAX {
                        Elem::ZERO
                    } else {
                        Elem(exp[(la + zd) as usize])
                    }
                }
            },
            Arith::Direct => self.add_direct(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.arith {
            Arith::Table { neg, .. } => Elem(neg[a.0 as usize]),
            Arith::Direct => self.neg_direct(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Table { exp, log, .. } => {
                if a.0 == 0 || b.0 == 0 {
                    Elem::ZERO
                } else {
                    Elem(exp[(log[a.0 as usize] + log[b.0 as usize]) as usize])
                }
            }
            Arith::Direct => self.mul_direct(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nonzero(a))
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Elem) -> Elem {
        debug_assert!(!a.is_zero());
        match &self.arith {
            Arith::Table { exp, log, .. } => {
                let q1 = self.size - 1;
                let l = log[a.0 as usize];
                Elem(exp[((q1 - l) % q1.max(1)) as usize])
            }
            Arith::Direct => self.pow_direct(a, self.size as u64 - 2),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k`; negative exponents invert (zero to a negative power is an error).
    pub fn pow_signed(&self, a: Elem, k: i64) -> Result<Elem> {
        if k < 0 {
            Ok(self.pow(self.inv(a)?, k.unsigned_abs()))
        } else {
            Ok(self.pow(a, k as u64))
        }
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        match &self.arith {
            Arith::Table { exp, log, .. } => {
                let q1 = self.size as u64 - 1;
                let e = (log[a.0 as usize] as u128 * (k % q1) as u128 % q1 as u128) as usize;
                Elem(exp[e])
            }
            Arith::Direct => self.pow_direct(a, k % (self.size as u64 - 1)),
        }
    }

    /// `x^{p^t}`, `t` taken modulo `M`.
    pub fn frob_p(&self, x: Elem, t: i64) -> Elem {
        let t = t.rem_euclid(self.degree as i64) as u32;
        if t == 0 || x.is_zero() {
            return x;
        }
        let q1 = self.size as u64 - 1;
        self.pow(x, mod_pow(self.p as u64, t as u64, q1).max(1))
    }

    fn pow_q(&self, x: Elem, k: u64) -> Elem {
        self.frob_p(x, (k * self.step as u64) as i64)
    }

    /// `x^{q^k}`, `k` taken modulo `n`.
    #[inline]
    pub fn frob(&self, x: Elem, k: i64) -> Elem {
        let n = self.n() as i64;
        let k = k.rem_euclid(n) as usize;
        match &self.frob_tab {
            Some(t) => Elem(t[k * self.size as usize + x.0 as usize]),
            None => self.pow_q(x, k as u64),
        }
    }

    // ----- trace, norm, squares ---------------------------------------------

    /// `Tr_{Q/q}(x) = Σ_{i<n} x^{q^i}`.
    pub fn trace(&self, x: Elem) -> Elem {
        (0..self.n() as i64).fold(Elem::ZERO, |acc, i| self.add(acc, self.frob(x, i)))
    }

    /// `N_{Q/q}(x) = x^{(Q-1)/(q-1)}`.
    pub fn norm(&self, x: Elem) -> Elem {
        if x.is_zero() {
            return Elem::ZERO;
        }
        let e = (self.size as u64 - 1) / (self.q() - 1);
        self.pow(x, e)
    }

    /// Trace down to the subfield `F_{p^f}`.
    pub fn trace_to(&self, x: Elem, f: u32) -> Elem {
        debug_assert_eq!(self.degree % f, 0);
        (0..(self.degree / f) as i64).fold(Elem::ZERO, |acc, i| self.add(acc, self.frob_p(x, i * f as i64)))
    }

    pub fn in_subfield(&self, x: Elem, f: u32) -> bool {
        self.frob_p(x, f as i64) == x
    }

    /// Quadratic-residue test; every element counts as a square in characteristic 2.
    pub fn is_square(&self, x: Elem) -> bool {
        if self.p == 2 || x.is_zero() {
            return true;
        }
        self.pow(x, (self.size as u64 - 1) / 2) == Elem::ONE
    }

    // ----- subfield coordinates ---------------------------------------------

    fn subfield(&self, f: u32) -> Result<&SubfieldBasis> {
        self.bases
            .iter()
            .find(|b| b.degree == f)
            .ok_or_else(|| Error::InvalidParameters(format!("{f} does not divide the degree {}", self.degree)))
    }

    fn coords_slow(&self, basis: &SubfieldBasis, x: Elem) -> Vec<Elem> {
        if basis.dim == 1 {
            return vec![x];
        }
        let m = self.degree as usize;
        let f = basis.degree as usize;
        let digits = self.digits(x);
        let mut c = vec![0u32; m];
        for (r, cr) in c.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (k, d) in digits.iter().enumerate() {
                acc += basis.inv[r * m + k] as u64 * *d as u64;
            }
            *cr = (acc % self.p as u64) as u32;
        }
        (0..basis.dim)
            .map(|i| {
                (0..f).fold(Elem::ZERO, |acc, j| {
                    let cij = c[i * f + j];
                    if cij == 0 {
                        acc
                    } else {
                        self.add(acc, self.mul(self.from_int(cij as i64), basis.hpow[j]))
                    }
                })
            })
            .collect()
    }

    /// Coordinates of `x` over `F_{p^f}` in the basis `{g^i : i < M/f}`.
    pub fn coords(&self, x: Elem, f: u32) -> Result<Vec<Elem>> {
        let basis = self.subfield(f)?;
        Ok(match &basis.table {
            Some(t) => t[x.0 as usize * basis.dim..(x.0 as usize + 1) * basis.dim].to_vec(),
            None => self.coords_slow(basis, x),
        })
    }

    /// Appends the coordinates of `x` over `F_{p^f}` to `out`.
    pub fn coords_into(&self, x: Elem, f: u32, out: &mut Vec<Elem>) -> Result<()> {
        let basis = self.subfield(f)?;
        match &basis.table {
            Some(t) => out.extend_from_slice(&t[x.0 as usize * basis.dim..(x.0 as usize + 1) * basis.dim]),
            None => out.extend(self.coords_slow(basis, x)),
        }
        Ok(())
    }

    /// Inverse of [`Field::coords`].
    pub fn from_coords(&self, v: &[Elem], f: u32) -> Result<Elem> {
        let basis = self.subfield(f)?;
        if v.len() != basis.dim {
            return Err(Error::Ragged { expected: basis.dim, found: v.len() });
        }
        let mut acc = Elem::ZERO;
        for (i, &c) in v.iter().enumerate() {
            if !self.in_subfield(c, f) {
                return Err(Error::NotInSubfield { value: c.0, degree: f });
            }
            acc = self.add(acc, self.mul(c, self.gpow[i]));
        }
        Ok(acc)
    }

    /// Generator of the multiplicative group of `F_{p^f}`.
    pub fn subfield_generator(&self, f: u32) -> Result<Elem> {
        Ok(self.subfield(f)?.gen)
    }

    /// An `F_{p^small}`-basis of the subfield `F_{p^big}`.
    ///
    /// For `big = M` this is `{g^i}`; otherwise powers of the subfield generator.
    pub fn subfield_basis(&self, big: u32, small: u32) -> Result<Vec<Elem>> {
        if !self.degree.is_multiple_of(big) || !big.is_multiple_of(small) {
            return Err(Error::InvalidParameters(format!(
                "no tower F_p^{small} ⊂ F_p^{big} inside F_p^{}",
                self.degree
            )));
        }
        if big == self.degree {
            return Ok(self.gpow[..(big / small) as usize].to_vec());
        }
        let h = self.subfield(big)?.gen;
        let mut out = Vec::new();
        let mut cur = Elem::ONE;
        for _ in 0..big / small {
            out.push(cur);
            cur = self.mul(cur, h);
        }
        Ok(out)
    }

    /// All elements of the subfield `F_{p^f}`, zero first then powers of its generator.
    pub fn subfield_elements(&self, f: u32) -> Result<Vec<Elem>> {
        let h = self.subfield(f)?.gen;
        let order = (self.p as u64).pow(f) - 1;
        let mut out = vec![Elem::ZERO];
        let mut cur = Elem::ONE;
        for _ in 0..order {
            out.push(cur);
            cur = self.mul(cur, h);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_basics() {
        let f = Field::new(2, 1, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let w = f.gen();
        assert_eq!(f.add(Elem::ONE, Elem::ONE), Elem::ZERO);
        let w2 = f.mul(w, w);
        assert_eq!(f.mul(w, w2), Elem::ONE);
        assert_eq!(f.trace(w), Elem::ONE);
        assert_eq!(f.norm(w), Elem::ONE);
    }

    #[test]
    fn prime_field_modulus_and_squares() {
        let f = Field::new(3, 1, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.add(Elem(2), Elem(2)), Elem(1));
        assert!(!f.is_square(Elem(2)));
        assert!(f.is_square(Elem(1)));
        assert!(f.is_square(Elem(0)));
    }

    #[test]
    fn f9_generator_is_not_a_square() {
        let f = Field::new(3, 1, 2).unwrap();
        // x^2 + 1 is the least irreducible, its root has order 4, so the
        // primitive element is what must be a non-square.
        assert!(!f.is_square(f.primitive()));
        let squares = f.elements().filter(|&x| !x.is_zero() && f.is_square(x)).count();
        assert_eq!(squares, 4);
    }

    #[test]
    fn errors() {
        assert!(matches!(Field::new(4, 1, 1), Err(Error::NotPrime(4))));
        assert!(matches!(Field::new(2, 0, 3), Err(Error::ZeroDegree)));
        assert!(matches!(Field::new(2, 1, 40), Err(Error::ResourceLimit { .. })));
        let f = Field::new(2, 1, 3).unwrap();
        assert!(matches!(f.inv(Elem::ZERO), Err(Error::DivisionByZero)));
    }

    #[test]
    fn zech_and_direct_modes_agree_with_polynomial_arithmetic() {
        // 3^7 uses Zech addition, 3^13 is beyond the table limit
        for (p, m) in [(3u32, 7u32), (3, 13), (2, 21)] {
            let f = Field::new(p, 1, m).unwrap();
            assert_eq!(f.is_table_backed(), (p as u64).pow(m) <= TABLE_LIMIT);
            let mut x = f.gen();
            for k in 1..200u32 {
                let y = Elem((k * 7919) % f.size());
                assert_eq!(f.add(x, y), f.add_direct(x, y));
                assert_eq!(f.mul(x, y), f.mul_direct(x, y));
                if !x.is_zero() {
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), Elem::ONE);
                }
                x = f.add(f.mul(x, f.gen()), Elem::ONE);
            }
        }
    }

    #[test]
    fn subfield_coordinates_over_half_degree() {
        let f = Field::new(2, 2, 3).unwrap();
        for x in f.elements() {
            for deg in [1, 2, 3, 6] {
                let c = f.coords(x, deg).unwrap();
                assert_eq!(c.len(), (6 / deg) as usize);
                assert!(c.iter().all(|&ci| f.in_subfield(ci, deg)));
                assert_eq!(f.from_coords(&c, deg).unwrap(), x);
            }
        }
        let bad = vec![f.gen(), Elem::ZERO, Elem::ZERO];
        assert!(matches!(f.from_coords(&bad, 2), Err(Error::NotInSubfield { .. })));
    }
}

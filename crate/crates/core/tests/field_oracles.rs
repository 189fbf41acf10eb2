use proptest::prelude::*;
use rmlab::{Elem, Field};

/// Monic polynomials over F_p of degree `deg`, low coefficient first, in lexicographic order
/// of the coefficient list read from the constant term.
fn monic(p: u32, deg: usize) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(deg as u32);
    (0..count).map(move |mut idx| {
        let mut c = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            c.push((idx % p as u64) as u32);
            idx /= p as u64;
        }
        c.push(1);
        c
    })
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - db;
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn irreducible_by_trial_division(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    (1..=deg / 2).all(|d| monic(p, d).all(|g| poly_rem(f, &g, p).iter().any(|&c| c != 0)))
}

/// Least irreducible monic polynomial, enumerating coefficient vectors from the
/// constant term upward in the same order as the library.
fn least_irreducible_oracle(p: u32, deg: usize) -> Vec<u32> {
    let count = (p as u64).pow(deg as u32);
    let mut best: Option<Vec<u32>> = None;
    for idx in 0..count {
        let mut c = Vec::with_capacity(deg + 1);
        let mut rest = idx;
        for _ in 0..deg {
            c.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        c.push(1);
        if irreducible_by_trial_division(&c, p) && best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
    }
    best.unwrap()
}

#[test]
fn f81_modulus_is_frozen() {
    let field = Field::new(3, 1, 4).unwrap();
    assert_eq!(field.modulus(), &[1, 0, 1, 1, 1]);
    assert_eq!(least_irreducible_oracle(3, 4), vec![1, 0, 1, 1, 1]);
}

#[test]
fn moduli_match_the_oracle() {
    for (p, m) in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (5, 2), (7, 2)] {
        let field = Field::new(p, 1, m).unwrap();
        assert_eq!(field.modulus(), least_irreducible_oracle(p, m as usize).as_slice(), "p={p} m={m}");
    }
}

fn power_by_multiplication(field: &Field, x: Elem, k: u64) -> Elem {
    (0..k).fold(Elem::ONE, |acc, _| field.mul(acc, x))
}

#[test]
fn trace_of_generator_in_f81() {
    let field = Field::new(3, 1, 4).unwrap();
    let g = field.gen();
    // x + x^3 + x^9 + x^27 by repeated multiplication
    let oracle = [1u64, 3, 9, 27]
        .iter()
        .fold(Elem::ZERO, |acc, &k| field.add(acc, power_by_multiplication(&field, g, k)));
    assert_eq!(oracle, Elem(2));
    assert_eq!(field.trace(g), Elem(2));
}

#[test]
fn generator_and_primitive_orders_in_f81() {
    let field = Field::new(3, 1, 4).unwrap();
    let order = |x: Elem| (1..=80u64).find(|&k| power_by_multiplication(&field, x, k) == Elem::ONE).unwrap();
    assert_eq!(field.gen(), Elem(3));
    assert_eq!(order(field.gen()), 40);
    assert_eq!(order(field.primitive()), 80);
    assert_eq!(field.norm(field.gen()), Elem::ONE);
    assert_eq!(field.norm(field.primitive()), Elem(2));
}

fn arb_pair() -> impl Strategy<Value = (u32, u32, u32)> {
    (0u32..256, 0u32..256, 0u32..256)
}

proptest! {
    #[test]
    fn f256_field_axioms((a, b, c) in arb_pair()) {
        let field = Field::new(2, 1, 8).unwrap();
        let (a, b, c) = (Elem(a), Elem(b), Elem(c));
        prop_assert_eq!(field.mul(a, field.add(b, c)), field.add(field.mul(a, b), field.mul(a, c)));
        prop_assert_eq!(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)));
        if !a.is_zero() {
            prop_assert_eq!(field.mul(a, field.inv(a).unwrap()), Elem::ONE);
        }
        prop_assert_eq!(field.frob(field.mul(a, b), 1), field.mul(field.frob(a, 1), field.frob(b, 1)));
        prop_assert_eq!(field.frob(a, 8), a);
    }

    #[test]
    fn coordinates_round_trip(x in 0u32..4096) {
        let field = Field::new(2, 2, 6).unwrap();
        for f in [1, 2, 3, 4, 6, 12] {
            let v = field.coords(Elem(x), f).unwrap();
            prop_assert_eq!(field.from_coords(&v, f).unwrap(), Elem(x));
        }
    }
}

use std::sync::Arc;

use proptest::prelude::*;
use rmlab::codes::Code;
use rmlab::equiv::{self, EquivMap};
use rmlab::verify::{self, ScanMode};
use rmlab::{Ambient, Elem, Field, LinPoly, Setting};

fn f81() -> Arc<Field> {
    Arc::new(Field::new(3, 1, 4).unwrap())
}

fn poly(field: &Arc<Field>, c: [u32; 4]) -> LinPoly {
    LinPoly::new(field, c.iter().map(|&x| Elem(x % field.size())).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative_and_matches_evaluation(a in any::<[u32; 4]>(), b in any::<[u32; 4]>(), c in any::<[u32; 4]>(), x in 0u32..81) {
        let field = f81();
        let (f, g, h) = (poly(&field, a), poly(&field, b), poly(&field, c));
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        prop_assert_eq!(fg.eval(Elem(x)), f.eval(g.eval(Elem(x))));
    }

    #[test]
    fn adjoint_reverses_composition(a in any::<[u32; 4]>(), b in any::<[u32; 4]>()) {
        let field = f81();
        let (f, g) = (poly(&field, a), poly(&field, b));
        prop_assert_eq!(f.compose(&g).unwrap().adjoint(), g.adjoint().compose(&f.adjoint()).unwrap());
        prop_assert_eq!(f.rank(), f.adjoint().rank());
    }

    #[test]
    fn maps_preserve_rank_and_membership(seed in any::<u64>(), a in any::<[u32; 4]>()) {
        use rand::SeedableRng;
        let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = equiv::random_map(&code, &mut rng).unwrap();
        let f = poly(code.field(), a);
        let sym = f.add(&f.adjoint()).unwrap();
        let img = m.apply(&sym).unwrap();
        prop_assert_eq!(img.rank(), sym.rank());
        prop_assert!(code.ambient.contains(&img).unwrap());
    }

    #[test]
    fn gram_round_trip(a in any::<[u32; 4]>()) {
        let field = f81();
        let f = poly(&field, a);
        let g = f.to_gram(Setting::Symmetric).unwrap();
        prop_assert_eq!(LinPoly::from_gram(&field, &g).unwrap(), f);
    }
}

#[test]
fn theta_maps_preserve_hermitian_rank() {
    use rand::{Rng, SeedableRng};
    let code = Code::hermitian_h(2, 3, 2, 1).unwrap();
    let herm = code.ambient.clone();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let elems = herm.basis().unwrap().elements(1 << 10).unwrap();
    for _ in 0..100 {
        let m = equiv::random_map(&code, &mut rng).unwrap();
        let f = herm.devectorize(&elems[rng.gen_range(0..elems.len())]).unwrap();
        let img = m.apply(&f).unwrap();
        assert_eq!(img.rank(), f.rank());
        assert!(herm.contains(&img).unwrap());
    }
}

#[test]
fn random_maps_on_q2_n4_preserve_rank() {
    use rand::{Rng, SeedableRng};
    let code = Code::schmidt_sym(2, 4, 2, 1).unwrap();
    let field = code.field().clone();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let m = equiv::random_map(&code, &mut rng).unwrap();
        let f = LinPoly::new(&field, (0..4).map(|_| Elem(rng.gen_range(0..16))).collect()).unwrap();
        assert_eq!(m.apply(&f).unwrap().rank(), f.rank());
    }
}

#[test]
fn mapped_codes_keep_their_spectrum() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for code in [Code::schmidt_sym(2, 5, 3, 1).unwrap(), Code::dg_alt(2, 5, 2, 1).unwrap(), Code::hermitian_h(2, 3, 2, 1).unwrap()] {
        let m = equiv::random_map(&code, &mut rng).unwrap();
        let image = m.apply_code(&code).unwrap();
        assert!(image.in_ambient().unwrap());
        let a = verify::rank_spectrum(&code, 1 << 20, ScanMode::Spectrum).unwrap();
        let b = verify::rank_spectrum(&image, 1 << 20, ScanMode::Spectrum).unwrap();
        assert_eq!(a.counts, b.counts);
    }
}

#[test]
fn gabidulin_is_fixed_by_two_sided_monomials() {
    // α x^{q^r} ∘ G ∘ β x^{q^{n-r}} = G for all nonzero α, β and every r
    let g = Code::gabidulin(2, 5, 3, 1).unwrap();
    let field = g.field().clone();
    let unrestricted = g.ambient.clone();
    for r in 0..5 {
        for a in (1..32).step_by(3) {
            for b in (1..32).step_by(5) {
                let m = EquivMap::phi(
                    Elem::ONE,
                    LinPoly::monomial(&field, Elem(a), r),
                    0,
                    LinPoly::monomial(&field, Elem(b), 5 - r),
                )
                .unwrap();
                let image = g.map(&unrestricted, |f| m.apply(f)).unwrap();
                assert_eq!(image.basis, g.basis, "r={r} a={a} b={b}");
            }
        }
    }
}

#[test]
fn ambient_code_boundary() {
    let amb = Ambient::symmetric(2, 1, 3).unwrap();
    let code = Code::ambient_code(&amb).unwrap();
    let report = verify::verify_code(&code, ScanMode::Spectrum, 1 << 20).unwrap();
    assert_eq!(report.min_distance, Some(1));
    assert_eq!(report.size, (1u64 << 6).to_string());
}

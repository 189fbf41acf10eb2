use std::collections::BTreeMap;
use std::sync::Arc;

use rmlab::codes::{restrict_subspace, Code};
use rmlab::equiv::{self, ShardPlan};
use rmlab::io;
use rmlab::suite;
use rmlab::verify::{self, ScanMode};
use rmlab::{Ambient, Elem, Family, Field, LinPoly, Setting, Subspace};

/// Rank of the Gram matrix `Tr(f(b_i) b_j)` over F_p, by elimination mod p on plain integers.
fn gram_rank_oracle(field: &Field, f: &LinPoly) -> usize {
    let p = field.p() as i64;
    let basis: Vec<Elem> = (0..field.degree()).map(|i| field.from_digits(&unit(i as usize, field.degree() as usize))).collect();
    let mut m: Vec<Vec<i64>> = basis
        .iter()
        .map(|&x| basis.iter().map(|&y| field.trace(field.mul(f.eval(x), y)).0 as i64).collect())
        .collect();
    let (rows, cols) = (m.len(), m[0].len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][c] % p != 0) else { continue };
        m.swap(rank, pr);
        let inv = (1..p).find(|k| m[rank][c] * k % p == 1).unwrap();
        for r in 0..rows {
            if r != rank && m[r][c] % p != 0 {
                let factor = m[r][c] * inv % p;
                for k in 0..cols {
                    m[r][k] = ((m[r][k] - factor * m[rank][k]) % p + p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn unit(i: usize, len: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    v[i] = 1;
    v
}

#[test]
fn schmidt_spectrum_is_frozen() {
    let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    let frozen = BTreeMap::from([(0, 1), (2, 260), (3, 2160), (4, 4140)]);
    let spectrum = verify::rank_spectrum(&code, 1 << 20, ScanMode::Spectrum).unwrap();
    assert_eq!(spectrum.counts, frozen);
    let mut oracle = BTreeMap::new();
    code.basis
        .enumerate(1 << 20, |v| {
            let f = code.ambient.devectorize(v).unwrap();
            *oracle.entry(gram_rank_oracle(code.field(), &f)).or_insert(0u64) += 1;
        })
        .unwrap();
    assert_eq!(oracle, frozen);
}

#[test]
fn census_counts_are_frozen() {
    let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    let census = equiv::monomial_aut_census(&code, 1 << 20).unwrap();
    assert_eq!((census.tuples, census.fixing, census.outside_pattern.len()), (2560, 2560, 0));
    // every (a, γ, r) with ρ = 0 fixes the code
    let field = code.field().clone();
    let basis = code.polys().unwrap();
    let mut oracle = 0;
    for a in [Elem(1), Elem(2)] {
        for gamma in field.elements().skip(1) {
            for r in 0..4 {
                let m = rmlab::EquivMap::psi(a, LinPoly::monomial(&field, gamma, r), 0).unwrap();
                oracle += basis.iter().all(|f| code.contains(&m.apply(f).unwrap()).unwrap()) as u32;
            }
        }
    }
    assert_eq!(oracle, 2 * 80 * 4);
}

#[test]
fn random_subspace_has_fewer_fixing_tuples() {
    use rand::{Rng, SeedableRng};
    let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    let amb = code.ambient.clone();
    let full = amb.basis().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut rows = Vec::new();
    let mut sub = Subspace::zero(code.field(), 1, amb.vector_len());
    while sub.dim() < code.dim() {
        let coeffs: Vec<Elem> = (0..full.dim()).map(|_| Elem(rng.gen_range(0..3))).collect();
        let mut v = vec![Elem::ZERO; amb.vector_len()];
        for (c, row) in coeffs.iter().zip(full.rows()) {
            for (x, &y) in v.iter_mut().zip(row) {
                *x = code.field().add(*x, code.field().mul(*c, y));
            }
        }
        rows.push(v);
        sub = Subspace::span(code.field(), 1, amb.vector_len(), &rows).unwrap();
    }
    let random = Code::from_subspace(Family::Derived, code.params.clone(), amb, sub).unwrap();
    let census = equiv::monomial_aut_census(&random, 1 << 20).unwrap();
    assert!(census.fixing < 2560, "{}", census.fixing);
}

#[test]
fn punctured_t_properties() {
    let field = Arc::new(Field::new(2, 1, 5).unwrap());
    for eta in [Elem::ONE, field.gen()] {
        let u = Code::kernel_subspace(&field, 4, 3, 1, eta).unwrap();
        assert_eq!(u.dim(), 10);
        let amb = Ambient::new(&field, None).unwrap();
        for row in u.rows() {
            assert!(amb.devectorize(row).unwrap().eval(eta).is_zero());
        }
        let t = Code::punctured_t(2, 4, 3, 1, Some(eta)).unwrap();
        let spectrum = verify::rank_spectrum(&t, 1 << 10, ScanMode::Spectrum).unwrap();
        assert_eq!((spectrum.size(), spectrum.min_distance()), (32, Some(3)));
    }
}

#[test]
fn punctured_t_differs_from_the_restricted_wider_code() {
    // both are maximum 3-codes of size 2^5 on V, yet distinct subspaces for every η
    let wide = Code::schmidt_sym(2, 5, 5, 1).unwrap();
    let narrow = Code::schmidt_sym(2, 5, 3, 1).unwrap();
    for e in 1..32 {
        let t = Code::punctured_t(2, 4, 3, 1, Some(Elem(e))).unwrap();
        let v = t.complement.clone().unwrap();
        let restricted = restrict_subspace(&wide.ambient, &wide.basis, &v).unwrap();
        assert_eq!(restricted.dim(), 5);
        assert_ne!(restricted, t.basis, "eta {e}");
        let spread = Code { basis: restricted, ..t.clone() };
        assert_eq!(verify::rank_spectrum(&spread, 1 << 10, ScanMode::Spectrum).unwrap().min_distance(), Some(3));
        assert!(t.basis.is_subspace_of(&restrict_subspace(&narrow.ambient, &narrow.basis, &v).unwrap()).unwrap());
    }
}

#[test]
fn hermitian_e_at_distance_one_is_full() {
    let e = Code::hermitian_e(2, 3, 1, 1).unwrap();
    assert_eq!(e.dim(), 9);
    assert_eq!(e.basis, e.ambient.basis().unwrap());
}

#[test]
fn compose_right_examples() {
    let g = Code::gabidulin(3, 4, 3, 1).unwrap();
    assert_eq!(g.compose_right(0).unwrap().basis, g.basis);
    assert_eq!(g.compose_right(4).unwrap().basis, g.basis);
    let twisted = g.compose_right(3).unwrap();
    assert_eq!(twisted.adjoint().unwrap().basis, twisted.basis);
    let before = verify::rank_spectrum(&g, 1 << 24, ScanMode::Spectrum).unwrap();
    let after = verify::rank_spectrum(&twisted, 1 << 24, ScanMode::Spectrum).unwrap();
    assert_eq!(before.counts, after.counts);
}

#[test]
fn tz_and_new_code() {
    let new = Code::new_sym2(3, 2, 1, None).unwrap();
    assert_eq!(new.params.eta, Some(10));
    assert!(Code::new_sym2(3, 2, 1, Some(new.field().gen())).is_err());
    assert!(Code::tz(2, 2, 3, 1, None).is_err());
    let report = verify::verify_code(&new, ScanMode::AssertAtLeast(2), 1 << 20).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
}

#[test]
fn planted_control_on_a_small_field_and_shard_union() {
    use rand::SeedableRng;
    let code = Code::schmidt_sym(2, 3, 1, 1).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let m = equiv::random_map(&code, &mut rng).unwrap();
        let image = m.apply_code(&code).unwrap();
        let whole = equiv::full_equiv_search(&code, &image, 1, 1, 1 << 20).unwrap();
        assert!(whole.found);
        let found = rmlab::EquivMap::from_json(code.field(), whole.map.as_ref().unwrap()).unwrap();
        assert_eq!(found.apply_code(&code).unwrap(), image);
        let parts: Vec<_> = (0..4)
            .map(|i| equiv::full_equiv_search_plan(&code, &image, ShardPlan { shards: 4, only: Some(i) }, 1, 1 << 20).unwrap())
            .collect();
        let merged = equiv::merge_reports(parts).unwrap();
        assert_eq!(merged.map, whole.map);
        assert_eq!(merged.hit, whole.hit);
    }
}

#[test]
fn trivial_search_finds_the_identity_first() {
    let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    let search = equiv::FullSearch::new(&code, &code).unwrap();
    let r = search.run_shard(0, 81).unwrap();
    let (rho, idx, m) = r.found.unwrap();
    assert_eq!((rho, idx), (0, 1));
    assert_eq!(m.g, LinPoly::identity(code.field()));
    assert!(equiv::monomial_equiv_search(&code, &code).unwrap().is_some());
}

#[test]
fn adjoint_closure_runs_for_non_closed_targets() {
    let g = Code::gabidulin(2, 3, 1, 1).unwrap();
    let h = g.compose_right(1).unwrap();
    assert_ne!(h.adjoint().unwrap(), h);
    let report = equiv::full_equiv_search(&g, &h, 2, 1, 1 << 20).unwrap();
    assert!(report.adjoint_closure.starts_with("ran") || report.found);
}

#[test]
fn budgets_are_enforced() {
    let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    assert!(matches!(equiv::full_equiv_search(&code, &code, 1, 1, 1000), Err(rmlab::Error::BudgetExceeded { .. })));
    assert!(matches!(equiv::monomial_aut_census(&code, 10), Err(rmlab::Error::BudgetExceeded { .. })));
    assert!(matches!(
        verify::rank_spectrum(&code, 100, ScanMode::Spectrum),
        Err(rmlab::Error::BudgetExceeded { .. })
    ));
    assert!(ShardPlan::parse("3/3").is_err());
    assert!(ShardPlan::parse("x").is_err());
    assert_eq!(ShardPlan::parse("2/5").unwrap(), ShardPlan { shards: 5, only: Some(2) });
}

#[test]
fn io_round_trip_for_every_family() {
    let codes = [
        Code::gabidulin(2, 3, 2, 1).unwrap(),
        Code::schmidt_sym(3, 4, 2, 1).unwrap(),
        Code::dg_alt(2, 5, 2, 1).unwrap(),
        Code::hermitian_h(2, 3, 2, 1).unwrap(),
        Code::hermitian_e(2, 3, 3, 1).unwrap(),
        Code::punctured_t(2, 4, 3, 1, None).unwrap(),
        Code::tz(3, 2, 3, 1, None).unwrap(),
        Code::new_sym2(3, 2, 1, None).unwrap(),
        Code::ambient_code(&Ambient::alternating(2, 1, 4).unwrap()).unwrap(),
    ];
    for code in codes {
        let text = io::code_to_json(&code).unwrap();
        let back = io::code_from_json(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.ambient, code.ambient);
        assert_eq!(back.complement, code.complement);
        assert_eq!(io::code_to_json(&back).unwrap(), text);
    }
}

#[test]
fn io_rejects_malformed_input() {
    let code = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    let mut file = io::CodeFile::from_code(&code);
    file.field.modulus = vec![2, 0, 0, 0, 1];
    assert!(file.clone().into_code().is_err());
    let mut file = io::CodeFile::from_code(&code);
    file.basis_rows.push(file.basis_rows[0].clone());
    assert!(file.into_code().is_err());
    let mut file = io::CodeFile::from_code(&code);
    file.schema = 2;
    assert!(file.into_code().is_err());
    assert!(io::code_from_json("{").is_err());
}

#[test]
fn naive_and_gray_spectra_agree() {
    for code in [Code::gabidulin(2, 3, 2, 1).unwrap(), Code::hermitian_e(2, 3, 3, 1).unwrap()] {
        let gray = verify::rank_spectrum(&code, 1 << 10, ScanMode::Spectrum).unwrap();
        assert_eq!(gray.counts, suite::naive_spectrum(&code).unwrap());
    }
}

#[test]
fn assert_mode_stops_early_only_on_violation() {
    let g = Code::gabidulin(2, 3, 3, 1).unwrap();
    let s = verify::rank_spectrum(&g, 1 << 10, ScanMode::AssertAtLeast(2)).unwrap();
    assert!(!s.complete);
    let s = verify::rank_spectrum(&g, 1 << 10, ScanMode::AssertAtLeast(1)).unwrap();
    assert!(s.complete);
}

#[test]
fn characterization_controls() {
    let c = Code::schmidt_sym(3, 4, 2, 1).unwrap();
    let parent = verify::intersection_parent(&c).unwrap();
    assert!(verify::check_characterization(&c, &parent).unwrap().iter().all(|k| k.pass));
    let g = Code::gabidulin_in(&c.ambient, 3, 1).unwrap();
    let clauses = verify::check_characterization(&c, &g).unwrap();
    assert!(!clauses.iter().find(|k| k.name == "c:intersection").unwrap().pass);
    let herm = Code::hermitian_h(2, 3, 2, 1).unwrap();
    let parent = verify::intersection_parent(&herm).unwrap();
    assert!(verify::check_characterization(&herm, &parent).unwrap().iter().all(|k| k.pass));
    assert!(Ambient::symmetric(3, 1, 4).unwrap().with_setting(Setting::Hermitian).is_err());
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gencx::clifford::{chevalley_pairing, clifford_act, drho_matrix, drho_matrix_raw, DoubleVector, Spinor};
use gencx::hodge::{build_component_operator, build_dh_operator, laplacian, BlockOperator, InnerProduct};
use gencx::linalg::{c, expm, max_abs, op_norm, vec_norm, CMat};
use gencx::random::{random_double_vector, random_hermitian_pair, random_so, random_spinor};
use gencx::solver::{beta_from_phi, beta_generators, series_exp_action, SoSeries};
use gencx::structures::HermitianPair;
use gencx::torus::{
    frequency_box, Freq, MatrixField, SpinorField, TorusGeometry, DELTA_MINUS, DELTA_MINUS_BAR, DELTA_PLUS,
    DELTA_PLUS_BAR,
};
use gencx::{Exec, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pair(m: usize, seed: u64) -> HermitianPair {
    random_hermitian_pair(m, &mut rng(seed)).unwrap()
}

fn cosine(m: usize, k: Freq, a: &CMat) -> MatrixField {
    let half = a * c(0.5);
    MatrixField::from_terms(m, [(-&k, half.clone()), (k, half)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spin_group_commutes_with_clifford_action(seed in any::<u64>(), m in 1usize..=5) {
        let mut r = rng(seed);
        let alpha = random_so(m, 0.6, &mut r);
        let v = random_double_vector(m, &mut r);
        let phi = random_spinor(m, &mut r);
        let spin = expm(&drho_matrix(&alpha));
        let act = |s: &Spinor| Spinor::from_coeffs(m, &spin * s.coeffs()).unwrap();
        let moved = DoubleVector::from_coords(alpha.exp() * v.coords()).unwrap();
        let lhs = act(&clifford_act(&v, &phi).unwrap());
        let rhs = clifford_act(&moved, &act(&phi)).unwrap();
        prop_assert!(vec_norm(&(lhs.coeffs() - rhs.coeffs())) <= 1e-9 * phi.norm());
    }

    #[test]
    fn spin_group_preserves_chevalley_pairing(seed in any::<u64>(), m in 1usize..=5) {
        let mut r = rng(seed);
        let alpha = random_so(m, 0.6, &mut r);
        let phi = random_spinor(m, &mut r);
        let psi = random_spinor(m, &mut r);
        let spin = expm(&drho_matrix(&alpha));
        let act = |s: &Spinor| Spinor::from_coeffs(m, &spin * s.coeffs()).unwrap();
        let before = chevalley_pairing(&phi, &psi).unwrap();
        let after = chevalley_pairing(&act(&phi), &act(&psi)).unwrap();
        prop_assert!((after - before).norm() <= 1e-9 * phi.norm() * psi.norm());
    }

    #[test]
    fn star_is_minus_product_of_form_operators(seed in any::<u64>(), m in prop::sample::select(vec![2usize, 4])) {
        let p = pair(m, seed);
        let jj = p.j1().form_operator() * p.j2().form_operator();
        prop_assert!(op_norm(&(p.star() + jj)) < 1e-9);
    }

    #[test]
    fn bigraded_projectors_resolve_the_identity(seed in any::<u64>(), m in prop::sample::select(vec![2usize, 4])) {
        let p = pair(m, seed);
        let d = 1 << m;
        let mut sum = CMat::zeros(d, d);
        for (a, b) in p.bidegrees() {
            let proj = p.projector(a, b);
            prop_assert!(max_abs(&(&proj * &proj - &proj)) < 1e-9);
            sum += proj;
        }
        prop_assert!(max_abs(&(sum - CMat::identity(d, d))) < 1e-9);
    }

    #[test]
    fn frames_shift_bidegree_as_expected(seed in any::<u64>(), m in prop::sample::select(vec![2usize, 4])) {
        let p = pair(m, seed);
        let expected = [(1, 1), (-1, -1), (1, -1), (-1, 1)];
        for (frame, want) in p.frames().iter().zip(expected) {
            for col in 0..frame.ncols() {
                let v = DoubleVector::from_coords(frame.column(col).into_owned()).unwrap();
                prop_assert_eq!(p.clifford_shift(&v), Some(want));
            }
        }
    }

    #[test]
    fn correction_generators_land_in_the_right_bidegree(seed in any::<u64>(), m in prop::sample::select(vec![2usize, 4])) {
        let p = pair(m, seed);
        let n = p.half_dim() as i32;
        let psi = p.j2().canonical_generator();
        let target = p.projector(0, n - 2);
        let [_, plus_01, minus_10, _] = p.frames();
        let col = |f: &CMat, i: usize| DoubleVector::from_coords(f.column(i).into_owned()).unwrap();
        for i in 0..minus_10.ncols() {
            for j in 0..plus_01.ncols() {
                let (l, r) = (col(&minus_10, i), col(&plus_01, j));
                for (first, second) in [(&l, &r), (&r, &l)] {
                    let img = clifford_act(first, &clifford_act(second, psi).unwrap()).unwrap();
                    let kept = &target * &img;
                    prop_assert!(vec_norm(&(kept.coeffs() - img.coeffs())) <= 1e-9 * img.norm().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn beta_round_trip(seed in any::<u64>(), m in prop::sample::select(vec![2usize, 4])) {
        let p = pair(m, seed);
        let psi = p.j2().canonical_generator().clone();
        let gens = beta_generators(&p);
        let mut r = rng(seed ^ 0x5eed);
        let coeffs: Vec<C64> = gens.iter().map(|_| random_spinor(1, &mut r).coeff(0)).collect();
        let beta = gens.iter().zip(&coeffs).fold(CMat::zeros(2 * m, 2 * m), |acc, (g, z)| acc + g * *z);
        let image = &drho_matrix_raw(&beta) * &psi;
        let k = Freq((0..m as i32).map(|i| i % 2).collect());
        let phi = SpinorField::from_terms(m, [(k.clone(), image.clone() * c(-1.0))]);
        let (found, fit) = beta_from_phi(Exec::Sequential, &phi, &psi, &p).unwrap();
        prop_assert!(fit < 1e-10);
        let recovered = &drho_matrix_raw(found.get(&k).unwrap()) * &psi;
        prop_assert!(vec_norm(&(recovered.coeffs() - image.coeffs())) < 1e-10 * image.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exponential_series_matches_exact_exponentials(seed in any::<u64>()) {
        let m = 4;
        let order = 3;
        let t = 1e-3;
        let mut r = rng(seed);
        let a: CMat = random_so(m, 0.8, &mut r).into_matrix();
        let b: CMat = random_so(m, 0.8, &mut r).into_matrix();
        let fa = cosine(m, Freq(vec![1, 0, -1, 0]), &a);
        let fb = cosine(m, Freq(vec![0, 1, 1, 0]), &b);
        let psi = random_spinor(m, &mut r);
        let series = series_exp_action(
            Exec::Sequential,
            &[SoSeries::linear(fa.clone(), order)],
            &SoSeries::linear(fb.clone(), order),
            &SpinorField::constant(m, psi.clone()),
            order,
        );
        let x = [0.4, -1.3, 2.2, 0.9];
        let at = |f: &MatrixField| expm(&drho_matrix_raw(&(f.evaluate(&x).unwrap() * c(t))));
        let exact = at(&fa) * at(&fb) * psi.coeffs();
        let approx = series.evaluate(t, &x).unwrap();
        prop_assert!(vec_norm(&(approx.coeffs() - exact)) < 1e-9 * psi.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn hodge_identities_on_random_constant_pairs(seed in any::<u64>()) {
        let p = pair(4, seed);
        let geom = TorusGeometry::flat(4);
        let ip = InnerProduct::new(&p).unwrap();
        let support = frequency_box(4, 1);
        let e = Exec::Sequential;
        let op = |s| build_component_operator(e, s, &p, &geom, &support).unwrap();
        let (dp, dpb, dm, dmb) = (op(DELTA_PLUS), op(DELTA_PLUS_BAR), op(DELTA_MINUS), op(DELTA_MINUS_BAR));
        let anti = |a: &BlockOperator, b: &BlockOperator| a.compose(b).add(&b.compose(a)).max_abs();
        for value in [
            anti(&dp, &dm),
            anti(&dp, &dmb),
            anti(&dpb, &dm),
            anti(&dpb, &dmb),
            dp.compose(&dp).max_abs(),
            dm.compose(&dm).max_abs(),
        ] {
            prop_assert!(value < 1e-9);
        }
        prop_assert!(dp.adjoint(&ip).distance(&dpb.scale(c(-1.0))) < 1e-9);
        prop_assert!(dm.adjoint(&ip).distance(&dmb) < 1e-9);
        let full = laplacian(&build_dh_operator(e, &geom, &support), &ip);
        for o in [&dp, &dpb, &dm, &dmb] {
            prop_assert!(full.distance(&laplacian(o, &ip).scale(c(4.0))) < 1e-8);
        }
    }
}

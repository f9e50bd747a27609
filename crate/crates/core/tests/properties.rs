use nalgebra::DMatrix;
use paralab::expr::ScalarField;
use paralab::jets::eval_jet;
use paralab::parse::parse_expression;
use paralab::tensors::{metric_index, numeric_rank, IndexMove, LabeledTensor, Variance};
use proptest::prelude::*;

fn xyz() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn fields(c: [f64; 3]) -> (ScalarField, ScalarField) {
    let f = parse_expression(&format!("{} * x + sin({} * y) * z", c[0], c[1]), &xyz()).unwrap();
    let g = parse_expression(&format!("exp({} * x * y) + z^2 - cos(y)", c[2]), &xyz()).unwrap();
    (f, g)
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
}

proptest! {
    #[test]
    fn jets_are_linear(c in prop::array::uniform3(-2.0..2.0f64), a in -3.0..3.0f64, b in -3.0..3.0f64, p in point()) {
        let (f, g) = fields(c);
        let h = ScalarField::constant(a) * f.clone() + ScalarField::constant(b) * g.clone();
        let (jf, jg, jh) = (eval_jet(&f, &p).unwrap(), eval_jet(&g, &p).unwrap(), eval_jet(&h, &p).unwrap());
        for i in 0..3 {
            prop_assert!(close(jh.grad(i), a * jf.grad(i) + b * jg.grad(i), 1e-12));
            for j in 0..3 {
                prop_assert!(close(jh.hess(i, j), a * jf.hess(i, j) + b * jg.hess(i, j), 1e-12));
                for k in 0..3 {
                    prop_assert!(close(jh.third(i, j, k), a * jf.third(i, j, k) + b * jg.third(i, j, k), 1e-12));
                }
            }
        }
    }

    #[test]
    fn jets_obey_leibniz(c in prop::array::uniform3(-2.0..2.0f64), p in point()) {
        let (f, g) = fields(c);
        let (jf, jg) = (eval_jet(&f, &p).unwrap(), eval_jet(&g, &p).unwrap());
        let jh = eval_jet(&(f * g), &p).unwrap();
        let (f0, g0) = (jf.value(), jg.value());
        prop_assert!(close(jh.value(), f0 * g0, 1e-14));
        for i in 0..3 {
            prop_assert!(close(jh.grad(i), jf.grad(i) * g0 + f0 * jg.grad(i), 1e-12));
            for j in 0..3 {
                let want = jf.hess(i, j) * g0 + jf.grad(i) * jg.grad(j) + jf.grad(j) * jg.grad(i) + f0 * jg.hess(i, j);
                prop_assert!(close(jh.hess(i, j), want, 1e-12));
                for k in 0..3 {
                    let want = jf.third(i, j, k) * g0
                        + jf.hess(i, j) * jg.grad(k)
                        + jf.hess(i, k) * jg.grad(j)
                        + jf.hess(j, k) * jg.grad(i)
                        + jf.grad(i) * jg.hess(j, k)
                        + jf.grad(j) * jg.hess(i, k)
                        + jf.grad(k) * jg.hess(i, j)
                        + f0 * jg.third(i, j, k);
                    prop_assert!(close(jh.third(i, j, k), want, 1e-11));
                }
            }
        }
    }

    #[test]
    fn index_is_a_congruence_invariant(
        signs in prop::collection::vec(prop::bool::ANY, 1..=5),
        mags in prop::collection::vec(0.5..3.0f64, 5),
        perturb in prop::collection::vec(-0.3..0.3f64, 25),
    ) {
        let n = signs.len();
        let d = DMatrix::from_fn(n, n, |i, j| if i == j { if signs[i] { -mags[i] } else { mags[i] } } else { 0.0 });
        // I + small perturbation keeps P invertible
        let p = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + perturb[i * 5 + j] / n as f64);
        let m = p.transpose() * &d * &p;
        let m = (&m + m.transpose()) * 0.5;
        let want = signs.iter().filter(|s| **s).count();
        prop_assert_eq!(metric_index(&m, 1e-10).unwrap(), want);
    }

    #[test]
    fn rank_is_invariant_under_invertible_maps(
        n in 2usize..=5,
        r in 0usize..=5,
        entries in prop::collection::vec(-1.0..1.0f64, 75),
    ) {
        let r = r.min(n);
        let u = DMatrix::from_fn(n, r, |i, j| entries[i * 5 + j]);
        let v = DMatrix::from_fn(r, n, |i, j| entries[25 + i * 5 + j]);
        let a = &u * &v;
        let p = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.0 } + entries[50 + i * 5 + j] / n as f64);
        let base = numeric_rank(&a, 1e-9);
        prop_assert!(base <= r);
        prop_assert_eq!(numeric_rank(&(&p * &a), 1e-9), base);
        prop_assert_eq!(numeric_rank(&(&a * &p), 1e-9), base);
    }

    #[test]
    fn contraction_commutes_with_moving_indices(
        t in prop::collection::vec(-1.0..1.0f64, 9),
        mags in prop::collection::vec(0.5..2.0f64, 3),
        off in -0.2..0.2f64,
        sign in prop::bool::ANY,
    ) {
        let s = if sign { -1.0 } else { 1.0 };
        let g = DMatrix::from_row_slice(3, 3, &[mags[0], off, 0.0, off, s * mags[1], 0.0, 0.0, 0.0, mags[2]]);
        let ginv = g.clone().try_inverse().unwrap();
        let gt = LabeledTensor::new(3, vec![Variance::Down, Variance::Down], g.transpose().as_slice().to_vec()).unwrap();
        let gi = LabeledTensor::new(3, vec![Variance::Up, Variance::Up], ginv.transpose().as_slice().to_vec()).unwrap();
        let tt = LabeledTensor::new(3, vec![Variance::Up, Variance::Down], t).unwrap();
        let direct = tt.contract(0, 1).unwrap().data()[0];
        // T^a_b -> T_ab -> T_a^b, then trace the other way round
        let lowered = tt.move_index(0, &gt, IndexMove::Lower).unwrap();
        let moved = lowered.move_index(1, &gi, IndexMove::Raise).unwrap();
        let traced = moved.contract(1, 0).unwrap().data()[0];
        prop_assert!(close(direct, traced, 1e-12));
        let back = moved.move_index(0, &gi, IndexMove::Raise).unwrap().move_index(1, &gt, IndexMove::Lower).unwrap();
        for (a, b) in back.data().iter().zip(tt.data()) {
            prop_assert!(close(*a, *b, 1e-12));
        }
    }
}

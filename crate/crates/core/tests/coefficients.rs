use llhmm::coefficients::{
    homogenized_matrix, homogenized_matrix_of, parse_coefficient, Coefficient, Preset,
};

#[test]
fn ex3_matches_closed_form() {
    let c = Coefficient::preset(Preset::Ex3, 0.01).unwrap();
    let ah = homogenized_matrix(&c, 256).unwrap();
    let want = 1.1 * (1.1f64 * 1.1 - 0.25).sqrt();
    println!("EX3 A^H = {:?}", ah.matrix());
    for r in 0..2 {
        assert!((ah.entry(r, r) - want).abs() < 2e-3);
        assert!((ah.entry(r, r) - 1.0778).abs() < 2e-3);
    }
    assert!(ah.entry(0, 1).abs() < 1e-10);
}

#[test]
fn ex2_has_off_diagonal_entries() {
    let c = Coefficient::preset(Preset::Ex2, 0.01).unwrap();
    let ah = homogenized_matrix(&c, 256).unwrap();
    println!("EX2 A^H = {:?}", ah.matrix());
    let want = [[0.617, 0.026], [0.026, 0.715]];
    for r in 0..2 {
        for s in 0..2 {
            assert!((ah.entry(r, s) - want[r][s]).abs() < 5e-3, "({r},{s})");
        }
    }
}

#[test]
fn eigenvalues_lie_between_harmonic_and_arithmetic_means() {
    for text in [
        "EX2",
        "EX3",
        "1 + 0.3*sin(2*pi*x1/eps)*cos(2*pi*x2/eps) + 0.2*cos(2*pi*x1/eps)",
    ] {
        let c = parse_coefficient(text, 0.01).unwrap();
        let cell = c.unit_cell();
        let n = 64;
        let h = 1.0 / n as f64;
        let (mut inv, mut sum) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let v = cell(&[i as f64 * h, j as f64 * h, 0.0]);
                inv += 1.0 / v;
                sum += v;
            }
        }
        let cnt = (n * n) as f64;
        let (harm, arith) = (cnt / inv, sum / cnt);
        let ah = homogenized_matrix(&c, 64).unwrap();
        for ev in ah.eigenvalues() {
            assert!(
                ev >= harm - 1e-3 && ev <= arith + 1e-3,
                "{text}: {ev} not in [{harm}, {arith}]"
            );
        }
    }
}

#[test]
fn one_dimensional_result_is_the_harmonic_mean() {
    let a = |y: &[f64; 3]| {
        2.0 + (2.0 * std::f64::consts::PI * y[0]).cos() * 0.7
            + 0.3 * (4.0 * std::f64::consts::PI * y[0]).sin()
    };
    let ah = homogenized_matrix_of(a, 1, 1024).unwrap();
    let m = 200_000;
    let harm = 1.0
        / ((0..m)
            .map(|k| 1.0 / a(&[(k as f64 + 0.5) / m as f64, 0.0, 0.0]))
            .sum::<f64>()
            / m as f64);
    assert!((ah.entry(0, 0) - harm).abs() < 1e-6);
}

mod coefficient {
    use llhmm::coefficients::*;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn presets_agree_with_their_expression_twins() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in Preset::ALL {
            let eps = 0.01;
            let a = Coefficient::preset(p, eps).unwrap();
            let b = Coefficient::expression_with_dim(p.expression_text(), eps, p.dim()).unwrap();
            for _ in 0..1000 {
                let x = [rng.gen::<f64>(), rng.gen::<f64>(), 0.0];
                let (u, v) = (a.eval(&x), b.eval(&x));
                assert!((u - v).abs() <= 1e-14, "{p}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn ex1_text_matches_preset() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = parse_coefficient("1 + 0.5*sin(2*pi*x1/eps)", 1.0 / 200.0).unwrap();
        let b = parse_coefficient("EX1", 1.0 / 200.0).unwrap();
        assert_eq!(b.preset_kind(), Some(Preset::Ex1));
        for _ in 0..100 {
            let x = [rng.gen::<f64>(), 0.0, 0.0];
            assert!((a.eval(&x) - b.eval(&x)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_has_equal_bounds() {
        let c = parse_coefficient("1", 0.1).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!((c.a_min(), c.a_max()), (1.0, 1.0));
    }

    #[test]
    fn sampled_bounds_are_close_to_the_true_range() {
        let c = Coefficient::preset(Preset::Ex1, 1.0 / 400.0).unwrap();
        assert!((c.a_min() - 0.5).abs() < 1e-4);
        assert!((c.a_max() - 1.5).abs() < 1e-4);
    }

    #[test]
    fn rejects_non_positive_and_bad_epsilon() {
        assert!(matches!(
            parse_coefficient("sin(2*pi*x1/eps)", 0.1),
            Err(CoefficientError::NonPositive { .. })
        ));
        assert!(matches!(
            parse_coefficient("EX1", 1.5),
            Err(CoefficientError::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn unit_cell_rescales_the_argument() {
        let c = Coefficient::preset(Preset::Ex1, 0.01).unwrap();
        let cell = c.unit_cell();
        assert!((cell(&[0.25, 0.0, 0.0]) - 1.5).abs() < 1e-14);
    }
}

mod expr {
    use llhmm::coefficients::*;

    fn ev(s: &str) -> f64 {
        parse_expression(s).unwrap().eval(&[0.25, 0.5, 0.0], 0.1)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2*3"), 7.0);
        assert_eq!(ev("(1 + 2)*3"), 9.0);
        assert_eq!(ev("8/4/2"), 1.0);
        assert_eq!(ev("2^3^2"), 512.0);
        assert_eq!(ev("-2^2"), -4.0);
        assert_eq!(ev("1 - -1"), 2.0);
        assert_eq!(ev("2.5e-1*4"), 1.0);
    }

    #[test]
    fn variables_and_functions() {
        assert!((ev("x1 + x2 + eps") - 0.85).abs() < 1e-15);
        assert!((ev("sin(pi/2) + cos(0) + exp(0)") - 3.0).abs() < 1e-15);
    }

    #[test]
    fn reports_position_of_syntax_errors() {
        assert_eq!(
            parse_expression("sin("),
            Err(CoefficientError::SyntaxError {
                position: 4,
                message: "unexpected end of input".into()
            })
        );
        assert!(matches!(
            parse_expression("1 + * 2"),
            Err(CoefficientError::SyntaxError { position: 4, .. })
        ));
        assert!(matches!(
            parse_expression("(1"),
            Err(CoefficientError::SyntaxError { position: 2, .. })
        ));
        assert!(matches!(
            parse_expression("1 2"),
            Err(CoefficientError::SyntaxError { position: 2, .. })
        ));
    }

    #[test]
    fn rejects_unknown_identifiers() {
        assert_eq!(
            parse_expression("1 + tan(x1)"),
            Err(CoefficientError::UnknownIdentifier {
                name: "tan".into(),
                position: 4
            })
        );
        assert!(matches!(
            parse_expression("x4"),
            Err(CoefficientError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn tracks_highest_variable() {
        assert_eq!(parse_expression("1").unwrap().max_variable(), 0);
        assert_eq!(parse_expression("x1*x2").unwrap().max_variable(), 2);
    }
}

mod cell {
    use llhmm::coefficients::*;

    use llhmm::coefficients::Preset;
    use std::f64::consts::PI;

    #[test]
    fn constant_coefficient_gives_scaled_identity() {
        let sol = solve_cell_problem(|_| 2.5, 2, 16).unwrap();
        assert!(sol.chi(0).values().iter().all(|v| *v == 0.0));
        let ah = sol.effective_matrix();
        for r in 0..2 {
            for s in 0..2 {
                let want = if r == s { 2.5 } else { 0.0 };
                assert!((ah.entry(r, s) - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ex1_matches_harmonic_mean() {
        let c = Coefficient::preset(Preset::Ex1, 0.01).unwrap();
        let ah = homogenized_matrix(&c, 512).unwrap();
        assert!((ah.entry(0, 0) - 0.866).abs() < 1e-3);
        assert!((ah.entry(0, 0) - 0.75f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0; 3]];
        let ev = symmetric_eigenvalues(&m, 2);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_corrector_has_closed_form_derivative() {
        let a = |y: &[f64; 3]| 1.0 + 0.5 * (2.0 * PI * y[0]).sin();
        let n = 1024;
        let sol = solve_cell_problem(a, 1, n).unwrap();
        let c = 0.75f64.sqrt();
        // χ(y) = ∫_0^y (c/a - 1) minus its mean; reference by composite Simpson.
        let prim = |y: f64| {
            let m = 2000;
            let h = y / m as f64;
            let g = |t: f64| c / a(&[t, 0.0, 0.0]) - 1.0;
            let mut s = g(0.0) + g(y);
            for k in 1..m {
                s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(k as f64 * h);
            }
            s * h / 3.0
        };
        let mut reference: Vec<f64> = (0..n).map(|i| prim(i as f64 / n as f64)).collect();
        let mean = reference.iter().sum::<f64>() / n as f64;
        reference.iter_mut().for_each(|v| *v -= mean);
        let err = sol
            .chi(0)
            .values()
            .iter()
            .zip(&reference)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "max error {err:e}");
    }
}

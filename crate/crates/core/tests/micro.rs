use llhmm::coefficients::{homogenized_matrix, Coefficient, Preset};
use llhmm::grid_fd::{Field, Grid, Mat3};
use llhmm::kernels::{construct_kernel, space_time_average, SampledTrajectory};
use llhmm::micro::*;
use llhmm::vec3::{self, Vec3};

fn slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() - 1;
    (e[n] / e[0]).ln() / (h[n] / h[0]).ln()
}

fn ex2_ah() -> Mat3 {
    let c = Coefficient::preset(Preset::Ex2, 0.01).unwrap();
    *homogenized_matrix(&c, 128).unwrap().matrix()
}

#[test]
fn interpolant_norm_defect_converges_at_order_2k_plus_1() {
    for order in [2, 4] {
        let hs = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let s = macro_stencil(InitialData::Ex2, &[0.1, 0.3, 0.0], h, order).unwrap();
                let g = Grid::centered_box(2, 10, h / 20.0).unwrap();
                s.eval_on_grid(&g)
                    .unwrap()
                    .iter()
                    .map(|p| (vec3::norm(*p) - 1.0).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let k = slope(&hs, &errs);
        assert!(
            (k - (order + 1) as f64).abs() < 0.5,
            "order {order}: slope {k} {errs:?}"
        );
    }
}

#[test]
fn unit_interpolant_is_left_unchanged() {
    let s = StencilInterpolant::sample(2, 1, 0.1, &[0.0; 3], |_| [0.6, 0.0, 0.8]).unwrap();
    let g = Grid::centered_box(2, 4, 0.02).unwrap();
    let p = s.eval_on_grid(&g).unwrap();
    let q = s.normalized_on_grid(&g).unwrap();
    for (a, b) in p.iter().zip(&q) {
        assert!(vec3::max_abs(vec3::sub(*a, *b)) < 1e-15);
    }
}

#[test]
fn second_derivative_of_q_converges_at_order_2k() {
    let data = InitialData::Ex2;
    let exact = data.derivatives(&[0.0; 3]).hess[0][0];
    for order in [2, 4] {
        let hs = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let s = macro_stencil(data, &[0.0; 3], h, order).unwrap();
                let d = s.normalized_derivatives(&[0.0; 3]).unwrap();
                vec3::norm(vec3::sub(d.hess[0][0], exact))
            })
            .collect();
        let k = slope(&hs, &errs);
        assert!((k - order as f64).abs() < 0.3, "order {order}: slope {k}");
    }
}

#[test]
fn discretization_error_slopes_for_p_and_q() {
    let ah = ex2_ah();
    let hs = [1.0 / 12.0, 1.0 / 24.0, 1.0 / 48.0];
    for order in [2, 4] {
        let mut last = Vec::new();
        for norm in [Normalization::Polynomial, Normalization::Normalized] {
            let errs: Vec<f64> = hs
                .iter()
                .map(|&h| {
                    discretization_error(InitialData::Ex2, &[0.0; 3], h, order, &ah, norm).unwrap()
                })
                .collect();
            let k = slope(&hs, &errs);
            assert!(
                (k - order as f64).abs() < 0.3,
                "order {order} {norm:?}: slope {k}"
            );
            last.push(errs[0]);
        }
        assert!(
            (last[0] - last[1]).abs() > 1e-3 * last[1],
            "P and Q agree: {last:?}"
        );
    }
}

#[test]
fn discretization_error_at_coarse_grid_matches_table_value() {
    let e = discretization_error(
        InitialData::Ex2,
        &[0.0; 3],
        1.0 / 12.0,
        4,
        &ex2_ah(),
        Normalization::Normalized,
    )
    .unwrap();
    assert!(e > 2.3e-2 / 2.0 && e < 2.3e-2 * 2.0, "{e}");
}

fn constant_coefficient(value: &str, dim: usize) -> Coefficient {
    Coefficient::expression_with_dim(value, 0.01, dim).unwrap()
}

#[test]
fn constant_data_gives_zero_field() {
    let coef = constant_coefficient("1.3", 2);
    let setup = MicroSetup::new(2.0, 3.0, 0.3).unwrap();
    let disc = setup.resolve(&coef).unwrap();
    let grid = micro_grid(&disc).unwrap();
    let m0 = Field::filled(grid, [0.0, 0.6, 0.8]);
    let mut max_field = 0.0f64;
    let r = solve_micro_with(&m0, &coef, &[0.2, 0.4, 0.0], &setup, |f| {
        max_field = f
            .field
            .iter()
            .map(|v| vec3::max_abs(*v))
            .fold(max_field, f64::max);
    })
    .unwrap();
    assert_eq!(max_field, 0.0);
    assert_eq!(r.h_avg, [0.0; 3]);
}

#[test]
fn micro_solution_stays_on_the_sphere() {
    let coef = Coefficient::preset(Preset::Ex2, 0.01).unwrap();
    let setup = MicroSetup::new(2.0, 3.0, 0.3).unwrap();
    let disc = setup.resolve(&coef).unwrap();
    let grid = micro_grid(&disc).unwrap();
    let s = macro_stencil(InitialData::Ex2, &[0.3, 0.1, 0.0], 1.0 / 12.0, 4).unwrap();
    let m0 = micro_initial_data(&s, &grid).unwrap();
    let mut drift = 0.0f64;
    let r = solve_micro_with(&m0, &coef, &[0.3, 0.1, 0.0], &setup, |f| {
        drift =
            f.m.iter()
                .map(|v| (vec3::norm(*v) - 1.0).abs())
                .fold(drift, f64::max);
    })
    .unwrap();
    assert!(drift <= 1e-10 && r.norm_drift <= 1e-10, "{drift}");
    assert!(vec3::is_finite(r.h_avg));
}

/// Final micro state for a 1D EX1 problem with half-width `mu_prime` (units of ε).
fn ex1_final_state(mu_prime: f64) -> (Grid, Vec<Vec3>) {
    let coef = Coefficient::preset(Preset::Ex1, 0.01).unwrap();
    let setup = MicroSetup::new(2.0, mu_prime, 1.0)
        .unwrap()
        .with_alpha(0.01)
        .unwrap();
    let disc = setup.resolve(&coef).unwrap();
    let grid = micro_grid(&disc).unwrap();
    let center = [0.4, 0.0, 0.0];
    let s = macro_stencil(InitialData::Ex1, &center, 1.0 / 8.0, 4).unwrap();
    let m0 = micro_initial_data(&s, &grid).unwrap();
    let mut last = Vec::new();
    solve_micro_with(&m0, &coef, &center, &setup, |f| last = f.m.to_vec()).unwrap();
    (grid, last)
}

#[test]
fn boundary_errors_stay_near_the_boundary() {
    let (g_small, small) = ex1_final_state(5.0);
    let (g_large, large) = ex1_final_state(10.0);
    let eps = 0.01;
    let shift = (g_large.count(0) - g_small.count(0)) / 2;
    let (mut inner, mut outer) = (0.0f64, 0.0f64);
    for (i, v) in small.iter().enumerate() {
        let x = g_small.coords(i)[0];
        let d = vec3::norm(vec3::sub(*v, large[i + shift]));
        if x.abs() <= 2.0 * eps {
            inner = inner.max(d);
        } else if x.abs() >= 4.0 * eps {
            outer = outer.max(d);
        }
    }
    println!("inner {inner:e} outer {outer:e}");
    assert!(inner <= 1e-3);
    // weakly damped dispersive waves spread the boundary mismatch quickly,
    // so only the ordering is asserted
    assert!(outer > inner);
}

#[test]
fn zero_trajectory_upscales_to_zero() {
    let ks = construct_kernel(3, 7, false).unwrap();
    let kt = construct_kernel(3, 7, true).unwrap();
    let g = Grid::centered_box(2, 8, 0.01).unwrap();
    let mut traj = SampledTrajectory::new(g.clone());
    for n in 0..=4 {
        traj.push(n as f64 * 0.25e-4, vec![[0.0; 3]; g.len()]);
    }
    let avg = space_time_average(&traj, &ks, &kt, 0.08, 1e-4).unwrap();
    assert_eq!(avg, [0.0; 3]);
}

#[test]
fn constant_coefficient_recovers_laplacian_of_quadratic_data() {
    let coef = constant_coefficient("1", 2);
    let setup = MicroSetup::new(3.0, 8.0, 0.5).unwrap();
    let h = 0.2;
    let quad = |x: &[f64; 3]| -> Vec3 {
        let (a, b) = (x[0], x[1]);
        [
            0.3 + 0.2 * a - 0.1 * b * b,
            0.05 * a * b + 0.2 * b,
            0.9 - 0.1 * a * a,
        ]
    };
    let stencil = StencilInterpolant::sample(2, 1, h, &[0.0; 3], |x| {
        let v = quad(x);
        vec3::scale(1.0 / vec3::norm(v), v)
    })
    .unwrap();
    let disc = setup.resolve(&coef).unwrap();
    let grid = micro_grid(&disc).unwrap();
    let m0 = micro_initial_data(&stencil, &grid).unwrap();
    let r = solve_micro(&m0, &coef, &[0.0; 3], &setup).unwrap();
    let lap = homogenized_field(
        &stencil.normalized_derivatives(&[0.0; 3]).unwrap(),
        &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0; 3]],
        2,
    );
    let err = vec3::norm(vec3::sub(r.h_avg, lap));
    println!("H_avg {:?} laplacian {lap:?} err {err:e}", r.h_avg);
    assert!(err <= 1e-4 * vec3::norm(lap).max(1.0));
}

#[test]
fn trajectory_upscaling_matches_streaming() {
    let coef = Coefficient::preset(Preset::Ex2, 0.01).unwrap();
    let setup = MicroSetup::new(2.0, 3.0, 0.2).unwrap();
    let disc = setup.resolve(&coef).unwrap();
    let grid = micro_grid(&disc).unwrap();
    let s = macro_stencil(InitialData::Ex2, &[0.0; 3], 1.0 / 12.0, 4).unwrap();
    let m0 = micro_initial_data(&s, &grid).unwrap();
    let streamed = solve_micro(&m0, &coef, &[0.0; 3], &setup).unwrap();
    let (traj, stored) = solve_micro_trajectory(&m0, &coef, &[0.0; 3], &setup).unwrap();
    assert_eq!(traj.len(), disc.steps + 1);
    let d = vec3::norm(vec3::sub(streamed.h_avg, stored.h_avg));
    assert!(d <= 1e-12 * vec3::norm(stored.h_avg), "{d:e}");
    let multi = solve_micro_multi(&m0, &coef, &[0.0; 3], &setup, &[1.5, 2.0]).unwrap();
    assert_eq!(multi.h_avg[1], streamed.h_avg);
}

#[test]
fn exact_field_has_no_averaging_error() {
    let ah = ex2_ah();
    let s = macro_stencil(InitialData::Ex2, &[0.0; 3], 1.0 / 12.0, 4).unwrap();
    let init = homogenized_field(&s.normalized_derivatives(&[0.0; 3]).unwrap(), &ah, 2);
    let exact = homogenized_field(&InitialData::Ex2.derivatives(&[0.0; 3]), &ah, 2);
    let d = ErrorDecomposition::new(init, init, exact);
    assert_eq!(d.e_avg, 0.0);
    assert_eq!(d.e_approx, d.e_disc);
}

#[test]
fn decomposition_needs_a_reference() {
    let coef = Coefficient::preset(Preset::Quasi2d, 0.01).unwrap();
    let setup = MicroSetup::new(2.0, 3.0, 0.2).unwrap();
    let r = error_decomposition(&[0.0; 3], InitialData::Ex2, 1.0 / 12.0, &setup, &coef, None);
    assert!(matches!(r, Err(MicroError::NoReferenceAvailable(_))));
}

#[test]
fn averaging_error_is_small_for_a_saturated_setup() {
    let coef = Coefficient::preset(Preset::Ex2, 0.01).unwrap();
    let setup = MicroSetup::preset(SetupPreset::S3).unwrap();
    let d = error_decomposition(
        &[0.0; 3],
        InitialData::Ex2,
        1.0 / 12.0,
        &setup,
        &coef,
        Some(&ex2_ah()),
    )
    .unwrap();
    println!("{d:?}");
    assert!(d.e_avg < 5e-2);
    assert!((d.e_approx - d.e_disc).abs() <= d.e_avg + 1e-15);
}

#[test]
fn setup_validation() {
    assert!(matches!(
        MicroSetup::new(3.0, 2.0, 1.0),
        Err(MicroError::InvalidSetup(_))
    ));
    assert!(MicroSetup::new(3.0, 4.0, 0.0).is_err());
    let s = MicroSetup::new(3.0, 4.0, 1.0).unwrap();
    assert!(s.clone().with_interp_order(3).is_err());
    assert!(s.clone().with_points_per_eps(6).is_err());
    let coef = Coefficient::preset(Preset::Ex2, 0.01).unwrap();
    let limit = s.stable_dt_factor(&coef);
    let r = s
        .clone()
        .with_dt_factor(2.0 * limit)
        .unwrap()
        .resolve(&coef);
    assert!(matches!(r, Err(MicroError::UnstableStep { .. })));
    let disc = s
        .with_dt_factor(0.5 * limit)
        .unwrap()
        .resolve(&coef)
        .unwrap();
    assert!(disc.dt <= 0.5 * limit * disc.dx * disc.dx * (1.0 + 1e-12));
    assert!((disc.steps as f64 * disc.dt - disc.eta).abs() < 1e-15);
    assert_eq!("s2".parse::<SetupPreset>().unwrap(), SetupPreset::S2);
}

mod interp {
    use llhmm::grid_fd::*;
    use llhmm::micro::InitialData;
    use llhmm::micro::*;
    use llhmm::vec3::{self};

    #[test]
    fn constant_stencil_gives_constant_values() {
        let s = StencilInterpolant::sample(2, 2, 0.1, &[0.0; 3], |_| [0.0, 0.6, 0.8]).unwrap();
        let g = Grid::centered_box(2, 5, 0.03).unwrap();
        for v in s.eval_on_grid(&g).unwrap() {
            assert!(vec3::max_abs(vec3::sub(v, [0.0, 0.6, 0.8])) < 1e-14);
        }
    }

    #[test]
    fn reproduces_stencil_nodes() {
        let data = InitialData::Ex2;
        let c = [0.3, 0.7, 0.0];
        let h = 1.0 / 12.0;
        let s = StencilInterpolant::sample(2, 2, h, &c, |x| data.value(x)).unwrap();
        for i in -2..=2 {
            for j in -2..=2 {
                let off = [i as f64 * h, j as f64 * h, 0.0];
                let p = s.eval(&off).unwrap();
                let m = data.value(&[c[0] + off[0], c[1] + off[1], 0.0]);
                assert!(vec3::max_abs(vec3::sub(p, m)) <= 1e-14);
                let q = s.normalized_derivatives(&off).unwrap().value;
                assert!(vec3::max_abs(vec3::sub(q, m)) <= 1e-14);
            }
        }
    }

    #[test]
    fn rejects_extrapolation() {
        let s = StencilInterpolant::sample(1, 1, 0.1, &[0.0; 3], |x| [x[0], 1.0, 0.0]).unwrap();
        assert!(matches!(
            s.eval(&[0.15, 0.0, 0.0]),
            Err(MicroError::ExtrapolationRequested { .. })
        ));
        let g = Grid::centered_box(1, 20, 0.01).unwrap();
        assert!(s.eval_on_grid(&g).is_err());
    }

    #[test]
    fn normalization_rejects_zero_vectors() {
        let mut v = vec![[1.0, 0.0, 0.0], [0.0; 3]];
        assert!(matches!(
            normalize_initial_data(&mut v),
            Err(MicroError::VanishingInterpolant { node: 1 })
        ));
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let data = InitialData::Ex2;
        let s =
            StencilInterpolant::sample(2, 2, 0.05, &[0.4, 0.1, 0.0], |x| data.value(x)).unwrap();
        let g = Grid::centered_box(2, 6, 0.013).unwrap();
        let vals = s.eval_on_grid(&g).unwrap();
        for (i, v) in vals.iter().enumerate() {
            let p = s.eval(&g.coords(i)).unwrap();
            assert!(vec3::max_abs(vec3::sub(*v, p)) < 1e-14);
        }
    }
}

mod initial {
    use llhmm::micro::*;

    use llhmm::vec3::{self};

    fn fd_check(data: InitialData, x: [f64; 3]) {
        let h = 1e-5;
        let d = data.derivatives(&x);
        for r in 0..data.dim() {
            let mut xp = x;
            let mut xm = x;
            xp[r] += h;
            xm[r] -= h;
            let fd = vec3::scale(0.5 / h, vec3::sub(data.value(&xp), data.value(&xm)));
            assert!(vec3::max_abs(vec3::sub(fd, d.grad[r])) < 1e-8);
            for s in 0..data.dim() {
                let gp = data.derivatives(&xp).grad[s];
                let gm = data.derivatives(&xm).grad[s];
                let fd2 = vec3::scale(0.5 / h, vec3::sub(gp, gm));
                assert!(vec3::max_abs(vec3::sub(fd2, d.hess[r][s])) < 1e-7, "{r}{s}");
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        fd_check(InitialData::Ex1, [0.13, 0.0, 0.0]);
        fd_check(InitialData::Ex1, [0.71, 0.0, 0.0]);
        fd_check(InitialData::Ex2, [0.3, 0.62, 0.0]);
        fd_check(InitialData::Ex2, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn values_are_unit_vectors() {
        for i in 0..20 {
            let x = [i as f64 / 20.0, 1.0 - i as f64 / 37.0, 0.0];
            assert!((vec3::norm(InitialData::Ex2.value(&x)) - 1.0).abs() < 1e-15);
        }
    }
}

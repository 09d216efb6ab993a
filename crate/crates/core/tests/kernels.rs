mod kernel {
    use llhmm::kernels::*;

    #[test]
    fn lowest_symmetric_kernel_is_the_parabola() {
        let k = construct_kernel(0, 0, false).unwrap();
        assert!((k.coeffs()[0] - 0.75).abs() < 1e-14);
        assert!((k.eval(0.5) - 0.75 * 0.75).abs() < 1e-14);
    }

    #[test]
    fn moments_vanish_for_both_kinds() {
        for one_sided in [false, true] {
            let k = construct_kernel(3, 7, one_sided).unwrap();
            let m = k.moment_certificate();
            assert!((m[0] - 1.0).abs() < 1e-10);
            for r in 1..=3 {
                assert!(m[r].abs() < 1e-10, "moment {r} = {}", m[r]);
            }
        }
    }

    #[test]
    fn one_sided_kernel_vanishes_for_negative_times() {
        let k = construct_kernel(3, 7, true).unwrap();
        assert_eq!(k.eval(-0.1), 0.0);
        assert_eq!(k.eval(1.2), 0.0);
        assert!(k.eval(0.5) != 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for one_sided in [false, true] {
            let k = construct_kernel(3, 7, one_sided).unwrap();
            let x = if one_sided { 0.37 } else { 0.41 };
            let h = 1e-5;
            let fd1 = (k.eval(x + h) - k.eval(x - h)) / (2.0 * h);
            assert!((k.derivative(x, 1) - fd1).abs() < 1e-6 * fd1.abs().max(1.0));
            let fd2 = (k.derivative(x + h, 2) - k.derivative(x - h, 2)) / (2.0 * h);
            assert!((k.derivative(x, 3) - fd2).abs() < 1e-5 * fd2.abs().max(1.0));
            assert!((k.derivative(x, 0) - k.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn dump_and_load_round_trip() {
        let k = construct_kernel(3, 7, true).unwrap();
        let back = Kernel::load(&k.dump()).unwrap();
        assert_eq!(k, back);
        assert!(Kernel::load("p 3\nq 7\n").is_err());
    }

    #[test]
    fn rejects_large_parameters() {
        assert!(matches!(
            construct_kernel(13, 2, false),
            Err(KernelError::InvalidParameters { .. })
        ));
    }
}

mod average {
    use llhmm::grid_fd::*;
    use llhmm::kernels::construct_kernel;
    use llhmm::kernels::*;
    use llhmm::vec3::{self, *};

    fn box_trajectory(
        dim: usize,
        mu: f64,
        eta: f64,
        f: impl Fn(&[f64; 3], f64) -> Vec3,
    ) -> SampledTrajectory {
        let dx = mu / 40.0;
        let grid = Grid::centered_box(dim, 40, dx).unwrap();
        let mut traj = SampledTrajectory::new(grid.clone());
        let nt = 60;
        for n in 0..=nt {
            let t = eta * n as f64 / nt as f64;
            traj.push(t, (0..grid.len()).map(|i| f(&grid.coords(i), t)).collect());
        }
        traj
    }

    #[test]
    fn constants_are_reproduced() {
        let ks = construct_kernel(3, 7, false).unwrap();
        let kt = construct_kernel(3, 7, true).unwrap();
        for dim in [1, 2] {
            let traj = box_trajectory(dim, 0.03, 1e-4, |_, _| [1.0, -2.0, 0.5]);
            let avg = space_time_average(&traj, &ks, &kt, 0.03, 1e-4).unwrap();
            assert!(
                vec3::max_abs(vec3::sub(avg, [1.0, -2.0, 0.5])) < 1e-8,
                "{avg:?}"
            );
        }
    }

    #[test]
    fn low_order_monomials_are_annihilated() {
        let ks = construct_kernel(3, 7, false).unwrap();
        let kt = construct_kernel(3, 7, true).unwrap();
        let mu = 0.05;
        for r in 1..=3 {
            let traj = box_trajectory(1, mu, 1e-3, |x, _| [(x[0] / mu).powi(r), 0.0, 0.0]);
            let avg = space_time_average(&traj, &ks, &kt, mu, 1e-3).unwrap();
            assert!(avg[0].abs() < 1e-6, "r={r}: {}", avg[0]);
        }
    }

    #[test]
    fn rejects_boxes_smaller_than_mu() {
        let ks = construct_kernel(3, 7, false).unwrap();
        let kt = construct_kernel(3, 7, true).unwrap();
        let traj = box_trajectory(1, 0.03, 1e-4, |_, _| [1.0; 3]);
        assert!(matches!(
            space_time_average(&traj, &ks, &kt, 0.05, 1e-4),
            Err(KernelError::AveragingBoxExceedsData(_))
        ));
        assert!(space_time_average(&traj, &ks, &kt, 0.03, 2e-4).is_err());
    }
}

mod quadrature {
    use llhmm::kernels::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        let q = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        assert!((q(0) - 2.0).abs() < 1e-14);
        assert!((q(18) - 2.0 / 19.0).abs() < 1e-14);
        assert!(q(7).abs() < 1e-15);
    }

    #[test]
    fn simpson_is_fourth_order() {
        let e = |n| (composite_simpson(f64::exp, 0.0, 1.0, n) - (1f64.exp() - 1.0)).abs();
        assert!((e(8) / e(16) - 16.0).abs() < 0.5);
    }
}

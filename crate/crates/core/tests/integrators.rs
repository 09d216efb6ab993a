mod steppers {
    use llhmm::grid_fd::*;
    use llhmm::grid_fd::{FaceCoefficients, Grid};
    use llhmm::integrators::*;
    use llhmm::integrators::{ConstantField, MicroExchange};
    use llhmm::vec3::{self, *};
    use std::f64::consts::PI;

    fn spin(m: Vec3) -> MagnetizationField {
        Field::from_values(Grid::periodic_unit(1, 1).unwrap(), vec![m]).unwrap()
    }

    fn chain(n: usize) -> MagnetizationField {
        let g = Grid::periodic_unit(1, n).unwrap();
        let mut f = Field::from_fn(g, |x| {
            let p = 2.0 * PI * x[0];
            [0.3 * p.cos(), 0.3 * p.sin(), 1.0]
        });
        f.normalize().unwrap();
        f
    }

    /// Precession about z at unit rate, with damping pulling toward +z.
    fn exact_spin(t: f64, alpha: f64) -> Vec3 {
        let theta0 = PI / 2.0;
        let theta = 2.0 * ((theta0 / 2.0).tan() * (-alpha * t).exp()).atan();
        [theta.sin() * t.cos(), theta.sin() * t.sin(), theta.cos()]
    }

    fn spin_error(method: Method, dt: f64, alpha: f64) -> f64 {
        let p = ConstantField {
            value: [0.0, 0.0, 1.0],
            nodes: 1,
        };
        let t_end = 1.0;
        let steps = (t_end / dt).round() as usize;
        let mut s = Stepper::new(method, spin([1.0, 0.0, 0.0]), dt, alpha).unwrap();
        s.run(&p, steps).unwrap();
        vec3::norm(vec3::sub(s.current().values()[0], exact_spin(t_end, alpha)))
    }

    #[test]
    fn single_spin_orders() {
        for (method, order, tol) in [
            (Method::HeunP, 2.0, 0.2),
            (Method::Rk4P, 4.0, 0.3),
            (Method::Mpe, 2.0, 0.2),
            (Method::ImplicitMidpoint, 2.0, 0.2),
        ] {
            let e: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
                .iter()
                .map(|dt| spin_error(method, *dt, 0.1))
                .collect();
            let slope = (e[0] / e[2]).log2() / 2.0;
            assert!(
                (slope - order).abs() < tol,
                "{method}: slope {slope}, errors {e:?}"
            );
        }
        let e: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|dt| spin_error(Method::Mpea, *dt, 0.1))
            .collect();
        assert!((e[0] / e[1]).log2() >= 1.8);
    }

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let m0 = chain(16);
        let p = ConstantField {
            value: [0.0; 3],
            nodes: 16,
        };
        for method in Method::ALL {
            let mut s = Stepper::new(method, m0.clone(), 1e-3, 0.5).unwrap();
            s.run(&p, 4).unwrap();
            assert!(s.current().max_distance(&m0) < 1e-15, "{method}");
            if method == Method::ImplicitMidpoint {
                assert_eq!(s.state().last_iterations(), 1);
            }
        }
    }

    #[test]
    fn all_methods_preserve_unit_norm() {
        let m0 = chain(32);
        let g = m0.grid().clone();
        let faces =
            FaceCoefficients::new(&g, |x| 1.0 + 0.5 * (2.0 * PI * 4.0 * x[0]).sin()).unwrap();
        let p = MicroExchange::new(faces);
        let dt = 0.05 / (32.0 * 32.0);
        for method in Method::ALL {
            let mut s = Stepper::new(method, m0.clone(), dt, 0.1).unwrap();
            for _ in 0..20 {
                s.step(&p).unwrap();
                assert!(s.current().max_norm_deviation() <= 1e-12, "{method}");
            }
        }
    }

    #[test]
    fn multistep_requires_history() {
        let p = ConstantField {
            value: [0.0, 0.0, 1.0],
            nodes: 1,
        };
        let mut st = IntegratorState::new(spin([1.0, 0.0, 0.0]), 0.01).unwrap();
        assert!(matches!(
            step_mpe(&mut st, &p, 0.0),
            Err(IntegratorError::MissingHistory {
                needed: 1,
                available: 0
            })
        ));
        step_rk4_p(&mut st, &p, 0.0).unwrap();
        step_mpe(&mut st, &p, 0.0).unwrap();
        assert!(step_mpea(&mut st, &p, 0.0).is_ok());
    }

    #[test]
    fn implicit_midpoint_conserves_exchange_energy() {
        let n = 32;
        let m0 = chain(n);
        let g = m0.grid().clone();
        let p = MicroExchange::new(FaceCoefficients::constant(&g, 1.0).unwrap());
        let energy = |m: &MagnetizationField| {
            let v = m.values();
            let h = g.spacing(0);
            0.5 * (0..n)
                .map(|i| {
                    let d = vec3::sub(v[(i + 1) % n], v[i]);
                    vec3::dot(d, d) / (h * h)
                })
                .sum::<f64>()
                * h
        };
        let e0 = energy(&m0);
        let mut s = Stepper::new(Method::ImplicitMidpoint, m0, 0.2 / (n * n) as f64, 0.0).unwrap();
        s.run(&p, 100).unwrap();
        let e1 = energy(s.current());
        assert!((e1 - e0).abs() <= 1e-8, "drift {}", e1 - e0);
    }

    #[test]
    fn stepping_is_deterministic() {
        let m0 = chain(24);
        let g = m0.grid().clone();
        let p = MicroExchange::new(FaceCoefficients::new(&g, |x| 1.2 + x[0].sin()).unwrap());
        let run = || {
            let mut s = Stepper::new(Method::Mpea, m0.clone(), 1e-4, 0.01).unwrap();
            s.run(&p, 30).unwrap();
            s.current().values().to_vec()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_non_unit_input() {
        let p = ConstantField {
            value: [0.0, 0.0, 1.0],
            nodes: 1,
        };
        let mut st = IntegratorState::new(spin([2.0, 0.0, 0.0]), 0.01).unwrap();
        assert!(matches!(
            step_heun_p(&mut st, &p, 0.0),
            Err(IntegratorError::NotUnitNorm { .. })
        ));
    }
}

mod rhs {
    use llhmm::integrators::*;

    use llhmm::vec3::{self, *};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        let v = [
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        ];
        vec3::scale(1.0 / vec3::norm(v), v)
    }

    #[test]
    fn single_spin_precesses_about_the_field() {
        assert_eq!(
            llg_rhs_node([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0),
            [0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn parallel_field_gives_no_torque() {
        let f = llg_rhs_node([0.0, 0.6, 0.8], [0.0, 1.2, 1.6], 0.7);
        assert_eq!(f, [0.0; 3]);
        assert_eq!(
            compose_h_node([0.0, 0.6, 0.8], [0.0, 1.2, 1.6], 0.7),
            [0.0, 1.2, 1.6]
        );
        assert_eq!(
            compose_h_node([0.0, 0.6, 0.8], [1.0, 2.0, 3.0], 0.0),
            [1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn rhs_is_tangent_and_equals_minus_m_cross_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let m = random_unit(&mut rng);
            let h = [
                rng.gen::<f64>() * 4.0 - 2.0,
                rng.gen::<f64>(),
                rng.gen::<f64>() - 3.0,
            ];
            let alpha = rng.gen::<f64>() * 2.0;
            let f = llg_rhs_node(m, h, alpha);
            assert!(vec3::dot(f, m).abs() < 1e-14);
            let alt = vec3::scale(-1.0, vec3::cross(m, compose_h_node(m, h, alpha)));
            assert!(vec3::max_abs(vec3::sub(f, alt)) < 1e-14);
        }
    }

    #[test]
    fn cayley_update_solves_the_midpoint_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = random_unit(&mut rng);
            let h = [rng.gen::<f64>() * 10.0, rng.gen::<f64>() - 0.5, 3.0];
            let dt = 0.37;
            let x = cayley_update(m, h, dt);
            let rhs = vec3::scale(0.5 * dt, vec3::cross(h, vec3::add(m, x)));
            assert!(vec3::max_abs(vec3::sub(vec3::sub(x, m), rhs)) < 1e-13);
            assert!((vec3::norm(x) - 1.0).abs() < 1e-14);
        }
    }
}

mod stability {
    use llhmm::integrators::*;

    use llhmm::grid_fd::{Field, Grid};
    use llhmm::integrators::ConstantField;

    #[test]
    fn linear_radii_order_as_expected() {
        let heun = linear_stability_radius(Method::HeunP, 1.2);
        assert!((heun - 1.4).abs() < 0.1, "{heun}");
        let a = 0.01;
        assert!(
            linear_stability_radius(Method::Rk4P, a) > linear_stability_radius(Method::HeunP, a)
        );
        assert!(linear_stability_radius(Method::Mpea, a) > linear_stability_radius(Method::Mpe, a));
        // RK4 on the imaginary axis reaches 2√2.
        assert!((linear_stability_radius(Method::Rk4P, 0.0) - 2.0 * 2f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn zero_field_returns_bracket_top() {
        let table = estimate_stability_limit(
            Method::HeunP,
            &[0.1],
            0.01,
            &StabilityProbe::default(),
            |_dx| {
                let g = Grid::periodic_unit(1, 10).unwrap();
                let m = Field::filled(g, [0.0, 0.6, 0.8]);
                Ok((
                    ConstantField {
                        value: [0.0; 3],
                        nodes: 10,
                    },
                    m,
                ))
            },
        )
        .unwrap();
        assert!(table.rows[0].at_bracket_top);
        assert!((table.rows[0].dt_max - 0.1).abs() < 1e-15);
    }
}

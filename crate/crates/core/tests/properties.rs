use faer::Mat;
use localtaylor_core::cheb_time::{chebyshev_coefficients, chebyshev_sum};
use localtaylor_core::problems::{self, Polynomial};
use localtaylor_core::{
    build_system_2d, collocation_points, solve_least_squares, AssemblyOptions, Mesh, PdeCoefficients,
    SampleOptions, SchemeParams, SolveConfig, TimeDiscretization,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chebyshev_series_round_trip(
        order in 1usize..=30,
        t_final in 0.05f64..3.0,
        seed in prop::collection::vec(-1.0f64..1.0, 31),
    ) {
        let nodes = collocation_points(order, t_final).unwrap();
        // a polynomial of degree <= N in t
        let p = |t: f64| seed[..=order].iter().rev().fold(0.0, |acc, c| acc * (t / t_final) + c);
        let nodal: Vec<f64> = nodes.iter().map(|&t| p(t)).collect();
        let coeffs = chebyshev_coefficients(&nodal);
        let scale = nodal.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (&t, v) in nodes.iter().zip(&nodal) {
            prop_assert!((chebyshev_sum(&coeffs, t, t_final) - v).abs() <= 1e-12 * scale);
        }
        let mid = 0.37 * t_final;
        prop_assert!((chebyshev_sum(&coeffs, mid, t_final) - p(mid)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn differentiation_is_exact_for_monomials(order in 1usize..=20, power in 0usize..=20, t_final in 0.1f64..2.0) {
        let power = power.min(order);
        let disc = TimeDiscretization::new(order, t_final).unwrap();
        let nodes = disc.nodes();
        let d = disc.full();
        for i in 0..=order {
            let approx: f64 = (0..=order).map(|j| d[(i, j)] * (nodes[j] / t_final).powi(power as i32)).sum();
            let exact = if power == 0 { 0.0 } else { power as f64 * (nodes[i] / t_final).powi(power as i32 - 1) / t_final };
            prop_assert!((approx - exact).abs() <= 1e-10 * (1.0 + exact.abs()) * (order * order) as f64 / t_final);
        }
    }

    #[test]
    fn least_squares_is_optimal(rows in 4usize..40, extra in 0usize..20, seed in any::<u64>()) {
        let cols = rows.min(3 + extra % rows);
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let m = Mat::from_fn(rows, cols, |_, _| next());
        let b: Vec<f64> = (0..rows).map(|_| next()).collect();
        let sol = solve_least_squares(m.as_ref(), &b).unwrap();
        prop_assert!(sol.relative_optimality(m.as_ref(), &b) < 1e-10);
        let r: f64 = (0..rows)
            .map(|i| {
                let mx: f64 = (0..cols).map(|j| m[(i, j)] * sol.solution[j]).sum();
                (mx - b[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        prop_assert!((r - sol.residual_norm).abs() <= 1e-10 * (1.0 + r));
    }

    #[test]
    fn low_degree_polynomials_are_recovered(
        c in prop::collection::vec(-1.0f64..1.0, 6),
        vx in -1.0f64..1.0,
        vy in -1.0f64..1.0,
        dx in 0.2f64..2.0,
        dy in 0.2f64..2.0,
        theta in 0.0f64..=1.0,
    ) {
        let initial = Polynomial::from_terms(&[
            ([0, 0, 0], c[0]), ([1, 0, 0], c[1]), ([0, 1, 0], c[2]),
            ([2, 0, 0], c[3]), ([1, 1, 0], c[4]), ([0, 2, 0], c[5]),
        ]);
        let problem = problems::manufactured_2d(initial, PdeCoefficients::new_2d([vx, vy], [dx, dy]), 0.2);
        let config = SolveConfig::new(problem, 2, 4, 3, 4, theta);
        let sol = localtaylor_core::solve(&config).unwrap();
        let r = sol.report(&SampleOptions { density: 4, dense_times: 3, keep_samples: false });
        prop_assert!(r.e_inf <= 1e-10, "{:e}", r.e_inf);
    }

    #[test]
    fn single_element_ignores_theta(theta in 0.0f64..=1.0, order in 2usize..7) {
        let time = TimeDiscretization::new(3, 0.1).unwrap().operator();
        let mesh = Mesh::unit_square(1, 1).unwrap();
        let problem = problems::problem2();
        let opts = AssemblyOptions::default();
        let a = build_system_2d(&mesh, &SchemeParams::new(order, 5, 0.5), &time, &problem, None, &opts).unwrap();
        let b = build_system_2d(&mesh, &SchemeParams::new(order, 5, theta), &time, &problem, None, &opts).unwrap();
        prop_assert!(a.rhs.iter().zip(&b.rhs).all(|(x, y)| x.to_bits() == y.to_bits()));
        for j in 0..a.cols() {
            prop_assert!(a.matrix.col(j).iter().zip(b.matrix.col(j).iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}

//! Randomized invariant checks for the core numerical routines.

use proptest::prelude::*;

use vortex_lab::dynamics::{
    ea_forward, ea_inverse, ftrl_response, kl_divergence, primal_of_dual, simulate, softmax,
    DualState, Dynamic, Regularizer, StepSchedule,
};
use vortex_lab::games::{triviality_gap, trivial_form, zero_sum_from, Game, Matrix};
use vortex_lab::volume::{det, hull_measure, jacobian_mwu, second_order_coeff};

fn matrix(n: usize, m: usize, bound: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(-bound..bound, m), n)
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4, 2usize..=4)
}

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, len).prop_map(|raw| {
        let s: f64 = raw.iter().sum();
        raw.iter().map(|v| v / s).collect()
    })
}

fn dual(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

proptest! {
    #[test]
    fn triviality_gap_ignores_strategy_value_shifts(
        (a, a_off, b_off) in dims().prop_flat_map(|(n, m)| {
            (matrix(n, m, 0.4),
             prop::collection::vec(-0.3f64..0.3, n),
             prop::collection::vec(-0.3f64..0.3, m))
        })
    ) {
        let shifted: Matrix = a
            .iter()
            .enumerate()
            .map(|(j, row)| row.iter().enumerate().map(|(k, v)| v + a_off[j] + b_off[k]).collect())
            .collect();
        let g0 = triviality_gap(&a).unwrap();
        let g1 = triviality_gap(&shifted).unwrap();
        prop_assert!((g0 - g1).abs() <= 1e-7, "{g0} vs {g1}");
    }

    #[test]
    fn trivial_forms_have_zero_gap_and_coefficient(
        (a_off, b_off) in dims().prop_flat_map(|(n, m)| {
            (prop::collection::vec(-0.5f64..0.5, n), prop::collection::vec(-0.5f64..0.5, m))
        }),
        seed_x in dual(4),
        seed_y in dual(4),
    ) {
        let a = trivial_form(&a_off, &b_off);
        prop_assert!(triviality_gap(&a).unwrap() <= 1e-7);
        let g = zero_sum_from(a).unwrap();
        let x = softmax(&seed_x[..g.n()]);
        let y = softmax(&seed_y[..g.m()]);
        let c = second_order_coeff(&g, &x, &y).unwrap();
        prop_assert!(c.abs() <= 1e-9, "coefficient {c}");
    }

    #[test]
    fn twobytwo_gap_matches_closed_form(a in matrix(2, 2, 1.0)) {
        let gap = triviality_gap(&a).unwrap();
        let closed = (a[0][0] - a[0][1] - a[1][0] + a[1][1]).abs() / 2.0;
        prop_assert!((gap - closed).abs() <= 1e-8, "{gap} vs {closed}");
    }

    #[test]
    fn primal_trajectory_ignores_dual_block_shifts(
        a in matrix(2, 3, 1.0),
        p0 in dual(2),
        q0 in dual(3),
        cp in -1.0f64..1.0,
        cq in -1.0f64..1.0,
    ) {
        let game = Game::Bimatrix(zero_sum_from(a).unwrap());
        let sched = StepSchedule::Constant { eps: 0.1 };
        let r0 = DualState::bimatrix(p0.clone(), q0.clone()).unwrap();
        let r1 = DualState::bimatrix(
            p0.iter().map(|v| v + cp).collect(),
            q0.iter().map(|v| v + cq).collect(),
        )
        .unwrap();
        let t0 = simulate(&game, &r0, &sched, 100, &Dynamic::Mwu, 10).unwrap();
        let t1 = simulate(&game, &r1, &sched, 100, &Dynamic::Mwu, 10).unwrap();
        for ((ta, sa), (tb, sb)) in t0.states.iter().zip(&t1.states) {
            prop_assert_eq!(ta, tb);
            for (xa, xb) in primal_of_dual(sa).iter().zip(primal_of_dual(sb).iter()) {
                for (u, v) in xa.iter().zip(xb) {
                    prop_assert!((u - v).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn entropy_ftrl_reproduces_the_multiplicative_update(
        a in matrix(3, 2, 1.0),
        p0 in dual(3),
        q0 in dual(2),
    ) {
        let game = Game::Bimatrix(zero_sum_from(a).unwrap());
        let sched = StepSchedule::Constant { eps: 0.05 };
        let r0 = DualState::bimatrix(p0, q0).unwrap();
        let mwu = simulate(&game, &r0, &sched, 300, &Dynamic::Mwu, 50).unwrap();
        let ftrl = simulate(
            &game,
            &r0,
            &sched,
            300,
            &Dynamic::Ftrl { regs: vec![Regularizer::Entropy, Regularizer::Entropy] },
            50,
        )
        .unwrap();
        for ((_, sa), (_, sb)) in mwu.states.iter().zip(&ftrl.states) {
            prop_assert!(sa.linf_distance(sb) <= 1e-9);
        }
    }

    #[test]
    fn dual_drift_is_bounded_by_the_step_budget(
        a in matrix(3, 3, 1.0),
        p0 in dual(3),
        q0 in dual(3),
    ) {
        let game = Game::Bimatrix(zero_sum_from(a).unwrap());
        let eps = 0.1;
        let t_max = 200u64;
        let r0 = DualState::bimatrix(p0, q0).unwrap();
        let traj = simulate(&game, &r0, &StepSchedule::Constant { eps }, t_max, &Dynamic::Mwu, 200)
            .unwrap();
        let (_, end) = traj.states.last().unwrap();
        // Payoff entries lie in [-1, 1], so each coordinate moves at most
        // eps per step.
        prop_assert!(end.linf_distance(&r0) <= eps * t_max as f64 + 1e-12);
    }

    #[test]
    fn ftrl_responses_live_on_the_simplex(
        p in dual(4),
        lambda in 0.01f64..0.5,
        eps in 0.01f64..0.2,
    ) {
        for reg in [Regularizer::Entropy, Regularizer::QuadraticLog { lambda }] {
            let x = ftrl_response(&p, &reg, eps).unwrap();
            let sum: f64 = x.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(x.iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn kl_divergence_is_nonnegative(x_seed in dual(3), y_seed in dual(3)) {
        let x = softmax(&x_seed);
        let y = softmax(&y_seed);
        prop_assert!(kl_divergence(&x, &y) >= -1e-12);
        prop_assert!(kl_divergence(&x, &x).abs() <= 1e-12);
    }

    #[test]
    fn zero_sum_coefficient_is_nonnegative(
        (a, xs, ys) in dims().prop_flat_map(|(n, m)| (matrix(n, m, 1.0), dual(n), dual(m))),
    ) {
        let g = zero_sum_from(a).unwrap();
        let c = second_order_coeff(&g, &softmax(&xs), &softmax(&ys)).unwrap();
        prop_assert!(c >= -1e-9, "coefficient {c}");
    }

    #[test]
    fn interior_coefficient_clears_the_gap_floor(
        (a, xw, yw) in dims().prop_flat_map(|(n, m)| (matrix(n, m, 1.0), simplex(n), simplex(m))),
    ) {
        let delta = 0.1;
        let g = zero_sum_from(a.clone()).unwrap();
        // Mix toward uniform so every entry is at least delta.
        let pad = |w: &[f64]| -> Vec<f64> {
            let len = w.len() as f64;
            w.iter().map(|v| delta + (1.0 - delta * len) * v).collect()
        };
        let x = pad(&xw);
        let y = pad(&yw);
        prop_assert!(x.iter().chain(&y).all(|v| *v >= delta));
        let c_a = triviality_gap(&a).unwrap();
        let c = second_order_coeff(&g, &x, &y).unwrap();
        prop_assert!(
            c >= delta * delta * c_a * c_a / 4.0 - 1e-9,
            "C = {c}, floor = {}",
            delta * delta * c_a * c_a / 4.0
        );
    }

    #[test]
    fn step_multipliers_stay_positive(
        (a, p, q) in dims().prop_flat_map(|(n, m)| (matrix(n, m, 1.0), dual(n), dual(m))),
        eps in 0.001f64..0.2,
    ) {
        let g = zero_sum_from(a).unwrap();
        let r = DualState::bimatrix(p, q).unwrap();
        prop_assert!(det(&jacobian_mwu(&g, &r, eps)) > 0.0);
    }

    #[test]
    fn step_determinant_is_even_in_the_step_size(
        (a, p, q) in dims().prop_flat_map(|(n, m)| (matrix(n, m, 1.0), dual(n), dual(m))),
        eps in 0.001f64..0.2,
    ) {
        let g = zero_sum_from(a).unwrap();
        let r = DualState::bimatrix(p, q).unwrap();
        let plus = det(&jacobian_mwu(&g, &r, eps));
        let minus = det(&jacobian_mwu(&g, &r, -eps));
        prop_assert!((plus - minus).abs() <= 1e-12, "{plus} vs {minus}");
    }

    #[test]
    fn reduced_coordinates_round_trip(x in simplex(4)) {
        let f = ea_forward(&x).unwrap();
        let back = ea_inverse(&f).unwrap();
        for (u, v) in x.iter().zip(&back) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn hull_area_is_permutation_invariant(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..20),
        rot in 0usize..20,
    ) {
        let base = hull_measure(&pts);
        prop_assert!(base >= 0.0);
        let k = rot % pts.len();
        let mut rotated = pts[k..].to_vec();
        rotated.extend_from_slice(&pts[..k]);
        let turned = hull_measure(&rotated);
        prop_assert!((base - turned).abs() <= 1e-12);
        // An extra interior point (the centroid) never changes the hull.
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let mut extended = pts.clone();
        extended.push((cx, cy));
        prop_assert!((hull_measure(&extended) - base).abs() <= 1e-9);
    }
}

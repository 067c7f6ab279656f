mod common;

use common::{close, seeded_system, Seeded};
use linstab::corpus;
use linstab::*;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn param_distance_is_a_metric(
        a in prop::collection::vec(-3.0f64..3.0, 9),
        b in prop::collection::vec(-3.0f64..3.0, 9),
        c in prop::collection::vec(-3.0f64..3.0, 9),
    ) {
        let mk = |v: &[f64]| LinearSystem::new(
            vec![v[0..2].to_vec(), v[3..5].to_vec(), v[6..8].to_vec()],
            vec![v[2], v[5], v[8]],
            Norm::L2,
        ).unwrap();
        let (p, q, r) = (mk(&a), mk(&b), mk(&c));
        for norm in [Norm::L1, Norm::L2, Norm::Linf] {
            let pq = param_distance(&p, &q, norm).unwrap();
            prop_assert!((pq - param_distance(&q, &p, norm).unwrap()).abs() <= 1e-12);
            let pr = param_distance(&p, &r, norm).unwrap();
            let rq = param_distance(&r, &q, norm).unwrap();
            prop_assert!(pq <= pr + rq + 1e-12);
            prop_assert_eq!(param_distance(&p, &p, norm).unwrap(), 0.0);
        }
    }

    #[test]
    fn dual_norm_matches_unit_ball_maximum(u in prop::collection::vec(-5.0f64..5.0, 2..=3)) {
        let n = u.len();
        // L1 and Linf balls: the maximum sits at a vertex of the ball.
        let l1_ball = (0..n).flat_map(|i| [1.0, -1.0].map(|s| {
            let mut e = vec![0.0; n];
            e[i] = s;
            e
        }));
        let best_l1 = l1_ball.map(|x| x.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>()).fold(f64::MIN, f64::max);
        prop_assert!((best_l1 - dual_norm(&u, Norm::L1)).abs() <= 1e-12);
        let best_linf: f64 = (0..1usize << n).map(|mask| {
            (0..n).map(|i| if mask >> i & 1 == 1 { u[i] } else { -u[i] }).sum::<f64>()
        }).fold(f64::MIN, f64::max);
        prop_assert!((best_linf - dual_norm(&u, Norm::Linf)).abs() <= 1e-12);
        // L2: the unit vector along u attains it, and no sphere point exceeds it.
        let len = dual_norm(&u, Norm::L2);
        let along: f64 = u.iter().map(|v| v * v / len.max(f64::MIN_POSITIVE)).sum();
        prop_assert!((along - len).abs() <= 1e-9 * (1.0 + len));
        if n == 2 {
            let sup = (0..20_000).map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 20_000.0;
                u[0] * th.cos() + u[1] * th.sin()
            }).fold(f64::MIN, f64::max);
            prop_assert!(sup <= len + 1e-12 && sup >= len * (1.0 - 1e-7));
        }
    }

    #[test]
    fn residual_identity(s in seeded_system(2..=3, 3..=5), shift in prop::collection::vec(-2.0f64..2.0, 3)) {
        let x: Vec<f64> = s.x0.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let lhs = inverse_image_distance(&s.sys, &x) * (vector_norm(&x, Norm::L2) + 1.0);
        prop_assert!((lhs - rhs_residual(&s.sys, &x)).abs() <= 1e-14 * (1.0 + lhs));
        prop_assert_eq!(rhs_residual(&s.sys, &s.x0), 0.0);
    }

    #[test]
    fn clm_identities(s in seeded_system(2..=3, 3..=6)) {
        let Seeded { sys, x0 } = s;
        let rhs = clm_rhs(&sys, &x0, &tol()).unwrap();
        let full = clm_full(&sys, &x0, &tol()).unwrap();
        prop_assert_eq!(full.value.value(), (vector_norm(&x0, Norm::L2) + 1.0) * rhs.value.value());

        let grads: Vec<&[f64]> = rhs.active.indices().iter().map(|&t| sys.row(t)).collect();
        let end = end_set_distance(&grads, Norm::L2, &tol()).unwrap();
        if end.distance.is_infinite() {
            prop_assert_eq!(rhs.value.value(), 0.0);
        } else {
            prop_assert!(close(rhs.value.value(), 1.0 / end.distance.value(), 1e-9));
        }
        for w in &rhs.witnesses {
            prop_assert!(close(1.0 / w.hull_distance, rhs.value.value(), 1e-9));
        }
    }

    #[test]
    fn scaling_law(s in seeded_system(2..=3, 3..=5), pick in 0usize..3) {
        let lambda = [0.5, 2.0, 10.0][pick];
        let scaled = s.sys.scaled(lambda);
        let a = clm_rhs(&s.sys, &s.x0, &tol()).unwrap();
        let b = clm_rhs(&scaled, &s.x0, &tol()).unwrap();
        prop_assert_eq!(&a.active, &b.active);
        prop_assert!(close(b.value.value(), a.value.value() / lambda, 1e-9));
        let a = lipusc_rhs(&s.sys, &tol()).unwrap();
        let b = lipusc_rhs(&scaled, &tol()).unwrap();
        prop_assert!(close(b.value.value(), a.value.value() / lambda, 1e-9));
        let a = lipusc_full(&s.sys, &tol()).unwrap();
        let b = lipusc_full(&scaled, &tol()).unwrap();
        prop_assert_eq!(a.case_tag, b.case_tag);
        if a.value.is_infinite() {
            prop_assert!(b.value.is_infinite());
        } else {
            prop_assert!(close(b.value.value(), a.value.value() / lambda, 1e-9));
        }
    }

    #[test]
    fn lipusc_rhs_is_finite_and_dominates(s in seeded_system(2..=3, 3..=6)) {
        let r = lipusc_rhs(&s.sys, &tol()).unwrap();
        prop_assert!(!r.value.is_infinite());
        let c = clm_rhs(&s.sys, &s.x0, &tol()).unwrap();
        prop_assert!(c.value.value() <= r.value.value() * (1.0 + 1e-9) + 1e-9);
        for w in &r.witnesses {
            let again = clm_rhs(&s.sys, &w.point, &tol()).unwrap();
            prop_assert!(close(again.value.value(), r.value.value(), 1e-9));
        }
    }

    #[test]
    fn d_family_witnesses_are_valid(s in seeded_system(2..=3, 3..=6)) {
        let fam = d_family(&s.sys, &s.x0, &tol()).unwrap();
        prop_assert!(fam.sets[0].indices.is_empty());
        for member in &fam.sets {
            for &t in fam.active.indices() {
                let v: f64 = s.sys.row(t).iter().zip(&member.direction).map(|(a, d)| a * d).sum();
                if member.indices.contains(&t) {
                    prop_assert!((v - 1.0).abs() <= 1e-7);
                } else {
                    prop_assert!(v < 1.0);
                }
            }
        }
        // Every rejected subset admits no strict margin.
        let active = fam.active.indices();
        let candidates: Vec<usize> = active.iter().copied().filter(|&t| dual_norm(s.sys.row(t), Norm::L2) > 1e-9).collect();
        for mask in 0u32..(1 << candidates.len()) {
            let subset: Vec<usize> = (0..candidates.len()).filter(|i| mask >> i & 1 == 1).map(|i| candidates[i]).collect();
            if fam.contains(&subset) {
                continue;
            }
            let n = s.sys.n();
            let mut obj = vec![0.0; n + 1];
            obj[n] = -1.0;
            let mut p = LpProblem::new(obj).bound(n, 0.0, 1.0);
            for &t in active {
                let mut row = s.sys.row(t).to_vec();
                if subset.contains(&t) {
                    row.push(0.0);
                    p = p.equal(row, 1.0);
                } else {
                    row.push(1.0);
                    p = p.leq(row, 1.0);
                }
            }
            let r = lp_solve(&p, &tol()).unwrap();
            if r.is_optimal() {
                prop_assert!(-r.objective_value.unwrap() < tol().strict_tol);
            }
        }
    }

    #[test]
    fn vertices_are_extreme(s in seeded_system(2..=3, 3..=6)) {
        let v = vertices(&s.sys, &tol()).unwrap();
        for (i, p) in v.points.iter().enumerate() {
            prop_assert!(s.sys.residual(p) <= 1e-7);
            let others: Vec<&Vec<f64>> = v.points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q).collect();
            if others.is_empty() {
                continue;
            }
            // p in conv(others)?
            let k = others.len();
            let mut lp = LpProblem::feasibility(k);
            for c in 0..s.sys.n() {
                lp = lp.equal(others.iter().map(|q| q[c]).collect(), p[c]);
            }
            lp = lp.equal(vec![1.0; k], 1.0);
            for j in 0..k {
                lp = lp.nonneg(j);
            }
            let r = lp_solve(&lp, &Tolerances { feas_tol: 1e-7, ..tol() }).unwrap();
            prop_assert_eq!(r.status, LpStatus::Infeasible);
        }
        if is_bounded(&s.sys, &tol()).unwrap() {
            let e = restricted_vertices(&s.sys, &tol()).unwrap();
            prop_assert_eq!(e.points.len(), v.points.len());
            for (a, b) in e.points.iter().zip(&v.points) {
                prop_assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-8));
            }
        }
    }

    #[test]
    fn projection_distance_vanishes_exactly_on_f(s in seeded_system(2..=3, 3..=5), shift in prop::collection::vec(-2.0f64..2.0, 3)) {
        let x: Vec<f64> = s.x0.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let d = point_to_polyhedron_distance(&s.sys, &x, &tol()).unwrap();
        let feasible = s.sys.residual(&x) <= tol().feas_tol;
        prop_assert_eq!(d == 0.0, feasible);
        // Hoffman-type bound with the rhs modulus.
        let l = lipusc_rhs(&s.sys, &tol()).unwrap().value.value();
        prop_assert!(d <= l * s.sys.residual(&x) * (1.0 + 1e-7) + 1e-9);
        let (z, dz) = nearest_point(&s.sys, &x, &tol()).unwrap();
        prop_assert!(s.sys.residual(&z) <= 1e-7);
        prop_assert!((dz - d).abs() <= 1e-12);
    }

    #[test]
    fn end_set_bounds_and_homogeneity(
        pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 1..=5),
        lambda in 0.1f64..10.0,
    ) {
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let hull = min_norm_point(&refs, Norm::L2, &tol()).unwrap();
        prop_assume!(hull.distance.value() > 1e-3);
        let end = end_set_distance(&refs, Norm::L2, &tol()).unwrap();
        prop_assert!(end.distance.value() + 1e-12 >= hull.distance.value());

        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * lambda).collect()).collect();
        let srefs: Vec<&[f64]> = scaled.iter().map(|p| p.as_slice()).collect();
        let shull = min_norm_point(&srefs, Norm::L2, &tol()).unwrap();
        prop_assert!(close(shull.distance.value(), lambda * hull.distance.value(), 1e-9));
        let send = end_set_distance(&srefs, Norm::L2, &tol()).unwrap();
        prop_assert!(close(send.distance.value(), lambda * end.distance.value(), 1e-9));
    }

    #[test]
    fn wolfe_agrees_with_hull_lp_norms(pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 1..=5)) {
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let h = min_norm_point(&refs, Norm::L2, &tol()).unwrap();
        let w = h.weights.clone().unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-9 && w.iter().all(|v| *v >= 0.0));
        // No hull vertex beats the optimality condition by more than conv_tol scale.
        let p = h.witness.clone().unwrap();
        let pp: f64 = p.iter().map(|v| v * v).sum();
        for q in &pts {
            let qp: f64 = q.iter().zip(&p).map(|(a, b)| a * b).sum();
            prop_assert!(qp >= pp - 1e-9);
        }
    }
}

#[test]
fn dominance_on_bounded_corpus() {
    let t = tol();
    let mut rng_state = 12345u64;
    let mut next = move || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        (rng_state >> 11) as f64 / (1u64 << 53) as f64
    };
    for (name, sys) in corpus::all() {
        if !is_bounded(&sys, &t).unwrap() {
            continue;
        }
        let bound = lipusc_full(&sys, &t).unwrap().value.value();
        let mut accepted = 0;
        while accepted < 1000 {
            let x: Vec<f64> = (0..sys.n()).map(|_| -1.5 + 3.0 * next()).collect();
            if sys.residual(&x) > t.feas_tol {
                continue;
            }
            accepted += 1;
            let c = clm_full(&sys, &x, &t).unwrap().value.value();
            assert!(c <= bound + 1e-9, "{name} at {x:?}: {c} > {bound}");
        }
    }
}

#[test]
fn active_sets_grow_along_faces() {
    // Sets accepted in the relative interior of an edge stay accepted at its endpoints.
    let sys = corpus::example1_limit();
    let t = tol();
    let edges = [
        (vec![0.5, 0.0], [vec![0.0, 0.0], vec![1.0, 0.0]]),
        (vec![1.0, -0.5], [vec![1.0, 0.0], vec![1.0, -1.0]]),
        (vec![0.5, -0.5], [vec![0.0, 0.0], vec![1.0, -1.0]]),
    ];
    for (mid, ends) in edges {
        let inner = d_family(&sys, &mid, &t).unwrap();
        for end in ends {
            let outer = d_family(&sys, &end, &t).unwrap();
            assert!(inner
                .active
                .indices()
                .iter()
                .all(|i| outer.active.contains(*i)));
            for member in &inner.sets {
                assert!(
                    outer.contains(&member.indices),
                    "{:?} lost at {end:?}",
                    member.indices
                );
            }
        }
    }
}

#[test]
fn lp_solves_are_repeatable() {
    let sys = corpus::example1_r(3.0);
    let mut p = LpProblem::new(vec![0.3, -1.0]);
    for (r, b) in sys.rows().iter().zip(sys.rhs()) {
        p = p.leq(r.clone(), *b);
    }
    let first = lp_solve(&p, &tol()).unwrap();
    for _ in 0..5 {
        assert_eq!(lp_solve(&p, &tol()).unwrap(), first);
    }
}

//! The sampling oracle against the subset formula under every norm.

use linstab::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(rng: &mut ChaCha8Rng, t: &Tolerances) -> Vec<Vec<f64>> {
    loop {
        let n = rng.random_range(2..=3);
        let k = rng.random_range(1..=5);
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect())
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        if min_norm_point(&refs, Norm::L2, t).unwrap().distance.value() >= 0.05 {
            return pts;
        }
    }
}

#[test]
fn oracle_approaches_from_above() {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..30 {
        let pts = random_set(&mut rng, &t);
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let norm = [Norm::L1, Norm::L2, Norm::Linf][i % 3];
        let exact = end_set_distance(&refs, norm, &t).unwrap().distance.value();
        let oracle = end_set_distance_oracle(&refs, norm, 50_000, i as u64, &t).unwrap();
        assert!(
            oracle >= exact * (1.0 - 1e-9),
            "{pts:?} {norm}: {oracle} < {exact}"
        );
        // Polyhedral dual norms grow linearly off the minimizer, so sample
        // spacing shows up at first order.
        let rtol = if norm == Norm::L2 { 0.01 } else { 0.06 };
        assert!(
            oracle <= exact * (1.0 + rtol),
            "{pts:?} {norm}: {oracle} vs {exact}"
        );
    }
}

#[test]
fn grazing_edge_minimizer() {
    // The nearest end-set point lies on an edge shared by a facet facing the
    // origin and one facing away.
    let pts = [
        [1.0110196524492139, -0.5862469783243167, -1.5169576695547127],
        [-0.040652054674654714, -1.60623310940748, 0.9454079568079541],
        [-0.2798917585140428, 0.19904964620922616, 1.1558853206463349],
        [1.0964400728746968, -0.9152762699400077, -1.0923179530301663],
        [0.9498159365804124, -1.771049089105368, -0.8556340661437742],
    ];
    let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
    let t = Tolerances::default();
    let exact = end_set_distance(&refs, Norm::L2, &t).unwrap();
    assert_eq!(exact.subset, Some(vec![0, 2]));
    let oracle = end_set_distance_oracle(&refs, Norm::L2, 100_000, 10, &t).unwrap();
    assert!(
        oracle <= exact.distance.value() * 1.01,
        "{oracle} vs {}",
        exact.distance
    );
}

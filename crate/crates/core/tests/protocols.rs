use nalgebra::DMatrix;

use cvsim::criteria::{analyze_cut, Bipartition, TripartiteClass};
use cvsim::protocols::*;
use cvsim::GaussianState;

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Four-mode matrix in `(x1, p1, ..., x4, p4)` order from an x-block and a
/// p-block.
fn interleave(x: [[f64; 4]; 4], p: [[f64; 4]; 4]) -> DMatrix<f64> {
    DMatrix::from_fn(8, 8, |i, j| match (i % 2, j % 2) {
        (0, 0) => x[i / 2][j / 2],
        (1, 1) => p[i / 2][j / 2],
        _ => 0.0,
    })
}

#[test]
fn smolin_state_has_the_closed_form_block_pattern() {
    for &(r, k, v) in &[(0.5, 1.0, 1.0), (0.9, 0.6, 2.2)] {
        let s = smolin_generate(&SmolinParams::new(r, k, v, 1.0).unwrap()).unwrap();
        let (ch, sh, q) = ((2.0 * r).cosh(), (2.0 * r).sinh(), k * k * v);
        let (a, c, e) = (q + ch, q - sh, -q);
        let x = [[a, c, e, e], [c, a, e, e], [e, e, a, c], [e, e, c, a]];
        let p = [
            [a, -c, e, -e],
            [-c, a, -e, e],
            [e, -e, a, -c],
            [-e, e, -c, a],
        ];
        let want = interleave(x, p);
        assert!(max_diff(s.cm(), &want) < 1e-12, "{}", s.cm());
    }
}

#[test]
fn smolin_is_pure_pairs_at_zero_coupling() {
    let p = SmolinParams::new(0.7, 0.0, 1.0, 1.0).unwrap();
    let s = smolin_generate(&p).unwrap();
    let pairs =
        GaussianState::two_mode_squeezed(0.7).direct_sum(&GaussianState::two_mode_squeezed(0.7));
    assert!(max_diff(s.cm(), pairs.cm()) < 1e-14);
}

#[test]
fn interface_built_epr_pair_matches_two_mode_squeezing() {
    for r in [0.2, 0.5, 1.1] {
        let s = epr_via_interface(r).unwrap();
        assert!(max_diff(s.cm(), GaussianState::two_mode_squeezed(r).cm()) < 1e-12);
    }
}

#[test]
fn trajectory_shift_follows_the_beam_outcomes() {
    let p = SmolinParams::new(0.4, 0.8, 1.3, 1.0).unwrap();
    let t = smolin_trajectory(&p, 7).unwrap();
    let again = smolin_trajectory(&p, 7).unwrap();
    assert_eq!(t.state.disp(), again.state.disp());
    let e = to_epr_basis(&t.state).unwrap();
    let s2k = 2f64.sqrt() * p.kappa;
    let [p1, p2] = t.p_bar;
    let want = [-s2k * p1, 0.0, 0.0, s2k * p2, s2k * p1, 0.0, 0.0, -s2k * p2];
    for (g, w) in e.disp().iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{} vs {w}", g);
    }
}

#[test]
fn erasure_displacement() {
    let (n1, n2, k) = (1.5, 2.5, 0.8);
    let (x1, x2) = (0.6, -1.3);
    let p = ThermalParams::new(vec![n1, n2]).unwrap();
    let first = bipartite_thermal(&p, k, Steps::One, &[x1]).unwrap().state;
    let erased = erase_entanglement(&first, n1, n2, k, x2).unwrap();
    let d = 1.0 + k * k * (n1 + n2);
    let want = [
        -x2 * k / (2.0 * k * k + n2),
        k * n1 * x1 / d,
        -x2 * k / (2.0 * k * k + n1),
        k * n2 * x1 / d,
    ];
    for (g, w) in erased.disp().iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{} vs {w}", g);
    }
}

#[test]
fn erasure_beam_variances() {
    let b = erasure_beam(1.5, 2.5, 0.8).unwrap();
    assert!(b.var_x * b.var_p >= 1.0 - 1e-12);
}

#[test]
fn two_step_variances() {
    for &(n1, n2, k) in &[(1.0, 1.0, 1.0), (2.0, 1.5, 0.6)] {
        let p = ThermalParams::new(vec![n1, n2]).unwrap();
        let st = bipartite_thermal(&p, k, Steps::Two, &[]).unwrap().state;
        let s = n1 + n2;
        let want = s / (2.0 * s * k * k + 2.0);
        let var_u = st
            .variance_of(&nalgebra::DVector::from_vec(vec![1.0, 0.0, -1.0, 0.0]))
            .unwrap();
        let var_v = st
            .variance_of(&nalgebra::DVector::from_vec(vec![0.0, 1.0, 0.0, 1.0]))
            .unwrap();
        assert!((var_u - want).abs() < 1e-12);
        assert!((var_v - want).abs() < 1e-12);
    }
}

#[test]
fn unlocked_pair_loses_ppt() {
    let p = SmolinParams::tied(1.0, 1.0).unwrap();
    let s = smolin_generate(&p).unwrap();
    assert!(
        analyze_cut(&s, &Bipartition::parse("14|23", 4).unwrap())
            .unwrap()
            .ppt
    );
    let u = smolin_unlock(&s, &p, 0.2, -0.4).unwrap();
    assert!(!u.cut.ppt);
    assert!(u.cut.log_negativity > 0.0);
}

#[test]
fn cluster_class_is_monotone_in_temperature() {
    for shape in [ClusterShape::Linear, ClusterShape::Triangular] {
        let temps: Vec<f64> = (0..60).map(|i| 0.05 * i as f64).collect();
        let rows = cluster_sweep(shape, &[0.5], &temps, 1.0).unwrap();
        let ranks: Vec<f64> = rows.iter().map(|r| r.class.rank()).collect();
        assert!(
            ranks.windows(2).all(|w| w[0] <= w[1]),
            "{shape:?}: {ranks:?}"
        );
        assert!(rows
            .iter()
            .all(|r| r.class != TripartiteClass::OnePpt || shape == ClusterShape::Linear));
    }
}

#[test]
fn cluster_boundaries_at_weak_coupling_are_ordered() {
    let b = cluster_boundaries(ClusterShape::Triangular, 0.5, 1.0, 4.0, 1e-4).unwrap();
    let (ta, tb, tc) = (b.t_a.unwrap(), b.t_b.unwrap(), b.t_c.unwrap());
    assert!(ta <= tb && tb < tc, "{b:?}");
}

#[test]
fn sweep_rows_come_back_in_grid_order() {
    let ks = [0.3, 0.6];
    let ts = [0.1, 0.5, 1.0];
    let rows = cluster_sweep(ClusterShape::Linear, &ks, &ts, 1.0).unwrap();
    let order: Vec<(f64, f64)> = rows.iter().map(|r| (r.kappa, r.temperature)).collect();
    let want: Vec<(f64, f64)> = ks
        .iter()
        .flat_map(|&k| ts.iter().map(move |&t| (k, t)))
        .collect();
    assert_eq!(order, want);
}

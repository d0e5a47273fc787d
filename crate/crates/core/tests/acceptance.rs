//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Reference values come from closed forms written out here, independent of
//! the library code paths they check.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use cvsim::criteria::{analyze_cut, Bipartition, TripartiteClass};
use cvsim::interface::{interaction_symplectic, run_beam, BeamSpec, Disposal, Schedule};
use cvsim::protocols::{
    bipartite_thermal, cluster_point, epr_basis_transform, erase_entanglement, smolin_generate,
    smolin_trajectory, smolin_unlock, to_epr_basis, unlock_sweep, ClusterShape, SmolinParams,
    Steps, ThermalParams,
};
use cvsim::{GaussianState, MeasurementRecord, SymplecticForm, SymplecticTransform};

type Outcome = Result<String, String>;

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

// ---------------------------------------------------------------------------
// printed matrices

#[rustfmt::skip]
fn printed_after_first_beam(n1: f64, n2: f64, k: f64) -> DMatrix<f64> {
    let k2 = k * k;
    DMatrix::from_row_slice(6, 6, &[
        n1 + k2, 0.0, k2, 0.0, 0.0, k,
        0.0, n1, 0.0, 0.0, n1 * k, 0.0,
        k2, 0.0, n2 + k2, 0.0, 0.0, k,
        0.0, 0.0, 0.0, n2, n2 * k, 0.0,
        0.0, n1 * k, 0.0, n2 * k, 1.0 + n1 * k2 + n2 * k2, 0.0,
        k, 0.0, k, 0.0, 0.0, 1.0,
    ])
}

#[rustfmt::skip]
fn printed_conditional(n1: f64, n2: f64, k: f64) -> DMatrix<f64> {
    let k2 = k * k;
    let d = (n1 + n2) * k2 + 1.0;
    DMatrix::from_row_slice(4, 4, &[
        n1 + k2, 0.0, k2, 0.0,
        0.0, (n1 * n2 * k2 + n1) / d, 0.0, -n1 * n2 * k2 / d,
        k2, 0.0, n2 + k2, 0.0,
        0.0, -n1 * n2 * k2 / d, 0.0, (n1 * n2 * k2 + n2) / d,
    ])
}

fn printed_erased(n1: f64, n2: f64, k: f64) -> DMatrix<f64> {
    let k2 = k * k;
    let d = k2 * (n1 + n2) + 1.0;
    let num = k2 * n2 + n1 * (k2 + n2);
    DMatrix::from_diagonal(&DVector::from_vec(vec![
        num / (2.0 * k2 + n2),
        n1 * (2.0 * k2 * n2 + 1.0) / d,
        num / (2.0 * k2 + n1),
        n2 * (2.0 * k2 * n1 + 1.0) / d,
    ]))
}

fn printed_smolin_epr_basis(r: f64, f: f64) -> DMatrix<f64> {
    let (sq, an) = ((-2.0 * r).exp(), (2.0 * r).exp());
    let mut m = DMatrix::from_diagonal(&DVector::from_vec(vec![
        sq + f,
        an,
        an,
        sq + f,
        sq + f,
        an,
        an,
        sq + f,
    ]));
    m[(0, 4)] = -f;
    m[(4, 0)] = -f;
    m[(3, 7)] = -f;
    m[(7, 3)] = -f;
    m
}

fn printed_delta(r: f64, k: f64, f: f64, vx: f64) -> f64 {
    let (e2, k2) = ((2.0 * r).exp(), k * k);
    f * (2.0 * k2 + e2 * vx) / (e2 * (2.0 * k2 * f + vx) + 2.0 * k2)
}

fn printed_gain(r: f64, k: f64, f: f64, vx: f64) -> f64 {
    f / (vx + 2.0 * k * k * ((-2.0 * r).exp() + f))
}

fn thermal_with_vacuum_light(n1: f64, n2: f64) -> GaussianState {
    GaussianState::thermal(&[n1, n2, 1.0]).unwrap()
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &(n1, n2, k) in &[(1.0, 1.0, 1.0), (1.5, 2.0, 0.7), (3.0, 1.0, 2.0)] {
        let g = &Schedule::OneStep.geometries(k).unwrap()[0];
        let s = interaction_symplectic(2, g).unwrap();
        let out = thermal_with_vacuum_light(n1, n2).apply(&s).unwrap();
        worst = worst.max(max_diff(out.cm(), &printed_after_first_beam(n1, n2, k)));
    }
    let t = start.elapsed();
    if worst <= 1e-12 && t < Duration::from_secs(1) {
        Ok(format!("max entry error {worst:.1e}, {t:.2?}"))
    } else {
        Err(format!("max entry error {worst:.1e}, {t:.2?}"))
    }
}

fn criterion_2() -> Outcome {
    let mut cm_err = 0.0f64;
    let mut d_err = 0.0f64;
    let mut identical = true;
    for &(n1, n2, k) in &[(1.0, 1.0, 1.0), (1.5, 2.0, 0.7), (3.0, 1.0, 2.0)] {
        let gamma = printed_after_first_beam(n1, n2, k);
        let st = GaussianState::new(gamma.clone(), DVector::zeros(6), None).unwrap();
        for &x in &[0.0, 0.83, -2.4] {
            let post = st
                .condition_on_homodyne(&MeasurementRecord::x(2, x))
                .unwrap();
            cm_err = cm_err.max(max_diff(post.cm(), &printed_conditional(n1, n2, k)));
            // C (X γ_L X)^-1 (x, 0) with C the atom rows of the x_L column
            let var = gamma[(4, 4)];
            let want = DVector::from_fn(4, |i, _| gamma[(i, 4)] * x / var);
            d_err = d_err.max((post.disp() - want).abs().max());
        }
        let a = st
            .condition_on_homodyne(&MeasurementRecord::x(2, 0.5))
            .unwrap();
        let b = st
            .condition_on_homodyne(&MeasurementRecord::x(2, -7.25))
            .unwrap();
        identical &= a.cm().as_slice() == b.cm().as_slice();
    }
    let msg = format!(
        "cm error {cm_err:.1e}, displacement error {d_err:.1e}, outcome-independent {identical}"
    );
    if cm_err <= 1e-12 && d_err <= 1e-12 && identical {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `(s, κ²)` grid shared by criteria 3 and 4; `n₁ = n₂ = s/2`.
fn duan_grid() -> (Vec<f64>, Vec<f64>) {
    (linspace(2.05, 6.0, 50), linspace(0.02, 3.0, 50))
}

fn detected(s: f64, k2: f64, steps: Steps) -> (bool, bool) {
    let p = ThermalParams::new(vec![0.5 * s, 0.5 * s]).unwrap();
    let r = bipartite_thermal(&p, k2.sqrt(), steps, &[]).unwrap();
    (r.verdict.variance_margin().unwrap() < 0.0, !r.verdict.ppt)
}

/// First index along the κ² axis where `pred` holds, or the axis length.
fn first_true(k2s: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    k2s.iter().position(|&k2| pred(k2)).unwrap_or(k2s.len())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (ss, k2s) = duan_grid();
    let mut worst_one = 0usize;
    let mut worst_two = 0usize;
    let mut violations_above_four = 0usize;
    for &s in &ss {
        let one: Vec<bool> = k2s
            .iter()
            .map(|&k2| detected(s, k2, Steps::One).0)
            .collect();
        let two: Vec<bool> = k2s
            .iter()
            .map(|&k2| detected(s, k2, Steps::Two).0)
            .collect();
        if s > 4.0 {
            violations_above_four += one.iter().filter(|&&v| v).count();
        }
        let got_one = one.iter().position(|&v| v).unwrap_or(k2s.len());
        let want_one = first_true(&k2s, |k2| s < 4.0 && k2 > 2.0 * (s - 2.0) / ((4.0 - s) * s));
        let got_two = two.iter().position(|&v| v).unwrap_or(k2s.len());
        let want_two = first_true(&k2s, |k2| k2 > (s - 2.0) / (2.0 * s));
        worst_one = worst_one.max(got_one.abs_diff(want_one));
        worst_two = worst_two.max(got_two.abs_diff(want_two));
    }
    let t = start.elapsed();
    let msg = format!(
        "one-step boundary off by <= {worst_one} cells, two-step by <= {worst_two}, \
         violations with n1+n2>4: {violations_above_four}, {t:.2?}"
    );
    if worst_one <= 1 && worst_two <= 1 && violations_above_four == 0 && t < Duration::from_secs(10)
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let (ss, k2s) = duan_grid();
    let mut containment_broken = 0usize;
    let mut gap = [0usize; 2];
    for (si, steps) in [Steps::One, Steps::Two].into_iter().enumerate() {
        for &s in &ss {
            for &k2 in &k2s {
                let (duan_hit, npt) = detected(s, k2, steps);
                if duan_hit && !npt {
                    containment_broken += 1;
                }
                if npt && !duan_hit {
                    gap[si] += 1;
                }
            }
        }
    }
    let msg = format!(
        "Duan-detected but PPT: {containment_broken}; NPT-undetected points: {} (one step), {} (two step)",
        gap[0], gap[1]
    );
    // the gap only has to exist somewhere on the grid; the symmetric
    // two-step state is detected exactly when it is NPT
    if containment_broken == 0 && gap[0] + gap[1] > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let ns = linspace(1.0, 4.0, 10);
    let ks = linspace(0.2, 2.0, 5);
    let (mut cm_err, mut not_ppt, mut wrong_restore) = (0.0f64, 0usize, 0usize);
    for &n1 in &ns {
        for &n2 in &ns {
            for &k in &ks {
                let p = ThermalParams::new(vec![n1, n2]).unwrap();
                let entangled = bipartite_thermal(&p, k, Steps::One, &[0.4]).unwrap().state;
                let erased = erase_entanglement(&entangled, n1, n2, k, -0.3).unwrap();
                cm_err = cm_err.max(max_diff(erased.cm(), &printed_erased(n1, n2, k)));
                if !analyze_cut(&erased, &Bipartition::new(&[0], 2).unwrap())
                    .unwrap()
                    .ppt
                {
                    not_ppt += 1;
                }
                let initial = GaussianState::thermal(&[n1, n2]).unwrap();
                let restored = max_diff(erased.cm(), initial.cm()) <= 1e-9;
                if restored != (n1 == n2) {
                    wrong_restore += 1;
                }
            }
        }
    }
    let msg = format!("cm error {cm_err:.1e}, NPT outputs {not_ppt}, restore mismatches {wrong_restore} over 500 points");
    if cm_err <= 1e-12 && not_ppt == 0 && wrong_restore == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// --- cluster states -------------------------------------------------------

#[derive(Debug, Clone)]
struct Scan {
    temps: Vec<f64>,
    classes: Vec<TripartiteClass>,
    patterns: Vec<[bool; 3]>,
}

fn scan(shape: ClusterShape, kappa: f64, t_max: f64, n: usize) -> Scan {
    let temps = linspace(1e-3, t_max, n);
    let reports: Vec<_> = temps
        .iter()
        .map(|&t| cluster_point(shape, kappa, t, 1.0).unwrap())
        .collect();
    Scan {
        classes: reports.iter().map(|r| r.class).collect(),
        patterns: reports.iter().map(|r| r.pattern).collect(),
        temps,
    }
}

/// First temperature where `pred` holds on the scan, refined by bisection.
fn boundary(
    shape: ClusterShape,
    kappa: f64,
    sc: &Scan,
    pred: impl Fn(TripartiteClass) -> bool,
) -> Option<f64> {
    let i = sc.classes.iter().position(|&c| pred(c))?;
    if i == 0 {
        return Some(sc.temps[0]);
    }
    let (mut a, mut b) = (sc.temps[i - 1], sc.temps[i]);
    while b - a > 1e-6 {
        let m = 0.5 * (a + b);
        if pred(cluster_point(shape, kappa, m, 1.0).unwrap().class) {
            b = m;
        } else {
            a = m;
        }
    }
    Some(0.5 * (a + b))
}

fn boundaries(shape: ClusterShape, kappa: f64, t_max: f64, n: usize) -> (Scan, [Option<f64>; 3]) {
    let sc = scan(shape, kappa, t_max, n);
    let rank = |c: TripartiteClass| c.rank();
    let b = [
        boundary(shape, kappa, &sc, |c| rank(c) > 1.0),
        boundary(shape, kappa, &sc, |c| rank(c) >= 4.0),
        boundary(shape, kappa, &sc, |c| rank(c) >= 5.0),
    ];
    (sc, b)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("none".into(), |t| format!("{t:.4}"))
}

fn describe(shape: ClusterShape, kappa: f64, sc: &Scan, b: &[Option<f64>; 3]) -> String {
    let mut seen: Vec<String> = Vec::new();
    for (c, p) in sc.classes.iter().zip(&sc.patterns) {
        let tag = format!(
            "{c:?}{}",
            p.iter()
                .map(|&x| if x { 'P' } else { 'N' })
                .collect::<String>()
        );
        if seen.last() != Some(&tag) {
            seen.push(tag);
        }
    }
    format!(
        "{shape:?} kappa={kappa}: T_a={} T_b={} T_c={}; sequence {}",
        fmt_opt(b[0]),
        fmt_opt(b[1]),
        fmt_opt(b[2]),
        seen.join(" -> ")
    )
}

fn criterion_6(info: &mut Vec<String>) -> Outcome {
    let start = Instant::now();
    let t_max = 20.0;
    let (lin, lb) = boundaries(ClusterShape::Linear, 1.0, t_max, 200);
    let (_, lb_fine) = boundaries(ClusterShape::Linear, 1.0, t_max, 400);
    let (tri, tb) = boundaries(ClusterShape::Triangular, 1.0, t_max, 200);

    let mut failures = Vec::new();
    match lb {
        [Some(a), Some(b), Some(c)] if a < b && b < c => {
            // between T_a and T_b only 2|13 may be PPT
            for (t, p) in lin.temps.iter().zip(&lin.patterns) {
                if *t > a && *t < b && *p != [false, true, false] {
                    failures.push(format!(
                        "pattern {p:?} at T={t:.3} is not PPT-only-across-2|13"
                    ));
                    break;
                }
            }
            let stable = lb
                .iter()
                .zip(&lb_fine)
                .all(|(x, y)| (x.unwrap() - y.unwrap_or(f64::NAN)).abs() <= 1e-3);
            if !stable {
                failures.push("linear boundaries move by more than 1e-3 under refinement".into());
            }
        }
        _ => failures.push(format!(
            "linear cluster has no ordered T_a<T_b<T_c below T={t_max} (T_a={}, T_b={}, T_c={})",
            fmt_opt(lb[0]),
            fmt_opt(lb[1]),
            fmt_opt(lb[2])
        )),
    }
    if tri
        .patterns
        .iter()
        .any(|p| p.iter().filter(|&&x| x).count() == 1)
    {
        failures.push("triangular cluster shows a single-PPT pattern".into());
    }
    if !tri.classes.contains(&TripartiteClass::PptEntangled) {
        failures.push(format!(
            "triangular cluster has no PPT-entangled band below T={t_max}"
        ));
    }
    let t = start.elapsed();
    if t > Duration::from_secs(120) {
        failures.push(format!("runtime {t:.1?}"));
    }
    info.push(describe(ClusterShape::Linear, 1.0, &lin, &lb));
    info.push(describe(ClusterShape::Triangular, 1.0, &tri, &tb));
    for shape in [ClusterShape::Linear, ClusterShape::Triangular] {
        let (sc, b) = boundaries(shape, 0.5, 4.0, 200);
        info.push(describe(shape, 0.5, &sc, &b));
    }
    if failures.is_empty() {
        Ok(format!("{t:.1?}"))
    } else {
        Err(failures.join("; "))
    }
}

// --- Smolin ---------------------------------------------------------------

fn criterion_7() -> Outcome {
    let rs = linspace(0.1, 1.5, 10);
    let ks = linspace(0.1, 2.0, 10);
    let vs = linspace(0.5, 4.0, 10);
    let cut = |s: &str| Bipartition::parse(s, 4).unwrap();
    let (c1234, c1324) = (cut("12|34"), cut("13|24"));
    let singles = Bipartition::one_vs_rest(4).unwrap();
    let mut bad = [0usize; 3];
    for &r in &rs {
        for &k in &ks {
            for &v in &vs {
                let s = smolin_generate(&SmolinParams::new(r, k, v, 1.0).unwrap()).unwrap();
                bad[0] += usize::from(!analyze_cut(&s, &c1234).unwrap().ppt);
                bad[1] += usize::from(analyze_cut(&s, &c1324).unwrap().ppt);
                bad[2] += singles
                    .iter()
                    .filter(|c| analyze_cut(&s, c).unwrap().ppt)
                    .count();
            }
        }
    }
    // 14|23 flip in κ² at fixed (r, var_p)
    let c1423 = cut("14|23");
    let mut flip_err = 0.0f64;
    for &r in &rs {
        for &v in &[0.5, 1.0, 2.5, 4.0] {
            let ppt = |k2: f64| {
                let s = smolin_generate(&SmolinParams::new(r, k2.sqrt(), v, 1.0).unwrap()).unwrap();
                analyze_cut(&s, &c1423).unwrap().ppt
            };
            let want = 0.25 * ((2.0 * r).exp() - (-2.0 * r).exp());
            let (mut a, mut b) = (0.0, 4.0 * want / v);
            assert!(!ppt(a) && ppt(b));
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                if ppt(m) {
                    b = m;
                } else {
                    a = m;
                }
            }
            flip_err = flip_err.max((0.5 * (a + b) * v - want).abs());
        }
    }
    let msg = format!(
        "12|34 NPT points {}, 13|24 PPT points {}, PPT 1-vs-3 cuts {}, 14|23 flip error {flip_err:.1e}",
        bad[0], bad[1], bad[2]
    );
    if bad == [0, 0, 0] && flip_err <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    for &(r, k, v) in &[(0.5, 1.0, 1.0), (0.2, 0.4, 3.0), (1.3, 1.7, 0.6)] {
        let p = SmolinParams::new(r, k, v, 1.0).unwrap();
        let s = smolin_generate(&p)
            .unwrap()
            .apply(&epr_basis_transform(2))
            .unwrap();
        worst = worst.max(max_diff(
            s.cm(),
            &printed_smolin_epr_basis(r, 2.0 * k * k * v),
        ));
    }
    if worst <= 1e-12 {
        Ok(format!("max entry error {worst:.1e}"))
    } else {
        Err(format!("max entry error {worst:.1e}"))
    }
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let (mut cm_err, mut d49_err, mut d50_err, mut delta_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, &(r, v)) in [(0.5, 1.0), (0.8, 2.0), (1.2, 0.5), (0.3, 3.5)]
        .iter()
        .enumerate()
    {
        let p = SmolinParams::tied(r, v).unwrap();
        let (k, vx, f) = (p.kappa, p.var_x_probe, p.f());
        let generated = smolin_generate(&p).unwrap();
        let traj = smolin_trajectory(&p, 100 + i as u64).unwrap();
        let (x_plus, p_minus) = (0.7 - 0.3 * i as f64, -1.1 + 0.5 * i as f64);
        let u = smolin_unlock(&generated, &p, x_plus, p_minus).unwrap();

        let delta = printed_delta(r, k, f, vx);
        let (sq, an) = ((-2.0 * r).exp(), (2.0 * r).exp());
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![sq + delta, an, an, sq + delta]));
        cm_err = cm_err.max(max_diff(u.epr_state.cm(), &want));
        delta_err = delta_err.max((u.delta - delta).abs());

        let g = printed_gain(r, k, f, vx);
        let [pb1, pb2] = traj.p_bar;
        let traj_epr = to_epr_basis(&traj.state).unwrap();
        let d = u.epr_state.disp();
        let got49 = [
            d[0] + traj_epr.disp()[0],
            d[1] + traj_epr.disp()[1],
            d[2] + traj_epr.disp()[2],
            d[3] + traj_epr.disp()[3],
        ];
        let s2k = 2f64.sqrt() * k;
        let want49 = [
            s2k * (x_plus * g - pb1),
            0.0,
            0.0,
            s2k * (p_minus * g + pb2),
        ];
        for j in 0..4 {
            d49_err = d49_err.max((got49[j] - want49[j]).abs());
        }
        let got50 = u.known_displacement(x_plus, p_minus);
        let s2 = 2f64.sqrt();
        let want50 = [
            s2 * x_plus * (k * g + 0.5),
            0.0,
            0.0,
            s2 * p_minus * (k * g - 0.5),
        ];
        for j in 0..4 {
            d50_err = d50_err.max((got50[j] - want50[j]).abs());
        }
    }
    if cm_err > 1e-12 {
        failures.push(format!("unlocked cm error {cm_err:.1e}"));
    }
    if delta_err > 1e-12 {
        failures.push(format!("delta error {delta_err:.1e}"));
    }
    if d49_err > 1e-12 || d50_err > 1e-12 {
        failures.push(format!("displacement errors {d49_err:.1e} / {d50_err:.1e}"));
    }

    let rows = unlock_sweep(&linspace(0.1, 1.5, 15), &linspace(0.5, 4.0, 8)).unwrap();
    let admissible: Vec<_> = rows.iter().filter(|r| r.admissible).collect();
    let finite = rows
        .iter()
        .all(|r| r.logneg_unlocked.is_finite() && r.negativity_unlocked.is_finite());
    let positive = admissible.iter().all(|r| r.logneg_unlocked > 0.0);
    let range = |xs: Vec<f64>| {
        xs.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
    };
    let (lo_l, hi_l) = range(admissible.iter().map(|r| r.ratio).collect());
    let (lo_n, hi_n) = range(admissible.iter().map(|r| r.negativity_ratio).collect());
    let surface = format!(
        "{} of {} grid points admissible; log-negativity ratio in [{lo_l:.3}, {hi_l:.3}], negativity ratio in [{lo_n:.3}, {hi_n:.3}]",
        admissible.len(),
        rows.len()
    );
    if !finite {
        failures.push("non-finite negativity".into());
    }
    if !positive {
        let zero = admissible
            .iter()
            .filter(|r| r.logneg_unlocked <= 0.0)
            .count();
        failures.push(format!(
            "{zero} admissible points with zero unlocked negativity"
        ));
    }
    let in_band = |lo: f64, hi: f64| lo >= 0.35 && hi <= 0.65;
    if admissible.is_empty() || !(in_band(lo_l, hi_l) || in_band(lo_n, hi_n)) {
        failures.push("ratio outside [0.35, 0.65] under both conventions".into());
    }
    if failures.is_empty() {
        Ok(surface)
    } else {
        Err(format!("{}; {surface}", failures.join("; ")))
    }
}

// --- oracle suite ---------------------------------------------------------

fn symplectic_error(s: &SymplecticTransform) -> f64 {
    let j = SymplecticForm::new(s.n_modes()).matrix();
    (s.matrix().transpose() * &j * s.matrix() - j).abs().max()
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> GaussianState {
    use rand::Rng;
    let occ: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.5)).collect();
    let mut st = GaussianState::thermal(&occ).unwrap();
    // local squeezing and rotations, then entangling passes
    for _ in 0..2 {
        let mut local = SymplecticTransform::rotation(rng.random_range(0.0..6.3))
            .then(&SymplecticTransform::squeezer(rng.random_range(-0.4..0.4)))
            .unwrap();
        for _ in 1..n {
            let m = SymplecticTransform::rotation(rng.random_range(0.0..6.3))
                .then(&SymplecticTransform::squeezer(rng.random_range(-0.4..0.4)))
                .unwrap();
            local = local.direct_sum(&m);
        }
        st = st.apply(&local).unwrap();
        let angles: Vec<(usize, f64)> = (0..n).map(|i| (i, rng.random_range(0.0..6.3))).collect();
        let g = cvsim::PassGeometry::uniform(&angles, rng.random_range(0.2..0.8)).unwrap();
        st = run_beam(&st, &g, &BeamSpec::vacuum(), Disposal::Discard).unwrap();
    }
    let disp = DVector::from_fn(2 * n, |_, _| rng.random_range(-1.0..1.0));
    st.with_displacement(disp).unwrap()
}

/// Mean measured value, mean of the rest, and sample count of one bin.
type BinMean = (f64, DVector<f64>, usize);

/// Pooled within-bin covariance of the unmeasured coordinates for samples
/// binned by the measured one. Returns the estimated conditional covariance
/// matrix in vacuum-normalised units.
fn sampled_conditional_cm(
    st: &GaussianState,
    q: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, Vec<BinMean>) {
    let dim = st.cm().nrows();
    let l = (st.cm() * 0.5).cholesky().unwrap().l();
    let sd = (0.5 * st.cm()[(q, q)]).sqrt();
    let bins = 2000usize;
    let (lo, hi) = (st.disp()[q] - 5.0 * sd, st.disp()[q] + 5.0 * sd);
    let width = (hi - lo) / bins as f64;
    let rest: Vec<usize> = (0..dim).filter(|&i| i != q).collect();
    let k = rest.len();
    let mut count = vec![0usize; bins];
    let mut sum = vec![DVector::<f64>::zeros(k); bins];
    let mut sum_q = vec![0.0f64; bins];
    let mut outer = vec![DMatrix::<f64>::zeros(k, k); bins];
    for _ in 0..samples {
        let z = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
        let x = st.disp() + &l * z;
        let b = ((x[q] - lo) / width).floor();
        if b < 0.0 || b >= bins as f64 {
            continue;
        }
        let b = b as usize;
        let y = DVector::from_fn(k, |i, _| x[rest[i]]);
        count[b] += 1;
        sum_q[b] += x[q];
        outer[b] += &y * y.transpose();
        sum[b] += y;
    }
    let mut pooled = DMatrix::zeros(k, k);
    let mut dof = 0usize;
    let mut means = Vec::new();
    for b in 0..bins {
        if count[b] < 2 {
            continue;
        }
        let c = count[b] as f64;
        let mean = &sum[b] / c;
        pooled += &outer[b] - &mean * mean.transpose() * c;
        dof += count[b] - 1;
        means.push((sum_q[b] / c, mean, count[b]));
    }
    (pooled / dof as f64 * 2.0, means)
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();

    // (a)
    let mut worst_sym = 0.0f64;
    for sch in Schedule::ALL {
        for &k in &linspace(0.0, 3.0, 13) {
            for g in sch.geometries(k).unwrap() {
                worst_sym = worst_sym.max(symplectic_error(
                    &interaction_symplectic(sch.n_ensembles(), &g).unwrap(),
                ));
            }
        }
    }
    worst_sym = worst_sym.max(symplectic_error(&epr_basis_transform(2)));
    if worst_sym > 1e-10 {
        failures.push(format!("(a) symplectic error {worst_sym:.1e}"));
    }

    // (b)
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut worst_rel = 0.0f64;
    let mut worst_mean_z = 0.0f64;
    for _ in 0..20 {
        let st = random_state(&mut rng, 3);
        let post = st
            .condition_on_homodyne(&MeasurementRecord::x(2, 0.0))
            .unwrap();
        let (est, means) = sampled_conditional_cm(&st, 4, 1_000_000, &mut rng);
        let exact = post.cm();
        for i in 0..4 {
            for j in 0..4 {
                let rel =
                    (est[(i, j)] - exact[(i, j)]).abs() / (exact[(i, i)] * exact[(j, j)]).sqrt();
                worst_rel = worst_rel.max(rel);
            }
        }
        // conditional mean in the most populated bins
        for (xq, mean, n) in means.iter().filter(|m| m.2 > 2000) {
            let pred = st
                .condition_on_homodyne(&MeasurementRecord::x(2, *xq))
                .unwrap();
            for i in 0..4 {
                let se = (0.5 * exact[(i, i)] / *n as f64).sqrt();
                worst_mean_z = worst_mean_z.max((mean[i] - pred.disp()[i]).abs() / se);
            }
        }
    }
    if worst_rel > 1e-2 {
        failures.push(format!("(b) conditional covariance error {worst_rel:.2e}"));
    }
    if worst_mean_z > 6.0 {
        failures.push(format!(
            "(b) conditional mean off by {worst_mean_z:.1} standard errors"
        ));
    }

    // (c)
    let p = SmolinParams::new(0.5, 0.9, 1.5, 1.0).unwrap();
    let traced = smolin_generate(&p).unwrap();
    let draws = 100_000usize;
    let first = smolin_trajectory(&p, 0).unwrap();
    let cond = first.state.cm().clone();
    let mut sum = DVector::<f64>::zeros(8);
    let mut outer = DMatrix::<f64>::zeros(8, 8);
    let mut cm_varies = false;
    for seed in 0..draws as u64 {
        let t = smolin_trajectory(&p, seed).unwrap();
        cm_varies |= t.state.cm() != &cond;
        sum += t.state.disp();
        outer += t.state.disp() * t.state.disp().transpose();
    }
    let mean = &sum / draws as f64;
    let cov = (outer - &mean * mean.transpose() * draws as f64) / (draws - 1) as f64;
    let averaged = &cond + cov * 2.0;
    let mut worst_c = 0.0f64;
    for (a, b) in averaged.iter().zip(traced.cm().iter()) {
        worst_c = worst_c.max((a - b).abs() / b.abs().max(1.0));
    }
    if worst_c > 0.02 || cm_varies {
        failures.push(format!(
            "(c) trajectory average off by {worst_c:.2e} (cm varies {cm_varies})"
        ));
    }
    let t = start.elapsed();
    if t > Duration::from_secs(180) {
        failures.push(format!("runtime {t:.1?}"));
    }
    let msg = format!(
        "(a) {worst_sym:.1e}, (b) cov {worst_rel:.2e} / mean {worst_mean_z:.1} se, (c) {worst_c:.2e}, {t:.1?}"
    );
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{}; {msg}", failures.join("; ")))
    }
}

fn main() {
    let mut info = Vec::new();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "first-beam covariance matrix", criterion_1()),
        (
            2,
            "conditional state after light measurement",
            criterion_2(),
        ),
        (3, "Duan threshold regions", criterion_3()),
        (4, "Duan detection inside NPT region", criterion_4()),
        (5, "entanglement erasure", criterion_5()),
        (
            6,
            "cluster classes versus temperature",
            criterion_6(&mut info),
        ),
        (7, "Smolin PPT pattern", criterion_7()),
        (8, "Smolin state in EPR basis", criterion_8()),
        (9, "unlocking", criterion_9()),
        (10, "oracle suite", criterion_10()),
    ];
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {n:2}  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {n:2}  {name}: {detail}")
            }
        }
    }
    for line in &info {
        println!("info  {line}");
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

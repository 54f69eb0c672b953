use kinklab_core::diagnostics::total_energy;
use kinklab_core::exact::*;
use kinklab_core::field::{init_from_profile, Boundary, FieldState, Grid};
use kinklab_core::solver::*;
use kinklab_core::{FieldState32, Grid32};

fn line(h: f64, lo: f64, hi: f64, boundary: Boundary) -> Grid<f64> {
    let cells = ((hi - lo) / h).round() as usize;
    Grid::new(&[cells], &[lo], h, boundary).unwrap()
}

fn advance_to(integ: &mut Leapfrog<f64>, t: f64) {
    while integ.time() < t - 1e-9 * integ.dt() {
        assert!(integ.step(), "diverged at t = {}", integ.time());
    }
}

fn kink_error(h: f64) -> f64 {
    let eps = 0.05;
    let spec = KinkSpec::new(vec![1.0], 0.5, 0.0, eps).unwrap();
    let g = line(h, -1.0, 1.5, Boundary::Neumann);
    let s0 = kink_state(&g, &spec, 0.0).unwrap();
    let mut integ = Leapfrog::new(&s0, stable_dt(&g, 0.5)).unwrap();
    advance_to(&mut integ, 0.5);
    let t = integ.time();
    integ.current()[0]
        .iter()
        .enumerate()
        .map(|(i, &u)| (u - boosted_kink_field(&spec, t, &[g.coord(0, i)]).0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn boosted_kink_converges_at_second_order() {
    let eps = 0.05;
    let e8 = kink_error(eps / 8.0);
    let e16 = kink_error(eps / 16.0);
    assert!(e8 <= 5e-3, "L∞ error {e8}");
    let ratio = e8 / e16;
    assert!(
        (3.2..=4.8).contains(&ratio),
        "refinement ratio {ratio} ({e8} -> {e16})"
    );
}

fn rotating_error(h: f64, omega: f64, eps: f64) -> f64 {
    let spec = RotatingWaveSpec {
        omega,
        epsilon: eps,
        base: BaseProfile::Planar {
            direction: vec![1.0],
            offset: 0.0,
        },
    };
    let g = line(h, -1.0, 1.0, Boundary::Neumann);
    let s0 = rotating_wave_state(&g, &spec, 0.0).unwrap();
    let mut integ = Leapfrog::new(&s0, stable_dt(&g, 0.5)).unwrap();
    advance_to(&mut integ, 0.5);
    let t = integ.time();
    let u = integ.current();
    (0..g.len())
        .map(|i| {
            let (exact, _) = rotating_wave_field(&spec, t, &[g.coord(0, i)]);
            (u[0][i] - exact[0]).abs().max((u[1][i] - exact[1]).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn rotating_wave_converges_at_second_order() {
    let eps = 0.05;
    let errs: Vec<f64> = [4.0, 8.0, 16.0]
        .iter()
        .map(|p| rotating_error(eps / p, 2.0, eps))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "order {order} from {errs:?}");
    }
}

/// Least-squares slope of the unwrapped phase at one cell, sampled every step
/// up to `t_end`, plus the max deviation from the analytic field.
fn phase_rate(base: BaseProfile<f64>, t_end: f64) -> (f64, f64) {
    let (omega, eps) = (2.0, 0.05);
    let spec = RotatingWaveSpec {
        omega,
        epsilon: eps,
        base,
    };
    let g = line(eps / 4.0, -1.0, 1.0, Boundary::Neumann);
    let s0 = rotating_wave_state(&g, &spec, 0.0).unwrap();
    let mut integ = Leapfrog::new(&s0, stable_dt(&g, 0.5)).unwrap();
    // probe far from the transition layer
    let probe = g.len() * 3 / 4;
    let (mut ts, mut phases) = (Vec::new(), Vec::new());
    let mut last = 0.0_f64;
    let mut turns = 0.0;
    let mut err: f64 = 0.0;
    while integ.time() < t_end {
        let u = integ.current();
        let p = u[1][probe].atan2(u[0][probe]);
        if p - last < -std::f64::consts::PI {
            turns += std::f64::consts::TAU;
        }
        last = p;
        ts.push(integ.time());
        phases.push(p + turns);
        #[allow(clippy::needless_range_loop)]
        for i in 0..g.len() {
            let (e, _) = rotating_wave_field(&spec, integ.time(), &[g.coord(0, i)]);
            err = err.max((u[0][i] - e[0]).abs().max((u[1][i] - e[1]).abs()));
        }
        assert!(integ.step());
    }
    let n = ts.len() as f64;
    let (mt, mp) = (ts.iter().sum::<f64>() / n, phases.iter().sum::<f64>() / n);
    let cov: f64 = ts
        .iter()
        .zip(&phases)
        .map(|(t, p)| (t - mt) * (p - mp))
        .sum();
    let var: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
    (cov / var, err)
}

#[test]
fn rotating_wave_keeps_its_frequency() {
    let five_periods = 5.0 * std::f64::consts::PI;
    let (w, _) = phase_rate(BaseProfile::Vacuum, five_periods);
    assert!(
        (w - 2.0).abs() / 2.0 < 5e-3,
        "vacuum base: measured ω = {w}"
    );
    // the planar zero line of a complex field is unstable (it unwinds through
    // the phase direction), so the planar profile is checked before onset
    let planar = || BaseProfile::Planar {
        direction: vec![1.0],
        offset: 0.0,
    };
    let (w, err) = phase_rate(planar(), 2.0);
    assert!(
        (w - 2.0).abs() / 2.0 < 5e-3,
        "planar base: measured ω = {w}"
    );
    assert!(err < 1e-2, "planar base error {err} before onset");
}

#[test]
fn planar_rotating_wave_unwinds() {
    let (_, err) = phase_rate(
        BaseProfile::Planar {
            direction: vec![1.0],
            offset: 0.0,
        },
        5.0 * std::f64::consts::PI,
    );
    assert!(
        err > 0.5,
        "expected the rounding-seeded instability to reach O(1), got {err}"
    );
}

#[test]
fn linear_regime_matches_discrete_dispersion() {
    let (eps, h, amp) = (0.1, 1.0 / 64.0, 1e-8);
    let kappa = 3.0;
    let tau = std::f64::consts::TAU;
    let g = Grid::new(&[64], &[0.0], h, Boundary::Periodic).unwrap();
    let s0 = init_from_profile(
        g.clone(),
        1,
        eps,
        |x, o| o[0] = 1.0 + amp * (tau * kappa * x[0]).sin(),
        |_, o| o[0] = 0.0,
    )
    .unwrap();
    let dt = stable_dt(&g, 0.5);
    let mut integ = Leapfrog::new(&s0, dt).unwrap();
    // projection of the perturbation on sin(2πκx)
    let coeff = |u: &[f64]| -> f64 {
        u.iter()
            .enumerate()
            .map(|(i, &x)| (x - 1.0) * (tau * kappa * g.coord(0, i)).sin())
            .sum::<f64>()
            * 2.0
            / 64.0
    };
    let mut a = Vec::new();
    for _ in 0..40 {
        a.push(coeff(&integ.current()[0]));
        integ.step();
    }
    // A_{m+1} + A_{m−1} = 2cos(ω̂dt)A_m for a single linear mode
    let mut best = f64::INFINITY;
    let mut cos_wdt = 0.0;
    for m in 1..a.len() - 1 {
        if a[m].abs() > 0.3 * amp && a[m].abs() < best {
            cos_wdt = (a[m + 1] + a[m - 1]) / (2.0 * a[m]);
            best = a[m].abs().min(best);
        }
    }
    let lhs = (2.0 / dt).powi(2) * ((1.0 - cos_wdt) / 2.0);
    let rhs =
        (2.0 / h).powi(2) * (std::f64::consts::PI * kappa * h).sin().powi(2) + 2.0 / (eps * eps);
    assert!((lhs - rhs).abs() / rhs < 1e-3, "{lhs} vs {rhs}");
}

#[test]
fn reversing_time_recovers_initial_data() {
    let eps = 0.05;
    let g = line(eps / 8.0, -1.0, 1.0, Boundary::Periodic);
    let s0 = kink_pair_state(&g, -0.5, 0.4, eps, 0.0).unwrap();
    let mut integ = Leapfrog::new(&s0, stable_dt(&g, 0.5)).unwrap();
    for _ in 0..2000 {
        integ.step();
    }
    integ.reverse();
    for _ in 0..2000 {
        integ.step();
    }
    let back = integ.current();
    let err = back[0]
        .iter()
        .zip(&s0.u[0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-10, "reversal error {err}");
    assert!(integ.time().abs() < 1e-12);
}

/// Runs unperturbed and bumped data side by side until `t_end`; returns the
/// grid, the final time, the step count and the two final fields.
fn bump_pair(
    dim: usize,
    n: usize,
    cfl: f64,
    r: f64,
    t_end: f64,
) -> (Grid<f64>, f64, u64, Vec<f64>, Vec<f64>) {
    let h = 2.4 / n as f64;
    let g = Grid::new(&vec![n; dim], &vec![-1.2; dim], h, Boundary::Periodic).unwrap();
    let base = |x: &[f64], o: &mut [f64]| o[0] = (3.0 * x[0]).tanh();
    let bumped = move |x: &[f64], o: &mut [f64]| {
        base(x, o);
        let d2: f64 = x.iter().map(|v| v * v).sum();
        if d2 < r * r {
            o[0] += 0.3 * (-1.0 / (1.0 - d2 / (r * r))).exp();
        }
    };
    let a = init_from_profile(g.clone(), 1, 0.1, base, |_, o| o[0] = 0.0).unwrap();
    let b = init_from_profile(g.clone(), 1, 0.1, bumped, |_, o| o[0] = 0.0).unwrap();
    let dt = stable_dt(&g, cfl);
    let (mut ia, mut ib) = (
        Leapfrog::new(&a, dt).unwrap(),
        Leapfrog::new(&b, dt).unwrap(),
    );
    while ia.time() < t_end {
        ia.step();
        ib.step();
    }
    (
        g,
        ia.time(),
        ia.steps(),
        ia.current()[0].clone(),
        ib.current()[0].clone(),
    )
}

fn leak_outside(g: &Grid<f64>, ua: &[f64], ub: &[f64], outside: impl Fn([f64; 3]) -> bool) -> f64 {
    (0..g.len())
        .filter(|&i| outside(g.center(i)))
        .map(|i| (ua[i] - ub[i]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn light_cone_is_exact_at_unit_courant_number() {
    // dt = h in 1D: the stencil's reach per step equals the light cone
    let r = 0.3;
    let (g, t, _, ua, ub) = bump_pair(1, 192, 1.0, r, 0.4);
    let h = g.spacing();
    let leak = leak_outside(&g, &ua, &ub, |c| c[0].abs() > r + t + 2.0 * h);
    assert!(leak <= 1e-12, "leak {leak}");
}

#[test]
fn stencil_domain_of_dependence_is_exact() {
    // one cell per step in the ℓ¹ metric, plus one for the Taylor start
    let r = 0.3;
    let (g, _, steps, ua, ub) = bump_pair(2, 96, 0.5, r, 0.2);
    let h = g.spacing();
    let reach = r * 2f64.sqrt() + (steps as f64 + 2.0) * h;
    let leak = leak_outside(&g, &ua, &ub, |c| c[0].abs() + c[1].abs() > reach);
    assert_eq!(leak, 0.0);
}

#[test]
fn light_cone_leak_shrinks_under_refinement() {
    // at cfl 0.5 the discrete speed exceeds 1 and the tail outside r + t + 2h
    // is a dispersive error that refinement removes
    let r = 0.3;
    let leaks: Vec<f64> = [96, 192, 384]
        .iter()
        .map(|&n| {
            let (g, t, _, ua, ub) = bump_pair(2, n, 0.5, r, 0.4);
            let h = g.spacing();
            leak_outside(&g, &ua, &ub, |c| {
                (c[0] * c[0] + c[1] * c[1]).sqrt() > r + t + 2.0 * h
            })
        })
        .collect();
    assert!(leaks.windows(2).all(|w| w[1] < w[0]), "{leaks:?}");
    assert!(leaks[2] < 1e-5, "{leaks:?}");
}

#[test]
fn periodic_energy_drift_is_small() {
    let eps = 0.05;
    let g = line(eps / 8.0, 0.0, 2.0, Boundary::Periodic);
    let s0 = kink_pair_state(&g, 0.5, 0.6, eps, 0.0).unwrap();
    let mut integ = Leapfrog::new(&s0, stable_dt(&g, 0.5)).unwrap();
    let e0 = total_energy(&integ.snapshot());
    let mut worst: f64 = 0.0;
    for m in 1..=10_000 {
        integ.step();
        if m % 100 == 0 {
            worst = worst.max((total_energy(&integ.snapshot()) - e0).abs() / e0);
        }
    }
    assert!(worst <= 5e-4, "relative drift {worst}");
}

#[test]
fn vacuum_run_is_stationary() {
    let g = Grid::new(&[16, 16], &[0.0, 0.0], 0.02, Boundary::Neumann).unwrap();
    let s = FieldState::vacuum(g, 2, 0.1).unwrap();
    let mut cfg = SolverConfig::new(1.0);
    cfg.snapshot_every = 10;
    let tr = run(&s, &cfg, &mut []).unwrap();
    assert_eq!(tr.status, RunStatus::Completed);
    assert!(tr.states.len() > 2);
    for st in &tr.states {
        assert_eq!(st.u, s.u);
        assert_eq!(total_energy(st), 0.0);
    }
    assert!(tr.states.windows(2).all(|w| w[0].time < w[1].time));
}

#[test]
fn runs_are_deterministic() {
    let g = Grid::new(&[48, 48], &[-0.6, -0.6], 0.025, Boundary::Periodic).unwrap();
    let s = sphere_state(&g, &[0.0, 0.0], 0.4, 0.1).unwrap();
    let cfg = SolverConfig::new(0.2);
    let a = run(&s, &cfg, &mut []).unwrap();
    let b = run(&s, &cfg, &mut []).unwrap();
    let bits = |st: &FieldState<f64>| st.u[0].iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(
        bits(a.states.last().unwrap()),
        bits(b.states.last().unwrap())
    );
}

struct Counter(u64, Vec<u64>);

impl Observer<f64> for Counter {
    fn cadence(&self) -> u64 {
        self.0
    }
    fn observe(&mut self, view: &StepView<'_, f64>) {
        self.1.push(view.step);
    }
}

#[test]
fn observers_fire_at_their_cadence() {
    let g = line(0.01, 0.0, 1.0, Boundary::Periodic);
    let s = FieldState::vacuum(g, 1, 0.05).unwrap();
    let cfg = SolverConfig::new(0.1);
    let mut c = Counter(5, Vec::new());
    let tr = run(&s, &cfg, &mut [&mut c]).unwrap();
    assert_eq!(tr.step_count, 20);
    assert_eq!(c.1, vec![0, 5, 10, 15, 20]);
}

#[test]
fn single_precision_kink_runs() {
    let eps = 0.05_f32;
    let g = Grid32::new(
        &[320],
        &[-1.0],
        eps / 8.0,
        kinklab_core::field::Boundary::Neumann,
    )
    .unwrap();
    let spec = KinkSpec::new(vec![1.0_f32], 0.0, 0.0, eps).unwrap();
    let s: FieldState32 = kink_state(&g, &spec, 0.0).unwrap();
    let e0 = total_energy(&s);
    assert!((e0 - sigma_quartic::<f32>()).abs() / e0 < 0.01);
    let mut cfg = SolverConfig::new(0.25_f32);
    cfg.points_per_width = 8.0;
    let tr = run(&s, &cfg, &mut []).unwrap();
    assert_eq!(tr.status, RunStatus::Completed);
    let e1 = total_energy(tr.states.last().unwrap());
    assert!((e1 - e0).abs() / e0 < 1e-3, "{e0} -> {e1}");
}

//! Built-in identity and exact-solution checks behind `kinklab verify`.
//! Each check takes well under a second in release builds.

use kinklab_core::diagnostics::{densities, equipartition_ratio, projection_report, stress_energy};
use kinklab_core::exact::{kink_pair_state, kink_state, sigma_quartic, KinkSpec};
use kinklab_core::field::{init_from_profile, Boundary, FieldState, Grid};
use kinklab_core::minimal::{radial_solve, RadialStatus};
use kinklab_core::solver::{stable_dt, Leapfrog};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::LabError;
use crate::snapshot;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Sum of a few Fourier modes with random coefficients.
pub fn random_smooth_state(grid: &Grid<f64>, k: usize, epsilon: f64, seed: u64) -> FieldState<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let modes: Vec<(Vec<f64>, f64, f64)> = (0..6 * k)
        .map(|_| {
            let wave: Vec<f64> = (0..grid.dim())
                .map(|_| rng.gen_range(-3i32..=3) as f64)
                .collect();
            (
                wave,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let ext: Vec<f64> = (0..grid.dim()).map(|a| grid.extent(a)).collect();
    let eval = |x: &[f64], which: usize| -> f64 {
        modes[which * 3..which * 3 + 3]
            .iter()
            .map(|(w, a, ph)| {
                let arg: f64 = x
                    .iter()
                    .zip(w)
                    .zip(&ext)
                    .map(|((xi, wi), l)| std::f64::consts::TAU * wi * xi / l)
                    .sum();
                a * (arg + ph).sin()
            })
            .sum()
    };
    init_from_profile(
        grid.clone(),
        k,
        epsilon,
        |x, o| {
            o.iter_mut()
                .enumerate()
                .for_each(|(c, v)| *v = eval(x, 2 * c))
        },
        |x, o| {
            o.iter_mut()
                .enumerate()
                .for_each(|(c, v)| *v = eval(x, 2 * c + 1))
        },
    )
    .expect("finite samples")
}

/// max over cells of |e + T⁰⁰| and |tr(ηT) − 2w − (n − 1)ℓ|.
pub fn identity_error(s: &FieldState<f64>) -> f64 {
    let d = densities(s);
    let t = stress_energy(s);
    let n = s.grid.dim() as f64;
    (0..s.grid.len()).fold(0.0_f64, |m, i| {
        let tt = &t.tensors[i];
        m.max((d.e[i] + tt.get(0, 0)).abs())
            .max((tt.eta_trace() - 2.0 * d.w[i] - (n - 1.0) * d.l[i]).abs())
    })
}

fn identities() -> Check {
    let grids = [
        Grid::new(&[96], &[0.0], 1.0 / 96.0, Boundary::Periodic).unwrap(),
        Grid::new(&[40, 40], &[-0.5, -0.5], 1.0 / 40.0, Boundary::Neumann).unwrap(),
        Grid::new(&[10, 10, 10], &[0.0; 3], 0.1, Boundary::Periodic).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for (i, g) in grids.iter().enumerate() {
        for k in [1, 2] {
            let s = random_smooth_state(g, k, 0.1, 100 + 10 * i as u64 + k as u64);
            worst = worst.max(identity_error(&s));
        }
    }
    check(
        "identities e = -T00, tr(eta T) = 2w + (n-1)l",
        worst <= 1e-12,
        format!("max error {worst:.2e}"),
    )
}

fn line(h: f64, lo: f64, hi: f64, b: Boundary) -> Grid<f64> {
    Grid::new(&[((hi - lo) / h).round() as usize], &[lo], h, b).unwrap()
}

fn sigma() -> Check {
    let eps = 0.05;
    let g = line(eps / 8.0, -1.0, 1.0, Boundary::Neumann);
    let s = kink_state(&g, &KinkSpec::new(vec![1.0], 0.0, 0.0, eps).unwrap(), 0.0).unwrap();
    let l = densities(&s).total_l();
    let rel = (l - sigma_quartic::<f64>()).abs() / sigma_quartic::<f64>();
    check(
        "static kink lagrangian = sigma",
        rel <= 0.01,
        format!("L = {l:.6}, relative error {rel:.2e}"),
    )
}

fn boosted_kink() -> Check {
    let eps = 0.05;
    let spec = KinkSpec::new(vec![1.0], 0.6, 0.0, eps).unwrap();
    let g = line(eps / 8.0, -1.0, 1.5, Boundary::Neumann);
    let s0 = kink_state(&g, &spec, 0.0).unwrap();
    let d = densities(&s0);
    let (e, l) = (d.total_e(), d.total_l());
    let ratio = equipartition_ratio(&d, 0.01).unwrap_or(f64::NAN);
    // the error is mostly spatial; cfl 0.9 lands exactly on t = 0.5
    let dt = 0.5 / (0.5 / stable_dt(&g, 0.9)).ceil();
    let mut integ = Leapfrog::new(&s0, dt).unwrap();
    while integ.time() < 0.5 - 1e-12 {
        integ.step();
    }
    let exact = kink_state(&g, &spec, integ.time()).unwrap();
    let err = exact.u[0]
        .iter()
        .zip(integ.current()[0].iter())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let (e_ref, l_ref) = (spec.energy_per_area(), spec.lagrangian_per_area());
    let ok = err <= 5e-3
        && (e - e_ref).abs() / e_ref <= 0.01
        && (l - l_ref).abs() / l_ref <= 0.01
        && (ratio - 0.5).abs() <= 1e-3;
    check(
        "boosted kink v = 0.6",
        ok,
        format!("Linf {err:.2e} at t = 0.5, E = {e:.5}, L = {l:.5}, w/l = {ratio:.5}"),
    )
}

fn energy_conservation() -> Check {
    let eps = 0.05;
    let g = line(eps / 8.0, -1.0, 1.0, Boundary::Periodic);
    let s0 = kink_pair_state(&g, -0.5, 0.3, eps, 0.0).unwrap();
    let e0 = densities(&s0).total_e();
    let mut integ = Leapfrog::new(&s0, stable_dt(&g, 0.5)).unwrap();
    let mut drift: f64 = 0.0;
    for i in 1..=2000 {
        integ.step();
        if i % 100 == 0 {
            drift = drift.max((densities(&integ.snapshot()).total_e() - e0).abs() / e0);
        }
    }
    check(
        "energy conservation (2000 steps)",
        drift <= 5e-4,
        format!("max relative drift {drift:.2e}"),
    )
}

fn radial_cosine() -> Check {
    let sol = radial_solve(1.0_f64, 0.0, 2, 1e-3, 1.4);
    let err = sol
        .samples
        .iter()
        .map(|s| (s.r - s.t.cos()).abs())
        .fold(0.0, f64::max);
    let ok = err <= 1e-8 && sol.status == RadialStatus::Completed;
    check(
        "radial ODE vs r0 cos(t/r0)",
        ok,
        format!("max error {err:.2e}"),
    )
}

fn projection() -> Check {
    let eps = 0.05;
    let h = eps / 8.0;
    let g = line(h, -1.0, 1.0, Boundary::Neumann);
    let s = kink_state(&g, &KinkSpec::new(vec![1.0], 0.6, 0.0, eps).unwrap(), 0.1).unwrap();
    match projection_report(&stress_energy(&s), &densities(&s), &g, &[0.06], 6.0 * h) {
        Ok(r) => {
            let ok = (r.eigenvalues[0] - 1.0).abs() <= 0.05
                && r.eigenvalues[1].abs() <= 0.05
                && (r.trace - 1.0).abs() <= 0.1
                && r.spacelike_ok;
            check(
                "projection of a boosted kink",
                ok,
                format!("eigenvalues {:?}, trace {:.4}", r.eigenvalues, r.trace),
            )
        }
        Err(e) => check("projection of a boosted kink", false, e.to_string()),
    }
}

fn snapshot_round_trip() -> Check {
    let g = Grid::new(&[12, 9], &[-0.3, 0.2], 0.05, Boundary::Periodic).unwrap();
    let mut s = random_smooth_state(&g, 2, 0.07, 5);
    s.time = 0.3;
    let mut buf = Vec::new();
    let ok = snapshot::write_snapshot(&mut buf, &s).is_ok()
        && snapshot::read_snapshot(&mut buf.as_slice(), Boundary::Periodic)
            .map(|b| {
                let bits =
                    |v: &Vec<Vec<f64>>| v.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
                bits(&b.u) == bits(&s.u) && bits(&b.ut) == bits(&s.ut) && b.time == s.time
            })
            .unwrap_or(false);
    check("HGLW round trip", ok, format!("{} bytes", buf.len()))
}

pub fn run_suite() -> Vec<Check> {
    vec![
        identities(),
        sigma(),
        boosted_kink(),
        energy_conservation(),
        radial_cosine(),
        projection(),
        snapshot_round_trip(),
    ]
}

/// Runs the suite, printing one line per check; fails if any check fails.
pub fn verify() -> Result<Vec<Check>, LabError> {
    let checks = run_suite();
    for c in &checks {
        println!(
            "{} {:<48} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(checks)
    } else {
        Err(LabError::Verification(failed.join("; ")))
    }
}

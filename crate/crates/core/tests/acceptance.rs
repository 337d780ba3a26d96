//! One line per acceptance criterion. Runs without the libtest harness so
//! every criterion is evaluated and reported before the exit status is set.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polaron_core::config::RunConfig;
use polaron_core::density::ImpurityDensity;
use polaron_core::energy::{
    coefficients_with_drive, monotonicity, pair_energy, q_integral, r_integral, single_impurity_energy, Monotonicity,
    DEGENERATE_GAP,
};
use polaron_core::modes::{effective_modes, eta_zero_drive, threshold_omega, width_asymptotics};
use polaron_core::oracle::{convolve_green, extrapolated_energy, q_quadrature, solve_fd, FdSystem};
use polaron_core::profiles::{effective_deformations, f_kernel};
use polaron_core::sweep::{distance_curve, surface, Axis};
use polaron_core::units::{reference_params, MixtureParams, HBAR};
use polaron_core::verification::perturbed_params;
use polaron_core::RamanDrive;

const SEED: u64 = 20_240_601;

enum Status {
    Pass,
    Fail,
    Flagged,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn judge(ok: bool, detail: String) -> Outcome {
    Outcome {
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

fn threshold() -> Outcome {
    let p = reference_params();
    let t = Instant::now();
    let lim = threshold_omega(&p).unwrap();
    let el = t.elapsed();
    let hz = lim / (2.0 * PI);
    let dev = rel(hz, 923.0);
    judge(
        dev <= 0.02 && within(el, Duration::from_millis(1)),
        format!(
            "omega_lim/2pi = {hz:.2} Hz, deviation from 923 Hz {:.2}% (tol 2%), {el:?}",
            100.0 * dev
        ),
    )
}

fn zero_drive_limit() -> Outcome {
    let p = reference_params();
    let t = Instant::now();
    let (zp, zm) = eta_zero_drive(&p).unwrap();
    let lim = threshold_omega(&p).unwrap();
    let at0 = effective_modes(&p, &RamanDrive::OFF).unwrap();
    let small = effective_modes(&p, &RamanDrive::new(1e-6 * lim).unwrap()).unwrap();
    let el = t.elapsed();
    let d0 = rel(at0.eta_plus, zp).max(rel(at0.eta_minus, zm));
    let ds = rel(small.eta_plus, zp).max(rel(small.eta_minus, zm));
    judge(
        d0 <= 1e-12 && ds <= 1e-5 && within(el, Duration::from_millis(1)),
        format!("eta(0) dev {d0:.2e} (tol 1e-12), eta(1e-6 lim) dev {ds:.2e} (tol 1e-5), {el:?}"),
    )
}

fn strong_coupling() -> Outcome {
    let p = reference_params();
    let t = Instant::now();
    let lim = threshold_omega(&p).unwrap();
    let omega = 1e3 * lim;
    let m = effective_modes(&p, &RamanDrive::new(omega).unwrap()).unwrap();
    let asym = width_asymptotics(&p).unwrap();
    let el = t.elapsed();
    let dp = rel(1.0 / m.eta_plus, asym.d_plus_limit);
    let dm = rel(omega.sqrt() / m.eta_minus, (HBAR / (2.0 * p.m_b)).sqrt());
    judge(
        dp <= 0.01 && dm <= 0.01 && within(el, Duration::from_millis(1)),
        format!("d_plus vs plateau {dp:.2e}, d_minus sqrt(omega) vs sqrt(hbar/2m_b) {dm:.2e} (tol 1e-2), {el:?}"),
    )
}

fn profile_dev(p: &MixtureParams, drive: &RamanDrive, h: f64) -> f64 {
    let rho = ImpurityDensity::single(p.sigma).unwrap();
    let (slow, _) = FdSystem::new(p, drive).unwrap().decay_rates().unwrap();
    let sol = solve_fd(p, drive, &rho, h, 30.0 / slow).unwrap();
    let prof = effective_deformations(p, drive, &rho, &sol.grid).unwrap();
    let dev = |num: &[f64], exact: &[f64]| {
        let peak = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        num.iter().zip(exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / peak
    };
    dev(&sol.theta_a, &prof.theta_a).max(dev(&sol.theta_b, &prof.theta_b))
}

fn profile_equivalence() -> Outcome {
    let p = reference_params();
    let lim = threshold_omega(&p).unwrap();
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [0.0, 0.5, 1.0, 2.0] {
        let drive = RamanDrive::new(f * lim).unwrap();
        let eta_plus = effective_modes(&p, &drive).unwrap().eta_plus;
        let fine = profile_dev(&p, &drive, 0.01 / eta_plus);
        let coarse = profile_dev(&p, &drive, 0.02 / eta_plus);
        let order = (coarse / fine).log2();
        ok &= fine <= 1e-4 && (order - 2.0).abs() <= 0.1;
        parts.push(format!("{f}lim: {fine:.2e}/order {order:.3}"));
    }
    let el = t.elapsed();
    judge(
        ok && within(el, Duration::from_secs(10)),
        format!("{} (tol 1e-4, 2 +- 0.1), {el:?}", parts.join(", ")),
    )
}

fn kernel_certification() -> Outcome {
    let p = reference_params();
    let eta0 = effective_modes(&p, &RamanDrive::OFF).unwrap().eta_minus;
    let rho = ImpurityDensity::single(p.sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let eta = eta0 * rng.gen_range(0.2..5.0);
        let x = rng.gen_range(-10.0..10.0) / eta;
        let quad = convolve_green(eta, &rho, x).unwrap();
        worst = worst.max(rel(f_kernel(p.sigma, eta, x), quad));
    }
    let el = t.elapsed();
    judge(
        worst <= 1e-8 && within(el, Duration::from_secs(5)),
        format!("100 samples, max dev {worst:.2e} (tol 1e-8), {el:?}"),
    )
}

fn q_certification() -> Outcome {
    let p = reference_params();
    let eta0 = effective_modes(&p, &RamanDrive::OFF).unwrap().eta_minus;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let sigma = p.sigma * rng.gen_range(0.5..1.5);
        let ei = eta0 * rng.gen_range(0.3..5.0);
        let ej = eta0 * rng.gen_range(0.3..5.0);
        let d = rng.gen_range(0.0..5.0) * p.lattice_a;
        worst = worst.max(rel(
            q_integral(sigma, ei, ej, d),
            q_quadrature(sigma, ei, ej, d).unwrap(),
        ));
    }
    let mut jump: f64 = 0.0;
    for d in [0.0, p.lattice_a, 5.0 * p.lattice_a] {
        let r = r_integral(p.sigma, eta0, d);
        let q = |gap: f64| q_integral(p.sigma, eta0 * (1.0 + 0.5 * gap), eta0 * (1.0 - 0.5 * gap), d);
        jump = jump.max(((q(1.001 * DEGENERATE_GAP) - q(0.999 * DEGENERATE_GAP)) / r).abs());
        jump = jump.max(rel(q(1e-4), r)).max(rel(q(1e-7), r));
    }
    let el = t.elapsed();
    judge(
        worst <= 1e-7 && jump <= 1e-6 && within(el, Duration::from_secs(60)),
        format!("50 draws, max dev {worst:.2e} (tol 1e-7), degenerate continuity {jump:.2e} (tol 1e-6), {el:?}"),
    )
}

fn energy_assembly() -> Outcome {
    let base = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let t = Instant::now();
    let mut worst_single: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    let mut worst_lattice: f64 = 0.0;
    for i in 0..20 {
        let p = perturbed_params(&base, &mut rng);
        let lim = threshold_omega(&p).unwrap();
        let drive = RamanDrive::new([0.0, 0.5, 1.0, 2.0][i % 4] * lim * rng.gen_range(0.9..1.1)).unwrap();
        let d = rng.gen_range(0.0..3.0) * p.lattice_a;
        let (slow, fast) = FdSystem::new(&p, &drive).unwrap().decay_rates().unwrap();
        let (h, ext) = (0.02 / fast, 30.0 / slow);
        let single = ImpurityDensity::single(p.sigma).unwrap();
        let e1 = extrapolated_energy(&p, &drive, &single, h, ext).unwrap();
        let pair = ImpurityDensity::pair(d, p.sigma).unwrap();
        let e2 = extrapolated_energy(&p, &drive, &pair, h, ext).unwrap();
        let s = single_impurity_energy(&p, &drive).unwrap();
        let a0 = s.total - s.binding;
        worst_single = worst_single.max(rel(e1 - a0, s.binding));
        worst_pair = worst_pair.max(rel(e2 - 2.0 * e1, pair_energy(&p, &drive, d).unwrap().delta_e));
        // three sites with unequal occupations
        let sites = ImpurityDensity::new(vec![-p.lattice_a, 0.0, d], vec![1.0, 2.0, 1.0], p.sigma).unwrap();
        let e3 = extrapolated_energy(&p, &drive, &sites, h, ext).unwrap();
        let closed = polaron_core::energy::lattice_energy(&p, &drive, &sites).unwrap().total;
        worst_lattice = worst_lattice.max(rel(e3 - 4.0 * a0, closed - 4.0 * a0));
    }
    let el = t.elapsed();
    judge(
        worst_single.max(worst_pair).max(worst_lattice) <= 1e-5 && within(el, Duration::from_secs(120)),
        format!(
            "20 draws, binding {worst_single:.2e}, pair {worst_pair:.2e}, lattice {worst_lattice:.2e} (tol 1e-5), {el:?}"
        ),
    )
}

fn attraction_at_zero_drive() -> Outcome {
    let p = reference_params();
    let eta_minus = effective_modes(&p, &RamanDrive::OFF).unwrap().eta_minus;
    let ds = Axis::new(0.0, 60.0 / eta_minus, 2401, false).unwrap().values();
    let curve = distance_curve(&p, &RamanDrive::OFF, &ds).unwrap();
    let e: Vec<f64> = curve.points.iter().map(|pt| pt.delta_e).collect();
    let min_at_zero = e[0] < 0.0 && e[1..].iter().all(|v| *v > e[0]);
    let tail = ds
        .iter()
        .zip(&e)
        .filter(|(d, _)| **d >= 30.0 / eta_minus)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
        / e[0].abs();
    judge(
        min_at_zero && tail <= 1e-8,
        format!("minimum at d = 0: {min_at_zero}, max |dE|/|dE(0)| beyond 30/eta_minus {tail:.2e} (tol 1e-8)"),
    )
}

fn crossover() -> Outcome {
    let p = reference_params();
    let lim = threshold_omega(&p).unwrap();
    let ds = Axis::new(p.lattice_a, 5.0 * p.lattice_a, 81, false).unwrap().values();
    let omegas = Axis::new(0.0, 2.0 * lim, 401, false).unwrap().values();
    let mut prev: Option<(f64, Monotonicity)> = None;
    let mut flip = None;
    let mut senses = Vec::new();
    for &w in &omegas {
        let curve = distance_curve(&p, &RamanDrive::new(w).unwrap(), &ds).unwrap();
        let e: Vec<f64> = curve.points.iter().map(|pt| pt.delta_e).collect();
        let m = monotonicity(&e);
        if !senses.contains(&m) {
            senses.push(m);
        }
        if let Some((w0, m0)) = prev {
            if m != m0 && flip.is_none() {
                flip = Some(0.5 * (w0 + w));
            }
        }
        prev = Some((w, m));
    }
    match flip {
        Some(w) => {
            let ratio = w / lim;
            judge(
                (0.5..=2.0).contains(&ratio),
                format!("sense of dE(d) on [a, 5a] flips at {ratio:.3} omega_lim (required within [0.5, 2])"),
            )
        }
        None => judge(
            false,
            format!(
                "no flip on [0, 2 omega_lim]: dE(d) on [a, 5a] is {senses:?} at every one of {} couplings",
                omegas.len()
            ),
        ),
    }
}

fn cross_term() -> Outcome {
    let p = reference_params();
    let lim = threshold_omega(&p).unwrap();
    let ds = Axis::new(0.0, 5.0 * p.lattice_a, 51, false).unwrap().values();
    let omegas = Axis::new(0.02 * lim, 2.0 * lim, 100, false).unwrap().values();
    let mut worst = (0.0f64, 0.0, 0.0);
    let mut best = f64::INFINITY;
    for &w in &omegas {
        let drive = RamanDrive::new(w).unwrap();
        let c = coefficients_with_drive(&p, &drive).unwrap();
        let [ep, em] = c.eta();
        let mix = c.weight_a[0] * c.weight_b[1] + c.weight_a[1] * c.weight_b[0];
        for &d in &ds {
            let cross = 2.0 * HBAR * w * mix * q_integral(p.sigma, ep, em, d);
            let ratio = (cross / pair_energy(&p, &drive, d).unwrap().delta_e).abs();
            best = best.min(ratio);
            if ratio > worst.0 {
                worst = (ratio, d / p.lattice_a, w / lim);
            }
        }
    }
    let detail = format!(
        "|Q term|/|dE| from {best:.3} to {:.3} (at d = {:.2}a, omega = {:.2} omega_lim), tol 0.1",
        worst.0, worst.1, worst.2
    );
    Outcome {
        status: if worst.0 <= 0.1 { Status::Pass } else { Status::Flagged },
        detail,
    }
}

fn determinism() -> Outcome {
    let p = RunConfig::default().params;
    let lim = threshold_omega(&p).unwrap();
    let ds = Axis::new(0.0, 5.0 * p.lattice_a, 41, false).unwrap().values();
    let ws = Axis::new(0.0, 2.0 * lim, 17, false).unwrap().values();
    let comments = polaron_core::sweep::manifest(&RunConfig::default());
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut buf = Vec::new();
            surface(&p, &ds, &ws)
                .unwrap()
                .write_csv(&mut buf, &comments, true)
                .unwrap();
            buf
        })
    };
    let one = render(1);
    let again = render(1);
    let four = render(4);
    judge(
        one == again && one == four,
        format!(
            "{} byte surface CSV, repeat identical {}, 1 vs 4 threads identical {}",
            one.len(),
            one == again,
            one == four
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("threshold reproduction", threshold),
        ("zero-drive consistency", zero_drive_limit),
        ("strong-coupling asymptotics", strong_coupling),
        ("oracle-profile equivalence", profile_equivalence),
        ("kernel certification", kernel_certification),
        ("Q/R certification", q_certification),
        ("energy assembly equivalence", energy_assembly),
        ("attraction at zero drive", attraction_at_zero_drive),
        ("attractive-repulsive crossover", crossover),
        ("cross-term smallness", cross_term),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = match out.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Flagged => "FLAGGED",
        };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, out.detail);
    }
    println!("acceptance: {} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

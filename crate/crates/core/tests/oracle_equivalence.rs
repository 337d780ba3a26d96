use polaron_core::energy::{pair_energy, q_integral, single_impurity_energy};
use polaron_core::modes::threshold_omega;
use polaron_core::oracle::{extrapolated_energy, q_quadrature, solve_fd, FdSystem};
use polaron_core::profiles::effective_deformations;
use polaron_core::{reference_params, ImpurityDensity, MixtureParams, RamanDrive};

fn grid_for(p: &MixtureParams, drive: &RamanDrive, h_eta: f64) -> (f64, f64) {
    let (slow, fast) = FdSystem::new(p, drive).unwrap().decay_rates().unwrap();
    (h_eta / fast, 30.0 / slow)
}

fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    let peak = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / peak
}

#[test]
fn fd_profiles_match_closed_form() {
    let p = reference_params();
    let lim = threshold_omega(&p).unwrap();
    let rho = ImpurityDensity::single(p.sigma).unwrap();
    for f in [0.0, 0.5, 1.0, 2.0] {
        let drive = RamanDrive::new(f * lim).unwrap();
        let (h, ext) = grid_for(&p, &drive, 0.01);
        let sol = solve_fd(&p, &drive, &rho, h, ext).unwrap();
        let prof = effective_deformations(&p, &drive, &rho, &sol.grid).unwrap();
        let da = max_rel_dev(&sol.theta_a, &prof.theta_a);
        let db = max_rel_dev(&sol.theta_b, &prof.theta_b);
        println!("f = {f}: dev A {da:e} B {db:e}");
        assert!(da <= 1e-4 && db <= 1e-4);
    }
}

#[test]
fn energies_match_assembly() {
    let p = reference_params();
    let lim = threshold_omega(&p).unwrap();
    for f in [0.0, 0.5, 1.0, 2.0] {
        let drive = RamanDrive::new(f * lim).unwrap();
        let (h, ext) = grid_for(&p, &drive, 0.02);
        let single = ImpurityDensity::single(p.sigma).unwrap();
        let e1 = extrapolated_energy(&p, &drive, &single, h, ext + p.lattice_a).unwrap();
        let s = single_impurity_energy(&p, &drive).unwrap();
        let d = p.lattice_a;
        let pair = ImpurityDensity::pair(d, p.sigma).unwrap();
        let e2 = extrapolated_energy(&p, &drive, &pair, h, ext).unwrap();
        let pe = pair_energy(&p, &drive, d).unwrap();
        let binding_dev = ((e1 - s.total) / s.binding).abs();
        let pair_dev = ((e2 - 2.0 * e1 - pe.delta_e) / pe.delta_e).abs();
        assert!(binding_dev < 1e-5, "omega = {f} lim: binding off by {binding_dev:e}");
        assert!(pair_dev < 1e-5, "omega = {f} lim: pair energy off by {pair_dev:e}");
    }
}

#[test]
fn q_matches_quadrature() {
    let (s, a, b) = (2e-7, 4e6, 7e6);
    for d in [0.0, 3e-7, 1.5e-6] {
        let q = q_integral(s, a, b, d);
        let qq = q_quadrature(s, a, b, d).unwrap();
        assert!(((q - qq) / qq).abs() < 1e-7);
    }
}

use dilute_core::dilute_eos::{free_energy_dilute, pressure_dilute, pressure_polarized, EosOptions};
use dilute_core::error_budget::{soft_potential_profile, LowerSchedule};
use dilute_core::finite_box::{box_pressure, lemma4_check, Boundary, BoxSpec, TestFunction};
use dilute_core::ideal_gas::{
    density_ideal, density_slope, polylog_fd, pressure_ideal, FdOrder, ThermoPoint,
};
use dilute_core::matrix_lab::{
    gibbs_state, hs_norm, instance_rng, lemma7_check, random_density, random_hermitian, random_one_body,
    spectral_map, vn_entropy, DensityMatrix, OneBodyDM,
};
use dilute_core::scattering::{scattering_length, scattering_length_ode, RadialPotential, Segment};
use proptest::prelude::*;

const PI: f64 = std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn p0(beta: f64, mu: f64, q: u32) -> f64 {
    pressure_ideal(&ThermoPoint::new(beta, mu, q).unwrap()).unwrap()
}

fn rho0(beta: f64, mu: f64, q: u32) -> f64 {
    density_ideal(&ThermoPoint::new(beta, mu, q).unwrap()).unwrap()
}

/// Piecewise-constant potential on a shared grid of radii.
fn piecewise(core: f64, edges: &[f64], values: &[f64]) -> RadialPotential {
    let mut segs = Vec::new();
    let mut lo = core;
    for (&hi, &v) in edges.iter().zip(values) {
        segs.push(Segment::constant(lo, hi, v));
        lo = hi;
    }
    RadialPotential::new(core, lo, segs).unwrap()
}

fn potential_pair() -> impl Strategy<Value = (f64, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (0.0..0.5f64, 1usize..5).prop_flat_map(|(core, n)| {
        (
            Just(core),
            prop::collection::vec(0.05..0.5f64, n),
            prop::collection::vec(0.0..20.0f64, n),
            prop::collection::vec(0.0..20.0f64, n),
        )
            .prop_map(|(core, widths, v1, extra)| {
                let mut edges = Vec::new();
                let mut r = core;
                for w in widths {
                    r += w;
                    edges.push(r);
                }
                (core, edges, v1, extra)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pressure_is_convex_in_mu(beta in 0.2..5.0f64, mu in -5.0..5.0f64, h in 0.01..2.0f64, t in 0.1..0.9f64) {
        let (m1, m3) = (mu - h, mu + h);
        let m2 = m1 + t * (m3 - m1);
        let interp = (1.0 - t) * p0(beta, m1, 2) + t * p0(beta, m3, 2);
        prop_assert!(p0(beta, m2, 2) <= interp * (1.0 + 1e-13));
    }

    #[test]
    fn pressure_derivative_is_density(beta in 0.3..3.0f64, lz in (0.1f64).ln()..(100.0f64).ln()) {
        let mu = lz / beta;
        let h = 1e-4 * (1.0 + mu.abs()) / beta.max(1.0);
        let d = (p0(beta, mu + h, 2) - p0(beta, mu - h, 2)) / (2.0 * h);
        prop_assert!(rel(d, rho0(beta, mu, 2)) < 1e-6);
    }

    #[test]
    fn density_increases_with_mu(beta in 0.1..10.0f64, mu in -10.0..10.0f64, dm in 1e-3..1.0f64) {
        prop_assert!(rho0(beta, mu + dm, 2) > rho0(beta, mu, 2));
        prop_assert!(density_slope(&ThermoPoint::new(beta, mu, 2).unwrap()).unwrap() > 0.0);
    }

    #[test]
    fn quadrature_matches_polylog(beta in 0.2..5.0f64, z in 1e-3..1.0f64, q in 1u32..5) {
        let pt = ThermoPoint::from_fugacity(beta, z, q).unwrap();
        let f52 = polylog_fd(FdOrder::FiveHalves, z).unwrap();
        let f32 = polylog_fd(FdOrder::ThreeHalves, z).unwrap();
        let lam3 = (4.0 * PI * beta).powf(1.5);
        prop_assert!(rel(pressure_ideal(&pt).unwrap(), q as f64 * f52 / (beta * lam3)) < 1e-10);
        prop_assert!(rel(density_ideal(&pt).unwrap(), q as f64 * f32 / lam3) < 1e-10);
    }

    #[test]
    fn pressure_scaling_law(beta in 0.1..10.0f64, mu in -5.0..5.0f64, lambda in 0.1..10.0f64) {
        let lhs = p0(beta / lambda, lambda * mu, 2);
        prop_assert!(rel(lhs, lambda.powf(2.5) * p0(beta, mu, 2)) < 1e-10);
    }

    #[test]
    fn scattering_is_monotone((core, edges, v1, extra) in potential_pair()) {
        let v2: Vec<f64> = v1.iter().zip(&extra).map(|(a, b)| a + b).collect();
        let a1 = scattering_length(&piecewise(core, &edges, &v1)).unwrap().a;
        let a2 = scattering_length(&piecewise(core, &edges, &v2)).unwrap().a;
        prop_assert!(a1 <= a2 * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn scattering_scale_covariance((core, edges, v1, _x) in potential_pair(), lambda in 0.2..5.0f64) {
        let v = piecewise(core, &edges, &v1);
        let a = scattering_length(&v).unwrap().a;
        let ad = scattering_length(&v.dilated(lambda).unwrap()).unwrap().a;
        prop_assert!(rel(ad, lambda * a) < 1e-10 || (a == 0.0 && ad == 0.0));
    }

    #[test]
    fn exact_and_ode_paths_agree((core, edges, v1, _x) in potential_pair()) {
        let v = piecewise(core, &edges, &v1);
        let a = scattering_length(&v).unwrap().a;
        let b = scattering_length_ode(&v).unwrap().a;
        prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-12));
    }

    #[test]
    fn polarized_reduces_to_dilute(beta in 0.2..5.0f64, mu in -3.0..3.0f64, a in 0.0..0.2f64) {
        let p = pressure_dilute(beta, mu, a, 2, &EosOptions::default()).unwrap().p;
        let (pp, _) = pressure_polarized(beta, mu, 0.0, a).unwrap();
        prop_assert!(rel(pp, p) < 1e-12 || (p - pp).abs() < 1e-300);
    }

    #[test]
    fn legendre_duality_to_first_order(beta in 0.3..3.0f64, mu in -2.0..3.0f64, a in 1e-4..0.05f64, q in 2u32..5) {
        let opts = EosOptions::default();
        let rho = rho0(beta, mu, q);
        let f = free_energy_dilute(beta, rho, a, q, &opts).unwrap().f.unwrap();
        let p = pressure_dilute(beta, mu, a, q, &opts).unwrap().p;
        let g = 4.0 * PI * a * (1.0 - 1.0 / q as f64);
        let slope = density_slope(&ThermoPoint::new(beta, mu, q).unwrap()).unwrap();
        prop_assert!((f + p - mu * rho).abs() <= 10.0 * g * g * rho * rho * slope + 1e-12 * p.abs());
    }

    #[test]
    fn interaction_signs(beta in 0.3..3.0f64, mu in -2.0..3.0f64, a in 1e-4..0.1f64, q in 2u32..5) {
        let opts = EosOptions::default();
        let r = pressure_dilute(beta, mu, a, q, &opts).unwrap();
        prop_assert!(r.p < r.p0);
        let fr = free_energy_dilute(beta, r.rho0, a, q, &opts).unwrap();
        prop_assert!(fr.f.unwrap() > fr.f0.unwrap());
    }

    #[test]
    fn flags_follow_thresholds(beta in 0.1..3.0f64, lz in -4.0..4.0f64, a in 0.0..1.0f64) {
        let r = pressure_dilute(beta, lz / beta, a, 2, &EosOptions::default()).unwrap();
        prop_assert_eq!(r.flags.not_dilute, r.a3rho > 1e-2);
        prop_assert_eq!(r.flags.low_fugacity, lz < (0.1f64).ln());
    }

    #[test]
    fn lemma4_sandwich(beta in 0.1..10.0f64, lz in (0.1f64).ln()..(10.0f64).ln(), ell in 1.0..20.0f64) {
        for f in [TestFunction::Boltzmann { beta }, TestFunction::Fermi { beta, mu: lz / beta }] {
            let r = lemma4_check(f, ell).unwrap();
            prop_assert!(r.pass, "{:?} {:?}", f, r);
        }
    }

    #[test]
    fn box_factor_orders(r0 in 0.0..2.0f64, ell in 1.0..100.0f64) {
        let bx = BoxSpec::new(ell, Boundary::Dirichlet).unwrap();
        let p = box_pressure(1.0, 0.0, &bx).unwrap();
        let factor = (1.0 + r0 / ell).powi(-3);
        prop_assert!(factor <= 1.0 && factor * p <= p);
    }

    #[test]
    fn beta_rho_two_thirds_increases_in_z(beta in 0.1..10.0f64, lz in -5.0..20.0f64, d in 1e-3..1.0f64) {
        let t = |l: f64| beta * rho0(beta, l / beta, 2).powf(2.0 / 3.0);
        prop_assert!(t(lz + d) > t(lz));
        let s = LowerSchedule::at_fugacity(1e-4, beta, lz.exp(), 0.01).unwrap();
        prop_assert!(rel(s.rho0, rho0(beta, lz / beta, 2)) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gibbs_is_unique_minimizer(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 0);
        let n = 1 + (seed % 6) as usize;
        let h = random_hermitian(&mut rng, n, 2.0);
        let (gh, _) = gibbs_state(&h).unwrap();
        let g = random_one_body(&mut rng, n);
        let r = lemma7_check(&h, &g).unwrap();
        if hs_norm(&(g.matrix() - gh.matrix())) > 1e-6 {
            prop_assert!(r.gap > 1e-14);
        }
    }

    #[test]
    fn entropy_is_concave(seed in any::<u64>()) {
        let mut rng = instance_rng(seed, 1);
        let n = 1 + (seed % 8) as usize;
        let a = random_density(&mut rng, n, 1 + (seed % 3) as usize);
        let b = random_density(&mut rng, n, n);
        let mix = DensityMatrix::new((a.matrix() + b.matrix()).scale(0.5)).unwrap();
        prop_assert!(vn_entropy(&mix) >= 0.5 * (vn_entropy(&a) + vn_entropy(&b)) - 1e-10);
    }

    #[test]
    fn vanishing_gap_forces_trace_norm_convergence(seed in any::<u64>()) {
        // γ_t = γ_h + t(γ − γ_h) as t → 0
        let mut rng = instance_rng(seed, 2);
        let n = 1 + (seed % 5) as usize;
        let h = random_hermitian(&mut rng, n, 1.0);
        let (gh, _) = gibbs_state(&h).unwrap();
        let g = random_one_body(&mut rng, n);
        let mut last = f64::INFINITY;
        for k in 1..8 {
            let t = 10f64.powi(-k);
            let m = gh.matrix() + (g.matrix() - gh.matrix()).scale(t);
            let m = spectral_map(&m, |x| x.clamp(0.0, 1.0));
            let gt = OneBodyDM::new(m).unwrap();
            let r = lemma7_check(&h, &gt).unwrap();
            prop_assert!(r.pass);
            let d = gt.matrix() - gh.matrix();
            let tr = d.trace().re.abs();
            // both controlled by the gap
            prop_assert!(hs_norm(&d) <= (r.gap.max(0.0) / 2.0).sqrt() + 1e-7);
            prop_assert!(tr <= (2.0 * r.gap.max(0.0) * (tr + gh.matrix().trace().re)).sqrt() + 1e-7);
            prop_assert!(hs_norm(&d) <= last + 1e-15);
            last = hs_norm(&d);
        }
        prop_assert!(last < 1e-6);
    }
}

#[test]
fn hard_core_limit_is_monotone() {
    let mut prev = 0.0;
    for lambda in [1.0, 10.0, 100.0, 1000.0] {
        let a = scattering_length(&RadialPotential::square(1.0, lambda).unwrap()).unwrap().a;
        assert!(a > prev && a < 1.0, "λ = {lambda}: a = {a}");
        prev = a;
    }
}

#[test]
fn dirichlet_pressure_grows_with_side() {
    let mut prev = 0.0;
    let full = p0(1.0, 0.0, 2);
    for ell in [5.0, 10.0, 20.0, 40.0, 80.0] {
        let p = box_pressure(1.0, 0.0, &BoxSpec::new(ell, Boundary::Dirichlet).unwrap()).unwrap();
        assert!(p > prev && p < full);
        prev = p;
    }
}

#[test]
fn boundary_conditions_agree_in_large_boxes() {
    let rho = rho0(1.0, 0.0, 2);
    let ell = 50.0 / rho.cbrt();
    let d = box_pressure(1.0, 0.0, &BoxSpec::new(ell, Boundary::Dirichlet).unwrap()).unwrap();
    let p = box_pressure(1.0, 0.0, &BoxSpec::new(ell, Boundary::Periodic).unwrap()).unwrap();
    assert!(rel(d, p) < 0.05);
}

#[test]
fn soft_potential_is_radial_and_positive() {
    let p = soft_potential_profile(1.0, 0.25, 0.0).unwrap();
    for i in 0..200 {
        let r = i as f64 * 0.05;
        assert!(p.w(r) >= 0.0);
    }
    assert!(p.w_l1.is_finite() && p.w_l1 > 0.0);
}

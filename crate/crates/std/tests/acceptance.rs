//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so every line is
//! printed.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use dilute_core::dilute_eos::{free_energy_dilute, EosOptions};
use dilute_core::error_budget::{fit_loglog, lower_budget, soft_potential_profile, upper_budget, LowerSchedule, UpperSchedule};
use dilute_core::finite_box::{curvature_suite, delta_p0_suite, lemma4_suite, two_body_shift, LatticeTwoBody};
use dilute_core::ideal_gas::{density_ideal, pressure_ideal, ThermoPoint};
use dilute_core::matrix_lab::{klein_scan, lemma2_suite, lemma7_suite, refined_subadditivity_suite, trace_norm_chain_suite};
use dilute_core::scattering::{scattering_length, scattering_length_ode, RadialPotential, Segment};
use dilute_core::suite::{instance_rng, SuiteReport};
use rand::Rng;

type Outcome = Result<(bool, String), String>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn core<T>(r: dilute_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn suite_line(r: &SuiteReport) -> String {
    format!("{} {}/{} failed, worst slack {:.3e}", r.check, r.failures, r.instances, r.worst_slack)
}

// Alternating-series oracle for f_s(z) = −Li_s(−z); at z = 1 the Dirichlet
// eta function (1 − 2^{1−s})ζ(s) with frozen zeta values.
const ZETA_5_2: f64 = 1.341_487_257_250_917_2;
const ZETA_3_2: f64 = 2.612_375_348_685_488_3;

fn fd_oracle(s: f64, z: f64) -> f64 {
    if z == 1.0 {
        let zeta = if s == 2.5 { ZETA_5_2 } else { ZETA_3_2 };
        return (1.0 - 2f64.powf(1.0 - s)) * zeta;
    }
    assert!(z < 1.0);
    let mut sum = 0.0;
    for k in (1..=400).rev() {
        let term = z.powi(k) / (k as f64).powf(s);
        sum += if k % 2 == 1 { term } else { -term };
    }
    sum
}

fn c1_ideal_gas() -> Outcome {
    let mut worst: f64 = 0.0;
    for z in [0.1, 0.5, 1.0] {
        for beta in [0.5, 1.0, 2.0] {
            for q in [1u32, 2, 4] {
                let pt = core(ThermoPoint::from_fugacity(beta, z, q))?;
                let lam3 = (4.0 * PI * beta).powf(1.5);
                let p = q as f64 * fd_oracle(2.5, z) / (beta * lam3);
                let rho = q as f64 * fd_oracle(1.5, z) / lam3;
                worst = worst
                    .max(rel(core(pressure_ideal(&pt))?, p))
                    .max(rel(core(density_ideal(&pt))?, rho));
            }
        }
    }
    Ok((worst <= 1e-10, format!("max rel deviation {worst:.2e} over 27 points")))
}

fn c2_derivative() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let ln_z = 0.1f64.ln() + i as f64 / 19.0 * (100f64.ln() - 0.1f64.ln());
        let h = 1e-4;
        let p = |mu: f64| core(ThermoPoint::new(1.0, mu, 2).and_then(|pt| pressure_ideal(&pt)));
        let slope = (p(ln_z + h)? - p(ln_z - h)?) / (2.0 * h);
        let rho = core(ThermoPoint::new(1.0, ln_z, 2).and_then(|pt| density_ideal(&pt)))?;
        worst = worst.max(rel(slope, rho));
    }
    Ok((worst <= 1e-6, format!("max rel |dP/dmu - rho| {worst:.2e}")))
}

fn c3_zero_temperature() -> Outcome {
    let opts = EosOptions::default();
    let target = 0.6 * (3.0 * PI * PI).powf(2.0 / 3.0);
    let free = core(free_energy_dilute(200.0, 1.0, 0.0, 2, &opts))?;
    let f0 = free.f0.ok_or("f0 missing")?;
    let a = 0.01;
    let inter = core(free_energy_dilute(200.0, 1.0, a, 2, &opts))?;
    let shift = inter.f.ok_or("f missing")? - inter.f0.ok_or("f0 missing")?;
    let dev = rel(f0, target);
    let shift_dev = rel(shift, 2.0 * PI * a);
    Ok((
        dev <= 5e-3 && shift_dev <= 1e-12,
        format!("f0 = {f0:.6} vs {target:.6} (rel {dev:.2e}); shift rel error {shift_dev:.1e}"),
    ))
}

fn c4_scattering() -> Outcome {
    let mut hard: f64 = 0.0;
    for rc in [0.5, 1.0, 2.5] {
        let r = core(scattering_length(&core(RadialPotential::hard_core(rc))?))?;
        hard = hard.max((r.a - rc).abs());
    }
    let (mut exact, mut ode): (f64, f64) = (0.0, 0.0);
    for (v, r0) in [(2.0, 1.0), (0.5, 1.0), (10.0, 0.3), (100.0, 2.0), (1e-3, 1.0)] {
        let kappa = f64::sqrt(0.5 * v);
        let analytic = r0 - (kappa * r0).tanh() / kappa;
        let pot = core(RadialPotential::square(r0, v))?;
        exact = exact.max(rel(core(scattering_length(&pot))?.a, analytic));
        ode = ode.max(rel(core(scattering_length_ode(&pot))?.a, analytic));
    }
    let mut violations = 0;
    for i in 0..200u64 {
        let mut rng = instance_rng(4, i);
        let rc = if rng.random_bool(0.3) { rng.random_range(0.0..0.5) } else { 0.0 };
        let k = rng.random_range(1..=5usize);
        let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.random_range(rc..rc + 2.0)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut edges = vec![rc];
        edges.extend(cuts);
        edges.push(rc + 2.0);
        edges.dedup();
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        for w in edges.windows(2) {
            let v = rng.random_range(0.0..10.0);
            lo.push(Segment::constant(w[0], w[1], v));
            hi.push(Segment::constant(w[0], w[1], v + rng.random_range(0.01..5.0)));
        }
        let a_lo = core(scattering_length(&core(RadialPotential::new(rc, rc + 2.0, lo))?))?.a;
        let a_hi = core(scattering_length(&core(RadialPotential::new(rc, rc + 2.0, hi))?))?.a;
        if a_lo > a_hi {
            violations += 1;
        }
    }
    Ok((
        hard <= 1e-12 && exact <= 1e-10 && ode <= 1e-6 && violations == 0,
        format!("hard core {hard:.1e}, exact rel {exact:.1e}, ode rel {ode:.1e}, monotonicity violations {violations}/200"),
    ))
}

fn suites(reports: &[SuiteReport]) -> Outcome {
    let pass = reports.iter().all(|r| r.failures == 0);
    Ok((pass, reports.iter().map(suite_line).collect::<Vec<_>>().join("; ")))
}

fn c5_lemma4() -> Outcome {
    suites(&[core(lemma4_suite(0, 1000))?])
}

fn c6_lemma7() -> Outcome {
    suites(&[core(lemma7_suite(0, 2000))?, core(klein_scan(0, 100_000))?])
}

fn c7_lemma2() -> Outcome {
    suites(&[core(lemma2_suite(0, 500))?])
}

fn c8_chain() -> Outcome {
    suites(&[core(trace_norm_chain_suite(0, 500))?])
}

fn c9_refined() -> Outcome {
    suites(&[core(refined_subadditivity_suite(0, 500))?])
}

fn c10_curvature_delta_p0() -> Outcome {
    let curv = core(curvature_suite(100, None))?;
    let (stated, corrected) = core(delta_p0_suite(10, None))?;
    let pass = curv.failures == 0 && stated.failures == 0;
    Ok((
        pass,
        format!(
            "{}; {}; (with constant 4/pi^2: {})",
            suite_line(&curv),
            suite_line(&stated),
            suite_line(&corrected)
        ),
    ))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + i as f64 / (n - 1) as f64 * (hi.ln() - lo.ln())).exp()).collect()
}

fn c11_budget() -> Outcome {
    let (beta, z) = (1.0, 1.0);
    let rho0 = core(density_ideal(&core(ThermoPoint::from_fugacity(beta, z, 2))?))?;
    let mut a_over_r = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for x in log_grid(1e-4, 1e-2, 9) {
        let rep = core(lower_budget(&core(LowerSchedule::at_fugacity(x / rho0.cbrt(), beta, z, 0.01))?, z))?;
        let t = rep.terms.iter().find(|t| t.name == "a_over_r").ok_or("a_over_r missing")?;
        a_over_r.push((rep.x, t.value));
        worst_ratio = worst_ratio.max(rep.ratio);
    }
    let lower_dev = (fit_loglog(&a_over_r) - 1.0 / 27.0).abs();

    let nu = 0.005;
    let expected = [
        ("two_pi_delta", 12.0 / 11.0),
        ("two_pi_epsilon", 1.0 / 33.0),
        ("two_pi_kappa", 1.0 / 33.0 - nu),
        ("r2_over_eps_s2", 1.0 / 33.0),
        ("unit_bracket", 1.0 / 6.0 - nu),
        ("max_bracket", 1.0 / 33.0 - nu),
    ];
    let reps: Vec<_> = log_grid(1e-7, 1e-3, 9)
        .into_iter()
        .map(|x| core(UpperSchedule::at_point(x / rho0.cbrt(), beta, 0.0, nu, 0.0).and_then(|s| upper_budget(&s))))
        .collect::<Result<_, _>>()?;
    let mut upper_dev: f64 = 0.0;
    for (name, e) in expected {
        let pts: Vec<(f64, f64)> = reps
            .iter()
            .map(|r| r.terms.iter().find(|t| t.name == name).map(|t| (r.x, t.value)))
            .collect::<Option<_>>()
            .ok_or(format!("{name} missing"))?;
        upper_dev = upper_dev.max((fit_loglog(&pts) - e).abs());
    }
    let constants = reps.iter().all(|r| r.constants_as_one);
    Ok((
        lower_dev <= 1e-12 && upper_dev <= 1e-12 && worst_ratio <= 5.0 && constants,
        format!("a/R exponent error {lower_dev:.1e}, upper exponent error {upper_dev:.1e}, max lower total/target {worst_ratio:.3}"),
    ))
}

fn c12_soft_potential() -> Outcome {
    let mut sup = Vec::new();
    let mut l1 = Vec::new();
    let mut u_dev: f64 = 0.0;
    for s in log_grid(1.0, 10.0, 5) {
        let p = core(soft_potential_profile(s, s / 4.0, s / 8.0))?;
        sup.push((s, p.w_sup));
        l1.push((s, p.w_l1));
        u_dev = u_dev.max(rel(p.u_integral, 4.0 * PI));
    }
    let (a, b) = (fit_loglog(&sup), fit_loglog(&l1));
    Ok((
        (a + 3.0).abs() <= 0.3 && b.abs() <= 0.3 && u_dev <= 1e-6,
        format!("slope sup {a:.4}, slope L1 {b:.4}, integral of U rel error {u_dev:.1e}"),
    ))
}

fn c13_two_body() -> Outcome {
    let v = core(RadialPotential::square(1.0, 0.5))?;
    let mut ratios = Vec::new();
    for n in [16, 24, 32] {
        let r = core(two_body_shift(&LatticeTwoBody::new(50.0, n, v.clone())))?;
        ratios.push(r.luscher_ratio.ok_or("no ratio for a nonzero potential")?);
    }
    let last = ratios[2];
    let monotone = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    Ok((
        (0.8..=1.2).contains(&last) && monotone,
        format!("ratios n=16,24,32: {:.4}, {:.4}, {:.4}", ratios[0], ratios[1], ratios[2]),
    ))
}

fn dilute(args: &[&str]) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dilute"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code(), out.stdout))
}

fn c14_cli() -> Outcome {
    let (code1, first) = dilute(&["verify", "--seed", "0", "--no-meta"])?;
    let (code2, second) = dilute(&["verify", "--seed", "0", "--no-meta"])?;
    let identical = first == second && !first.is_empty() && code1 == code2;
    let (ok, _) = dilute(&["verify", "--suite", "lemma7", "--instances", "10", "--no-meta"])?;
    let (forced, _) = dilute(&["verify", "--suite", "lemma7", "--instances", "10", "--no-meta", "--inject-failure"])?;
    Ok((
        identical && ok == Some(0) && forced == Some(1),
        format!(
            "byte-identical: {identical} ({} bytes); clean exit {ok:?}, forced-failure exit {forced:?}",
            first.len()
        ),
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 14] = [
        ("ideal-gas oracle equivalence", 1, c1_ideal_gas),
        ("derivative identity dP0/dmu = rho0", 5, c2_derivative),
        ("zero-temperature limit", 5, c3_zero_temperature),
        ("scattering length", 10, c4_scattering),
        ("finite-box trace sandwich suite", 60, c5_lemma4),
        ("Gibbs-gap suite and Klein scan", 60, c6_lemma7),
        ("mixed-state entropy suite", 30, c7_lemma2),
        ("trace-norm chain", 30, c8_chain),
        ("refined subadditivity", 30, c9_refined),
        ("curvature and Delta P0 bounds", 30, c10_curvature_delta_p0),
        ("budget ledgers", 10, c11_budget),
        ("soft-potential scalings", 120, c12_soft_potential),
        ("two-body coupling", 900, c13_two_body),
        ("CLI determinism and exit codes", 60, c14_cli),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {n:>2} {} {name} ({:.2} s of {limit} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 14 criteria pass");
    } else {
        println!("acceptance: {} of 14 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}

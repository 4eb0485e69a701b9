//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relbell::audit::{audit, VelocityDistribution, Verdict};
use relbell::bell::{
    chsh_value, fig1, fig2, fig3, linspace, scan_beta_phi, ChshSettings, FIG2_DEFAULT_BETAS,
    TSIRELSON,
};
use relbell::dirac::{build_context, kinetic_quantities, random_suite, CheckReport};
use relbell::kinematics::spin_structure_constants;
use relbell::linalg::CMatrix;
use relbell::observables::{eprb_closed_form, eprb_oracle};
use relbell::{BeamVelocity, Direction, Vec3};

// Regression values from an independent 50-digit evaluation of the singlet
// matrix element, standard settings, in-plane beam at φ = π/4.
const CHSH_B0999_PHI_PI4: f64 = -2.0873351057695595;
const CHSH_B099_PHI_PI4: f64 = -2.2597608606534412;
// Largest |c| over φ at β = 0.999, attained at φ = π/4 + kπ/2.
const MAX_ABS_CHSH_B0999: f64 = 2.0873351057695595;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn unit(rng: &mut ChaCha8Rng) -> Direction {
    let z: f64 = rng.gen_range(-1.0..1.0);
    Direction::from_spherical(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn beam(rng: &mut ChaCha8Rng, max: f64) -> BeamVelocity {
    let mag = rng.gen_range(0.0..=max);
    BeamVelocity::along(unit(rng), mag).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn oracle_equivalence() -> Outcome {
    let (worst, elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let (a, b) = (unit(&mut rng), unit(&mut rng));
            let beta = beam(&mut rng, 0.999);
            let d = eprb_closed_form(&a, &b, &beta).unwrap() - eprb_oracle(&a, &b, &beta).unwrap();
            worst = worst.max(d.abs());
        }
        worst
    });
    outcome(
        worst < 1e-12 && elapsed < Duration::from_secs(5),
        format!("10000 samples, max |closed - oracle| = {worst:.3e}, {elapsed:.2?}"),
    )
}

fn orthogonal_settings_curve() -> Outcome {
    let a = Direction::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
    let b = Direction::new(-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
    let grid = linspace(0.0, 1.0, 1001);
    let mut worst = 0.0f64;
    let mut ends = [f64::NAN; 2];
    for (i, &mag) in grid.iter().enumerate() {
        let beta = BeamVelocity::along(Direction::z(), mag).unwrap();
        let e = eprb_closed_form(&a, &b, &beta).unwrap();
        worst = worst.max((e + mag * mag / (2.0 - mag * mag)).abs());
        if i == 0 {
            ends[0] = e;
        }
        if i == grid.len() - 1 {
            ends[1] = e;
        }
    }
    outcome(
        worst < 1e-12 && ends[0].abs() < 1e-12 && (ends[1] + 1.0).abs() < 1e-12,
        format!("1001 points, max deviation {worst:.3e}, E(0) = {}, E(1) = {}", ends[0], ends[1]),
    )
}

fn proper_time_ordering() -> Outcome {
    let table = fig1(1001).unwrap();
    let mut violations = 0;
    for i in 0..table.len() {
        let beta = table.coordinates(i)[0];
        let eprb = table.value(i, 0).unwrap().abs();
        let shift = table.value(i, 1).unwrap().abs();
        let ok = if beta > 0.0 && beta < 1.0 { eprb > shift } else { eprb >= shift };
        if !ok {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{} grid points, {violations} violations", table.len()))
}

fn chsh_at_rest() -> Outcome {
    let c = chsh_value(&ChshSettings::standard(), &BeamVelocity::rest()).unwrap();
    outcome((c.abs() - TSIRELSON).abs() < 1e-12, format!("c = {c}"))
}

fn perpendicular_motion() -> Outcome {
    let beta = BeamVelocity::along(Direction::z(), 0.99).unwrap();
    let c = chsh_value(&ChshSettings::standard(), &beta).unwrap();
    outcome((c.abs() - TSIRELSON).abs() < 1e-10, format!("beta = 0.99 z, c = {c}"))
}

fn in_plane_suppression() -> Outcome {
    let s = ChshSettings::standard();
    let table = scan_beta_phi(&s, &[0.999], &linspace(0.0, 2.0 * PI, 3601)).unwrap();
    let grid_max = table
        .column(0)
        .into_iter()
        .map(|c| c.unwrap().abs())
        .fold(0.0, f64::max);
    let at = |mag: f64, phi: f64| chsh_value(&s, &BeamVelocity::in_plane(mag, phi).unwrap()).unwrap();
    let c999 = at(0.999, FRAC_PI_4);
    let c999_half = at(0.999, FRAC_PI_2);
    let c99 = at(0.99, FRAC_PI_4);
    let c0 = chsh_value(&s, &BeamVelocity::rest()).unwrap();
    let below_margin = grid_max < TSIRELSON - 0.5;
    let pass = below_margin
        && grid_max <= MAX_ABS_CHSH_B0999 + 1e-12
        && (c999.abs() - MAX_ABS_CHSH_B0999).abs() < 1e-12
        && (c999_half.abs() - MAX_ABS_CHSH_B0999).abs() < 1e-12
        && (c999 - CHSH_B0999_PHI_PI4).abs() < 1e-12
        && (c99 - CHSH_B099_PHI_PI4).abs() < 1e-12
        && c99.abs() < c0.abs();
    outcome(
        pass,
        format!("max_phi |c(0.999)| = {grid_max}, c(0.99, pi/4) = {c99}, c(0) = {c0}"),
    )
}

fn tsirelson_bound() -> Outcome {
    let ((worst, skipped), elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        let mut skipped = 0;
        for _ in 0..100_000 {
            let s = ChshSettings::new(unit(&mut rng), unit(&mut rng), unit(&mut rng), unit(&mut rng));
            match chsh_value(&s, &beam(&mut rng, 1.0)) {
                Ok(c) => worst = worst.max(c.abs()),
                Err(_) => skipped += 1,
            }
        }
        (worst, skipped)
    });
    outcome(
        worst <= TSIRELSON + 1e-9 && elapsed < Duration::from_secs(30),
        format!("100000 samples ({skipped} degenerate), max |c| = {worst}, {elapsed:.2?}"),
    )
}

fn dirac_suite() -> Outcome {
    let (reports, elapsed) = timed(|| random_suite(100, 11).unwrap());
    let required = [
        "spin_spectrum",
        "spin_commutes_with_h",
        "spin_projector_form",
        "spin_explicit_form",
        "casimir",
        "eigenstate_energy",
        "eigenstate_spin",
        "precession",
        "hamiltonian_identity_plus",
        "hamiltonian_identity_minus",
    ];
    let find = |name: &str| reports.iter().find(|r| r.check == name);
    let missing: Vec<&str> = required.iter().copied().filter(|n| find(n).is_none()).collect();
    let failed: Vec<&CheckReport> = required.iter().filter_map(|n| find(n)).filter(|r| !r.pass).collect();
    let worst = required
        .iter()
        .filter_map(|n| find(n))
        .map(|r| format!("{} {:.1e}", r.check, r.max_residual))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        missing.is_empty() && failed.is_empty() && elapsed < Duration::from_secs(10),
        format!("100 trials, {elapsed:.2?}; {worst}"),
    )
}

fn contraction() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (mag, c123) in [(0.0, 1.0), (0.8, 0.36), (1.0, 0.0)] {
        let beta = BeamVelocity::along(Direction::new(0.6, 0.0, 0.8).unwrap(), mag).unwrap();
        let sc = spin_structure_constants(&beta);
        let mut worst = 0.0f64;
        for k in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    let expect = levi_civita(k, l, m) * if m == 2 { c123 } else { 1.0 };
                    worst = worst.max((sc.constants[k][l][m] - expect).abs());
                }
            }
        }
        let residual = sc.recontraction_residual();
        pass &= worst < 1e-12 && residual < 1e-12;
        details.push(format!("beta {mag}: c123 = {}, recontraction {residual:.1e}", sc.constants[0][1][2]));
    }
    outcome(pass, details.join("; "))
}

fn levi_civita(k: usize, l: usize, m: usize) -> f64 {
    match (k, l, m) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn kinetic_chain() -> Outcome {
    let mut worst = 0.0f64;
    let mut freq_err = 0.0f64;
    for lambda in [0.5, 1.0, 1.5] {
        for p_mag in [0.5, 1.0, 2.0] {
            let k = kinetic_quantities(lambda, p_mag).unwrap();
            worst = worst.max((k.moment_of_inertia - k.kinetic_mass * k.radius * k.radius).abs());
            if lambda == 0.5 {
                let ops = build_context(Vec3::new(0.0, 0.0, p_mag), 0.0).unwrap();
                let w2 = ops
                    .omega
                    .iter()
                    .fold(CMatrix::zeros(4), |acc, o| &acc + &(o * o));
                let dirac = w2.get(0, 0).re.sqrt();
                freq_err = freq_err
                    .max((k.angular_velocity - 2.0 * p_mag).abs())
                    .max((dirac - k.angular_velocity).abs());
            }
        }
    }
    outcome(
        worst < 1e-14 && freq_err < 1e-14,
        format!("max |I - m r^2| = {worst:.1e}, max frequency mismatch = {freq_err:.1e}"),
    )
}

fn crypto_audit() -> Outcome {
    let s = ChshSettings::standard();
    let rest = audit(&VelocityDistribution::delta(BeamVelocity::rest()), &s, 2.7).unwrap();
    let fast_beta = BeamVelocity::along(Direction::x(), 0.99).unwrap();
    let fast = audit(&VelocityDistribution::delta(fast_beta), &s, 2.7).unwrap();
    outcome(
        (rest.expected_chsh.abs() - TSIRELSON).abs() < 1e-12
            && rest.verdict == Verdict::NoAlarm
            && fast.verdict == Verdict::FalseAlarmRisk,
        format!(
            "rest {} {:?}, 0.99 x {} {:?}",
            rest.expected_chsh, rest.verdict, fast.expected_chsh, fast.verdict
        ),
    )
}

fn csv_determinism() -> Outcome {
    let s = ChshSettings::standard();
    let render = || {
        [
            fig1(1001).unwrap().to_csv_string(),
            fig2(&s, 91, &FIG2_DEFAULT_BETAS).unwrap().to_csv_string(),
            fig3(&s, 201).unwrap().to_csv_string(),
        ]
    };
    let first = render();
    let second = render();
    let bytes: usize = first.iter().map(String::len).sum();
    outcome(first == second, format!("fig1/fig2/fig3, {bytes} bytes each run"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("orthogonal-settings correlation curve", orthogonal_settings_curve),
        ("proper-time ordering", proper_time_ordering),
        ("CHSH at rest", chsh_at_rest),
        ("perpendicular-motion invariance", perpendicular_motion),
        ("in-plane suppression", in_plane_suppression),
        ("Tsirelson bound", tsirelson_bound),
        ("Dirac suite", dirac_suite),
        ("contraction", contraction),
        ("kinetic-quantity chain", kinetic_chain),
        ("crypto audit", crypto_audit),
        ("CSV determinism", csv_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failures += 1;
        }
        println!("{tag} [{:>2}] {name}: {}", i + 1, result.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

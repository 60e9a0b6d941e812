//! Acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use casimir_core::asymptotics::{validate_asymptotics, zero_temperature_entropy, AsymptoticModel};
use casimir_core::lifshitz::brute_force_free_energy;
use casimir_core::materials::{presets, zero_mode_coefficients};
use casimir_core::quantities::{kelvin, ZETA3};
use casimir_core::thermo::{classify_monotonicity, nernst_limit, temperature_grid};
use casimir_core::{
    entropy, free_energy, Geometry, ImpedanceModel, MaterialResponse, Monotonicity,
};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn zero_mode_algebra() -> Check {
    let wp = presets::gold_plasma_frequency();
    let drude = presets::gold_drude();
    let power =
        MaterialResponse::impedance(ImpedanceModel::power_law(1e-3, 2.0 / 3.0).map_err(err)?);
    let ir = presets::gold_impedance_ir();
    for q in [1e3, 1e6, wp, 3.0 * wp, 1e9] {
        let (_, b) = zero_mode_coefficients(q, &drude).map_err(err)?;
        if b != 0.0 {
            return Err(format!("Drude B0({q:e}) = {b:e}"));
        }
        let (_, b) = zero_mode_coefficients(q, &power).map_err(err)?;
        if b != 1.0 {
            return Err(format!("power-law B0({q:e}) = {b}"));
        }
        let (_, b) = zero_mode_coefficients(q, &ir).map_err(err)?;
        let expected = ((wp - q) / (wp + q)).powi(2);
        if (b - expected).abs() > 4.0 * f64::EPSILON * expected.max(f64::MIN_POSITIVE) {
            return Err(format!("infrared B0({q:e}) = {b:e}, expected {expected:e}"));
        }
    }
    Ok("Drude 0, power law 1, infrared ((wp-q)/(wp+q))^2 at 5 wave numbers".into())
}

fn ideal_metal_limits() -> Check {
    let geom = Geometry::from_micrometres(1.0).map_err(err)?;
    let ideal = MaterialResponse::ideal_metal();
    let a = geom.separation();
    let teff = geom.effective_temperature();
    // F = F0 + c3 T³ + c4 T⁴ through three low temperatures
    let ts: Vec<f64> = [100.0, 200.0, 400.0].iter().map(|d| teff / d).collect();
    let fs = ts
        .iter()
        .map(|&t| free_energy(&geom, t, &ideal, 1e-12).map(|r| r.free_energy))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let f0 = solve_static(&ts, &fs);
    let exact0 = -PI * PI / (720.0 * a.powi(3));
    let rel0 = ((f0 - exact0) / exact0).abs();

    let t = 20.0 * teff;
    let high = free_energy(&geom, t, &ideal, 1e-12)
        .map_err(err)?
        .free_energy;
    let classical = -ZETA3 * t / (8.0 * PI * a * a);
    let rel_hi = ((high - classical) / classical).abs();
    ensure(
        rel0 < 1e-4 && rel_hi < 1e-4,
        format!("T->0 rel {rel0:.2e}, T = 20 T_eff rel {rel_hi:.2e}"),
    )
}

/// Constant term of F0 + c3·T³ + c4·T⁴ through three points.
fn solve_static(ts: &[f64], fs: &[f64]) -> f64 {
    let scale = ts[0];
    let rows: Vec<[f64; 4]> = ts
        .iter()
        .zip(fs)
        .map(|(&t, &f)| {
            let u = t / scale;
            [1.0, u.powi(3), u.powi(4), f]
        })
        .collect();
    // Cramer's rule on the 3×3 system
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = [
        [rows[0][0], rows[0][1], rows[0][2]],
        [rows[1][0], rows[1][1], rows[1][2]],
        [rows[2][0], rows[2][1], rows[2][2]],
    ];
    let mut a0 = a;
    for i in 0..3 {
        a0[i][0] = rows[i][3];
    }
    det(a0) / det(a)
}

fn drude_halving() -> Check {
    let geom = Geometry::from_micrometres(1.0).map_err(err)?;
    let t = 20.0 * geom.effective_temperature();
    let d = free_energy(&geom, t, &presets::gold_drude(), 1e-10)
        .map_err(err)?
        .free_energy;
    let i = free_energy(&geom, t, &MaterialResponse::ideal_metal(), 1e-10)
        .map_err(err)?
        .free_energy;
    let ratio = d / i;
    ensure(
        (ratio - 0.5).abs() <= 0.005,
        format!("F_drude/F_ideal = {ratio:.5}"),
    )
}

fn oracle_equivalence() -> Check {
    let mut worst: f64 = 0.0;
    let materials = [
        ("drude", presets::gold_drude()),
        ("ideal", MaterialResponse::ideal_metal()),
        ("eps7", presets::mica()),
    ];
    for (name, m) in &materials {
        for a_um in [0.5, 1.0, 2.0] {
            for tk in [100.0, 300.0, 600.0] {
                let geom = Geometry::from_micrometres(a_um).map_err(err)?;
                let fast = free_energy(&geom, kelvin(tk), m, 1e-10)
                    .map_err(err)?
                    .free_energy;
                let slow = brute_force_free_energy(&geom, kelvin(tk), m)
                    .map_err(err)?
                    .free_energy;
                let rel = ((fast - slow) / slow).abs();
                if rel >= 1e-6 {
                    return Err(format!("{name} a = {a_um} um, T = {tk} K: rel {rel:.2e}"));
                }
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("27 points, worst rel {worst:.2e}"))
}

fn asymptotic_cross_check() -> Check {
    let geom = Geometry::from_micrometres(1.0).map_err(err)?;
    let model = AsymptoticModel::Drude(presets::gold_params());
    let temps = [kelvin(10.0), kelvin(20.0), kelvin(40.0)];
    let rows = validate_asymptotics(&geom, &model, &temps, 1e-11).map_err(err)?;
    let diffs: Vec<f64> = rows.iter().map(|c| c.rel_diff).collect();
    let small = diffs.iter().all(|&d| d < 1e-2);
    let decreasing = diffs.windows(2).all(|w| w[1] <= w[0]);
    ensure(
        small && decreasing,
        format!(
            "rel_diff at 10/20/40 K = {:.3e} / {:.3e} / {:.3e}",
            diffs[0], diffs[1], diffs[2]
        ),
    )
}

fn nernst_diagnostics() -> Check {
    let geom = Geometry::from_micrometres(1.0).map_err(err)?;
    let reference = zero_temperature_entropy(&geom, &presets::gold_params()).map_err(err)?;
    let temps: Vec<f64> = [30.0, 20.0, 10.0, 5.0].iter().map(|&t| kelvin(t)).collect();
    let s0 = |m: &MaterialResponse| {
        nernst_limit(&geom, m, &temps, 1e-11).map(|f| f.s0 / reference.abs())
    };
    let drude = s0(&presets::gold_drude()).map_err(err)?;
    let imp = s0(&presets::gold_impedance_ir()).map_err(err)?;
    let plasma = s0(&presets::gold_plasma()).map_err(err)?;
    let ok = drude < 0.0 && (drude + 1.0).abs() <= 0.05 && imp.abs() < 0.05 && plasma.abs() < 0.05;
    ensure(
        ok,
        format!("S0/|S_ref|: drude {drude:.4}, impedance {imp:.2e}, plasma {plasma:.2e}"),
    )
}

fn curve_shapes() -> Check {
    let geom = Geometry::from_micrometres(1.0).map_err(err)?;
    let range = (kelvin(1.0), kelvin(1200.0));
    let classify = |m: &MaterialResponse| {
        classify_monotonicity(&geom, m, range, 60, 1e-9).map(|r| r.classification)
    };
    let imp = classify(&presets::gold_impedance_ir()).map_err(err)?;
    let drude = classify(&presets::gold_drude()).map_err(err)?;
    let mica = classify(&presets::mica()).map_err(err)?;
    let eps100 = classify(&presets::dielectric_eps100()).map_err(err)?;
    let shapes = imp == Monotonicity::MonotoneIncreasingMagnitude
        && drude == Monotonicity::NonMonotonic
        && mica == Monotonicity::MonotoneIncreasingMagnitude
        && eps100 == Monotonicity::NonMonotonic;

    let grid = temperature_grid(range.0, range.1, 60).map_err(err)?;
    let mut drude_negative = 0;
    let mut imp_violations = 0;
    for &t in &grid {
        let d = entropy(&geom, t, &presets::gold_drude(), 1e-12).map_err(err)?;
        if d.entropy + d.abs_error() < 0.0 {
            drude_negative += 1;
        }
        let s = entropy(&geom, t, &presets::gold_impedance_ir(), 1e-12).map_err(err)?;
        if s.entropy < -s.abs_error() {
            imp_violations += 1;
        }
    }
    ensure(
        shapes && drude_negative > 0 && imp_violations == 0,
        format!(
            "impedance {imp:?}, drude {drude:?}, eps7 {mica:?}, eps100 {eps100:?}; \
             drude S < 0 at {drude_negative}/60, impedance S < -err at {imp_violations}/60"
        ),
    )
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let run = |name: &str, threads: Option<&str>, quantity: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(format!("{name}.csv"));
        let cfg = dir.path().join(format!("{name}.json"));
        std::fs::write(
            &cfg,
            format!(
                r#"{{"material": "gold-paper-drude", "a_um": 1.0, "t_range": {{"min_k": 1, "max_k": 1200, "n": 60}},
                   "quantity": "{quantity}", "rel_tol": 1e-3, "output_path": "{}"}}"#,
                out.display()
            ),
        )
        .map_err(err)?;
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_casimir"));
        cmd.args(["sweep-t", "--config", cfg.to_str().unwrap()]);
        if let Some(n) = threads {
            cmd.env("CASIMIR_THREADS", n);
        }
        let o = cmd.output().map_err(err)?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        std::fs::read(&out).map_err(err)
    };
    let mut identical = true;
    for quantity in ["pressure", "entropy"] {
        let first = run(&format!("{quantity}-a"), None, quantity)?;
        let second = run(&format!("{quantity}-b"), None, quantity)?;
        let single = run(&format!("{quantity}-c"), Some("1"), quantity)?;
        let quad = run(&format!("{quantity}-d"), Some("4"), quantity)?;
        identical &= first == second && first == single && first == quad;
    }
    ensure(
        identical,
        "pressure and entropy sweeps, 4 runs each incl. 1 and 4 threads".into(),
    )
}

type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 zero-mode algebra",
            Duration::from_secs(1),
            zero_mode_algebra,
        ),
        (
            "2 ideal-metal limits",
            Duration::from_secs(10),
            ideal_metal_limits,
        ),
        (
            "3 Drude classical halving",
            Duration::from_secs(30),
            drude_halving,
        ),
        (
            "4 oracle equivalence",
            Duration::from_secs(300),
            oracle_equivalence,
        ),
        (
            "5 asymptotic cross-check",
            Duration::from_secs(120),
            asymptotic_cross_check,
        ),
        (
            "6 Nernst diagnostics",
            Duration::from_secs(300),
            nernst_diagnostics,
        ),
        ("7 curve shapes", Duration::from_secs(600), curve_shapes),
        ("8 determinism", Duration::from_secs(60), determinism),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= budget, d),
            Err(d) => (false, d),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.2} s, budget {} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

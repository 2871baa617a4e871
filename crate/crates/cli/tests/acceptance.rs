//! End-to-end acceptance criteria; prints one PASS/FAIL line per criterion.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use dde_resolvent::history::{trace_at_tau, transport_resolvent_apply, HistorySegment};
use dde_resolvent::io::read_csv;
use dde_resolvent::oracle::{oo_residual, oo_solution, OhiraParams};
use dde_resolvent::scalar::{Coefficient, ScalarDelayProblem, ScalarHistory};
use dde_resolvent::stability::{
    build_discrete_propagators, build_time_ordered_propagators, defect_norm, verify_abel,
    verify_telescoping,
};

const AUTO_TABLE: [(f64, f64); 9] = [
    (2.9988e-1, 2.9988e-1),
    (1.1726e-1, 1.1726e-1),
    (-1.7249e-2, -1.7249e-2),
    (6.1128e-3, 6.1127e-3),
    (3.0588e-4, 3.0587e-4),
    (1.4879e-5, 1.4878e-5),
    (4.6214e-6, 4.6212e-6),
    (-9.8773e-7, -9.8767e-7),
    (-2.1399e-7, -2.1382e-7),
];

const NONAUTO_TABLE: [(f64, f64); 9] = [
    (2.9988e-1, 2.9988e-1),
    (1.2276e-1, 1.2276e-1),
    (-1.8814e-2, -1.8814e-2),
    (5.6897e-3, 5.6898e-3),
    (3.9143e-4, 3.9141e-4),
    (2.0877e-5, 2.0878e-5),
    (6.3167e-6, 6.3166e-6),
    (-1.4738e-6, -1.4738e-6),
    (-3.9015e-7, -3.8738e-7),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn cli(dir: &Path, name: &str, args: &str) -> Result<std::path::PathBuf, String> {
    let out = dir.join(name);
    let mut argv: Vec<String> = vec!["dde-lab".into()];
    argv.extend(args.split_whitespace().map(str::to_string));
    argv.push("--output".into());
    argv.push(out.display().to_string());
    match dde_lab::main_with_args(argv) {
        0 => Ok(out),
        code => Err(format!("`dde-lab {args}` exited with {code}")),
    }
}

fn json_file(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("missing {key}"))
}

fn stability_json(dir: &Path) -> Result<Value, String> {
    let path = cli(
        dir,
        "stability.json",
        "stability --a -0.15 --b -6.0 --tau -0.257 --h 0.001 --N 200000 --profile-stride 20000",
    )?;
    json_file(&path)
}

fn criterion_1(dir: &Path) -> Result<Outcome, String> {
    let start = Instant::now();
    let v = json_file(&cli(
        dir,
        "radius.json",
        "stability --a -0.15 --b -6.0 --tau -0.257 --h 0.001 --N 1",
    )?)?;
    let elapsed = start.elapsed();
    let rho = num(&v, "spectral_radius")?;
    let m = v["parameters"]["m"].as_u64().unwrap_or(0);
    let pass = (rho - 0.9999108137).abs() <= 1e-8 && m == 257 && elapsed < Duration::from_secs(1);
    Ok(outcome(
        pass,
        format!("rho = {rho:.13}, m = {m}, {:.3} s", elapsed.as_secs_f64()),
    ))
}

fn criterion_2(dir: &Path) -> Result<Outcome, String> {
    let start = Instant::now();
    let v = stability_json(dir)?;
    let elapsed = start.elapsed();
    let s = num(&v, "summability_last")?;
    let gap = num(&v, "inverse_gap")?;
    let pass = (9.0e3..=1.3e4).contains(&s) && elapsed < Duration::from_secs(30);
    Ok(outcome(
        pass,
        format!(
            "S_N = {s:.2} (required [9000, 13000]); 1/(1-rho) = {gap:.1}; {:.3} s",
            elapsed.as_secs_f64()
        ),
    ))
}

fn centers(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let f = std::fs::File::open(path).map_err(|e| e.to_string())?;
    let table = read_csv(f).map_err(|e| e.to_string())?;
    let t = table.column("t").ok_or("no t column")?;
    let c = table.column("center").ok_or("no center column")?;
    Ok((t, c))
}

fn center_at(t: &[f64], c: &[f64], at: f64) -> Option<f64> {
    t.iter().position(|&x| (x - at).abs() < 1e-9).map(|i| c[i])
}

fn tol(v: f64) -> f64 {
    (1e-2 * v.abs()).max(5e-6)
}

fn pde_table(
    dir: &Path,
    preset: &str,
    table: &[(f64, f64); 9],
    budget: Duration,
) -> Result<Outcome, String> {
    let start = Instant::now();
    let ie = cli(
        dir,
        &format!("{preset}-ie.csv"),
        &format!("pde --preset {preset} --scheme ie"),
    )?;
    let lt = cli(
        dir,
        &format!("{preset}-lt.csv"),
        &format!("pde --preset {preset} --scheme lt"),
    )?;
    let elapsed = start.elapsed();
    let (ti, ci) = centers(&ie)?;
    let (tl, cl) = centers(&lt)?;
    let mut mismatches = 0;
    let mut worst = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (k, &(want_ie, want_lt)) in table.iter().enumerate() {
        let t = k as f64;
        let got_ie = center_at(&ti, &ci, t).ok_or(format!("no IE sample at t = {t}"))?;
        let got_lt = center_at(&tl, &cl, t).ok_or(format!("no LT sample at t = {t}"))?;
        for (got, want) in [(got_ie, want_ie), (got_lt, want_lt)] {
            let dev = (got - want).abs() / tol(want);
            if dev > 1.0 {
                mismatches += 1;
            }
            if dev > worst.0 {
                worst = (dev, t, got, want);
            }
        }
    }
    let window: Vec<usize> = (0..ti.len()).filter(|&i| ti[i] <= 7.0 + 1e-9).collect();
    let max_center = window.iter().map(|&i| ci[i].abs()).fold(0.0, f64::max);
    let max_diff = window
        .iter()
        .map(|&i| (ci[i] - cl[i]).abs())
        .fold(0.0, f64::max);
    let agree = max_diff <= 1e-3 * max_center;
    let pass = mismatches == 0 && agree && elapsed < budget;
    Ok(outcome(
        pass,
        format!(
            "{mismatches}/18 table entries outside tolerance (worst at t = {}: {:.5e} vs {:.5e}); max|IE-LT| / max|center| = {:.2e}; {:.2} s",
            worst.1,
            worst.2,
            worst.3,
            max_diff / max_center,
            elapsed.as_secs_f64()
        ),
    ))
}

fn criterion_5(dir: &Path) -> Result<Outcome, String> {
    let auto = json_file(&cli(
        dir,
        "timing-auto.json",
        "timing --target pde-auto --repetitions 5",
    )?)?;
    let nonauto = json_file(&cli(
        dir,
        "timing-nonauto.json",
        "timing --target pde-nonauto --repetitions 5",
    )?)?;
    let ra = num(&auto, "ratio")?;
    let rn = num(&nonauto, "ratio")?;
    let pass = rn >= 3.0 && (0.3..=3.0).contains(&ra);
    Ok(outcome(
        pass,
        format!(
            "non-autonomous IE/LT = {rn:.2} (required >= 3; IE {:.4} s, LT {:.4} s); autonomous = {ra:.2} (required [0.3, 3])",
            num(&nonauto, "ie")?,
            num(&nonauto, "lt")?
        ),
    ))
}

fn criterion_6(dir: &Path) -> Result<Outcome, String> {
    let v = json_file(&cli(
        dir,
        "growth.json",
        "growth-fit --a -0.15 --b -6.0 --tau -8.0 --history poly10 --scheme ie --h 0.01 --T 200 --t-start 50",
    )?)?;
    let omega = num(&v, "omega")?;
    let re = v["root"]["re"].as_f64().ok_or("missing root")?;
    let near_root = (omega - re).abs() <= 0.005;
    let in_range = (0.022..=0.042).contains(&omega);
    Ok(outcome(
        near_root && in_range,
        format!(
            "omega = {omega:.5}, Re lambda* = {re:.5} (|diff| {:.1e}, {}); omega in [0.022, 0.042]: {}",
            (omega - re).abs(),
            if near_root { "ok" } else { "too far" },
            if in_range { "yes" } else { "no" }
        ),
    ))
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0) / d as f64)
}

fn criterion_7() -> Result<Outcome, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tol = 1e-12;
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut record = |r: dde_resolvent::stability::IdentityResidual| {
        worst = worst.max(r.relative());
        if !r.holds(tol) {
            failures += 1;
        }
    };
    for _ in 0..100 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=30);
        let r = random_matrix(&mut rng, d);
        let p = random_matrix(&mut rng, d);
        record(verify_telescoping(&vec![r; n], &vec![p; n]).map_err(|e| e.to_string())?);
    }
    for _ in 0..100 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=30);
        let rs: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, d)).collect();
        let ps: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, d)).collect();
        record(verify_telescoping(&rs, &ps).map_err(|e| e.to_string())?);
    }
    for _ in 0..100 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=30);
        let t = random_matrix(&mut rng, d);
        let taus: Vec<_> = (0..n)
            .map(|_| DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        record(verify_abel(&t, &taus).map_err(|e| e.to_string())?);
    }
    let mut scheme_cases = 0;
    for m in [1usize, 4, 10] {
        let h = 0.01;
        let tau = -(m as f64) * h;
        let n = 100;
        let auto = ScalarDelayProblem::new(
            Coefficient::Constant(-0.15),
            -6.0,
            tau,
            ScalarHistory::poly10(),
        )
        .map_err(|e| e.to_string())?;
        let props = build_discrete_propagators(&auto, h).map_err(|e| e.to_string())?;
        record(
            verify_telescoping(&vec![props.r.clone(); n], &vec![props.p.clone(); n])
                .map_err(|e| e.to_string())?,
        );
        let taus: Vec<_> = (0..n)
            .map(|_| DVector::from_fn(m + 1, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        record(verify_abel(&props.p, &taus).map_err(|e| e.to_string())?);
        let nonauto = ScalarDelayProblem::new(
            Coefficient::LinearInTime(-0.15),
            -6.0,
            tau,
            ScalarHistory::poly10(),
        )
        .map_err(|e| e.to_string())?;
        let ordered = build_time_ordered_propagators(&nonauto, h, n).map_err(|e| e.to_string())?;
        let rs: Vec<_> = ordered.iter().map(|p| p.r.clone()).collect();
        let ps: Vec<_> = ordered.iter().map(|p| p.p.clone()).collect();
        record(verify_telescoping(&rs, &ps).map_err(|e| e.to_string())?);
        scheme_cases += 3;
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        failures == 0 && elapsed < Duration::from_secs(5),
        format!(
            "{failures} of {} identities above 1e-12 * scale; worst relative residual {worst:.2e}; {:.3} s",
            300 + scheme_cases,
            elapsed.as_secs_f64()
        ),
    ))
}

fn criterion_8() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut tightest = 0.0f64;
    for _ in 0..1000 {
        let f = rng.gen_range(-10.0..10.0);
        let h = 10f64.powf(rng.gen_range(-3.0..0.5));
        let tau = -rng.gen_range(0.05..3.0);
        let intervals = rng.gen_range(16..=400);
        let modes: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(0.0..20.0),
                    rng.gen_range(0.0..6.3),
                )
            })
            .collect();
        let g = HistorySegment::sample(
            |s| {
                modes
                    .iter()
                    .map(|&(amp, k, phase)| amp * (k * s + phase).sin())
                    .sum()
            },
            tau,
            intervals,
        )
        .map_err(|e| e.to_string())?;
        let rho = transport_resolvent_apply(f, &g, h).map_err(|e| e.to_string())?;
        let lhs = trace_at_tau(&rho).abs();
        let bound = f.abs() + g.l2_norm() / (2.0 * h).sqrt();
        if lhs > bound {
            violations += 1;
        }
        tightest = tightest.max(lhs / bound);
    }
    Ok(outcome(
        violations == 0,
        format!(
            "{violations} violations in 1000 triples; largest |rho(tau)| / bound = {tightest:.4}"
        ),
    ))
}

fn criterion_9(dir: &Path) -> Result<Outcome, String> {
    let v = json_file(&cli(
        dir,
        "convergence.json",
        "convergence --a -0.15 --b -6.0 --tau -8.0 --history poly10 --pair ie-lt --h-list 0.1,0.05,0.025,0.0125 --T 20",
    )?)?;
    let slope = num(&v, "slope")?;
    let mut scaled = Vec::new();
    for h in [0.01, 0.005, 0.0025] {
        let p = ScalarDelayProblem::new(
            Coefficient::Constant(-0.15),
            -6.0,
            -0.2,
            ScalarHistory::poly10(),
        )
        .map_err(|e| e.to_string())?;
        let props = build_discrete_propagators(&p, h).map_err(|e| e.to_string())?;
        scaled.push(defect_norm(&props) / h);
    }
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    let pass = (0.9..=1.1).contains(&slope) && spread <= 0.02;
    Ok(outcome(
        pass,
        format!(
            "slope = {slope:.4}; defect/h = [{:.5}, {:.5}, {:.5}] (spread {:.2}%, limit 2|b| = 12)",
            scaled[0],
            scaled[1],
            scaled[2],
            100.0 * spread
        ),
    ))
}

fn criterion_10() -> Result<Outcome, String> {
    let p = OhiraParams::paper().with_quadrature(4.0, 4001);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let t = 10.0 * k as f64 / 19.0;
        worst = worst.max(oo_residual(t, &p, 1e-3).map_err(|e| e.to_string())?);
    }
    let p0 = OhiraParams::new(-0.15, 0.0, -8.0);
    let mut gauss = 0.0f64;
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let exact = (0.15 / (2.0 * std::f64::consts::PI)).sqrt() * (-0.15 * t * t / 2.0f64).exp();
        gauss = gauss.max((oo_solution(t, &p0).map_err(|e| e.to_string())? - exact).abs());
    }
    Ok(outcome(
        worst <= 1e-4 && gauss <= 1e-10,
        format!("max residual over 20 times = {worst:.2e}; b = 0 Gaussian error = {gauss:.2e}"),
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let dir = dir.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome, String>>)> = vec![
        ("spectral radius", Box::new(|| criterion_1(dir))),
        ("summability magnitude", Box::new(|| criterion_2(dir))),
        (
            "autonomous PDE table",
            Box::new(|| pde_table(dir, "paper-auto-pde", &AUTO_TABLE, Duration::from_secs(10))),
        ),
        (
            "non-autonomous PDE table",
            Box::new(|| {
                pde_table(
                    dir,
                    "paper-nonauto-pde",
                    &NONAUTO_TABLE,
                    Duration::from_secs(20),
                )
            }),
        ),
        ("runtime structure", Box::new(|| criterion_5(dir))),
        ("growth fit", Box::new(|| criterion_6(dir))),
        ("identity suite", Box::new(criterion_7)),
        ("trace bound", Box::new(criterion_8)),
        ("order property", Box::new(|| criterion_9(dir))),
        ("oracle self-consistency", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use systole_core::certificate::Case;
use systole_core::cocycle::{coboundary, develop, develop_sl2c, embed_sl2_as_lorentz, verify_cocycle, LorentzGroup, Sl2cGroup};
use systole_core::grigoriev::systole_symbolic_bound_for;
use systole_core::hyperboloid::{apply_matrix, hyp_distance, HyperboloidPoint};
use systole_core::linalg::Matrix;
use systole_core::margulis::{closed_certificate, epsilon_lower, tube_radius_lower, MargulisConstant, MargulisSource};
use systole_core::oracles::{conversion_suite, pigeonhole_suite, roots_suite, thin_part_suite, trial_rng};
use systole_core::polysys::{
    build_closed_system, closed_bounds, complexity_profile, eval_residuals, lorentz_assignment, ResidualThresholds,
};
use systole_core::sampling::{random_closed_triangulation, random_lorentz, random_sl2c};
use systole_core::triangulation::{base_tree, Triangulation};

const SEED: u64 = 2024;

// 20/3 + ln 0.052 − ln 4 at 50 digits.
const TUBE_RADIUS_E20: f64 = 2.3238607451460663507;
// log₂ systole lower bound for n=3, t=5, B=2, ε=0.052 at 50 digits.
const CLOSED_CERT_352: f64 = -62.076884926231886870;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn margulis_constants() -> Outcome {
    let m = epsilon_lower(3, MargulisSource::Meyerhoff).unwrap().value();
    let mut worst: f64 = 0.0;
    for n in 3..=10 {
        let k = epsilon_lower(n, MargulisSource::Kellerhals).unwrap().value();
        let want = (6.0 * std::f64::consts::PI).powi(-(n as i32));
        worst = worst.max((k / want - 1.0).abs());
    }
    outcome(m == 0.052 && worst <= 1e-12, format!("meyerhoff={m}, kellerhals max rel err={worst:.2e}"))
}

fn tube_radius() -> Outcome {
    let eps = epsilon_lower(3, MargulisSource::Meyerhoff).unwrap();
    let r = tube_radius_lower((-20.0f64).exp(), 3, &eps).unwrap();
    let err = (r - TUBE_RADIUS_E20).abs();
    let mut zero_err: f64 = 0.0;
    for n in 3..=6 {
        let e = MargulisConstant::user_supplied(n, 0.052).unwrap();
        zero_err = zero_err.max(tube_radius_lower((0.052f64 / 4.0).powi(n as i32), n, &e).unwrap().abs());
    }
    outcome(err <= 1e-9 && zero_err <= 1e-12, format!("r(e^-20)={r:.12}, err={err:.1e}, zero residual={zero_err:.1e}"))
}

fn pigeonhole() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3, 4, 5] {
        let s = pigeonhole_suite(n, 1000, SEED).unwrap();
        pass &= s.passes && s.passed == 1000;
        parts.push(format!("n={n}: {}/{} max k/bound={:.3}", s.passed, s.trials, s.max_k_ratio));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    outcome(pass, format!("{}; {:.2}s", parts.join(", "), elapsed.as_secs_f64()))
}

fn thin_part() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let runs = [
        (3, MargulisConstant::default_for(3).unwrap()),
        (4, MargulisConstant::default_for(4).unwrap()),
        (4, MargulisConstant::user_supplied(4, 0.05).unwrap()),
    ];
    for (n, eps) in runs {
        let s = thin_part_suite(n, &eps, 1000, SEED).unwrap();
        pass &= s.passes && s.failed == 0;
        parts.push(format!(
            "n={n} eps={:.3e}: {} checked, {} vacuous, {} failed",
            s.epsilon, s.checked, s.vacuous, s.failed
        ));
    }
    outcome(pass, parts.join("; "))
}

fn conversion() -> Outcome {
    let s = conversion_suite(3, 1000, 4.0, SEED).unwrap();
    outcome(s.passes && s.max_abs_error <= 1e-9, format!("max error={:.2e}", s.max_abs_error))
}

fn lorentz_family(seed_trial: usize, tri: &Triangulation, n: usize) -> BTreeMap<usize, Matrix<f64>> {
    let mut r = trial_rng(SEED, seed_trial);
    let mut g: BTreeMap<_, _> = (0..tri.vertex_count()).map(|v| (v, random_lorentz(&mut r, n, 1.0))).collect();
    g.insert(0, Matrix::identity(n + 1));
    g
}

fn cocycle_algebra() -> Outcome {
    let mut r = trial_rng(SEED, 0);
    let mut worst_res: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    let mut pass = true;
    for n in [3usize, 4] {
        let complexes = [Triangulation::boundary_of_simplex(n), random_closed_triangulation(&mut r, n, 2)];
        for (i, tri) in complexes.iter().enumerate() {
            let g = lorentz_family(10 * n + i, tri, n);
            let alpha = coboundary(tri, LorentzGroup::new(n), &g).unwrap();
            let rep = verify_cocycle(tri, &alpha, 1e-9).unwrap();
            pass &= rep.passes;
            worst_res = worst_res.max(rep.max_face_residual).max(rep.max_inverse_residual);
            let dev = develop(tri, &alpha, &base_tree(tri, 0).unwrap(), 1e-9).unwrap();
            let o = HyperboloidPoint::basepoint(n);
            for (v, img) in &dev.vertex_images {
                worst_dev = worst_dev.max(hyp_distance(img, &apply_matrix(&g[v], &o).unwrap()).unwrap());
            }
        }
    }
    let complexes = [Triangulation::boundary_of_simplex(3), random_closed_triangulation(&mut r, 3, 2)];
    for tri in &complexes {
        let mut g: BTreeMap<_, _> = (0..tri.vertex_count()).map(|v| (v, random_sl2c(&mut r, 0.7))).collect();
        g.insert(0, Matrix::identity(2));
        let alpha = coboundary(tri, Sl2cGroup::new(), &g).unwrap();
        let rep = verify_cocycle(tri, &alpha, 1e-9).unwrap();
        pass &= rep.passes;
        worst_res = worst_res.max(rep.max_face_residual).max(rep.max_inverse_residual);
        let dev = develop_sl2c(tri, &alpha, &base_tree(tri, 0).unwrap(), 1e-9).unwrap();
        let o = HyperboloidPoint::basepoint(3);
        for (v, img) in &dev.vertex_images {
            let m = embed_sl2_as_lorentz(&g[v], 1e-9).unwrap();
            worst_dev = worst_dev.max(hyp_distance(img, &apply_matrix(&m, &o).unwrap()).unwrap());
        }
    }
    pass &= worst_res <= 1e-9 && worst_dev <= 1e-9;
    outcome(pass, format!("max residual={worst_res:.2e}, max development error={worst_dev:.2e}"))
}

fn cross_validation() -> Outcome {
    let mut r = trial_rng(SEED, 1);
    let mut worst_eq: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut pass = true;
    for trial in 0..6 {
        let tri = if trial == 0 {
            Triangulation::boundary_of_simplex(3)
        } else {
            let steps = r.random_range(1..4);
            random_closed_triangulation(&mut r, 3, steps)
        };
        let alpha = coboundary(&tri, LorentzGroup::new(3), &lorentz_family(100 + trial, &tri, 3)).unwrap();
        pass &= verify_cocycle(&tri, &alpha, 1e-9).unwrap().passes;
        let sys = build_closed_system(&tri, 3).unwrap();
        let a = lorentz_assignment(&tri, &alpha).unwrap();
        worst_eq = worst_eq.max(eval_residuals(&sys, &a, ResidualThresholds::default()).unwrap().max_eq_residual);
        let base = base_tree(&tri, tri.default_basepoint().unwrap()).unwrap();
        let dev = develop(&tri, &alpha, &base, 1e-9).unwrap();
        for (&(u, v), d) in &dev.edge_lengths {
            let key = format!("C{u}_{v}");
            worst_c = worst_c.max((a[&key] - (d.distance.cosh() - 1.0)).abs());
        }
    }
    pass &= worst_eq <= 1e-7 && worst_c <= 1e-7;
    outcome(pass, format!("max equality residual={worst_eq:.2e}, max C error={worst_c:.2e}"))
}

fn complexity() -> Outcome {
    let mut r = trial_rng(SEED, 2);
    let mut inputs = vec![Triangulation::boundary_of_simplex(3)];
    for _ in 0..5 {
        let steps = r.random_range(1..4);
        inputs.push(random_closed_triangulation(&mut r, 3, steps));
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for tri in &inputs {
        let p = complexity_profile(&build_closed_system(tri, 3).unwrap());
        let b = closed_bounds(&p, 3, tri.t());
        pass &= b.holds;
        parts.push(format!("t={} N={} k={} d={} M={:.3}", tri.t(), p.n_vars, p.kappa, p.d, p.m));
    }
    outcome(pass, format!("{} inputs: {}", inputs.len(), parts.join("; ")))
}

fn roots() -> Outcome {
    let start = Instant::now();
    let s = roots_suite(100, 8, 1024, SEED).unwrap();
    let elapsed = start.elapsed();
    outcome(
        s.passes && s.violations == 0 && elapsed < Duration::from_secs(30),
        format!("{} roots, {} violations, {:.2}s", s.roots_checked, s.violations, elapsed.as_secs_f64()),
    )
}

fn symbolic() -> Outcome {
    let mut pass = true;
    let lambda = |n, t| systole_symbolic_bound_for(Case::Closed, n, t, 1.0).unwrap().0.lambda.level2;
    for n in [3, 4, 5] {
        for t in 1..=10 {
            if t < 10 {
                pass &= lambda(n, t + 1) > lambda(n, t);
            }
            if n < 5 {
                pass &= lambda(n + 1, t) > lambda(n, t);
            }
        }
    }
    let eps = epsilon_lower(3, MargulisSource::Meyerhoff).unwrap();
    let got = closed_certificate(3, 5, 2.0, &eps).unwrap().systole_log2_lower.unwrap();
    let err = (got - CLOSED_CERT_352).abs();
    pass &= err <= 1e-6;
    outcome(
        pass,
        format!(
            "grid monotone; closed_certificate(3,5,2)={got:.10}, err={err:.1e}; stated approximation -62.09 differs by {:.4}",
            (got + 62.09).abs()
        ),
    )
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn determinism() -> Outcome {
    let tri = data("sphere3.tri");
    let coc = data("sphere3_coboundary.coc");
    let ideal = data("sphere3_ideal0.tri");
    let sl2 = data("sphere3_ideal0_sl2c.coc");
    let commands: Vec<(Vec<String>, Option<&str>)> = vec![
        (vec!["tri", "validate", &tri], None),
        (vec!["tri", "inspect", &tri, "--vertex", "2"], None),
        (vec!["polysys", "emit", &tri, "--case", "closed"], None),
        (vec!["polysys", "emit", &ideal, "--case", "cusped", "--format", "json"], None),
        (vec!["cocycle", "verify", &tri, &coc], None),
        (vec!["cocycle", "develop", &tri, &coc], None),
        (vec!["cocycle", "develop", &tri, &coc], Some("dd")),
        (vec!["cocycle", "develop", &ideal, &sl2], None),
        (vec!["bound", "tube-radius", "--n", "3", "--ln-R", "-20"], None),
        (vec!["bound", "certificate", "--n", "3", "--t", "5", "--B", "2"], None),
        (vec!["bound", "symbolic", "--n", "4", "--t", "3"], None),
        (vec!["oracle", "pigeonhole", "--n", "3", "--trials", "200", "--seed", "7"], None),
        (vec!["oracle", "tube", "--n", "3", "--trials", "200", "--seed", "7"], None),
        (vec!["oracle", "roots", "--trials", "20", "--seed", "7"], None),
    ]
    .into_iter()
    .map(|(a, p)| (a.into_iter().map(String::from).collect(), p))
    .collect();
    let run = |args: &[String], precision: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_systole"));
        cmd.args(args).env_remove("SYSTOLE_PRECISION");
        if let Some(p) = precision {
            cmd.env("SYSTOLE_PRECISION", p);
        }
        cmd.output().expect("run systole")
    };
    let mut pass = true;
    let mut bad = Vec::new();
    for (args, precision) in &commands {
        let a = run(args, *precision);
        let b = run(args, *precision);
        let same = a.stdout == b.stdout && a.stderr == b.stderr && a.status.code() == b.status.code();
        if !same || a.status.code() != Some(0) || a.stdout.is_empty() {
            pass = false;
            bad.push(args.join(" "));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} commands byte-identical across two runs", commands.len())
    } else {
        format!("mismatch or failure: {}", bad.join(" | "))
    };
    outcome(pass, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("margulis constants", margulis_constants),
        ("tube radius formula", tube_radius),
        ("pigeonhole suite", pigeonhole),
        ("thin-part displacement suite", thin_part),
        ("model conversion isometry", conversion),
        ("cocycle algebra", cocycle_algebra),
        ("system cross-validation", cross_validation),
        ("complexity accounting", complexity),
        ("root magnitude oracle", roots),
        ("symbolic bound monotonicity", symbolic),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

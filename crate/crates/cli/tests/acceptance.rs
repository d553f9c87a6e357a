//! One line per acceptance criterion; exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ancient_flow::flow::{phi_weighted_norm, run_flow, FlowOptions, Scheme};
use ancient_flow::gaussian::{entropy, weighted_norm_sq, EntropyOptions, GaussianContext};
use ancient_flow::geometry::{ClosedCurve, ScalarField};
use ancient_flow::numeric::fit_line;
use ancient_flow::spectrum::{rayleigh_check, spectrum, MultiCircle};
use ancient_flow::torus::{
    exact_trajectory, flow_residual, graph_decay_exponent, log_times, rescaled_distance_to_circle, sample,
    sample_at, solve_radius, TorusCurveParams,
};
use ancient_flow::verify::{
    carleman_verify, drift_identity_check, effective_codimension, gram_schmidt_at, growth_fit, poincare_verify,
    random_trig_field, rigidity_experiment, LinearCaloric, RigidityOptions, SpaceTimeField,
    DEFAULT_CODIM_THRESHOLD,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    fit_line(
        &xs.iter().map(|x| x.ln()).collect::<Vec<_>>(),
        &ys.iter().map(|y| y.ln()).collect::<Vec<_>>(),
    )
    .slope
}

fn timed(limit: f64, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    match out {
        Ok(d) if secs <= limit => Ok(format!("{d}; {secs:.2}s")),
        Ok(d) => Err(format!("{d}; {secs:.2}s exceeds {limit}s")),
        Err(d) => Err(format!("{d}; {secs:.2}s")),
    }
}

fn torus_exactness() -> Outcome {
    timed(5.0, || {
        let ms = [64.0, 128.0, 256.0, 512.0];
        let res: Vec<f64> = ms.iter().map(|&m| flow_residual(&[1, 2], -1.0, m as usize).unwrap()).collect();
        let order = -slope(&ms, &res);
        ensure(
            (order - 2.0).abs() <= 0.2 && res[3] <= 1e-3,
            format!("order {order:.3}, residual at M=512 {:.3e}", res[3]),
        )
    })
}

fn radius_law() -> Outcome {
    timed(1.0, || {
        let worst_single = log_times(-1e6, -1e-6, 20)
            .into_iter()
            .map(|t| (solve_radius(&[1], t).unwrap() - (-2.0 * t).sqrt()).abs())
            .fold(0.0, f64::max);
        let unit = (solve_radius(&[1, 2], -1.0).unwrap() - 1.0).abs();
        // RK4 in s = log(-t) on r' = -1 / sum_j k_j^2 r^(2k_j^2 - 1), from r(-1) = 1
        let drdt = |r: f64| -1.0 / (r + 4.0 * r.powi(7));
        let f = |s: f64, r: f64| -s.exp() * drdt(r);
        let mut worst_ode: f64 = 0.0;
        for target in [3.0f64, -3.0] {
            let n = 4000;
            let h = target / n as f64;
            let (mut s, mut r) = (0.0, 1.0);
            for _ in 0..n {
                let k1 = f(s, r);
                let k2 = f(s + h / 2.0, r + h / 2.0 * k1);
                let k3 = f(s + h / 2.0, r + h / 2.0 * k2);
                let k4 = f(s + h, r + h * k3);
                r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                s += h;
            }
            worst_ode = worst_ode.max((solve_radius(&[1, 2], -s.exp()).unwrap() - r).abs());
        }
        ensure(
            worst_single <= 1e-8 && unit <= 1e-10 && worst_ode <= 1e-6,
            format!("single {worst_single:.2e}, r(-1) error {unit:.2e}, ODE oracle {worst_ode:.2e}"),
        )
    })
}

fn entropy_limit() -> Outcome {
    timed(30.0, || {
        let opts = EntropyOptions::default();
        let torus = entropy(&sample_at(&[1, 2], -1e8, 512).unwrap(), &opts).unwrap().value;
        let target = 3.04069;
        let rel = (torus / target - 1.0).abs();
        let mut worst_circle: f64 = 0.0;
        for (radius, shift) in [(0.3, 0.0), (2f64.sqrt(), 1.0), (7.0, -2.0)] {
            let c = ClosedCurve::from_fn(256, 3, |th| vec![radius * th.cos() + shift, radius * th.sin(), shift]).unwrap();
            worst_circle = worst_circle.max((entropy(&c, &opts).unwrap().value - 1.520347).abs());
        }
        ensure(
            rel <= 5e-3 && worst_circle <= 1e-3,
            format!("torus {torus:.6} (rel {rel:.2e}), circles within {worst_circle:.2e}"),
        )
    })
}

fn tangent_flows() -> Outcome {
    let past = rescaled_distance_to_circle(&[1, 2], -1e6, 2, 512).unwrap();
    let future = rescaled_distance_to_circle(&[1, 2], -1e-6, 1, 512).unwrap();
    let back: Vec<f64> = (4..=8).map(|e| 10f64.powi(e)).collect();
    let db: Vec<f64> = back.iter().map(|&s| rescaled_distance_to_circle(&[1, 2], -s, 2, 256).unwrap()).collect();
    let fwd: Vec<f64> = (2..=6).map(|e| 10f64.powi(-e)).collect();
    let df: Vec<f64> = fwd.iter().map(|&s| rescaled_distance_to_circle(&[1, 2], -s, 1, 256).unwrap()).collect();
    let monotone = db.windows(2).all(|w| w[1] < w[0]) && df.windows(2).all(|w| w[1] < w[0]);
    let (sb, sf) = (slope(&back, &db), slope(&fwd, &df));
    ensure(
        past <= 0.01 && future <= 0.01 && monotone && (sb + 0.375).abs() <= 0.05 && (sf - 1.5).abs() <= 0.05,
        format!("d(-1e6, k=2) {past:.2e}, d(-1e-6, k=1) {future:.2e}, slopes {sb:.3} and {sf:.3} per decade"),
    )
}

fn spectrum_criterion() -> Outcome {
    let circle = MultiCircle::shrinker(2).unwrap();
    let exact = [0.0, 0.125, 0.125, 0.5, 0.5, 1.125, 1.125];
    let start = Instant::now();
    let top = spectrum(&circle.sample(1024).unwrap(), 6).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = top.eigenvalues.iter().zip(exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ms = [128.0, 256.0, 512.0];
    let mut errs: Vec<f64> = ms
        .iter()
        .map(|&m| (spectrum(&circle.sample(m as usize).unwrap(), 2).unwrap().eigenvalues[1] - 0.125).abs())
        .collect();
    errs.push((top.eigenvalues[1] - 0.125).abs());
    let order = -slope(&[128.0, 256.0, 512.0, 1024.0], &errs);
    ensure(
        err <= 5e-4 && (order - 2.0).abs() <= 0.2 && secs <= 10.0,
        format!("max error {err:.2e} at M=1024 in {secs:.2}s, order {order:.3}"),
    )
}

fn monotonicity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bump = ClosedCurve::from_fn(128, 2, |th| {
        let r = 2f64.sqrt() * (1.0 + 0.05 * (3.0 * th).cos());
        vec![r * th.cos(), r * th.sin()]
    })
    .unwrap();
    let flows = [
        ("circle", MultiCircle::shrinker(1).unwrap().sample(128).unwrap()),
        ("perturbed circle", bump),
        ("torus (1,2)", sample_at(&[1, 2], -1.0, 128).unwrap()),
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for (name, curve) in flows {
        let fields: BTreeMap<String, ScalarField> =
            (0..20).map(|i| (format!("u{i:02}"), random_trig_field(&mut rng, 128, 6, true))).collect();
        let opts = FlowOptions {
            dt: 1e-3,
            scheme: Scheme::SemiImplicit,
            cadence: 1,
            fields,
        };
        let traj = run_flow(&curve, -1.0, -0.6, &opts).map_err(|e| format!("{name}: {e}"))?;
        let norms: Vec<BTreeMap<&String, f64>> = traj
            .samples
            .iter()
            .map(|s| {
                let ctx = GaussianContext::new(s.t).unwrap();
                s.fields.iter().map(|(k, u)| (k, weighted_norm_sq(u, &s.curve, &ctx).unwrap())).collect()
            })
            .collect();
        for w in norms.windows(2) {
            for (k, a) in &w[0] {
                worst = worst.max((w[1][k] - a) / a);
                checked += 1;
            }
        }
    }
    ensure(
        worst <= 1e-6,
        format!("{checked} step pairs, largest relative increase {worst:.2e}"),
    )
}

fn growth_exponents() -> Outcome {
    let times = log_times(-1e8, -1e4, 17);
    let circle = exact_trajectory(&[1], &times, 64).unwrap();
    let torus = exact_trajectory(&[1, 2], &times, 64).unwrap();
    let dc: Vec<f64> = ["x0", "x1"].iter().map(|f| growth_fit(&circle, f).unwrap().exponent_d).collect();
    let dt: Vec<f64> = ["x0", "x1"].iter().map(|f| growth_fit(&torus, f).unwrap().exponent_d).collect();
    let eps = graph_decay_exponent(&[1, 2], (-1e8, -1e4), 9).unwrap().slope;
    ensure(
        dc.iter().all(|d| (d - 1.0).abs() <= 0.02)
            && dt.iter().all(|d| (d - 0.25).abs() <= 0.02)
            && (eps + 0.375).abs() <= 0.02,
        format!("circle d {dc:.4?}, torus low pair d {dt:.4?}, eps slope {eps:.4}"),
    )
}

fn phi_decay() -> Outcome {
    let times = log_times(-1e8, -1e4, 9);
    let values: Vec<f64> = times
        .iter()
        .map(|&t| phi_weighted_norm(&sample_at(&[1, 2], t, 2048).unwrap(), t).unwrap())
        .collect();
    let abs_t: Vec<f64> = times.iter().map(|t| -t).collect();
    let s = slope(&abs_t, &values);
    ensure((s + 0.875).abs() <= 0.05, format!("slope {s:.4}"))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sigma = MultiCircle::shrinker(2).unwrap().sample(256).unwrap();
    let spec = spectrum(&sigma, 3).unwrap();
    let ctx = GaussianContext::new(-1.0).unwrap();
    let mut passed = [0usize; 5];
    for _ in 0..100 {
        let u = random_trig_field(&mut rng, 256, 8, true);
        passed[0] += rayleigh_check(&u, &spec, 0).map(|v| v.holds).unwrap_or(false) as usize;
    }
    for (slot, level) in [(1usize, 0usize), (2, 2)] {
        let psis: Vec<ScalarField> = if level == 2 {
            vec![ScalarField::from_fn(256, f64::cos), ScalarField::from_fn(256, f64::sin)]
        } else {
            Vec::new()
        };
        for _ in 0..100 {
            let mut basis = vec![ScalarField::constant(256, 1.0)];
            basis.extend(psis.iter().cloned());
            basis.push(random_trig_field(&mut rng, 256, 8, true));
            let u = gram_schmidt_at(&basis, &sigma, &ctx).unwrap().orthogonal.pop().unwrap();
            passed[slot] += poincare_verify(&sigma, -1.0, &u, &psis, &spec, level, 0.05)
                .map(|v| v.holds)
                .unwrap_or(false) as usize;
        }
    }
    let ms = [64.0, 128.0, 256.0, 512.0];
    let curves: Vec<ClosedCurve> = ms.iter().map(|&m| sample_at(&[1, 2], -1.0, m as usize).unwrap()).collect();
    for _ in 0..100 {
        let dir: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let res: Vec<f64> = curves
            .iter()
            .map(|c| drift_identity_check(&LinearCaloric::new(c, dir.clone()).unwrap(), c, -1.0).unwrap())
            .collect();
        passed[3] += ((-slope(&ms, &res) - 2.0).abs() <= 0.2) as usize;
    }
    let field_grid = MultiCircle::shrinker(2).unwrap().sample(128).unwrap();
    for _ in 0..100 {
        let alpha = rng.gen_range(0.5..8.0);
        let delta = rng.gen_range(0.2..4.0);
        let terms: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let u = SpaceTimeField::from_fn(128, -2.0, -1.0, 65, |p, t| {
            terms
                .iter()
                .enumerate()
                .map(|(j, (a, b, c))| (a * (j as f64 * p).cos() + b * (j as f64 * p).sin()) * (c * t).exp())
                .sum()
        });
        passed[4] += carleman_verify(&u, &field_grid, alpha, delta).map(|v| v.holds).unwrap_or(false) as usize;
    }
    ensure(
        passed.iter().all(|&p| p == 100),
        format!(
            "rayleigh {}/100, poincare l=0 {}/100, l=2 {}/100, drift {}/100, carleman {}/100",
            passed[0], passed[1], passed[2], passed[3], passed[4]
        ),
    )
}

fn codimension() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (t, expect) in [(-1.0, 3usize), (-5e-5, 1)] {
        let curve = sample(&TorusCurveParams::at_time(&[1, 2], t).unwrap(), 256).unwrap();
        let ctx = GaussianContext::new(t).unwrap();
        let rep = effective_codimension(&curve, &ctx, DEFAULT_CODIM_THRESHOLD).unwrap();
        let w = ctx.weights(&curve);
        let total: f64 = w.iter().sum();
        let mean: Vec<f64> = (0..4)
            .map(|a| curve.points().zip(&w).map(|(p, wi)| wi * p[a]).sum::<f64>() / total)
            .collect();
        let data = DMatrix::from_fn(curve.len(), 4, |i, a| (w[i] / total).sqrt() * (curve.point(i)[a] - mean[a]));
        let mut sv: Vec<f64> = data.svd(false, false).singular_values.iter().map(|s| s * s).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let gap = sv
            .iter()
            .zip(&rep.singular_values)
            .map(|(a, b)| (a - b).abs() / sv[0])
            .fold(0.0, f64::max);
        ok &= rep.codimension == expect && gap <= 1e-10;
        details.push(format!("t={t}: codim {} (oracle gap {gap:.1e})", rep.codimension));
    }
    ensure(ok, details.join(", "))
}

fn rigidity_rates() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (m, k) in [(1u32, 0u32), (1, 2), (2, 1)] {
        let expected = 1.0 - (k * k) as f64 / (2.0 * (m * m) as f64);
        let shape = ScalarField::from_fn(128, |p| (k as f64 * p).cos());
        let rep = rigidity_experiment(
            &MultiCircle::shrinker(m).unwrap(),
            &shape,
            0.01,
            (0.0, 0.5),
            &RigidityOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let rate = rep.rate.unwrap_or(f64::NAN);
        ok &= (rate - expected).abs() <= 0.05;
        details.push(format!("(m={m},k={k}) {rate:.4} vs {expected}"));
    }
    ensure(ok, details.join(", "))
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(tree(&p).into_iter().map(|(n, b)| (format!("{}/{n}", p.display()), b)));
        } else {
            out.push((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()));
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 3] = [
        &["verify", "poincare", "--instances", "10", "--seed", "3"],
        &["caloric", "--torus", "1,2", "--fields", "4", "--cadence", "100", "--seed", "3"],
        &["torus", "--freqs", "1,2", "--window", "-1e4:-1e-2", "--points", "6"],
    ];
    for args in commands {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::TempDir::new().unwrap();
            let status = Command::new(env!("CARGO_BIN_EXE_ancient-flow"))
                .args(args)
                .arg("--out")
                .arg(dir.path())
                .arg("--quiet")
                .status()
                .unwrap();
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(
                tree(dir.path())
                    .into_iter()
                    .map(|(n, b)| (n.replace(&dir.path().display().to_string(), ""), b))
                    .collect::<Vec<_>>(),
            );
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{args:?} differs between runs"));
        }
    }
    ensure(true, format!("{} commands byte-identical across runs", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("torus curve exactness", torus_exactness),
        ("radius law", radius_law),
        ("entropy limit", entropy_limit),
        ("tangent flows", tangent_flows),
        ("spectrum", spectrum_criterion),
        ("monotonicity suite", monotonicity_suite),
        ("growth exponents", growth_exponents),
        ("phi decay", phi_decay),
        ("inequality suites", property_suites),
        ("codimension transition", codimension),
        ("rigidity rates", rigidity_rates),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_owned()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

use ancient_flow::gaussian::{circle_entropy, entropy, EntropyOptions};
use ancient_flow::torus::{
    check_freqs, graph_decay_exponent, log_times, rescaled_distance_to_circle, sample_at, solve_radius, DECAY_WINDOW,
};

use super::{require, Run};
use crate::args::TorusArgs;
use crate::config::parse_window;
use crate::error::CliError;
use crate::output::num;

fn implicit_residual(freqs: &[u32], r: f64, t: f64) -> f64 {
    freqs.iter().map(|&k| r.powi(2 * (k * k) as i32)).sum::<f64>() + 2.0 * t
}

/// Expected slope of the rescaled distance to the top circle: the second
/// largest frequency sets the slowest decaying mode.
fn predicted_decay(freqs: &[u32]) -> f64 {
    let km = freqs[freqs.len() - 1] as f64;
    let kn = freqs[freqs.len() - 2] as f64;
    -(0.5 - kn * kn / (2.0 * km * km))
}

pub fn run(a: TorusArgs, run: &mut Run) -> Result<(), CliError> {
    let freqs = require(a.freqs, "freqs")?;
    check_freqs(&freqs)?;
    let t = a.t.unwrap_or(-1.0);
    let grid = run.grid(512);
    let curve = sample_at(&freqs, t, grid)?;
    run.out.write_bytes("curve.json", curve.to_json().as_bytes())?;
    let norms = curve.squared_norms();
    let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    run.check(
        "torus-constant-norm",
        "torus curves lie on a round sphere about the origin",
        Some(hi - lo),
        Some(1e-12 * hi),
        None,
        1e-12,
        hi - lo <= 1e-12 * hi,
    );

    let (w0, w1) = parse_window(a.window.as_deref().unwrap_or("-1e8:-1e-6"))?;
    let times = log_times(w0, w1, a.points.unwrap_or(20));
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &s in &times {
        let r = solve_radius(&freqs, s)?;
        let res = implicit_residual(&freqs, r, s);
        worst = worst.max(res.abs() / (2.0 * s.abs()));
        rows.push(vec![num(s), num(r), num(res)]);
    }
    run.out.write_csv("radius.csv", &["t", "r", "implicit_residual"], &rows)?;
    run.check(
        "radius-law",
        "the pair radius solves sum r^(2k^2) = -2t",
        Some(worst),
        Some(1e-10),
        None,
        1e-10,
        worst <= 1e-10,
    );

    let (k1, km) = (freqs[0], freqs[freqs.len() - 1]);
    let mut ks = vec![k1];
    if km != k1 {
        ks.push(km);
    }
    let mut rows = Vec::new();
    let (mut early, mut late) = (None, None);
    for &s in &times {
        for &k in &ks {
            let d = rescaled_distance_to_circle(&freqs, s, k, grid)?;
            if k == km && s == times[0] {
                early = Some(d);
            }
            if k == k1 && s == times[times.len() - 1] {
                late = Some(d);
            }
            rows.push(vec![num(s), k.to_string(), num(d)]);
        }
    }
    run.out.write_csv("distances.csv", &["t", "k", "distance"], &rows)?;
    if w0 <= -1e6 && w1 >= -1e-6 {
        let (e, l) = (early.expect("sampled"), late.expect("sampled"));
        run.check(
            "tangent-flows",
            "blow-downs approach the k_m-covered circle and blow-ups the k_1-covered circle",
            Some(e.max(l)),
            Some(0.01),
            None,
            0.01,
            e <= 0.01 && l <= 0.01,
        );
    }

    if freqs.len() >= 2 {
        let fit = graph_decay_exponent(&freqs, DECAY_WINDOW, a.decay_samples.unwrap_or(9))?;
        let label = freqs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let row = vec![label, num(DECAY_WINDOW.0), num(DECAY_WINDOW.1), num(fit.slope), num(fit.stderr)];
        run.out.write_csv("decay.csv", &["freqs", "window_start", "window_end", "slope", "stderr"], &[row])?;
        let expected = predicted_decay(&freqs);
        run.check(
            "graph-decay-exponent",
            "the graph over the top circle decays at the rate of the subdominant mode",
            Some(fit.slope),
            Some(expected),
            Some(fit.slope),
            0.02,
            (fit.slope - expected).abs() <= 0.02,
        );
    }

    if let Some(window) = a.entropy_sweep.as_deref() {
        let (s0, s1) = parse_window(window)?;
        let opts = EntropyOptions {
            seed: run.seed,
            ..EntropyOptions::default()
        };
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for s in log_times(s0, s1, a.sweep_points.unwrap_or(5)) {
            let e = entropy(&sample_at(&freqs, s, grid)?, &opts)?;
            values.push(e.value);
            rows.push(vec![num(s), num(e.scale), num(e.value)]);
        }
        run.out.write_csv("entropy.csv", &["t", "scale", "entropy"], &rows)?;
        let limit = km as f64 * circle_entropy();
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        run.check(
            "entropy-bound",
            "entropy never exceeds k_m times the entropy of a circle",
            Some(top),
            Some(limit),
            None,
            5e-3,
            top <= limit * (1.0 + 5e-3),
        );
        if s0 <= -1e4 {
            let first = values[0];
            run.check(
                "entropy-limit",
                "entropy tends to k_m times the entropy of a circle as t -> -infinity",
                Some(first),
                Some(limit),
                None,
                5e-3,
                (first / limit - 1.0).abs() <= 5e-3,
            );
        }
    }
    Ok(())
}

use ancient_flow::gaussian::{entropy, EntropyOptions};

use super::{load_curve, Run};
use crate::args::EntropyArgs;
use crate::error::CliError;
use crate::output::num;

pub fn run(a: EntropyArgs, run: &mut Run) -> Result<(), CliError> {
    let curve = load_curve(&a.source, a.t.unwrap_or(-1.0), run.grid(256))?;
    let defaults = EntropyOptions::default();
    let opts = EntropyOptions {
        seed: run.seed,
        restarts: a.restarts.unwrap_or(defaults.restarts),
        max_evals: a.max_evals.unwrap_or(defaults.max_evals),
        ..defaults
    };
    let result = entropy(&curve, &opts)?;
    run.out.write_json("entropy.json", &result)?;
    let rows: Vec<Vec<String>> = result
        .trace
        .iter()
        .map(|p| {
            let y = p.y.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" ");
            vec![num(p.s), y, num(p.value)]
        })
        .collect();
    run.out.write_csv("trace.csv", &["s", "y", "value"], &rows)?;
    run.out.say(format!("entropy {}", num(result.value)));
    if let Some(expect) = a.expect {
        let tol = a.tolerance.unwrap_or(1e-3);
        let rel = (result.value / expect - 1.0).abs();
        run.check(
            "entropy",
            "entropy matches the expected value",
            Some(result.value),
            Some(expect),
            Some(rel),
            tol,
            rel <= tol,
        );
    }
    Ok(())
}

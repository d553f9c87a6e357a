use ancient_flow::spectrum::{spectrum, MultiCircle};
use serde::Serialize;

use super::Run;
use crate::args::SpectrumArgs;
use crate::error::CliError;
use crate::output::num;

#[derive(Serialize)]
struct Eigenfunctions<'a> {
    grid: usize,
    eigenvalues: &'a [f64],
    fields: Vec<&'a [f64]>,
}

pub fn run(a: SpectrumArgs, run: &mut Run) -> Result<(), CliError> {
    let m = a.multiplicity.unwrap_or(2);
    let circle = match a.radius {
        Some(r) => MultiCircle::new(m, r)?,
        None => MultiCircle::shrinker(m)?,
    };
    let count = a.count.unwrap_or(6);
    let grid = run.grid(512);
    let spec = spectrum(&circle.sample(grid)?, count)?;
    let exact = circle.exact_spectrum(count);
    let groups = spec.groups();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, (&v, &e)) in spec.eigenvalues.iter().zip(&exact).enumerate() {
        worst = worst.max((v - e).abs());
        rows.push(vec![i.to_string(), num(v), groups[i].to_string(), num(e), num((v - e).abs())]);
    }
    run.out
        .write_csv("spectrum.csv", &["index", "eigenvalue", "group", "exact", "abs_error"], &rows)?;
    run.out.write_json(
        "eigenfunctions.json",
        &Eigenfunctions {
            grid,
            eigenvalues: &spec.eigenvalues,
            fields: spec.eigenfunctions.iter().map(|f| f.values()).collect(),
        },
    )?;
    // The discretization error scales with the square of the spacing.
    let tol = a.tolerance.unwrap_or(5e-4 * (1024.0 / grid as f64).powi(2));
    run.check(
        "spectrum-eigenvalues",
        "the m-covered circle of radius R has eigenvalues k^2/(mR)^2, each nonzero one twice",
        Some(worst),
        Some(tol),
        None,
        tol,
        worst <= tol,
    );
    let gram = spec.gram();
    let n = gram.nrows();
    let off = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    run.check(
        "spectrum-orthonormal",
        "eigenfunctions are orthonormal in the Gaussian L^2 form",
        Some(off),
        Some(1e-10),
        None,
        1e-10,
        off <= 1e-10,
    );
    Ok(())
}

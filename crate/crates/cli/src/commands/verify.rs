use ancient_flow::geometry::ScalarField;
use ancient_flow::gaussian::{weighted_norm_sq, GaussianContext};
use ancient_flow::numeric::fit_line;
use ancient_flow::spectrum::{rayleigh_check, spectrum, MultiCircle};
use ancient_flow::torus::{exact_trajectory, log_times, sample_at};
use ancient_flow::verify::{
    carleman_verify, drift_identity_check, gram_schmidt_at, growth_fit, poincare_verify, random_trig_field,
    rigidity_experiment, LinearCaloric, RigidityOptions, SpaceTimeField,
};
use rand::Rng;

use super::Run;
use crate::args::{CarlemanArgs, DriftArgs, GrowthArgs, PoincareArgs, RayleighArgs, RigidityArgs, VerifyCommand};
use crate::config::parse_window;
use crate::error::CliError;
use crate::output::num;

pub fn run(cmd: VerifyCommand, run: &mut Run) -> Result<(), CliError> {
    match cmd {
        VerifyCommand::Poincare(a) => poincare(a, run),
        VerifyCommand::Rayleigh(a) => rayleigh(a, run),
        VerifyCommand::Carleman(a) => carleman(a, run),
        VerifyCommand::Drift(a) => drift(a, run),
        VerifyCommand::Growth(a) => growth(a, run),
        VerifyCommand::Rigidity(a) => rigidity(a, run),
    }
}

/// Exact eigenfunctions `1..=level` of a multiply covered circle, in the
/// order cos psi, sin psi, cos 2psi, ...
fn low_modes(grid: usize, level: usize) -> Vec<ScalarField> {
    (1..=level)
        .map(|j| {
            let k = ((j + 1) / 2) as f64;
            if j % 2 == 1 {
                ScalarField::from_fn(grid, |p| (k * p).cos())
            } else {
                ScalarField::from_fn(grid, |p| (k * p).sin())
            }
        })
        .collect()
}

fn poincare(a: PoincareArgs, run: &mut Run) -> Result<(), CliError> {
    let m = a.sigma_mult.unwrap_or(2);
    let level = a.level.unwrap_or(0);
    let mu = a.mu.unwrap_or(0.05);
    let t = a.t.unwrap_or(-1.0);
    let grid = run.grid(256);
    let sigma = MultiCircle::shrinker(m)?.sample(grid)?;
    let spec = spectrum(&sigma, level + 1)?;
    if !(t < 0.0) {
        return Err(CliError::usage("--t must be negative"));
    }
    let curve = sigma.scaled((-t).sqrt())?;
    let ctx = GaussianContext::new(t)?;
    let psis = low_modes(grid, level);
    let mut rng = run.rng();
    let mut rows = Vec::new();
    for i in 0..a.instances.unwrap_or(100) {
        let mut basis = vec![ScalarField::constant(grid, 1.0)];
        basis.extend(psis.iter().cloned());
        basis.push(random_trig_field(&mut rng, grid, a.max_mode.unwrap_or(8), true));
        let u = gram_schmidt_at(&basis, &curve, &ctx)?.orthogonal.pop().expect("nonempty");
        let v = poincare_verify(&curve, t, &u, &psis, &spec, level, mu)?;
        rows.push(vec![i.to_string(), num(v.lhs), num(v.rhs), v.holds.to_string()]);
        run.check(
            &format!("poincare#{i:03}"),
            "(1 - mu) I_u <= (-t / lambda_{l+1}) I_grad_u for u orthogonal to the first l + 1 eigenfunctions",
            Some(v.lhs),
            Some(v.rhs),
            None,
            1e-6,
            v.holds,
        );
    }
    run.out.write_csv("poincare.csv", &["instance", "lhs", "rhs", "holds"], &rows)?;
    Ok(())
}

fn rayleigh(a: RayleighArgs, run: &mut Run) -> Result<(), CliError> {
    let grid = run.grid(256);
    let level = a.level.unwrap_or(0);
    let sigma = MultiCircle::shrinker(a.sigma_mult.unwrap_or(2))?.sample(grid)?;
    let spec = spectrum(&sigma, level + 1)?;
    let mut rng = run.rng();
    let mut rows = Vec::new();
    for i in 0..a.instances.unwrap_or(100) {
        let u = random_trig_field(&mut rng, grid, a.max_mode.unwrap_or(8), true);
        let v = rayleigh_check(&u, &spec, level)?;
        rows.push(vec![i.to_string(), num(v.lhs), num(v.rhs), v.holds.to_string()]);
        run.check(
            &format!("rayleigh#{i:03}"),
            "the Gaussian L^2 norm is bounded by the Dirichlet form over the next eigenvalue",
            Some(v.lhs),
            Some(v.rhs),
            None,
            1e-6,
            v.holds,
        );
    }
    run.out.write_csv("rayleigh.csv", &["instance", "lhs", "rhs", "holds"], &rows)?;
    Ok(())
}

fn carleman(a: CarlemanArgs, run: &mut Run) -> Result<(), CliError> {
    let m = a.sigma_mult.unwrap_or(2);
    let circle = MultiCircle::shrinker(m)?;
    let grid = run.grid(128);
    let sigma = circle.sample(grid)?;
    let (t1, t2) = parse_window(a.window.as_deref().unwrap_or("-2:-1"))?;
    let n = a.time_samples.unwrap_or(65);
    let (alpha, delta) = (a.alpha.unwrap_or(4.0), a.delta.unwrap_or(1.0));
    let k = a.caloric_mode.unwrap_or(1) as f64;
    let lambda = k * k / (m as f64 * circle.radius).powi(2);
    let mut fields = vec![(
        "caloric".to_owned(),
        SpaceTimeField::from_fn(grid, t1, t2, n, |p, t| (-lambda * t).exp() * (k * p).cos()),
    )];
    let mut rng = run.rng();
    for i in 0..a.instances.unwrap_or(0) {
        let terms: Vec<(f64, f64, f64)> = (0..=4)
            .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let u = SpaceTimeField::from_fn(grid, t1, t2, n, |p, t| {
            terms
                .iter()
                .enumerate()
                .map(|(j, (a, b, c))| (a * (j as f64 * p).cos() + b * (j as f64 * p).sin()) * (c * t).exp())
                .sum()
        });
        fields.push((format!("random#{i:03}"), u));
    }
    let mut rows = Vec::new();
    for (name, u) in &fields {
        let v = carleman_verify(u, &sigma, alpha, delta)?;
        rows.push(vec![
            name.clone(),
            num(v.lhs),
            num(v.rhs),
            num(v.quadrature_error),
            v.holds.to_string(),
        ]);
        run.check(
            &format!("carleman:{name}"),
            "the weighted space-time energy is controlled by the heat operator and the initial slice",
            Some(v.lhs),
            Some(v.rhs),
            None,
            2.0 * v.quadrature_error,
            v.holds,
        );
    }
    run.out
        .write_csv("carleman.csv", &["field", "lhs", "rhs", "quadrature_error", "holds"], &rows)?;
    Ok(())
}

fn drift(a: DriftArgs, run: &mut Run) -> Result<(), CliError> {
    let freqs = a.freqs.unwrap_or_else(|| vec![1, 2]);
    let t = a.t.unwrap_or(-1.0);
    let grids = a.grids.unwrap_or_else(|| vec![64, 128, 256, 512]);
    if grids.len() < 2 {
        return Err(CliError::usage("--grids needs at least two sizes"));
    }
    let direction = match a.direction {
        Some(d) => d,
        None => {
            let mut rng = run.rng();
            (0..2 * freqs.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect()
        }
    };
    let mut rows = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &m in &grids {
        let curve = sample_at(&freqs, t, m)?;
        let lin = LinearCaloric::new(&curve, direction.clone())?;
        let r = drift_identity_check(&lin, &curve, t)?;
        rows.push(vec![m.to_string(), num(r)]);
        xs.push((m as f64).ln());
        ys.push(r.max(f64::MIN_POSITIVE).ln());
    }
    run.out.write_csv("drift.csv", &["grid", "residual"], &rows)?;
    let finest = ys.last().expect("nonempty").exp();
    if finest <= 1e-10 {
        run.check(
            "drift-identity",
            "L_t u = u / 2t - <Phi, U> for linear u",
            Some(finest),
            Some(1e-10),
            None,
            1e-10,
            true,
        );
    } else {
        let order = -fit_line(&xs, &ys).slope;
        run.check(
            "drift-identity",
            "L_t u = u / 2t - <Phi, U> for linear u, with residual decaying at second order",
            Some(order),
            Some(2.0),
            Some(order),
            0.2,
            order >= 1.8,
        );
    }
    Ok(())
}

fn growth(a: GrowthArgs, run: &mut Run) -> Result<(), CliError> {
    let freqs = a.freqs.unwrap_or_else(|| vec![1, 2]);
    let (w0, w1) = parse_window(a.window.as_deref().unwrap_or("-1e8:-1e4"))?;
    let field = a.field.unwrap_or_else(|| "x0".to_owned());
    let traj = exact_trajectory(&freqs, &log_times(w0, w1, a.samples.unwrap_or(17)), run.grid(64))?;
    let fit = growth_fit(&traj, &field)?;
    let mut rows = Vec::new();
    for s in &traj.samples {
        let u = &s.fields[&field];
        rows.push(vec![num(s.t), num(weighted_norm_sq(u, &s.curve, &GaussianContext::new(s.t)?)?)]);
    }
    run.out.write_csv("growth.csv", &["t", "weighted_norm_sq"], &rows)?;
    run.out.write_json("growth_fit.json", &fit)?;
    if let Some(expect) = a.expect {
        let tol = a.tolerance.unwrap_or(0.02);
        run.check(
            &format!("growth:{field}"),
            "I_u(t) <= C (1 - t)^d with the exponent of the slowest mode",
            Some(fit.exponent_d),
            Some(expect),
            Some(fit.exponent_d),
            tol,
            (fit.exponent_d - expect).abs() <= tol,
        );
    } else {
        run.out.say(format!("exponent {}", num(fit.exponent_d)));
    }
    Ok(())
}

fn rigidity(a: RigidityArgs, run: &mut Run) -> Result<(), CliError> {
    let m = a.sigma_mult.unwrap_or(2);
    let k = a.mode.unwrap_or(1);
    let grid = run.grid(128);
    let circle = MultiCircle::shrinker(m)?;
    let window = parse_window(a.tau_window.as_deref().unwrap_or("0:0.5"))?;
    let defaults = RigidityOptions::default();
    let opts = RigidityOptions {
        dtau: a.dtau.unwrap_or(defaults.dtau),
        cadence: a.cadence.unwrap_or(defaults.cadence),
    };
    let shape = ScalarField::from_fn(grid, |p| (k as f64 * p).cos());
    let rep = rigidity_experiment(&circle, &shape, a.amplitude.unwrap_or(0.01), window, &opts)?;
    let rows: Vec<Vec<String>> = rep
        .taus
        .iter()
        .zip(&rep.projections)
        .zip(&rep.sup_norms)
        .map(|((t, p), s)| vec![num(*t), num(*p), num(*s)])
        .collect();
    run.out.write_csv("rigidity.csv", &["tau", "projection", "sup_norm"], &rows)?;
    let expected = 1.0 - (k * k) as f64 / (2.0 * (m * m) as f64);
    let tol = a.tolerance.unwrap_or(0.05);
    run.out.say(format!("rate {}", rep.describe_rate()));
    let holds = match rep.rate {
        Some(r) => (r - expected).abs() <= tol,
        None => true,
    };
    run.check(
        &format!("rigidity:m{m}k{k}"),
        "perturbations of the m-covered circle grow at the linearized rate 1 - k^2/(2m^2)",
        rep.rate,
        Some(expected),
        rep.rate,
        tol,
        holds,
    );
    Ok(())
}

use ancient_flow::geometry::ClosedCurve;
use ancient_flow::spectrum::MultiCircle;
use ancient_flow::torus::sample_at;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::CurveSource;
use crate::error::CliError;
use crate::output::{Output, Verdict, VERDICT_HEADER};

pub mod codim;
pub mod entropy;
pub mod flow;
pub mod spectrum;
pub mod torus;
pub mod verify;

/// State shared by one invocation: resolved globals, the output directory
/// and the verdicts collected so far.
pub struct Run {
    pub grid: Option<usize>,
    pub seed: u64,
    pub out: Output,
    pub digest: String,
    verdicts: Vec<Verdict>,
}

impl Run {
    pub fn new(grid: Option<usize>, seed: u64, out: Output, digest: String) -> Self {
        Run {
            grid,
            seed,
            out,
            digest,
            verdicts: Vec::new(),
        }
    }

    pub fn grid(&self, default: usize) -> usize {
        self.grid.unwrap_or(default)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn check(
        &mut self,
        op: &str,
        claim: &str,
        lhs: Option<f64>,
        rhs: Option<f64>,
        fit: Option<f64>,
        tolerance: f64,
        holds: bool,
    ) {
        self.out.say(format!(
            "{} {op}: lhs={} rhs={} fit={}",
            if holds { "PASS" } else { "FAIL" },
            fmt_opt(lhs),
            fmt_opt(rhs),
            fmt_opt(fit)
        ));
        self.verdicts.push(Verdict {
            op: op.to_owned(),
            claim: claim.to_owned(),
            inputs_digest: self.digest.clone(),
            lhs,
            rhs,
            fit,
            tolerance,
            holds,
        });
    }

    /// Writes the verdict files and reports whether every check held.
    pub fn finish(self) -> Result<bool, CliError> {
        let rows: Vec<Vec<String>> = self.verdicts.iter().map(Verdict::row).collect();
        self.out.write_csv("verdicts.csv", &VERDICT_HEADER, &rows)?;
        self.out.write_json("verdicts.json", &self.verdicts)?;
        Ok(self.verdicts.iter().all(|v| v.holds))
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into())
}

/// Builds the curve named by `src`, sampling torus and circle sources at time
/// `t` on `grid` nodes.
pub fn load_curve(src: &CurveSource, t: f64, grid: usize) -> Result<ClosedCurve, CliError> {
    let given = src.curve.is_some() as u8 + src.torus.is_some() as u8 + src.circle_mult.is_some() as u8;
    if given != 1 {
        return Err(CliError::usage("give exactly one of --curve, --torus, --circle-mult"));
    }
    if let Some(path) = &src.curve {
        return Ok(ClosedCurve::read(path)?);
    }
    if !(t < 0.0) {
        return Err(CliError::usage(format!("sampling time {t} must be negative")));
    }
    if let Some(freqs) = &src.torus {
        return Ok(sample_at(freqs, t, grid)?);
    }
    let m = src.circle_mult.expect("one source is set");
    Ok(MultiCircle::new(m, (-2.0 * t).sqrt())?.sample(grid)?)
}

/// Reference circle of multiplicity `mult` in `plane`, defaulting to the
/// plane of the matching frequency of a torus source.
pub fn reference_circle(
    mult: u32,
    plane: Option<&[usize]>,
    src: &CurveSource,
    dim: usize,
) -> Result<MultiCircle, CliError> {
    let plane = match plane {
        Some([a, b]) => (*a, *b),
        Some(_) => return Err(CliError::usage("--reference-plane takes two axes")),
        None => src
            .torus
            .as_ref()
            .and_then(|f| f.iter().position(|&k| k == mult))
            .map(|j| (2 * j, 2 * j + 1))
            .unwrap_or((0, 1)),
    };
    Ok(MultiCircle::shrinker(mult)?.in_plane(dim, plane)?)
}

pub fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

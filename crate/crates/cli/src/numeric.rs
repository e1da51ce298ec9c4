use std::fmt::Write as _;

use anyhow::{bail, Result};
use latmap::consistency::{numeric_residual, state_from_slice, NumericResidual};
use latmap::exactpoly::rational::{frac, to_text};
use latmap::maps::{ClosedFormMap, Scalar};
use latmap::Rational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands::emit;
use crate::{CommonArgs, MapArg, Mode, Verdict};

pub(crate) struct Settings {
    pub map: MapArg,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub zero_state: bool,
}

const FLOAT_RADIUS_DARBOUX: f64 = 0.3;
const FLOAT_RADIUS_STAR: f64 = 1.0;

fn closed_form(map: MapArg) -> ClosedFormMap {
    match map {
        MapArg::Darboux => ClosedFormMap::DARBOUX,
        MapArg::StarTriangle => ClosedFormMap::STAR_TRIANGLE,
    }
}

/// Draws states until `trials` of them evaluate without a domain error.
/// Returns the six residuals of every accepted state and the number of
/// rejected states.
fn sample<S: Scalar>(
    s: &Settings,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> S,
) -> Result<(Vec<Vec<NumericResidual<S>>>, u64)> {
    let map = closed_form(s.map);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let budget = s.trials.saturating_mul(100).saturating_add(1000);
    let (mut worst, mut rejected) = (Vec::new(), 0u64);
    while (worst.len() as u64) < s.trials {
        let vals: Vec<S> = if s.zero_state {
            vec![S::zero(); 6]
        } else {
            (0..6).map(|_| draw(&mut rng)).collect()
        };
        match numeric_residual(map, &state_from_slice(map, &vals)) {
            Ok(res) => worst.push(res),
            Err(e) if s.zero_state => bail!("the all-zero state is outside the domain: {e}"),
            Err(e) => {
                rejected += 1;
                if rejected > budget {
                    bail!("gave up after rejecting {rejected} states (last: {e}); try --mode float");
                }
            }
        }
    }
    Ok((worst, rejected))
}

pub(crate) fn run(s: &Settings, common: &CommonArgs) -> Result<Verdict> {
    let name = match s.map {
        MapArg::Darboux => "darboux",
        MapArg::StarTriangle => "star-triangle",
    };
    let mut human = String::new();
    let (report, pass) = match s.mode {
        Mode::Exact => {
            let (states, rejected) = sample::<Rational>(s, |rng| frac(rng.gen_range(-9..=9), rng.gen_range(1..=9)))?;
            let worst: Vec<Rational> = states
                .into_iter()
                .map(|res| res.into_iter().map(|r| r.value).max().expect("six residuals"))
                .collect();
            let zero = worst.iter().filter(|r| r.is_zero()).count();
            let largest = worst.iter().max().cloned().unwrap_or_else(<Rational as Zero>::zero);
            let _ = writeln!(human, "{name} exact: {zero}/{} states with all six residuals exactly zero", worst.len());
            let _ = writeln!(human, "rejected states (outside the domain): {rejected}");
            let pass = zero == worst.len();
            let report = json!({
                "map": name, "mode": "exact", "seed": s.seed, "trials": s.trials,
                "exact_zero": zero, "rejected": rejected,
                "largest_residual": to_text(&largest), "pass": pass,
            });
            (report, pass)
        }
        Mode::Float => {
            let radius = match s.map {
                MapArg::Darboux => FLOAT_RADIUS_DARBOUX,
                MapArg::StarTriangle => FLOAT_RADIUS_STAR,
            };
            let (states, rejected) = sample::<f64>(s, |rng| rng.gen_range(-radius..=radius))?;
            let worst: Vec<f64> = states
                .into_iter()
                .map(|res| res.into_iter().map(|r| r.value / r.scale).fold(0.0, f64::max))
                .collect();
            let max = worst.iter().copied().fold(0.0, f64::max);
            let mean = worst.iter().sum::<f64>() / worst.len() as f64;
            let pass = max <= s.tolerance;
            let _ = writeln!(human, "{name} float: {} states from [-{radius}, {radius}]^6", worst.len());
            let _ = writeln!(human, "max residual  {max:.3e}  (|lhs - rhs| / max(1, |lhs|, |rhs|))");
            let _ = writeln!(human, "mean residual {mean:.3e}");
            let _ = writeln!(human, "tolerance     {:.3e} ({})", s.tolerance, if pass { "ok" } else { "exceeded" });
            let _ = writeln!(human, "rejected states (near singular loci): {rejected}");
            let report = json!({
                "map": name, "mode": "float", "seed": s.seed, "trials": s.trials,
                "max_residual": max, "mean_residual": mean, "tolerance": s.tolerance,
                "rejected": rejected, "pass": pass,
            });
            (report, pass)
        }
    };
    emit(&report, &human, common)?;
    Ok(if pass { Verdict::Ok } else { Verdict::Inconsistent })
}

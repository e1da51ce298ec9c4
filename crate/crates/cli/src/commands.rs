use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use latmap::classify::{self, classify_family, solve_homogeneous, solve_order, Classification, ClassifyError};
use latmap::consistency::{second_stage_residual, ResidualReport};
use latmap::gauge::{conjugate, GaugeTransformation};
use latmap::lattice::load_map_family;
use latmap::maps;
use latmap::MapFamily;
use serde_json::json;

use crate::{CommonArgs, Verdict};

pub(crate) fn load(path: Option<&PathBuf>) -> Result<MapFamily> {
    let path = path.ok_or_else(|| anyhow!("no map family given (pass FILE or --input)"))?;
    load_map_family(path).with_context(|| format!("cannot load {}", path.display()))
}

/// Writes the JSON report to --output if given, and prints either the JSON
/// or the human summary.
pub(crate) fn emit(report: &serde_json::Value, human: &str, common: &CommonArgs) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    if let Some(out) = &common.output {
        std::fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;
    }
    if common.json {
        print!("{text}");
    } else {
        print!("{human}");
    }
    Ok(())
}

fn residual_table(report: &ResidualReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<6} {:<6} status", "face", "pair");
    for e in &report.entries {
        let status = match e.first_nonzero_degree() {
            None => format!("zero through degree {}", report.max_degree),
            Some(d) => format!("nonzero at degree {d} ({} terms)", e.slice(d).len()),
        };
        let _ = writeln!(s, "{:<6} ({},{})  {}", e.face.name(), e.k, e.l, status);
    }
    s
}

pub(crate) fn verify(path: Option<&PathBuf>, common: &CommonArgs) -> Result<Verdict> {
    let fam = load(path)?;
    let report = second_stage_residual(&fam, common.order);
    let mut human = residual_table(&report);
    let verdict = match report.first_failure() {
        None => {
            let _ = writeln!(human, "consistent through degree {}", common.order);
            Verdict::Ok
        }
        Some((d, e)) => {
            let _ = writeln!(human, "inconsistent: first failure at degree {d}, face {}, pair ({},{})", e.face.name(), e.k, e.l);
            Verdict::Inconsistent
        }
    };
    let value: serde_json::Value = serde_json::from_str(&report.to_json())?;
    emit(&value, &human, common)?;
    Ok(verdict)
}

pub(crate) fn expand_darboux(common: &CommonArgs) -> Result<Verdict> {
    let text = maps::expand_darboux(common.order).to_json();
    match &common.output {
        Some(out) => {
            std::fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;
            if !common.json {
                println!("wrote Darboux series through order {} to {}", common.order, out.display());
            }
        }
        None => print!("{text}"),
    }
    Ok(Verdict::Ok)
}

fn kernel_dimensions(order: u32) -> Result<Vec<(u32, usize)>> {
    (3..=order)
        .map(|t| Ok((t, solve_homogeneous(&maps::expand_darboux(t), t)?.kernel_dim())))
        .collect()
}

pub(crate) fn classify(path: Option<&PathBuf>, common: &CommonArgs) -> Result<Verdict> {
    let audit = classify::audit();
    let dims = kernel_dimensions(common.order)?;
    let mut human = String::new();
    let _ = writeln!(human, "quadratic conditions: {} equations (branch I: {})", audit.equations, audit.branch_i_equations);
    for (name, (found, total)) in [
        ("alpha*lambda = 0", audit.alpha_lambda),
        ("beta^(i) equalities", audit.beta_equal),
        ("beta^(l) opposites", audit.beta_opposite),
        ("mu*alpha = 0", audit.mu_alpha),
    ] {
        let _ = writeln!(human, "  {name:<22} {found}/{total}");
    }
    let _ = writeln!(human, "kernel dimensions:");
    for (t, d) in &dims {
        let _ = writeln!(human, "  order {t}: {d}");
    }
    let mut verdict = Verdict::Ok;
    let family = match path {
        None => serde_json::Value::Null,
        Some(_) => {
            let fam = load(path)?;
            let c = classify_family(&fam).map_err(|e| match e {
                ClassifyError::Unsupported(m) => anyhow!("cannot classify: {m}"),
                other => anyhow!(other),
            })?;
            let consistent = match &c {
                Classification::Identity { consistent } => *consistent,
                Classification::BranchI {
                    consistent,
                    darboux_equivalent,
                    ..
                } => *consistent && *darboux_equivalent,
                Classification::BranchIScaled {
                    alpha_relations_hold, ..
                } => *alpha_relations_hold,
                Classification::BranchII(v) => v.consistent,
            };
            if !consistent {
                verdict = Verdict::Inconsistent;
            }
            let _ = writeln!(human, "input family: {}", describe(&c));
            serde_json::to_value(&c)?
        }
    };
    let report = json!({
        "quadratic": audit,
        "kernel_dimensions": dims.iter().map(|(t, d)| json!({"order": t, "dim": d})).collect::<Vec<_>>(),
        "family": family,
    });
    emit(&report, &human, common)?;
    Ok(verdict)
}

fn describe(c: &Classification) -> String {
    match c {
        Classification::Identity { consistent } => format!("identity (consistent: {consistent})"),
        Classification::BranchI {
            consistent_up_to,
            darboux_equivalent,
            gauge,
            ..
        } => format!(
            "branch I, consistent through degree {consistent_up_to}, normal form {} Darboux, gauge {}",
            if *darboux_equivalent { "equals" } else { "differs from" },
            gauge
        ),
        Classification::BranchIScaled {
            alpha_relations_hold,
            consistent_up_to,
        } => format!(
            "branch I with scaled leading terms, alpha relations {}, consistent through degree {consistent_up_to}",
            if *alpha_relations_hold { "hold" } else { "fail" }
        ),
        Classification::BranchII(v) => match &v.violation {
            Some(bad) => format!(
                "branch II, multivariate term {} in A[{};{}] at degree {} (residual at degree {} nonzero: {})",
                bad.monomial,
                bad.face,
                bad.dir,
                bad.degree,
                bad.degree + 1,
                bad.residual_nonzero
            ),
            None => format!(
                "branch II, univariate through order {}, commuting: {}, consistent: {}",
                v.univariate_through,
                v.commuting.unwrap_or(false),
                v.consistent
            ),
        },
    }
}

pub(crate) fn kernel(path: Option<&PathBuf>, common: &CommonArgs, dump_matrix: bool) -> Result<Verdict> {
    let base = match path {
        Some(_) => load(path)?,
        None => maps::expand_darboux(common.order),
    };
    let mut rows = Vec::new();
    let mut human = String::new();
    let _ = writeln!(human, "{:<6} {:>8} {:>10} {:>7}", "order", "unknowns", "equations", "kernel");
    let mut verdict = Verdict::Ok;
    for target in 3..=common.order {
        match solve_order(&base, target) {
            Ok(res) => {
                let _ = writeln!(
                    human,
                    "{:<6} {:>8} {:>10} {:>7}",
                    target,
                    res.columns.len(),
                    res.rows.len(),
                    res.kernel_dim()
                );
                rows.push(res.to_json(dump_matrix));
            }
            Err(ClassifyError::Inconsistent { target, row }) => {
                let _ = writeln!(human, "{target:<6} no solution: contradiction in row {row}");
                rows.push(json!({"target": target, "inconsistent_row": row}));
                verdict = Verdict::Inconsistent;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    emit(&json!({ "orders": rows }), &human, common)?;
    Ok(verdict)
}

pub(crate) fn gauge_apply(path: Option<&PathBuf>, gauge: &Path, common: &CommonArgs) -> Result<Verdict> {
    let fam = load(path)?;
    let text = std::fs::read_to_string(gauge).with_context(|| format!("cannot read {}", gauge.display()))?;
    let g = GaugeTransformation::from_json(&text).with_context(|| format!("invalid gauge in {}", gauge.display()))?;
    let out = conjugate(&fam, &g)?;
    let text = out.to_json();
    match &common.output {
        Some(dst) => {
            std::fs::write(dst, &text).with_context(|| format!("cannot write {}", dst.display()))?;
            if !common.json {
                println!("wrote conjugated family (order {}) to {}", out.order(), dst.display());
            }
        }
        None => print!("{text}"),
    }
    Ok(Verdict::Ok)
}

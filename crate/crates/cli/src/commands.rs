//! The four subcommands. Each runs its per-dimension jobs on a worker pool,
//! then assembles reports in ascending `N` on the calling thread.

use anyhow::Result;
use extremal_core::branch::{continue_branch, BranchSummary, ContinuationOptions, Termination};
use extremal_core::certifier::{
    certify_dimension, check_bessel_supersolution, check_hr_domination, check_phi_identity,
    check_vr_over_v, classical_hr_threshold, default_m, lambda_prime_enclosure, CertStatus,
    Certificate, CertifyConfig, DimensionReport, Outcome, ThresholdScan, Verdict,
};
use extremal_core::radial::{format_rational, Dimension};
use extremal_core::Interval;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BranchArgs, RunConfig};
use crate::output::{render, ReportDir, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Certified => EXIT_OK,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
        Outcome::Falsified => EXIT_FALSIFIED,
    }
}

/// Output of a subcommand: what goes to stdout and the exit code.
pub struct Finished {
    pub stdout: String,
    pub code: i32,
}

/// Runs `job` for every dimension on a pool of `cfg.parallelism` threads;
/// results come back in the order of `cfg.dimensions`.
fn per_dimension<T: Send>(
    cfg: &RunConfig,
    job: impl Fn(u32) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()?;
    pool.install(|| cfg.dimensions.par_iter().map(|&n| job(n)).collect())
}

fn certify_config(cfg: &RunConfig) -> CertifyConfig {
    CertifyConfig {
        m: cfg.m.clone(),
        lambda_prime: cfg.lambda_prime.clone(),
        beta: cfg.beta.clone(),
        opts: cfg.search,
    }
}

fn m_for(cfg: &RunConfig, n: u32) -> BigRational {
    cfg.m.clone().unwrap_or_else(|| default_m(n))
}

fn status_word(c: &Certificate) -> &'static str {
    match c.status {
        CertStatus::Certified => "certified",
        CertStatus::Falsified { .. } => "falsified",
        CertStatus::Inconclusive { .. } => "inconclusive",
    }
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::Certified => "certified",
        Outcome::Inconclusive => "inconclusive",
        Outcome::Falsified => "falsified",
    }
}

fn bound_text(x: f64) -> String {
    format!("{x:.4}")
}

fn opt_text(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v}"))
}

fn reports(cfg: &RunConfig) -> Result<Vec<DimensionReport>> {
    let cc = certify_config(cfg);
    per_dimension(cfg, |n| Ok(certify_dimension(n, &cc)?))
}

#[derive(Serialize)]
struct CertifyRow<'a> {
    n: u32,
    m: &'a str,
    s_n: Interval,
    i_n: Interval,
    #[serde(with = "extremal_core::interval::float_text")]
    margin: f64,
    lambda_prime: String,
    beta: String,
    cond1: &'static str,
    cond2: &'static str,
    verdict: &'static str,
    outcome: &'static str,
}

pub fn certify(cfg: &RunConfig, dir: &ReportDir) -> Result<Finished> {
    let reports = reports(cfg)?;
    let mut table = Table::new(vec![
        "N",
        "m",
        "S_N.lo",
        "S_N.hi",
        "I_N.lo",
        "I_N.hi",
        "margin",
        "lambda_prime",
        "beta",
        "cond1",
        "cond2",
        "verdict",
    ]);
    let mut rows = Vec::new();
    for r in &reports {
        dir.write_json(&format!("certify/N{}.json", r.n), r)?;
        let verdict = match r.verdict {
            Verdict::SingularCertified => "singular_certified",
            Verdict::Failed => "failed",
        };
        table.push(vec![
            r.n.to_string(),
            r.m.clone(),
            bound_text(r.s_n.value.lo()),
            bound_text(r.s_n.value.hi()),
            bound_text(r.i_n.value.lo()),
            bound_text(r.i_n.value.hi()),
            bound_text(r.margin),
            r.lambda_prime.to_string(),
            r.beta.to_string(),
            status_word(&r.cond1).into(),
            status_word(&r.cond2).into(),
            verdict.into(),
        ]);
        rows.push(CertifyRow {
            n: r.n,
            m: &r.m,
            s_n: r.s_n.value,
            i_n: r.i_n.value,
            margin: r.margin,
            lambda_prime: r.lambda_prime.to_string(),
            beta: r.beta.to_string(),
            cond1: status_word(&r.cond1),
            cond2: status_word(&r.cond2),
            verdict,
            outcome: outcome_word(r.outcome()),
        });
    }
    let stdout = render(cfg.format, &table, &rows)?;
    dir.write(
        &format!("certify/summary.{}", cfg.format.extension()),
        &stdout,
    )?;
    let worst = reports
        .iter()
        .map(DimensionReport::outcome)
        .max()
        .unwrap_or(Outcome::Certified);
    Ok(Finished {
        stdout,
        code: exit_code(worst),
    })
}

#[derive(Serialize)]
struct TableRow {
    n: u32,
    m: String,
    /// The published pair for `N ≤ 31`, or the closed form and `H_N` when
    /// that regime applies.
    reference_lambda_prime: Option<String>,
    reference_beta: Option<String>,
    s_n: Interval,
    i_n: Interval,
    #[serde(with = "extremal_core::interval::float_text")]
    margin: f64,
    agrees: Option<bool>,
}

pub fn table(cfg: &RunConfig, dir: &ReportDir) -> Result<Finished> {
    let reports = reports(cfg)?;
    let mut table = Table::new(vec![
        "N",
        "m",
        "ref lambda'",
        "ref beta",
        "S_N.lo",
        "S_N.hi",
        "I_N.lo",
        "I_N.hi",
        "margin",
        "agrees",
    ]);
    let mut rows = Vec::new();
    for r in &reports {
        let (ref_l, ref_b, agrees) = match (&r.table_lambda, &r.table_beta, &r.closed_form) {
            (Some(l), Some(b), _) => (
                Some(format!("{l}")),
                Some(format!("{b}")),
                r.agrees_with_published(),
            ),
            (_, _, Some(cf)) if cf.holds => {
                let nn = r.n as i64;
                let label = format!(
                    "8*{}*{}*e^2 = {:.4}",
                    nn - 2,
                    nn - 4,
                    cf.lambda_prime.enclosure().mid()
                );
                // The closed form is the exact supremum for m = 2, and H_N
                // is the constant the certificate checks.
                let ok = r.verdict == Verdict::SingularCertified
                    && !r
                        .s_n
                        .value
                        .intersect(cf.lambda_prime.enclosure())
                        .is_empty();
                (
                    Some(label),
                    Some(format!("H_N = {}", cf.h_n.mid())),
                    Some(ok),
                )
            }
            _ => (None, None, None),
        };
        table.push(vec![
            r.n.to_string(),
            r.m.clone(),
            ref_l.clone().unwrap_or_else(|| "-".into()),
            ref_b.clone().unwrap_or_else(|| "-".into()),
            bound_text(r.s_n.value.lo()),
            bound_text(r.s_n.value.hi()),
            bound_text(r.i_n.value.lo()),
            bound_text(r.i_n.value.hi()),
            bound_text(r.margin),
            agrees.map_or("-".into(), |a| if a { "yes".into() } else { "NO".into() }),
        ]);
        rows.push(TableRow {
            n: r.n,
            m: r.m.clone(),
            reference_lambda_prime: ref_l,
            reference_beta: ref_b,
            s_n: r.s_n.value,
            i_n: r.i_n.value,
            margin: r.margin,
            agrees,
        });
    }
    let stdout = render(cfg.format, &table, &rows)?;
    dir.write(
        &format!("table/summary.{}", cfg.format.extension()),
        &stdout,
    )?;
    Ok(Finished {
        stdout,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct BranchReport {
    summary: BranchSummary,
    /// Certified enclosure of `S_N`, for `N ≥ 13`.
    certified_s_n: Option<Interval>,
    /// `λ* < S_N.lo`; `None` below `N = 13`.
    below_certified_bound: Option<bool>,
}

fn termination_text(t: &Termination) -> String {
    match t {
        Termination::Fold => "fold".into(),
        Termination::Saturated { u0_reached } => format!("saturated (u0 = {u0_reached:.2})"),
        Termination::MaxPoints => "max_points".into(),
        Termination::Stalled { reason } => format!("stalled: {reason}"),
    }
}

pub fn branch(cfg: &RunConfig, args: &BranchArgs, dir: &ReportDir) -> Result<Finished> {
    let opts = ContinuationOptions {
        u0_max: args.u0_max,
        ..ContinuationOptions::default()
    };
    let runs = per_dimension(cfg, |n| {
        let branch = continue_branch(n, &opts)?;
        let s_n = if n >= 13 {
            Some(lambda_prime_enclosure(Dimension::new(n)?, &m_for(cfg, n), &cfg.search)?.value)
        } else {
            None
        };
        Ok((branch, s_n))
    })?;
    let mut table = Table::new(vec![
        "N",
        "lambda_star",
        "verified_lambda_star",
        "verified_u0",
        "termination",
        "fold_lambda",
        "S_N.lo",
        "below_bound",
    ]);
    let mut summaries = Vec::new();
    let (mut stalled, mut violated) = (false, false);
    for (b, s_n) in &runs {
        let mut csv = Vec::new();
        b.write_csv(&mut csv)?;
        dir.write(&format!("branch/N{}.csv", b.n), &String::from_utf8(csv)?)?;
        let summary = b.summary();
        let below = s_n.map(|s| b.lambda_star < s.lo());
        stalled |= matches!(
            b.termination,
            Termination::Stalled { .. } | Termination::MaxPoints
        );
        violated |= below == Some(false);
        table.push(vec![
            b.n.to_string(),
            format!("{:.6}", b.lambda_star),
            format!("{:.6}", summary.lambda_star_verified),
            format!("{:.3}", summary.u0_verified),
            termination_text(&b.termination),
            opt_text(b.fold.map(|f| f.point.lambda)),
            s_n.map_or("-".into(), |s| bound_text(s.lo())),
            below.map_or(
                "-".into(),
                |v| if v { "yes".into() } else { "VIOLATED".into() },
            ),
        ]);
        let report = BranchReport {
            summary,
            certified_s_n: *s_n,
            below_certified_bound: below,
        };
        dir.write_json(&format!("branch/N{}.json", b.n), &report)?;
        summaries.push(report);
    }
    let stdout = render(cfg.format, &table, &summaries)?;
    dir.write(
        &format!("branch/summary.{}", cfg.format.extension()),
        &stdout,
    )?;
    let code = if violated {
        EXIT_FALSIFIED
    } else if stalled {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    Ok(Finished { stdout, code })
}

#[derive(Serialize)]
struct HrRow {
    n: u32,
    phi_identity: Certificate,
    bessel_supersolution: Certificate,
    vr_over_v: Certificate,
    domination: Certificate,
}

impl HrRow {
    fn certificates(&self) -> [&Certificate; 4] {
        [
            &self.phi_identity,
            &self.bessel_supersolution,
            &self.vr_over_v,
            &self.domination,
        ]
    }
}

#[derive(Serialize)]
struct HrSummary<'a> {
    rows: &'a [HrRow],
    classical_threshold: &'a ThresholdScan,
}

pub fn hr_check(cfg: &RunConfig, dir: &ReportDir) -> Result<Finished> {
    let rows = per_dimension(cfg, |n| {
        let d = Dimension::new(n)?;
        Ok(HrRow {
            n,
            phi_identity: check_phi_identity(d)?,
            bessel_supersolution: check_bessel_supersolution(d, &cfg.search)?,
            vr_over_v: check_vr_over_v(d, &cfg.search)?,
            domination: check_hr_domination(d, &cfg.search)?,
        })
    })?;
    let m = cfg.m.clone().unwrap_or_else(|| default_m(13));
    let scan = classical_hr_threshold(&m, &cfg.search)?;

    let mut table = Table::new(vec![
        "N",
        "phi_identity",
        "bessel_supersolution",
        "vr_over_v",
        "domination",
    ]);
    let mut worst = Outcome::Certified;
    for row in &rows {
        dir.write_json(&format!("hr-check/N{}.json", row.n), row)?;
        let mut cells = vec![row.n.to_string()];
        for c in row.certificates() {
            cells.push(status_word(c).into());
            worst = worst.max(match c.status {
                CertStatus::Certified => Outcome::Certified,
                CertStatus::Inconclusive { .. } => Outcome::Inconclusive,
                CertStatus::Falsified { .. } => Outcome::Falsified,
            });
        }
        table.push(cells);
    }
    if scan.threshold.is_none() {
        worst = worst.max(Outcome::Inconclusive);
    }
    dir.write_json("hr-check/classical_threshold.json", &scan)?;
    let mut stdout = render(
        cfg.format,
        &table,
        &HrSummary {
            rows: &rows,
            classical_threshold: &scan,
        },
    )?;
    if cfg.format == crate::config::Format::Text {
        let t = scan
            .threshold
            .map_or_else(|| "undetermined".into(), |n| n.to_string());
        stdout += &format!(
            "classical Hardy-Rellich threshold (m = {}): {t}\n",
            format_rational(&m)
        );
    }
    dir.write(
        &format!("hr-check/summary.{}", cfg.format.extension()),
        &stdout,
    )?;
    Ok(Finished {
        stdout,
        code: exit_code(worst),
    })
}

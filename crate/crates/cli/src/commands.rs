//! The four experiment drivers and their CSV emitters.
//!
//! CSV layout is self-describing: a header row, comma separation, `.`
//! decimals via Rust's shortest round-trip float formatting. Output content
//! is a pure function of the configuration and seed, so reruns produce
//! byte-identical files for any thread count.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use pricing_core::{
    cec_price, paired_compare, rng, run_paths, solve_bellman, summarise, BellmanPolicy, CecPolicy,
    ComparisonStats, OlfcPolicy, Policy, PricingProblem, ValuePolicyTable,
};

use crate::config::ExperimentConfig;
use crate::{CliError, PolicyName};

/// Formats a float for CSV, rejecting non-finite values so NaN/Inf can never
/// leak into an output file.
fn fmt_num(x: f64) -> Result<String, CliError> {
    if !x.is_finite() {
        return Err(CliError::Runtime(format!("non-finite value in output: {x}")));
    }
    Ok(format!("{x}"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())?;
    Ok(())
}

enum AnyPolicy<'a> {
    Bellman(BellmanPolicy<'a>),
    Cec(CecPolicy<'a>),
    Olfc(OlfcPolicy<'a>),
}

impl<'a> AnyPolicy<'a> {
    fn build(
        name: PolicyName,
        problem: &'a PricingProblem,
        table: Option<&'a ValuePolicyTable>,
        cfg: &ExperimentConfig,
    ) -> Result<Self, CliError> {
        Ok(match name {
            PolicyName::Bellman => {
                let table = table.expect("table solved for bellman policy");
                AnyPolicy::Bellman(BellmanPolicy::new(table))
            }
            PolicyName::Cec => AnyPolicy::Cec(CecPolicy::new(problem)),
            PolicyName::Olfc => AnyPolicy::Olfc(OlfcPolicy::new(problem, cfg.olfc())?),
        })
    }

    fn as_dyn(&self) -> &dyn Policy {
        match self {
            AnyPolicy::Bellman(p) => p,
            AnyPolicy::Cec(p) => p,
            AnyPolicy::Olfc(p) => p,
        }
    }
}

/// `solve`: value table, Bellman policy and closed-form CEC policy on the
/// stock grid, one row per node.
pub fn solve(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    let table = solve_bellman(&problem, &cfg.solver())?;
    let horizon = problem.horizon;

    let mut csv = String::from("s");
    for t in 0..=horizon {
        write!(csv, ",v_t{t}").unwrap();
    }
    for t in 0..horizon {
        write!(csv, ",aB_t{t}").unwrap();
    }
    for t in 0..horizon {
        write!(csv, ",aC_t{t}").unwrap();
    }
    csv.push('\n');

    for (i, &s) in table.grid().points().iter().enumerate() {
        csv.push_str(&fmt_num(s)?);
        for t in 0..=horizon {
            write!(csv, ",{}", fmt_num(table.value_row(t)[i])?).unwrap();
        }
        for t in 0..horizon {
            write!(csv, ",{}", fmt_num(table.policy_row(t)[i])?).unwrap();
        }
        for t in 0..horizon {
            write!(csv, ",{}", fmt_num(cec_price(&problem, t, s)?)?).unwrap();
        }
        csv.push('\n');
    }
    write_file(out, &csv)?;

    println!("out = {}", out.display());
    println!("state_points = {}", table.grid().len());
    println!("horizon = {horizon}");
    println!("v_0_s1 = {}", fmt_num(table.value_at(0, 1.0)?)?);
    println!("a_bellman_0_s1 = {}", fmt_num(table.policy_at(0, 1.0)?)?);
    println!("a_cec_0_s1 = {}", fmt_num(cec_price(&problem, 0, 1.0)?)?);
    Ok(())
}

/// `simulate`: per-path posted prices and profit for one policy, plus a
/// labelled summary with profit quantiles and histogram bins.
pub fn simulate(cfg: &ExperimentConfig, name: PolicyName, out: &Path) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    let table = match name {
        PolicyName::Bellman => Some(solve_bellman(&problem, &cfg.solver())?),
        _ => None,
    };
    let policy = AnyPolicy::build(name, &problem, table.as_ref(), cfg)?;
    let records = run_paths(&problem, policy.as_dyn(), cfg.n_sim, cfg.seed)?;

    let mut csv = String::from("path_id");
    for t in 0..problem.horizon {
        write!(csv, ",a_t{t}").unwrap();
    }
    csv.push_str(",profit\n");
    for (k, rec) in records.iter().enumerate() {
        write!(csv, "{k}").unwrap();
        for &a in &rec.prices {
            write!(csv, ",{}", fmt_num(a)?).unwrap();
        }
        writeln!(csv, ",{}", fmt_num(rec.profit)?).unwrap();
    }
    write_file(out, &csv)?;

    let profits: Vec<f64> = records.iter().map(|r| r.profit).collect();
    let mean = profits.iter().sum::<f64>() / profits.len() as f64;
    let hist = pricing_core::histogram(&profits, pricing_core::PROFIT_HIST_BINS)?;

    println!("out = {}", out.display());
    println!("policy = {}", name.as_str());
    println!("n = {}", profits.len());
    println!("mean_profit = {}", fmt_num(mean)?);
    println!("q05_profit = {}", fmt_num(pricing_core::quantile(&profits, 0.05)?)?);
    println!("median_profit = {}", fmt_num(pricing_core::quantile(&profits, 0.5)?)?);
    println!("q95_profit = {}", fmt_num(pricing_core::quantile(&profits, 0.95)?)?);
    println!("histogram_bins = {}", hist.counts.len());
    for (i, &count) in hist.counts.iter().enumerate() {
        println!(
            "hist_{i} = {}:{}:{count}",
            fmt_num(hist.edges[i])?,
            fmt_num(hist.edges[i + 1])?
        );
    }
    Ok(())
}

fn print_stats(stats: &ComparisonStats) -> Result<(), CliError> {
    println!("n = {}", stats.n);
    println!("mean_diff = {}", fmt_num(stats.mean_diff)?);
    println!("q05_rel = {}", fmt_num(stats.q05)?);
    println!("median_rel = {}", fmt_num(stats.median)?);
    println!("q95_rel = {}", fmt_num(stats.q95)?);
    println!("rel_l2 = {}", fmt_num(stats.rel_l2)?);
    println!("frac_a_better = {}", fmt_num(stats.frac_a_better)?);
    println!("excluded_pairs = {}", stats.excluded_pairs);
    Ok(())
}

/// `compare`: paired profits of two policies on shared disturbance paths.
pub fn compare(
    cfg: &ExperimentConfig,
    name_a: PolicyName,
    name_b: PolicyName,
    out: &Path,
) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    let needs_table = name_a == PolicyName::Bellman || name_b == PolicyName::Bellman;
    let table = if needs_table {
        Some(solve_bellman(&problem, &cfg.solver())?)
    } else {
        None
    };
    let policy_a = AnyPolicy::build(name_a, &problem, table.as_ref(), cfg)?;
    let policy_b = AnyPolicy::build(name_b, &problem, table.as_ref(), cfg)?;

    let samples = paired_compare(
        &problem,
        policy_a.as_dyn(),
        policy_b.as_dyn(),
        cfg.n_sim,
        cfg.seed,
    )?;

    let mut csv = String::from("path_id,profit_A,profit_B,diff\n");
    for k in 0..samples.n() {
        let a = samples.profits_a[k];
        let b = samples.profits_b[k];
        writeln!(
            csv,
            "{k},{},{},{}",
            fmt_num(a)?,
            fmt_num(b)?,
            fmt_num(a - b)?
        )
        .unwrap();
    }
    write_file(out, &csv)?;

    let stats = summarise(&samples)?;
    println!("out = {}", out.display());
    println!("policy_a = {}", samples.label_a);
    println!("policy_b = {}", samples.label_b);
    print_stats(&stats)?;
    Ok(())
}

/// Parses "min:max:count" or "v1,v2,..." into a list of grid values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid `{text}` must be min:max:count"));
        }
        let min: f64 = parts[0].parse().map_err(|_| format!("bad grid min `{}`", parts[0]))?;
        let max: f64 = parts[1].parse().map_err(|_| format!("bad grid max `{}`", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad grid count `{}`", parts[2]))?;
        if count < 1 || (count > 1 && max <= min) {
            return Err(format!("grid `{text}` needs count >= 1 and max > min"));
        }
        if count == 1 {
            return Ok(vec![min]);
        }
        Ok((0..count)
            .map(|j| min + (max - min) * j as f64 / (count - 1) as f64)
            .collect())
    } else {
        text.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad grid value `{v}`"))
            })
            .collect()
    }
}

/// Parses "C:gamma,C:gamma,..." into (C, gamma) pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(f64, f64)>, String> {
    text.split(',')
        .map(|pair| {
            let mut it = pair.trim().split(':');
            let c = it
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| format!("bad pair `{pair}`"))?;
            let gamma = it
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| format!("bad pair `{pair}`"))?;
            if it.next().is_some() {
                return Err(format!("bad pair `{pair}`"));
            }
            Ok((c, gamma))
        })
        .collect()
}

struct SweepCell {
    unsold_cost: f64,
    gamma: f64,
    q1: f64,
    q2: f64,
}

/// One output row per sweep cell; failures go to the `error` column and the
/// run continues.
struct SweepRow {
    cell: SweepCell,
    stats: Option<(f64, f64, f64, f64, f64)>, // rel_l2, q05, median, q95, frac_better
    error: Option<String>,
}

fn run_cell(
    cfg: &ExperimentConfig,
    policy_b: PolicyName,
    cell: &SweepCell,
    n_sim: usize,
    seed: u64,
) -> Result<(f64, f64, f64, f64, f64), CliError> {
    let problem = cfg.problem_with(cell.unsold_cost, cell.gamma, cell.q1, cell.q2)?;
    let mut solver = cfg.solver();
    solver.seed = seed;
    let table = solve_bellman(&problem, &solver)?;
    let bellman = BellmanPolicy::new(&table);

    let cell_cfg = {
        let mut c = cfg.clone();
        c.seed = seed;
        c
    };
    let other = AnyPolicy::build(policy_b, &problem, None, &cell_cfg)?;
    let samples = paired_compare(&problem, &bellman, other.as_dyn(), n_sim, seed)?;
    let stats = summarise(&samples)?;
    let frac_b_better = samples
        .profits_b
        .iter()
        .zip(&samples.profits_a)
        .filter(|(b, a)| b > a)
        .count() as f64
        / samples.n() as f64;
    Ok((stats.rel_l2, stats.q05, stats.median, stats.q95, frac_b_better))
}

/// `sweep`: Bellman vs a suboptimal policy over the (q1, q2) grid for each
/// (C, gamma) pair. Cells run in parallel with per-cell seeds derived from
/// `(seed, cell_index)`, so the CSV is schedule-independent.
pub fn sweep(
    cfg: &ExperimentConfig,
    policy_b: PolicyName,
    q1s: &[f64],
    q2s: &[f64],
    cg_pairs: &[(f64, f64)],
    nsim_flag: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    if policy_b == PolicyName::Bellman {
        return Err(CliError::Validation(
            "sweep compares bellman against a suboptimal policy; pick cec or olfc".into(),
        ));
    }
    if q1s.is_empty() || q2s.is_empty() || cg_pairs.is_empty() {
        return Err(CliError::Validation("sweep grids must be non-empty".into()));
    }
    let n_sim = nsim_flag.unwrap_or(cfg.sweep_nsim);

    let cells: Vec<SweepCell> = cg_pairs
        .iter()
        .flat_map(|&(unsold_cost, gamma)| {
            q1s.iter().flat_map(move |&q1| {
                q2s.iter().map(move |&q2| SweepCell {
                    unsold_cost,
                    gamma,
                    q1,
                    q2,
                })
            })
        })
        .collect();

    let rows: Vec<SweepRow> = cells
        .into_par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let seed = rng::derive_key(cfg.seed, &[rng::domain::SWEEP_CELL, idx as u64]);
            match run_cell(cfg, policy_b, &cell, n_sim, seed) {
                Ok(stats) => SweepRow {
                    cell,
                    stats: Some(stats),
                    error: None,
                },
                Err(e) => SweepRow {
                    cell,
                    stats: None,
                    error: Some(e.message().replace([',', '\n'], ";")),
                },
            }
        })
        .collect();

    let mut csv = String::from("C,gamma,q1,q2,relL2,q05,median,q95,fracBetter,error\n");
    let mut failures = 0usize;
    for row in &rows {
        write!(
            csv,
            "{},{},{},{}",
            fmt_num(row.cell.unsold_cost)?,
            fmt_num(row.cell.gamma)?,
            fmt_num(row.cell.q1)?,
            fmt_num(row.cell.q2)?
        )
        .unwrap();
        match (&row.stats, &row.error) {
            (Some((rel_l2, q05, median, q95, frac)), None) => {
                writeln!(
                    csv,
                    ",{},{},{},{},{},",
                    fmt_num(*rel_l2)?,
                    fmt_num(*q05)?,
                    fmt_num(*median)?,
                    fmt_num(*q95)?,
                    fmt_num(*frac)?
                )
                .unwrap();
            }
            (_, Some(message)) => {
                failures += 1;
                writeln!(csv, ",,,,,,{message}").unwrap();
            }
            _ => unreachable!(),
        }
    }
    write_file(out, &csv)?;

    println!("out = {}", out.display());
    println!("policy_b = {}", policy_b.as_str());
    println!("cells = {}", rows.len());
    println!("nsim_per_cell = {n_sim}");
    println!("failures = {failures}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1.0:3.0:3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("2.5").unwrap(), vec![2.5]);
        assert_eq!(parse_grid("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(parse_grid("3:1:5").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(
            parse_pairs("0.5:0.05,1:0.1").unwrap(),
            vec![(0.5, 0.05), (1.0, 0.1)]
        );
        assert!(parse_pairs("0.5").is_err());
        assert!(parse_pairs("0.5:1:2").is_err());
    }
}

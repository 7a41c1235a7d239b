use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use hippo_lab_core::approx::{feasibility_check, first_violation, LogApproximation};
use hippo_lab_core::bits::BitString;
use hippo_lab_core::coding::{forward_codebook, sfe_build, CodingError};
use hippo_lab_core::complexity::{enumerate_km, ComplexityTable, EnumerationBudget};
use hippo_lab_core::dyadic::Dyadic;
use hippo_lab_core::measure::{sample, Measure};
use hippo_lab_core::prefix::{find_overlap, PrefixFreeSet};
use hippo_lab_core::randomness::{
    build_blind_test, build_measure_test, deficiency_profile, sandwich_check, verify_test, DeficiencyProfile,
    TestFamily,
};

use crate::config::{self, cache_dir, table_file_name, ExperimentConfig};
use crate::plot::{line_chart, Series};
use crate::report::RunReport;
use crate::{Cli, Command};

const DEFAULT_OUT: &str = "hippo-lab-out";

pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Enum { budget, out_cap } => cmd_enum(cli, *budget, *out_cap),
        Command::Test { table } => cmd_test(cli, table.as_deref()),
        Command::Deficiency {
            input,
            samples,
            length,
            table,
            no_plot,
        } => cmd_deficiency(cli, input.as_deref(), *samples, *length, table.as_deref(), !no_plot),
        Command::Forward { family, approx } => cmd_forward(cli, family, approx.as_deref()),
        Command::Sample { measure, length } => cmd_sample(cli, measure.as_deref(), *length),
        Command::Feasibility { approx, depth } => cmd_feasibility(cli, approx.as_deref(), *depth),
        Command::Kraft { table, set, level } => cmd_kraft(cli, table.as_deref(), set.as_deref(), *level),
        Command::Sfe { input } => cmd_sfe(cli, input),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    match &cli.config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn require_config(cli: &Cli) -> Result<ExperimentConfig> {
    if cli.config.is_none() {
        bail!("this command needs --config");
    }
    load_config(cli)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn config_echo(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn table_for(cfg: &ExperimentConfig, override_path: Option<&Path>) -> Result<ComplexityTable> {
    match override_path {
        Some(p) => {
            if !p.exists() {
                bail!("complexity table {} not found", p.display());
            }
            Ok(ComplexityTable::from_text(&config::read_file(p)?)?)
        }
        None => cfg.load_table(),
    }
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_optional(cli: &Cli, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn cmd_enum(cli: &Cli, budget: i64, out_cap: usize) -> Result<bool> {
    if budget < 0 {
        bail!("budget must be nonnegative, got {budget}");
    }
    let budget = EnumerationBudget::new(u32::try_from(budget)?, out_cap)?;
    let table = enumerate_km(budget);
    let dir = cli.out.clone().unwrap_or_else(cache_dir);
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(table_file_name(budget));
    std::fs::write(&path, table.to_text()).with_context(|| format!("cannot write {}", path.display()))?;
    println!("{} ({} entries)", path.display(), table.len());
    Ok(true)
}

fn cmd_test(cli: &Cli, table_override: Option<&Path>) -> Result<bool> {
    let cfg = require_config(cli)?;
    let table = table_for(&cfg, table_override)?;
    let la = cfg.build_approximation()?;
    let measure = cfg.build_measure()?;
    if la.is_none() && measure.is_none() {
        bail!("config names neither a measure nor an approximation");
    }
    let bound = cfg.bound.to_bound()?;
    let mut report = RunReport::new("test", config_echo(&cfg), &out_dir(cli));

    let blind = la
        .as_ref()
        .map(|la| build_blind_test(la, &table, cfg.n_max, cfg.horizon));
    if let Some(b) = &blind {
        report.write("blind.family", &b.to_text())?;
        let witness = b.nesting_violation();
        report.check("blind-nesting", witness.is_none(), &witness);
    }

    let measure_family = measure
        .as_ref()
        .map(|m| build_measure_test(m.as_ref(), &table, cfg.n_max, cfg.horizon));
    if let (Some(m), Some(u)) = (&measure, &measure_family) {
        report.write("measure.family", &u.to_text())?;
        let v = verify_test(u, m.as_ref(), &bound);
        report.write_json("verification-measure.json", &v)?;
        report.check("measure-test-bound", v.pass, &v);
    }

    if let (Some(la), Some(m), Some(v_fam), Some(u_fam)) = (&la, &measure, &blind, &measure_family) {
        let violation = first_violation(m.as_ref(), la, cfg.horizon);
        report.check(
            "log-approximation",
            violation.is_none(),
            json!({ "depth": cfg.horizon, "first_violation": violation }),
        );
        let v = verify_test(v_fam, m.as_ref(), &bound);
        report.write_json("verification-blind.json", &v)?;
        report.check("blind-test-bound", v.pass, &v);
        let s = sandwich_check(v_fam, u_fam, la.c())?;
        report.write_json("sandwich.json", &s)?;
        report.check("sandwich", s.holds, &s);
    }

    for c in &report.checks {
        println!("{:<20} {}", c.name, if c.pass { "pass" } else { "FAIL" });
    }
    report.finish()
}

#[derive(Serialize)]
struct SampleProfile {
    input: BitString,
    sup_estimate: Option<(i64, i64)>,
}

#[derive(Serialize)]
struct SampleSummary {
    count: usize,
    length: usize,
    seed: u64,
    /// Sequences whose every prefix lacked a complexity entry.
    no_evidence: usize,
    min_sup_lower: Option<i64>,
    max_sup_lower: Option<i64>,
    mean_sup_lower: Option<f64>,
    histogram: BTreeMap<i64, usize>,
}

fn profile_plot(input: &BitString, profile: &DeficiencyProfile) -> String {
    let running: Vec<(f64, f64)> = profile
        .rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.running_max.map(|m| (i as f64, m.0 as f64)))
        .collect();
    let pointwise: Vec<(f64, f64)> = profile
        .rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.deficiency.map(|d| (i as f64, d.0 as f64)))
        .collect();
    line_chart(
        &format!("deficiency along {input}"),
        "prefix length",
        "-log P - Km_B (lower)",
        &[
            Series {
                label: "running max",
                color: "crimson",
                points: running,
            },
            Series {
                label: "per prefix",
                color: "steelblue",
                points: pointwise,
            },
        ],
    )
}

fn cmd_deficiency(
    cli: &Cli,
    input: Option<&str>,
    samples: Option<usize>,
    length: usize,
    table_override: Option<&Path>,
    plot: bool,
) -> Result<bool> {
    let cfg = require_config(cli)?;
    let table = table_for(&cfg, table_override)?;
    let measure = cfg
        .build_measure()?
        .ok_or_else(|| anyhow!("deficiency needs a measure in the config"))?;
    let mut report = RunReport::new("deficiency", config_echo(&cfg), &out_dir(cli));

    match (input, samples) {
        (Some(s), _) => {
            let x: BitString = s.parse()?;
            let profile = deficiency_profile(&x, measure.as_ref(), &table);
            report.write_json("deficiency.json", &profile)?;
            if plot {
                report.write("deficiency.svg", &profile_plot(&x, &profile))?;
            }
            match profile.sup_estimate() {
                Some((lo, hi)) => println!("sup deficiency estimate: [{lo}, {hi}]"),
                None => println!("sup deficiency estimate: none (no prefix within budget)"),
            }
        }
        (None, Some(count)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut rows = Vec::with_capacity(count);
            let mut histogram = BTreeMap::new();
            let mut lows = Vec::new();
            for _ in 0..count {
                let x = sample(measure.as_ref(), length, &mut rng);
                let profile = deficiency_profile(&x, measure.as_ref(), &table);
                let sup = profile.sup_estimate();
                if let Some((lo, _)) = sup {
                    *histogram.entry(lo).or_insert(0) += 1;
                    lows.push(lo);
                }
                rows.push(SampleProfile {
                    input: x,
                    sup_estimate: sup,
                });
            }
            let summary = SampleSummary {
                count,
                length,
                seed: cli.seed,
                no_evidence: count - lows.len(),
                min_sup_lower: lows.iter().copied().min(),
                max_sup_lower: lows.iter().copied().max(),
                mean_sup_lower: (!lows.is_empty())
                    .then(|| lows.iter().sum::<i64>() as f64 / lows.len() as f64),
                histogram,
            };
            report.write_json("deficiency-samples.json", &rows)?;
            report.write_json("deficiency-summary.json", &summary)?;
            print_json(&summary)?;
        }
        (None, None) => bail!("deficiency needs --input or --samples"),
    }
    report.finish()
}

fn approximation_for(cli: &Cli, path: Option<&Path>) -> Result<LogApproximation> {
    match path {
        Some(p) => config::load_approximation(p),
        None => load_config(cli)?
            .build_approximation()?
            .ok_or_else(|| anyhow!("no log-approximation given (use --approx or the config)")),
    }
}

fn cmd_forward(cli: &Cli, family_path: &Path, approx: Option<&Path>) -> Result<bool> {
    let family = TestFamily::from_text(&config::read_file(family_path)?)?;
    let la = approximation_for(cli, approx)?;
    let cfg = load_config(cli)?;
    let mut report = RunReport::new("forward", config_echo(&cfg), &out_dir(cli));

    let code = match forward_codebook(family.levels(), &la, family.n_max()) {
        Ok(code) => code,
        Err(e @ (CodingError::LevelKraftViolation { .. } | CodingError::ScaledMassAboveOne { .. })) => {
            let level = match &e {
                CodingError::LevelKraftViolation { level, .. } | CodingError::ScaledMassAboveOne { level, .. } => *level,
                _ => unreachable!(),
            };
            eprintln!("level {level}: {e}");
            report.check("level-kraft", false, json!({ "level": level, "error": e.to_string() }));
            report.finish()?;
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    report.check("level-kraft", true, json!(null));
    report.write("forward.code", &code.to_text())?;

    let violations = code.bound_violations(&la);
    report.check(
        "length-bound",
        violations.is_empty(),
        json!({ "constant": code.bound_constant(), "violations": violations }),
    );

    let mut words = Vec::new();
    let mut roundtrip_failures = Vec::new();
    for (n, x) in code.pairs() {
        let bits = code.encode_pair(n, x)?;
        match code.decode_pair(&bits) {
            Ok((m, y, used)) if m == n && &y == x && used == bits.len() => {}
            _ => roundtrip_failures.push((n, x.clone())),
        }
        words.push(bits);
    }
    report.check("roundtrip", roundtrip_failures.is_empty(), &roundtrip_failures);
    let overlap = find_overlap(&words);
    report.check("joint-prefix-free", overlap.is_none(), &overlap);

    if let Some(m) = cfg.build_measure()? {
        let v = code.measure_bound_violations(m.as_ref());
        report.check("measure-length-bound", v.is_empty(), &v);
    }
    for c in &report.checks {
        println!("{:<20} {}", c.name, if c.pass { "pass" } else { "FAIL" });
    }
    report.finish()
}

fn measure_for(cli: &Cli, path: Option<&Path>) -> Result<Box<dyn Measure>> {
    match path {
        Some(p) => config::load_measure(p),
        None => load_config(cli)?
            .build_measure()?
            .ok_or_else(|| anyhow!("no measure given (use --measure or the config)")),
    }
}

fn cmd_sample(cli: &Cli, measure_path: Option<&Path>, length: usize) -> Result<bool> {
    let measure = measure_for(cli, measure_path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let x = sample(measure.as_ref(), length, &mut rng);
    println!("{x}");
    write_optional(cli, "sample.txt", &format!("{x}\n"))?;
    Ok(true)
}

fn cmd_feasibility(cli: &Cli, approx: Option<&Path>, depth: usize) -> Result<bool> {
    if depth > config::MAX_HORIZON {
        bail!("depth {depth} exceeds the limit {}", config::MAX_HORIZON);
    }
    let la = approximation_for(cli, approx)?;
    let report = feasibility_check(&la, depth);
    match &report.violating_node {
        None => println!("feasible-to-depth {depth}"),
        Some(x) => println!("infeasible at {x}"),
    }
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_optional(cli, "feasibility.json", &text)?;
    Ok(report.is_feasible())
}

fn cmd_kraft(cli: &Cli, table: Option<&Path>, set: Option<&Path>, level: Option<usize>) -> Result<bool> {
    let cfg = load_config(cli)?;
    let table = table_for(&cfg, table)?;
    let strings: PrefixFreeSet = match (set, level) {
        (Some(p), _) => PrefixFreeSet::from_lines(&config::read_file(p)?)?,
        (None, Some(k)) if k < 32 => PrefixFreeSet::new(BitString::all_of_length(k))?,
        (None, Some(k)) => bail!("level {k} is too large to enumerate"),
        (None, None) => bail!("kraft needs --set or --level"),
    };
    let sum = table.kraft_sum(&strings);
    let pass = sum <= Dyadic::one();
    println!("kraft sum {sum} over {} strings: {}", strings.len(), if pass { "<= 1" } else { "> 1" });
    write_optional(
        cli,
        "kraft.json",
        &format!("{}\n", json!({ "size": strings.len(), "sum": sum, "pass": pass })),
    )?;
    Ok(pass)
}

fn cmd_sfe(cli: &Cli, input: &Path) -> Result<bool> {
    let mut items = Vec::new();
    for (i, line) in config::read_file(input)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (x, q) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| anyhow!("line {}: expected `x a/2^b`", i + 1))?;
        let x: BitString = x.parse().with_context(|| format!("line {}", i + 1))?;
        let q: Dyadic = q.trim().parse().with_context(|| format!("line {}", i + 1))?;
        items.push((x, q));
    }
    match sfe_build(&items) {
        Ok(book) => {
            let mut text = String::new();
            for e in book.entries() {
                text.push_str(&format!("{} {} {}\n", e.symbol, e.weight, e.codeword));
            }
            print!("{text}");
            write_optional(cli, "codebook.txt", &text)?;
            Ok(true)
        }
        Err(e @ CodingError::KraftViolation { .. }) => {
            eprintln!("{e}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use linext_core::balance::{balance_report_with, trend_csv, trend_report};
use linext_core::engine::exact_stats_with;
use linext_core::families::{catalog_levels, CATALOG_MAX_N};
use linext_core::format::{self, PosetJson};
use linext_core::geometry::{deletion_counts, geometry_from};
use linext_core::rational::{self, round_sig};
use linext_core::sampler::{self, rng};
use linext_core::verifier::{summarize, summary_table, to_json_lines, SummaryRow};
use linext_core::{
    canonical_form, sweep, BalanceReport, Check, CheckReport, ExtensionStats, FamilySpec, GeometryReport,
    IdealLattice, Poset, Severity, Status,
};
use serde::Serialize;

use crate::config::{Config, Format};
use crate::error::CliError;
use crate::Sampled;

type Out = BufWriter<Box<dyn Write>>;

fn stdout() -> Out {
    BufWriter::new(Box::new(io::stdout().lock()))
}

fn file_out(path: &Path) -> Result<Out, CliError> {
    let f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(BufWriter::new(Box::new(f)))
}

fn write(out: &mut Out, s: &str) -> Result<(), CliError> {
    out.write_all(s.as_bytes()).map_err(|e| CliError::Io(format!("write failed: {e}")))
}

fn finish(mut out: Out) -> Result<(), CliError> {
    out.flush().map_err(|e| CliError::Io(format!("write failed: {e}")))
}

fn read_poset(path: Option<&Path>) -> Result<Poset, CliError> {
    let text = match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(format::parse_poset(&text)?)
}

fn form_hex(p: &Poset) -> Option<String> {
    canonical_form(p).ok().map(hex::encode)
}

fn sig(v: f64) -> String {
    format!("{}", round_sig(v))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Analysis<'a> {
    #[serde(flatten)]
    poset: PosetJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical_form: Option<String>,
    stats: &'a ExtensionStats,
    geometry: &'a GeometryReport,
    balance: &'a BalanceReport,
}

pub fn analyze(config: &Config, path: Option<&Path>) -> Result<(), CliError> {
    let p = read_poset(path)?;
    let caps = config.caps();
    let lattice = IdealLattice::build(&p, caps.ideal_cap)?;
    let stats = exact_stats_with(&p, &lattice, caps.enum_cap);
    let geometry = geometry_from(&stats, &deletion_counts(&p, caps.ideal_cap)?);
    let balance = balance_report_with(&p, &lattice, &stats, config.balance())?;
    let mut out = stdout();
    match config.format_or(Format::Json) {
        Format::Json => {
            let a = Analysis {
                poset: PosetJson::from(&p),
                canonical_form: form_hex(&p),
                stats: &stats,
                geometry: &geometry,
                balance: &balance,
            };
            write(&mut out, &serde_json::to_string_pretty(&a).expect("analysis JSON"))?;
            write(&mut out, "\n")?;
        }
        Format::Csv => write(&mut out, &element_table(&stats, &geometry, &balance, ','))?,
        Format::Text => {
            let q = rational::format;
            let pair = balance.delta_pair.map_or("-".to_string(), |(x, y)| format!("{x} {y}"));
            write(
                &mut out,
                &format!(
                    "n {}  e(P) {}  width {}  height {}\ndelta {} (pair {pair})  gap {}  winP {}  vol {}\n\n",
                    p.n(),
                    stats.e,
                    balance.width,
                    balance.height,
                    q(&balance.delta),
                    q(&balance.gap),
                    balance.win_p.as_ref().map_or("-".into(), q),
                    q(&geometry.vol),
                ),
            )?;
            write(&mut out, &element_table(&stats, &geometry, &balance, '\t'))?;
        }
    }
    finish(out)
}

fn element_table(stats: &ExtensionStats, g: &GeometryReport, b: &BalanceReport, sep: char) -> String {
    let q = rational::format;
    let cols = ["element", "h", "H", "sigma2", "varF", "win", "Win", "d", "deltaX"];
    let mut s = cols.join(&sep.to_string());
    s.push('\n');
    for x in 0..stats.n {
        let opt = |v: &Option<Vec<linext_core::Rational>>| v.as_ref().map_or(String::new(), |w| q(&w[x]));
        let row = [
            x.to_string(),
            q(&stats.h[x]),
            q(&g.h_norm[x]),
            q(&stats.sigma2[x]),
            q(&g.var_f[x]),
            opt(&stats.win),
            opt(&g.win_norm),
            q(&g.d[x]),
            q(&b.delta_x[x]),
        ];
        s.push_str(&row.join(&sep.to_string()));
        s.push('\n');
    }
    s
}

pub fn verify(config: &Config, min_n: usize, n: usize, checks: &str, output: Option<&Path>) -> Result<(), CliError> {
    if n > CATALOG_MAX_N {
        return Err(CliError::Usage(format!("--n {n} exceeds the catalog limit {CATALOG_MAX_N}")));
    }
    if min_n == 0 || min_n > n {
        return Err(CliError::Usage(format!("--min-n must lie in 1..={n}")));
    }
    let checks = Check::parse_list(checks).map_err(|e| CliError::Usage(e.to_string()))?;
    let posets: Vec<Poset> = catalog_levels(n)?.into_iter().skip(min_n).flatten().collect();
    let reports = sweep(&posets, &checks, config.parallelism, &config.verify)?;
    let rows = summarize(&reports);
    match config.format_or(Format::Json) {
        Format::Json => {
            let mut out = match output {
                Some(path) => file_out(path)?,
                None => stdout(),
            };
            write(&mut out, &to_json_lines(&reports))?;
            finish(out)?;
            eprint!("{}", summary_table(&rows));
        }
        Format::Text => {
            let mut out = stdout();
            write(&mut out, &summary_table(&rows))?;
            finish(out)?;
        }
        Format::Csv => {
            let mut out = stdout();
            write(&mut out, &summary_csv(&rows))?;
            finish(out)?;
        }
    }
    let failures: Vec<&CheckReport> = reports.iter().filter(|r| r.status == Status::Fail).collect();
    for r in &failures {
        let kind = if r.severity == Severity::Theorem { "THEOREM VIOLATION" } else { "conjecture counterexample" };
        let w = r.witness.as_ref();
        eprintln!(
            "{kind}: {} on poset {} elements {:?}: {}",
            r.check,
            r.poset.as_deref().unwrap_or("?"),
            w.map(|w| w.elements.clone()).unwrap_or_default(),
            w.map_or("", |w| w.description.as_str())
        );
    }
    let hard = failures.iter().filter(|r| r.is_hard_failure()).count();
    if hard > 0 {
        return Err(CliError::TheoremViolation(hard));
    }
    Ok(())
}

fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("check,severity,posets,failures,skipped,errors,extremal\n");
    for r in rows {
        let sev = serde_json::to_value(r.severity).expect("severity");
        s.push_str(&format!(
            "{},{},{},{},{},{},\"{}\"\n",
            r.check,
            sev.as_str().unwrap_or_default(),
            r.posets,
            r.failures,
            r.skipped,
            r.errors,
            r.extremal.as_deref().unwrap_or("")
        ));
    }
    s
}

#[derive(Debug, clap::Args)]
pub struct FamilyArgs {
    /// chain, antichain, komlos, bit, example-11-1, example-11-2 or random
    name: String,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    l: Option<u64>,
    /// Rational, e.g. 1/2
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    levels: Option<u64>,
    /// Edge probability for `random`
    #[arg(long)]
    p: Option<f64>,
    /// Write the poset file here instead of stdout
    #[arg(long)]
    emit: Option<std::path::PathBuf>,
}

pub fn family(config: &Config, args: &FamilyArgs) -> Result<(), CliError> {
    let mut spec = FamilySpec::new(&args.name);
    let ints = [("k", args.k), ("n", args.n), ("t", args.t), ("r", args.r), ("a", args.a), ("l", args.l), ("levels", args.levels)];
    for (key, v) in ints {
        if let Some(v) = v {
            spec = spec.param(key, v);
        }
    }
    if let Some(eps) = &args.eps {
        spec = spec.param("eps", eps);
    }
    if let Some(p) = args.p {
        spec = spec.param("p", p);
    }
    spec.seed = Some(config.seed);
    let inst = spec.build(config.caps()).map_err(|e| if e.is_cap() { CliError::Core(e) } else { CliError::Usage(e.to_string()) })?;
    let text = match config.format_or(Format::Text) {
        Format::Json => format::to_json(&inst.poset) + "\n",
        _ => {
            let params: Vec<String> = spec.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let mut s = format!("# family {} {}\n", spec.name, params.join(" "));
            if !inst.marked.is_empty() {
                let m: Vec<String> = inst.marked.iter().map(usize::to_string).collect();
                s.push_str(&format!("# marked {}\n", m.join(" ")));
            }
            for note in &inst.notes {
                s.push_str(&format!("# {note}\n"));
            }
            s + &format::to_text(&inst.poset)
        }
    };
    let mut out = match &args.emit {
        Some(path) => file_out(path)?,
        None => stdout(),
    };
    write(&mut out, &text)?;
    finish(out)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EstimateReport {
    what: &'static str,
    element: usize,
    #[serde(flatten)]
    estimate: linext_core::Estimate,
    tolerance: f64,
    interval: (String, String),
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tolerance: Option<bool>,
}

pub fn sample(config: &Config, path: &Path, what: Sampled, samples: u64, element: Option<usize>) -> Result<(), CliError> {
    let p = read_poset(Some(path))?;
    let caps = config.caps();
    let mut out = stdout();
    match what {
        Sampled::Extension | Sampled::Point | Sampled::ChainPoint => {
            if element.is_some() {
                return Err(CliError::Usage("--element only applies to win and position".into()));
            }
            let lattice = IdealLattice::build(&p, caps.ideal_cap)?;
            let mut r = rng(config.seed, 0);
            let json = config.format_or(Format::Text) == Format::Json;
            for _ in 0..samples {
                let line = if what == Sampled::Extension {
                    let seq = sampler::sample_extension_exact(&p, &lattice, &mut r);
                    if json {
                        serde_json::to_string(&seq).expect("JSON")
                    } else {
                        seq.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
                    }
                } else {
                    let mut pt = sampler::sample_order_polytope_point(&p, &lattice, &mut r);
                    if what == Sampled::ChainPoint {
                        pt = sampler::transfer_map(&p, &pt)?;
                    }
                    let coords: Vec<String> = pt.coords.iter().map(|&c| sig(c)).collect();
                    if json {
                        format!("[{}]", coords.join(","))
                    } else {
                        coords.join(" ")
                    }
                };
                write(&mut out, &line)?;
                write(&mut out, "\n")?;
            }
        }
        Sampled::Win | Sampled::Position => {
            let x = element.ok_or_else(|| CliError::Usage("--element is required for win and position".into()))?;
            p.check_index(x).map_err(|e| CliError::Usage(e.to_string()))?;
            let usage = |e: linext_core::Error| if e.is_cap() { CliError::Core(e) } else { CliError::Usage(e.to_string()) };
            let (name, estimate) = if what == Sampled::Win {
                ("win", sampler::estimate_win(&p, x, samples, config.seed, caps.ideal_cap).map_err(usage)?)
            } else {
                let est = sampler::estimate_extension_statistic(&p, samples, config.seed, caps.ideal_cap, |seq| {
                    (seq.iter().position(|&y| y == x).expect("element in extension") + 1) as f64
                })
                .map_err(usage)?;
                ("position", est)
            };
            let exact = IdealLattice::build(&p, caps.ideal_cap).ok().and_then(|l| {
                let s = exact_stats_with(&p, &l, caps.enum_cap);
                if what == Sampled::Win {
                    s.win.map(|w| w[x].clone())
                } else {
                    Some(s.h[x].clone())
                }
            });
            let k = config.tolerance;
            let report = EstimateReport {
                what: name,
                element: x,
                estimate,
                tolerance: k,
                interval: (sig(estimate.mean - k * estimate.std_error), sig(estimate.mean + k * estimate.std_error)),
                within_tolerance: exact.as_ref().map(|q| estimate.covers(rational::to_f64(q), k)),
                exact: exact.as_ref().map(rational::format),
            };
            write(&mut out, &serde_json::to_string_pretty(&report).expect("JSON"))?;
            write(&mut out, "\n")?;
        }
    }
    finish(out)
}

pub fn trend(config: &Config, family: &str, params: &[u64]) -> Result<(), CliError> {
    let rows = trend_report(family, params, config.caps(), config.balance())
        .map_err(|e| if e.is_cap() { CliError::Core(e) } else { CliError::Usage(e.to_string()) })?;
    let text = match config.format_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&rows).expect("JSON") + "\n",
        _ => trend_csv(&rows),
    };
    let mut out = stdout();
    write(&mut out, &text)?;
    finish(out)
}

#[derive(Serialize)]
struct CatalogEntry {
    form: String,
    #[serde(flatten)]
    poset: PosetJson,
}

pub fn catalog(config: &Config, n: usize, upto: bool, dir: Option<&Path>) -> Result<(), CliError> {
    if n > CATALOG_MAX_N {
        return Err(CliError::Usage(format!("--n {n} exceeds the catalog limit {CATALOG_MAX_N}")));
    }
    let levels = catalog_levels(n)?;
    let posets: Vec<Poset> = if upto { levels.into_iter().skip(1).flatten().collect() } else { levels[n].clone() };
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for p in &posets {
            let form = form_hex(p).expect("catalog sizes have canonical forms");
            let path = dir.join(format!("{}-{form}.poset", p.n()));
            fs::write(&path, format::to_text(p)).map_err(|e| CliError::io(&path, e))?;
        }
        eprintln!("wrote {} posets to {}", posets.len(), dir.display());
        return Ok(());
    }
    let mut out = stdout();
    for p in &posets {
        let form = form_hex(p).expect("catalog sizes have canonical forms");
        let s = match config.format_or(Format::Json) {
            Format::Text => format!("# form {form}\n{}\n", format::to_text(p)),
            _ => serde_json::to_string(&CatalogEntry { form, poset: PosetJson::from(p) }).expect("JSON") + "\n",
        };
        write(&mut out, &s)?;
    }
    finish(out)
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bose_mesner::catalog::{
    self, build_cyclotomic, build_product, build_schurian, complete_scheme, default_catalog, exit_code, load_directory,
    petersen_scheme, run_catalog, run_loaded, to_json_lines, Check, ProductKind, Record,
};
use bose_mesner::fusion::{bannai_muzychuk_check, enumerate_admissible_partitions, fuse_direct, is_amorphic, AdmissiblePartition};
use bose_mesner::generator::{
    check_theorem_4class, check_theorem_amorphic, check_theorem_fission, check_theorem_one_pair, check_theorem_skew,
    find_generating_unions, generates, verify_witnesses,
};
use bose_mesner::scheme::{verify_axioms, ColorMatrix, Scheme};
use bose_mesner::spectra::{character_table, distinct_eigenvalue_count, union_spectrum, Precision, SpectralOptions, DEFAULT_SEED};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bmscheme", version, about = "Commutative association scheme toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Working precision for floating eigenvalue steps, in bits.
    #[arg(long, global = true, default_value = "64", value_parser = ["64", "128"])]
    precision: String,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms and print valencies, transposes and class kind.
    Verify { file: PathBuf },
    /// Character table, multiplicities and optionally the spectrum of a union.
    Spectrum {
        file: PathBuf,
        /// Relation union such as `1,3`.
        #[arg(long)]
        union: Option<String>,
    },
    /// Test one partition (`1,2/3,4`) or every admissible partition.
    Fuse {
        file: PathBuf,
        #[arg(long)]
        partition: Option<String>,
    },
    /// Amorphic test, normal form and the 2-block SRG check.
    Amorphic { file: PathBuf },
    /// Generation test for one union, or the full search over all unions.
    Generators {
        file: PathBuf,
        #[arg(long)]
        union: Option<String>,
    },
    /// Run every theorem checker on one scheme.
    Theorems { file: PathBuf },
    /// Sweep the bundled catalog, or every file in `--dir`, emitting JSON lines.
    CatalogRun {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Comma-separated subset of: axioms, spectra, fusion, amorphic,
        /// generators, T1.2, T1.3, T1.4, T3.1, T4.1, srg.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Construct a scheme and print it in the scheme file format.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
    },
}

#[derive(Subcommand)]
enum BuildKind {
    Cyclotomic { q: usize, m: usize },
    /// Orbital scheme; each generator is a comma-separated image list.
    Schurian {
        n: usize,
        #[arg(required = true)]
        generators: Vec<String>,
    },
    Product {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Direct)]
        kind: KindArg,
    },
    Complete { n: usize },
    Petersen,
    /// One entry of the bundled catalog, or all of them into `--dir`.
    Catalog {
        id: Option<String>,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Direct,
    Wreath,
}

/// Failure modes mapped onto the process exit status.
enum Failure {
    Input(String),
    Theorem(String),
}

type Outcome = Result<String, Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> Result<Scheme, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let color = ColorMatrix::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    verify_axioms(&color).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_union(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Input(format!("bad relation index {t:?}"))))
        .collect()
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("json values serialize") + "\n",
        Format::Text => {
            let mut out = String::new();
            match value {
                Value::Object(map) => {
                    for (k, v) in map {
                        out.push_str(&format!("{k}: {v}\n"));
                    }
                }
                Value::Array(items) => {
                    for v in items {
                        out.push_str(&format!("{v}\n"));
                    }
                }
                other => out.push_str(&format!("{other}\n")),
            }
            out
        }
    }
}

fn records_text(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        let verdict = match (&r.error, r.applicable, r.holds) {
            (Some(e), _, _) => format!("error: {e}"),
            (None, false, _) => "n/a".to_string(),
            (None, true, Some(true)) => "pass".to_string(),
            (None, true, Some(false)) => "FAIL".to_string(),
            (None, true, None) => "undecided".to_string(),
        };
        out.push_str(&format!("{:<28} {:<10} {verdict}\n", r.id, r.check.name()));
    }
    out
}

fn run(cli: &Cli) -> Outcome {
    let opts = SpectralOptions {
        seed: cli.seed,
        precision: if cli.precision == "128" { Precision::DoubleDouble } else { Precision::F64 },
        ..SpectralOptions::default()
    };
    let fmt = cli.format;
    match &cli.command {
        Command::Verify { file } => {
            let s = load(file)?;
            let v = json!({
                "n": s.n(), "d": s.d(), "valencies": s.valencies(), "transpose": s.transpose_map(),
                "kind": s.class_kind(), "commutative": s.is_commutative(),
                "noncommuting": s.tensor().first_noncommuting(),
            });
            Ok(render(&v, fmt))
        }
        Command::Spectrum { file, union } => {
            let s = load(file)?;
            let e = character_table(&s, &opts).map_err(input)?;
            let mut v = serde_json::to_value(&e).expect("tables serialize");
            if let Some(u) = union {
                let l = parse_union(u)?;
                v["union"] = json!(l);
                v["union_spectrum"] = json!(union_spectrum(&e, &l).map_err(input)?);
                v["distinct_eigenvalue_count"] = json!(distinct_eigenvalue_count(&s, &l).map_err(input)?);
            }
            if fmt == Format::Text {
                let mut out = String::new();
                for (j, row) in e.p.iter().enumerate() {
                    let cells: Vec<String> = (0..row.len())
                        .map(|i| match &e.exact[j][i] {
                            Some(x) => x.to_string(),
                            None => format!("{:.9}", e.entry(j, i)),
                        })
                        .collect();
                    out.push_str(&format!("m={:<4} | {}\n", e.multiplicities[j], cells.join("  ")));
                }
                if let Some(spec) = v.get("union_spectrum") {
                    out.push_str(&format!("union spectrum: {spec}\n"));
                }
                return Ok(out);
            }
            Ok(render(&v, fmt))
        }
        Command::Fuse { file, partition } => {
            let s = load(file)?;
            let e = character_table(&s, &opts).map_err(input)?;
            let parts = match partition {
                Some(p) => {
                    let blocks = p.split('/').map(parse_union).collect::<Result<Vec<_>, _>>()?;
                    vec![AdmissiblePartition::new(&s, blocks).map_err(input)?]
                }
                None => enumerate_admissible_partitions(&s).map_err(input)?,
            };
            let mut rows = Vec::new();
            for pi in parts {
                let verdict = bannai_muzychuk_check(&e, &pi).map_err(input)?;
                let direct = fuse_direct(&s, &pi);
                rows.push(json!({
                    "partition": pi,
                    "is_scheme": verdict.is_scheme,
                    "direct_is_scheme": direct.is_ok(),
                    "dual": verdict.dual,
                    "witness": verdict.witness,
                }));
            }
            Ok(render(&Value::Array(rows), fmt))
        }
        Command::Amorphic { file } => {
            let s = load(file)?;
            Ok(render(&serde_json::to_value(is_amorphic(&s).map_err(input)?).expect("verdicts serialize"), fmt))
        }
        Command::Generators { file, union } => {
            let s = load(file)?;
            let v = match union {
                Some(u) => {
                    let report = generates(&s, &parse_union(u)?).map_err(input)?;
                    let witnesses_ok = verify_witnesses(&s, &report);
                    let mut v = serde_json::to_value(&report).expect("reports serialize");
                    v["witnesses_verified"] = json!(witnesses_ok);
                    v
                }
                None => {
                    let search = find_generating_unions(&s).map_err(input)?;
                    json!({"generating": search.generating, "minimal": search.minimal, "unions_checked": search.reports.len()})
                }
            };
            Ok(render(&v, fmt))
        }
        Command::Theorems { file } => {
            let s = load(file)?;
            let verdicts = vec![
                check_theorem_one_pair(&s).map_err(input)?,
                check_theorem_amorphic(&s, &opts).map_err(input)?,
                check_theorem_4class(&s).map_err(input)?,
                check_theorem_fission(&s, &opts).map_err(input)?,
                check_theorem_skew(&s, &opts).map_err(input)?,
            ];
            let failed: Vec<String> =
                verdicts.iter().filter(|v| v.holds == Some(false)).map(|v| v.theorem.label().to_string()).collect();
            let text = render(&serde_json::to_value(&verdicts).expect("verdicts serialize"), fmt);
            if failed.is_empty() {
                Ok(text)
            } else {
                emit(cli, &text).map_err(input)?;
                Err(Failure::Theorem(format!("theorem check failed: {}", failed.join(", "))))
            }
        }
        Command::CatalogRun { dir, checks, workers } => {
            let checks: Vec<Check> = if checks.is_empty() {
                Check::ALL.to_vec()
            } else {
                checks
                    .iter()
                    .map(|c| Check::parse(c).ok_or_else(|| Failure::Input(format!("unknown check {c:?}"))))
                    .collect::<Result<_, _>>()?
            };
            let records = match dir {
                Some(d) => run_loaded(&load_directory(d).map_err(input)?, &checks, &opts, *workers),
                None => run_catalog(&default_catalog(), &checks, &opts, *workers),
            };
            let text = match fmt {
                Format::Json => to_json_lines(&records),
                Format::Text => records_text(&records),
            };
            match exit_code(&records) {
                0 => Ok(text),
                code => {
                    emit(cli, &text).map_err(input)?;
                    let n = records.iter().filter(|r| r.error.is_some() || r.failed()).count();
                    let msg = format!("{n} record(s) failed or errored");
                    Err(if code == 2 { Failure::Input(msg) } else { Failure::Theorem(msg) })
                }
            }
        }
        Command::Build { kind } => build(kind),
    }
}

fn build(kind: &BuildKind) -> Outcome {
    let scheme = match kind {
        BuildKind::Cyclotomic { q, m } => build_cyclotomic(*q, *m).map_err(input)?,
        BuildKind::Schurian { n, generators } => {
            let gens = generators.iter().map(|g| parse_union(g)).collect::<Result<Vec<_>, _>>()?;
            build_schurian(*n, &gens).map_err(input)?
        }
        BuildKind::Product { first, second, kind } => {
            let k = if *kind == KindArg::Direct { ProductKind::Direct } else { ProductKind::Wreath };
            build_product(&load(first)?, &load(second)?, k).map_err(input)?
        }
        BuildKind::Complete { n } => complete_scheme(*n).map_err(input)?,
        BuildKind::Petersen => petersen_scheme().map_err(input)?,
        BuildKind::Catalog { id, dir } => {
            let entries = default_catalog();
            if let Some(dir) = dir {
                std::fs::create_dir_all(dir).map_err(input)?;
                for e in &entries {
                    std::fs::write(dir.join(format!("{}.scheme", e.id)), e.scheme.to_text()).map_err(input)?;
                }
                return Ok(format!("wrote {} schemes to {}\n", entries.len(), dir.display()));
            }
            let Some(id) = id else {
                return Ok(entries.iter().map(|e| format!("{}\t{}\n", e.id, e.provenance)).collect());
            };
            let e: &catalog::CatalogEntry =
                entries.iter().find(|e| &e.id == id).ok_or_else(|| Failure::Input(format!("no catalog entry {id:?}")))?;
            e.scheme.clone()
        }
    };
    Ok(scheme.to_text())
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Theorem(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

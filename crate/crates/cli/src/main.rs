mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hfk_core::complex::{boundary_at_level, DEFAULT_MAX_GENERATORS};
use hfk_core::gf2::deflate_to_hat;
use hfk_core::grid::{corpus_dir, link_components, load_grid, ValidatedGrid};
use hfk_core::invariants::{bottom_tilde_level, genus, tilde_homology, top_group};
use hfk_core::ledger::{
    b1_sum_check, cor6_obstruction, independent_by_coprimality, irreducibility, p_image, Ledger, LedgerEntry,
};
use hfk_core::murasugi::{cable_top_group_predict, verify_theorem1, verify_theorem2, CaseLink, MurasugiCase};
use hfk_core::snapshot::save_level;
use hfk_core::Error;

use report::{Flavor, InputDigest, RunReport, RunResult, Window, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "hfk", version, about = "Knot Floer homology over GF(2) from grid diagrams")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest Alexander level to build, in generators.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_GENERATORS)]
    max_generators: u64,
    /// Print the run report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tilde or hat homology of a grid.
    Compute {
        grid: PathBuf,
        /// `bottom` stops at the lowest nonzero Alexander level.
        #[arg(long, value_enum, default_value = "full")]
        window: Window,
        /// Divide out the extra basepoint factors.
        #[arg(long)]
        hat: bool,
        /// Write every level complex built into this directory.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Check both Murasugi sum theorems on a case file or a connected sum.
    Murasugi {
        #[arg(required_unless_present = "connect")]
        case: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "case")]
        connect: Option<Vec<PathBuf>>,
    },
    /// Query or extend a ledger of top groups.
    Ledger {
        /// Defaults to the corpus ledger.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(subcommand)]
        query: LedgerQuery,
    },
    /// Predict the top group of a cable and optionally compare to a grid.
    Cable {
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        /// Companion knot.
        grid: PathBuf,
        /// Grid of the cable itself.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LedgerQuery {
    /// Compute a grid's top group and store it under `name`.
    Add { name: String, grid: PathBuf },
    /// Image of a signed multiset; prefix a name with '-' to invert it.
    P {
        #[arg(required = true, allow_hyphen_values = true)]
        names: Vec<String>,
    },
    /// Pairwise coprimality of the top polynomials.
    Indep {
        #[arg(required = true, num_args = 2..)]
        names: Vec<String>,
    },
    /// Whether a top group is supported in more than one Maslov grading.
    Cor6 { name: String },
    /// Whether the first Betti number bounds are consistent for a sum.
    B1check { a: String, b: String, sum: String },
}

struct Run {
    inputs: Vec<InputDigest>,
    level_sizes: BTreeMap<i32, u64>,
}

impl Run {
    fn grid(&mut self, path: &Path) -> Result<ValidatedGrid, Error> {
        self.digest(path)?;
        load_grid(path)
    }

    fn digest(&mut self, path: &Path) -> Result<(), Error> {
        match std::fs::read(path) {
            Ok(bytes) => {
                self.inputs.push(InputDigest::of(path, &bytes));
                Ok(())
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::FileNotFound(path.into())),
            Err(e) => Err(Error::Io { path: path.into(), source: e }),
        }
    }
}

fn compute(
    run: &mut Run,
    path: &Path,
    window: Window,
    hat: bool,
    snapshot: Option<&Path>,
    max: u64,
) -> Result<RunResult, Error> {
    let g = run.grid(path)?;
    let components = link_components(&g);
    let factors = g.size() - components;
    let (flavor, ranks) = match window {
        Window::Full => {
            let t = tilde_homology(&g, max)?;
            run.level_sizes = t.level_sizes;
            if hat {
                (Flavor::Hat, deflate_to_hat(&t.ranks, factors)?)
            } else {
                (Flavor::Tilde, t.ranks)
            }
        }
        Window::Bottom => {
            let (_, ranks, sizes) = bottom_tilde_level(&g, max)?;
            run.level_sizes = sizes;
            if hat {
                let s = 2 * factors as i32;
                (Flavor::Hat, ranks.shifted(s, s))
            } else {
                (Flavor::Tilde, ranks)
            }
        }
    };
    if let Some(dir) = snapshot {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
        for &a in run.level_sizes.keys() {
            save_level(dir.join(format!("level_{a}.hfkl")), &boundary_at_level(&g, a, max)?)?;
        }
    }
    Ok(RunResult::Ranks { flavor, window, components, total: ranks.total(), ranks })
}

fn murasugi(run: &mut Run, case: Option<&Path>, connect: Option<&[PathBuf]>, max: u64) -> Result<RunResult, Error> {
    let case = match (case, connect) {
        (_, Some([a, b])) => {
            let a = CaseLink::new(run.grid(a)?, None)?;
            let b = CaseLink::new(run.grid(b)?, None)?;
            MurasugiCase::connected(a, b)?
        }
        (Some(path), _) => {
            run.digest(path)?;
            MurasugiCase::load(path)?
        }
        _ => unreachable!("clap requires a case or two --connect grids"),
    };
    let (r1, r2) = rayon::join(|| verify_theorem1(&case, max), || verify_theorem2(&case, max));
    let reports = vec![r1?, r2?];
    let pass = reports.iter().all(|r| r.pass);
    Ok(RunResult::Murasugi { reports, pass })
}

fn ledger(run: &mut Run, file: &Path, query: &LedgerQuery, max: u64) -> Result<RunResult, Error> {
    if file.exists() {
        run.digest(file)?;
    }
    let mut l = Ledger::load(file)?;
    match query {
        LedgerQuery::Add { name, grid } => {
            let g = run.grid(grid)?;
            let entry = LedgerEntry::from_grid(name.clone(), &g, grid.display().to_string(), max)?;
            l.add(entry.clone())?;
            l.save(file)?;
            Ok(RunResult::LedgerAdd { entry })
        }
        LedgerQuery::P { names } => {
            let value = p_image(&l.signed(names)?)?;
            Ok(RunResult::LedgerP { names: names.clone(), trivial: value.is_one(), value })
        }
        LedgerQuery::Indep { names } => {
            let entries = names.iter().map(|n| l.get(n)).collect::<Result<Vec<_>, _>>()?;
            let independent = independent_by_coprimality(&entries)?;
            Ok(RunResult::LedgerIndep { names: names.clone(), independent })
        }
        LedgerQuery::Cor6 { name } => {
            let e = l.get(name)?;
            Ok(RunResult::LedgerCor6 {
                name: name.clone(),
                obstructed: cor6_obstruction(e),
                irreducibility: irreducibility(&e.top_poincare),
            })
        }
        LedgerQuery::B1check { a, b, sum } => Ok(RunResult::LedgerB1Check {
            consistent: b1_sum_check(l.get(a)?, l.get(b)?, l.get(sum)?),
            names: [a.clone(), b.clone(), sum.clone()],
        }),
    }
}

fn cable(run: &mut Run, p: i64, q: i64, path: &Path, compare: Option<&Path>, max: u64) -> Result<RunResult, Error> {
    let g = run.grid(path)?;
    if link_components(&g) != 1 {
        return Err(Error::NotAKnot(link_components(&g)));
    }
    let (g2, top) = rayon::join(|| genus(&g, max), || top_group(&g, max));
    let prediction = cable_top_group_predict(p, q, g2?, &top?.poincare)?;
    let direct = match compare {
        Some(path) => Some(top_group(&run.grid(path)?, max)?),
        None => None,
    };
    let matches = direct
        .as_ref()
        .map(|t| t.alex2_top == prediction.alex2 && t.poincare == prediction.poincare);
    Ok(RunResult::Cable { prediction, direct, matches })
}

fn half(v: i32) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{v}/2")
    }
}

fn print_text(result: &RunResult) {
    match result {
        RunResult::Ranks { ranks, .. } => {
            for ((m2, a2), r) in ranks.iter() {
                println!("M={:<5} A={:<5} rank {r}", half(m2), half(a2));
            }
        }
        RunResult::Murasugi { reports, pass } => {
            for r in reports {
                println!("{:?} {}: {}", r.theorem, r.case, if r.pass { "PASS" } else { "FAIL" });
                for l in &r.links {
                    let mut line = format!("  {:<9} {}", l.role, l.label);
                    if let (Some(a2), Some(p)) = (l.alex2_bottom, &l.poincare) {
                        line += &format!("  bottom A={} poincare {p}", half(a2));
                    }
                    if let Some(t) = l.tau_top_is_g {
                        line += &format!("  tau_top=g {t}");
                    }
                    println!("{line}");
                }
                if let Some(p) = &r.product {
                    println!("  product   {p}");
                }
            }
            println!("{}", if *pass { "PASS" } else { "FAIL" });
        }
        RunResult::LedgerAdd { entry } => println!("{} {} b1>={}", entry.name, entry.top_poincare, entry.b1_min),
        RunResult::LedgerP { value, .. } => println!("{value}"),
        RunResult::LedgerIndep { independent, .. } => println!("{independent}"),
        RunResult::LedgerCor6 { obstructed, irreducibility, .. } => {
            println!("{} ({irreducibility:?})", if *obstructed { "obstructed" } else { "unobstructed" })
        }
        RunResult::LedgerB1Check { consistent, .. } => println!("{consistent}"),
        RunResult::Cable { prediction, direct, matches } => {
            println!("predicted top A={} poincare {}", half(prediction.alex2), prediction.poincare);
            if let (Some(d), Some(m)) = (direct, matches) {
                println!("computed  top A={} poincare {}", half(d.alex2_top), d.poincare);
                println!("{}", if *m { "MATCH" } else { "MISMATCH" });
            }
        }
    }
}

fn execute(cli: &Cli, run: &mut Run) -> Result<RunResult, Error> {
    let max = cli.max_generators;
    match &cli.command {
        Command::Compute { grid, window, hat, snapshot } => compute(run, grid, *window, *hat, snapshot.as_deref(), max),
        Command::Murasugi { case, connect } => murasugi(run, case.as_deref(), connect.as_deref(), max),
        Command::Ledger { file, query } => {
            let file = file.clone().unwrap_or_else(|| corpus_dir().join("ledger.json"));
            ledger(run, &file, query, max)
        }
        Command::Cable { p, q, grid, compare } => cable(run, *p, *q, grid, compare.as_deref(), max),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let mut run = Run { inputs: Vec::new(), level_sizes: BTreeMap::new() };
    let result = match execute(&cli, &mut run) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return ExitCode::from(if matches!(e, Error::ResourceBound { .. }) { 3 } else { 2 });
        }
    };
    let passed = result.passed();
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: std::env::args().collect(),
        inputs: run.inputs,
        result,
        level_sizes: run.level_sizes,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_text(&report.result);
    }
    ExitCode::from(if passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(result: RunResult, run: Run) {
        let report = RunReport {
            schema_version: SCHEMA_VERSION,
            tool_version: "test".into(),
            command: vec!["hfk".into()],
            inputs: run.inputs,
            result,
            level_sizes: run.level_sizes,
            wall_time_ms: 0,
        };
        let text = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<RunReport>(&text).unwrap(), report);
    }

    fn fresh() -> Run {
        Run { inputs: Vec::new(), level_sizes: BTreeMap::new() }
    }

    #[test]
    fn computed_reports_round_trip() {
        let dir = corpus_dir();
        let mut run = fresh();
        let r = compute(&mut run, &dir.join("hopf_pos4.grid"), Window::Full, true, None, DEFAULT_MAX_GENERATORS).unwrap();
        round_trip(r, run);
        let mut run = fresh();
        let case = dir.join("cases").join("hopf_plumbing_trefoil.json");
        let r = murasugi(&mut run, Some(&case), None, DEFAULT_MAX_GENERATORS).unwrap();
        assert!(r.passed());
        round_trip(r, run);
        let mut run = fresh();
        let r = cable(&mut run, 2, -3, &dir.join("unknot2.grid"), Some(&dir.join("trefoil_left5.grid")), DEFAULT_MAX_GENERATORS)
            .unwrap();
        assert!(r.passed());
        round_trip(r, run);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let path = corpus_dir().join("knot5_2.grid");
        let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        let run_with = |n| {
            pool(n).install(|| compute(&mut fresh(), &path, Window::Full, false, None, DEFAULT_MAX_GENERATORS).unwrap())
        };
        assert_eq!(run_with(1), run_with(4));
    }

    #[test]
    fn bottom_window_agrees_with_full_hat() {
        let path = corpus_dir().join("figure8_6.grid");
        let full = compute(&mut fresh(), &path, Window::Full, true, None, DEFAULT_MAX_GENERATORS).unwrap();
        let bottom = compute(&mut fresh(), &path, Window::Bottom, true, None, DEFAULT_MAX_GENERATORS).unwrap();
        let (RunResult::Ranks { ranks: full, .. }, RunResult::Ranks { ranks: bottom, .. }) = (full, bottom) else {
            panic!("compute returns ranks");
        };
        let lowest = full.min_alex2().unwrap();
        let expected: hfk_core::gf2::BigradedRanks = full.iter().filter(|((_, a), _)| *a == lowest).collect();
        assert_eq!(bottom, expected);
    }
}

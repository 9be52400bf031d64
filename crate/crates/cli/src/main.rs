//! Command-line front end: parse space/map/iso files, run validations,
//! convolutions, extensions, unit searches, transport/recovery, and kernel
//! benchmarks.
//!
//! Exit status contract: 0 on pass/success, 1 on an axiom or property
//! violation (machine-readable report on stdout), 2 on usage or schema
//! errors. Reports are JSON with a stable field order; the human summary
//! goes to stderr.

use std::fmt::Display;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use pmskit_core::distributions::{sibley_distance, DistFn, WeakTolerance};
use pmskit_core::files::{
    self, iso_from_file, map_from_file, phi_from_file, to_iso_file, to_map_file, to_phi_file,
    total_map_from_file, FileError, IsoFile, MapFile, Parsed, PhiFile,
};
use pmskit_core::generate::{Gen, DEFAULT_SEED};
use pmskit_core::lipschitz::{delta_embed, is_one_lipschitz, mcshane_extend, LipschitzError};
use pmskit_core::monoid::{
    completion_member, extended_map_distance, inverse_search_oracle, recover_iso, sup_conv_maps,
    transport_iso, unit_inverse, MonoidError,
};
use pmskit_core::rational::Rat;
use pmskit_core::report::Report;
use pmskit_core::spaces::ProbGroup;
use pmskit_core::tnorms::{sup_conv_frontier, sup_conv_naive, TNorm, TriangleFn};

#[derive(Parser)]
#[command(name = "pmskit", about = "Exact toolkit for probabilistic metric structures", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a space or group file against every axiom it claims.
    Validate { file: String },
    /// Convolve two distribution files under a triangle function.
    Conv {
        #[arg(long)]
        tf: TriangleFn,
        f: String,
        l: String,
    },
    /// Sibley (modified Levy) distance between two distribution files.
    Levy {
        f: String,
        l: String,
        /// Bisection tolerance in (0, 1].
        #[arg(long, default_value = "1/1048576")]
        tol: Rat,
    },
    /// Check a total map for the probabilistic 1-Lipschitz property.
    Lipcheck { space: String, map: String },
    /// Extend a partial 1-Lipschitz map to the whole carrier.
    Extend { space: String, map: String },
    /// Search the unit group of the map monoid over a candidate family.
    Units {
        group: String,
        /// Extra random candidates beyond the point maps and their shifts.
        #[arg(long, default_value_t = 16)]
        candidates: usize,
    },
    /// Transport an isometric isomorphism to the map monoids; emits the
    /// point-map image table consumable by `recover`.
    Transport {
        ga: String,
        gb: String,
        iso: String,
    },
    /// Recover the point isomorphism from a point-map image table.
    Recover {
        ga: String,
        gb: String,
        phi: String,
    },
    /// Compare the naive and frontier convolution kernels.
    Bench {
        /// Comma-separated operand sizes (jumps per operand).
        #[arg(long, value_delimiter = ',', default_value = "64,256")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "product")]
        tnorm: TNorm,
    },
}

/// Failure modes mapped to the exit-status contract.
enum Failure {
    /// Axiom or property violation: report JSON on stdout, exit 1.
    Violation(serde_json::Value),
    /// Usage or schema problem: message on stderr, exit 2.
    Usage(String),
}

impl Failure {
    fn usage(err: impl Display) -> Failure {
        Failure::Usage(err.to_string())
    }
}

fn from_file_error(command: &str, err: FileError) -> Failure {
    match err {
        FileError::SpaceAxioms(report) | FileError::GroupAxioms(report) => {
            Failure::Violation(report_envelope(command, &report))
        }
        other => Failure::usage(other),
    }
}

#[derive(Serialize)]
struct ReportEnvelope<'a> {
    command: &'a str,
    passed: bool,
    report: &'a Report,
}

fn report_envelope(command: &str, report: &Report) -> serde_json::Value {
    serde_json::to_value(ReportEnvelope {
        command,
        passed: report.passed,
        report,
    })
    .expect("reports serialize")
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{path}`: {e}")))
}

fn load_space(command: &str, path: &str) -> Result<Parsed, Failure> {
    files::parse_space(&read(path)?).map_err(|e| from_file_error(command, e))
}

fn load_group(command: &str, path: &str) -> Result<ProbGroup, Failure> {
    match load_space(command, path)? {
        Parsed::Group(g) => Ok(g),
        Parsed::Space(_) => Err(Failure::Usage(format!(
            "`{command}` needs a group file; `{path}` has no group section"
        ))),
    }
}

fn load_dist(path: &str) -> Result<DistFn, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Usage(format!("cannot parse `{path}` as a distribution: {e}")))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Usage(format!("cannot parse `{path}` as {what}: {e}")))
}

fn emit(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("outputs serialize")
    );
}

fn seed_from_env() -> u64 {
    std::env::var("PMSKIT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(value)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("reports serialize")
            );
            eprintln!("violation: see report on stdout");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Conv { tf, f, l } => conv(tf, &f, &l),
        Command::Levy { f, l, tol } => levy(&f, &l, tol),
        Command::Lipcheck { space, map } => lipcheck(&space, &map),
        Command::Extend { space, map } => extend(&space, &map),
        Command::Units { group, candidates } => units(&group, candidates),
        Command::Transport { ga, gb, iso } => transport(&ga, &gb, &iso),
        Command::Recover { ga, gb, phi } => recover(&ga, &gb, &phi),
        Command::Bench { sizes, tnorm } => bench(&sizes, tnorm),
    }
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    command: &'a str,
    kind: &'a str,
    points: usize,
    passed: bool,
}

fn validate(file: &str) -> Result<(), Failure> {
    let parsed = load_space("validate", file)?;
    let (kind, points) = match &parsed {
        Parsed::Space(s) => ("space", s.len()),
        Parsed::Group(g) => ("group", g.len()),
    };
    emit(&ValidateOutput {
        command: "validate",
        kind,
        points,
        passed: true,
    });
    eprintln!("ok: {kind} with {points} points passes all axioms");
    Ok(())
}

fn conv(tf: TriangleFn, f_path: &str, l_path: &str) -> Result<(), Failure> {
    let f = load_dist(f_path)?;
    let l = load_dist(l_path)?;
    let result = tf.combine(&f, &l);
    // Bare distribution encoding, so the output can feed back in as an input.
    emit(&result);
    eprintln!("ok: {tf} convolution with {} jumps", result.jumps().len());
    Ok(())
}

#[derive(Serialize)]
struct LevyOutput<'a> {
    command: &'a str,
    distance: Rat,
    tol: Rat,
}

fn levy(f_path: &str, l_path: &str, tol: Rat) -> Result<(), Failure> {
    let f = load_dist(f_path)?;
    let l = load_dist(l_path)?;
    let tol = WeakTolerance::new(tol).map_err(Failure::usage)?;
    let distance = sibley_distance(&f, &l, &tol);
    eprintln!("ok: distance {distance} within {}", tol.eps());
    emit(&LevyOutput {
        command: "levy",
        distance,
        tol: tol.eps().clone(),
    });
    Ok(())
}

#[derive(Serialize)]
struct LipcheckOutput<'a> {
    command: &'a str,
    passed: bool,
}

fn lipcheck(space_path: &str, map_path: &str) -> Result<(), Failure> {
    let parsed = load_space("lipcheck", space_path)?;
    let map_file: MapFile = load_json(map_path, "a map file")?;
    let map = total_map_from_file(&map_file, parsed.space())
        .map_err(|e| from_file_error("lipcheck", e))?;
    let report = is_one_lipschitz(parsed.space(), map.values());
    if !report.passed {
        return Err(Failure::Violation(report_envelope("lipcheck", &report)));
    }
    emit(&LipcheckOutput {
        command: "lipcheck",
        passed: true,
    });
    eprintln!("ok: map is probabilistic 1-Lipschitz");
    Ok(())
}

fn extend(space_path: &str, map_path: &str) -> Result<(), Failure> {
    let parsed = load_space("extend", space_path)?;
    let space = parsed.space();
    let map_file: MapFile = load_json(map_path, "a map file")?;
    let (domain, values) =
        map_from_file(&map_file, space).map_err(|e| from_file_error("extend", e))?;
    match mcshane_extend(space, &domain, &values) {
        Ok(extended) => {
            let all: Vec<usize> = (0..space.len()).collect();
            emit(&to_map_file(space, &all, extended.values()));
            eprintln!(
                "ok: extended from {} to {} points",
                domain.len(),
                space.len()
            );
            Ok(())
        }
        Err(LipschitzError::NotLipschitz(report)) => {
            Err(Failure::Violation(report_envelope("extend", &report)))
        }
        Err(other) => Err(Failure::usage(other)),
    }
}

#[derive(Serialize)]
struct UnitsOutput<'a> {
    command: &'a str,
    candidates: usize,
    units: Vec<String>,
    consistent: bool,
}

fn units(group_path: &str, extra: usize) -> Result<(), Failure> {
    let g = load_group("units", group_path)?;
    if !g.tf().is_sup_continuous() {
        return Err(Failure::Usage(
            "`units` needs a sup-continuous triangle function".into(),
        ));
    }
    let mut gen = Gen::new(seed_from_env());
    let mut candidates: Vec<_> = (0..g.len())
        .map(|a| delta_embed(g.space(), a).expect("index in range"))
        .collect();
    for _ in 0..extra {
        candidates.push(gen.lip_map(g.space(), 2));
    }
    let mut units = Vec::new();
    let mut consistent = true;
    for f in &candidates {
        let searched = inverse_search_oracle(&g, f, &candidates).map_err(Failure::usage)?;
        let analytic = unit_inverse(&g, f).map_err(Failure::usage)?;
        if searched != analytic {
            consistent = false;
        }
        if analytic.is_some() {
            if let Some(x) = completion_member(&g, f) {
                units.push(g.label(x).to_string());
            }
        }
    }
    units.sort();
    units.dedup();
    let output = UnitsOutput {
        command: "units",
        candidates: candidates.len(),
        units,
        consistent,
    };
    if !consistent {
        return Err(Failure::Violation(
            serde_json::to_value(&output).expect("outputs serialize"),
        ));
    }
    eprintln!(
        "ok: {} units among {} candidates, search agrees with the analytic route",
        output.units.len(),
        output.candidates
    );
    emit(&output);
    Ok(())
}

fn monoid_failure(command: &str, err: MonoidError) -> Failure {
    match err {
        MonoidError::InvalidIso(report) => Failure::Violation(report_envelope(command, &report)),
        MonoidError::NotDeltaImage(_) | MonoidError::OracleUndefined(_) => {
            Failure::Violation(serde_json::json!({
                "command": command,
                "error": "structural",
                "detail": err.to_string(),
            }))
        }
        other => Failure::usage(other),
    }
}

fn transport(ga_path: &str, gb_path: &str, iso_path: &str) -> Result<(), Failure> {
    let ga = load_group("transport", ga_path)?;
    let gb = load_group("transport", gb_path)?;
    let iso_file: IsoFile = load_json(iso_path, "an iso witness")?;
    let iso =
        iso_from_file(&iso_file, &ga, &gb).map_err(|e| from_file_error("transport", e))?;
    let phi = transport_iso(&ga, &gb, &iso).map_err(|e| monoid_failure("transport", e))?;

    // Spot-check the monoid laws travel across, on a seeded family.
    let mut gen = Gen::new(seed_from_env());
    for _ in 0..8 {
        let f = gen.lip_map(ga.space(), 2);
        let h = gen.lip_map(ga.space(), 2);
        let lhs = phi.transport(&sup_conv_maps(&ga, &f, &h).map_err(Failure::usage)?);
        let rhs = sup_conv_maps(&gb, &phi.transport(&f), &phi.transport(&h))
            .map_err(Failure::usage)?;
        if lhs != rhs
            || extended_map_distance(&ga, &f, &h)
                != extended_map_distance(&gb, &phi.transport(&f), &phi.transport(&h))
        {
            return Err(Failure::Violation(serde_json::json!({
                "command": "transport",
                "error": "transport does not preserve the monoid structure",
            })));
        }
    }

    let images: Vec<_> = (0..ga.len())
        .map(|a| phi.transport(&delta_embed(ga.space(), a).expect("index in range")))
        .collect();
    emit(&to_phi_file(&ga, &gb, &images));
    eprintln!("ok: transported {} point maps; monoid laws preserved on samples", ga.len());
    Ok(())
}

fn recover(ga_path: &str, gb_path: &str, phi_path: &str) -> Result<(), Failure> {
    let ga = load_group("recover", ga_path)?;
    let gb = load_group("recover", gb_path)?;
    let phi_file: PhiFile = load_json(phi_path, "a phi table")?;
    let oracle = phi_from_file(&phi_file, &ga, &gb).map_err(|e| from_file_error("recover", e))?;
    let witness = recover_iso(&ga, &gb, &oracle).map_err(|e| monoid_failure("recover", e))?;
    emit(&to_iso_file(&ga, &gb, &witness));
    eprintln!("ok: recovered a verified isometric isomorphism");
    Ok(())
}

#[derive(Serialize)]
struct BenchLine {
    size: usize,
    naive_ns: u128,
    frontier_ns: u128,
    output_jumps: usize,
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    command: &'a str,
    tnorm: TNorm,
    results: Vec<BenchLine>,
}

fn bench(sizes: &[usize], tnorm: TNorm) -> Result<(), Failure> {
    let mut gen = Gen::new(seed_from_env());
    let mut results = Vec::new();
    for &size in sizes {
        if size == 0 {
            return Err(Failure::Usage("bench sizes must be positive".into()));
        }
        let f = gen.bench_operand(size);
        let l = gen.bench_operand(size);
        let naive = sup_conv_naive(tnorm, &f, &l);
        let frontier = sup_conv_frontier(tnorm, &f, &l);
        if naive != frontier {
            return Err(Failure::Violation(serde_json::json!({
                "command": "bench",
                "error": "kernel outputs differ",
                "size": size,
            })));
        }
        let time = |kernel: fn(TNorm, &DistFn, &DistFn) -> DistFn| {
            let start = Instant::now();
            std::hint::black_box(kernel(tnorm, &f, &l));
            start.elapsed().as_nanos()
        };
        results.push(BenchLine {
            size,
            naive_ns: time(sup_conv_naive),
            frontier_ns: time(sup_conv_frontier),
            output_jumps: frontier.jumps().len(),
        });
    }
    for line in &results {
        eprintln!(
            "size {}: naive {}ns, frontier {}ns, {} jumps out",
            line.size, line.naive_ns, line.frontier_ns, line.output_jumps
        );
    }
    emit(&BenchOutput {
        command: "bench",
        tnorm,
        results,
    });
    Ok(())
}

//! Batch experiment front end for the specrad workbench.
//!
//! Subcommands run one experiment each against an instance file or a seeded
//! random instance, print a human-readable table, and optionally write a
//! machine-readable JSON report. `suite` runs every experiment with derived
//! seeds and aggregates the results.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 parse failure,
//! 3 precondition violation, 4 internal numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use specrad::algebra::{
    random_commuting_family, random_matrix, AlgebraElement, AlgebraSignature, IdealSpec,
    Polynomial,
};
use specrad::io::{Check, InstanceFile, OracleSection, Report, ReportMeta};
use specrad::linalg::{self, CMatrix};
use specrad::olsen::{
    approximate_olsen, kernel_triangularize, minimal_factors, olsen_perturbation,
    PerturbationResult,
};
use specrad::oracle::{lower_bound_audit, similarity_search};
use specrad::similarity::{optimal_similarity, simultaneous_contraction, Mode};
use specrad::{Error, Result};

const REPORT_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "specrad", version, about = "spectral radius similarity workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Common similarity witness for a commuting family: max{r, quotient norm}.
    Formula(FormulaArgs),
    /// Exact norm-flattening perturbation for a polynomial family.
    Olsen(OlsenArgs),
    /// Epsilon version of the norm-flattening perturbation.
    ApproximateOlsen(OlsenArgs),
    /// One similarity contracting two commuting elements at once.
    Pair(PairArgs),
    /// Kernel-chain unitary block triangularization of one matrix.
    Triangularize(TriangularizeArgs),
    /// Run every experiment with derived seeds and summarize.
    Suite(SuiteArgs),
}

/// Flags shared by every experiment.
#[derive(Args, Clone)]
struct CommonArgs {
    /// RNG seed for instance generation and oracle search.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Slack for the epsilon branch of the formula.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    /// Override the pass/fail tolerance on equality checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Objective evaluation budget for the search oracle.
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    /// Number of oracle restarts.
    #[arg(long, default_value_t = 4)]
    starts: usize,
    /// Disable the theorem-blind search oracle.
    #[arg(long)]
    no_oracle: bool,
    /// Write the machine-readable JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Instance source: a file, or a seeded generator described by flags.
#[derive(Args, Clone)]
struct SourceArgs {
    /// Read the instance from this JSON file instead of generating one.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Block dimensions for generated instances, e.g. "2,3".
    #[arg(long, default_value = "3")]
    dims: String,
    /// 1-based ideal block indices for generated instances, e.g. "1"
    /// ("all" selects every block).
    #[arg(long, default_value = "all")]
    ideal: String,
    /// Spectral-radius target for generated elements.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Quotient-norm target for generated elements (proper ideals only).
    #[arg(long)]
    quotient: Option<f64>,
}

#[derive(Args)]
struct FormulaArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// Number of commuting elements to generate.
    #[arg(long, default_value_t = 2)]
    count: usize,
    /// Demand the exact branch: achieved equals the quotient norm.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct OlsenArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// Polynomial as comma-separated real coefficients, constant term first
    /// (repeatable); default is the identity polynomial "0,1".
    #[arg(long = "poly")]
    polys: Vec<String>,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct TriangularizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct SuiteArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Formula(a) => run_and_emit("formula", &a.common, |c| run_formula(&a, c)),
        Command::Olsen(a) => run_and_emit("olsen", &a.common, |c| run_olsen(&a, c, true)),
        Command::ApproximateOlsen(a) => {
            run_and_emit("approximate-olsen", &a.common, |c| run_olsen(&a, c, false))
        }
        Command::Pair(a) => run_and_emit("pair", &a.common, |c| run_pair(&a, c)),
        Command::Triangularize(a) => {
            run_and_emit("triangularize", &a.common, |c| run_triangularize(&a, c))
        }
        Command::Suite(a) => run_suite(&a),
    };
    match outcome {
        Ok(all_pass) => {
            println!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::InvalidInput(_)
        | Error::PreconditionViolation(_)
        | Error::NotCommuting { .. }
        | Error::AttainmentUnavailable(_)
        | Error::NotInSigma(_)
        | Error::QuotientEmpty
        | Error::ShapeMismatch(_) => 3,
        _ => 4,
    }
}

/// Runs one experiment, prints its table, and writes the JSON report.
fn run_and_emit(
    name: &str,
    common: &CommonArgs,
    run: impl FnOnce(&CommonArgs) -> Result<Report>,
) -> Result<bool> {
    let report = run(common)?;
    print_report(&report);
    if let Some(path) = &common.out {
        std::fs::write(path, report.to_string_pretty())
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    }
    let _ = name;
    Ok(report.all_pass())
}

fn print_report(report: &Report) {
    println!(
        "experiment: {}  seed: {}",
        report.meta.experiment, report.meta.seed
    );
    if !report.targets.is_empty() {
        println!("  {:<4} {:>22} {:>22}", "j", "target", "achieved");
        for (j, (t, a)) in report.targets.iter().zip(&report.achieved).enumerate() {
            println!("  {:<4} {:>22.16} {:>22.16}", j + 1, t, a);
        }
    }
    if let Some(oracle) = &report.oracle {
        println!(
            "  oracle: best {:.16} after {} evaluations / {} starts",
            oracle.best_value, oracle.evaluations, oracle.starts
        );
        if let Some(m) = oracle.audit_min_margin {
            println!("  oracle: audit min margin {m:.3e}");
        }
    }
    for check in &report.checks {
        println!(
            "  {} {:<44} value={:.16e} bound={:.16e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.value,
            check.bound
        );
    }
}

/// Loads the instance from a file or generates a seeded commuting family.
fn load_or_generate(
    source: &SourceArgs,
    seed: u64,
    count: usize,
) -> Result<(IdealSpec, Vec<(String, AlgebraElement)>)> {
    if let Some(path) = &source.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let file = InstanceFile::parse(&text)?;
        let ideal = file.ideal()?;
        let elements = file.all_elements()?;
        if elements.is_empty() {
            return Err(Error::InvalidInput("instance file has no elements".into()));
        }
        return Ok((ideal, elements));
    }
    let dims = parse_usize_list(&source.dims)?;
    let signature = AlgebraSignature::new(dims)?;
    let ideal_blocks = if source.ideal == "all" {
        (0..signature.block_count()).collect()
    } else {
        parse_usize_list(&source.ideal)?
            .into_iter()
            .map(|b| {
                if b == 0 || b > signature.block_count() {
                    Err(Error::InvalidInput(format!(
                        "ideal block {b} out of range 1..={}",
                        signature.block_count()
                    )))
                } else {
                    Ok(b - 1)
                }
            })
            .collect::<Result<_>>()?
    };
    let ideal = IdealSpec::new(signature, ideal_blocks)?;
    let family = random_commuting_family(&ideal, count, seed, source.radius, source.quotient)?;
    let named = family
        .into_iter()
        .enumerate()
        .map(|(i, el)| (format!("a{}", i + 1), el))
        .collect();
    Ok((ideal, named))
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidInput(format!("bad integer list {text:?}: {e}")))
        })
        .collect()
}

fn parse_poly(text: &str) -> Result<Polynomial> {
    let coeffs: Vec<f64> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad coefficient list {text:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("empty coefficient list".into()));
    }
    Ok(Polynomial::from_real(&coeffs))
}

fn equality_tol(common: &CommonArgs, default: f64) -> f64 {
    common.tol.unwrap_or(default)
}

fn run_formula(args: &FormulaArgs, common: &CommonArgs) -> Result<Report> {
    let (ideal, named) = load_or_generate(&args.source, common.seed, args.count)?;
    let elements: Vec<AlgebraElement> = named.iter().map(|(_, el)| el.clone()).collect();
    let mode = if args.exact {
        Mode::Exact
    } else {
        Mode::Epsilon(common.eps)
    };
    let witness = optimal_similarity(&elements, &ideal, mode)?;

    let mut checks = Vec::new();
    let slack = if args.exact {
        equality_tol(common, 1e-8)
    } else {
        common.eps
    };
    for (j, (name, _)) in named.iter().enumerate() {
        checks.push(Check::upper(
            format!("achieved_le_target_plus_slack[{name}]"),
            witness.achieved[j],
            witness.targets[j] + slack,
        ));
        checks.push(Check::lower(
            format!("achieved_ge_target[{name}]"),
            witness.achieved[j],
            witness.targets[j] - 1e-9,
        ));
    }
    checks.push(Check::upper(
        "e_in_ideal_residual",
        witness.in_ideal_residual,
        1e-12,
    ));

    let oracle = if common.no_oracle {
        None
    } else {
        let search = similarity_search(&elements, &ideal, common.budget, common.starts, common.seed)?;
        let audit_trials = common.budget.clamp(1, 1000);
        let audit = lower_bound_audit(&elements, &ideal, audit_trials, common.seed)?;
        let worst_target = witness
            .targets
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::lower(
            "oracle_best_ge_target",
            search.best_value,
            worst_target - 1e-9,
        ));
        checks.push(Check::lower("oracle_audit_min_margin", audit, -1e-9));
        Some(OracleSection {
            best_value: search.best_value,
            evaluations: search.evaluations,
            starts: search.starts,
            audit_min_margin: Some(audit),
        })
    };

    Ok(Report {
        meta: meta("formula", common.seed),
        instance: InstanceFile::from_elements(&ideal, &named),
        targets: witness.targets.clone(),
        achieved: witness.achieved.clone(),
        oracle,
        checks,
    })
}

fn run_olsen(args: &OlsenArgs, common: &CommonArgs, exact: bool) -> Result<Report> {
    let (ideal, named) = load_or_generate(&args.source, common.seed, 1)?;
    let (t_name, t) = &named[0];
    let polys: Vec<Polynomial> = if args.polys.is_empty() {
        vec![Polynomial::t()]
    } else {
        args.polys
            .iter()
            .map(|s| parse_poly(s))
            .collect::<Result<_>>()?
    };
    let result: PerturbationResult = if exact {
        olsen_perturbation(t, &ideal, &polys)?
    } else {
        approximate_olsen(t, &ideal, &polys, common.eps)?
    };

    let mut checks = Vec::new();
    let tol = equality_tol(common, 1e-6);
    for (i, (target, achieved)) in result.targets.iter().zip(&result.achieved).enumerate() {
        if exact {
            checks.push(Check::upper(
                format!("norm_matches_quotient_norm[p{}]", i + 1),
                (achieved - target).abs(),
                tol,
            ));
        } else {
            checks.push(Check::upper(
                format!("norm_le_quotient_norm_plus_eps[p{}]", i + 1),
                *achieved,
                target + common.eps + 1e-8,
            ));
            checks.push(Check::lower(
                format!("norm_ge_quotient_norm[p{}]", i + 1),
                *achieved,
                target - 1e-9,
            ));
        }
    }
    let (_, k_residual) = specrad::algebra::is_in_ideal(&result.k, &ideal, 1e-12)?;
    checks.push(Check::upper("k_in_ideal_residual", k_residual, 1e-12));

    let oracle = if common.no_oracle {
        None
    } else {
        // Search over the commuting family the construction actually contracts.
        let shifted = t.add(&result.fill)?;
        let family: Vec<AlgebraElement> = polys
            .iter()
            .map(|p| p.eval_element(&shifted))
            .collect::<Result<_>>()?;
        let search = similarity_search(&family, &ideal, common.budget, common.starts, common.seed)?;
        let worst_target = result
            .targets
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::lower(
            "oracle_best_ge_target",
            search.best_value,
            worst_target - 1e-9,
        ));
        Some(OracleSection {
            best_value: search.best_value,
            evaluations: search.evaluations,
            starts: search.starts,
            audit_min_margin: None,
        })
    };

    let instance = InstanceFile::from_elements(&ideal, &[(t_name.clone(), t.clone())]);
    Ok(Report {
        meta: meta(
            if exact { "olsen" } else { "approximate-olsen" },
            common.seed,
        ),
        instance,
        targets: result.targets.clone(),
        achieved: result.achieved.clone(),
        oracle,
        checks,
    })
}

fn run_pair(args: &PairArgs, common: &CommonArgs) -> Result<Report> {
    let (ideal, a, b, s) = if args.source.file.is_some() {
        let (ideal, named) = load_or_generate(&args.source, common.seed, 0)?;
        let find = |want: &str| -> Result<AlgebraElement> {
            named
                .iter()
                .find(|(name, _)| name == want)
                .map(|(_, el)| el.clone())
                .ok_or_else(|| Error::Parse(format!("pair instance needs element {want:?}")))
        };
        (ideal, find("a")?, find("b")?, find("s")?)
    } else {
        generate_pair_instance(&args.source, common.seed)?
    };
    let out = simultaneous_contraction(&a, &b, &s)?;

    let checks = vec![
        Check::upper("conjugated_a_strict_contraction", out.norm_a, 1.0 - 1e-12),
        Check::upper("conjugated_b_contraction", out.norm_b, 1.0 + 1e-9),
    ];
    let named = [
        ("a".to_string(), a),
        ("b".to_string(), b),
        ("s".to_string(), s),
    ];
    Ok(Report {
        meta: meta("pair", common.seed),
        instance: InstanceFile::from_elements(&ideal, &named),
        targets: vec![1.0, 1.0],
        achieved: vec![out.norm_a, out.norm_b],
        oracle: None,
        checks,
    })
}

/// Commuting (a, b) as polynomials of a shared base element, with a random
/// well-conditioned s and b rescaled so s b s^{-1} is a contraction.
fn generate_pair_instance(
    source: &SourceArgs,
    seed: u64,
) -> Result<(IdealSpec, AlgebraElement, AlgebraElement, AlgebraElement)> {
    use rand_chacha::rand_core::SeedableRng;
    let dims = parse_usize_list(&source.dims)?;
    let signature = AlgebraSignature::new(dims.clone())?;
    let ideal = IdealSpec::full(signature.clone());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let radius = source.radius.min(0.95);

    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    let mut s_blocks = Vec::new();
    for &d in &dims {
        let g = random_matrix(&mut rng, d);
        let p = Polynomial::from_real(&[0.0, 1.0, 0.3]);
        let q = Polynomial::from_real(&[0.2, 0.0, 1.0]);
        let mut am = p.eval_matrix(&g)?;
        let r = linalg::spec_radius(&am)?;
        if r > 0.0 {
            am.mapv_inplace(|z| z * num_complex::Complex64::from(radius / r));
        }
        // s = I + small random part: invertible with modest condition number
        let mut sm = random_matrix(&mut rng, d);
        sm.mapv_inplace(|z| z * num_complex::Complex64::from(0.2));
        let sm = sm + linalg::identity(d);
        let mut bm = q.eval_matrix(&g)?;
        let sb = conjugate_matrix(&sm, &bm)?;
        let nsb = linalg::op_norm(&sb)?;
        if nsb > 0.0 {
            bm.mapv_inplace(|z| z * num_complex::Complex64::from(1.0 / nsb));
        }
        a_blocks.push(am);
        b_blocks.push(bm);
        s_blocks.push(sm);
    }
    Ok((
        ideal,
        AlgebraElement::new(signature.clone(), a_blocks)?,
        AlgebraElement::new(signature.clone(), b_blocks)?,
        AlgebraElement::new(signature, s_blocks)?,
    ))
}

fn conjugate_matrix(s: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let s_inv = linalg::inverse(s)?;
    Ok(s.dot(x).dot(&s_inv))
}

fn run_triangularize(args: &TriangularizeArgs, common: &CommonArgs) -> Result<Report> {
    let (ideal, named) = if args.source.file.is_some() {
        load_or_generate(&args.source, common.seed, 1)?
    } else {
        use rand_chacha::rand_core::SeedableRng;
        let dims = parse_usize_list(&args.source.dims)?;
        let signature = AlgebraSignature::new(vec![dims[0]])?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common.seed);
        let m = random_matrix(&mut rng, dims[0]);
        let el = AlgebraElement::new(signature.clone(), vec![m])?;
        (IdealSpec::full(signature), vec![("t".to_string(), el)])
    };
    let (t_name, t_el) = &named[0];
    if t_el.blocks.len() != 1 {
        return Err(Error::InvalidInput(
            "triangularize expects a single-block element".into(),
        ));
    }
    let t = &t_el.blocks[0];
    let factors = minimal_factors(t, 1e-7)?;
    let out = kernel_triangularize(t, &factors)?;

    let scale = 1.0 + linalg::op_norm(t)?;
    let tol = equality_tol(common, 1e-8);
    let udu = linalg::adjoint(&out.u).dot(&out.u) - linalg::identity(t.nrows());
    let unitary_residual = linalg::op_norm(&udu)?;
    let checks = vec![
        Check::upper("unitary_residual", unitary_residual, 1e-10),
        Check::upper("strict_lower_block_residual", out.residual, tol * scale),
        Check::upper(
            "diagonal_scalar_residual",
            out.diagonal_residual,
            tol * scale,
        ),
    ];
    Ok(Report {
        meta: meta("triangularize", common.seed),
        instance: InstanceFile::from_elements(&ideal, &[(t_name.clone(), t_el.clone())]),
        targets: vec![0.0, 0.0],
        achieved: vec![out.residual, out.diagonal_residual],
        oracle: None,
        checks,
    })
}

/// Runs every experiment in parallel with per-experiment derived seeds.
fn run_suite(args: &SuiteArgs) -> Result<bool> {
    let common = &args.common;
    let jobs: Vec<(usize, &str)> = vec![
        (0, "formula"),
        (1, "olsen"),
        (2, "approximate-olsen"),
        (3, "pair"),
        (4, "triangularize"),
    ];
    let results: Vec<Result<Report>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(index, name)| {
                let mut sub = common.clone();
                sub.seed = common.seed ^ index as u64;
                sub.out = None;
                scope.spawn(move || suite_job(name, &sub))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut reports = Vec::new();
    for ((_, name), result) in jobs.iter().zip(results) {
        match result {
            Ok(report) => reports.push(report),
            Err(e) => return Err(Error::NumericalFailure(format!("suite job {name}: {e}"))),
        }
    }
    let mut all_pass = true;
    println!("suite: seed {} ({} experiments)", common.seed, reports.len());
    for report in &reports {
        let failed = report.checks.iter().filter(|c| !c.pass).count();
        let status = if failed == 0 { "PASS" } else { "FAIL" };
        all_pass &= failed == 0;
        println!(
            "  {status} {:<20} seed={:<4} checks={} failed={}",
            report.meta.experiment,
            report.meta.seed,
            report.checks.len(),
            failed
        );
    }
    if let Some(path) = &common.out {
        let body = serde_json::to_string_pretty(&reports).expect("reports serialize");
        std::fs::write(path, body)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(all_pass)
}

fn suite_job(name: &str, common: &CommonArgs) -> Result<Report> {
    let source = SourceArgs {
        file: None,
        dims: "2,3".into(),
        ideal: "1".into(),
        radius: 0.4,
        quotient: Some(0.8),
    };
    match name {
        "formula" => run_formula(
            &FormulaArgs {
                common: common.clone(),
                source,
                count: 2,
                exact: false,
            },
            common,
        ),
        "olsen" => run_olsen(
            &OlsenArgs {
                common: common.clone(),
                source,
                polys: vec!["0,1".into()],
            },
            common,
            true,
        ),
        "approximate-olsen" => run_olsen(
            &OlsenArgs {
                common: common.clone(),
                source,
                polys: vec!["0,1".into(), "0,0,1".into()],
            },
            common,
            false,
        ),
        "pair" => run_pair(
            &PairArgs {
                common: common.clone(),
                source: SourceArgs {
                    dims: "3".into(),
                    ideal: "all".into(),
                    ..source
                },
            },
            common,
        ),
        "triangularize" => run_triangularize(
            &TriangularizeArgs {
                common: common.clone(),
                source: SourceArgs {
                    dims: "4".into(),
                    ideal: "all".into(),
                    ..source
                },
            },
            common,
        ),
        _ => unreachable!("unknown suite job"),
    }
}

fn meta(experiment: &str, seed: u64) -> ReportMeta {
    ReportMeta {
        version: REPORT_VERSION.into(),
        experiment: experiment.into(),
        seed,
    }
}

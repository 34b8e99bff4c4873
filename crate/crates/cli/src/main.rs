//! Command-line front end for the bound-state solver: load a well system
//! from JSON, then solve spectra, scan eigenvalue flows, sample wave
//! functions, verify structural theorems, or compare closed forms.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on usage
//! or input errors. All file output is written to a temporary file first and
//! renamed into place, so no partial files survive an error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use deltaspec::eigen::{eigen_decompose, scan_flow};
use deltaspec::model::{energy_from_kappa, SystemConfig};
use deltaspec::phimatrix::gamma_phi_equivalence;
use deltaspec::spectrum::{
    bracket_kappa_max, circulant_bound_states, circulant_coefficients, circulant_eigenvalues,
    circulant_matrix, degeneracy_report, find_bound_states, mode_pairing, twin_closed_form,
    Spectrum, DEFAULT_KAPPA_TOL,
};
use deltaspec::theorems::{
    ground_state_check, interlacing_check, monotonicity_check, perron_check, removal_shift_check,
    CheckReport, CheckStatus, DEFAULT_PERRON_EPSILON,
};
use deltaspec::wavefunction::{build_wavefunction, inner_product, PiecewiseExpWaveFunction};
use deltaspec::{DeltaSystem, Error, Kappa, PhysicalConstants};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "deltaspec",
    version,
    about = "Bound states of attractive delta wells on a line",
    long_about = "Solves the bound-state spectrum of finitely many attractive delta wells, \
                  scans eigenvalue flows, samples wave functions, and verifies the structural \
                  theorems the spectrum obeys. Systems are described by a JSON file \
                  {\"hbar\", \"mass\", \"centers\", \"strengths\"} (hbar defaults to 1, \
                  mass to 1/2). Equidistant chains of three or more equal wells are solved \
                  in the cyclic-distance idealization, which makes mirror-mode pairs exactly \
                  degenerate; all other geometries use the open-chain matrix."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the spectrum: energies, wave numbers, null vectors, coefficients.
    Solve(SolveArgs),
    /// Sample every eigenvalue branch on a wave-number grid (CSV + roots JSON).
    Flow(FlowArgs),
    /// Sample a normalized bound-state wave function (CSV).
    Wavefunction(WavefunctionArgs),
    /// Run structural checks and report pass/fail/inapplicable per check.
    Verify(VerifyArgs),
    /// Compare the two-well Lambert-W closed form against the numeric solver.
    Twin(TwinArgs),
    /// Solve the equidistant ring model and cross-check the dense solver.
    Circulant(CirculantArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// System description JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    /// System description JSON.
    #[arg(long)]
    config: PathBuf,
    /// Lower edge of the wave-number grid (default: 1e-3 of the bracket).
    #[arg(long)]
    kappa_min: Option<f64>,
    /// Upper edge of the wave-number grid (default: the root bracket).
    #[arg(long)]
    kappa_max: Option<f64>,
    /// Number of geometrically spaced samples.
    #[arg(long, default_value_t = 400)]
    samples: usize,
    /// CSV output path; the zero-crossing JSON goes next to it with a
    /// `.roots.json` extension (default: CSV on stdout, crossings on stderr).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WavefunctionArgs {
    /// System description JSON.
    #[arg(long)]
    config: PathBuf,
    /// Bound level to sample, counted from the most bound (0-based).
    #[arg(long, default_value_t = 0)]
    state: usize,
    /// Left edge of the sampling window (default: 10 decay lengths out).
    #[arg(long)]
    xmin: Option<f64>,
    /// Right edge of the sampling window (default: 10 decay lengths out).
    #[arg(long)]
    xmax: Option<f64>,
    /// Number of sample points.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Output path; a degenerate level writes one file per member with
    /// `_a`, `_b` suffixes (default: multi-column CSV on stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// System description JSON.
    #[arg(long)]
    config: PathBuf,
    /// Which checks to run.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Perron,
    Interlacing,
    Removal,
    Fh,
    Gamma,
    Degeneracy,
}

#[derive(Args)]
struct TwinArgs {
    /// Separation of the two wells.
    #[arg(long)]
    a: f64,
    /// Common well strength.
    #[arg(long)]
    lambda: f64,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CirculantArgs {
    /// Number of wells in the equidistant chain.
    #[arg(long)]
    n: usize,
    /// Spacing between neighboring wells.
    #[arg(long)]
    a: f64,
    /// Common well strength.
    #[arg(long)]
    lambda: f64,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Wavefunction(args) => cmd_wavefunction(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Twin(args) => cmd_twin(args),
        Command::Circulant(args) => cmd_circulant(args),
    }
}

fn load_system(path: &Path) -> Result<DeltaSystem> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading system file {}", path.display()))?;
    let config: SystemConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing system file {}", path.display()))?;
    config
        .into_system()
        .with_context(|| format!("validating system from {}", path.display()))
}

/// Equidistant uniform chains of three or more wells are solved in the
/// cyclic-distance idealization (exactly degenerate mirror pairs); all other
/// geometries use the open-chain matrix. Both routes report the same shape.
fn spectrum_for(sys: &DeltaSystem) -> Result<Spectrum> {
    if sys.is_equidistant_uniform() && sys.len() >= 3 {
        Ok(circulant_bound_states(sys, DEFAULT_KAPPA_TOL)?)
    } else {
        Ok(find_bound_states(sys, DEFAULT_KAPPA_TOL)?)
    }
}

/// Writes through a temporary file in the target directory, then renames
/// into place, so a failed run leaves no partial output.
fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            tmp.write_all(content.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            tmp.persist(path)
                .with_context(|| format!("renaming into {}", path.display()))?;
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn system_json(sys: &DeltaSystem) -> Value {
    json!({
        "hbar": sys.constants().hbar,
        "mass": sys.constants().mass,
        "centers": sys.centers(),
        "strengths": sys.strengths(),
    })
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let sys = load_system(&args.config)?;
    let spectrum = spectrum_for(&sys)?;
    let mut doc = spectrum.to_json();
    let states_json = doc
        .get_mut("states")
        .and_then(Value::as_array_mut)
        .expect("spectrum JSON has a states array");
    for (state, value) in spectrum.states().iter().zip(states_json) {
        let mut members = Vec::new();
        for member in 0..state.multiplicity {
            let wf = build_wavefunction(&sys, state, member)?;
            members.push(json!({
                "member": member,
                "kappa": wf.kappa(),
                "anchors": wf.anchors(),
                "coefficients": wf.coefficients(),
                "normalization": wf.norm(),
            }));
        }
        value
            .as_object_mut()
            .expect("state serializes as an object")
            .insert("wavefunctions".to_string(), Value::Array(members));
    }
    doc.as_object_mut()
        .expect("spectrum JSON is an object")
        .insert("system".to_string(), system_json(&sys));
    write_output(args.out.as_deref(), &pretty(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_flow(args: FlowArgs) -> Result<ExitCode> {
    let sys = load_system(&args.config)?;
    let kappa_star = bracket_kappa_max(&sys).value();
    let lo = args.kappa_min.unwrap_or(1e-3 * kappa_star);
    let hi = args.kappa_max.unwrap_or(kappa_star);
    let flow = scan_flow(&sys, lo, hi, args.samples)?;
    let crossings: Vec<Value> = flow
        .sign_changes()
        .iter()
        .map(|&(branch, kappa_lo, kappa_hi)| {
            json!({"branch": branch, "kappa_lo": kappa_lo, "kappa_hi": kappa_hi})
        })
        .collect();
    let roots = pretty(&json!({ "crossings": crossings }))?;
    match &args.out {
        Some(path) => {
            write_output(Some(path), &flow.to_csv())?;
            write_output(Some(&path.with_extension("roots.json")), &roots)?;
        }
        None => {
            print!("{}", flow.to_csv());
            eprint!("{roots}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn member_suffix(member: usize) -> String {
    let letter = char::from(b'a' + (member % 26) as u8);
    format!("_{letter}")
}

fn suffixed_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let extension = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}{extension}"))
}

fn sample_grid(xmin: f64, xmax: f64, samples: usize) -> Vec<f64> {
    let step = (xmax - xmin) / (samples - 1) as f64;
    (0..samples).map(|i| xmin + i as f64 * step).collect()
}

fn wavefunction_csv(header: &str, grid: &[f64], members: &[PiecewiseExpWaveFunction]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for &x in grid {
        out.push_str(&format!("{x:.16e}"));
        for wf in members {
            out.push_str(&format!(",{:.16e}", wf.evaluate(x)));
        }
        out.push('\n');
    }
    out
}

fn cmd_wavefunction(args: WavefunctionArgs) -> Result<ExitCode> {
    let sys = load_system(&args.config)?;
    if args.samples < 2 {
        bail!("--samples must be at least 2, got {}", args.samples);
    }
    let spectrum = spectrum_for(&sys)?;
    let states = spectrum.states();
    if args.state >= states.len() {
        bail!(
            "state index {} out of range: the spectrum has {} bound level(s)",
            args.state,
            states.len()
        );
    }
    let state = &states[args.state];
    let members: Vec<PiecewiseExpWaveFunction> = (0..state.multiplicity)
        .map(|member| build_wavefunction(&sys, state, member))
        .collect::<deltaspec::Result<_>>()?;
    let window = 10.0 / state.kappa;
    let xmin = args.xmin.unwrap_or(sys.centers()[0] - window);
    let xmax = args
        .xmax
        .unwrap_or(sys.centers()[sys.len() - 1] + window);
    if !(xmin.is_finite() && xmax.is_finite() && xmin < xmax) {
        bail!("empty sampling window: xmin = {xmin}, xmax = {xmax}");
    }
    let grid = sample_grid(xmin, xmax, args.samples);
    match &args.out {
        Some(path) if members.len() > 1 => {
            for (member, wf) in members.iter().enumerate() {
                let csv = wavefunction_csv("x,psi", &grid, std::slice::from_ref(wf));
                write_output(Some(&suffixed_path(path, &member_suffix(member))), &csv)?;
            }
        }
        Some(path) => {
            write_output(Some(path), &wavefunction_csv("x,psi", &grid, &members))?;
        }
        None => {
            let header = if members.len() == 1 {
                "x,psi".to_string()
            } else {
                let mut h = String::from("x");
                for member in 0..members.len() {
                    h.push_str(&format!(",psi{}", member_suffix(member)));
                }
                h
            };
            print!("{}", wavefunction_csv(&header, &grid, &members));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_twin(args: TwinArgs) -> Result<ExitCode> {
    let constants = PhysicalConstants::default();
    let closed = twin_closed_form(args.a, args.lambda, &constants)?;
    let mut closed_kappas = vec![closed.kappa_plus.value()];
    if let Some(minus) = closed.kappa_minus {
        closed_kappas.push(minus.value());
    }
    let to_energy = |kappa: f64| {
        energy_from_kappa(Kappa::new(kappa).expect("roots are positive"), &constants).value()
    };
    let closed_energies: Vec<f64> = closed_kappas.iter().map(|&k| to_energy(k)).collect();
    let sys = DeltaSystem::new(
        constants,
        vec![0.0, args.a],
        vec![args.lambda, args.lambda],
    )?;
    let spectrum = find_bound_states(&sys, DEFAULT_KAPPA_TOL)?;
    let numeric_kappas: Vec<f64> = spectrum.states().iter().map(|s| s.kappa).collect();
    let numeric_energies: Vec<f64> = spectrum.states().iter().map(|s| s.energy).collect();
    let deltas: Vec<f64> = numeric_energies
        .iter()
        .zip(&closed_energies)
        .map(|(numeric, closed)| numeric - closed)
        .collect();
    let doc = json!({
        "a": args.a,
        "lambda": args.lambda,
        "threshold_separation": constants.hbar.powi(2) / (constants.mass * args.lambda),
        "closed_form": { "kappas": closed_kappas, "energies": closed_energies },
        "numeric": { "kappas": numeric_kappas, "energies": numeric_energies },
        "energy_deltas": deltas,
    });
    write_output(args.out.as_deref(), &pretty(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_circulant(args: CirculantArgs) -> Result<ExitCode> {
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    if !(args.a.is_finite() && args.a > 0.0) {
        bail!("--a must be strictly positive, got {}", args.a);
    }
    let sys = DeltaSystem::new(
        PhysicalConstants::default(),
        (0..args.n).map(|i| i as f64 * args.a).collect(),
        vec![args.lambda; args.n],
    )?;
    let ring = circulant_bound_states(&sys, DEFAULT_KAPPA_TOL)?;
    let kappa_star = bracket_kappa_max(&sys).value();
    let mut grid: Vec<f64> = (0..16)
        .map(|i| 0.05 * kappa_star * (0.999 / 0.05f64).powf(i as f64 / 15.0))
        .collect();
    grid.extend(ring.states().iter().map(|s| s.kappa));
    let mut max_deviation = 0.0f64;
    for &kappa in &grid {
        let at = Kappa::new(kappa)?;
        let mut closed = circulant_eigenvalues(&circulant_coefficients(&sys, at)?)?;
        closed.sort_by(f64::total_cmp);
        let dense = eigen_decompose(&circulant_matrix(&sys, at)?)?;
        for (c, d) in closed.iter().zip(dense.eigenvalues()) {
            max_deviation = max_deviation.max((c - d).abs());
        }
    }
    let doc = json!({
        "n": args.n,
        "a": args.a,
        "lambda": args.lambda,
        "kappa_star": kappa_star,
        "pairing": mode_pairing(args.n),
        "levels": ring.states(),
        "max_dense_deviation": max_deviation,
    });
    write_output(args.out.as_deref(), &pretty(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| lo * ratio.powi(i as i32)).collect()
}

fn perron_reports(sys: &DeltaSystem) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    match perron_check(sys, None, DEFAULT_PERRON_EPSILON) {
        Ok(report) => {
            let min_component = report
                .top_eigenvector
                .iter()
                .fold(f64::INFINITY, |m, &v| m.min(v));
            let pass = report.all_entries_positive
                && report.top_eigenvalue > 0.0
                && report.spectral_gap > 0.0;
            reports.push(CheckReport::new(
                "perron",
                if pass { CheckStatus::Pass } else { CheckStatus::Fail },
                min_component.min(report.spectral_gap),
                vec![
                    format!("kappa = {}", report.kappa),
                    format!("diagonal shift = {}", report.shift),
                    format!("top eigenvalue = {}", report.top_eigenvalue),
                    format!("spectral gap = {}", report.spectral_gap),
                    format!("smallest eigenvector component = {min_component}"),
                ],
            ));
        }
        Err(Error::NotEntrywisePositive { row, col }) => {
            reports.push(CheckReport::new(
                "perron",
                CheckStatus::Inapplicable,
                0.0,
                vec![format!(
                    "shifted matrix loses entrywise positivity at ({row}, {col})"
                )],
            ));
        }
        Err(other) => return Err(other.into()),
    }
    let ground = ground_state_check(sys)?;
    let pass = ground.simple && ground.gap_in_kappa > 0.0 && ground.positive_wavefunction;
    reports.push(CheckReport::new(
        "ground-state",
        if pass { CheckStatus::Pass } else { CheckStatus::Fail },
        ground.gap_in_kappa,
        vec![
            format!("simple = {}", ground.simple),
            format!("wave-number gap = {}", ground.gap_in_kappa),
            format!("positive wave function = {}", ground.positive_wavefunction),
        ],
    ));
    Ok(reports)
}

fn interlacing_report(sys: &DeltaSystem) -> Result<CheckReport> {
    if sys.len() < 2 {
        return Ok(CheckReport::new(
            "interlacing",
            CheckStatus::Inapplicable,
            0.0,
            vec!["needs at least two centers".to_string()],
        ));
    }
    let kappa_star = bracket_kappa_max(sys).value();
    let grid = geometric_grid(0.05 * kappa_star, 0.999 * kappa_star, 12);
    let mut min_slack = f64::INFINITY;
    let mut violations = Vec::new();
    for index in 0..sys.len() {
        for &kappa in &grid {
            let report = interlacing_check(sys, Kappa::new(kappa)?, index)?;
            for k in 0..report.sub_eigenvalues.len() {
                min_slack = min_slack.min(report.sub_eigenvalues[k] - report.full_eigenvalues[k]);
                min_slack =
                    min_slack.min(report.full_eigenvalues[k + 1] - report.sub_eigenvalues[k]);
            }
            for v in report.violations {
                violations.push(format!("removing {index} at kappa {kappa:.6}: {v}"));
            }
        }
    }
    let mut details = vec![format!(
        "checked {} removals at {} wave numbers; smallest chain slack = {min_slack:.3e}",
        sys.len(),
        grid.len()
    )];
    details.extend(violations.iter().take(8).cloned());
    Ok(CheckReport::new(
        "interlacing",
        if violations.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail },
        min_slack,
        details,
    ))
}

fn removal_report(sys: &DeltaSystem) -> Result<CheckReport> {
    if sys.len() < 2 {
        return Ok(CheckReport::new(
            "removal",
            CheckStatus::Inapplicable,
            0.0,
            vec!["no centers remain after a removal".to_string()],
        ));
    }
    let mut min_delta = f64::INFINITY;
    let mut details = Vec::new();
    for index in 0..sys.len() {
        let report = removal_shift_check(sys, index)?;
        let worst = report
            .deltas
            .iter()
            .fold(f64::INFINITY, |m, &d| m.min(d));
        min_delta = min_delta.min(worst);
        details.push(format!(
            "remove {index}: {} surviving level(s), {} unmatched, smallest rise = {worst:.6e}",
            report.deltas.len(),
            report.surplus
        ));
    }
    Ok(CheckReport::new(
        "removal",
        if min_delta >= -1e-10 { CheckStatus::Pass } else { CheckStatus::Fail },
        min_delta,
        details,
    ))
}

fn fh_report(sys: &DeltaSystem) -> Result<CheckReport> {
    let kappa_star = bracket_kappa_max(sys).value();
    let grid = geometric_grid(0.05 * kappa_star, 0.95 * kappa_star, 12);
    let report = monotonicity_check(sys, &grid)?;
    let pass = report.derivative_positive_definite
        && report.min_rayleigh > 0.0
        && report.min_fd_delta >= -1e-10;
    Ok(CheckReport::new(
        "fh",
        if pass { CheckStatus::Pass } else { CheckStatus::Fail },
        report.min_rayleigh.min(report.min_fd_delta),
        vec![
            format!("derivative matrix positive definite = {}", report.derivative_positive_definite),
            format!("smallest Rayleigh quotient = {:.6e}", report.min_rayleigh),
            format!("smallest branch slope = {:.6e}", report.min_fd_delta),
            format!("samples = {}", report.samples),
        ],
    ))
}

fn gamma_report(sys: &DeltaSystem) -> Result<CheckReport> {
    const TOLERANCE: f64 = 1e-12;
    let kappa_star = bracket_kappa_max(sys).value();
    let mut worst = 0.0f64;
    let mut inertia_ok = true;
    for &kappa in &geometric_grid(0.05 * kappa_star, 0.999 * kappa_star, 12) {
        match gamma_phi_equivalence(sys, Kappa::new(kappa)?) {
            Ok(report) => {
                worst = worst.max(report.max_deviation);
                inertia_ok &= report.inertia_match;
            }
            Err(Error::UnitMismatch { hbar, mass }) => {
                return Ok(CheckReport::new(
                    "gamma",
                    CheckStatus::Inapplicable,
                    0.0,
                    vec![format!(
                        "defined for hbar = 1, mass = 1/2 only; system has hbar = {hbar}, mass = {mass}"
                    )],
                ));
            }
            Err(other) => return Err(other.into()),
        }
    }
    let pass = worst <= TOLERANCE && inertia_ok;
    Ok(CheckReport::new(
        "gamma",
        if pass { CheckStatus::Pass } else { CheckStatus::Fail },
        TOLERANCE - worst,
        vec![
            format!("largest congruence deviation = {worst:.3e}"),
            format!("inertia agreement = {inertia_ok}"),
        ],
    ))
}

fn degeneracy_check(sys: &DeltaSystem) -> Result<CheckReport> {
    const OVERLAP_TOLERANCE: f64 = 1e-8;
    let spectrum = spectrum_for(sys)?;
    let levels = degeneracy_report(&spectrum);
    let mut details = Vec::new();
    if levels.is_empty() {
        details.push("no degenerate levels".to_string());
    }
    let mut worst = 0.0f64;
    for level in &levels {
        details.push(format!(
            "energy {} with multiplicity {} (branches {:?})",
            level.energy, level.multiplicity, level.branches
        ));
    }
    for state in spectrum.states().iter().filter(|s| s.multiplicity > 1) {
        let members: Vec<PiecewiseExpWaveFunction> = (0..state.multiplicity)
            .map(|member| build_wavefunction(sys, state, member))
            .collect::<deltaspec::Result<_>>()?;
        for (i, a) in members.iter().enumerate() {
            worst = worst.max((a.norm_squared() - 1.0).abs());
            for b in members.iter().skip(i + 1) {
                worst = worst.max(inner_product(a, b)?.abs());
            }
        }
    }
    details.push(format!("largest orthonormality defect = {worst:.3e}"));
    Ok(CheckReport::new(
        "degeneracy",
        if worst <= OVERLAP_TOLERANCE { CheckStatus::Pass } else { CheckStatus::Fail },
        OVERLAP_TOLERANCE - worst,
        details,
    ))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let sys = load_system(&args.config)?;
    let mut checks: Vec<CheckReport> = Vec::new();
    if matches!(args.suite, Suite::All | Suite::Perron) {
        checks.extend(perron_reports(&sys)?);
    }
    if matches!(args.suite, Suite::All | Suite::Interlacing) {
        checks.push(interlacing_report(&sys)?);
    }
    if matches!(args.suite, Suite::All | Suite::Removal) {
        checks.push(removal_report(&sys)?);
    }
    if matches!(args.suite, Suite::All | Suite::Fh) {
        checks.push(fh_report(&sys)?);
    }
    if matches!(args.suite, Suite::All | Suite::Gamma) {
        checks.push(gamma_report(&sys)?);
    }
    if matches!(args.suite, Suite::All | Suite::Degeneracy) {
        checks.push(degeneracy_check(&sys)?);
    }
    let failed = checks.iter().any(CheckReport::failed);
    let doc = json!({
        "system": system_json(&sys),
        "checks": checks,
        "failed": failed,
    });
    write_output(args.out.as_deref(), &pretty(&doc)?)?;
    Ok(ExitCode::from(u8::from(failed)))
}

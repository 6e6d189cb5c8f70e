//! `xi-ladder` command-line front-end.
//!
//! Every subcommand writes its table to `--out` (default `$XI_LADDER_OUT_DIR`,
//! else the working directory) and prints one `key=value` summary line.
//! Exit status is 2 for argument errors and 1 for computation errors.

pub mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::basis::SectorBasis;
use crate::criticality::{
    detect_transitions, phase_diagram, sweep_line, GridAxis, LinePath, SweepTrace,
    DEFAULT_DELTA, MAX_CAP_DOUBLINGS,
};
use crate::error::Error;
use crate::hamiltonian::sector_matrix;
use crate::model::ModelParams;
use crate::observables::{expectations, photon_distribution, photon_distribution_limit, PhotonDistribution};
use crate::spectra::{global_ground_adaptive, sector_spectrum, MmaxPolicy};
use crate::thermo::thermo_fan;

pub use table::{fmt12, Cell, Format, Table};

/// Doublings of `M` allowed when converging the large-`M` photon distribution.
const LIMIT_DOUBLINGS: usize = 24;

#[derive(Debug, Parser)]
#[command(name = "xi-ladder", version, about = "Exact diagonalization of a three-level ladder atom-field model")]
struct Cli {
    /// Worker threads (default: all cores); output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Resonance {
    /// ω = (0, Ω, 2Ω)
    Double,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// key=value file (omega, omega1, omega2, omega3, mu12, mu23, na); flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of atoms.
    #[arg(long)]
    na: Option<usize>,
    /// Field frequency Ω.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Level-1 frequency.
    #[arg(long, allow_hyphen_values = true)]
    omega1: Option<f64>,
    /// Level-2 frequency.
    #[arg(long, allow_hyphen_values = true)]
    omega2: Option<f64>,
    /// Level-3 frequency.
    #[arg(long, allow_hyphen_values = true)]
    omega3: Option<f64>,
    /// Force ω = (0, Ω, 2Ω); the default when no level frequency is given.
    #[arg(long, value_enum)]
    resonance: Option<Resonance>,
}

#[derive(Debug, Args)]
struct CouplingArgs {
    /// Coupling μ12 (default 1).
    #[arg(long, allow_hyphen_values = true)]
    mu12: Option<f64>,
    /// Coupling μ23 (default √2).
    #[arg(long, allow_hyphen_values = true)]
    mu23: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, env = "XI_LADDER_OUT_DIR", default_value = ".")]
    out: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Basis of one excitation sector (basis: nu,q,r).
    Basis {
        #[command(flatten)]
        model: ModelArgs,
        /// Excitation number M.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hamiltonian matrix of one sector, rows and columns labelled by basis state.
    DumpH {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Excitation number M.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Eigenvalues of a range of sectors (spectrum: M,k,E).
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Sector or inclusive range `lo:hi`.
        #[arg(long, default_value = "0:30")]
        m: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Global ground state; prints `M=<sector> E=<energy>`.
    Ground {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
    },
    /// Fidelity sweep along a line (sweep: lambda,mu12,mu23,M,E,F,chi).
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// `diag:<c>` for μ12 = μ23 + c with λ = μ23, `mu12:<μ23>` or
        /// `mu23:<μ12>` for λ along that coupling.
        #[arg(long, default_value = "diag:-0.2", allow_hyphen_values = true)]
        path: String,
        /// λ range `lo:hi`.
        #[arg(long, default_value = "0.2:3")]
        range: String,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep along μ12 at fixed μ23 (cut: sweep columns).
    Cut {
        #[command(flatten)]
        model: ModelArgs,
        /// Fixed μ23.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu23: f64,
        /// μ12 range `lo:hi`.
        #[arg(long, default_value = "0:3")]
        mu12: String,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ground-sector labels on a grid plus triple points
    /// (phase: mu12,mu23,M; triple: mu12,mu23,labels).
    PhaseDiagram {
        #[command(flatten)]
        model: ModelArgs,
        /// Grid `lo:hi:count`.
        #[arg(long, default_value = "0:3:301")]
        mu12: String,
        /// Grid `lo:hi:count`.
        #[arg(long, default_value = "0:3:301")]
        mu23: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Populations and photon number of every eigenstate of one sector
    /// (expect: k,E,A11,A22,A33,nphot).
    Observables {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Excitation number M.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Photon-number distribution of one eigenstate (photons: nu,P);
    /// `--m inf` converges the ground state in M by doubling.
    Photons {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Excitation number M, or `inf`.
        #[arg(long)]
        m: String,
        /// Eigenstate index, ascending in energy.
        #[arg(long, default_value_t = 0)]
        state: usize,
        /// L1 tolerance for `--m inf`.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Level fan in the infinite-atom limit (thermo: mu12,M,E).
    Thermo {
        /// Grid `lo:hi:count`.
        #[arg(long, default_value = "0:3:61")]
        mu12: String,
        #[arg(long, default_value_t = 7)]
        m_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => Failure::Usage(msg),
            other => Failure::Compute(other.into()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        set_threads(n);
    }
    match execute(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) {
    // Only the first call in a process takes effect.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: usize) {}

#[derive(Debug, Default)]
struct ConfigValues {
    omega: Option<f64>,
    levels: [Option<f64>; 3],
    mu12: Option<f64>,
    mu23: Option<f64>,
    na: Option<usize>,
}

fn parse_config(text: &str, origin: &Path) -> Outcome<ConfigValues> {
    let mut cfg = ConfigValues::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!("{}:{}: expected key=value", origin.display(), n + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = || Failure::Usage(format!("{}:{}: invalid value for {key}: {value}", origin.display(), n + 1));
        let float = || value.parse::<f64>().map_err(|_| bad());
        match key {
            "omega" => cfg.omega = Some(float()?),
            "omega1" => cfg.levels[0] = Some(float()?),
            "omega2" => cfg.levels[1] = Some(float()?),
            "omega3" => cfg.levels[2] = Some(float()?),
            "mu12" => cfg.mu12 = Some(float()?),
            "mu23" => cfg.mu23 = Some(float()?),
            "na" => cfg.na = Some(value.parse().map_err(|_| bad())?),
            _ => return usage(format!("{}:{}: unknown key {key}", origin.display(), n + 1)),
        }
    }
    Ok(cfg)
}

const DEFAULT_ATOMS: usize = 2;
const DEFAULT_MU12: f64 = 1.0;
const DEFAULT_MU23: f64 = std::f64::consts::SQRT_2;

/// Validated parameters; scalar couplings fall back to the config file and
/// then to the triple point (1, √2).
fn resolve(model: &ModelArgs, couplings: Option<&CouplingArgs>) -> Outcome<ModelParams> {
    let cfg = match &model.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text, path)?
        }
        None => ConfigValues::default(),
    };
    let omega = model.omega.or(cfg.omega).unwrap_or(1.0);
    let explicit = [
        model.omega1.or(cfg.levels[0]),
        model.omega2.or(cfg.levels[1]),
        model.omega3.or(cfg.levels[2]),
    ];
    let any_explicit = explicit.iter().any(Option::is_some);
    if model.resonance == Some(Resonance::Double) && any_explicit {
        return usage("--resonance double conflicts with explicit level frequencies");
    }
    let resonant = [0.0, omega, 2.0 * omega];
    let levels = [0, 1, 2].map(|i| explicit[i].unwrap_or(resonant[i]));
    let (mu12, mu23) = match couplings {
        Some(c) => (
            c.mu12.or(cfg.mu12).unwrap_or(DEFAULT_MU12),
            c.mu23.or(cfg.mu23).unwrap_or(DEFAULT_MU23),
        ),
        None => (0.0, 0.0),
    };
    let na = model.na.or(cfg.na).unwrap_or(DEFAULT_ATOMS);
    Ok(ModelParams::new(omega, levels, mu12, mu23, na)?)
}

fn parse_float(s: &str, what: &str) -> Outcome<f64> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("invalid number '{s}' in {what}")))
}

/// `lo:hi`
fn parse_interval(s: &str, what: &str) -> Outcome<(f64, f64)> {
    match s.split(':').collect::<Vec<_>>()[..] {
        [lo, hi] => {
            let (lo, hi) = (parse_float(lo, what)?, parse_float(hi, what)?);
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return usage(format!("{what} must have lo <= hi, got {s}"));
            }
            Ok((lo, hi))
        }
        _ => usage(format!("{what} must be lo:hi, got {s}")),
    }
}

/// `lo:hi:count`
fn parse_axis(s: &str, what: &str) -> Outcome<GridAxis> {
    match s.split(':').collect::<Vec<_>>()[..] {
        [lo, hi, count] => {
            let count = count
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("invalid count in {what}: {s}")))?;
            Ok(GridAxis::new(parse_float(lo, what)?, parse_float(hi, what)?, count)?)
        }
        _ => usage(format!("{what} must be lo:hi:count, got {s}")),
    }
}

/// `m` or inclusive `lo:hi`
fn parse_sectors(s: &str) -> Outcome<std::ops::RangeInclusive<usize>> {
    let int = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("invalid sector '{t}' in --m")))
    };
    match s.split(':').collect::<Vec<_>>()[..] {
        [m] => Ok(int(m)?..=int(m)?),
        [lo, hi] if int(lo)? <= int(hi)? => Ok(int(lo)?..=int(hi)?),
        _ => usage(format!("--m must be M or lo:hi with lo <= hi, got {s}")),
    }
}

fn parse_path(s: &str) -> Outcome<LinePath> {
    let Some((kind, value)) = s.split_once(':') else {
        return usage(format!("--path must be diag:<c>, mu12:<mu23> or mu23:<mu12>, got {s}"));
    };
    let value = parse_float(value, "--path")?;
    match kind {
        "diag" => Ok(LinePath::offset_diagonal(value)),
        "mu12" => Ok(LinePath::along_mu12(value)),
        "mu23" => Ok(LinePath::along_mu23(value)),
        _ => usage(format!("unknown path kind '{kind}'")),
    }
}

fn summary(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn write(table: &Table, output: &OutputArgs) -> Outcome<String> {
    let path = table
        .write(&output.out, output.format)
        .with_context(|| format!("writing {} table to {}", table.name, output.out.display()))?;
    Ok(path.display().to_string())
}

fn execute(command: Command) -> Outcome<String> {
    match command {
        Command::Basis { model, m, output } => {
            let params = resolve(&model, None)?;
            let basis = SectorBasis::enumerate(params.atom_count(), m)?;
            let mut t = Table::new("basis", &["nu", "q", "r"]);
            for s in basis.states() {
                t.push(vec![s.nu.into(), s.q.into(), s.r.into()]);
            }
            let file = write(&t, &output)?;
            Ok(summary(&[("M", m.to_string()), ("dim", basis.dim().to_string()), ("file", file)]))
        }
        Command::DumpH { model, couplings, m, output } => {
            let params = resolve(&model, Some(&couplings))?;
            let h = sector_matrix(&params, m)?;
            let labels: Vec<String> = h.basis().states().iter().map(|s| s.label()).collect();
            let mut header = vec!["row"];
            header.extend(labels.iter().map(String::as_str));
            let mut t = Table::new(format!("hamiltonian_M{m}"), &header);
            for (i, label) in labels.iter().enumerate() {
                let mut row = vec![Cell::Text(label.clone())];
                row.extend((0..labels.len()).map(|j| Cell::Num(h.entries()[(i, j)])));
                t.push(row);
            }
            let file = write(&t, &output)?;
            Ok(summary(&[("M", m.to_string()), ("dim", labels.len().to_string()), ("file", file)]))
        }
        Command::Spectrum { model, couplings, m, output } => {
            let params = resolve(&model, Some(&couplings))?;
            let sectors = parse_sectors(&m)?;
            let mut t = Table::new("spectrum", &["M", "k", "E"]);
            let count = sectors.clone().count();
            for sector in sectors {
                let spectrum = sector_spectrum(&params, sector)?;
                for (k, &e) in spectrum.eigenvalues().iter().enumerate() {
                    t.push(vec![sector.into(), k.into(), e.into()]);
                }
            }
            let rows = t.rows.len();
            let file = write(&t, &output)?;
            Ok(summary(&[("sectors", count.to_string()), ("rows", rows.to_string()), ("file", file)]))
        }
        Command::Ground { model, couplings } => {
            let params = resolve(&model, Some(&couplings))?;
            let policy = MmaxPolicy::for_atoms(params.atom_count());
            let g = global_ground_adaptive(&params, policy, MAX_CAP_DOUBLINGS)?;
            Ok(summary(&[("M", g.winning_m.to_string()), ("E", fmt12(g.energy))]))
        }
        Command::Sweep { model, path, range, delta, output } => {
            let params = resolve(&model, None)?;
            let path = parse_path(&path)?;
            let (lo, hi) = parse_interval(&range, "--range")?;
            run_sweep(&params, &path, lo, hi, delta, "sweep", &output)
        }
        Command::Cut { model, mu23, mu12, delta, output } => {
            let params = resolve(&model, None)?;
            let (lo, hi) = parse_interval(&mu12, "--mu12")?;
            run_sweep(&params, &LinePath::along_mu12(mu23), lo, hi, delta, "cut", &output)
        }
        Command::PhaseDiagram { model, mu12, mu23, output } => {
            let params = resolve(&model, None)?;
            let (ax12, ax23) = (parse_axis(&mu12, "--mu12")?, parse_axis(&mu23, "--mu23")?);
            let diagram = phase_diagram(&params, ax12, ax23, MmaxPolicy::for_atoms(params.atom_count()))?;
            let mut phase = Table::new("phase", &["mu12", "mu23", "M"]);
            for (x, y, m) in diagram.nodes() {
                phase.push(vec![x.into(), y.into(), m.into()]);
            }
            let mut triple = Table::new("triple", &["mu12", "mu23", "labels"]);
            for tp in &diagram.triple_points {
                let labels = tp.labels.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
                triple.push(vec![tp.mu12.into(), tp.mu23.into(), labels.into()]);
            }
            let phase_file = write(&phase, &output)?;
            let triple_file = write(&triple, &output)?;
            Ok(summary(&[
                ("nodes", phase.rows.len().to_string()),
                ("triple_points", triple.rows.len().to_string()),
                ("file", phase_file),
                ("triple_file", triple_file),
            ]))
        }
        Command::Observables { model, couplings, m, output } => {
            let params = resolve(&model, Some(&couplings))?;
            let spectrum = sector_spectrum(&params, m)?;
            let mut t = Table::new("expect", &["k", "E", "A11", "A22", "A33", "nphot"]);
            for row in expectations(&spectrum) {
                t.push(vec![
                    row.k.into(),
                    row.energy.into(),
                    row.a11.into(),
                    row.a22.into(),
                    row.a33.into(),
                    row.photons.into(),
                ]);
            }
            let rows = t.rows.len();
            let file = write(&t, &output)?;
            Ok(summary(&[("M", m.to_string()), ("rows", rows.to_string()), ("file", file)]))
        }
        Command::Photons { model, couplings, m, state, tol, output } => {
            let params = resolve(&model, Some(&couplings))?;
            let (dist, mut extra): (PhotonDistribution, Vec<(&str, String)>) = if m.trim() == "inf" {
                if state != 0 {
                    return usage("--m inf only supports the ground state (--state 0)");
                }
                let limit = photon_distribution_limit(&params, tol, LIMIT_DOUBLINGS)?;
                let distance = fmt12(limit.last_distance);
                (limit.distribution, vec![("l1", distance)])
            } else {
                let sector = m
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("--m must be a sector or 'inf', got {m}")))?;
                let spectrum = sector_spectrum(&params, sector)?;
                if state >= spectrum.dim() {
                    return usage(format!("--state {state} out of range for dimension {}", spectrum.dim()));
                }
                (photon_distribution(&spectrum.state(state), spectrum.basis())?, Vec::new())
            };
            let mut t = Table::new("photons", &["nu", "P"]);
            for (nu, p) in dist.iter() {
                t.push(vec![nu.into(), p.into()]);
            }
            let file = write(&t, &output)?;
            let mut pairs = vec![("M", dist.excitations.to_string()), ("nu0", dist.min_photons.to_string())];
            pairs.append(&mut extra);
            pairs.push(("file", file));
            Ok(summary(&pairs))
        }
        Command::Thermo { mu12, m_max, output } => {
            let axis = parse_axis(&mu12, "--mu12")?;
            let mut t = Table::new("thermo", &["mu12", "M", "E"]);
            for p in thermo_fan(axis, m_max)? {
                t.push(vec![p.mu12.into(), p.excitations.into(), p.energy.into()]);
            }
            let rows = t.rows.len();
            let file = write(&t, &output)?;
            Ok(summary(&[("rows", rows.to_string()), ("file", file)]))
        }
    }
}

fn sweep_table(trace: &SweepTrace, name: &str) -> Table {
    let mut t = Table::new(name, &["lambda", "mu12", "mu23", "M", "E", "F", "chi"]);
    for s in &trace.samples {
        t.push(vec![
            s.lambda.into(),
            s.mu12.into(),
            s.mu23.into(),
            s.winning_m.into(),
            s.energy.into(),
            s.fidelity.into(),
            s.chi.into(),
        ]);
    }
    t
}

fn run_sweep(
    params: &ModelParams,
    path: &LinePath,
    lo: f64,
    hi: f64,
    delta: f64,
    name: &str,
    output: &OutputArgs,
) -> Outcome<String> {
    let (x0, y0) = path.at(lo);
    let (x1, y1) = path.at(hi);
    if x0.min(x1) < 0.0 || y0.min(y1) < 0.0 {
        return usage(format!("path leaves the region of non-negative couplings on [{lo}, {hi}]"));
    }
    let trace = sweep_line(params, path, lo, hi, delta, MmaxPolicy::for_atoms(params.atom_count()))?;
    let report = detect_transitions(&trace, None).map_err(|e| anyhow!(e).context("refining transitions"))?;
    let table = sweep_table(&trace, name);
    let file = write(&table, output)?;
    let at = report.transitions.iter().map(|t| fmt12(t.lambda)).collect::<Vec<_>>().join(";");
    Ok(summary(&[
        ("samples", trace.samples.len().to_string()),
        ("transitions", report.transitions.len().to_string()),
        ("at", if at.is_empty() { "-".into() } else { at }),
        ("file", file),
    ]))
}

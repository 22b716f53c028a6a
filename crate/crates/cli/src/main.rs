use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fmcount::census::{run_census, write_rows, CensusConfig, CensusError, CensusSummary, CurveSource, OutputFormat};
use fmcount::curve::{curve_new, CurveError, WeierstrassCurve};
use fmcount::fm::{
    fiber_row_label, fiber_table, lambda_multisection, nontriviality_gate, BaseKind, BundleKind, FmError, Instance,
    SurfaceDescriptor,
};
use fmcount::structure::{automorphism_group, torsion_subgroup, StructureError, Tower};

#[derive(Parser)]
#[command(name = "fmc", version, about = "Fourier-Mukai partner counts for elliptic ruled surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct CurveArgs {
    /// Characteristic.
    #[arg(long)]
    p: u32,
    /// Coefficients a1,a2,a3,a4,a6.
    #[arg(long, value_parser = parse_coefficients, allow_hyphen_values = true)]
    curve: [i64; 5],
}

#[derive(Subcommand)]
enum Command {
    /// Automorphism group fixing the origin.
    Aut {
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// The m-torsion subgroup and its basis.
    Torsion {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        m: u64,
    },
    /// Multipliers realised by automorphisms on a point of order m.
    Hgroup {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        m: u64,
    },
    /// Partner representatives and count.
    Partners {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        verify_oracle: bool,
    },
    /// Multiple fibers of an elliptic ruled surface.
    Fibers {
        #[arg(long, allow_hyphen_values = true)]
        e: i8,
        #[arg(long)]
        bundle: Option<Bundle>,
        /// Order of L for line_sum.
        #[arg(long)]
        ord: Option<u64>,
        /// Characteristic, 0 allowed.
        #[arg(long, default_value_t = 0)]
        p: u32,
        #[arg(long)]
        base: Option<Base>,
    },
    /// Runs a grid of instances.
    Census {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u32>,
        /// Explicit curves; overrides --source.
        #[arg(long, value_parser = parse_coefficients, allow_hyphen_values = true)]
        curve: Vec<[i64; 5]>,
        #[arg(long, value_enum, default_value_t = Source::Canonical)]
        source: Source,
        #[arg(long)]
        m_min: u64,
        #[arg(long)]
        m_max: u64,
        #[arg(long)]
        verify_oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Bundle {
    TrivialSum,
    LineSum,
    LineSumInfinite,
    Indecomposable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Ordinary,
    Supersingular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Canonical,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_coefficients(s: &str) -> Result<[i64; 5], String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<i64>| format!("expected 5 coefficients, got {}", v.len()))
}

enum Failure {
    Usage(String),
    Domain(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::OrderOutOfRange(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

impl From<FmError> for Failure {
    fn from(e: FmError) -> Self {
        match e {
            FmError::Structure(s) => s.into(),
            FmError::InconsistentDescriptor(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::Config(_) => Failure::Usage(e.to_string()),
            CensusError::Curve(e) => e.into(),
            CensusError::Domain(e) => e.into(),
            CensusError::Io(e) => Failure::Io(e),
        }
    }
}

fn tower_from_env() -> Result<Tower, Failure> {
    match std::env::var("FMC_KMAX") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&k| k >= 1)
            .map(Tower::new)
            .ok_or_else(|| Failure::Usage(format!("FMC_KMAX must be a positive integer, got {v:?}"))),
        Err(_) => Ok(Tower::default()),
    }
}

fn make_curve(c: &CurveArgs) -> Result<WeierstrassCurve, Failure> {
    let [a1, a2, a3, a4, a6] = c.curve;
    Ok(curve_new(c.p, a1, a2, a3, a4, a6)?)
}

fn list(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tower = tower_from_env()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Aut { curve } => {
            let e = make_curve(&curve)?;
            let g = automorphism_group(&e, &tower)?;
            writeln!(out, "curve: {e}")?;
            writeln!(out, "j: {}", e.j_invariant())?;
            writeln!(out, "aut_order: {}", g.order())?;
            writeln!(out, "aut_label: {}", g.label)?;
            writeln!(out, "field_degree: {}", g.field_degree)?;
            for phi in &g.elements {
                writeln!(out, "  {phi}")?;
            }
        }
        Command::Torsion { curve, m } => {
            let e = make_curve(&curve)?;
            let t = torsion_subgroup(&e, m, &tower)?;
            writeln!(out, "curve: {e}")?;
            writeln!(out, "m: {m}")?;
            writeln!(out, "structure: {}", t.structure)?;
            writeln!(out, "kind: {}", t.structure.kind())?;
            writeln!(out, "field_degree: {}", t.field_degree)?;
            writeln!(out, "points: {}", t.points.len())?;
            for b in &t.basis {
                writeln!(out, "basis: {b}")?;
            }
        }
        Command::Hgroup { curve, m } => {
            let e = make_curve(&curve)?;
            let inst = Instance::resolve(&e, m, &tower)?;
            let h = inst.h_group()?;
            writeln!(out, "curve: {e}")?;
            writeln!(out, "m: {m}")?;
            writeln!(out, "point: {}", inst.a)?;
            writeln!(out, "h_size: {}", h.size())?;
            writeln!(out, "h_members: {}", list(&h.members))?;
            for (i, phi) in &h.witness {
                writeln!(out, "  {i}: {phi}")?;
            }
        }
        Command::Partners { curve, m, verify_oracle } => {
            let e = make_curve(&curve)?;
            let inst = Instance::resolve(&e, m, &tower)?;
            let r = inst.partners()?;
            writeln!(out, "curve: {e}")?;
            writeln!(out, "m: {m}")?;
            writeln!(out, "h_members: {}", list(&r.h.members))?;
            writeln!(out, "representatives: {}", list(&r.representatives))?;
            writeln!(out, "fm_count: {}", r.count)?;
            writeln!(out, "bound_ok: {}", r.bound_ok)?;
            if verify_oracle {
                let oracle = inst.oracle()?;
                writeln!(out, "oracle_count: {oracle}")?;
                if oracle != r.count {
                    return Err(Failure::Domain(format!(
                        "oracle count {oracle} differs from partner count {}",
                        r.count
                    )));
                }
            }
        }
        Command::Fibers { e, bundle, ord, p, base } => {
            let bundle = match (bundle, ord) {
                (None, _) => None,
                (Some(Bundle::LineSum), Some(order)) => Some(BundleKind::LineSum { order }),
                (Some(Bundle::LineSum), None) => return Err(Failure::Usage("--bundle line_sum needs --ord".into())),
                (Some(Bundle::TrivialSum), _) => Some(BundleKind::TrivialSum),
                (Some(Bundle::LineSumInfinite), _) => Some(BundleKind::LineSumInfinite),
                (Some(Bundle::Indecomposable), _) => Some(BundleKind::Indecomposable),
            };
            let base = base.map(|b| match b {
                Base::Ordinary => BaseKind::Ordinary,
                Base::Supersingular => BaseKind::Supersingular,
            });
            let d = SurfaceDescriptor { e, bundle, p, base };
            let row = fiber_table(&d)?;
            writeln!(out, "{}", row.fibers())?;
            writeln!(out, "row: ({})", fiber_row_label(&d)?)?;
            match lambda_multisection(&d) {
                Ok(l) => writeln!(out, "lambda: {l}")?,
                Err(FmError::NoEllipticFibration(_)) => writeln!(out, "lambda: none")?,
                Err(err) => return Err(err.into()),
            }
            writeln!(out, "nontrivial_partners_possible: {}", nontriviality_gate(&d))?;
        }
        Command::Census {
            p,
            curve,
            source,
            m_min,
            m_max,
            verify_oracle,
            format,
            out: path,
        } => {
            let curve_source = if !curve.is_empty() {
                CurveSource::Explicit(curve)
            } else {
                match source {
                    Source::Canonical => CurveSource::CanonicalPerJ,
                    Source::All => CurveSource::AllSmoothModels,
                }
            };
            let config = CensusConfig {
                primes: p,
                curve_source,
                m_range: m_min..=m_max,
                verify_oracle,
                tower,
            };
            let rows = run_census(&config)?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            match path {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(&path)?);
                    write_rows(&rows, format, &mut w)?;
                    w.flush()?;
                }
                None => write_rows(&rows, format, &mut out)?,
            }
            let summary = CensusSummary::of(&rows);
            eprintln!("{summary}");
            if summary.oracle_mismatches > 0 {
                return Err(Failure::Domain(format!("{} oracle mismatches", summary.oracle_mismatches)));
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

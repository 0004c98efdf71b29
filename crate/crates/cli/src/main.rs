//! `torsplit`: batch front end over the core engine.

mod commands;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torsplit_core::report::Report;
use torsplit_core::{catalog_model, load_model, Model, ScanParams};

#[derive(Parser, Debug)]
#[command(
    name = "torsplit",
    version,
    about = "Cohomology, splitting tests and positivity certificates on smooth complete toric varieties"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Tree,
}

#[derive(Args, Debug)]
struct Global {
    /// Model file.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Use a built-in catalog model instead of a file.
    #[arg(long, global = true, conflicts_with = "model")]
    catalog: Option<String>,
    /// Fan to work on when the model has several.
    #[arg(long, global = true)]
    fan: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for the randomized witness search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid side for non-split certificates.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Largest multiple used for stable base loci and Iitaka dimensions.
    #[arg(long, global = true)]
    kmax: Option<u32>,
    /// Largest negative twist scanned by vanishing checks.
    #[arg(long, global = true)]
    amax: Option<i64>,
    /// Largest twist scanned by the q-ample falsifier.
    #[arg(long, global = true)]
    mmax: Option<i64>,
    /// Divisor coefficients are scanned in [-N, N].
    #[arg(long = "box", global = true)]
    box_radius: Option<i64>,
    /// Order of the boundary thickening.
    #[arg(long, global = true)]
    mthick: Option<u32>,
    /// Leave wall time out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Cohomology of a line bundle or an equivariant vector bundle.
    Cohomology {
        #[arg(long)]
        divisor: Option<String>,
        #[arg(long)]
        bundle: Option<String>,
        /// List the contributing characters.
        #[arg(long)]
        characters: bool,
    },
    /// Base locus, or stable base locus with --stable.
    BaseLocus {
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        stable: bool,
    },
    /// Nef/ample/semi-ample flags, Iitaka dimension, and with --q a q-ampleness falsifier scan.
    Positivity {
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        q: Option<usize>,
    },
    /// q-ampleness certificate for an effective divisor.
    QAmpleCert {
        #[arg(long)]
        divisor: String,
    },
    /// Splits a bundle into line bundles, or certifies that it does not split.
    SplitTest {
        #[arg(long)]
        bundle: String,
    },
    /// Decides whether a bundle is trivial.
    TrivialTest {
        #[arg(long)]
        bundle: String,
    },
    /// Triviality on each boundary divisor and on their pairwise intersections.
    BoundaryReport {
        #[arg(long)]
        bundle: String,
    },
    /// Splitting and triviality decided on X and on the boundary, side by side.
    CheckSplitToric {
        #[arg(long)]
        bundle: String,
    },
    /// Evaluates an inference rule; without a rule id, lists the rules.
    ApplyRule {
        rule: Option<String>,
        #[arg(long)]
        divisor: Option<String>,
        #[arg(long)]
        line: Option<String>,
        #[arg(long)]
        bundle: Option<String>,
        #[arg(long)]
        morphism: Option<String>,
        #[arg(long)]
        target_divisor: Option<String>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        c: Option<i64>,
        #[arg(long)]
        d: Option<i64>,
    },
    /// Plan for reducing splitting on a product of projective spaces to planes.
    ReduceProducts {
        #[arg(required = true, value_delimiter = ',')]
        dims: Vec<usize>,
    },
    /// Lists catalog entries, or prints the model of one.
    Catalog { name: Option<String> },
    /// Runs the invariant suite on the built-in catalog.
    Selftest,
}

fn params(g: &Global, model: Option<&Model>) -> ScanParams {
    let mut p = model.map(|m| m.config.clone()).unwrap_or_default();
    if let Some(v) = g.seed {
        p.seed = v;
    }
    if let Some(v) = g.grid {
        p.grid = v;
    }
    if let Some(v) = g.kmax {
        p.k_max = v;
    }
    if let Some(v) = g.amax {
        p.a_max = v;
    }
    if let Some(v) = g.mmax {
        p.m_max = v;
    }
    if let Some(v) = g.box_radius {
        p.box_lo = -v.abs();
        p.box_hi = v.abs();
    }
    if let Some(v) = g.mthick {
        p.m_thick = v;
    }
    p
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let model = match (&cli.global.model, &cli.global.catalog) {
        (Some(path), _) => match load_model(path) {
            Ok(m) => Some(m),
            Err(errs) => {
                eprintln!("error: {}: {errs}", path.display());
                return ExitCode::from(2);
            }
        },
        (None, Some(name)) => match catalog_model(name) {
            Ok(m) => Some(m),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        _ => None,
    };
    let params = params(&cli.global, model.as_ref());
    let mut report = Report::new(&argv, model.as_ref(), &params);
    let start = Instant::now();
    let ctx = commands::Ctx { model: model.as_ref(), fan: cli.global.fan.as_deref(), params: &params };
    if let Err(e) = commands::run(&cli.cmd, &ctx, &mut report) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if !cli.global.no_timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    match cli.global.format {
        Format::Table => print!("{}", report.render_table()),
        Format::Tree => println!("{}", report.render_tree()),
    }
    ExitCode::from(report.outcome.exit_code() as u8)
}

use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use entroqubit::dynamics3::{make_sminus, make_splus};
use entroqubit::dynamics4::{make_composed, make_elementary};
use entroqubit::entropy::{renyi_entropy_with, LogBase, RenyiOrder};
use entroqubit::lattice::{apply, DenseJson, QuasiBistochasticMatrix, Tolerances};
use entroqubit::states::{sample_domain_state, Frame};
use entroqubit::verify::{self, Suite, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "entroqubit",
    version,
    about = "Qubit kinematics from collision-entropy-conserving lattice dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Global 64-bit seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.sum)]
    tol_sum: f64,

    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.orth)]
    tol_orth: f64,

    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.pos)]
    tol_pos: f64,

    /// Report entropies in bits.
    #[arg(long, global = true)]
    base2: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print a dynamics matrix with its determinant and residuals.
    Gen {
        #[arg(value_enum)]
        family: Family,
        /// One angle, or four comma-separated angles for composed4.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        phi: Vec<f64>,
        /// Fixed vertex (1-4) for elem4.
        #[arg(long)]
        axis: Option<usize>,
    },
    /// Max Renyi-entropy change under S+(phi) over random domain states.
    EntropyScan {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        /// Number of equally spaced angles in [0, 2pi).
        #[arg(long, default_value_t = 360, conflicts_with = "phi")]
        phi_grid: usize,
        /// Explicit comma-separated angles.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        phi: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1000)]
        n_states: usize,
    },
    /// Run verification suites and emit the evidence report.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Samples per sweep.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Splus,
    Sminus,
    Elem4,
    Composed4,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    D2nogo,
    D3,
    D4,
    Geometry,
    Oracle,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::D2nogo => vec![Suite::D2nogo],
            SuiteArg::D3 => vec![Suite::D3],
            SuiteArg::D4 => vec![Suite::D4],
            SuiteArg::Geometry => vec![Suite::Geometry],
            SuiteArg::Oracle => vec![Suite::Oracle],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

#[derive(Serialize)]
struct GenOutput {
    family: &'static str,
    params: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis: Option<usize>,
    matrix: DenseJson,
    determinant: f64,
    orthogonality_residual: f64,
    bistochastic_residual: f64,
}

enum Failure {
    Usage(String),
    Verification(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(usage)
        }
    }
}

fn tolerances(cli: &Cli) -> Tolerances {
    Tolerances {
        sum: cli.tol_sum,
        orth: cli.tol_orth,
        pos: cli.tol_pos,
    }
}

fn log_base(cli: &Cli) -> LogBase {
    if cli.base2 {
        LogBase::Two
    } else {
        LogBase::Natural
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen { family, phi, axis } => gen(cli, *family, phi, *axis),
        Command::EntropyScan {
            alpha,
            phi_grid,
            phi,
            n_states,
        } => entropy_scan(cli, alpha, *phi_grid, phi.as_deref(), *n_states),
        Command::Verify { suite, grid } => run_verify(cli, *suite, *grid),
    }
}

fn gen(cli: &Cli, family: Family, phi: &[f64], axis: Option<usize>) -> Result<(), Failure> {
    let want = if matches!(family, Family::Composed4) {
        4
    } else {
        1
    };
    if phi.len() != want {
        return Err(usage(format!(
            "expected {want} angle(s), got {}",
            phi.len()
        )));
    }
    if axis.is_some() && !matches!(family, Family::Elem4) {
        return Err(usage("--axis only applies to elem4"));
    }
    let (name, s): (&'static str, QuasiBistochasticMatrix) = match family {
        Family::Splus => ("splus", make_splus(phi[0])),
        Family::Sminus => ("sminus", make_sminus(phi[0])),
        Family::Elem4 => {
            let axis = axis.ok_or_else(|| usage("elem4 needs --axis"))?;
            ("elem4", make_elementary(axis, phi[0]).map_err(usage)?)
        }
        Family::Composed4 => ("composed4", make_composed([phi[0], phi[1], phi[2], phi[3]])),
    };
    let out = GenOutput {
        family: name,
        params: phi.to_vec(),
        axis,
        matrix: DenseJson::from_matrix(s.matrix()),
        determinant: s.determinant(),
        orthogonality_residual: s.orthogonality_residual(),
        bistochastic_residual: s.bistochastic_residual(),
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out).map_err(usage)? + "\n",
        Format::Csv => {
            let mut t = String::from("row,col,value\n");
            let m = s.matrix();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    t.push_str(&format!("{i},{j},{:.16e}\n", m[(i, j)]));
                }
            }
            t
        }
    };
    emit(cli, &text)
}

fn entropy_scan(
    cli: &Cli,
    alphas: &[f64],
    phi_grid: usize,
    phi: Option<&[f64]>,
    n_states: usize,
) -> Result<(), Failure> {
    let orders = alphas
        .iter()
        .map(|&a| RenyiOrder::new(a))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let angles: Vec<f64> = match phi {
        Some(list) => list.to_vec(),
        None if phi_grid > 0 => (0..phi_grid)
            .map(|i| i as f64 * TAU / phi_grid as f64)
            .collect(),
        None => return Err(usage("--phi-grid must be positive")),
    };
    let tol = tolerances(cli);
    let base = log_base(cli);
    let trine = Frame::trine();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let states: Vec<_> = (0..n_states)
        .map(|_| sample_domain_state(&trine, &mut rng))
        .collect();

    let mut csv = String::from("alpha,phi,max_deviation\n");
    let mut rows = Vec::new();
    for order in &orders {
        for &phi in &angles {
            let s = make_splus(phi);
            let mut worst = 0.0_f64;
            for p in &states {
                let image = apply(&s, p).map_err(usage)?;
                let before = renyi_entropy_with(p, *order, base, &tol).map_err(usage)?;
                let after = renyi_entropy_with(&image, *order, base, &tol).map_err(usage)?;
                worst = worst.max((after - before).abs());
            }
            csv.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                order.alpha(),
                phi,
                worst
            ));
            rows.push(
                serde_json::json!({"alpha": order.alpha(), "phi": phi, "max_deviation": worst}),
            );
        }
    }
    let text = match cli.format {
        Format::Csv => csv,
        Format::Json => serde_json::to_string_pretty(&rows).map_err(usage)? + "\n",
    };
    emit(cli, &text)
}

fn run_verify(cli: &Cli, suite: SuiteArg, grid: usize) -> Result<(), Failure> {
    if grid == 0 {
        return Err(usage("--grid must be positive"));
    }
    let config = VerifyConfig {
        seed: cli.seed,
        grid,
        tolerances: tolerances(cli),
        log_base: log_base(cli),
        ..VerifyConfig::default()
    };
    let report = verify::run(&suite.suites(), &config).map_err(usage)?;
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).map_err(usage)? + "\n",
        Format::Csv => report.to_csv(),
    };
    emit(cli, &text)?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<_> = report.failed_claims().map(|c| c.id.as_str()).collect();
        Err(Failure::Verification(format!(
            "failed claims: {}",
            names.join(", ")
        )))
    }
}

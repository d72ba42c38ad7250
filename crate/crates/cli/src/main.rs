use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scrap_cli::runner::{self, PassSummary};
use scrap_cli::{scenarios, OutputFormat, RunError, SurfaceConfig, OUT_DIR_ENV, SCENARIO_DIR_ENV};

#[derive(Parser)]
#[command(name = "scrap", version, about = "Stark-chirped rapid adiabatic passage in an atom-cavity system")]
struct Cli {
    /// Extra directory of scenario configs.
    #[arg(long, global = true, env = SCENARIO_DIR_ENV)]
    scenario_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario given as a config path or a bundled name.
    Run {
        config: String,
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        /// Overrides the format in the config.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// List bundled and user scenarios.
    List,
    /// Print eigenenergy surfaces over G in [0, gmax] and S in [smin, smax], units of delta.
    Surface {
        #[arg(long)]
        gmax: f64,
        #[arg(long, allow_hyphen_values = true)]
        smin: f64,
        #[arg(long, allow_hyphen_values = true)]
        smax: f64,
        #[arg(long)]
        res: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate the adiabaticity condition for every pass of a config.
    Check { config: String },
}

fn run(cli: Cli) -> Result<(), RunError> {
    let user_dir = cli.scenario_dir.as_deref();
    match cli.command {
        Command::Run { config, out, format } => {
            let cfg = scenarios::resolve(&config, user_dir)?;
            let output = runner::run(&cfg)?;
            let format = format.map_or(cfg.output.format, OutputFormat::from);
            for path in output.write(&out, &cfg.output.prefix, format)? {
                eprintln!("wrote {}", path.display());
            }
            for w in &output.summary.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::List => print!("{}", scenarios::listing(user_dir)),
        Command::Surface { gmax, smin, smax, res, format } => {
            SurfaceConfig { g_max: gmax, s_min: smin, s_max: smax, resolution: res }.validate()?;
            let (table, _) = runner::surface_table(gmax, smin, smax, res)?;
            match format {
                Format::Csv => print!("{}", table.to_csv()),
                Format::Json => print!("{}", table.to_json()),
            }
        }
        Command::Check { config } => {
            let cfg = scenarios::resolve(&config, user_dir)?;
            let specs = cfg.pass_specs()?;
            let margin = cfg.margin_factor.unwrap_or(scrap_core::analysis::DEFAULT_MARGIN_FACTOR);
            let reports: Vec<PassSummary> = runner::pass_summaries(&specs, margin);
            println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scrap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}


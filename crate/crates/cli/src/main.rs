use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use colav_cli::server::{router, AppState};
use colav_cli::{catalog, commands};
use colav_core::Verdict;
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "colav", version, about = "Collision-avoidance simulator with contrastive explanations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario without supervision and write its trace.
    Run {
        /// Scenario file, or the id of a bundled scenario.
        #[arg(long)]
        scenario: String,
        /// Verdict recorded when the decision point is reached.
        #[arg(long, value_enum)]
        decision: DecisionArg,
        /// Output JSONL trace.
        #[arg(long)]
        trace: PathBuf,
        /// Simulated seconds.
        #[arg(long, default_value_t = 300.0)]
        duration: f64,
        /// JSON configuration overriding the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-verify a recorded trace.
    Audit {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Serve the HTTP API and event streams.
    Serve {
        #[arg(long, env = "COLAV_PORT")]
        port: Option<u16>,
        /// Directory of extra scenario files.
        #[arg(long, env = "COLAV_SCENARIO_DIR")]
        scenario_dir: Option<PathBuf>,
        #[arg(long, env = "COLAV_CONFIG")]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DecisionArg {
    Accept,
    Decline,
}

impl From<DecisionArg> for Verdict {
    fn from(d: DecisionArg) -> Self {
        match d {
            DecisionArg::Accept => Verdict::Accepted,
            DecisionArg::Decline => Verdict::Declined,
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> colav_core::Result<ExitCode> {
    match command {
        Command::Run {
            scenario,
            decision,
            trace,
            duration,
            config,
        } => {
            let cfg = commands::load_config(config.as_deref())?;
            let scenario = catalog::resolve(&scenario, cfg.vessel.max_speed)?;
            let session = commands::run(scenario, cfg, decision.into(), duration, &trace)?;
            println!("{}", commands::summarize(&session));
            println!("trace         {}", trace.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { trace } => {
            let report = commands::audit_file(&trace)?;
            print!("{report}");
            if report.passed() {
                println!("audit passed");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("audit FAILED");
                Ok(ExitCode::from(1))
            }
        }
        Command::Serve {
            port,
            scenario_dir,
            config,
        } => {
            let mut cfg = commands::load_config(config.as_deref())?;
            if let Some(p) = port {
                cfg.server.port = p;
            }
            if let Some(d) = scenario_dir {
                cfg.server.scenario_dir = Some(d.display().to_string());
            }
            let dir = cfg.server.scenario_dir.as_ref().map(PathBuf::from);
            let scenarios = catalog::load_catalog(dir.as_deref(), cfg.vessel.max_speed)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(cfg, scenarios))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

async fn serve(cfg: colav_core::SimConfig, scenarios: Vec<colav_core::Scenario>) -> colav_core::Result<()> {
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], cfg.server.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    tracing::info!("{} scenarios loaded", scenarios.len());
    let app = router(AppState::new(cfg, scenarios));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

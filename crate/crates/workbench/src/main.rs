use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use fingerzone_core::sim::{preset, Scenario};
use fingerzone_workbench::{router, AppState, Session};
use tower_http::services::ServeDir;

#[derive(Parser)]
#[command(name = "fingerzone-workbench", version, about = "Operator workbench HTTP service")]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Preset name or scenario file.
    #[arg(long, default_value = "office")]
    scenario: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Delay between walk steps.
    #[arg(long, default_value_t = 500)]
    cadence_ms: u64,
    /// Directory with the built UI bundle to serve at `/`.
    #[arg(long)]
    ui: Option<PathBuf>,
}

fn load(source: &str) -> Result<Scenario, String> {
    if let Some(s) = preset(source) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(source).map_err(|e| format!("cannot read scenario `{source}`: {e}"))?;
    Scenario::from_json(&text).map_err(|e| format!("scenario `{source}`: {e}"))
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let scenario = match load(&args.scenario) {
        Ok(s) => args.seed.map_or(s.clone(), |seed| s.with_seed(seed)),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let state = AppState::new(Session::new(scenario), Duration::from_millis(args.cadence_ms));
    let mut app = router(state);
    if let Some(dir) = args.ui {
        app = app.fallback_service(ServeDir::new(dir));
    }
    let addr = SocketAddr::from(([0, 0, 0, 0], args.port));
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {addr}: {e}");
            return ExitCode::from(2);
        }
    };
    println!("listening on http://{addr}");
    if let Err(e) = axum::serve(listener, app).await {
        eprintln!("internal error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

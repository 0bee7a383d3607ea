use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use twist_service::{app, AppState, Config};

/// Local HTTP service for the twist workbench.
#[derive(Debug, Parser)]
#[command(name = "twistc-serve", version)]
struct Args {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Directory of web UI assets served under /ui/.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
    /// SMT solver command (default `$TWISTC_SMT_CMD`, then `z3 -in`).
    #[arg(long)]
    smt_cmd: Option<String>,
    /// External SAT solver command; the embedded solver is used otherwise.
    #[arg(long)]
    sat_cmd: Option<String>,
    /// External solver timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

#[tokio::main]
async fn main() {
    let args = Args::parse();
    let mut config = Config {
        ui_dir: args.ui_dir,
        ..Config::default()
    };
    config.solve.smt_cmd = args.smt_cmd;
    config.solve.sat_cmd = args.sat_cmd;
    config.solve.timeout = Duration::from_secs(args.timeout);
    let state = AppState::new(config);

    let sessions = state.sessions.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sessions.sweep();
        }
    });

    let listener = match tokio::net::TcpListener::bind(args.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot listen on {}: {e}", args.bind);
            std::process::exit(2);
        }
    };
    eprintln!("listening on http://{}", args.bind);
    if let Err(e) = axum::serve(listener, app(state)).await {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

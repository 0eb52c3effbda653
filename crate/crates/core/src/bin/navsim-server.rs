use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use navsim::server::{serve, SessionOptions};

/// WebSocket session server for the navigation simulator.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Address to listen on; port 0 picks a free port.
    #[arg(long, default_value = "127.0.0.1:8765")]
    bind: String,
    /// Directory that `file` scene sources are resolved against.
    #[arg(long)]
    scene_dir: Option<PathBuf>,
    /// error, warn, info, debug or trace.
    #[arg(long, default_value = "info")]
    log_level: log::LevelFilter,
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::new().filter_level(args.log_level).init();
    if let Some(dir) = &args.scene_dir {
        if !dir.is_dir() {
            eprintln!("error: scene directory {} does not exist", dir.display());
            return ExitCode::FAILURE;
        }
    }
    let opts = match SessionOptions::from_env(args.scene_dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .expect("tokio runtime");
    rt.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(&args.bind).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind {}: {e}", args.bind);
                return ExitCode::FAILURE;
            }
        };
        let addr = listener.local_addr().expect("bound socket has an address");
        println!("listening on {addr}");
        let _ = std::io::stdout().flush();
        tokio::select! {
            r = serve(listener, opts) => {
                if let Err(e) = r {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
                ExitCode::SUCCESS
            }
            _ = tokio::signal::ctrl_c() => {
                log::info!("shutting down");
                ExitCode::SUCCESS
            }
        }
    })
}

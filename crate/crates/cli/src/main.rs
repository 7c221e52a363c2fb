mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn configure_threads() {
    let Ok(value) = std::env::var("NIRB_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("NIRB_THREADS ignored: {e}");
            }
        }
        Err(_) => log::warn!("NIRB_THREADS=`{value}` is not a number, ignored"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    configure_threads();

    let result = match &cli.command {
        Command::MeshInfo(a) => commands::mesh_info(a),
        Command::Solve(a) => commands::solve(a),
        Command::Offline(a) => commands::offline(a),
        Command::Online(a) => commands::online(a),
        Command::Study(a) => commands::study(a),
        Command::Superconv(a) => commands::superconv(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

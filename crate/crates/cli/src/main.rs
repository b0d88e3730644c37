mod cli;
mod commands;
mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use cli::{Cli, Command};
use commands::Output;
use lowner_core::{Error, ProbeConfig};
use manifest::RunManifest;

const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;

fn json(v: &impl serde::Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Runs `command`; returns the output and the resolved sampling config.
fn execute(command: &Command) -> anyhow::Result<(Output, Option<ProbeConfig>)> {
    Ok(match command {
        Command::Verify { id, p, run } => {
            let config = run.config()?;
            let report = commands::verify(id, *p, &config)?;
            let code = if report.passed { 0 } else { EXIT_FAIL };
            (Output { body: json(&report)?, code }, Some(config))
        }
        Command::List => (Output { body: commands::list()? + "\n", code: 0 }, None),
        Command::Eval {
            spec,
            functional,
            mode,
            matrices,
        } => {
            let v = commands::eval(spec.as_deref(), *functional, *mode, matrices)?;
            (Output { body: json(&v)?, code: 0 }, None)
        }
        Command::Scan {
            family,
            p_grid,
            map,
            run,
        } => {
            let config = run.config()?;
            (commands::scan(*family, p_grid, map, &config)?, Some(config))
        }
        Command::Constants { h, p } => (Output { body: json(&commands::constants(*h, *p)?)?, code: 0 }, None),
        Command::Replay { .. } => unreachable!("replay is resolved before execution"),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify { .. } => "verify",
        Command::List => "list",
        Command::Eval { .. } => "eval",
        Command::Scan { .. } => "scan",
        Command::Constants { .. } => "constants",
        Command::Replay { .. } => "replay",
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::UnknownTheorem(_)) => {
            commands::print_registry();
            EXIT_USAGE
        }
        Some(Error::InvalidParameter(_) | Error::Parse(_)) => EXIT_USAGE,
        _ if e.downcast_ref::<std::num::ParseFloatError>().is_some()
            || e.downcast_ref::<std::num::ParseIntError>().is_some() =>
        {
            EXIT_USAGE
        }
        _ => EXIT_FAIL,
    }
}

fn write_output(body: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli, args: Vec<String>) -> anyhow::Result<i32> {
    let (command, args) = match cli.command {
        Command::Replay { manifest_file } => {
            let recorded = manifest::read(&manifest_file)?;
            eprintln!("replaying `{}` from {}", recorded.args.join(" "), manifest_file.display());
            let argv = std::iter::once("lowner".to_string()).chain(recorded.args.iter().cloned());
            let inner = Cli::try_parse_from(argv)?;
            if matches!(inner.command, Command::Replay { .. }) {
                anyhow::bail!("a manifest cannot record a replay");
            }
            (inner.command, recorded.args)
        }
        c => (c, args),
    };

    let started = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_millis() as u64;
    let clock = Instant::now();
    let (output, config) = execute(&command)?;
    write_output(&output.body, cli.out.as_ref())?;

    let manifest = RunManifest {
        command: command_name(&command).into(),
        args,
        config,
        version: env!("CARGO_PKG_VERSION").into(),
        started_unix_ms: started,
        wall_clock_ms: clock.elapsed().as_millis() as u64,
        outputs: cli.out.iter().cloned().collect(),
        exit_code: output.code,
    };
    match cli.manifest.clone().or_else(|| cli.out.as_deref().map(manifest::default_path)) {
        Some(path) => std::fs::write(&path, json(&manifest)?)?,
        None => eprintln!("manifest: {}", serde_json::to_string(&manifest)?),
    }
    Ok(output.code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let raw: Vec<OsString> = std::env::args_os().collect();
    let cli = Cli::parse_from(&raw);
    let args = manifest::replayable_args(raw.into_iter().skip(1));
    let code = run(cli, args).unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        exit_code_for(&e)
    });
    ExitCode::from(code as u8)
}

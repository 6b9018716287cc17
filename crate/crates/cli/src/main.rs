//! `whodge`: batch runner for identity checks, spectra, theorem checks and
//! convergence sweeps. Exit code 0 when every check passes, 1 when any check
//! fails, 2 on a configuration error.

mod config;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Arg, ArgAction, Command};

use config::{ConfigError, ConfigFile, Location, Settings, COMMANDS, KEYS, OUTPUT_KEYS};

fn cli() -> Command {
    let mut cmd = Command::new("whodge")
        .about("Weighted Hodge identities, spectra and eigenvalue bounds")
        .arg(
            Arg::new("command")
                .value_parser(COMMANDS)
                .help("Command to run; may instead be given as `command = ...` in the config file"),
        )
        .arg(Arg::new("config").long("config").short('c').value_name("FILE").help("Flat key = value config file"));
    for key in KEYS.iter().chain(OUTPUT_KEYS.iter()).filter(|k| **k != "command") {
        let long = key.replace('_', "-");
        let mut arg = Arg::new(*key)
            .long(long.clone())
            .value_name("VALUE")
            .allow_hyphen_values(true)
            .action(ArgAction::Set);
        if long != *key {
            arg = arg.alias(*key);
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run_cli(&matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_cli(m: &clap::ArgMatches) -> Result<u8, ConfigError> {
    let file = m.get_one::<String>("config").map(|p| ConfigFile::load(&PathBuf::from(p))).transpose()?;
    let command = match (m.get_one::<String>("command"), file.as_ref().and_then(|f| f.command())) {
        (Some(c), _) => c.clone(),
        (None, Some((c, at))) => {
            if !COMMANDS.contains(&c.as_str()) {
                return Err(ConfigError::new(at, format!("unknown command '{c}'")));
            }
            c
        }
        (None, None) => {
            return Err(ConfigError::new(Location::Missing, "no command given (positional or `command = ...` in the config)"))
        }
    };
    let flags: Vec<(String, String)> = KEYS
        .iter()
        .chain(OUTPUT_KEYS.iter())
        .filter(|k| **k != "command")
        .filter_map(|k| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    let mut settings = Settings::merge(&command, file.as_ref(), &flags);
    let resolved = run::resolve(&mut settings)?;
    let report_path = settings.output("report").map(PathBuf::from);
    let csv_path = settings.output("csv").map(PathBuf::from);
    settings.finish()?;

    let start = Instant::now();
    let outcome = run::execute(&resolved);
    let wall = start.elapsed().as_secs_f64();
    let code = if outcome.pass { 0 } else { 1 };
    let rep = report::Report::new(&command, settings.echo(), resolved.seed, &outcome, code, wall);
    let json = rep.to_json();
    let written = match &report_path {
        Some(p) => report::write_atomic(p, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    };
    let written = written.and_then(|_| match &csv_path {
        Some(p) => report::write_atomic(p, outcome.csv.as_bytes()),
        None => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error writing output: {e}");
        return Ok(1);
    }
    eprintln!("{command}: {} ({} result(s), {wall:.2} s)", if outcome.pass { "PASS" } else { "FAIL" }, outcome.results.len());
    Ok(code)
}

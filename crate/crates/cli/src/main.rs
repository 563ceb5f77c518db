mod args;
mod commands;
mod config;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};

fn run() -> Result<()> {
    let argv = config::merge(std::env::args_os().collect())?;
    let cli = Cli::parse_from(argv);
    let echo = config::resolved(&cli)?;
    for (k, v) in echo.iter() {
        eprintln!("# {k}={v}");
    }

    let jobs = cli.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building thread pool")?;

    let mut out = Vec::new();
    for (k, v) in echo.iter() {
        writeln!(out, "# {k}={v}")?;
    }
    let result = pool.install(|| match &cli.command {
        Command::InduceLexicon(a) => commands::induce_lexicon(a, &mut out),
        Command::CodeSwitch(a) => commands::code_switch(a, &mut out),
        Command::Mix(a) => commands::mix(a, &mut out),
        Command::Eval(a) => commands::eval(a, &mut out),
        Command::AnalyzeOverlap(a) => commands::analyze_overlap(a, &mut out),
        Command::ToyExperiment(a) => commands::toy_experiment(a, &mut out),
        Command::LexiconStats(a) => commands::lexicon_stats(a, &mut out),
    });
    let mut stdout = io::stdout().lock();
    stdout.write_all(&out)?;
    stdout.flush()?;
    result
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

mod args;
mod commands;
mod config;
mod emit;
mod error;
mod fields;

use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use crate::args::Cli;
use crate::config::RunConfig;
use crate::emit::{canonical_json, write_all, Artifact, VERSION};
use crate::error::CliError;

fn envelope(cfg: &RunConfig, pass: bool, result: Value) -> Value {
    let mut top = match result {
        Value::Object(m) => Value::Object(m),
        other => json!({ "result": other }),
    };
    let o = top.as_object_mut().expect("object");
    o.insert("command".into(), json!(cfg.command));
    o.insert("config".into(), cfg.echo());
    o.insert("version".into(), json!(VERSION));
    o.insert("pass".into(), json!(pass));
    top
}

fn execute(cfg: &RunConfig) -> Result<bool, CliError> {
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let (pass, json, table, summary) = match commands::run(cfg) {
        Ok(o) => (o.pass, envelope(cfg, o.pass, o.result), o.table, o.summary),
        // A check that fails inside a module still leaves a record.
        Err(CliError::Check(m)) => (false, envelope(cfg, false, json!({ "error": m })), None, m),
        Err(e) => return Err(e),
    };
    let mut artifacts = vec![Artifact {
        name: format!("{}.json", cfg.command),
        content: canonical_json(&json),
    }];
    if let Some(t) = table {
        artifacts.push(Artifact {
            name: format!("{}.csv", cfg.command),
            content: t.render(&cfg.echo()),
        });
    }
    let paths = write_all(&cfg.out, &artifacts)?;
    println!("{}: {} ({summary})", cfg.command, if pass { "pass" } else { "FAIL" });
    for p in paths {
        println!("  wrote {}", p.display());
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::parse_config(&cli).and_then(|cfg| execute(&cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("prig: {e}");
            e.exit()
        }
    }
}

//! Command-line harness around `ptmc-core`: problem generation, repeated
//! timed runs, worker scaling, throughput by problem size, packing plans
//! and checkpoint resume.

pub mod args;
pub mod bench;
pub mod commands;
pub mod config;
pub mod report;

use anyhow::Result;

use args::{Cli, Command};

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => commands::cmd_generate(a).map(drop),
        Command::Run(a) => commands::cmd_run(a).map(drop),
        Command::Scaling(a) => commands::cmd_scaling(a).map(drop),
        Command::Throughput(a) => commands::cmd_throughput(a).map(drop),
        Command::PackPlan(a) => commands::cmd_pack_plan(a).map(drop),
        Command::Resume(a) => commands::cmd_resume(a).map(drop),
    }
}

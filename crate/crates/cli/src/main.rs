mod args;
mod commands;
mod output;
mod source;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command, Format};

/// `HODGELAB_THREADS` caps the rayon pool; unset means one worker per core.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("HODGELAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("HODGELAB_THREADS=`{raw}` is not a count"))?;
    if n == 0 {
        bail!("HODGELAB_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    for (name, v) in [("--tol-exact", c.tol_exact), ("--tol-accum", c.tol_accum), ("--kernel-thresh", c.kernel_thresh)] {
        if !(v > 0.0 && v.is_finite()) {
            bail!("{name} must be positive, got {v}");
        }
    }
    let text = match &cli.command {
        Command::Generate(a) => {
            if c.format == Format::Csv {
                bail!("generate writes a complex description; only JSON is supported");
            }
            commands::generate(a)?
        }
        Command::Assemble(a) => commands::assemble(cli, a)?.render(c.format)?,
        Command::Chi(a) => commands::chi(cli, a)?.render(c.format)?,
        Command::Divergence(a) => commands::divergence(cli, a)?.render(c.format)?,
        Command::Spectrum(a) => commands::spectrum_cmd(cli, a)?.render(c.format)?,
        Command::Hodge(a) => commands::hodge(cli, a)?.render(c.format)?,
        Command::Sweep(a) => commands::sweep(cli, a)?.render(c.format)?,
    };
    output::emit(c, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

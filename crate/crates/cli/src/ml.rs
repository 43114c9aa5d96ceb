use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use tfse_core::specfun::{self, FractionalOrder, KernelOptions, Ray};

use crate::args::Grid;
use crate::output::{Format, OutputDir, Table};
use crate::session::{ConfigArg, Session};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl From<Sign> for Ray {
    fn from(s: Sign) -> Ray {
        match s {
            Sign::Plus => Ray::PlusI,
            Sign::Minus => Ray::MinusI,
        }
    }
}

/// Evaluate `E_ν(σ (±i)^ν t^ν)` and its oscillatory/decay split.
#[derive(Debug, Clone, Args, Serialize)]
pub struct MlArgs {
    /// Fractional order, 0 < nu <= 2.
    #[arg(long)]
    pub nu: f64,
    /// Magnitude of the argument coefficient, >= 0.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Ray of the argument: (+i)^nu or (-i)^nu.
    #[arg(long, value_enum, default_value_t = Sign::Minus)]
    pub sign: Sign,
    /// Times as start:stop:count.
    #[arg(long = "t-grid")]
    pub t_grid: Grid,
    /// Absolute tolerance of the decay integral.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    #[serde(skip)]
    pub config: ConfigArg,
    /// Write `ml.<ext>` and a manifest here instead of printing to stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn table(args: &MlArgs) -> Result<Table> {
    let order = FractionalOrder::new(args.nu)?;
    let opts = KernelOptions::with_tol(args.tol);
    let ray = Ray::from(args.sign);
    let rows = args
        .t_grid
        .points()
        .into_par_iter()
        .map(|t| {
            let d = specfun::ml_ray_decomposed(args.sigma, ray, order, t, &opts)?;
            Ok(vec![
                t,
                d.total.re,
                d.total.im,
                d.oscillatory.re,
                d.oscillatory.im,
                d.decay.re,
                d.decay.im,
            ])
        })
        .collect::<tfse_core::Result<Vec<_>>>()?;
    let mut table = Table::new(vec!["t", "re_total", "im_total", "re_osc", "im_osc", "re_decay", "im_decay"])
        .meta("quantity", "E_nu(sigma * ray^nu * t^nu) = osc - decay")
        .meta("nu", args.nu)
        .meta("sigma", args.sigma)
        .meta("ray", format!("{:?}", args.sign).to_lowercase());
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

pub fn run(args: &MlArgs, session: &Session) -> Result<()> {
    let table = table(args)?;
    match &args.out_dir {
        None => print!("{}", table.render(args.format)),
        Some(dir) => {
            let mut out = OutputDir::create(dir, args.format)?;
            out.write("ml", &table)?;
            let path = out.finish(session.manifest("ml", args, &KernelOptions::with_tol(args.tol)))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

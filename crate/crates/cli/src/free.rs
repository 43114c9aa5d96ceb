use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use tfse_core::specfun::{FractionalOrder, KernelOptions, Regime};
use tfse_core::tfse::{self, FreeField, RunConfig, SpectralPacket};

use crate::args::{Grid, Packet};
use crate::output::{Format, OutputDir, Table};
use crate::session::{usage, ConfigArg, Session};

/// Free particle from a Gaussian packet, evolved in Fourier space.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FreeArgs {
    /// Fractional order, 0 < nu <= 2.
    #[arg(long)]
    pub nu: f64,
    /// Mass in Planck masses.
    #[arg(long, default_value_t = 0.5)]
    pub nm: f64,
    /// Constant potential in Planck energies.
    #[arg(long, default_value_t = 0.0)]
    pub nv: f64,
    /// Initial packet as gaussian:center:width[:scale].
    #[arg(long, default_value = "gaussian:0:1")]
    pub packet: Packet,
    /// Positions for field snapshots, start:stop:count.
    #[arg(long = "x-grid", default_value = "-20:20:401")]
    pub x_grid: Grid,
    /// Symmetric wavenumber grid, -max:max:count.
    #[arg(long = "lambda-grid", default_value = "-8:8:321")]
    pub lambda_grid: Grid,
    /// Snapshot times, start:stop:count.
    #[arg(long = "t-grid")]
    pub t_grid: Grid,
    /// Two-datum evolution for 1 < nu <= 2.
    #[arg(long)]
    pub high_order: bool,
    /// Initial time derivative packet for --high-order (default zero).
    #[arg(long)]
    pub packet1: Option<Packet>,
    /// Absolute tolerance of the decay integral.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    #[serde(skip)]
    pub config: ConfigArg,
    /// Directory for output files and the run manifest.
    #[arg(long, default_value = "tfse-out")]
    pub out_dir: PathBuf,
}

fn build_packet(p: &Packet, grid: &Grid) -> Result<SpectralPacket> {
    if grid.count < 3 || grid.start != -grid.stop {
        return Err(usage("--lambda-grid must be symmetric, -max:max:count with count >= 3"));
    }
    let base = tfse::gaussian_packet(p.center, p.width, grid.stop, grid.count)?;
    let amps: Vec<Complex64> = base.amplitudes().iter().map(|a| a * p.scale).collect();
    Ok(SpectralPacket::new(base.wavenumbers().to_vec(), amps)?)
}

pub fn run(args: &FreeArgs, session: &Session) -> Result<()> {
    let order = FractionalOrder::new(args.nu)?;
    let cfg = RunConfig::new(order, args.nm, args.nv)?;
    let opts = KernelOptions::with_tol(args.tol);
    let super_unit = order.regime() == Regime::SuperUnit;
    match (super_unit, args.high_order) {
        (true, false) => return Err(usage("nu > 1 needs two initial data: pass --high-order (and optionally --packet1)")),
        (false, true) => return Err(usage("--high-order applies only for 1 < nu <= 2")),
        _ => {}
    }
    if args.packet1.is_some() && !args.high_order {
        return Err(usage("--packet1 requires --high-order"));
    }
    let p0 = build_packet(&args.packet, &args.lambda_grid)?;
    let p1 = match &args.packet1 {
        Some(p) => build_packet(p, &args.lambda_grid)?,
        None => SpectralPacket::new(p0.wavenumbers().to_vec(), vec![Complex64::new(0.0, 0.0); p0.wavenumbers().len()])?,
    };
    let positions = args.x_grid.points();
    let times = args.t_grid.points();

    let snapshots = times
        .par_iter()
        .map(|&t| {
            let packet = if super_unit {
                tfse::free_spectrum_high_order(&p0, &p1, &cfg, t, &opts)?
            } else {
                tfse::free_spectrum_evolve(&p0, &cfg, t, &opts)?
            };
            let field = tfse::free_field(&packet, &positions)?;
            Ok((tfse::spectral_probability(&packet), field))
        })
        .collect::<tfse_core::Result<Vec<(f64, FreeField)>>>()?;

    let mut out = OutputDir::create(&args.out_dir, args.format)?;
    let meta = |t: Table| {
        t.meta("nu", args.nu)
            .meta("nm", args.nm)
            .meta("nv", args.nv)
            .meta("packet", format!("gaussian:{}:{}:{}", args.packet.center, args.packet.width, args.packet.scale))
    };
    let mut series = meta(Table::new(vec!["t", "spectral_probability", "spatial_probability"]))
        .meta("quantity", "total probability, (1/2pi) int |Psi|^2 dlambda and int |psi|^2 dx over the x-grid");
    if !super_unit {
        series = series.meta("limit", 1.0 / (args.nu * args.nu));
    }
    for (k, (&t, (spec_p, field))) in times.iter().zip(&snapshots).enumerate() {
        series.push(vec![t, *spec_p, tfse::total_probability(&field.psi)]);

        let mut snap = meta(Table::new(vec!["x", "re", "im", "probability"])).meta("t", t);
        for (x, v) in positions.iter().zip(field.psi.values()) {
            snap.push(vec![*x, v.re, v.im, v.norm_sqr()]);
        }
        out.write(&format!("free_field_{k:04}"), &snap)?;

        if !super_unit {
            let mut split = meta(Table::new(vec!["x", "re_s", "im_s", "re_d", "im_d"]))
                .meta("t", t)
                .meta("quantity", "psi = psi_s + psi_d");
            for ((x, s), d) in positions.iter().zip(field.psi_s.values()).zip(field.psi_d.values()) {
                split.push(vec![*x, s.re, s.im, d.re, d.im]);
            }
            out.write(&format!("free_split_{k:04}"), &split)?;
        }
    }
    out.write("free_probability", &series)?;
    let path = out.finish(session.manifest("free", args, &opts))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

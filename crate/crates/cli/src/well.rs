use std::path::PathBuf;

use anyhow::Result;
use clap::{ArgAction, Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use tfse_core::specfun::{FractionalOrder, KernelOptions, Regime};
use tfse_core::tfse::{self, RunConfig, TimeSeries, WellMode};
use tfse_core::Error;

use crate::args::{ComplexArg, Grid};
use crate::output::{Format, OutputDir, Table};
use crate::session::{usage, ConfigArg, Session};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Emit {
    Amplitude,
    Probability,
    Energy,
    Continuity,
}

/// One infinite-well mode: amplitude, probability, energy, continuity balance.
#[derive(Debug, Clone, Args, Serialize)]
pub struct WellArgs {
    /// Fractional order, 0 < nu <= 2.
    #[arg(long)]
    pub nu: f64,
    /// Mode number, >= 1.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Well width in Planck lengths.
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub a: f64,
    /// Mass in Planck masses.
    #[arg(long, default_value_t = 0.5)]
    pub nm: f64,
    /// Constant potential in Planck energies.
    #[arg(long, default_value_t = 0.0)]
    pub nv: f64,
    /// Times as start:stop:count.
    #[arg(long = "t-grid")]
    pub t_grid: Grid,
    /// Comma-separated outputs.
    #[arg(long, value_enum, value_delimiter = ',', action = ArgAction::Set, default_value = "probability")]
    pub emit: Vec<Emit>,
    /// Initial time derivative A'(0) for 1 < nu <= 2, as re,im.
    #[arg(long, default_value = "0")]
    pub a1: ComplexArg,
    /// Spatial nodes for the continuity check.
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    /// History step for the continuity check.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
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

struct Setup {
    cfg: RunConfig,
    mode: WellMode,
    opts: KernelOptions,
    super_unit: bool,
}

impl Setup {
    fn amplitude(&self, a1: ComplexArg, t: f64) -> tfse_core::Result<num_complex::Complex64> {
        if self.super_unit {
            tfse::well_amplitude_high_order(&self.mode, &self.cfg, a1.value(), t, &self.opts)
        } else {
            tfse::well_amplitude(&self.mode, &self.cfg, t, &self.opts)
        }
    }
}

fn header(table: Table, args: &WellArgs, s: &Setup) -> Table {
    table
        .meta("nu", args.nu)
        .meta("n", args.n)
        .meta("a", args.a)
        .meta("nm", args.nm)
        .meta("nv", args.nv)
        .meta("omega_n", s.mode.omega_n)
}

pub fn run(args: &WellArgs, session: &Session) -> Result<()> {
    let order = FractionalOrder::new(args.nu)?;
    let cfg = RunConfig::new(order, args.nm, args.nv)?;
    let setup = Setup {
        mode: tfse::well_mode(args.n, args.a, &cfg)?,
        cfg,
        opts: KernelOptions::with_tol(args.tol),
        super_unit: order.regime() == Regime::SuperUnit,
    };
    if !setup.super_unit && args.a1.value().norm() != 0.0 {
        return Err(usage("--a1 only applies for 1 < nu <= 2"));
    }
    let times = args.t_grid.points();
    let mut out = OutputDir::create(&args.out_dir, args.format)?;
    let mut emitted = args.emit.clone();
    emitted.dedup();
    for emit in emitted {
        let table = match emit {
            Emit::Amplitude => amplitude(args, &setup, &times)?,
            Emit::Probability => probability(args, &setup, &times)?,
            Emit::Energy => energy(args, &setup, &times)?,
            Emit::Continuity => continuity(args, &setup, &times)?,
        };
        let stem = format!("well_{}", format!("{emit:?}").to_lowercase());
        out.write(&stem, &table)?;
    }
    let path = out.finish(session.manifest("well", args, &setup.opts))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn amplitude(args: &WellArgs, s: &Setup, times: &[f64]) -> Result<Table> {
    let mut table = if s.super_unit {
        Table::new(vec!["t", "re_total", "im_total"])
    } else {
        Table::new(vec!["t", "re_total", "im_total", "re_osc", "im_osc", "re_decay", "im_decay"])
    };
    let rows = times
        .par_iter()
        .map(|&t| {
            if s.super_unit {
                let a = s.amplitude(args.a1, t)?;
                Ok(vec![t, a.re, a.im])
            } else {
                let d = tfse::well_amplitude_parts(&s.mode, &s.cfg, t, &s.opts)?;
                Ok(vec![t, d.total.re, d.total.im, d.oscillatory.re, d.oscillatory.im, d.decay.re, d.decay.im])
            }
        })
        .collect::<tfse_core::Result<Vec<_>>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(header(table, args, s).meta("quantity", "modal amplitude A(t), A(0) = 1"))
}

fn probability(args: &WellArgs, s: &Setup, times: &[f64]) -> Result<Table> {
    let rows = times
        .par_iter()
        .map(|&t| Ok(vec![t, s.amplitude(args.a1, t)?.norm_sqr()]))
        .collect::<tfse_core::Result<Vec<_>>>()?;
    let mut table = header(Table::new(vec!["t", "probability"]), args, s).meta("quantity", "total probability |A(t)|^2");
    if !s.super_unit {
        let nu = args.nu;
        // |osc| = 1/ν, so ||A|² − 1/ν²| ≤ 2|F|/ν + |F|².
        let t_max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let f = tfse::well_amplitude_parts(&s.mode, &s.cfg, t_max, &s.opts)?.decay.norm();
        table = table
            .meta("limit", 1.0 / (nu * nu))
            .meta("tail_bound_at_t_max", 2.0 * f / nu + f * f);
    }
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn energy(args: &WellArgs, s: &Setup, times: &[f64]) -> Result<Table> {
    if s.super_unit {
        return Err(usage("--emit energy is available for 0 < nu <= 1 only"));
    }
    let rows = times
        .par_iter()
        .map(|&t| {
            let e = tfse::energy_level(&s.mode, &s.cfg, t, &s.opts)?;
            Ok(vec![t, e.re, e.im])
        })
        .collect::<tfse_core::Result<Vec<_>>>()?;
    let mut table = header(Table::new(vec!["t", "re_energy", "im_energy"]), args, s)
        .meta("quantity", "E_n(t) = i conj(A) dA/dt")
        .meta("limit", tfse::energy_limit(&s.mode, &s.cfg));
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// `d/dt ∫P` against `∫S` on the sampled history `t_k = k dt`; requested
/// times snap to the nearest history node.
fn continuity(args: &WellArgs, s: &Setup, times: &[f64]) -> Result<Table> {
    if s.super_unit {
        return Err(usage("--emit continuity is available for 0 < nu <= 1 only"));
    }
    if !(args.dt > 0.0) || args.nx < 3 {
        return Err(usage("continuity needs --dt > 0 and --nx >= 3"));
    }
    let dt = args.dt;
    let ks: Vec<usize> = times.iter().map(|t| (t / dt).round() as usize).collect();
    if ks.iter().any(|&k| k == 0) {
        return Err(Error::SingularTime.into());
    }
    let last = ks.iter().copied().max().unwrap_or(0) + 1;
    let history: Vec<f64> = (0..=last).map(|k| k as f64 * dt).collect();
    let amps = TimeSeries::sample("A", history, |t| s.amplitude(args.a1, t))?;
    let fields = amps
        .values()
        .par_iter()
        .map(|a| tfse::well_field(&s.mode, *a, args.nx))
        .collect::<tfse_core::Result<Vec<_>>>()?;
    let initial = tfse::initial_caputo(&fields[0], &s.cfg);
    let rows = ks
        .par_iter()
        .map(|&k| {
            let t = k as f64 * dt;
            let dp = (tfse::total_probability(&fields[k + 1]) - tfse::total_probability(&fields[k - 1])) / (2.0 * dt);
            let weighted = tfse::weighted_history(&fields[..=k], dt, s.cfg.nu())?;
            let src = tfse::source_term(&fields[k], &weighted, &initial, &s.cfg, t)?;
            let int_s = tfse::field_integral(&src).re;
            Ok(vec![t, dp, int_s, dp - int_s])
        })
        .collect::<tfse_core::Result<Vec<_>>>()?;
    let mut table = header(Table::new(vec!["t", "dP_dt", "int_S", "difference"]), args, s)
        .meta("quantity", "continuity balance d/dt int P = int S")
        .meta("dt", dt)
        .meta("nx", args.nx);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

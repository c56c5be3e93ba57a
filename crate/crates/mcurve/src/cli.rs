//! Command-line front end: bootstrap, price, calibrate, simulate, report.
//!
//! Exit codes: 0 success, 1 input/configuration error, 2 numerical failure.
//! All diagnostics go to standard error; results go to stdout or to the
//! declared output files.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bootstrap::{bootstrap_all, bootstrap_single_curve, BootstrapSpec};
use crate::calibration::{
    calibrate_mmg, calibrate_sabr_surface, MmgCalibrationConfig, MmgCmsTarget, MmgStructure,
    MmgTarget, SabrCalibrationConfig,
};
use crate::cms::{cms_fair_spread, spread_option_price, CmsMode, CmsSwapSpec, SpreadOptionSpec, SpreadVariant};
use crate::curves::{CurveMode, CurveSet};
use crate::error::{Error, Result};
use crate::instruments::{basis_swap_fair_spread, fra_par_rate, irs_fair_rate, FraConvexity};
use crate::marketdata::{
    load_artifact, load_quotes, persist, quote_format_for, save_quotes, Quote, QuoteSet,
    ReferenceScenario,
};
use crate::mmg::{simulate_paths, McConfig, MmgModel};
use crate::report::{
    write_cms_curves, write_fwd_curves, write_fwd_swap_grid, write_mmg_calib, write_spread_options,
    write_swaption_grid, Figure,
};
use crate::timegrid::Tenor;
use crate::volmodels::{
    sabr_implied_vol, swaption_price, swaption_schedules, SabrSurface, Settlement, SwaptionQuote,
};

#[derive(Parser, Debug)]
#[command(name = "mcurve", version, about = "Multi-curve interest-rate pricing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bootstrap the discounting and forwarding curves from a quote file.
    Bootstrap(BootstrapArgs),
    /// Price a single instrument from bootstrapped curves.
    #[command(subcommand)]
    Price(PriceCommand),
    /// Calibrate a SABR surface or an MMG model.
    #[command(subcommand)]
    Calibrate(CalibrateCommand),
    /// Simulate MMG factor paths to a CSV file.
    Simulate(SimulateArgs),
    /// Emit figure plot data as CSV.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct BootstrapArgs {
    /// Quote file (CSV or JSON by extension). With --generate-reference the
    /// file is first written from the built-in reference scenario.
    #[arg(long)]
    pub quotes: PathBuf,
    #[arg(long)]
    pub out_curves: PathBuf,
    /// Also emit the classical single-curve (6m) bootstrap.
    #[arg(long)]
    pub out_single: Option<PathBuf>,
    /// Generate the synthetic reference scenario into --quotes before
    /// bootstrapping.
    #[arg(long)]
    pub generate_reference: bool,
    /// Seed recorded in the generated reference scenario.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum PriceCommand {
    /// Fair fixed rate of a (forward-start) swap.
    Irs {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long)]
        years: f64,
        #[arg(long, default_value = "6m")]
        tenor: String,
        #[arg(long, default_value = "multi")]
        mode: String,
    },
    /// Par rate of a FRA fixing at --start on the given tenor.
    Fra {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        start: f64,
        #[arg(long, default_value = "6m")]
        tenor: String,
        /// Optional MMG model file enabling the Gaussian convexity.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Fair spread of a tenor basis swap (added to the lower-tenor leg).
    Basis {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        tenor_hi: String,
        #[arg(long)]
        tenor_lo: String,
        #[arg(long)]
        years: f64,
    },
    /// European payer swaption priced off a SABR surface.
    Swaption {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        sabr: PathBuf,
        #[arg(long)]
        expiry: f64,
        #[arg(long)]
        years: f64,
        /// Absolute strike; omitted = ATM.
        #[arg(long)]
        strike: Option<f64>,
        #[arg(long, default_value = "cash")]
        settlement: String,
        #[arg(long, default_value = "multi")]
        mode: String,
    },
    /// Fair spread of a CMS swap.
    Cms {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        sabr: PathBuf,
        #[arg(long)]
        maturity_years: f64,
        #[arg(long)]
        swap_years: f64,
        #[arg(long, default_value = "hybrid")]
        mode: String,
    },
    /// CMS spread option at a flat correlation.
    SpreadOption {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        sabr: PathBuf,
        #[arg(long)]
        expiry: f64,
        #[arg(long)]
        tenor_b: f64,
        #[arg(long)]
        tenor_c: f64,
        #[arg(long)]
        strike: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "martingale")]
        variant: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CalibrateCommand {
    Sabr {
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "multi")]
        mode: String,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Calibrate beta per tenor (needs CMS quotes to be identified).
        #[arg(long)]
        fit_beta: bool,
    },
    Mmg {
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        scenarios: usize,
        #[arg(long, default_value_t = 2)]
        factors: usize,
        #[arg(long, default_value_t = 45.0)]
        horizon: f64,
        /// Include smile quotes as targets (slower); ATM + CMS otherwise.
        #[arg(long)]
        smile: bool,
    },
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub paths: usize,
    /// Comma-separated simulation dates in years.
    #[arg(long, default_value = "1,2,5,10")]
    pub grid: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub no_antithetic: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// fwd_curves | fwd_swap_grid | swaption_grid | cms_curves |
    /// spread_options | mmg_calib
    #[arg(long)]
    pub figure: String,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[arg(long)]
    pub single_curves: Option<PathBuf>,
    #[arg(long)]
    pub quotes: Option<PathBuf>,
    #[arg(long)]
    pub sabr: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value = "hybrid")]
    pub mode: String,
    #[arg(long, default_value_t = 0.8)]
    pub rho: f64,
}

fn parse_tenor(s: &str) -> Result<Tenor> {
    Tenor::parse(s)
}

fn parse_curve_mode(s: &str) -> Result<CurveMode> {
    match s {
        "single" => Ok(CurveMode::SingleCurve),
        "multi" => Ok(CurveMode::MultiCurve),
        other => Err(Error::input(format!("unknown curve mode '{other}' (single|multi)"))),
    }
}

fn parse_cms_mode(s: &str) -> Result<CmsMode> {
    match s {
        "single" => Ok(CmsMode::Single),
        "multi" => Ok(CmsMode::Multi),
        "hybrid" => Ok(CmsMode::Hybrid),
        other => Err(Error::input(format!("unknown mode '{other}' (single|multi|hybrid)"))),
    }
}

fn parse_settlement(s: &str) -> Result<Settlement> {
    match s {
        "cash" => Ok(Settlement::Cash),
        "physical" => Ok(Settlement::Physical),
        other => Err(Error::input(format!("unknown settlement '{other}' (cash|physical)"))),
    }
}

fn parse_variant(s: &str) -> Result<SpreadVariant> {
    match s {
        "as-printed" => Ok(SpreadVariant::AsPrinted),
        "martingale" => Ok(SpreadVariant::Martingale),
        other => Err(Error::input(format!("unknown variant '{other}' (as-printed|martingale)"))),
    }
}

fn load_curves(path: &Path) -> Result<CurveSet> {
    load_artifact("curves", path)
}

fn load_sabr(path: &Path) -> Result<SabrSurface> {
    load_artifact("sabr", path)
}

fn load_model(path: &Path) -> Result<MmgModel> {
    load_artifact("mmg", path)
}

fn require<'a, T>(opt: &'a Option<T>, flag: &str, figure: &str) -> Result<&'a T> {
    opt.as_ref()
        .ok_or_else(|| Error::input(format!("figure {figure} requires --{flag}")))
}

/// Swaption-vol and CMS targets for MMG calibration/reporting, built from a
/// quote set. Strikes are made absolute against the multi-curve forward.
pub fn mmg_targets_from_quotes(
    quotes: &QuoteSet,
    cs: &CurveSet,
    include_smile: bool,
) -> Result<(Vec<MmgTarget>, Vec<MmgCmsTarget>)> {
    let mut view = cs.clone();
    view.mode = CurveMode::MultiCurve;
    let mut targets = Vec::new();
    for r in quotes.swaption_vols() {
        if let Quote::SwaptionVol {
            expiry,
            swap_tenor_years,
            strike_offset,
            settlement,
            vol,
        } = r.quote
        {
            if strike_offset.is_some() && !include_smile {
                continue;
            }
            let strike = match strike_offset {
                None => None,
                Some(off) => {
                    let (fl, fx) = swaption_schedules(expiry, swap_tenor_years, Tenor::M6)?;
                    Some(irs_fair_rate(&view, &fl, &fx, Tenor::M6)? + off)
                }
            };
            targets.push(MmgTarget {
                swaption: crate::mmg::MmgSwaption {
                    expiry,
                    swap_tenor_years,
                    strike,
                    settlement,
                    float_tenor: Tenor::M6,
                },
                market_vol: vol,
            });
        }
    }
    let mut cms = Vec::new();
    for r in quotes.cms_spreads() {
        if let Quote::CmsSpread {
            maturity_years,
            swap_tenor_years,
            spread,
        } = r.quote
        {
            cms.push(MmgCmsTarget {
                spec: CmsSwapSpec::standard((maturity_years * 4.0).round() as usize, swap_tenor_years)?,
                spread,
            });
        }
    }
    Ok((targets, cms))
}

/// Runs one parsed command; errors bubble up to `main` for exit-code
/// classification.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bootstrap(args) => {
            if args.generate_reference {
                let scenario = ReferenceScenario {
                    seed: args.seed,
                    ..ReferenceScenario::default()
                };
                let qs = scenario.generate()?;
                save_quotes(&qs, &args.quotes, quote_format_for(&args.quotes))?;
                log::info!("wrote reference scenario quotes to {}", args.quotes.display());
            }
            let quotes = load_quotes(&args.quotes, quote_format_for(&args.quotes))?;
            let (cs, rep) = bootstrap_all(&quotes, &BootstrapSpec::default())?;
            log::info!(
                "bootstrap: {} sweeps, max residual {:.3e}",
                rep.sweeps.values().copied().max().unwrap_or(0),
                rep.max_residual()
            );
            persist("curves", &cs, &args.out_curves)?;
            if let Some(single_path) = &args.out_single {
                let single = bootstrap_single_curve(&quotes)?;
                persist("curves", &single, single_path)?;
            }
            Ok(())
        }
        Command::Price(cmd) => {
            let value = price(cmd)?;
            println!("{value}");
            Ok(())
        }
        Command::Calibrate(cmd) => calibrate(cmd),
        Command::Simulate(args) => simulate(args),
        Command::Report(args) => report(args),
    }
}

fn price(cmd: PriceCommand) -> Result<f64> {
    match cmd {
        PriceCommand::Irs {
            curves,
            start,
            years,
            tenor,
            mode,
        } => {
            let mut cs = load_curves(&curves)?;
            cs.mode = parse_curve_mode(&mode)?;
            let tenor = parse_tenor(&tenor)?;
            let (fl, fx) = swaption_schedules(start, years, tenor)?;
            irs_fair_rate(&cs, &fl, &fx, tenor)
        }
        PriceCommand::Fra {
            curves,
            start,
            tenor,
            model,
        } => {
            let cs = load_curves(&curves)?;
            let tenor = parse_tenor(&tenor)?;
            let maturity = start + tenor.year_fraction();
            match model {
                None => fra_par_rate(&cs, start, maturity, tenor, FraConvexity::None),
                Some(p) => {
                    let m = load_model(&p)?;
                    fra_par_rate(&cs, start, maturity, tenor, FraConvexity::Gaussian(&m))
                }
            }
        }
        PriceCommand::Basis {
            curves,
            tenor_hi,
            tenor_lo,
            years,
        } => {
            let cs = load_curves(&curves)?;
            let hi = parse_tenor(&tenor_hi)?;
            let lo = parse_tenor(&tenor_lo)?;
            let start = crate::timegrid::DatePoint::from_years(0.0);
            let end = crate::timegrid::DatePoint::from_years(years);
            let hi_sched = crate::timegrid::float_schedule(start, end, hi)?;
            let lo_sched = crate::timegrid::float_schedule(start, end, lo)?;
            basis_swap_fair_spread(&cs, (&hi_sched, hi), (&lo_sched, lo))
        }
        PriceCommand::Swaption {
            curves,
            sabr,
            expiry,
            years,
            strike,
            settlement,
            mode,
        } => {
            let cs = load_curves(&curves)?;
            let surface = load_sabr(&sabr)?;
            let mode = parse_curve_mode(&mode)?;
            let slice = surface.lookup(expiry, years)?;
            let mut view = cs.clone();
            view.mode = mode;
            let (fl, fx) = swaption_schedules(expiry, years, Tenor::M6)?;
            let fwd = irs_fair_rate(&view, &fl, &fx, Tenor::M6)?;
            let vol = sabr_implied_vol(slice, fwd, strike.unwrap_or(fwd), expiry)?;
            let quote = SwaptionQuote {
                expiry,
                swap_tenor_years: years,
                strike,
                implied_vol: vol,
                settlement: parse_settlement(&settlement)?,
                float_tenor: Tenor::M6,
            };
            swaption_price(&cs, &quote, mode)
        }
        PriceCommand::Cms {
            curves,
            sabr,
            maturity_years,
            swap_years,
            mode,
        } => {
            let cs = load_curves(&curves)?;
            let surface = load_sabr(&sabr)?;
            let spec = CmsSwapSpec::standard((maturity_years * 4.0).round() as usize, swap_years)?;
            Ok(cms_fair_spread(&cs, &surface, &spec, parse_cms_mode(&mode)?)?.spread)
        }
        PriceCommand::SpreadOption {
            curves,
            sabr,
            expiry,
            tenor_b,
            tenor_c,
            strike,
            rho,
            variant,
        } => {
            let cs = load_curves(&curves)?;
            let surface = load_sabr(&sabr)?;
            let spec = SpreadOptionSpec {
                expiry,
                tenor_b_years: tenor_b,
                tenor_c_years: tenor_c,
                strike,
                correlation: rho,
                float_tenor: Tenor::M6,
            };
            spread_option_price(&cs, &surface, &spec, parse_variant(&variant)?)
        }
    }
}

fn calibrate(cmd: CalibrateCommand) -> Result<()> {
    match cmd {
        CalibrateCommand::Sabr {
            quotes,
            curves,
            out,
            mode,
            beta,
            fit_beta,
        } => {
            let qs = load_quotes(&quotes, quote_format_for(&quotes))?;
            let cs = load_curves(&curves)?;
            let config = SabrCalibrationConfig {
                beta_default: beta,
                fit_beta,
                ..Default::default()
            };
            let (surface, report) = calibrate_sabr_surface(&qs, &cs, parse_cms_mode(&mode)?, &config)?;
            log::info!(
                "sabr calibration: rmse {:.4} bp, {} iterations, converged = {}",
                report.rmse,
                report.iterations,
                report.converged
            );
            persist("sabr", &surface, &out)
        }
        CalibrateCommand::Mmg {
            quotes,
            curves,
            out,
            scenarios,
            factors,
            horizon,
            smile,
        } => {
            let qs = load_quotes(&quotes, quote_format_for(&quotes))?;
            let cs = load_curves(&curves)?;
            let (targets, cms) = mmg_targets_from_quotes(&qs, &cs, smile)?;
            let structure = MmgStructure {
                scenarios,
                factors,
            };
            let config = MmgCalibrationConfig {
                horizon,
                ..Default::default()
            };
            let (model, report) = calibrate_mmg(&cs, structure, &targets, &cms, &config)?;
            log::info!(
                "mmg calibration: rmse {:.4} bp, {} iterations, converged = {}",
                report.rmse,
                report.iterations,
                report.converged
            );
            persist("mmg", &model, &out)
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let grid: Vec<f64> = args
        .grid
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::input(format!("bad grid entry '{s}': {e}")))
        })
        .collect::<Result<_>>()?;
    let config = McConfig {
        paths: args.paths,
        grid: grid.clone(),
        seed: args.seed,
        antithetic: !args.no_antithetic,
    };
    let paths = simulate_paths(&model, &config)?;
    let qmax = model.scenarios.iter().map(|s| s.q()).max().unwrap_or(0);
    let mut w = csv::Writer::from_path(&args.out).map_err(|e| Error::input(format!("csv: {e}")))?;
    let mut header = vec!["path".to_string(), "scenario".into(), "time".into(), "y".into()];
    for k in 0..qmax {
        header.push(format!("x{k}"));
    }
    w.write_record(&header).map_err(|e| Error::input(format!("csv: {e}")))?;
    for (idx, p) in paths.iter().enumerate() {
        for (j, &t) in grid.iter().enumerate() {
            let mut row = vec![idx.to_string(), p.scenario.to_string(), t.to_string(), p.y[j].to_string()];
            for k in 0..qmax {
                row.push(p.x[j].get(k).map(|v| v.to_string()).unwrap_or_default());
            }
            w.write_record(&row).map_err(|e| Error::input(format!("csv: {e}")))?;
        }
    }
    w.flush().map_err(|e| Error::input(format!("csv: {e}")))?;
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let figure = Figure::parse(&args.figure)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::Io {
        path: args.out_dir.display().to_string(),
        source: e,
    })?;
    let out = args.out_dir.join(figure.file_name());
    match figure {
        Figure::FwdCurves => {
            let cs = load_curves(require(&args.curves, "curves", &args.figure)?)?;
            write_fwd_curves(&cs, 30.0, 0.25, &out)
        }
        Figure::FwdSwapGrid => {
            let cs = load_curves(require(&args.curves, "curves", &args.figure)?)?;
            let single = load_curves(require(&args.single_curves, "single-curves", &args.figure)?)?;
            write_fwd_swap_grid(&cs, &single, &[1.0, 2.0, 5.0, 10.0], &[2.0, 5.0, 10.0], &out)
        }
        Figure::SwaptionGrid => {
            let cs = load_curves(require(&args.curves, "curves", &args.figure)?)?;
            let surface = load_sabr(require(&args.sabr, "sabr", &args.figure)?)?;
            write_swaption_grid(&cs, &surface, &out)
        }
        Figure::CmsCurves => {
            let cs = load_curves(require(&args.curves, "curves", &args.figure)?)?;
            let surface = load_sabr(require(&args.sabr, "sabr", &args.figure)?)?;
            let qs_path = require(&args.quotes, "quotes", &args.figure)?;
            let qs = load_quotes(qs_path, quote_format_for(qs_path))?;
            write_cms_curves(&cs, &surface, &qs, parse_cms_mode(&args.mode)?, &out)
        }
        Figure::SpreadOptions => {
            let cs = load_curves(require(&args.curves, "curves", &args.figure)?)?;
            let surface = load_sabr(require(&args.sabr, "sabr", &args.figure)?)?;
            let qs_path = require(&args.quotes, "quotes", &args.figure)?;
            let qs = load_quotes(qs_path, quote_format_for(qs_path))?;
            write_spread_options(&cs, &surface, &qs, args.rho, SpreadVariant::Martingale, &out)
        }
        Figure::MmgCalib => {
            let model = load_model(require(&args.model, "model", &args.figure)?)?;
            let qs_path = require(&args.quotes, "quotes", &args.figure)?;
            let qs = load_quotes(qs_path, quote_format_for(qs_path))?;
            let (targets, cms) = mmg_targets_from_quotes(&qs, &model.curves, false)?;
            write_mmg_calib(&model, &targets, &cms, &out)
        }
    }
}

/// Exit-code classification: input-shaped problems are 1, numerical
/// failures are 2.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Convergence(_) => 2,
        _ => 1,
    }
}

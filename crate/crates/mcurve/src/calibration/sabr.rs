//! SABR surface calibration to swaption smiles and (optionally) CMS swap
//! spreads, with the beta exponent shared across expiries within a swap
//! tenor.

use std::collections::BTreeMap;

use crate::calibration::{levenberg_marquardt, CalibrationReport, LmOptions, Transform};
use crate::cms::{cms_fair_spread, CmsMode, CmsSwapSpec};
use crate::curves::{CurveMode, CurveSet};
use crate::error::{Error, Result};
use crate::instruments::irs_fair_rate;
use crate::marketdata::{Quote, QuoteSet};
use crate::timegrid::Tenor;
use crate::volmodels::{sabr_implied_vol, swaption_schedules, SabrSlice, SabrSurface};

#[derive(Debug, Clone, PartialEq)]
pub struct SabrCalibrationConfig {
    /// Beta used when it is not calibrated (or as the starting point).
    pub beta_default: f64,
    /// Calibrate beta per tenor; requires CMS targets, otherwise beta is
    /// underdetermined by smiles alone and stays at the default.
    pub fit_beta: bool,
    /// Weight of CMS-spread residuals (bp) relative to smile residuals (bp).
    pub cms_weight: f64,
    pub lm: LmOptions,
}

impl Default for SabrCalibrationConfig {
    fn default() -> Self {
        SabrCalibrationConfig {
            beta_default: 0.5,
            fit_beta: true,
            cms_weight: 1.0,
            lm: LmOptions::default(),
        }
    }
}

struct Cell {
    expiry: f64,
    forward: f64,
    atm_vol: f64,
    /// (strike, market vol)
    points: Vec<(f64, f64)>,
}

/// Joint calibration of all SABR parameters, one (alpha, rho, epsilon) per
/// (expiry, tenor) cell plus one shared beta per tenor. Smile residuals are
/// in vol bp, CMS-spread residuals in spread bp.
pub fn calibrate_sabr_surface(
    quotes: &QuoteSet,
    cs: &CurveSet,
    mode: CmsMode,
    config: &SabrCalibrationConfig,
) -> Result<(SabrSurface, CalibrationReport)> {
    if !(0.0..=1.0).contains(&config.beta_default) {
        return Err(Error::config(format!("beta {} outside [0, 1]", config.beta_default)));
    }
    let mut view = cs.clone();
    view.mode = match mode {
        CmsMode::Single => CurveMode::SingleCurve,
        CmsMode::Multi | CmsMode::Hybrid => CurveMode::MultiCurve,
    };

    // group smile quotes: tenor -> expiry -> points
    let mut by_tenor: BTreeMap<i64, BTreeMap<i64, Vec<(Option<f64>, f64)>>> = BTreeMap::new();
    for r in quotes.swaption_vols() {
        if let Quote::SwaptionVol {
            expiry,
            swap_tenor_years,
            strike_offset,
            vol,
            ..
        } = r.quote
        {
            by_tenor
                .entry((swap_tenor_years * 1e6).round() as i64)
                .or_default()
                .entry((expiry * 1e6).round() as i64)
                .or_default()
                .push((strike_offset, vol));
        }
    }
    if by_tenor.is_empty() {
        return Err(Error::input("no swaption volatility quotes to calibrate to"));
    }

    let mut slices = Vec::new();
    let mut all_params = Vec::new();
    let mut all_residuals = Vec::new();
    let mut iterations = 0usize;
    let mut converged = true;

    for (tenor_key, cells_raw) in by_tenor {
        let tenor_years = tenor_key as f64 / 1e6;
        let mut cells = Vec::new();
        for (expiry_key, points) in cells_raw {
            let expiry = expiry_key as f64 / 1e6;
            if points.len() < 3 {
                return Err(Error::input(format!(
                    "cell ({expiry}y, {tenor_years}y) has {} smile points; need at least 3",
                    points.len()
                )));
            }
            let (fl, fx) = swaption_schedules(expiry, tenor_years, Tenor::M6)?;
            let forward = irs_fair_rate(&view, &fl, &fx, Tenor::M6)?;
            let atm_vol = points
                .iter()
                .find(|(off, _)| off.is_none())
                .map(|&(_, v)| v)
                .unwrap_or_else(|| points.iter().map(|&(_, v)| v).sum::<f64>() / points.len() as f64);
            let points = points
                .into_iter()
                .map(|(off, v)| (forward + off.unwrap_or(0.0), v))
                .collect();
            cells.push(Cell {
                expiry,
                forward,
                atm_vol,
                points,
            });
        }

        // CMS targets on this tenor
        let mut cms_targets: Vec<(CmsSwapSpec, f64)> = Vec::new();
        for r in quotes.cms_spreads() {
            if let Quote::CmsSpread {
                maturity_years,
                swap_tenor_years,
                spread,
            } = r.quote
            {
                if (swap_tenor_years - tenor_years).abs() < 1e-9 {
                    let n = (maturity_years * 4.0).round() as usize;
                    cms_targets.push((CmsSwapSpec::standard(n, swap_tenor_years)?, spread));
                }
            }
        }

        let fit_beta = if config.fit_beta && cms_targets.is_empty() {
            log::warn!(
                "tenor {tenor_years}y: no CMS targets, beta underdetermined by smiles alone; \
                 keeping beta = {}",
                config.beta_default
            );
            false
        } else {
            config.fit_beta
        };

        let beta_tr = Transform::Logit { lo: 0.0, hi: 1.0 };
        let rho_tr = Transform::Logit { lo: -1.0, hi: 1.0 };
        let mut x0 = Vec::new();
        if fit_beta {
            x0.push(beta_tr.to_internal(config.beta_default.clamp(1e-6, 1.0 - 1e-6))?);
        }
        for c in &cells {
            let alpha0 = (c.atm_vol * c.forward.powf(1.0 - config.beta_default)).max(1e-6);
            x0.push(Transform::Log.to_internal(alpha0)?);
            x0.push(0.0); // rho = 0
            x0.push(Transform::Log.to_internal(0.3)?);
        }

        let unpack = |p: &[f64]| -> (f64, Vec<SabrSlice>) {
            let mut idx = 0;
            let beta = if fit_beta {
                idx = 1;
                beta_tr.from_internal(p[0])
            } else {
                config.beta_default
            };
            let s = cells
                .iter()
                .map(|c| {
                    let sl = SabrSlice {
                        alpha: Transform::Log.from_internal(p[idx]),
                        beta,
                        rho: rho_tr.from_internal(p[idx + 1]),
                        epsilon: Transform::Log.from_internal(p[idx + 2]),
                        expiry: c.expiry,
                        swap_tenor_years: tenor_years,
                    };
                    idx += 3;
                    sl
                })
                .collect();
            (beta, s)
        };

        let mut residuals = |p: &[f64]| -> Result<Vec<f64>> {
            let (_, trial) = unpack(p);
            let mut r = Vec::new();
            for (c, sl) in cells.iter().zip(&trial) {
                for &(strike, market) in &c.points {
                    let model = sabr_implied_vol(sl, c.forward, strike, c.expiry)?;
                    r.push((model - market) * 1e4);
                }
            }
            if !cms_targets.is_empty() {
                let surface = SabrSurface {
                    slices: trial.clone(),
                };
                for (spec, market) in &cms_targets {
                    let model = cms_fair_spread(cs, &surface, spec, mode)?.spread;
                    r.push((model - market) * 1e4 * config.cms_weight);
                }
            }
            Ok(r)
        };

        let report = levenberg_marquardt(&mut residuals, &x0, &config.lm)?;
        let (_, fitted) = unpack(&report.parameters);
        slices.extend(fitted);
        all_params.extend(report.parameters);
        all_residuals.extend(report.residuals);
        iterations = iterations.max(report.iterations);
        converged &= report.converged;
    }

    slices.sort_by(|a, b| {
        (a.swap_tenor_years, a.expiry)
            .partial_cmp(&(b.swap_tenor_years, b.expiry))
            .unwrap()
    });
    let rmse = (all_residuals.iter().map(|v| v * v).sum::<f64>() / all_residuals.len() as f64).sqrt();
    Ok((
        SabrSurface { slices },
        CalibrationReport {
            parameters: all_params,
            residuals: all_residuals,
            rmse,
            iterations,
            converged,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::{QuoteRecord, ReferenceScenario};
    use crate::volmodels::Settlement;
    use approx::assert_abs_diff_eq;

    fn smile_quotes(truth: &SabrSlice, cs: &CurveSet, offsets: &[Option<f64>]) -> Vec<QuoteRecord> {
        let (fl, fx) = swaption_schedules(truth.expiry, truth.swap_tenor_years, Tenor::M6).unwrap();
        let fwd = irs_fair_rate(cs, &fl, &fx, Tenor::M6).unwrap();
        offsets
            .iter()
            .enumerate()
            .map(|(i, &off)| {
                let strike = fwd + off.unwrap_or(0.0);
                let vol = sabr_implied_vol(truth, fwd, strike, truth.expiry).unwrap();
                QuoteRecord {
                    id: format!("swv-{}-{}-{}", truth.expiry, truth.swap_tenor_years, i),
                    quote: Quote::SwaptionVol {
                        expiry: truth.expiry,
                        swap_tenor_years: truth.swap_tenor_years,
                        strike_offset: off,
                        settlement: Settlement::Cash,
                        vol,
                    },
                    bid: None,
                    ask: None,
                }
            })
            .collect()
    }

    #[test]
    fn recovers_self_generated_smile() {
        let scenario = ReferenceScenario::default();
        let cs = scenario.truth_curves().unwrap();
        let offsets = [None, Some(-0.01), Some(-0.005), Some(0.005), Some(0.01)];
        let mut records = Vec::new();
        for expiry in [1.0, 5.0] {
            let truth = SabrSlice {
                alpha: 0.04,
                beta: 0.5,
                rho: -0.3,
                epsilon: 0.4,
                expiry,
                swap_tenor_years: 10.0,
            };
            records.extend(smile_quotes(&truth, &cs, &offsets));
        }
        let quotes = QuoteSet::new("test", records).unwrap();
        let config = SabrCalibrationConfig {
            beta_default: 0.5,
            fit_beta: false,
            ..Default::default()
        };
        let (surface, report) = calibrate_sabr_surface(&quotes, &cs, CmsMode::Multi, &config).unwrap();
        assert!(report.converged);
        assert!(report.rmse < 1e-6, "rmse {} bp", report.rmse);
        for sl in &surface.slices {
            assert_abs_diff_eq!(sl.alpha, 0.04, epsilon = 1e-5);
            assert_abs_diff_eq!(sl.rho, -0.3, epsilon = 1e-4);
            assert_abs_diff_eq!(sl.epsilon, 0.4, epsilon = 1e-4);
            assert_eq!(sl.beta, 0.5);
        }
    }

    #[test]
    fn smile_only_fixes_beta_with_warning() {
        let scenario = ReferenceScenario::default();
        let cs = scenario.truth_curves().unwrap();
        let truth = SabrSlice {
            alpha: 0.05,
            beta: 0.7,
            rho: -0.2,
            epsilon: 0.3,
            expiry: 2.0,
            swap_tenor_years: 5.0,
        };
        let offsets = [None, Some(-0.005), Some(0.005)];
        let quotes = QuoteSet::new("test", smile_quotes(&truth, &cs, &offsets)).unwrap();
        let config = SabrCalibrationConfig::default(); // fit_beta = true, no CMS rows
        let (surface, report) = calibrate_sabr_surface(&quotes, &cs, CmsMode::Multi, &config).unwrap();
        assert!(report.converged);
        // beta pinned at the default, fit still succeeds through alpha/rho/eps
        assert_eq!(surface.slices[0].beta, 0.5);
        assert!(report.rmse < 0.5, "rmse {} bp", report.rmse);
    }

    #[test]
    fn too_few_smile_points_rejected() {
        let scenario = ReferenceScenario::default();
        let cs = scenario.truth_curves().unwrap();
        let truth = SabrSlice {
            alpha: 0.05,
            beta: 0.7,
            rho: -0.2,
            epsilon: 0.3,
            expiry: 2.0,
            swap_tenor_years: 5.0,
        };
        let quotes =
            QuoteSet::new("test", smile_quotes(&truth, &cs, &[None, Some(0.005)])).unwrap();
        let err =
            calibrate_sabr_surface(&quotes, &cs, CmsMode::Multi, &SabrCalibrationConfig::default())
                .unwrap_err();
        assert!(err.to_string().contains("at least 3"));
    }

    #[test]
    fn single_vs_multi_mode_parameters_differ() {
        // same vols quoted; the forward differs between conventions, so the
        // calibrated parameters must differ on the reference scenario
        let scenario = ReferenceScenario::default();
        let cs = scenario.truth_curves().unwrap();
        let truth = SabrSlice {
            alpha: 0.04,
            beta: 0.5,
            rho: -0.3,
            epsilon: 0.4,
            expiry: 5.0,
            swap_tenor_years: 10.0,
        };
        let offsets = [None, Some(-0.01), Some(-0.005), Some(0.005), Some(0.01)];
        let quotes = QuoteSet::new("test", smile_quotes(&truth, &cs, &offsets)).unwrap();
        let config = SabrCalibrationConfig {
            fit_beta: false,
            ..Default::default()
        };
        let (multi, _) = calibrate_sabr_surface(&quotes, &cs, CmsMode::Multi, &config).unwrap();
        let (single, _) = calibrate_sabr_surface(&quotes, &cs, CmsMode::Single, &config).unwrap();
        let da = (multi.slices[0].alpha - single.slices[0].alpha).abs();
        assert!(da > 1e-5, "alpha identical across modes: {da}");
    }
}

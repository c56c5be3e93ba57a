//! MMG parameter calibration to ATM swaption vols, smile quotes and CMS
//! spreads, all priced by deterministic quadrature.

use crate::calibration::{
    levenberg_marquardt, simplex_from_internal, simplex_to_internal, CalibrationReport, LmOptions,
    Transform,
};
use crate::cms::CmsSwapSpec;
use crate::curves::{CurveMode, CurveSet};
use crate::error::{Error, Result};
use crate::instruments::irs_fair_rate;
use crate::mmg::{
    cms_spread_quadrature, swaption_price_mmg, MmgModel, MmgScenario, MmgSwaption,
    PiecewiseConstant, PricingMethod,
};
use crate::volmodels::{annuity, implied_vol_from_price, swaption_schedules};

/// One swaption target quoted as a Black implied volatility.
#[derive(Debug, Clone, PartialEq)]
pub struct MmgTarget {
    pub swaption: MmgSwaption,
    pub market_vol: f64,
}

/// One CMS swap fair-spread target.
#[derive(Debug, Clone, PartialEq)]
pub struct MmgCmsTarget {
    pub spec: CmsSwapSpec,
    pub spread: f64,
}

/// Fixed shape of the mixture: number of scenarios and factors per scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmgStructure {
    pub scenarios: usize,
    pub factors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmgCalibrationConfig {
    /// Pseudo-curve horizon for the model (must cover every target date).
    pub horizon: f64,
    /// Weight of CMS residuals (bp) relative to vol residuals (bp).
    pub cms_weight: f64,
    /// Optional explicit starting scenarios (weights must sum to one).
    pub initial: Option<Vec<MmgScenario>>,
    pub lm: LmOptions,
}

impl Default for MmgCalibrationConfig {
    fn default() -> Self {
        MmgCalibrationConfig {
            horizon: 45.0,
            cms_weight: 1.0,
            initial: None,
            // quadrature prices carry ~1e-10 adaptive-tolerance noise; a wider
            // difference step keeps the finite-difference jacobian out of it
            lm: LmOptions {
                fd_step: 1e-5,
                ..LmOptions::default()
            },
        }
    }
}

/// Black implied volatility of a model swaption price, normalized by the
/// initial-curve forward and annuity.
pub fn model_implied_vol(model: &MmgModel, swaption: &MmgSwaption) -> Result<f64> {
    let (price, _) = swaption_price_mmg(model, swaption, &PricingMethod::Quadrature)?;
    let (fl, fx) = swaption_schedules(swaption.expiry, swaption.swap_tenor_years, swaption.float_tenor)?;
    let mut view = model.curves.clone();
    view.mode = CurveMode::MultiCurve;
    let fwd = irs_fair_rate(&view, &fl, &fx, swaption.float_tenor)?;
    let strike = swaption.strike.unwrap_or(fwd);
    let c0 = annuity(&view, swaption.expiry, &fx, fwd, swaption.settlement)?;
    let norm = model.curves.discount_factor(swaption.expiry) * c0;
    let intrinsic = (fwd - strike).max(0.0);
    let bl = (price / norm).clamp(intrinsic, fwd * (1.0 - 1e-12));
    implied_vol_from_price(fwd, strike, swaption.expiry, bl)
}

fn default_scenarios(structure: MmgStructure) -> Vec<MmgScenario> {
    let w = 1.0 / structure.scenarios as f64;
    (0..structure.scenarios)
        .map(|s| {
            let mut a = Vec::new();
            let mut vols = Vec::new();
            for k in 0..structure.factors {
                // staggered mean reversions break the factor and scenario
                // exchange symmetry of a fully uniform starting point
                a.push(0.05 * (1.0 + 0.5 * (k + s * structure.factors) as f64));
                vols.push(PiecewiseConstant::flat(0.01));
            }
            let mut corr = vec![vec![0.0; structure.factors]; structure.factors];
            for (i, row) in corr.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            MmgScenario {
                weight: w,
                mean_reversions: a,
                vols,
                correlations: corr,
            }
        })
        .collect()
}

fn pack(scenarios: &[MmgScenario], structure: MmgStructure) -> Result<Vec<f64>> {
    let rho_tr = Transform::Logit { lo: -1.0, hi: 1.0 };
    let mut x = Vec::new();
    for s in scenarios {
        for &a in &s.mean_reversions {
            x.push(Transform::Log.to_internal(a)?);
        }
        for v in &s.vols {
            x.push(Transform::Log.to_internal(v.values()[0].max(1e-8))?);
        }
        if structure.factors == 2 {
            x.push(rho_tr.to_internal(s.correlations[0][1].clamp(-0.999_999, 0.999_999))?);
        }
    }
    if structure.scenarios > 1 {
        let w: Vec<f64> = scenarios.iter().map(|s| s.weight).collect();
        x.extend(simplex_to_internal(&w)?);
    }
    Ok(x)
}

fn unpack(x: &[f64], structure: MmgStructure) -> Vec<MmgScenario> {
    let rho_tr = Transform::Logit { lo: -1.0, hi: 1.0 };
    let q = structure.factors;
    let per = 2 * q + usize::from(q == 2);
    let weights = if structure.scenarios > 1 {
        simplex_from_internal(&x[structure.scenarios * per..])
    } else {
        vec![1.0]
    };
    (0..structure.scenarios)
        .map(|s| {
            let base = s * per;
            let a: Vec<f64> = (0..q).map(|k| Transform::Log.from_internal(x[base + k])).collect();
            let vols: Vec<PiecewiseConstant> = (0..q)
                .map(|k| PiecewiseConstant::flat(Transform::Log.from_internal(x[base + q + k])))
                .collect();
            let mut corr = vec![vec![0.0; q]; q];
            for (i, row) in corr.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            if q == 2 {
                let rho = rho_tr.from_internal(x[base + 2 * q]);
                corr[0][1] = rho;
                corr[1][0] = rho;
            }
            MmgScenario {
                weight: weights[s],
                mean_reversions: a,
                vols,
                correlations: corr,
            }
        })
        .collect()
}

/// Calibrate an MMG mixture of the given structure to swaption-vol and CMS
/// targets. Residuals are (model - market) in bp, volatilities and spreads
/// alike.
pub fn calibrate_mmg(
    cs: &CurveSet,
    structure: MmgStructure,
    targets: &[MmgTarget],
    cms_targets: &[MmgCmsTarget],
    config: &MmgCalibrationConfig,
) -> Result<(MmgModel, CalibrationReport)> {
    if structure.scenarios == 0 || structure.factors == 0 || structure.factors > 2 {
        return Err(Error::config(format!(
            "unsupported MMG structure: {} scenarios x {} factors",
            structure.scenarios, structure.factors
        )));
    }
    if targets.is_empty() && cms_targets.is_empty() {
        return Err(Error::input("no calibration targets"));
    }
    let start = match &config.initial {
        Some(s) => {
            if s.len() != structure.scenarios || s.iter().any(|sc| sc.q() != structure.factors) {
                return Err(Error::config("initial scenarios do not match the structure"));
            }
            s.clone()
        }
        None => default_scenarios(structure),
    };
    let base = MmgModel::new(start.clone(), cs.clone(), config.horizon)?;
    let x0 = pack(&start, structure)?;

    let mut residuals = |p: &[f64]| -> Result<Vec<f64>> {
        let model = base.with_scenarios(unpack(p, structure))?;
        let mut r = Vec::with_capacity(targets.len() + cms_targets.len());
        for t in targets {
            let vol = model_implied_vol(&model, &t.swaption)?;
            r.push((vol - t.market_vol) * 1e4);
        }
        for t in cms_targets {
            let spread = cms_spread_quadrature(&model, &t.spec)?;
            r.push((spread - t.spread) * 1e4 * config.cms_weight);
        }
        Ok(r)
    };

    let report = levenberg_marquardt(&mut residuals, &x0, &config.lm)?;
    let model = base.with_scenarios(unpack(&report.parameters, structure))?;
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{DiscountCurve, ForwardingCurve};
    use crate::interpolation::fit_monotone_hermite;
    use crate::timegrid::Tenor;
    use crate::volmodels::Settlement;
    use approx::assert_abs_diff_eq;

    fn curves() -> CurveSet {
        let mut cs = CurveSet::new(DiscountCurve::flat(0.02, 45.0));
        for (tenor, spread, reference) in [
            (Tenor::M6, 0.004, None),
            (Tenor::M3, -0.002, Some(Tenor::M6)),
        ] {
            let own = fit_monotone_hermite(&[(0.0, spread), (30.0, spread)]).unwrap();
            let base = reference.map(|r: Tenor| cs.forwarding.get(&r).cloned().unwrap());
            cs.insert(ForwardingCurve::new(tenor, own, base.as_ref()).unwrap());
        }
        cs
    }

    fn atm(expiry: f64, tenor: f64) -> MmgSwaption {
        MmgSwaption {
            expiry,
            swap_tenor_years: tenor,
            strike: None,
            settlement: Settlement::Physical,
            float_tenor: Tenor::M6,
        }
    }

    fn targets_from(model: &MmgModel, specs: &[MmgSwaption]) -> Vec<MmgTarget> {
        specs
            .iter()
            .map(|s| MmgTarget {
                swaption: s.clone(),
                market_vol: model_implied_vol(model, s).unwrap(),
            })
            .collect()
    }

    #[test]
    fn pack_unpack_round_trip() {
        let structure = MmgStructure {
            scenarios: 2,
            factors: 2,
        };
        let truth = vec![
            MmgScenario::two_factor(0.4, [0.04, 0.12], [0.008, 0.012], -0.3),
            MmgScenario::two_factor(0.6, [0.07, 0.2], [0.011, 0.006], 0.25),
        ];
        let x = pack(&truth, structure).unwrap();
        let back = unpack(&x, structure);
        for (a, b) in truth.iter().zip(&back) {
            assert_abs_diff_eq!(a.weight, b.weight, epsilon = 1e-12);
            for k in 0..2 {
                assert_abs_diff_eq!(a.mean_reversions[k], b.mean_reversions[k], epsilon = 1e-12);
                assert_abs_diff_eq!(a.vols[k].values()[0], b.vols[k].values()[0], epsilon = 1e-12);
            }
            assert_abs_diff_eq!(a.correlations[0][1], b.correlations[0][1], epsilon = 1e-10);
        }
    }

    #[test]
    fn single_factor_exact_recovery() {
        let cs = curves();
        let structure = MmgStructure {
            scenarios: 1,
            factors: 1,
        };
        let truth = MmgModel::new(
            vec![MmgScenario::one_factor(1.0, 0.07, 0.009)],
            cs.clone(),
            45.0,
        )
        .unwrap();
        let specs = [atm(1.0, 5.0), atm(2.0, 5.0), atm(5.0, 5.0)];
        let targets = targets_from(&truth, &specs);
        let (model, report) =
            calibrate_mmg(&cs, structure, &targets, &[], &MmgCalibrationConfig::default()).unwrap();
        assert!(report.converged, "rmse {} bp after {} iters", report.rmse, report.iterations);
        assert_abs_diff_eq!(model.scenarios[0].mean_reversions[0], 0.07, epsilon = 1e-5);
        assert_abs_diff_eq!(model.scenarios[0].vols[0].values()[0], 0.009, epsilon = 1e-6);
    }

    #[test]
    fn invalid_structure_rejected() {
        let cs = curves();
        let bad = MmgStructure {
            scenarios: 1,
            factors: 3,
        };
        assert!(calibrate_mmg(&cs, bad, &[], &[], &MmgCalibrationConfig::default()).is_err());
    }
}

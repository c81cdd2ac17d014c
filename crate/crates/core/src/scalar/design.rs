//! Design procedure for the first-order controllers: reference model from step
//! specifications, nominal matching, adaptation rates, CRM gain with the SPR
//! gate, projection bound, and the PI alternative.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::adaptive::{AdaptiveMode, ScalarAdaptiveConfig};
use super::pi::PiConfig;
use super::projection::ProjectionConfig;
use super::refmodel::RefModelParams;
use crate::controller::ControllerConfig;
use crate::error::{Error, Result};
use crate::lintools::{default_spr_grid, spr_check, steps_for};

/// Closed-loop step-response targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    /// Steady-state error, %.
    pub steady_state_error: f64,
    /// 10–90 % rise time, s.
    pub rise_time: f64,
    /// 5 % settling time, s.
    pub settling_time: f64,
    /// Maximum overshoot, %.
    pub overshoot: f64,
}

impl StepSpec {
    /// 0 % error, 0.6 s rise, 1.5 s settling, 10 % overshoot.
    pub fn table1() -> Self {
        StepSpec {
            steady_state_error: 0.0,
            rise_time: 0.6,
            settling_time: 1.5,
            overshoot: 10.0,
        }
    }
}

impl Default for StepSpec {
    fn default() -> Self {
        Self::table1()
    }
}

/// Time constant of a unity-gain first-order model meeting `spec`, shortened
/// by `margin` (fraction) so sampled measurements stay inside the targets.
///
/// A first-order lag rises 10–90 % in `τ·ln 9` and enters the 5 % band at
/// `τ·ln 20`; it has no overshoot and no steady-state error.
pub fn reference_time_constant(spec: &StepSpec, margin: f64) -> Result<f64> {
    if !(spec.rise_time > 0.0 && spec.settling_time > 0.0) {
        return Err(Error::Design("rise and settling times must be positive".into()));
    }
    if spec.overshoot < 0.0 || spec.steady_state_error < 0.0 {
        return Err(Error::Design("overshoot and steady-state error limits must be ≥ 0".into()));
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::Design("design margin must lie in [0, 1)".into()));
    }
    let tau = (spec.rise_time / 9f64.ln()).min(spec.settling_time / 20f64.ln());
    Ok(tau * (1.0 - margin))
}

/// `Γ_ii = |θ*| / (3·τ_m·r̄²)`.
pub fn adaptation_rate(theta_star: f64, tau_m: f64, r_bar: f64) -> f64 {
    assert!(tau_m > 0.0 && r_bar > 0.0, "adaptation_rate needs τ_m > 0 and r̄ > 0");
    theta_star.abs() / (3.0 * tau_m * r_bar * r_bar)
}

/// First-order design model `ẏ = a_p·y + b_p·u(t − τ)` in controller units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalPlant {
    pub a_p: f64,
    pub b_p: f64,
    pub tau: f64,
}

/// `θ0* = (a_m − a_p)/b_p`, `θr* = b_m/b_p`: the delay-free matching gains.
pub fn continuous_matching(plant: &NominalPlant, reference: &RefModelParams) -> (f64, f64) {
    (
        (reference.a_m - plant.a_p) / plant.b_p,
        reference.b_m / plant.b_p,
    )
}

/// Exact sampled matching for the delay-resistant law.
///
/// With the plant advanced by zero-order hold over `dt`
/// (`y⁺ = Φp·y + Γp·u(t − τ)`) and the reference model by its exact
/// transition (`y_m⁺ = E·y_m + G·(b_m·r(t − τ) + ℓ·y_p)`), the command
/// `u = θ0·y(t + τ) + θr·r` with `θ0 = (E + ℓG − Φp)/Γp`, `θr = G·b_m/Γp`
/// gives `e1⁺ = E·e1`. Expanding `y(t + τ)` over the input history yields
/// `α_y = θ0·Φp^m`, `λ_j = θ0·Φp^{j−1}·Γp` and `k = θr`.
///
/// Returns `[α_y, λ_1 … λ_m, k, θ3 = 0]`.
pub fn drcrm_matching(plant: &NominalPlant, reference: &RefModelParams, dt: f64) -> Result<Vec<f64>> {
    let m = steps_for(plant.tau, dt).ok_or_else(|| {
        Error::Design(format!("delay {} s is not a multiple of dt = {dt} s", plant.tau))
    })?;
    let phi_p = (plant.a_p * dt).exp();
    let gamma_p = if plant.a_p == 0.0 {
        plant.b_p * dt
    } else {
        plant.b_p * (phi_p - 1.0) / plant.a_p
    };
    let pole = reference.a_m - reference.ell;
    let e = (pole * dt).exp();
    let g = (e - 1.0) / pole;
    let theta_y = (e + reference.ell * g - phi_p) / gamma_p;
    let theta_r = g * reference.b_m / gamma_p;
    let mut out = Vec::with_capacity(m + 3);
    out.push(theta_y * phi_p.powi(m as i32));
    for j in 1..=m {
        out.push(theta_y * phi_p.powi(j as i32 - 1) * gamma_p);
    }
    out.push(theta_r);
    out.push(0.0);
    Ok(out)
}

/// Tunables of the design procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignOptions {
    /// Controller sampling interval, s.
    pub dt: f64,
    /// Largest reference amplitude (deviation units) for the rate formula.
    pub r_bar: f64,
    /// Fraction by which the reference time constant is shortened.
    pub margin: f64,
    /// Multiplier on the reference time constant (0.5 for the fast scenario).
    pub tau_m_scale: f64,
    /// Factor applied to the MRAC/CRM matching gains when τ > 0.
    pub derate: f64,
    /// Rate fine-tuning `(p1, p2, p3)` for `(θ0 or α_y, θr or k, θ3)`.
    pub fine_tune: [f64; 3],
    /// Base rate of θ3 before `p3`; the rate formula gives zero for a zero
    /// nominal value. Defaults to the θr (or k) rate.
    pub theta3_rate: Option<f64>,
    /// Shared λ rate; defaults to the formula with the mean |λ*| and the
    /// nominal command amplitude `|a_p/b_p|·r̄` in place of r̄.
    pub lambda_rate: Option<f64>,
    /// Factor by which the rates and ℓ = ‖γ‖ are raised together.
    pub crm_scale: f64,
    /// Ceiling on ‖γ‖, 1/s: larger rate vectors are co-scaled down to it, so
    /// ℓ = ‖γ‖ stays resolvable at the controller period. Applied to every
    /// adaptive mode so they share one rate scale.
    pub ell_max: f64,
    /// Explicit CRM gain, bypassing ℓ = ‖γ‖.
    pub ell: Option<f64>,
    /// Projection bound, percent above the nominal matching parameter norm.
    pub projection_percent: f64,
    pub projection_epsilon: f64,
    /// Minimum phase margin for the PI design, degrees.
    pub pi_phase_margin: f64,
    /// Output limits, deviation units.
    pub u_min: f64,
    pub u_max: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            dt: 0.05,
            r_bar: 0.15,
            margin: 0.05,
            tau_m_scale: 1.0,
            derate: 0.5,
            fine_tune: [1.0, 1.0, 3.0],
            theta3_rate: None,
            lambda_rate: None,
            crm_scale: 1.0,
            ell_max: 1.0,
            ell: None,
            projection_percent: 100.0,
            projection_epsilon: 0.1,
            pi_phase_margin: 60.0,
            u_min: f64::NEG_INFINITY,
            u_max: f64::INFINITY,
        }
    }
}

/// Which controller to design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignMode {
    Pi,
    Mrac,
    Crm,
    Drcrm,
}

impl DesignMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pi" => Some(DesignMode::Pi),
            "mrac" => Some(DesignMode::Mrac),
            "crm" => Some(DesignMode::Crm),
            "drcrm" | "dr-crm" => Some(DesignMode::Drcrm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DesignMode::Pi => "pi",
            DesignMode::Mrac => "mrac",
            DesignMode::Crm => "crm",
            DesignMode::Drcrm => "drcrm",
        }
    }

    pub const ALL: [DesignMode; 4] = [DesignMode::Pi, DesignMode::Mrac, DesignMode::Crm, DesignMode::Drcrm];
}

/// Rejects a closed-loop reference model whose error dynamics are not SPR.
pub fn check_spr_gate(reference: &RefModelParams) -> Result<()> {
    let report = spr_check(&reference.error_transfer(), &default_spr_grid())?;
    match report.violation {
        None => Ok(()),
        Some(v) => Err(Error::SprGate(v.to_string())),
    }
}

/// PI with its zero cancelling the plant pole and crossover
/// `min(1/τ_m, (π/2 − PM)/(τ + dt/2))`, so the loop is `K_p·b_p·e^{−sτ}/s`
/// behind the sample-and-hold.
pub fn design_pi(plant: &NominalPlant, reference: &RefModelParams, opts: &DesignOptions) -> Result<PiConfig> {
    if !(plant.a_p < 0.0) {
        return Err(Error::Design("PI pole cancellation needs a stable plant pole".into()));
    }
    let margin = opts.pi_phase_margin.to_radians();
    if !(margin > 0.0 && margin < FRAC_PI_2) {
        return Err(Error::Design("PI phase margin must lie in (0°, 90°)".into()));
    }
    // the zero-order hold adds half a period of delay
    let lag = plant.tau + 0.5 * opts.dt;
    let crossover = (1.0 / reference.tau_m()).min((FRAC_PI_2 - margin) / lag);
    Ok(PiConfig {
        k_p: crossover / plant.b_p,
        t_i: -1.0 / plant.a_p,
        dt: opts.dt,
        u_min: opts.u_min,
        u_max: opts.u_max,
        reference: *reference,
    })
}

/// Runs the design procedure for `mode`.
pub fn design_controller(
    plant: &NominalPlant,
    spec: &StepSpec,
    mode: DesignMode,
    opts: &DesignOptions,
) -> Result<ControllerConfig> {
    if plant.b_p == 0.0 || !plant.b_p.is_finite() || !plant.a_p.is_finite() {
        return Err(Error::Design("plant gain b_p must be finite and nonzero".into()));
    }
    if !(opts.r_bar > 0.0) || !(opts.dt > 0.0) || !(opts.tau_m_scale > 0.0) {
        return Err(Error::Design("need r̄ > 0, dt > 0 and a positive τ_m scale".into()));
    }
    let tau_m = reference_time_constant(spec, opts.margin)? * opts.tau_m_scale;
    if tau_m < 2.0 * opts.dt {
        return Err(Error::Design(format!(
            "reference time constant {tau_m:.4} s is too short for dt = {} s",
            opts.dt
        )));
    }
    let mut reference = RefModelParams::with_time_constant(tau_m);

    if mode == DesignMode::Pi {
        return Ok(ControllerConfig::Pi(design_pi(plant, &reference, opts)?));
    }

    let [p1, p2, p3] = opts.fine_tune;
    let rate = |theta: f64| adaptation_rate(theta, tau_m, opts.r_bar);
    let (theta0_star, theta_r_star) = continuous_matching(plant, &reference);
    let theta3_base = opts.theta3_rate.unwrap_or(rate(theta_r_star));

    let (amode, nominal, initial, mut rates) = match mode {
        DesignMode::Mrac | DesignMode::Crm => {
            let nominal = vec![theta0_star, theta_r_star, 0.0];
            let derate = if plant.tau > 0.0 { opts.derate } else { 1.0 };
            let initial = vec![derate * theta0_star, derate * theta_r_star, 0.0];
            let rates = vec![p1 * rate(theta0_star), p2 * rate(theta_r_star), p3 * theta3_base];
            let amode = if mode == DesignMode::Mrac { AdaptiveMode::Mrac } else { AdaptiveMode::Crm };
            (amode, nominal, initial, rates)
        }
        DesignMode::Drcrm => {
            reference.delay = plant.tau;
            // ℓ enters the matching, so fix it from the rates of the ℓ = 0
            // matching first, then rematch with the final ℓ
            let provisional = drcrm_matching(plant, &reference, opts.dt)?;
            let m = provisional.len() - 3;
            let u_bar = (plant.a_p / plant.b_p).abs().max(1e-12) * opts.r_bar;
            let lambda_mean = provisional[1..=m].iter().map(|v| v.abs()).sum::<f64>() / m.max(1) as f64;
            let gamma_lambda = opts
                .lambda_rate
                .unwrap_or_else(|| adaptation_rate(lambda_mean, tau_m, u_bar));
            let mut rates = vec![p1 * rate(provisional[0])];
            rates.extend(std::iter::repeat_n(gamma_lambda, m));
            rates.push(p2 * rate(provisional[m + 1]));
            rates.push(p3 * theta3_base);
            (AdaptiveMode::Drcrm, provisional.clone(), provisional, rates)
        }
        DesignMode::Pi => unreachable!(),
    };

    let raw_norm = DVector::from_vec(rates.clone()).norm() * opts.crm_scale;
    let scale = if raw_norm > opts.ell_max {
        opts.crm_scale * opts.ell_max / raw_norm
    } else {
        opts.crm_scale
    };
    for g in rates.iter_mut() {
        *g *= scale;
    }
    if amode != AdaptiveMode::Mrac {
        let gamma_norm = DVector::from_vec(rates.clone()).norm();
        reference.ell = opts.ell.unwrap_or(gamma_norm);
        check_spr_gate(&reference)?;
    }

    let (nominal, initial) = if amode == AdaptiveMode::Drcrm {
        let matched = drcrm_matching(plant, &reference, opts.dt)?;
        (matched.clone(), matched)
    } else {
        (nominal, initial)
    };

    let projection = ProjectionConfig::above_initial(
        &DVector::from_vec(nominal),
        opts.projection_percent,
        opts.projection_epsilon,
    )?;
    let cfg = ScalarAdaptiveConfig {
        mode: amode,
        dt: opts.dt,
        tau: plant.tau,
        sign_bp: plant.b_p.signum(),
        reference,
        theta0: initial,
        rates,
        projection,
        u_min: opts.u_min,
        u_max: opts.u_max,
    };
    cfg.validate()?;
    Ok(ControllerConfig::Adaptive(cfg))
}

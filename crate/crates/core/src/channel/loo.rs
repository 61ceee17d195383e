//! Analytic amplitude statistics of the Loo mixture.
//!
//! The per-state amplitude density is a log-normal LOS amplitude convolved
//! with Rician multipath; the environment density is the state-probability
//! mixture. The CDF has no closed form and is evaluated by nested
//! quadrature: the LOS conditioning integral runs over a semi-infinite
//! domain, the amplitude integral is adaptive on [0, x].

use super::env::{EnvironmentModel, LooParams};
use crate::error::{Error, Result};
use crate::mathx::{
    bessel_i0_scaled, integrate_semiinf_with_breakpoints, integrate_with_breakpoints, marcum_q1,
    Grid1D,
};

/// Amplitude density of a single Loo state.
pub fn loo_pdf(p: &LooParams, x: f64) -> Result<f64> {
    p.validate()?;
    if x < 0.0 {
        return Err(Error::domain("amplitude must be nonnegative"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if p.d0 == 0.0 {
        // degenerate log-normal: plain Rician with LOS amplitude exp(mu)
        return Ok(rician_pdf(x, p.mu_loo.exp(), p.b0));
    }
    let (b0, d0, mu) = (p.b0, p.d0, p.mu_loo);
    let integrand = move |z: f64| {
        if z <= 0.0 {
            return 0.0;
        }
        let lz = z.ln() - mu;
        let de = x - z;
        // exp(-(x^2+z^2)/(2 b0)) I0(x z / b0) in overflow-safe form
        (-lz * lz / (2.0 * d0) - de * de / (2.0 * b0)).exp() * bessel_i0_scaled(x * z / b0) / z
    };
    // the integrand peaks near the LOS scale and near z = x
    let sd = d0.sqrt();
    let breaks = [
        (mu - 4.0 * sd).exp(),
        (mu - 2.0 * sd).exp(),
        mu.exp(),
        (mu + 2.0 * sd).exp(),
        (mu + 4.0 * sd).exp(),
        x - 3.0 * b0.sqrt(),
        x,
        x + 3.0 * b0.sqrt(),
    ];
    let inner = integrate_semiinf_with_breakpoints(integrand, &breaks)?;
    Ok(x / (b0 * (2.0 * std::f64::consts::PI * d0).sqrt()) * inner.value)
}

fn rician_pdf(x: f64, los: f64, b0: f64) -> f64 {
    let de = x - los;
    x / b0 * (-de * de / (2.0 * b0)).exp() * bessel_i0_scaled(x * los / b0)
}

/// Amplitude density of the stationary state mixture.
pub fn loo_mixture_pdf(env: &EnvironmentModel, x: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (p, s) in env.state_probs.iter().zip(&env.states) {
        if *p > 0.0 {
            acc += p * loo_pdf(s, x)?;
        }
    }
    Ok(acc)
}

/// CDF of the stationary amplitude mixture, `P[r <= x]`.
pub fn loo_mixture_cdf(env: &EnvironmentModel, x: f64) -> Result<f64> {
    env.validate()?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("amplitude must be nonnegative and finite"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let breaks = pdf_breakpoints(env);
    let q = integrate_with_breakpoints(
        |t| loo_mixture_pdf(env, t).unwrap_or(f64::NAN),
        0.0,
        x,
        &breaks,
        1e-8,
    )?;
    Ok(q.value.clamp(0.0, 1.0))
}

fn pdf_breakpoints(env: &EnvironmentModel) -> Vec<f64> {
    let mut breaks = Vec::new();
    for s in &env.states {
        let med = s.mu_loo.exp();
        let spread = s.d0.sqrt();
        let nlos = (2.0 * s.b0).sqrt();
        breaks.push(med * (-2.0 * spread).exp() - 2.0 * nlos);
        breaks.push(med);
        breaks.push(med * (2.0 * spread).exp() + 2.0 * nlos);
    }
    breaks
}

fn mixture_upper_amplitude(env: &EnvironmentModel) -> f64 {
    env.states
        .iter()
        .map(|s| (s.mu_loo + 6.0 * s.d0.sqrt()).exp() + 6.0 * (2.0 * s.b0).sqrt())
        .fold(0.0_f64, f64::max)
}

/// Anything that maps an amplitude to a cumulative probability. The
/// forward-link analytics are written against this so tests can substitute
/// degenerate channels.
pub trait AmplitudeCdf {
    fn cdf(&self, amplitude: f64) -> f64;
}

/// Tabulated mixture CDF on a dense amplitude grid with monotone cubic
/// interpolation; built once per environment so optimizer loops do not pay
/// for nested quadrature per evaluation.
#[derive(Debug, Clone)]
pub struct AmplitudeCdfTable {
    grid: Grid1D,
}

const TABLE_POINTS: usize = 600;

impl AmplitudeCdfTable {
    pub fn build(env: &EnvironmentModel) -> Result<Self> {
        env.validate()?;
        let rmax = mixture_upper_amplitude(env);
        let mut xs = Vec::with_capacity(TABLE_POINTS + 1);
        let mut ys = Vec::with_capacity(TABLE_POINTS + 1);
        xs.push(0.0);
        ys.push(0.0);
        let mut acc = 0.0_f64;
        let mut prev = 0.0_f64;
        for i in 1..=TABLE_POINTS {
            let xi = rmax * i as f64 / TABLE_POINTS as f64;
            let q = integrate_with_breakpoints(
                |t| loo_mixture_pdf(env, t).unwrap_or(f64::NAN),
                prev,
                xi,
                &[],
                1e-7,
            )?;
            acc += q.value.max(0.0);
            xs.push(xi);
            ys.push(acc);
            prev = xi;
        }
        if (acc - 1.0).abs() > 1e-3 {
            return Err(Error::domain(format!(
                "mixture pdf integrates to {acc}, expected 1; bad environment parameters?"
            )));
        }
        // absorb the residual tail mass so the table reaches exactly 1
        for y in ys.iter_mut() {
            *y = (*y / acc).min(1.0);
        }
        Ok(AmplitudeCdfTable {
            grid: Grid1D::new(xs, ys)?,
        })
    }

    pub fn max_amplitude(&self) -> f64 {
        self.grid.max_x()
    }
}

impl AmplitudeCdf for AmplitudeCdfTable {
    fn cdf(&self, amplitude: f64) -> f64 {
        if amplitude <= 0.0 {
            0.0
        } else if amplitude >= self.grid.max_x() {
            1.0
        } else {
            self.grid.eval(amplitude).clamp(0.0, 1.0)
        }
    }
}

/// Deterministic channel: all probability mass at one amplitude.
#[derive(Debug, Clone, Copy)]
pub struct StepCdf {
    pub amplitude: f64,
}

impl AmplitudeCdf for StepCdf {
    fn cdf(&self, amplitude: f64) -> f64 {
        if amplitude >= self.amplitude {
            1.0
        } else {
            0.0
        }
    }
}

/// Closed-form Rician amplitude CDF used when a state degenerates to d0 = 0.
pub fn rician_amplitude_cdf(los: f64, b0: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let s = b0.sqrt();
    Ok(1.0 - marcum_q1(los / s, x / s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::fading::{generate_trace, MobilityConfig};
    use crate::mathx::RngStream;

    #[test]
    fn cdf_at_zero_is_zero() {
        let env = EnvironmentModel::builtin("its").unwrap();
        assert_eq!(loo_mixture_cdf(&env, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_d0_equals_rician_closed_form() {
        let env = EnvironmentModel::single_state(LooParams::new(0.2, 0.0, 0.0).unwrap());
        for x in [0.2, 0.7, 1.0, 1.4, 2.5] {
            let got = loo_mixture_cdf(&env, x).unwrap();
            let want = rician_amplitude_cdf(1.0, 0.2, x).unwrap();
            assert!((got - want).abs() < 1e-9, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn tiny_d0_approaches_rician_closed_form() {
        // exercises the nested-quadrature path against the d0 -> 0 limit
        let env = EnvironmentModel::single_state(LooParams::new(0.2, 1e-6, 0.0).unwrap());
        for x in [0.5, 1.0, 1.8] {
            let got = loo_mixture_cdf(&env, x).unwrap();
            let want = rician_amplitude_cdf(1.0, 0.2, x).unwrap();
            assert!((got - want).abs() < 1e-4, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn cdf_is_monotone_and_saturates() {
        let env = EnvironmentModel::builtin("its").unwrap();
        let mut prev = 0.0;
        for i in 0..=100 {
            let x = 3.0 * i as f64 / 100.0;
            let f = loo_mixture_cdf(&env, x).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f + 1e-9 >= prev, "non-monotone at x={x}");
            prev = f;
        }
        assert!(loo_mixture_cdf(&env, 4.0).unwrap() > 0.9999);
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let env = EnvironmentModel::builtin("its").unwrap();
        let table = AmplitudeCdfTable::build(&env).unwrap();
        for x in [0.05, 0.2, 0.5, 0.9, 1.3, 2.0] {
            let got = table.cdf(x);
            let want = loo_mixture_cdf(&env, x).unwrap();
            assert!((got - want).abs() < 1e-5, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn its_median_agrees_with_monte_carlo() {
        let env = EnvironmentModel::builtin("its").unwrap();
        let table = AmplitudeCdfTable::build(&env).unwrap();
        // locate the analytic median on the table
        let mut lo = 0.0;
        let mut hi = table.max_amplitude();
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if table.cdf(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let median = 0.5 * (lo + hi);
        let mob = MobilityConfig::new(15.0, 2.2e9, 1.5e-3).unwrap();
        let t = generate_trace(&env, mob, 1.0, 1, 1_000_000, RngStream::new(21, 0)).unwrap();
        let below = t.gains.iter().filter(|h| h.norm() <= median).count();
        let frac = below as f64 / t.gains.len() as f64;
        assert!(
            (frac - 0.5).abs() <= 0.01,
            "empirical CDF at analytic median = {frac}"
        );
    }

    #[test]
    fn empirical_amplitude_distribution_matches_mixture_cdf() {
        // long-run Markov mixing: KS distance of per-symbol amplitudes
        let env = EnvironmentModel::builtin("its").unwrap();
        let table = AmplitudeCdfTable::build(&env).unwrap();
        let mob = MobilityConfig::new(15.0, 2.2e9, 2e-3).unwrap();
        let t = generate_trace(&env, mob, 1.0, 1, 1_000_000, RngStream::new(23, 0)).unwrap();
        let mut amps: Vec<f64> = t.gains.iter().map(|h| h.norm()).collect();
        amps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = amps.len() as f64;
        let mut ks = 0.0_f64;
        for (i, &x) in amps.iter().enumerate() {
            let f = table.cdf(x);
            ks = ks
                .max((f - i as f64 / n).abs())
                .max((f - (i + 1) as f64 / n).abs());
        }
        assert!(ks <= 0.02, "KS = {ks}");
    }
}

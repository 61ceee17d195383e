//! Environment model: per-state Loo parameters plus the Markov state chain.

use crate::error::{Error, Result};
use serde::Deserialize;

const DB_TO_LN: f64 = core::f64::consts::LN_10 / 20.0;

/// Loo-distribution parameters for one shadowing state.
///
/// `b0` is half the multipath (NLOS) power, `mu_loo` and `d0` the location
/// and squared scale of the log-normal LOS amplitude, both in natural-log
/// units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LooParams {
    pub b0: f64,
    pub d0: f64,
    pub mu_loo: f64,
}

impl LooParams {
    pub fn new(b0: f64, d0: f64, mu_loo: f64) -> Result<Self> {
        let p = LooParams { b0, d0, mu_loo };
        p.validate()?;
        Ok(p)
    }

    /// Conversion from the dB convention used in the published Fontan
    /// tables: LOS mean `alpha_db`, LOS standard deviation `psi_db`, total
    /// multipath power `mp_db`.
    pub fn from_fontan_db(alpha_db: f64, psi_db: f64, mp_db: f64) -> Result<Self> {
        let mu_loo = alpha_db * DB_TO_LN;
        let sqrt_d0 = psi_db * DB_TO_LN;
        let b0 = 0.5 * 10f64.powf(mp_db / 10.0);
        LooParams::new(b0, sqrt_d0 * sqrt_d0, mu_loo)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b0 > 0.0) || !self.b0.is_finite() {
            return Err(Error::domain(format!("b0 must be positive, got {}", self.b0)));
        }
        if !(self.d0 >= 0.0) || !self.d0.is_finite() {
            return Err(Error::domain(format!("d0 must be nonnegative, got {}", self.d0)));
        }
        if !self.mu_loo.is_finite() {
            return Err(Error::domain("mu_loo must be finite"));
        }
        Ok(())
    }

    /// Mean LOS amplitude exp(mu + d0/2) of the log-normal component.
    pub fn los_mean(&self) -> f64 {
        (self.mu_loo + 0.5 * self.d0).exp()
    }

    /// Median LOS amplitude exp(mu).
    pub fn los_median(&self) -> f64 {
        self.mu_loo.exp()
    }
}

/// Markov-chain mixture of Loo states with the spatial scales that drive
/// state and shadowing dynamics.
#[derive(Debug, Clone)]
pub struct EnvironmentModel {
    pub name: String,
    pub states: Vec<LooParams>,
    pub state_probs: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub state_frame_length_m: f64,
    pub shadowing_corr_length_m: f64,
}

impl EnvironmentModel {
    pub fn new(
        name: impl Into<String>,
        states: Vec<LooParams>,
        state_probs: Option<Vec<f64>>,
        transition: Vec<Vec<f64>>,
        state_frame_length_m: f64,
        shadowing_corr_length_m: f64,
    ) -> Result<Self> {
        let probs = match state_probs {
            Some(p) => p,
            None => stationary_distribution(&transition)?,
        };
        let env = EnvironmentModel {
            name: name.into(),
            states,
            state_probs: probs,
            transition,
            state_frame_length_m,
            shadowing_corr_length_m,
        };
        env.validate()?;
        Ok(env)
    }

    /// Single-state environment (no Markov dynamics).
    pub fn single_state(params: LooParams) -> Self {
        EnvironmentModel {
            name: "single".into(),
            states: vec![params],
            state_probs: vec![1.0],
            transition: vec![vec![1.0]],
            state_frame_length_m: 3.5,
            shadowing_corr_length_m: 3.5,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n == 0 {
            return Err(Error::domain("environment needs at least one state"));
        }
        for s in &self.states {
            s.validate()?;
        }
        if self.state_probs.len() != n {
            return Err(Error::domain(format!(
                "state probability vector has length {}, expected {n}",
                self.state_probs.len()
            )));
        }
        let psum: f64 = self.state_probs.iter().sum();
        if (psum - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "state probabilities sum to {psum}, expected 1 within 1e-12"
            )));
        }
        if self.state_probs.iter().any(|&p| p < 0.0) {
            return Err(Error::domain("state probabilities must be nonnegative"));
        }
        if self.transition.len() != n {
            return Err(Error::domain("transition matrix must be square (N rows)"));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != n {
                return Err(Error::domain(format!("transition row {i} has wrong length")));
            }
            if row.iter().any(|&p| p < 0.0) {
                return Err(Error::domain(format!("transition row {i} has negative entries")));
            }
            let rsum: f64 = row.iter().sum();
            if (rsum - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "transition row {i} sums to {rsum}, expected 1 within 1e-12"
                )));
            }
        }
        // supplied probabilities must agree with the chain's stationary law
        if n > 1 {
            let stat = stationary_distribution(&self.transition)?;
            for (i, (&p, &s)) in self.state_probs.iter().zip(&stat).enumerate() {
                if (p - s).abs() > 1e-6 {
                    return Err(Error::domain(format!(
                        "state_probs[{i}] = {p} inconsistent with stationary {s:.8} of the transition matrix"
                    )));
                }
            }
        }
        if !(self.state_frame_length_m > 0.0) {
            return Err(Error::domain("state frame length must be positive"));
        }
        if !(self.shadowing_corr_length_m > 0.0) {
            return Err(Error::domain("shadowing correlation length must be positive"));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let file: EnvFile = toml::from_str(text)
            .map_err(|e| Error::config(origin, e.to_string()))?;
        file.into_model(origin)
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Environments shipped with the crate (its, open, suburban, heavy_tree).
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "its" => include_str!("../../../../data/env/its.toml"),
            "open" => include_str!("../../../../data/env/open.toml"),
            "suburban" => include_str!("../../../../data/env/suburban.toml"),
            "heavy_tree" => include_str!("../../../../data/env/heavy_tree.toml"),
            other => {
                return Err(Error::domain(format!(
                    "unknown builtin environment '{other}' (have its, open, suburban, heavy_tree)"
                )))
            }
        };
        Self::from_toml_str(text, &format!("builtin:{name}"))
    }
}

/// Stationary distribution of a row-stochastic matrix by power iteration.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transition.len();
    if n == 0 {
        return Err(Error::domain("empty transition matrix"));
    }
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..100_000 {
        for v in next.iter_mut() {
            *v = 0.0;
        }
        for (i, row) in transition.iter().enumerate() {
            for (j, &pij) in row.iter().enumerate() {
                next[j] += pi[i] * pij;
            }
        }
        let norm: f64 = next.iter().sum();
        for v in next.iter_mut() {
            *v /= norm;
        }
        let diff: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if diff < 1e-14 {
            return Ok(pi);
        }
    }
    Err(Error::NonConvergence(
        "stationary distribution power iteration".into(),
    ))
}

#[derive(Deserialize)]
struct EnvFile {
    name: String,
    units: String,
    frame_length_m: f64,
    shadow_corr_m: f64,
    p: Option<Vec<f64>>,
    #[serde(rename = "P")]
    transition: Vec<f64>,
    states: Vec<StateFile>,
}

#[derive(Deserialize)]
struct StateFile {
    b0: Option<f64>,
    d0: Option<f64>,
    mu: Option<f64>,
    alpha_db: Option<f64>,
    psi_db: Option<f64>,
    mp_db: Option<f64>,
}

impl EnvFile {
    fn into_model(self, origin: &str) -> Result<EnvironmentModel> {
        let n = self.states.len();
        if self.transition.len() != n * n {
            return Err(Error::config(
                origin,
                format!(
                    "P has {} entries, expected {} for {} states (row-major)",
                    self.transition.len(),
                    n * n,
                    n
                ),
            ));
        }
        let mut states = Vec::with_capacity(n);
        for (i, s) in self.states.iter().enumerate() {
            let params = match self.units.as_str() {
                "natural" => match (s.b0, s.d0, s.mu) {
                    (Some(b0), Some(d0), Some(mu)) => LooParams::new(b0, d0, mu),
                    _ => Err(Error::config(
                        origin,
                        format!("state {i}: units=natural requires b0, d0, mu"),
                    )),
                },
                "fontan_db" => match (s.alpha_db, s.psi_db, s.mp_db) {
                    (Some(a), Some(p), Some(m)) => LooParams::from_fontan_db(a, p, m),
                    _ => Err(Error::config(
                        origin,
                        format!("state {i}: units=fontan_db requires alpha_db, psi_db, mp_db"),
                    )),
                },
                other => Err(Error::config(
                    origin,
                    format!("unknown units '{other}' (use natural or fontan_db)"),
                )),
            }?;
            states.push(params);
        }
        let transition: Vec<Vec<f64>> = self
            .transition
            .chunks(n)
            .map(|row| row.to_vec())
            .collect();
        EnvironmentModel::new(
            self.name,
            states,
            self.p,
            transition,
            self.frame_length_m,
            self.shadow_corr_m,
        )
        .map_err(|e| match e {
            Error::Domain(msg) => Error::config(origin, msg),
            other => other,
        })
    }
}

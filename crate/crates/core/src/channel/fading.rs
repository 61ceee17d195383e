//! Correlated trace generation: Doppler-shaped multipath plus the Markov
//! state machine with piecewise-constant log-normal LOS.

use super::env::EnvironmentModel;
use super::trace::ChannelTrace;
use crate::error::{Error, Result};
use crate::mathx::RngStream;
use num_complex::Complex64;

/// Terminal mobility and signalling parameters.
#[derive(Debug, Clone, Copy)]
pub struct MobilityConfig {
    pub speed_mps: f64,
    pub carrier_hz: f64,
    pub symbol_period_s: f64,
}

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

impl MobilityConfig {
    pub fn new(speed_mps: f64, carrier_hz: f64, symbol_period_s: f64) -> Result<Self> {
        let m = MobilityConfig {
            speed_mps,
            carrier_hz,
            symbol_period_s,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn doppler_hz(&self) -> f64 {
        self.speed_mps * self.carrier_hz / SPEED_OF_LIGHT
    }

    pub fn normalized_doppler(&self) -> f64 {
        self.doppler_hz() * self.symbol_period_s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed_mps > 0.0 && self.carrier_hz > 0.0 && self.symbol_period_s > 0.0) {
            return Err(Error::domain(
                "speed, carrier frequency and symbol period must be positive",
            ));
        }
        let nd = self.normalized_doppler();
        if !(nd > 0.0 && nd < 0.5) {
            return Err(Error::domain(format!(
                "normalized Doppler {nd:.3e} outside (0, 0.5)"
            )));
        }
        Ok(())
    }
}

const FIR_TAPS: usize = 512;
/// Lowest cutoff the 512-tap filter resolves sharply at the running rate;
/// below this the process is synthesized at a reduced internal rate and
/// linearly interpolated to symbol rate.
const MIN_DIRECT_CUTOFF: f64 = 1.0 / 32.0;

/// Linear-phase windowed-sinc low-pass taps (Hamming window), normalized to
/// unit noise gain so filtered unit-variance white noise keeps unit power.
pub fn doppler_taps(cutoff: f64) -> Vec<f64> {
    let center = (FIR_TAPS - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..FIR_TAPS)
        .map(|k| {
            let t = k as f64 - center;
            let sinc = if t == 0.0 {
                1.0
            } else {
                let a = 2.0 * cutoff * t * std::f64::consts::PI;
                a.sin() / a
            };
            let w = 0.54 - 0.46 * (2.0 * std::f64::consts::PI * k as f64 / (FIR_TAPS - 1) as f64).cos();
            sinc * w
        })
        .collect();
    let gain: f64 = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in taps.iter_mut() {
        *v /= gain;
    }
    taps
}

struct DopplerFilter {
    taps: Vec<f64>,
    buf: Vec<Complex64>,
    pos: usize,
}

impl DopplerFilter {
    fn new(cutoff: f64) -> Self {
        DopplerFilter {
            taps: doppler_taps(cutoff),
            buf: vec![Complex64::new(0.0, 0.0); FIR_TAPS],
            pos: 0,
        }
    }

    fn push(&mut self, x: Complex64) -> Complex64 {
        self.buf[self.pos] = x;
        self.pos = (self.pos + 1) % FIR_TAPS;
        let mut acc = Complex64::new(0.0, 0.0);
        // buf[pos-1] is the newest sample and pairs with taps[0]
        let mut idx = self.pos;
        for k in (0..FIR_TAPS).rev() {
            acc += self.buf[idx] * self.taps[k];
            idx += 1;
            if idx == FIR_TAPS {
                idx = 0;
            }
        }
        acc
    }
}

/// Unit-power correlated complex Gaussian process at symbol rate.
///
/// Cutoffs at or above [`MIN_DIRECT_CUTOFF`] are filtered directly at symbol
/// rate; lower Doppler rates run the filter at normalized cutoff 1/32 on an
/// internal grid and interpolate, which keeps very slow fading (walking
/// speeds at microsecond symbol periods) exact in bandwidth.
pub struct FadingProcess {
    filter: DopplerFilter,
    interp: bool,
    step: f64,
    prev: Complex64,
    next: Complex64,
    frac: f64,
}

impl FadingProcess {
    pub fn new(normalized_doppler: f64, rng: &mut RngStream) -> Result<Self> {
        if !(normalized_doppler > 0.0 && normalized_doppler < 0.5) {
            return Err(Error::domain(format!(
                "normalized Doppler {normalized_doppler:.3e} outside (0, 0.5)"
            )));
        }
        let (cutoff, interp, step) = if normalized_doppler >= MIN_DIRECT_CUTOFF {
            (normalized_doppler, false, 1.0)
        } else {
            (MIN_DIRECT_CUTOFF, true, normalized_doppler / MIN_DIRECT_CUTOFF)
        };
        let mut filter = DopplerFilter::new(cutoff);
        // transient: fill the delay line, then discard four cutoff periods
        let warm = FIR_TAPS + (4.0 / cutoff).ceil() as usize;
        let mut last = Complex64::new(0.0, 0.0);
        for _ in 0..warm {
            last = filter.push(rng.next_std_complex());
        }
        let next = filter.push(rng.next_std_complex());
        Ok(FadingProcess {
            filter,
            interp,
            step,
            prev: last,
            next,
            frac: 0.0,
        })
    }

    /// One symbol-rate sample.
    pub fn next_sample(&mut self, rng: &mut RngStream) -> Complex64 {
        if !self.interp {
            return self.filter.push(rng.next_std_complex());
        }
        let v = self.prev * (1.0 - self.frac) + self.next * self.frac;
        self.frac += self.step;
        while self.frac >= 1.0 {
            self.frac -= 1.0;
            self.prev = self.next;
            self.next = self.filter.push(rng.next_std_complex());
        }
        v
    }
}

/// Stateful LMS channel generator. Bursts drawn from the same simulator are
/// continuous: the Markov state, shadowing segment, and fading filter all
/// persist across calls.
pub struct ChannelSimulator {
    env: EnvironmentModel,
    noise_power: f64,
    rng: RngStream,
    fading: FadingProcess,
    state: usize,
    los_amp: f64,
    frame_len_syms: f64,
    frame_left: f64,
    seg_len_syms: f64,
    seg_left: f64,
}

impl ChannelSimulator {
    pub fn new(
        env: &EnvironmentModel,
        mobility: MobilityConfig,
        noise_power: f64,
        mut rng: RngStream,
    ) -> Result<Self> {
        env.validate()?;
        mobility.validate()?;
        if !(noise_power > 0.0) {
            return Err(Error::domain("noise power must be positive"));
        }
        let sym_per_m = 1.0 / (mobility.speed_mps * mobility.symbol_period_s);
        let frame_len_syms = env.state_frame_length_m * sym_per_m;
        let seg_len_syms = env.shadowing_corr_length_m * sym_per_m;
        if frame_len_syms < 1.0 || seg_len_syms < 1.0 {
            return Err(Error::domain(format!(
                "state frame ({frame_len_syms:.2} symbols) and shadowing segment \
                 ({seg_len_syms:.2} symbols) must span at least one symbol"
            )));
        }
        let fading = FadingProcess::new(mobility.normalized_doppler(), &mut rng)?;
        // initial state from the stationary law
        let u = rng.next_f64();
        let mut state = env.num_states() - 1;
        let mut acc = 0.0;
        for (i, &p) in env.state_probs.iter().enumerate() {
            acc += p;
            if u < acc {
                state = i;
                break;
            }
        }
        let mut sim = ChannelSimulator {
            env: env.clone(),
            noise_power,
            rng,
            fading,
            state,
            los_amp: 0.0,
            frame_len_syms,
            frame_left: frame_len_syms,
            seg_len_syms,
            seg_left: seg_len_syms,
        };
        sim.resample_los();
        Ok(sim)
    }

    fn resample_los(&mut self) {
        let p = self.env.states[self.state];
        self.los_amp = (p.mu_loo + p.d0.sqrt() * self.rng.next_normal()).exp();
    }

    fn markov_step(&mut self) {
        let u = self.rng.next_f64();
        let row = &self.env.transition[self.state];
        let mut acc = 0.0;
        let mut next = row.len() - 1;
        for (j, &pij) in row.iter().enumerate() {
            acc += pij;
            if u < acc {
                next = j;
                break;
            }
        }
        if next != self.state {
            self.state = next;
            // new state, new LOS draw and a fresh shadowing segment
            self.resample_los();
            self.seg_left = self.seg_len_syms;
        }
    }

    /// Append `n` symbols to a trace.
    pub fn fill(&mut self, trace: &mut ChannelTrace, n: usize) {
        for _ in 0..n {
            if self.frame_left <= 0.0 {
                self.frame_left += self.frame_len_syms;
                self.markov_step();
            }
            if self.seg_left <= 0.0 {
                self.seg_left += self.seg_len_syms;
                self.resample_los();
            }
            let nlos_scale = (2.0 * self.env.states[self.state].b0).sqrt();
            let w = self.fading.next_sample(&mut self.rng);
            let h = Complex64::new(self.los_amp, 0.0) + w * nlos_scale;
            trace.push(h, self.state as u8);
            self.frame_left -= 1.0;
            self.seg_left -= 1.0;
        }
    }

    /// Generate the next burst of `l` symbols as its own trace.
    pub fn next_burst(&mut self, l: usize) -> ChannelTrace {
        let mut t = ChannelTrace::with_capacity(l, self.noise_power);
        self.fill(&mut t, l);
        t
    }
}

/// Correlated LMS trace of `num_codewords * codeword_len` symbols.
pub fn generate_trace(
    env: &EnvironmentModel,
    mobility: MobilityConfig,
    noise_power: f64,
    num_codewords: usize,
    codeword_len: usize,
    rng: RngStream,
) -> Result<ChannelTrace> {
    let n = num_codewords * codeword_len;
    if n == 0 {
        return Err(Error::domain("trace must contain at least one symbol"));
    }
    let mut sim = ChannelSimulator::new(env, mobility, noise_power, rng)?;
    Ok(sim.next_burst(n))
}

/// Correlated single-state Rician trace: constant LOS amplitude `mu`,
/// Doppler-filtered NLOS of power `2 theta2`. Each SNR sample follows the
/// scaled noncentral chi-squared law (theta2/sigma2) * chi2_2(lambda) with
/// lambda = mu^2 / theta2.
pub fn rician_state_trace(
    mu: f64,
    theta2: f64,
    noise_power: f64,
    doppler_hz: f64,
    symbol_period_s: f64,
    n: usize,
    mut rng: RngStream,
) -> Result<ChannelTrace> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::domain("LOS amplitude must be nonnegative"));
    }
    if !(theta2 > 0.0 && noise_power > 0.0) {
        return Err(Error::domain("theta2 and noise power must be positive"));
    }
    if n == 0 {
        return Err(Error::domain("trace must contain at least one symbol"));
    }
    let nd = doppler_hz * symbol_period_s;
    let mut fading = FadingProcess::new(nd, &mut rng)?;
    let scale = (2.0 * theta2).sqrt();
    let mut t = ChannelTrace::with_capacity(n, noise_power);
    for _ in 0..n {
        let h = Complex64::new(mu, 0.0) + fading.next_sample(&mut rng) * scale;
        t.push(h, 0);
    }
    Ok(t)
}

//! Land-mobile-satellite channel: Markov-mixture Loo model, correlated trace
//! generation, and the analytic amplitude mixture CDF.

mod env;
mod fading;
mod loo;
mod trace;

pub use env::{stationary_distribution, EnvironmentModel, LooParams};
pub use fading::{
    doppler_taps, generate_trace, rician_state_trace, ChannelSimulator, FadingProcess,
    MobilityConfig, SPEED_OF_LIGHT,
};
pub use loo::{
    loo_mixture_cdf, loo_mixture_pdf, loo_pdf, rician_amplitude_cdf, AmplitudeCdf,
    AmplitudeCdfTable, StepCdf,
};
pub use trace::{ChannelTrace, TraceView};

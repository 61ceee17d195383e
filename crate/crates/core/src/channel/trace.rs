//! Channel trace container and CSV export.

use crate::error::Result;
use num_complex::Complex64;
use std::io::Write;

/// Complex channel gains with the derived per-symbol SNR and the Markov
/// state index active at each symbol. Immutable once generated.
#[derive(Debug, Clone)]
pub struct ChannelTrace {
    pub gains: Vec<Complex64>,
    pub snr: Vec<f64>,
    pub states: Vec<u8>,
    pub noise_power: f64,
}

/// Borrowed window of a trace, typically one codeword.
#[derive(Debug, Clone, Copy)]
pub struct TraceView<'a> {
    pub gains: &'a [Complex64],
    pub snr: &'a [f64],
    pub states: &'a [u8],
    pub noise_power: f64,
}

impl ChannelTrace {
    pub fn with_capacity(n: usize, noise_power: f64) -> Self {
        ChannelTrace {
            gains: Vec::with_capacity(n),
            snr: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            noise_power,
        }
    }

    pub fn push(&mut self, h: Complex64, state: u8) {
        self.gains.push(h);
        self.snr.push(h.norm_sqr() / self.noise_power);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn view(&self, start: usize, len: usize) -> TraceView<'_> {
        TraceView {
            gains: &self.gains[start..start + len],
            snr: &self.snr[start..start + len],
            states: &self.states[start..start + len],
            noise_power: self.noise_power,
        }
    }

    pub fn full_view(&self) -> TraceView<'_> {
        self.view(0, self.len())
    }

    /// Non-overlapping codeword windows of length `l`; a trailing partial
    /// window is dropped.
    pub fn codewords(&self, l: usize) -> impl Iterator<Item = TraceView<'_>> {
        (0..self.len() / l).map(move |k| self.view(k * l, l))
    }

    /// CSV export: comment line, header, one row per symbol.
    pub fn write_csv(&self, mut w: impl Write, comment: &str) -> Result<()> {
        writeln!(w, "# {comment}")?;
        writeln!(w, "index,state,re_h,im_h,gamma")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{:.12e},{:.12e},{:.12e}",
                i, self.states[i], self.gains[i].re, self.gains[i].im, self.snr[i]
            )?;
        }
        Ok(())
    }
}

use super::ExperimentError;

/// Timing and sampling parameters of the coincidence experiment.
///
/// Pulses come in pairs `pulse_sep_ns` apart, one pair per `rep_period_ns`.
/// The central peak is integrated over |τ| < `window_ns` and normalized by
/// all coincidences within a `norm_window_ns`-wide span. Detection times
/// jitter with a two-sided exponential of scale `wavepacket_width_ps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub pulse_sep_ns: f64,
    pub rep_period_ns: f64,
    /// Half-width of the central integration window.
    pub window_ns: f64,
    /// Full width of the normalization window.
    pub norm_window_ns: f64,
    pub wavepacket_width_ps: f64,
    pub bin_ns: f64,
    pub shots: u64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pulse_sep_ns: 2.0,
            rep_period_ns: 13.0,
            window_ns: 1.0,
            norm_window_ns: 100.0,
            wavepacket_width_ps: 150.0,
            bin_ns: 0.1,
            shots: 100_000,
            seed: 0,
        }
    }
}

fn divides(span: f64, bin: f64) -> bool {
    let ratio = span / bin;
    (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::InvalidConfig(msg));
        for (name, value) in [
            ("pulse_sep_ns", self.pulse_sep_ns),
            ("rep_period_ns", self.rep_period_ns),
            ("window_ns", self.window_ns),
            ("norm_window_ns", self.norm_window_ns),
            ("wavepacket_width_ps", self.wavepacket_width_ps),
            ("bin_ns", self.bin_ns),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return bad(format!("{name} must be positive and finite, got {value}"));
            }
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        // Central peak isolation: the integration window must not reach the
        // first side peak.
        if self.window_ns > self.pulse_sep_ns / 2.0 + 1e-9 {
            return bad(format!(
                "window_ns {} must stay below pulse_sep_ns/2 = {}",
                self.window_ns,
                self.pulse_sep_ns / 2.0
            ));
        }
        if self.norm_window_ns < 2.0 * self.window_ns {
            return bad("norm_window_ns must cover the central window".into());
        }
        if !divides(self.norm_window_ns, self.bin_ns) || !divides(self.window_ns, self.bin_ns) {
            return bad(format!(
                "bin_ns {} must divide window_ns {} and norm_window_ns {}",
                self.bin_ns, self.window_ns, self.norm_window_ns
            ));
        }
        Ok(())
    }

    pub(super) fn jitter_scale_ns(&self) -> f64 {
        self.wavepacket_width_ps / 1000.0
    }
}

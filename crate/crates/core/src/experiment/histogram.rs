use std::io::Read;

use super::config::ExperimentConfig;
use super::ExperimentError;
use crate::numfmt::sig12;

/// Coincidence counts versus detection delay τ, in uniform bins symmetric
/// about τ = 0. The sum of all bins is the number of recorded coincidences;
/// events outside the range are not recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    half_range_ns: f64,
    bin_ns: f64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(half_range_ns: f64, bin_ns: f64) -> Result<Self, ExperimentError> {
        if !(half_range_ns > 0.0) || !(bin_ns > 0.0) {
            return Err(ExperimentError::InvalidConfig(
                "histogram range and bin width must be positive".into(),
            ));
        }
        let ratio = 2.0 * half_range_ns / bin_ns;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(ExperimentError::InvalidConfig(format!(
                "bin width {bin_ns} must divide the range {}",
                2.0 * half_range_ns
            )));
        }
        Ok(Histogram {
            half_range_ns,
            bin_ns,
            counts: vec![0; ratio.round() as usize],
        })
    }

    pub fn record(&mut self, tau_ns: f64) {
        if !tau_ns.is_finite() {
            return;
        }
        let idx = ((tau_ns + self.half_range_ns) / self.bin_ns).floor();
        if idx >= 0.0 && (idx as usize) < self.counts.len() {
            self.counts[idx as usize] += 1;
        }
    }

    pub fn half_range_ns(&self) -> f64 {
        self.half_range_ns
    }

    pub fn bin_ns(&self) -> f64 {
        self.bin_ns
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        -self.half_range_ns + (i as f64 + 0.5) * self.bin_ns
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.counts.len())
            .map(|i| -self.half_range_ns + i as f64 * self.bin_ns)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(super) fn merge(&mut self, other: &Histogram) {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
    }

    /// CSV form `tau_ns,count`, one row per bin center.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("tau_ns,count\n");
        for (i, &count) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{}\n", sig12(self.bin_center(i)), count));
        }
        out
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, ExperimentError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = csv_reader
            .headers()
            .map_err(|e| ExperimentError::Parse {
                line: 1,
                message: e.to_string(),
            })?
            .iter()
            .collect::<Vec<_>>()
            .join(",");
        if headers != "tau_ns,count" {
            return Err(ExperimentError::Parse {
                line: 1,
                message: format!("header must be `tau_ns,count`, got `{headers}`"),
            });
        }
        let mut centers = Vec::new();
        let mut counts = Vec::new();
        for record in csv_reader.records() {
            let record = record.map_err(|e| ExperimentError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let parse_err = |message: String| ExperimentError::Parse { line, message };
            if record.len() != 2 {
                return Err(parse_err(format!("expected 2 fields, got {}", record.len())));
            }
            let tau: f64 = record[0]
                .parse()
                .map_err(|_| parse_err(format!("cannot parse tau_ns `{}`", &record[0])))?;
            let count: u64 = record[1]
                .parse()
                .map_err(|_| parse_err(format!("cannot parse count `{}`", &record[1])))?;
            centers.push(tau);
            counts.push(count);
        }
        if centers.len() < 2 {
            return Err(ExperimentError::Parse {
                line: 0,
                message: "histogram needs at least two bins".into(),
            });
        }
        let bin = centers[1] - centers[0];
        for (i, w) in centers.windows(2).enumerate() {
            if ((w[1] - w[0]) - bin).abs() > 1e-9 {
                return Err(ExperimentError::Parse {
                    line: (i + 3) as u64,
                    message: "bin centers must be uniformly spaced".into(),
                });
            }
        }
        let half = -(centers[0] - bin / 2.0);
        let last_edge = centers[centers.len() - 1] + bin / 2.0;
        if (last_edge - half).abs() > 1e-9 {
            return Err(ExperimentError::Parse {
                line: 0,
                message: "histogram must be symmetric about tau = 0".into(),
            });
        }
        let mut hist = Histogram::new(half, bin)?;
        hist.counts.copy_from_slice(&counts);
        Ok(hist)
    }

    pub fn from_csv_str(s: &str) -> Result<Self, ExperimentError> {
        Self::from_csv_reader(s.as_bytes())
    }
}

/// Counts with bin centers inside |τ| < `window_ns`; bins straddling the
/// boundary belong wherever their center lies.
pub fn central_window_count(h: &Histogram, window_ns: f64) -> Result<u64, ExperimentError> {
    if !(window_ns > 0.0) || window_ns > h.half_range_ns() + 1e-9 {
        return Err(ExperimentError::WindowExceedsRange {
            window_ns,
            half_range_ns: h.half_range_ns(),
        });
    }
    Ok(h.counts()
        .iter()
        .enumerate()
        .filter(|(i, _)| h.bin_center(*i).abs() < window_ns)
        .map(|(_, &c)| c)
        .sum())
}

/// Central-window counts normalized by all coincidences within the
/// configuration's normalization window.
pub fn normalized_c(h: &Histogram, cfg: &ExperimentConfig) -> Result<f64, ExperimentError> {
    let central = central_window_count(h, cfg.window_ns)?;
    let total = central_window_count(h, cfg.norm_window_ns / 2.0)?;
    if total == 0 {
        return Err(ExperimentError::ZeroNormalization);
    }
    Ok(central as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist_with(taus: &[f64]) -> Histogram {
        let mut h = Histogram::new(50.0, 0.1).unwrap();
        for &t in taus {
            h.record(t);
        }
        h
    }

    #[test]
    fn all_counts_at_zero_are_central() {
        let h = hist_with(&[0.01, -0.02, 0.0, 0.04]);
        assert_eq!(central_window_count(&h, 1.0).unwrap(), 4);
        assert_eq!(h.total(), 4);
    }

    #[test]
    fn side_peaks_stay_out_of_the_window() {
        let h = hist_with(&[2.0, 2.01, -2.0, -1.97]);
        assert_eq!(central_window_count(&h, 1.0).unwrap(), 0);
        assert_eq!(h.total(), 4);
    }

    #[test]
    fn mixed_histogram_counts_only_the_window() {
        let h = hist_with(&[0.2, -0.6, 0.95, 1.2, -2.0, 13.0, -48.0]);
        assert_eq!(central_window_count(&h, 1.0).unwrap(), 3);
    }

    #[test]
    fn out_of_range_events_are_dropped() {
        let h = hist_with(&[0.0, 51.0, -50.1, f64::INFINITY]);
        assert_eq!(h.total(), 1);
    }

    #[test]
    fn window_larger_than_range_is_rejected() {
        let h = hist_with(&[0.0]);
        assert!(matches!(
            central_window_count(&h, 60.0),
            Err(ExperimentError::WindowExceedsRange { .. })
        ));
    }

    #[test]
    fn normalization_ratio() {
        let mut h = Histogram::new(50.0, 0.1).unwrap();
        for _ in 0..10 {
            h.record(0.0);
        }
        for _ in 0..90 {
            h.record(13.0);
        }
        let cfg = ExperimentConfig::default();
        assert!((normalized_c(&h, &cfg).unwrap() - 0.10).abs() < 1e-12);
    }

    #[test]
    fn empty_normalization_window_is_an_error() {
        let h = Histogram::new(50.0, 0.1).unwrap();
        let cfg = ExperimentConfig::default();
        assert_eq!(
            normalized_c(&h, &cfg).unwrap_err(),
            ExperimentError::ZeroNormalization
        );
    }

    #[test]
    fn csv_round_trip() {
        let h = hist_with(&[0.0, 0.0, 2.0, -13.2, 47.0]);
        let text = h.to_csv_string();
        let back = Histogram::from_csv_str(&text).unwrap();
        assert_eq!(h.counts(), back.counts());
        assert!((h.bin_ns() - back.bin_ns()).abs() < 1e-9);
        assert!((h.half_range_ns() - back.half_range_ns()).abs() < 1e-9);
    }
}

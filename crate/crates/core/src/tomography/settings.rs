use std::fmt;
use std::str::FromStr;

use super::TomoError;
use crate::qmath::{c64, tensor_product, ComplexMatrix, DensityMatrix, C64};

/// Single-qubit analyzer states:
/// H=(1,0), V=(0,1), D=(H+V)/√2, A=(H−V)/√2, R=(H−iV)/√2, L=(H+iV)/√2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Analyzer {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Analyzer {
    pub fn ket(self) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Analyzer::H => [c64(1.0, 0.0), c64(0.0, 0.0)],
            Analyzer::V => [c64(0.0, 0.0), c64(1.0, 0.0)],
            Analyzer::D => [c64(s, 0.0), c64(s, 0.0)],
            Analyzer::A => [c64(s, 0.0), c64(-s, 0.0)],
            Analyzer::R => [c64(s, 0.0), c64(0.0, -s)],
            Analyzer::L => [c64(s, 0.0), c64(0.0, s)],
        }
    }

    pub fn letter(self) -> char {
        match self {
            Analyzer::H => 'H',
            Analyzer::V => 'V',
            Analyzer::D => 'D',
            Analyzer::A => 'A',
            Analyzer::R => 'R',
            Analyzer::L => 'L',
        }
    }
}

impl FromStr for Analyzer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" => Ok(Analyzer::H),
            "V" => Ok(Analyzer::V),
            "D" => Ok(Analyzer::D),
            "A" => Ok(Analyzer::A),
            "R" => Ok(Analyzer::R),
            "L" => Ok(Analyzer::L),
            other => Err(format!("unknown analyzer token `{other}`")),
        }
    }
}

impl fmt::Display for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One projective measurement: an analyzer state per arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TomoSetting {
    pub first: Analyzer,
    pub second: Analyzer,
}

impl TomoSetting {
    pub fn new(first: Analyzer, second: Analyzer) -> Self {
        TomoSetting { first, second }
    }

    /// Position in [`canonical_settings`], if the setting belongs to it.
    pub fn canonical_index(self) -> Option<usize> {
        canonical_settings().iter().position(|&s| s == self)
    }
}

impl fmt::Display for TomoSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

/// The fixed, informationally complete set of 16 measurement settings,
/// including the circular analyzers. The first four form a complete basis
/// whose probabilities sum to 1; that subgroup anchors the count scale.
pub fn canonical_settings() -> [TomoSetting; 16] {
    use Analyzer::*;
    [
        (H, H),
        (H, V),
        (V, V),
        (V, H),
        (R, H),
        (R, V),
        (D, V),
        (D, H),
        (D, R),
        (D, D),
        (R, D),
        (H, D),
        (V, D),
        (V, L),
        (H, L),
        (R, L),
    ]
    .map(|(a, b)| TomoSetting::new(a, b))
}

/// Rank-1 projector |s₁⟩⟨s₁| ⊗ |s₂⟩⟨s₂| with trace 1.
pub fn setting_projector(setting: TomoSetting) -> ComplexMatrix {
    let p1 = ComplexMatrix::outer(&setting.first.ket()).expect("finite");
    let p2 = ComplexMatrix::outer(&setting.second.ket()).expect("finite");
    tensor_product(&p1, &p2)
}

/// tr[ρ Π_ν] for the 16 canonical settings, in canonical order.
pub fn expected_probabilities(rho: &DensityMatrix) -> Result<[f64; 16], TomoError> {
    let mut out = [0.0; 16];
    for (i, setting) in canonical_settings().iter().enumerate() {
        out[i] = rho.expectation(&setting_projector(*setting))?.max(0.0);
    }
    Ok(out)
}

/// Exactly 16 counts matching the canonical settings, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct TomoCounts {
    counts: [f64; 16],
}

impl TomoCounts {
    /// Counts in canonical-settings order.
    pub fn from_counts(counts: [f64; 16]) -> Result<Self, TomoError> {
        for &c in &counts {
            if !c.is_finite() || c < 0.0 {
                return Err(TomoError::BadCount(c));
            }
        }
        Ok(TomoCounts { counts })
    }

    /// Build from (setting, count) pairs; the set must be exactly canonical.
    pub fn from_entries(entries: Vec<(TomoSetting, f64)>) -> Result<Self, TomoError> {
        let mut counts = [f64::NAN; 16];
        for (setting, count) in entries {
            let idx = setting
                .canonical_index()
                .ok_or(TomoError::NotCanonical(setting.to_string()))?;
            if !counts[idx].is_nan() {
                return Err(TomoError::DuplicateSetting(setting.to_string()));
            }
            if !count.is_finite() || count < 0.0 {
                return Err(TomoError::BadCount(count));
            }
            counts[idx] = count;
        }
        if let Some(missing) = counts.iter().position(|c| c.is_nan()) {
            return Err(TomoError::MissingSetting(
                canonical_settings()[missing].to_string(),
            ));
        }
        Ok(TomoCounts { counts })
    }

    pub fn counts(&self) -> &[f64; 16] {
        &self.counts
    }

    pub fn get(&self, setting: TomoSetting) -> Option<f64> {
        setting.canonical_index().map(|i| self.counts[i])
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Sum over the complete-basis subgroup {HH, HV, VV, VH}: the detection
    /// scale used to turn counts into probabilities.
    pub fn basis_subgroup_total(&self) -> f64 {
        self.counts[..4].iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TomoSetting, f64)> + '_ {
        canonical_settings()
            .into_iter()
            .zip(self.counts.iter().copied())
    }

    /// CSV form: header `first,second,count`, rows in canonical order.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("first,second,count\n");
        for (setting, count) in self.iter() {
            out.push_str(&format!(
                "{},{},{}\n",
                setting.first,
                setting.second,
                crate::numfmt::sig12(count)
            ));
        }
        out
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, TomoError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        {
            let headers = csv_reader
                .headers()
                .map_err(|e| TomoError::Parse {
                    line: 1,
                    message: e.to_string(),
                })?
                .iter()
                .collect::<Vec<_>>()
                .join(",");
            if headers != "first,second,count" {
                return Err(TomoError::Parse {
                    line: 1,
                    message: format!("header must be `first,second,count`, got `{headers}`"),
                });
            }
        }
        let mut entries = Vec::new();
        for record in csv_reader.records() {
            let record = record.map_err(|e| TomoError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 3 {
                return Err(TomoError::Parse {
                    line,
                    message: format!("expected 3 fields, got {}", record.len()),
                });
            }
            let parse_token = |i: usize| -> Result<Analyzer, TomoError> {
                record[i]
                    .parse::<Analyzer>()
                    .map_err(|message| TomoError::Parse { line, message })
            };
            let first = parse_token(0)?;
            let second = parse_token(1)?;
            let count = record[2].parse::<f64>().map_err(|_| TomoError::Parse {
                line,
                message: format!("cannot parse count `{}` as a number", &record[2]),
            })?;
            entries.push((TomoSetting::new(first, second), count));
        }
        Self::from_entries(entries)
    }

    pub fn from_csv_str(s: &str) -> Result<Self, TomoError> {
        Self::from_csv_reader(s.as_bytes())
    }

    pub fn from_csv_path<P: AsRef<std::path::Path>>(path: P) -> Result<Self, TomoError> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| TomoError::Io(e.to_string()))?;
        Self::from_csv_reader(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::PureState2Q;
    use nalgebra::DMatrix;

    #[test]
    fn sixteen_distinct_settings_starting_with_hh() {
        let set = canonical_settings();
        assert_eq!(set.len(), 16);
        assert_eq!(set[0], TomoSetting::new(Analyzer::H, Analyzer::H));
        for i in 0..16 {
            for j in (i + 1)..16 {
                assert_ne!(set[i], set[j]);
            }
        }
    }

    #[test]
    fn projectors_span_hermitian_operator_space() {
        // Gram matrix of the 16 projectors must be nonsingular.
        let projectors: Vec<_> = canonical_settings()
            .iter()
            .map(|&s| setting_projector(s))
            .collect();
        let gram = DMatrix::from_fn(16, 16, |i, j| {
            (&projectors[i] * &projectors[j]).trace().re
        });
        let det = gram.determinant();
        assert!(det.abs() > 1e-9, "Gram determinant {det}");
    }

    #[test]
    fn projector_examples() {
        let hh = setting_projector(TomoSetting::new(Analyzer::H, Analyzer::H));
        let expect = ComplexMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(hh.max_abs_diff(&expect).unwrap() < 1e-15);

        let dd = setting_projector(TomoSetting::new(Analyzer::D, Analyzer::D));
        let quarter = ComplexMatrix::from_fn(4, 4, |_, _| c64(0.25, 0.0)).unwrap();
        assert!(dd.max_abs_diff(&quarter).unwrap() < 1e-15);

        let hv = setting_projector(TomoSetting::new(Analyzer::H, Analyzer::V));
        let singlet = PureState2Q::psi_minus().density();
        assert!((singlet.expectation(&hv).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projectors_are_rank_one() {
        for setting in canonical_settings() {
            let p = setting_projector(setting);
            assert!((p.trace().re - 1.0).abs() < 1e-12);
            assert!((&p * &p).max_abs_diff(&p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let counts = TomoCounts::from_counts(std::array::from_fn(|i| (i * 7 % 13) as f64)).unwrap();
        let text = counts.to_csv_string();
        let back = TomoCounts::from_csv_str(&text).unwrap();
        assert_eq!(counts, back);
    }

    #[test]
    fn csv_rejects_unknown_token() {
        let text = "first,second,count\nQ,H,3\n";
        match TomoCounts::from_csv_str(text).unwrap_err() {
            TomoError::Parse { line: 2, message } => assert!(message.contains("unknown analyzer")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_rejects_duplicates_and_missing() {
        let counts = TomoCounts::from_counts([1.0; 16]).unwrap();
        let mut text = counts.to_csv_string();
        text.push_str("H,H,4\n");
        assert!(matches!(
            TomoCounts::from_csv_str(&text),
            Err(TomoError::DuplicateSetting(_))
        ));

        let truncated: String = counts
            .to_csv_string()
            .lines()
            .take(16) // header + 15 rows
            .map(|l| format!("{l}\n"))
            .collect();
        match TomoCounts::from_csv_str(&truncated).unwrap_err() {
            TomoError::MissingSetting(name) => assert_eq!(name, "RL"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_canonical_setting_rejected() {
        let err = TomoCounts::from_entries(vec![(
            TomoSetting::new(Analyzer::A, Analyzer::A),
            1.0,
        )])
        .unwrap_err();
        assert!(matches!(err, TomoError::NotCanonical(_)));
    }
}

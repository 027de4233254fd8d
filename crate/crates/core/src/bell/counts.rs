use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use super::BellError;
use crate::numfmt::sig12;

/// The published coincidence table for the first emitter, normalized to
/// arbitrary units; every complementary quadruple sums to ≈100.
pub const TABLE1_QD1_CSV: &str = include_str!("../../../../data/table1_qd1.csv");

const HEADER: &str = "alpha_deg,beta_deg,count";

/// Analyzer angles are polarizer settings, so everything is taken mod 180°.
/// Keys are stored in rounded millidegrees to make lookups exact.
fn angle_key(deg: f64) -> i64 {
    let k = (deg.rem_euclid(180.0) * 1000.0).round() as i64;
    if k == 180_000 {
        0
    } else {
        k
    }
}

fn key_to_deg(key: i64) -> f64 {
    key as f64 / 1000.0
}

/// The perpendicular analyzer setting, +90° mod 180°.
pub fn perpendicular(deg: f64) -> f64 {
    (deg + 90.0).rem_euclid(180.0)
}

/// Coincidence counts indexed by the two analyzer angles (α, β).
///
/// Counts are nonnegative reals: normalized coincidence rates are as valid
/// an input as raw counts.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CountTable {
    entries: BTreeMap<(i64, i64), f64>,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert one setting; duplicates (after mod-180 reduction) and negative
    /// or non-finite counts are rejected.
    pub fn insert(&mut self, alpha_deg: f64, beta_deg: f64, count: f64) -> Result<(), BellError> {
        if !count.is_finite() || count < 0.0 {
            return Err(BellError::BadCount(count));
        }
        if !alpha_deg.is_finite() || !beta_deg.is_finite() {
            return Err(BellError::BadAngle);
        }
        let key = (angle_key(alpha_deg), angle_key(beta_deg));
        if self.entries.contains_key(&key) {
            return Err(BellError::DuplicateSetting {
                alpha_deg: key_to_deg(key.0),
                beta_deg: key_to_deg(key.1),
            });
        }
        self.entries.insert(key, count);
        Ok(())
    }

    pub fn get(&self, alpha_deg: f64, beta_deg: f64) -> Option<f64> {
        self.entries
            .get(&(angle_key(alpha_deg), angle_key(beta_deg)))
            .copied()
    }

    pub(super) fn require(&self, alpha_deg: f64, beta_deg: f64) -> Result<f64, BellError> {
        self.get(alpha_deg, beta_deg)
            .ok_or(BellError::MissingEntry {
                alpha_deg: key_to_deg(angle_key(alpha_deg)),
                beta_deg: key_to_deg(angle_key(beta_deg)),
            })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by (α, β).
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.entries
            .iter()
            .map(|(&(a, b), &c)| (key_to_deg(a), key_to_deg(b), c))
    }

    /// Parse the CSV form. Errors carry the 1-based line number.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, BellError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        {
            let headers = csv_reader
                .headers()
                .map_err(|e| BellError::Parse {
                    line: 1,
                    message: e.to_string(),
                })?
                .iter()
                .collect::<Vec<_>>()
                .join(",");
            if headers != HEADER {
                return Err(BellError::Parse {
                    line: 1,
                    message: format!("header must be `{HEADER}`, got `{headers}`"),
                });
            }
        }
        let mut table = CountTable::new();
        for record in csv_reader.records() {
            let record = record.map_err(|e| BellError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 3 {
                return Err(BellError::Parse {
                    line,
                    message: format!("expected 3 fields, got {}", record.len()),
                });
            }
            let field = |i: usize, name: &str| -> Result<f64, BellError> {
                record[i].parse::<f64>().map_err(|_| BellError::Parse {
                    line,
                    message: format!("cannot parse {name} `{}` as a number", &record[i]),
                })
            };
            let alpha = field(0, "alpha_deg")?;
            let beta = field(1, "beta_deg")?;
            let count = field(2, "count")?;
            table.insert(alpha, beta, count).map_err(|e| match e {
                BellError::DuplicateSetting { .. } | BellError::BadCount(_) => BellError::Parse {
                    line,
                    message: e.to_string(),
                },
                other => other,
            })?;
        }
        Ok(table)
    }

    pub fn from_csv_str(s: &str) -> Result<Self, BellError> {
        Self::from_csv_reader(s.as_bytes())
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self, BellError> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| BellError::Io(e.to_string()))?;
        Self::from_csv_reader(file)
    }

    /// Emit the CSV form, rows sorted by (α, β), numbers at 12 significant
    /// digits. Readable back without data loss.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for (alpha, beta, count) in self.iter() {
            out.push_str(&format!("{},{},{}\n", sig12(alpha), sig12(beta), sig12(count)));
        }
        out
    }

    /// The bundled dataset for the first emitter.
    pub fn table1_qd1() -> Self {
        Self::from_csv_str(TABLE1_QD1_CSV).expect("bundled table parses")
    }
}

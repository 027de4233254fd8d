//! Numeric formatting shared by the JSON and CSV writers.

/// Round to 12 significant digits so emitted files are stable and re-reads
/// are exact. Negative zero normalizes to zero.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float reparses")
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn rounds_to_twelve_significant_digits() {
        assert_eq!(sig12(0.1234567890123456), 0.123456789012);
        assert_eq!(sig12(-1.0 / 3.0), -0.333333333333);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-0.0), 0.0);
        assert_eq!(sig12(2.0), 2.0);
        assert_eq!(sig12(1e-300), 1e-300);
    }
}

//! dB helpers. Power quantities only.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-15);
        assert!((dbm_to_watts(-110.0) - 1e-14).abs() < 1e-28);
        assert!((watts_to_dbm(0.1) - 20.0).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(-40.0)) + 40.0).abs() < 1e-12);
    }
}

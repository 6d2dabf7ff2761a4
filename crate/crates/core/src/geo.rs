//! Great-circle distances.

/// Mean Earth radius (IUGG).
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Distances below this are clamped up to it.
pub const DISTANCE_FLOOR_KM: f64 = 0.05;

/// Haversine distance between two `(lat, lon)` points in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
}

/// Haversine distance clamped below at [`DISTANCE_FLOOR_KM`].
pub fn floored_distance_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    haversine_km(lat1, lon1, lat2, lon2).max(DISTANCE_FLOOR_KM)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_floor() {
        assert_eq!(haversine_km(10.0, 20.0, 10.0, 20.0), 0.0);
        assert_eq!(floored_distance_km(10.0, 20.0, 10.0, 20.0), DISTANCE_FLOOR_KM);
    }

    #[test]
    fn quarter_meridian() {
        let d = haversine_km(0.0, 0.0, 90.0, 0.0);
        assert!((d - EARTH_RADIUS_KM * std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn symmetric() {
        let a = haversine_km(51.5, -0.12, 48.85, 2.29);
        let b = haversine_km(48.85, 2.29, 51.5, -0.12);
        assert!((a - b).abs() < 1e-12);
    }
}

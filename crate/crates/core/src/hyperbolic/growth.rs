use std::f64::consts::PI;

use crate::error::{Error, Result};

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeRadius(r))
    }
}

/// Length of a circle of radius `r` in H², `2π sinh r`.
pub fn circle_circumference_h2(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(2.0 * PI * r.sinh())
}

/// Area of a sphere of radius `r` in H³, `4π sinh² r`.
pub fn sphere_area_h3(r: f64) -> Result<f64> {
    check_radius(r)?;
    let s = r.sinh();
    Ok(4.0 * PI * s * s)
}

/// Volume of a ball of radius `r` in H³, `π (sinh 2r − 2r)`.
pub fn ball_volume_h3(r: f64) -> Result<f64> {
    check_radius(r)?;
    let x = 2.0 * r;
    // sinh x − x loses all precision for small x; use its series there.
    let excess = if x < 0.05 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)))
    } else {
        x.sinh() - x
    };
    Ok(PI * excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_values() {
        assert_eq!(circle_circumference_h2(0.0).unwrap(), 0.0);
        // 2π (e − 1/e)/2 = π (e − 1/e)
        let e = std::f64::consts::E;
        assert_relative_eq!(circle_circumference_h2(1.0).unwrap(), PI * (e - 1.0 / e), epsilon = 1e-14);
        assert_relative_eq!(circle_circumference_h2(1.0).unwrap(), 7.384007, epsilon = 1e-6);
        let r = 30.0;
        assert_relative_eq!(circle_circumference_h2(r).unwrap() / (PI * r.exp()), 1.0, epsilon = 1e-12);
        assert!(circle_circumference_h2(-0.1).is_err());
    }

    #[test]
    fn sphere_values() {
        assert_eq!(sphere_area_h3(0.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert_relative_eq!(sphere_area_h3(1.0).unwrap(), PI * (e - 1.0 / e).powi(2), epsilon = 1e-14);
        assert_relative_eq!(sphere_area_h3(1.0).unwrap(), 17.355387, epsilon = 1e-6);
        let r = 200.0;
        assert!((sphere_area_h3(r).unwrap().ln() / r - 2.0).abs() < 0.01);
        assert!(sphere_area_h3(-1.0).is_err());
    }

    #[test]
    fn ball_is_antiderivative_of_sphere() {
        assert_eq!(ball_volume_h3(0.0).unwrap(), 0.0);
        let h = 1e-4;
        for r in [0.02, 0.5, 1.0, 3.0] {
            let fd = (ball_volume_h3(r + h).unwrap() - ball_volume_h3(r - h).unwrap()) / (2.0 * h);
            let area = sphere_area_h3(r).unwrap();
            assert!((fd - area).abs() < 1e-6 * (1.0 + area), "r = {r}");
        }
        assert!(ball_volume_h3(-1.0).is_err());
    }

    #[test]
    fn series_branch_is_continuous() {
        let below = ball_volume_h3(0.025 - 1e-12).unwrap();
        let above = ball_volume_h3(0.025 + 1e-12).unwrap();
        assert!((below - above).abs() < 1e-12);
    }
}

//! Shapiro-Wilk W test with Royston's approximations for the coefficients
//! and the null distribution (algorithm AS R94, complete samples).

use serde::{Deserialize, Serialize};

use super::{check_finite, normal_quantile, normal_sf, StatsError};

const MAX_N: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p_value: f64,
}

/// Polynomial with ascending coefficients.
fn poly(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

/// Lower-half coefficients `a_1 >= a_2 >= ... > 0`; the full vector is
/// antisymmetric around the middle.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an = n as f64;
    let m: Vec<f64> = (1..=half).map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25))).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let first_scaled = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    let (start, fac) = first_scaled;
    for i in start..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro-Wilk statistic and p-value for H0 "the sample is normal".
///
/// Valid for 3 <= n <= 5000.
pub fn shapiro_wilk(sample: &[f64]) -> Result<ShapiroWilk, StatsError> {
    let n = sample.len();
    if n < 3 {
        return Err(StatsError::TooFewValues { n, min: 3 });
    }
    if n > MAX_N {
        return Err(StatsError::TooManyValues { n, max: MAX_N });
    }
    check_finite(sample)?;
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range == 0.0 {
        return Err(StatsError::DegenerateSample);
    }

    let half = coefficients(n);
    // Full coefficient vector, antisymmetric: -a_i on the low side.
    let full: Vec<f64> = (0..n)
        .map(|i| {
            let mirror = n - 1 - i;
            if i < mirror {
                -half[i]
            } else if i > mirror {
                half[mirror]
            } else {
                0.0
            }
        })
        .collect();

    // W is the squared correlation between the coefficients and the ordered
    // sample, computed on range-scaled data as 1 - W to keep precision near 1.
    let an = n as f64;
    let scaled: Vec<f64> = x.iter().map(|v| v / range).collect();
    let mean_x = scaled.iter().sum::<f64>() / an;
    let mean_a = full.iter().sum::<f64>() / an;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (a, v) in full.iter().zip(&scaled) {
        let (da, dx) = (a - mean_a, v - mean_x);
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    if n == 3 {
        // Exact null distribution for n = 3; W >= 0.75 always.
        let w = w.max(0.75);
        let p = 1.0 - 6.0 / std::f64::consts::PI * w.sqrt().min(1.0).acos();
        return Ok(ShapiroWilk { w, p_value: p.clamp(0.0, 1.0) });
    }

    let y = w1.ln();
    let (z_arg, m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return Ok(ShapiroWilk { w, p_value: 1e-19 });
        }
        (-(gamma - y).ln(), poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    let p = normal_sf((z_arg - m) / s);
    Ok(ShapiroWilk { w, p_value: p.clamp(0.0, 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_and_degenerate() {
        assert_eq!(shapiro_wilk(&[1.0, 2.0]), Err(StatsError::TooFewValues { n: 2, min: 3 }));
        assert_eq!(shapiro_wilk(&[4.0; 5]), Err(StatsError::DegenerateSample));
        assert_eq!(shapiro_wilk(&[1.0, f64::INFINITY, 2.0]), Err(StatsError::NonFinite));
        assert!(matches!(shapiro_wilk(&vec![1.0; 5001]), Err(StatsError::TooManyValues { .. })));
    }

    #[test]
    fn coefficients_are_normalized() {
        for n in [4, 5, 6, 11, 24, 100] {
            let a = coefficients(n);
            let ss: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((ss - 1.0).abs() < 1e-3, "n={n} sum of squares {ss}");
            assert!(a.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn three_point_sample() {
        // Reference: W = 0.923076923, p = 0.463262875.
        let r = shapiro_wilk(&[1.0, 2.5, 7.0]).unwrap();
        assert!((r.w - 0.923076923076923).abs() < 1e-9);
        assert!((r.p_value - 0.46326287493379903).abs() < 1e-6);
        let equal = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
        assert!((equal.w - 1.0).abs() < 1e-12);
        assert!((equal.p_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn poly_is_ascending() {
        assert_eq!(poly(&[1.0, 2.0, 3.0], 2.0), 1.0 + 4.0 + 12.0);
    }
}

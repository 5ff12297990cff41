//! Power-law regression in log2-log2 coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares fit of `log2 y = c + sum_k e_k log2 x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    /// One entry per input axis; `None` when the axis never varies.
    pub exponents: Vec<Option<f64>>,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `y ~ 2^c * prod x_k^{e_k}`. Each row of `x` holds one observation's axis values.
///
/// Axes that are constant over the data are reported as absent. A design that is still
/// rank deficient after that, or has no more points than unknowns, is rejected.
pub fn power_law_fit(x: &[Vec<f64>], y: &[f64]) -> Result<ExponentFit> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::DegenerateDesign(format!(
            "{} rows of parameters for {} values",
            x.len(),
            y.len()
        )));
    }
    let axes = x[0].len();
    if x.iter().any(|row| row.len() != axes) {
        return Err(Error::DegenerateDesign("ragged parameter rows".into()));
    }
    if x.iter().flatten().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateDesign(
            "power-law fit needs positive finite data".into(),
        ));
    }
    let varied: Vec<usize> = (0..axes)
        .filter(|&k| x.iter().any(|row| row[k] != x[0][k]))
        .collect();
    let m = y.len();
    let cols = varied.len() + 1;
    if m < cols || (m == cols && !varied.is_empty()) {
        return Err(Error::DegenerateDesign(format!(
            "{m} points cannot determine {cols} coefficients with a residual"
        )));
    }
    let design = DMatrix::from_fn(m, cols, |i, j| {
        if j == 0 {
            1.0
        } else {
            x[i][varied[j - 1]].log2()
        }
    });
    let rhs = DVector::from_iterator(m, y.iter().map(|v| v.log2()));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-10 * smax {
        return Err(Error::DegenerateDesign(
            "collinear parameter axes".into(),
        ));
    }
    let coef = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::DegenerateDesign(e.to_string()))?;
    let fitted = &design * &coef;
    let mean = rhs.mean();
    let ss_tot: f64 = rhs.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = rhs.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let r_squared = if ss_tot <= 1e-300 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    let mut exponents = vec![None; axes];
    for (j, &k) in varied.iter().enumerate() {
        exponents[k] = Some(coef[j + 1]);
    }
    Ok(ExponentFit {
        exponents,
        intercept: coef[0],
        r_squared,
    })
}

/// One-axis convenience wrapper.
pub fn power_law_fit_1d(x: &[f64], y: &[f64]) -> Result<ExponentFit> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    power_law_fit(&rows, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_two_axis_power_law() {
        let mut x = vec![];
        let mut y = vec![];
        for n in [1.0, 2.0, 4.0, 8.0] {
            for l in [1.0, 2.0, 4.0] {
                x.push(vec![n, l]);
                y.push(3.0 * f64::powf(n, 2.0) * l);
            }
        }
        let fit = power_law_fit(&x, &y).unwrap();
        assert!((fit.exponents[0].unwrap() - 2.0).abs() < 1e-9);
        assert!((fit.exponents[1].unwrap() - 1.0).abs() < 1e-9);
        assert!((fit.intercept - 3f64.log2()).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fractional_exponents() {
        let mut x = vec![];
        let mut y = vec![];
        for n in [1.0f64, 2.0, 4.0, 8.0] {
            for l in [1.0f64, 4.0, 16.0] {
                x.push(vec![n, l]);
                y.push(n.powf(0.75) * l.sqrt());
            }
        }
        let fit = power_law_fit(&x, &y).unwrap();
        assert!((fit.exponents[0].unwrap() - 0.75).abs() < 1e-9);
        assert!((fit.exponents[1].unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn constant_series_has_zero_exponent() {
        let fit = power_law_fit_1d(&[1.0, 2.0, 4.0], &[5.0, 5.0, 5.0]).unwrap();
        assert!(fit.exponents[0].unwrap().abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn single_value_axis_is_absent() {
        let x = vec![vec![4.0, 1.0], vec![4.0, 2.0], vec![4.0, 4.0]];
        let fit = power_law_fit(&x, &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(fit.exponents[0], None);
        assert!((fit.exponents[1].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_axes_are_rejected() {
        let x = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![4.0, 4.0], vec![8.0, 8.0]];
        assert!(matches!(
            power_law_fit(&x, &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::DegenerateDesign(_))
        ));
        assert!(power_law_fit_1d(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(power_law_fit_1d(&[1.0, 2.0, 4.0], &[1.0, 0.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn r_squared_in_unit_interval(noise in prop::collection::vec(0.5f64..2.0, 4)) {
            let x = [1.0, 2.0, 4.0, 8.0];
            let y: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a * b).collect();
            let fit = power_law_fit_1d(&x, &y).unwrap();
            prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        }
    }
}

//! Ordinary least squares with the diagnostics a study report needs:
//! coefficient table (SE / t / two-sided p), R² and adjusted R², the
//! overall F test, Durbin–Watson, Jarque–Bera with residual skew and
//! kurtosis, and the design condition number.
//!
//! The solver is column-pivoted QR (see [`crate::linalg`]); p-values come
//! from the in-crate t and F distributions so a fit is reproducible
//! bit-for-bit across platforms. Two-sided p-values below 1e-300 are
//! reported as exactly 0.

use serde::Serialize;

use crate::dist::{chi2_sf, f_sf, t_cdf};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_colpiv_qr, sym_eigenvalues};
use crate::stats::{kurtosis, skewness};

/// Relative pivot tolerance below which the design is declared singular.
const PIVOT_TOL: f64 = 1e-10;

/// Two-sided p-values smaller than this are flushed to exactly zero.
const P_FLOOR: f64 = 1e-300;

/// A fitted model plus its diagnostics. Coefficient vectors are ordered
/// intercept first (when one was added), then the regressors as given.
#[derive(Debug, Clone, Serialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub f_p_value: f64,
    pub durbin_watson: f64,
    pub jarque_bera: f64,
    pub jb_p_value: f64,
    pub residual_skew: f64,
    pub residual_kurtosis: f64,
    pub condition_number: f64,
    pub n_obs: usize,
    pub df_resid: usize,
    pub df_model: usize,
    pub has_intercept: bool,
}

/// Fit y on the given regressor columns, optionally prepending a column
/// of ones.
///
/// Fails when the system is underdetermined (needs `n > K + 1` with an
/// intercept), when the design is numerically singular, when the response
/// is constant (R² undefined), or when the fit is exact (zero-variance
/// residuals leave the normality diagnostics undefined).
pub fn fit_ols(y: &[f64], regressors: &[Vec<f64>], add_constant: bool) -> Result<OlsFit> {
    let n = y.len();
    let kx = regressors.len();
    if kx == 0 {
        return Err(Error::domain("regression needs at least one regressor"));
    }
    if regressors.iter().any(|c| c.len() != n) {
        return Err(Error::domain(
            "every regressor must have one value per observation",
        ));
    }
    let k_total = kx + usize::from(add_constant);
    if n < k_total + 1 {
        return Err(Error::domain(format!(
            "regression needs more observations than parameters: n = {n}, parameters = {k_total}"
        )));
    }

    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k_total);
    if add_constant {
        cols.push(vec![1.0; n]);
    }
    cols.extend(regressors.iter().cloned());

    let solved = lstsq_colpiv_qr(&cols, y, PIVOT_TOL)?;
    let beta = solved.beta;

    let mut resid = y.to_vec();
    for (j, col) in cols.iter().enumerate() {
        for (r, x) in resid.iter_mut().zip(col) {
            *r -= beta[j] * x;
        }
    }
    let sse: f64 = resid.iter().map(|e| e * e).sum();

    // Centered total sum of squares with an intercept, uncentered without.
    let sst = if add_constant {
        let ybar = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - ybar) * (v - ybar)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    if sst <= 0.0 {
        return Err(Error::domain(
            "response has zero variance; goodness of fit is undefined",
        ));
    }
    let r_squared = 1.0 - sse / sst;

    let df_resid = n - k_total;
    let df_model = kx;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / df_resid as f64;

    let sigma2 = sse / df_resid as f64;
    let mut std_errors = Vec::with_capacity(k_total);
    let mut t_values = Vec::with_capacity(k_total);
    let mut p_values = Vec::with_capacity(k_total);
    // Index form: each pass reads the j-th diagonal of one matrix and the
    // j-th slot of another.
    #[allow(clippy::needless_range_loop)]
    for j in 0..k_total {
        let se = (sigma2 * solved.xtx_inv[j][j]).sqrt();
        let t = if se > 0.0 {
            beta[j] / se
        } else if beta[j] == 0.0 {
            0.0
        } else {
            f64::INFINITY * beta[j].signum()
        };
        let p = floor_p(2.0 * t_cdf(-t.abs(), df_resid as f64)?);
        std_errors.push(se);
        t_values.push(t);
        p_values.push(p);
    }

    let (f_statistic, f_p_value) = if r_squared >= 1.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (r_squared / df_model as f64) / ((1.0 - r_squared) / df_resid as f64);
        (f, floor_p(f_sf(f, df_model as f64, df_resid as f64)?))
    };

    let durbin = durbin_watson(&resid)?;
    let (jb, jb_p) = jarque_bera(&resid)?;
    let residual_skew = skewness(&resid)?;
    let residual_kurtosis = kurtosis(&resid)?;
    let condition_number = condition_number(&cols)?;

    Ok(OlsFit {
        coefficients: beta,
        std_errors,
        t_values,
        p_values,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_p_value,
        durbin_watson: durbin,
        jarque_bera: jb,
        jb_p_value: jb_p,
        residual_skew,
        residual_kurtosis,
        condition_number,
        n_obs: n,
        df_resid,
        df_model,
        has_intercept: add_constant,
    })
}

fn floor_p(p: f64) -> f64 {
    if p < P_FLOOR {
        0.0
    } else {
        p
    }
}

/// Durbin–Watson first-order autocorrelation statistic,
/// Σ(eᵢ − eᵢ₋₁)² / Σeᵢ², always in [0, 4].
pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::domain("Durbin-Watson needs at least 2 residuals"));
    }
    let denom: f64 = residuals.iter().map(|e| e * e).sum();
    if denom <= 0.0 {
        return Err(Error::domain(
            "Durbin-Watson is undefined for all-zero residuals",
        ));
    }
    let num: f64 = residuals
        .windows(2)
        .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
        .sum();
    Ok(num / denom)
}

/// Jarque–Bera normality statistic and its χ²(2) upper-tail p-value:
/// JB = n/6 · (S² + (K − 3)²/4) with population skew S and Pearson
/// kurtosis K.
pub fn jarque_bera(residuals: &[f64]) -> Result<(f64, f64)> {
    let n = residuals.len();
    if n < 4 {
        return Err(Error::domain("Jarque-Bera needs at least 4 residuals"));
    }
    let s = skewness(residuals)?;
    let k = kurtosis(residuals)?;
    let jb = n as f64 / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0);
    let p = chi2_sf(jb, 2.0)?;
    Ok((jb, p))
}

/// √(λmax/λmin) of XᵀX — equivalently the ratio of extreme singular
/// values of the design itself.
fn condition_number(cols: &[Vec<f64>]) -> Result<f64> {
    let k = cols.len();
    let mut gram = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }
    let eig = sym_eigenvalues(&gram);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Singular(
            "design Gram matrix is not positive definite".into(),
        ));
    }
    Ok((max / min).sqrt())
}

/// Render a fixed-width text summary of a fit. `term_names` must have one
/// entry per coefficient (intercept included when present).
pub fn summary_text(fit: &OlsFit, term_names: &[&str]) -> String {
    assert_eq!(
        term_names.len(),
        fit.coefficients.len(),
        "one name per coefficient"
    );
    let rule = "=".repeat(78);
    let thin = "-".repeat(78);
    let mut out = String::new();
    out.push_str(&format!("{:^78}\n", "OLS Regression Results"));
    out.push_str(&rule);
    out.push('\n');
    out.push_str(&format!(
        "{:<24}{:>14}   {:<22}{:>15.6}\n",
        "No. observations:", fit.n_obs, "R-squared:", fit.r_squared
    ));
    out.push_str(&format!(
        "{:<24}{:>14}   {:<22}{:>15.6}\n",
        "Df residuals:", fit.df_resid, "Adj. R-squared:", fit.adj_r_squared
    ));
    out.push_str(&format!(
        "{:<24}{:>14}   {:<22}{:>15.4}\n",
        "Df model:", fit.df_model, "F-statistic:", fit.f_statistic
    ));
    out.push_str(&format!(
        "{:<24}{:>14}   {:<22}{:>15.6e}\n",
        "", "", "Prob (F-statistic):", fit.f_p_value
    ));
    out.push_str(&thin);
    out.push('\n');
    out.push_str(&format!(
        "{:<14}{:>14}{:>14}{:>12}{:>12}\n",
        "term", "coef", "std err", "t", "P>|t|"
    ));
    out.push_str(&thin);
    out.push('\n');
    for (j, name) in term_names.iter().enumerate() {
        out.push_str(&format!(
            "{:<14}{:>14.6}{:>14.6}{:>12.4}{:>12.6}\n",
            name, fit.coefficients[j], fit.std_errors[j], fit.t_values[j], fit.p_values[j]
        ));
    }
    out.push_str(&thin);
    out.push('\n');
    out.push_str(&format!(
        "{:<18}{:>12.4}   {:<18}{:>12.4}\n",
        "Durbin-Watson:", fit.durbin_watson, "Jarque-Bera:", fit.jarque_bera
    ));
    out.push_str(&format!(
        "{:<18}{:>12.4}   {:<18}{:>12.6}\n",
        "Skew:", fit.residual_skew, "Prob (JB):", fit.jb_p_value
    ));
    out.push_str(&format!(
        "{:<18}{:>12.4}   {:<18}{:>12.4}\n",
        "Kurtosis:", fit.residual_kurtosis, "Cond. No.:", fit.condition_number
    ));
    out.push_str(&rule);
    out.push('\n');
    out
}

//! Closed-form bounds on the clique number under the random-instance model.
//!
//! All logarithms are natural. Functions take their constants explicitly so
//! that curves can be evaluated for hypothetical `(L, gamma, eps)`.

use std::f64::consts::{E, LN_2, LOG2_E};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default exponent constant `c = 1 / ln 2`.
pub const DEFAULT_C: f64 = LOG2_E;

/// Smallest `n` accepted by the asymptotic curves.
pub const MIN_N: u64 = 16;

/// Model constants and the derived edge-probability constant
/// `alpha = max(1, 8 L (1 + gamma) / eps)`, so that `p_n <= alpha / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub lipschitz: f64,
    pub gamma: f64,
    pub eps: f64,
    pub alpha: f64,
}

impl BoundParams {
    pub fn new(lipschitz: f64, gamma: f64, eps: f64) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::domain(format!(
                "L must be positive, got {lipschitz}"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::domain(format!(
                "gamma must be nonnegative, got {gamma}"
            )));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::domain(format!("eps must lie in (0, 1], got {eps}")));
        }
        Ok(BoundParams {
            lipschitz,
            gamma,
            eps,
            alpha: alpha(lipschitz, gamma, eps),
        })
    }
}

pub fn alpha(lipschitz: f64, gamma: f64, eps: f64) -> f64 {
    (8.0 * lipschitz * (1.0 + gamma) / eps).max(1.0)
}

/// `H(xi) = 1 - xi + xi ln xi`.
pub fn entropy_h(xi: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::domain(format!("H(xi) needs xi > 0, got {xi}")));
    }
    Ok(1.0 - xi + xi * xi.ln())
}

/// Chernoff-type bound `Pr[Bin(n, p) >= kappa] <= exp(-np H(kappa / np))`,
/// valid for `kappa >= np`.
pub fn binomial_tail_bound(n: u64, p: f64, kappa: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let np = n as f64 * p;
    if !(kappa >= np) {
        return Err(Error::domain(format!("kappa = {kappa} is below np = {np}")));
    }
    Ok((-np * entropy_h(kappa / np)?).exp())
}

fn check_n(n: u64) -> Result<f64> {
    if n < MIN_N {
        Err(Error::domain(format!(
            "n must be at least {MIN_N}, got {n}"
        )))
    } else {
        Ok(n as f64)
    }
}

/// `k_n = c ln n / ln ln n` with `c = 1 / ln 2`.
pub fn k_n(n: u64) -> Result<f64> {
    let n = check_n(n)?;
    Ok(DEFAULT_C * n.ln() / n.ln().ln())
}

/// `1 + 2 n^(1 / ln ln n)`.
pub fn expected_two_omega_bound(n: u64) -> Result<f64> {
    let n = check_n(n)?;
    Ok(1.0 + 2.0 * (n.ln() / n.ln().ln()).exp())
}

/// `(3/2)(1 + ln n / ln ln n)`.
pub fn expected_omega_bound(n: u64) -> Result<f64> {
    let n = check_n(n)?;
    Ok(1.5 * (1.0 + n.ln() / n.ln().ln()))
}

/// `exp(-n ln ln n)`.
pub fn tail_omega_bound(n: u64) -> Result<f64> {
    let n = check_n(n)?;
    Ok((-n * n.ln().ln()).exp())
}

/// Natural logarithms of the two closed forms of `u_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UEllLog {
    /// `ln[2 * 2^l * n * exp(-beta H(l / beta))]` with `beta = alpha (n-1)/n`.
    pub entropy_form: f64,
    /// `ln[2n e^(-beta) (2 e beta / l)^l]`.
    pub product_form: f64,
}

impl UEllLog {
    /// Relative gap `|u_entropy / u_product - 1|`, or `None` when `u_l` is
    /// below the normal `f64` range and both forms evaluate to (nearly) zero.
    pub fn relative_gap(&self) -> Option<f64> {
        if self.entropy_form.max(self.product_form) < f64::MIN_POSITIVE.ln() {
            None
        } else {
            Some((self.entropy_form - self.product_form).exp_m1().abs())
        }
    }
}

/// Tolerance on the relative gap between the two forms of `u_l`.
pub const U_ELL_AGREEMENT: f64 = 1e-10;

pub fn u_ell_log(n: u64, alpha: f64, ell: u64) -> Result<UEllLog> {
    if n < 2 {
        return Err(Error::domain(format!("u_l needs n >= 2, got {n}")));
    }
    if ell == 0 {
        return Err(Error::domain("u_l needs l >= 1"));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
    }
    let nf = n as f64;
    let l = ell as f64;
    let beta = alpha * (nf - 1.0) / nf;
    if l / beta < 1.0 {
        return Err(Error::domain(format!(
            "u_l needs l n / (alpha (n-1)) >= 1 (l = {ell}, alpha = {alpha}, n = {n})"
        )));
    }
    let entropy_form = LN_2 + l * LN_2 + nf.ln() - beta * entropy_h(l / beta)?;
    let product_form = (2.0 * nf).ln() - beta + l * (2.0 * E * beta / l).ln();
    Ok(UEllLog {
        entropy_form,
        product_form,
    })
}

/// `u_l = 2n e^(-alpha (n-1)/n) (2 e alpha (n-1) / (l n))^l`, after checking
/// that it agrees with the entropy form to [`U_ELL_AGREEMENT`].
pub fn u_ell(n: u64, alpha: f64, ell: u64) -> Result<f64> {
    let u = u_ell_log(n, alpha, ell)?;
    if let Some(gap) = u.relative_gap() {
        if gap > U_ELL_AGREEMENT {
            return Err(Error::domain(format!(
                "u_l closed forms disagree by {gap:e} at n = {n}, alpha = {alpha}, l = {ell}"
            )));
        }
    }
    Ok(u.product_form.exp())
}

/// `zeta_n = n^(1-c) n^(c (K + ln ln ln n) / ln ln n)` with `K = ln(8 alpha / c)`.
pub fn zeta_n(n: u64, alpha: f64, c: f64) -> Result<f64> {
    let n = check_n(n)?;
    zeta_n_from_ln(n.ln(), alpha, c)
}

/// [`zeta_n`] parameterised by `ln n`, for sizes beyond `u64`.
pub fn zeta_n_from_ln(ln_n: f64, alpha: f64, c: f64) -> Result<f64> {
    Ok((zeta_exponent(ln_n, alpha, c)? * ln_n).exp())
}

/// `ln zeta_n / ln n`.
pub fn zeta_exponent(ln_n: f64, alpha: f64, c: f64) -> Result<f64> {
    if !(ln_n >= (MIN_N as f64).ln()) {
        return Err(Error::domain(format!("ln n = {ln_n} is below ln {MIN_N}")));
    }
    if !(c > 0.0) {
        return Err(Error::domain(format!("c must be positive, got {c}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
    }
    let k = zeta_k(alpha, c);
    let lln = ln_n.ln();
    Ok((1.0 - c) + c * (k + lln.ln()) / lln)
}

/// `K = ln(8 alpha / c)`.
pub fn zeta_k(alpha: f64, c: f64) -> f64 {
    (8.0 * alpha / c).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_h(1.0).unwrap(), 0.0);
        assert!((entropy_h(E).unwrap() - 1.0).abs() <= 1e-15);
        assert!((entropy_h(2.0).unwrap() - 0.386_294_361_119_890_6).abs() < 1e-15);
        assert!(entropy_h(0.0).is_err());
        assert!(entropy_h(-1.0).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(BoundParams::new(1.0, 2.0, 1.0).unwrap().alpha, 24.0);
        assert_eq!(BoundParams::new(0.01, 0.0, 1.0).unwrap().alpha, 1.0);
        assert!(BoundParams::new(1.0, 2.0, 1.5).is_err());
        assert!(BoundParams::new(0.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_tail_bound(100, 0.01, 1.0).unwrap(), 1.0);
        // exp(-(1 - 5 + 5 ln 5))
        let b = binomial_tail_bound(100, 0.01, 5.0).unwrap();
        assert!(close(b, (-(1.0 - 5.0 + 5.0 * 5f64.ln())).exp(), 1e-12));
        assert!(close(b, 0.017_48, 1e-3));
        assert!(binomial_tail_bound(100, 0.01, 0.5).is_err());
        assert!(binomial_tail_bound(100, 1.0, 200.0).is_err());
    }

    #[test]
    fn curve_examples() {
        assert!(close(k_n(16).unwrap(), 3.923, 1e-3));
        assert!(close(
            expected_two_omega_bound(10_000).unwrap(),
            127.6,
            1e-3
        ));
        assert!(close(expected_omega_bound(1_000).unwrap(), 6.86, 1e-3));
        assert!(close(expected_omega_bound(10_000).unwrap(), 7.72, 1e-3));
        assert!(close(expected_omega_bound(1_000_000).unwrap(), 9.39, 1e-3));
        assert!(close(tail_omega_bound(16).unwrap(), 8.2e-8, 1e-2));
        assert!(close(tail_omega_bound(100).unwrap(), 4.736e-67, 1e-3));
        for f in [
            k_n,
            expected_two_omega_bound,
            expected_omega_bound,
            tail_omega_bound,
            |n| zeta_n(n, 2.0, DEFAULT_C),
        ] {
            assert!(f(15).is_err());
        }
    }

    #[test]
    fn curves_are_monotone() {
        let grid: Vec<u64> = (0..200).map(|k| 16 + k * k * 97).collect();
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            assert!(k_n(a).unwrap() < k_n(b).unwrap());
            assert!(expected_two_omega_bound(a).unwrap() < expected_two_omega_bound(b).unwrap());
            assert!(expected_omega_bound(a).unwrap() < expected_omega_bound(b).unwrap());
            assert!(tail_omega_bound(a).unwrap() >= tail_omega_bound(b).unwrap());
        }
        let ratio = |n: u64| k_n(n).unwrap() / (n as f64).ln();
        assert!(ratio(1_000) > ratio(1_000_000));
        assert!(ratio(1_000_000) > ratio(1_000_000_000));
    }

    #[test]
    fn tail_decays_faster_than_exponential() {
        // ln of tail / e^-n = -n (ln ln n - 1)
        let r = |n: u64| -(n as f64) * ((n as f64).ln().ln() - 1.0);
        assert!(r(100) > r(1_000));
        assert!(r(1_000) > r(10_000));
        assert!(r(10_000) < -10_000.0);
    }

    #[test]
    fn u_ell_forms_agree() {
        let u = u_ell_log(100, 2.0, 10).unwrap();
        assert!(u.relative_gap().unwrap() <= U_ELL_AGREEMENT);
        // far out both forms underflow together
        let far = u_ell_log(100_000, 1.0, 90_000).unwrap();
        assert!(far.relative_gap().is_none());
        assert_eq!(u_ell(100_000, 1.0, 90_000).unwrap(), 0.0);
        let v = u_ell(100, 2.0, 10).unwrap();
        // 2n e^(-beta) (2 e beta / l)^l with beta = 1.98
        let beta = 1.98f64;
        let direct = 200.0 * (-beta).exp() * (2.0 * E * beta / 10.0).powi(10);
        assert!(close(v, direct, 1e-12));
        assert!(u_ell(100, 2.0, 1).is_err());
        assert!(u_ell(1, 2.0, 10).is_err());
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_k(3.0, 24.0), 0.0);
        assert!((DEFAULT_C - 1.0 / LN_2).abs() < 1e-15);
        // With c = 8 alpha (K = 0) the exponent is negative already at n = 1e6.
        let e = zeta_exponent((1e6f64).ln(), 2.0, 16.0).unwrap();
        assert!(e < -9.0 && e > -9.2, "{e}");
        assert!(zeta_n(1_000_000, 2.0, 16.0).unwrap() < 1e-50);
        assert!(zeta_n(16, 0.5, DEFAULT_C).is_err());
    }

    #[test]
    fn zeta_eventually_decreases_to_zero() {
        // For c = 1/ln 2 the turnover happens at astronomically large n, so
        // the grid is in ln n.
        let alpha = 2.0;
        let grid: Vec<f64> = (0..60).map(|k| (2.0 + k as f64 * 0.5).exp()).collect();
        let z: Vec<f64> = grid
            .iter()
            .map(|&ln_n| zeta_exponent(ln_n, alpha, DEFAULT_C).unwrap() * ln_n)
            .collect();
        let peak = z
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(peak > 0 && peak + 10 < z.len());
        assert!(z[peak..].windows(2).all(|w| w[1] < w[0]));
        assert!(z.last().unwrap() < &-1e6);
        assert_eq!(
            zeta_n_from_ln(*grid.last().unwrap(), alpha, DEFAULT_C).unwrap(),
            0.0
        );
    }
}

use crate::error::{ensure, Result};

fn check(beta: f64, lambda: f64, q: f64) -> Result<()> {
    ensure!(beta.is_finite() && beta > 0.0, "β must be finite and positive, got {beta}");
    ensure!(lambda.is_finite() && lambda >= 0.0, "λ must be finite and nonnegative, got {lambda}");
    ensure!(q.is_finite() && q >= 1.0, "q must be at least 1, got {q}");
    Ok(())
}

/// `F(β, λ) = λ [2(1 - e^{-β}) - β e^{-β}]`, the mean family size of the
/// unweighted model.
pub fn f(beta: f64, lambda: f64) -> Result<f64> {
    check(beta, lambda, 1.0)?;
    Ok(lambda * (2.0 * -(-beta).exp_m1() - beta * (-beta).exp()))
}

/// `F_q(β, λ) = (λ/q²) (2e^{βq} - 2 + βq(q - 2)) / (e^{βq} + q - 1)`.
pub fn fq(beta: f64, lambda: f64, q: f64) -> Result<f64> {
    check(beta, lambda, q)?;
    Ok(lambda / (q * q) * fq_ratio(beta, q))
}

/// `(2e^{βq} - 2 + βq(q - 2)) / (e^{βq} + q - 1)`, evaluated with the
/// exponential factored out so large `βq` does not overflow.
fn fq_ratio(beta: f64, q: f64) -> f64 {
    let bq = beta * q;
    let s = (-bq).exp();
    (2.0 - 2.0 * s + bq * (q - 2.0) * s) / (1.0 + (q - 1.0) * s)
}

/// Critical bridge rate of the mean-field model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub value: f64,
    /// Whether the formula is only conjectured for this `q` (it is exact
    /// for `q ∈ {1, 2}`).
    pub conjectured: bool,
}

/// `λ_c(q) = q² (e^{βq} + q - 1) / (2e^{βq} - 2 + βq(q - 2))`, the root of
/// `F_q(β, λ) = 1`.
pub fn lambda_c(beta: f64, q: f64) -> Result<CriticalValue> {
    check(beta, 0.0, q)?;
    Ok(CriticalValue { value: q * q / fq_ratio(beta, q), conjectured: q != 1.0 && q != 2.0 })
}

/// `Z = (q - 1) e^{-β} + e^{β(q - 1)}`.
pub fn cut_count_normaliser(beta: f64, q: f64) -> Result<f64> {
    check(beta, 0.0, q)?;
    Ok((q - 1.0) * (-beta).exp() + (beta * (q - 1.0)).exp())
}

/// `P(D = k) = e^{-β} q^{max(k,1)} β^k / (k! Z)`, the law of the number of
/// cuts on one line of the `q`-weighted model.
pub fn cut_count_pmf(k: usize, beta: f64, q: f64) -> Result<f64> {
    let z = cut_count_normaliser(beta, q)?;
    let kf = k as f64;
    let log = -beta + kf.max(1.0) * q.ln() + kf * beta.ln() - ln_factorial(k) - z.ln();
    Ok(log.exp())
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

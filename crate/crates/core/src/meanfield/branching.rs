use rand::Rng;
use serde::Serialize;

use super::formulas::{cut_count_normaliser, cut_count_pmf};
use crate::error::{ensure, Error, Result};
use crate::spacetime::sampling::poisson_count;

/// Number of cuts on one line of the `q`-weighted model, by inversion.
pub fn sample_cut_count<R: Rng + ?Sized>(beta: f64, q: f64, rng: &mut R) -> Result<usize> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for k in 0.. {
        let p = cut_count_pmf(k, beta, q)?;
        acc += p;
        // the tail beyond a vanishing term is below rounding
        if u < acc || (p < 1e-300 && k as f64 > beta * q) {
            return Ok(k);
        }
    }
    unreachable!()
}

/// Length of the maximal cut-free arc containing a fixed point of the
/// circle `[0, β)` under the `q`-weighted cut law.
pub fn sample_weighted_interval<R: Rng + ?Sized>(beta: f64, q: f64, rng: &mut R) -> Result<f64> {
    let d = sample_cut_count(beta, q, rng)?;
    if d <= 1 {
        return Ok(beta);
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..d {
        let u = rng.random::<f64>() * beta;
        lo = lo.min(u);
        hi = hi.max(u);
    }
    Ok(lo + (beta - hi))
}

/// The law of the weighted interval: density
/// `(q² e^{-β} / Z) L e^{q(β - L)}` on `(0, β)` and an atom of mass
/// `q(1 + β) e^{-β} / Z` at `β`.
#[derive(Debug, Clone, Copy)]
pub struct IntervalLaw {
    pub beta: f64,
    pub q: f64,
    z: f64,
}

impl IntervalLaw {
    pub fn new(beta: f64, q: f64) -> Result<Self> {
        Ok(IntervalLaw { beta, q, z: cut_count_normaliser(beta, q)? })
    }

    pub fn density(&self, l: f64) -> f64 {
        if l <= 0.0 || l >= self.beta {
            return 0.0;
        }
        self.q * self.q * l * (self.q * (self.beta - l) - self.beta).exp() / self.z
    }

    pub fn atom(&self) -> f64 {
        self.q * (1.0 + self.beta) * (-self.beta).exp() / self.z
    }

    /// `E g(|I|)` by composite Simpson quadrature with `2^14` panels.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        let nodes = Quadrature::new(self);
        nodes.expect(g)
    }

    pub fn mean(&self) -> f64 {
        self.expect(|l| l)
    }
}

/// Simpson nodes and weights, including the atom.
struct Quadrature {
    points: Vec<f64>,
    weights: Vec<f64>,
}

const PANELS: usize = 1 << 14;

impl Quadrature {
    fn new(law: &IntervalLaw) -> Self {
        let h = law.beta / PANELS as f64;
        let mut points = Vec::with_capacity(PANELS + 2);
        let mut weights = Vec::with_capacity(PANELS + 2);
        for i in 0..=PANELS {
            let x = i as f64 * h;
            let c = if i == 0 || i == PANELS {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let dens = if i == PANELS { law.q * law.q * x * (-law.beta).exp() / law.z } else { law.density(x) };
            points.push(x);
            weights.push(c * h / 3.0 * dens);
        }
        points.push(law.beta);
        weights.push(law.atom());
        Quadrature { points, weights }
    }

    fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Offspring intensity per unit interval length in the approximating
/// branching process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OffspringRate {
    /// Rate `λ`: the upper bounding process of the weighted model.
    Upper,
    /// Rate `λ/q`: the product random-cluster model.
    Product,
}

impl OffspringRate {
    pub fn rate(self, lambda: f64, q: f64) -> f64 {
        match self {
            OffspringRate::Upper => lambda,
            OffspringRate::Product => lambda / q,
        }
    }
}

/// Mean family size `r E|I|`.
pub fn mean_offspring(beta: f64, lambda: f64, q: f64, rate: OffspringRate) -> Result<f64> {
    Ok(rate.rate(lambda, q) * IntervalLaw::new(beta, q)?.mean())
}

const MAX_ITERATIONS: usize = 10_000;
const TOLERANCE: f64 = 1e-12;

/// Damped iteration of `π ↦ 1 - E exp(-r |I| π)` from `start`.
pub fn survival_fixed_point(beta: f64, lambda: f64, q: f64, rate: OffspringRate, start: f64) -> Result<f64> {
    ensure!((0.0..=1.0).contains(&start), "start must lie in [0, 1]");
    ensure!(lambda.is_finite() && lambda >= 0.0, "λ must be finite and nonnegative");
    let law = IntervalLaw::new(beta, q)?;
    let r = rate.rate(lambda, q);
    let quad = Quadrature::new(&law);
    let mut pi = start;
    for _ in 0..MAX_ITERATIONS {
        let next = 0.5 * pi + 0.5 * (1.0 - quad.expect(|l| (-r * l * pi).exp()));
        if (next - pi).abs() < TOLERANCE {
            return Ok(next);
        }
        pi = next;
    }
    Err(Error::Numeric(format!("survival iteration did not converge in {MAX_ITERATIONS} steps (last value {pi})")))
}

/// Survival probability of the branching process with offspring
/// `Poisson(r |I|)`; zero when the mean family size is at most 1.
pub fn survival_probability(beta: f64, lambda: f64, q: f64, rate: OffspringRate) -> Result<f64> {
    if mean_offspring(beta, lambda, q, rate)? <= 1.0 {
        return Ok(0.0);
    }
    survival_fixed_point(beta, lambda, q, rate, 1.0)
}

/// Population at which a simulated tree counts as surviving.
pub const SURVIVAL_POPULATION: usize = 200;

/// Direct simulation of the branching process generation by generation.
/// A tree survives once a generation reaches [`SURVIVAL_POPULATION`]
/// individuals; the resulting bias is the extinction probability from that
/// size, `(1 - π)^200`.
pub fn simulate_branching<R: Rng + ?Sized>(
    beta: f64,
    lambda: f64,
    q: f64,
    rate: OffspringRate,
    trees: usize,
    rng: &mut R,
) -> Result<usize> {
    let r = rate.rate(lambda, q);
    ensure!(r.is_finite() && r >= 0.0, "offspring rate must be finite and nonnegative");
    let mut survived = 0;
    for _ in 0..trees {
        let mut alive = 1usize;
        while alive > 0 && alive < SURVIVAL_POPULATION {
            let mut next = 0;
            for _ in 0..alive {
                let len = sample_weighted_interval(beta, q, rng)?;
                next += poisson_count(r * len, rng);
            }
            alive = next;
        }
        if alive >= SURVIVAL_POPULATION {
            survived += 1;
        }
    }
    Ok(survived)
}

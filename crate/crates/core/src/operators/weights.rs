//! Product-integration weights for convolutions with Mittag-Leffler type
//! kernels on a uniform grid.
//!
//! A kernel is a sum of terms c·σ^{β−1}·E_{α,β}(w·σ^α). The integrand
//! partner is interpolated linearly on each cell; the cell moments of the
//! kernel are computed in closed form on the first cell (where the kernel is
//! only Hölder continuous or weakly singular) and by 8-point Gauss–Legendre
//! elsewhere. Since the moments only depend on the cell offset m = i − j + 1,
//! one table of 2n numbers serves every target node.

use rayon::prelude::*;

use crate::error::Result;
use crate::special::ml_unchecked;

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// c·σ^{β−1}·E_{α,β}(rate·σ^α)
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MlTerm {
    pub coef: f64,
    pub beta: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MlKernel {
    pub alpha: f64,
    pub terms: Vec<MlTerm>,
}

impl MlKernel {
    /// E_α(−rate·σ^α), the ABC/ABR kernel when rate = α/(1−α).
    pub fn decaying(alpha: f64, rate: f64) -> Self {
        MlKernel {
            alpha,
            terms: vec![MlTerm { coef: 1.0, beta: 1.0, rate: -rate }],
        }
    }

    pub fn value(&self, sigma: f64) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            let e = ml_unchecked(self.alpha, t.beta, t.rate * sigma.powf(self.alpha))?;
            let pw = if t.beta == 1.0 { 1.0 } else { sigma.powf(t.beta - 1.0) };
            acc += t.coef * pw * e;
        }
        Ok(acc)
    }

    /// (∫_0^x k(σ) dσ, ∫_0^x σ k(σ) dσ)
    pub fn moments_from_origin(&self, x: f64) -> Result<(f64, f64)> {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for t in &self.terms {
            let z = t.rate * x.powf(self.alpha);
            let e1 = ml_unchecked(self.alpha, t.beta + 1.0, z)?;
            let e2 = ml_unchecked(self.alpha, t.beta + 2.0, z)?;
            let xb = x.powf(t.beta);
            m0 += t.coef * xb * e1;
            m1 += t.coef * xb * x * (e1 - e2);
        }
        Ok((m0, m1))
    }
}

/// Weights such that (k * φ)(t_i) ≈ Σ_{m=1}^{i} near[m−1]·φ_{i−m+1} + far[m−1]·φ_{i−m}.
#[derive(Debug, Clone)]
pub(crate) struct ConvolutionWeights {
    near: Vec<f64>,
    far: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn build(kernel: &MlKernel, h: f64, cells: usize) -> Result<Self> {
        let pairs: Result<Vec<(f64, f64)>> = (1..=cells)
            .into_par_iter()
            .map(|m| cell_weights(kernel, h, m))
            .collect();
        let (near, far) = pairs?.into_iter().unzip();
        Ok(ConvolutionWeights { near, far })
    }

    pub fn cells(&self) -> usize {
        self.near.len()
    }

    pub fn at(&self, phi: &[f64], i: usize) -> f64 {
        let mut acc = 0.0;
        for m in 1..=i {
            acc += self.near[m - 1] * phi[i - m + 1] + self.far[m - 1] * phi[i - m];
        }
        acc
    }

    /// Convolution at every node 0..phi.len(); node 0 is zero.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        debug_assert!(phi.len() <= self.cells() + 1);
        (0..phi.len()).into_par_iter().map(|i| self.at(phi, i)).collect()
    }
}

fn cell_weights(kernel: &MlKernel, h: f64, m: usize) -> Result<(f64, f64)> {
    if m == 1 {
        let (m0, m1) = kernel.moments_from_origin(h)?;
        return Ok((m0 - m1 / h, m1 / h));
    }
    // σ ∈ [(m−1)h, mh], θ = m − σ/h
    let lo = (m - 1) as f64 * h;
    let half = 0.5 * h;
    let mid = lo + half;
    let mut near = 0.0;
    let mut far = 0.0;
    for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
        for sigma in [mid - half * x, mid + half * x] {
            let k = kernel.value(sigma)?;
            let theta = m as f64 - sigma / h;
            near += w * k * theta;
            far += w * k * (1.0 - theta);
        }
    }
    Ok((near * half, far * half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    #[test]
    fn gauss_legendre_rule_is_exact_to_degree_15() {
        let mut acc = 0.0;
        for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
            acc += w * (x.powi(14) + (-x).powi(14));
        }
        assert!((acc - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn moments_of_pure_power_kernel() {
        // rate 0: k(σ) = σ^{β−1}/Γ(β)
        let beta = 0.6;
        let k = MlKernel {
            alpha: 0.5,
            terms: vec![MlTerm { coef: 1.0, beta, rate: 0.0 }],
        };
        let x: f64 = 0.3;
        let (m0, m1) = k.moments_from_origin(x).unwrap();
        let g = gamma(beta).unwrap();
        assert!((m0 - x.powf(beta) / (beta * g)).abs() < 1e-14);
        assert!((m1 - x.powf(beta + 1.0) / ((beta + 1.0) * g)).abs() < 1e-14);
    }

    #[test]
    fn weights_integrate_linear_functions_exactly_for_power_kernel() {
        // (σ^{-1/2}/Γ(1/2)) * (1 + 2s) at t = 1 equals I^{1/2}(1 + 2s)(1)
        let k = MlKernel {
            alpha: 0.5,
            terms: vec![MlTerm { coef: 1.0, beta: 0.5, rate: 0.0 }],
        };
        let n = 16;
        let h = 1.0 / n as f64;
        let w = ConvolutionWeights::build(&k, h, n).unwrap();
        let phi: Vec<f64> = (0..=n).map(|i| 1.0 + 2.0 * i as f64 * h).collect();
        let got = w.at(&phi, n);
        let exact = 1.0 / gamma(1.5).unwrap() + 2.0 / gamma(2.5).unwrap();
        assert!((got - exact).abs() < 1e-11, "{got} vs {exact}");
    }
}

use serde::{Deserialize, Serialize};

/// Dense real polynomial in the monomial basis, `coeffs[i]` multiplying `x^i`.
///
/// Because the basis is centred at zero, `coeffs[i] = p^(i)(0) / i!`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// Product of the linear factors `(slope_k x + offset_k)`, scaled.
    pub fn from_linear_factors(scale: f64, factors: &[(f64, f64)]) -> Self {
        let mut p = Self::constant(scale);
        for &(slope, offset) in factors {
            p = p.mul(&Self::new(vec![offset, slope]));
        }
        p
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients padded with zeros to exactly `len` entries.
    pub fn coeffs_padded(&self, len: usize) -> Vec<f64> {
        let mut c = self.coeffs.clone();
        c.resize(len.max(c.len()), 0.0);
        c
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `(p(x) - p(0)) / x` evaluated without cancellation.
    pub fn eval_difference_quotient(&self, x: f64) -> f64 {
        self.coeffs[1..].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `p(x) - p(0)`.
    pub fn eval_increment(&self, x: f64) -> f64 {
        x * self.eval_difference_quotient(x)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// `p^(k)(0)`.
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        match self.coeffs.get(k) {
            Some(&c) => c * factorial(k),
            None => 0.0,
        }
    }

    /// Taylor coefficient `p^(k)(0) / k!`; zero above the degree.
    pub fn taylor_at_zero(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

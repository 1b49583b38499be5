//! Temperature coefficient functions for the virial pressure law.
//!
//! The coefficients `B_n(theta)` come from a small closed family so that
//! derivatives up to third order are exact and the validator can reason
//! about asymptotics.

use crate::error::{Error, Result};

/// A coefficient function of temperature with exact derivatives to third order.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientFn {
    /// `B(theta) = c`
    Constant { value: f64 },
    /// `B(theta) = amplitude * theta^exponent`
    Power { amplitude: f64, exponent: f64 },
    /// `B(theta) = amplitude * theta^exponent / (1 + (theta/scale)^damping)`
    ///
    /// `scale` is the saturation temperature, `damping` the decay exponent.
    RationalPower {
        amplitude: f64,
        exponent: f64,
        scale: f64,
        damping: f64,
    },
    /// Finite sum of the above terms.
    Sum(Vec<CoefficientFn>),
}

impl CoefficientFn {
    pub fn constant(value: f64) -> Self {
        CoefficientFn::Constant { value }
    }

    pub fn power(amplitude: f64, exponent: f64) -> Self {
        CoefficientFn::Power {
            amplitude,
            exponent,
        }
    }

    pub fn rational_power(amplitude: f64, exponent: f64, scale: f64, damping: f64) -> Self {
        CoefficientFn::RationalPower {
            amplitude,
            exponent,
            scale,
            damping,
        }
    }

    pub fn zero() -> Self {
        CoefficientFn::Constant { value: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoefficientFn::Constant { value } => *value == 0.0,
            CoefficientFn::Power { amplitude, .. }
            | CoefficientFn::RationalPower { amplitude, .. } => *amplitude == 0.0,
            CoefficientFn::Sum(terms) => terms.iter().all(|t| t.is_zero()),
        }
    }

    /// True when every term is an exact constant.
    pub fn is_constant(&self) -> bool {
        match self {
            CoefficientFn::Constant { .. } => true,
            CoefficientFn::Power { amplitude, exponent } => {
                *amplitude == 0.0 || *exponent == 0.0
            }
            CoefficientFn::RationalPower { amplitude, .. } => *amplitude == 0.0,
            CoefficientFn::Sum(terms) => terms.iter().all(|t| t.is_constant()),
        }
    }

    /// Value of the constant for constant-valued coefficients.
    pub fn constant_value(&self) -> Option<f64> {
        if self.is_constant() {
            Some(self.eval_unchecked(1.0, 0))
        } else {
            None
        }
    }

    /// `d^order B / d theta^order` at `theta`.
    ///
    /// `order` must be at most 3. `theta > 0` is required for `order >= 1`
    /// of kinds with non-integer exponents; see [`CoefficientFn::eval`].
    pub fn eval(&self, theta: f64, order: usize) -> Result<f64> {
        if order > 3 {
            return Err(Error::Domain(format!(
                "coefficient derivatives only available up to order 3, got {order}"
            )));
        }
        if theta < 0.0 {
            return Err(Error::Domain(format!(
                "coefficient functions are defined for theta >= 0, got {theta}"
            )));
        }
        if theta == 0.0 && order >= 1 && self.singular_derivative_at_zero(order) {
            return Err(Error::Domain(format!(
                "derivative of order {order} is singular at theta = 0 for this coefficient"
            )));
        }
        Ok(self.eval_unchecked(theta, order))
    }

    /// Whether the requested derivative diverges as `theta -> 0+`.
    fn singular_derivative_at_zero(&self, order: usize) -> bool {
        match self {
            CoefficientFn::Constant { .. } => false,
            CoefficientFn::Power { amplitude, exponent } => {
                *amplitude != 0.0
                    && falling_factorial(*exponent, order) != 0.0
                    && *exponent < order as f64
            }
            CoefficientFn::RationalPower {
                amplitude,
                exponent,
                damping,
                ..
            } => {
                // Near 0 the function behaves like amplitude * theta^exponent
                // with corrections carrying theta^(exponent + damping).
                *amplitude != 0.0
                    && ((*exponent < order as f64 && falling_factorial(*exponent, order) != 0.0)
                        || *exponent + *damping < order as f64)
            }
            CoefficientFn::Sum(terms) => {
                terms.iter().any(|t| t.singular_derivative_at_zero(order))
            }
        }
    }

    /// Derivative evaluation without domain checks. `theta = 0` with a
    /// singular derivative yields an IEEE infinity rather than an error.
    pub fn eval_unchecked(&self, theta: f64, order: usize) -> f64 {
        match self {
            CoefficientFn::Constant { value } => {
                if order == 0 {
                    *value
                } else {
                    0.0
                }
            }
            CoefficientFn::Power { amplitude, exponent } => {
                power_derivative(*amplitude, *exponent, theta, order)
            }
            CoefficientFn::RationalPower {
                amplitude,
                exponent,
                scale,
                damping,
            } => rational_power_derivative(*amplitude, *exponent, *scale, *damping, theta, order),
            CoefficientFn::Sum(terms) => terms
                .iter()
                .map(|t| t.eval_unchecked(theta, order))
                .sum(),
        }
    }
}

/// `p (p-1) ... (p-k+1)`, the coefficient picked up by k differentiations.
fn falling_factorial(p: f64, k: usize) -> f64 {
    let mut coeff = 1.0;
    let mut q = p;
    for _ in 0..k {
        coeff *= q;
        q -= 1.0;
    }
    coeff
}

/// `d^k (a theta^p) / d theta^k` with the falling-factorial prefactor.
fn power_derivative(a: f64, p: f64, theta: f64, order: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mut coeff = a;
    let mut q = p;
    for _ in 0..order {
        coeff *= q;
        q -= 1.0;
    }
    if coeff == 0.0 {
        // Integer exponent consumed by the differentiation; avoids 0 * inf at theta = 0.
        return 0.0;
    }
    coeff * powf(theta, q)
}

/// `theta^q` with the convention `0^0 = 1`.
fn powf(theta: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0
    } else {
        theta.powf(q)
    }
}

/// Derivatives of `u / v` with `u = a theta^p` and `v = 1 + (theta/s)^q`,
/// assembled through the derivatives of `w = 1/v`.
fn rational_power_derivative(
    a: f64,
    p: f64,
    s: f64,
    q: f64,
    theta: f64,
    order: usize,
) -> f64 {
    let u: [f64; 4] = [
        power_derivative(a, p, theta, 0),
        power_derivative(a, p, theta, 1),
        power_derivative(a, p, theta, 2),
        power_derivative(a, p, theta, 3),
    ];
    // v = 1 + s^-q * theta^q and its derivatives.
    let sq = s.powf(-q);
    let v: [f64; 4] = [
        1.0 + power_derivative(sq, q, theta, 0),
        power_derivative(sq, q, theta, 1),
        power_derivative(sq, q, theta, 2),
        power_derivative(sq, q, theta, 3),
    ];
    let w0 = 1.0 / v[0];
    let w1 = -v[1] * w0 * w0;
    let w2 = (2.0 * v[1] * v[1] * w0 - v[2]) * w0 * w0;
    let w3 = (-6.0 * v[1] * v[1] * v[1] * w0 * w0 + 6.0 * v[1] * v[2] * w0 - v[3]) * w0 * w0;
    match order {
        0 => u[0] * w0,
        1 => u[1] * w0 + u[0] * w1,
        2 => u[2] * w0 + 2.0 * u[1] * w1 + u[0] * w2,
        3 => u[3] * w0 + 3.0 * u[2] * w1 + 3.0 * u[1] * w2 + u[0] * w3,
        _ => unreachable!("order checked by caller"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_derivative(f: &CoefficientFn, theta: f64, order: usize, h: f64) -> f64 {
        let lo = f.eval_unchecked(theta - h, order - 1);
        let hi = f.eval_unchecked(theta + h, order - 1);
        (hi - lo) / (2.0 * h)
    }

    #[test]
    fn power_matches_analytic() {
        let b = CoefficientFn::power(2.5, 1.5);
        let theta: f64 = 3.0;
        assert_eq!(b.eval(theta, 0).unwrap(), 2.5 * theta.powf(1.5));
        assert_eq!(b.eval(theta, 1).unwrap(), 2.5 * 1.5 * theta.powf(0.5));
        assert_eq!(
            b.eval(theta, 2).unwrap(),
            2.5 * 1.5 * 0.5 * theta.powf(-0.5)
        );
        assert_eq!(
            b.eval(theta, 3).unwrap(),
            2.5 * 1.5 * 0.5 * (-0.5) * theta.powf(-1.5)
        );
    }

    #[test]
    fn linear_power_has_zero_curvature() {
        let b = CoefficientFn::power(1.0, 1.0);
        assert_eq!(b.eval(3.0, 0).unwrap(), 3.0);
        assert_eq!(b.eval(3.0, 1).unwrap(), 1.0);
        assert_eq!(b.eval(3.0, 2).unwrap(), 0.0);
        // No spurious infinity at theta = 0 even though the naive formula
        // would evaluate 0 * 0^-1.
        assert_eq!(b.eval_unchecked(0.0, 2), 0.0);
    }

    #[test]
    fn rational_power_demo_value() {
        // B2(theta) = -1/2 theta^(1/5) / (1 + theta^(6/5)) evaluates to -1/4 at theta = 1.
        let b = CoefficientFn::rational_power(-0.5, 0.2, 1.0, 1.2);
        assert!((b.eval(1.0, 0).unwrap() - (-0.25)).abs() < 1e-15);
    }

    #[test]
    fn rational_power_derivatives_match_finite_differences() {
        let b = CoefficientFn::rational_power(-0.5, 0.2, 1.0, 1.2);
        for &theta in &[0.3, 1.0, 2.7, 9.0] {
            for order in 1..=3 {
                let exact = b.eval(theta, order).unwrap();
                let h = 1e-5 * theta;
                let approx = fd_derivative(&b, theta, order, h);
                assert!(
                    (exact - approx).abs() <= 1e-6 * (1.0 + exact.abs()),
                    "order {order} at theta {theta}: exact {exact}, fd {approx}"
                );
            }
        }
    }

    #[test]
    fn sum_combines_terms() {
        let b = CoefficientFn::Sum(vec![
            CoefficientFn::power(1.0, 1.0),
            CoefficientFn::constant(2.0),
        ]);
        assert_eq!(b.eval(3.0, 0).unwrap(), 5.0);
        assert_eq!(b.eval(3.0, 1).unwrap(), 1.0);
        assert!(!b.is_constant());
    }

    #[test]
    fn constant_detection() {
        assert!(CoefficientFn::constant(4.0).is_constant());
        assert_eq!(CoefficientFn::constant(4.0).constant_value(), Some(4.0));
        assert!(CoefficientFn::power(0.0, 2.0).is_constant());
        assert!(!CoefficientFn::power(1.0, 2.0).is_constant());
    }

    #[test]
    fn negative_theta_rejected() {
        let b = CoefficientFn::power(1.0, 2.0);
        assert!(b.eval(-1.0, 0).is_err());
    }

    #[test]
    fn fractional_derivative_singular_at_zero() {
        let b = CoefficientFn::power(1.0, 0.5);
        assert!(b.eval(0.0, 1).is_err());
        assert!(b.eval(0.0, 0).is_ok());
    }
}

//! Ready-made virial laws used by the test-suite, the example configurations
//! and the documentation.

use crate::coeff::CoefficientFn;
use crate::law::VirialLaw;

/// Baseline admissible law: `gamma = 5`, `B_0(theta) = theta`, `B_1 = B_2 = 0`,
/// `kappa(theta) = theta^4 + 1`, `mu = 1`, `lambda = 0`.
///
/// Pressure reduces to `rho^5 + theta^2`; the good unknown is `g = theta^2`
/// and `rho s = 2 theta`.
pub fn reference_law() -> VirialLaw {
    VirialLaw {
        gamma: 5.0,
        gamma_theta: 2.0,
        alpha: 4.0,
        alpha_bar: 3.0,
        n_trunc: 2,
        b: vec![
            CoefficientFn::power(1.0, 1.0),
            CoefficientFn::constant(0.0),
            CoefficientFn::zero(),
        ],
        b_bar: vec![0.0, 0.0, 0.0],
        b1_constant: 0.0,
        mu: 1.0,
        lambda: 0.0,
        kappa_a: 1.0,
        kappa_b: 1.0,
        m_const: 0.0,
    }
}

/// Reference law with `B_2(theta) = -theta^(1/5) / (2 (1 + theta^(6/5)))`,
/// which makes `dP/drho` negative in a low-density band (for example
/// `dP/drho = -0.0495` at `rho = 0.1`, `theta = 1`).
pub fn nonmonotone_demo_law() -> VirialLaw {
    let mut law = reference_law();
    law.b[2] = CoefficientFn::rational_power(-0.5, 0.2, 1.0, 1.2);
    // theta B_2(theta) -> -1/2 as theta grows.
    law.b_bar[2] = -0.5;
    law
}

/// Reference law with constant `B_2 = 1`: `theta B_2` grows linearly and
/// breaks the coefficient-limit growth bound while every other structural
/// property survives.
pub fn constant_b2_law() -> VirialLaw {
    let mut law = reference_law();
    law.b[2] = CoefficientFn::constant(1.0);
    law
}

/// Reference law with `B_2(theta) = -theta / (1 + theta^2)`: here
/// `theta^2 B_2'` increases toward its limit, violating the concavity
/// requirement on the coefficients.
pub fn nonconcave_b2_law() -> VirialLaw {
    let mut law = reference_law();
    law.b[2] = CoefficientFn::rational_power(-1.0, 1.0, 1.0, 2.0);
    // theta B_2(theta) -> -1.
    law.b_bar[2] = -1.0;
    law
}

/// Reference law with the admissible concave coefficient
/// `B_2(theta) = -theta^(1/2) / 2`.
pub fn concave_b2_law() -> VirialLaw {
    let mut law = reference_law();
    law.b[2] = CoefficientFn::power(-0.5, 0.5);
    law
}

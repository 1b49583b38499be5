//! Truncated virial pressure law and the thermodynamic quantities derived
//! from it.
//!
//! The pressure is `P(rho, theta) = rho^gamma + theta * sum_n B_n(theta) rho^n`
//! with temperature coefficients `B_n` from [`crate::coeff`]. Internal energy,
//! entropy, the reduced (non-barotropic) pressure, the good unknown
//! `g = rho * e_tilde + eps * theta` and its monotone inversion all live here.
//! Everything is a pure function of the immutable law.

use crate::coeff::CoefficientFn;
use crate::error::{Error, Result};

/// A density/temperature evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub rho: f64,
    pub theta: f64,
}

impl ThermoPoint {
    pub fn new(rho: f64, theta: f64) -> Self {
        ThermoPoint { rho, theta }
    }
}

/// The complete equation-of-state record.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct VirialLaw {
    /// Adiabatic exponent of the barotropic part.
    pub gamma: f64,
    /// Radiative exponent: `B_0` grows like `theta^(gamma_theta - 1)`.
    pub gamma_theta: f64,
    /// Conductivity exponent in `kappa(theta) = kappa_a theta^alpha + kappa_b`.
    pub alpha: f64,
    /// Auxiliary growth exponent for the coefficient limits.
    pub alpha_bar: f64,
    /// Truncation order: coefficients `B_0 ..= B_N`.
    pub n_trunc: usize,
    /// Coefficient functions, `b[n] = B_n`.
    pub b: Vec<CoefficientFn>,
    /// High-temperature limits of `theta * B_n(theta)`.
    pub b_bar: Vec<f64>,
    /// The constant value of `B_1`.
    pub b1_constant: f64,
    /// Shear viscosity.
    pub mu: f64,
    /// Bulk viscosity coefficient.
    pub lambda: f64,
    /// Conductivity parameters.
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// Additive constant in the internal energy.
    pub m_const: f64,
}

impl VirialLaw {
    /// Structural shape check: coefficient counts match the truncation
    /// order, `B_1` is constant, and the exponents that enter denominators
    /// are usable. Inequality-level auditing is the validator's job.
    pub fn check_shape(&self) -> Result<()> {
        if self.b.len() != self.n_trunc + 1 {
            return Err(Error::Config(format!(
                "law has {} coefficients but n_trunc = {} requires {}",
                self.b.len(),
                self.n_trunc,
                self.n_trunc + 1
            )));
        }
        if self.b_bar.len() != self.n_trunc + 1 {
            return Err(Error::Config(format!(
                "law has {} coefficient limits but n_trunc = {} requires {}",
                self.b_bar.len(),
                self.n_trunc,
                self.n_trunc + 1
            )));
        }
        if self.gamma <= 1.0 {
            return Err(Error::Config(format!(
                "gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        if self.n_trunc >= 1 {
            match self.b[1].constant_value() {
                Some(c) if c == self.b1_constant => {}
                Some(c) => {
                    return Err(Error::Config(format!(
                        "B_1 is constant {} but b1_constant is {}",
                        c, self.b1_constant
                    )))
                }
                None => {
                    return Err(Error::Config(
                        "B_1 must be a constant coefficient".to_string(),
                    ))
                }
            }
        }
        for v in [
            self.gamma,
            self.gamma_theta,
            self.alpha,
            self.alpha_bar,
            self.mu,
            self.lambda,
            self.kappa_a,
            self.kappa_b,
            self.m_const,
        ] {
            if !v.is_finite() {
                return Err(Error::Config("law parameters must be finite".to_string()));
            }
        }
        Ok(())
    }

    /// `d^order B_n / d theta^order`.
    pub fn eval_b(&self, n: usize, theta: f64, order: usize) -> Result<f64> {
        let coeff = self.b.get(n).ok_or(Error::IndexOutOfRange {
            index: n,
            n_trunc: self.n_trunc,
        })?;
        coeff.eval(theta, order)
    }

    /// Pressure `P = rho^gamma + theta sum_n B_n(theta) rho^n`.
    ///
    /// Admits vacuum and zero temperature; at `rho = 0` only the radiative
    /// part `theta B_0(theta)` survives.
    pub fn pressure(&self, p: ThermoPoint) -> f64 {
        let mut sum = 0.0;
        let mut rho_n = 1.0;
        for coeff in &self.b {
            sum += coeff.eval_unchecked(p.theta, 0) * rho_n;
            rho_n *= p.rho;
        }
        p.rho.powf(self.gamma) + p.theta * sum
    }

    /// `dP/drho` at fixed temperature. May be negative for non-monotone laws.
    pub fn pressure_drho(&self, p: ThermoPoint) -> f64 {
        let mut sum = 0.0;
        let mut rho_nm1 = 1.0;
        for (n, coeff) in self.b.iter().enumerate().skip(1) {
            sum += n as f64 * coeff.eval_unchecked(p.theta, 0) * rho_nm1;
            rho_nm1 *= p.rho;
        }
        self.gamma * p.rho.powf(self.gamma - 1.0) + p.theta * sum
    }

    /// `dP/dtheta` at fixed density.
    pub fn pressure_dtheta(&self, p: ThermoPoint) -> f64 {
        let mut sum = 0.0;
        let mut rho_n = 1.0;
        for coeff in &self.b {
            let b0 = coeff.eval_unchecked(p.theta, 0);
            let b1 = coeff.eval_unchecked(p.theta, 1);
            sum += (b0 + p.theta * b1) * rho_n;
            rho_n *= p.rho;
        }
        sum
    }

    /// Specific internal energy
    /// `e = m + rho^(gamma-1)/(gamma-1) - sum_{n>=2} theta^2 B_n' rho^(n-1)/(n-1)
    ///    + theta^2 B_0' / rho`.
    ///
    /// The `B_1 log rho` term of the general formula is absent because `B_1`
    /// is constant.
    pub fn internal_energy(&self, p: ThermoPoint) -> Result<f64> {
        if p.rho <= 0.0 {
            return Err(Error::Domain(format!(
                "internal energy is singular at rho = {} (needs rho > 0)",
                p.rho
            )));
        }
        let cold = p.rho.powf(self.gamma - 1.0) / (self.gamma - 1.0);
        Ok(self.m_const + cold + self.reduced_energy(p)?)
    }

    /// The non-barotropic energy
    /// `e_tilde = -sum_{n>=2} theta^2 B_n' rho^(n-1)/(n-1) + theta^2 B_0' / rho`.
    pub fn reduced_energy(&self, p: ThermoPoint) -> Result<f64> {
        if p.rho <= 0.0 {
            return Err(Error::Domain(format!(
                "reduced energy is singular at rho = {} (needs rho > 0)",
                p.rho
            )));
        }
        Ok(self.good_unknown_value(p.rho, p.theta, 0.0) / p.rho)
    }

    /// Good unknown `g = rho e_tilde + eps theta`. Non-negative for
    /// admissible laws and zero exactly at `theta = 0`.
    pub fn good_unknown(&self, p: ThermoPoint, eps: f64) -> Result<f64> {
        if p.rho <= 0.0 {
            return Err(Error::Domain(format!(
                "good unknown requires rho > 0, got {}",
                p.rho
            )));
        }
        if eps < 0.0 {
            return Err(Error::NegativeInput(format!(
                "regularization eps must be >= 0, got {eps}"
            )));
        }
        Ok(self.good_unknown_value(p.rho, p.theta, eps))
    }

    /// Closed-form evaluation of
    /// `g = eps theta - sum_{n>=2} theta^2 B_n' rho^n/(n-1) + theta^2 B_0'`.
    fn good_unknown_value(&self, rho: f64, theta: f64, eps: f64) -> f64 {
        if theta == 0.0 {
            return 0.0;
        }
        let th2 = theta * theta;
        let mut sum = th2 * self.b[0].eval_unchecked(theta, 1);
        let mut rho_n = rho * rho;
        for (n, coeff) in self.b.iter().enumerate().skip(2) {
            sum -= th2 * coeff.eval_unchecked(theta, 1) * rho_n / (n as f64 - 1.0);
            rho_n *= rho;
        }
        eps * theta + sum
    }

    /// `dg/dtheta = eps - sum_{n>=2} d/dtheta(theta^2 B_n') rho^n/(n-1)
    ///            + d/dtheta(theta^2 B_0')`, strictly positive for
    /// `theta > 0` or `eps > 0` on admissible laws.
    pub fn dg_dtheta(&self, p: ThermoPoint, eps: f64) -> f64 {
        let mut sum = self.theta2_bprime_dtheta(0, p.theta);
        let mut rho_n = p.rho * p.rho;
        for n in 2..=self.n_trunc {
            sum -= self.theta2_bprime_dtheta(n, p.theta) * rho_n / (n as f64 - 1.0);
            rho_n *= p.rho;
        }
        eps + sum
    }

    /// `d/dtheta (theta^2 B_n'(theta)) = 2 theta B_n' + theta^2 B_n''`.
    pub fn theta2_bprime_dtheta(&self, n: usize, theta: f64) -> f64 {
        let b1 = self.b[n].eval_unchecked(theta, 1);
        let b2 = self.b[n].eval_unchecked(theta, 2);
        2.0 * theta * b1 + theta * theta * b2
    }

    /// `dtheta/drho` at fixed `g`:
    /// `[sum_{n>=2} n/(n-1) theta^2 B_n' rho^(n-1)] / (dg/dtheta)`.
    pub fn dtheta_drho(&self, p: ThermoPoint, eps: f64) -> f64 {
        if self.n_trunc < 2 || p.theta == 0.0 {
            return 0.0;
        }
        let th2 = p.theta * p.theta;
        let mut num = 0.0;
        let mut rho_nm1 = p.rho;
        for n in 2..=self.n_trunc {
            let nf = n as f64;
            num += nf / (nf - 1.0) * th2 * self.b[n].eval_unchecked(p.theta, 1) * rho_nm1;
            rho_nm1 *= p.rho;
        }
        if num == 0.0 {
            return 0.0;
        }
        num / self.dg_dtheta(p, eps)
    }

    /// Specific entropy from the Gibbs relations, normalized so that the
    /// integration constant vanishes:
    /// `s = -sum_{n>=2} (theta B_n' + B_n) rho^(n-1)/(n-1) - B_1 log rho
    ///    + (theta B_0' + B_0)/rho`.
    pub fn entropy(&self, p: ThermoPoint) -> Result<f64> {
        if p.rho <= 0.0 {
            return Err(Error::Domain(format!(
                "entropy is singular at rho = {} (needs rho > 0)",
                p.rho
            )));
        }
        if p.theta <= 0.0 {
            return Err(Error::Domain(format!(
                "entropy requires theta > 0, got {}",
                p.theta
            )));
        }
        let mut s = self.b_tilde(0, p.theta) / p.rho;
        if self.n_trunc >= 1 && self.b1_constant != 0.0 {
            s -= self.b1_constant * p.rho.ln();
        }
        let mut rho_nm1 = p.rho;
        for n in 2..=self.n_trunc {
            s -= self.b_tilde(n, p.theta) * rho_nm1 / (n as f64 - 1.0);
            rho_nm1 *= p.rho;
        }
        Ok(s)
    }

    /// Entropy of the eps-regularized system,
    /// `s_eps = (eps/rho) log theta + s`.
    pub fn entropy_eps(&self, p: ThermoPoint, eps: f64) -> Result<f64> {
        Ok(self.entropy(p)? + eps * p.theta.ln() / p.rho)
    }

    /// `B~_n(theta) = theta B_n'(theta) + B_n(theta)`, the antiderivative of
    /// `theta B_n'' + 2 B_n'` with integration constant zero.
    pub fn b_tilde(&self, n: usize, theta: f64) -> f64 {
        theta * self.b[n].eval_unchecked(theta, 1) + self.b[n].eval_unchecked(theta, 0)
    }

    /// Reduced pressure `P~_eps = -eps theta log theta + theta sum_n B_n rho^n`,
    /// continuously extended by zero at `theta = 0`.
    pub fn reduced_pressure(&self, p: ThermoPoint, eps: f64) -> f64 {
        if p.theta == 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut rho_n = 1.0;
        for coeff in &self.b {
            sum += coeff.eval_unchecked(p.theta, 0) * rho_n;
            rho_n *= p.rho;
        }
        -eps * p.theta * p.theta.ln() + p.theta * sum
    }

    /// `dP~_eps/dtheta = -eps (1 + log theta) + sum_n (B_n + theta B_n') rho^n`.
    pub fn reduced_pressure_dtheta(&self, p: ThermoPoint, eps: f64) -> f64 {
        let mut sum = 0.0;
        let mut rho_n = 1.0;
        for coeff in &self.b {
            let b0 = coeff.eval_unchecked(p.theta, 0);
            let b1 = coeff.eval_unchecked(p.theta, 1);
            sum += (b0 + p.theta * b1) * rho_n;
            rho_n *= p.rho;
        }
        if eps == 0.0 {
            sum
        } else {
            sum - eps * (1.0 + p.theta.ln())
        }
    }

    /// Specific heat `C_v = de/dtheta` at fixed density.
    pub fn specific_heat(&self, p: ThermoPoint) -> f64 {
        let mut cv = self.theta2_bprime_dtheta(0, p.theta) / p.rho;
        let mut rho_nm1 = p.rho;
        for n in 2..=self.n_trunc {
            cv -= self.theta2_bprime_dtheta(n, p.theta) * rho_nm1 / (n as f64 - 1.0);
            rho_nm1 *= p.rho;
        }
        cv
    }

    /// Heat conductivity `kappa(theta) = kappa_a theta^alpha + kappa_b`.
    pub fn conductivity(&self, theta: f64) -> f64 {
        self.kappa_a * theta.powf(self.alpha) + self.kappa_b
    }

    /// `kappa'(theta) = alpha kappa_a theta^(alpha - 1)`.
    pub fn conductivity_dtheta(&self, theta: f64) -> f64 {
        if self.kappa_a == 0.0 {
            return 0.0;
        }
        self.alpha * self.kappa_a * theta.powf(self.alpha - 1.0)
    }

    /// Barotropic potential
    /// `phi(rho) = rho^gamma/(gamma-1) + sum_{2<=n<=N} Bbar_n rho^n/(n-1) + Bbar_0`.
    pub fn phi_potential(&self, rho: f64) -> f64 {
        let mut phi = rho.powf(self.gamma) / (self.gamma - 1.0) + self.b_bar[0];
        let mut rho_n = rho * rho;
        for n in 2..=self.n_trunc {
            phi += self.b_bar[n] * rho_n / (n as f64 - 1.0);
            rho_n *= rho;
        }
        phi
    }

    /// `d phi / d rho`.
    pub fn phi_potential_drho(&self, rho: f64) -> f64 {
        let mut dphi = self.gamma * rho.powf(self.gamma - 1.0) / (self.gamma - 1.0);
        let mut rho_nm1 = rho;
        for n in 2..=self.n_trunc {
            let nf = n as f64;
            dphi += self.b_bar[n] * nf * rho_nm1 / (nf - 1.0);
            rho_nm1 *= rho;
        }
        dphi
    }

    /// Reference barotropic pressure `P_0(rho) = rho^gamma + sum_n Bbar_n rho^n`.
    pub fn p0_reference(&self, rho: f64) -> f64 {
        let mut p0 = rho.powf(self.gamma);
        let mut rho_n = 1.0;
        for bar in &self.b_bar {
            p0 += bar * rho_n;
            rho_n *= rho;
        }
        p0
    }

    /// The gap `P(rho, theta) - (phi'(rho) rho - phi(rho))` measured by the
    /// validator against `rho^(gamma/2) + theta^(alpha/2) + sqrt(rho e)`.
    pub fn phi_gap(&self, p: ThermoPoint) -> f64 {
        self.pressure(p) - (self.phi_potential_drho(p.rho) * p.rho - self.phi_potential(p.rho))
    }

    /// Sound speed squared estimate used by the CFL control, floored at
    /// `c2_floor` because non-monotone laws can make `dP/drho` negative.
    pub fn sound_speed(&self, p: ThermoPoint, c2_floor: f64) -> f64 {
        self.pressure_drho(p).max(c2_floor).sqrt()
    }

    /// Exact first and second partial derivatives of the internal energy,
    /// `(e_rho, e_theta, e_rho_rho, e_rho_theta, e_theta_theta)`.
    pub fn energy_partials(&self, p: ThermoPoint) -> (f64, f64, f64, f64, f64) {
        let (rho, theta) = (p.rho, p.theta);
        let th2 = theta * theta;
        let mut e_r = rho.powf(self.gamma - 2.0);
        let mut e_t = 0.0;
        let mut e_rr = (self.gamma - 2.0) * rho.powf(self.gamma - 3.0);
        let mut e_rt = 0.0;
        let mut e_tt = 0.0;

        // n = 0 block carries 1/rho.
        let b1 = self.b[0].eval_unchecked(theta, 1);
        let b2 = self.b[0].eval_unchecked(theta, 2);
        let b3 = self.b[0].eval_unchecked(theta, 3);
        let t2b1 = th2 * b1;
        let d_t2b = 2.0 * theta * b1 + th2 * b2;
        let dd_t2b = 2.0 * b1 + 4.0 * theta * b2 + th2 * b3;
        e_r -= t2b1 / (rho * rho);
        e_t += d_t2b / rho;
        e_rr += 2.0 * t2b1 / (rho * rho * rho);
        e_rt -= d_t2b / (rho * rho);
        e_tt += dd_t2b / rho;

        let mut rho_nm1 = rho;
        for n in 2..=self.n_trunc {
            let nf = n as f64;
            let b1 = self.b[n].eval_unchecked(theta, 1);
            let b2 = self.b[n].eval_unchecked(theta, 2);
            let b3 = self.b[n].eval_unchecked(theta, 3);
            let t2b1 = th2 * b1;
            let d_t2b = 2.0 * theta * b1 + th2 * b2;
            let dd_t2b = 2.0 * b1 + 4.0 * theta * b2 + th2 * b3;
            let rho_nm2 = rho_nm1 / rho;
            e_r -= t2b1 * rho_nm2;
            e_t -= d_t2b * rho_nm1 / (nf - 1.0);
            e_rr -= (nf - 2.0) * t2b1 * rho_nm2 / rho;
            e_rt -= d_t2b * rho_nm2;
            e_tt -= dd_t2b * rho_nm1 / (nf - 1.0);
            rho_nm1 *= rho;
        }
        (e_r, e_t, e_rr, e_rt, e_tt)
    }

    /// Exact first and second partial derivatives of the specific entropy,
    /// `(s_rho, s_theta, s_rho_rho, s_rho_theta, s_theta_theta)`.
    pub fn entropy_partials(&self, p: ThermoPoint) -> (f64, f64, f64, f64, f64) {
        let (rho, theta) = (p.rho, p.theta);
        // B~ = theta B' + B, B~' = theta B'' + 2 B', B~'' = theta B''' + 3 B''.
        let bt = |n: usize, k: usize| -> f64 {
            let b_k = self.b[n].eval_unchecked(theta, k);
            let b_k1 = self.b[n].eval_unchecked(theta, k + 1);
            theta * b_k1 + (1.0 + k as f64) * b_k
        };

        let mut s_r = -bt(0, 0) / (rho * rho);
        let mut s_t = bt(0, 1) / rho;
        let mut s_rr = 2.0 * bt(0, 0) / (rho * rho * rho);
        let mut s_rt = -bt(0, 1) / (rho * rho);
        let mut s_tt = bt(0, 2) / rho;
        if self.n_trunc >= 1 && self.b1_constant != 0.0 {
            s_r -= self.b1_constant / rho;
            s_rr += self.b1_constant / (rho * rho);
        }
        let mut rho_nm1 = rho;
        for n in 2..=self.n_trunc {
            let nf = n as f64;
            let rho_nm2 = rho_nm1 / rho;
            s_r -= bt(n, 0) * rho_nm2;
            s_t -= bt(n, 1) * rho_nm1 / (nf - 1.0);
            s_rr -= (nf - 2.0) * bt(n, 0) * rho_nm2 / rho;
            s_rt -= bt(n, 1) * rho_nm2;
            s_tt -= bt(n, 2) * rho_nm1 / (nf - 1.0);
            rho_nm1 *= rho;
        }
        (s_r, s_t, s_rr, s_rt, s_tt)
    }

    /// Exact Hessian of the entropy as a function of `(v, e) = (1/rho, e)`,
    /// returned as `(s_vv, s_ve, s_ee)`; `None` where `C_v <= 0` makes the
    /// change of variables fold over.
    pub fn entropy_hessian_ve(&self, p: ThermoPoint) -> Option<(f64, f64, f64)> {
        let rho = p.rho;
        let (e_r, e_t, e_rr, e_rt, e_tt) = self.energy_partials(p);
        let (s_r, s_t, s_rr, s_rt, s_tt) = self.entropy_partials(p);
        if e_t <= 0.0 {
            return None;
        }
        let rho2 = rho * rho;
        let rho_v = -rho2; // d rho / d v
        let rho_vv = 2.0 * rho2 * rho;
        let theta_e = 1.0 / e_t;
        let theta_v = -rho_v * e_r * theta_e;

        // s_ee.
        let s_ee = s_tt * theta_e * theta_e - s_t * e_tt * theta_e * theta_e * theta_e;

        // s_ve = D_v(s_t / e_t).
        let dv_s_t = s_rt * rho_v + s_tt * theta_v;
        let dv_e_t = e_rt * rho_v + e_tt * theta_v;
        let s_ve = dv_s_t * theta_e - s_t * dv_e_t * theta_e * theta_e;

        // s_vv = D_v(s_r rho_v + s_t theta_v).
        let dv_e_r = e_rr * rho_v + e_rt * theta_v;
        let theta_vv = -rho_vv * e_r * theta_e
            - rho_v * (dv_e_r * theta_e - e_r * dv_e_t * theta_e * theta_e);
        let dv_s_r = s_rr * rho_v + s_rt * theta_v;
        let s_vv = dv_s_r * rho_v + s_r * rho_vv + dv_s_t * theta_v + s_t * theta_vv;

        Some((s_vv, s_ve, s_ee))
    }
}

/// Relative tolerance of the monotone inversion `theta_of_g`.
pub const THETA_OF_G_REL_TOL: f64 = 1e-13;
/// Iteration budget of the safeguarded Newton inversion.
pub const THETA_OF_G_MAX_ITER: usize = 200;

impl VirialLaw {
    /// Inverts `g = good_unknown(rho, theta, eps)` for the unique
    /// `theta >= 0`, by safeguarded Newton (bisection fallback) on a bracket
    /// grown from the bounds `g >= eps theta` and `g >= theta^gamma_theta / C`.
    pub fn theta_of_g(&self, rho: f64, g: f64, eps: f64) -> Result<f64> {
        if rho <= 0.0 {
            return Err(Error::Domain(format!(
                "theta_of_g requires rho > 0, got {rho}"
            )));
        }
        if g < 0.0 {
            return Err(Error::NegativeInput(format!(
                "good unknown must be >= 0, got {g}"
            )));
        }
        if g == 0.0 {
            return Ok(0.0);
        }

        // Upper bracket seed: theta <= g/eps when eps > 0, and the radiative
        // part alone gives g ~ theta^gamma_theta, so g^(1/gamma_theta) is the
        // right scale. Grow by doubling until the bracket is certain.
        let mut hi = g.powf(1.0 / self.gamma_theta).max(1e-8);
        if eps > 0.0 {
            hi = hi.min(g / eps);
        }
        let mut grow = 0;
        while self.good_unknown_value(rho, hi, eps) < g {
            hi *= 2.0;
            grow += 1;
            if grow > 200 || !hi.is_finite() {
                return Err(Error::ConvergenceFailure {
                    context: "theta_of_g bracket growth (is the law monotone in theta?)"
                        .to_string(),
                    residual: self.good_unknown_value(rho, hi, eps) - g,
                    iterations: grow,
                });
            }
        }
        let mut lo = 0.0_f64;
        let mut x = 0.5 * hi;

        for it in 0..THETA_OF_G_MAX_ITER {
            let f = self.good_unknown_value(rho, x, eps) - g;
            if f == 0.0 {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.dg_dtheta(ThermoPoint::new(rho, x), eps);
            let mut next = if d > 0.0 { x - f / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= THETA_OF_G_REL_TOL * x.max(1e-300) || hi - lo <= THETA_OF_G_REL_TOL * hi {
                // One polishing Newton step from inside the bracket.
                let f = self.good_unknown_value(rho, x, eps) - g;
                let d = self.dg_dtheta(ThermoPoint::new(rho, x), eps);
                if d > 0.0 {
                    let polished = x - f / d;
                    if polished > 0.0 && polished.is_finite() {
                        x = polished;
                    }
                }
                let _ = it;
                return Ok(x);
            }
        }
        Err(Error::ConvergenceFailure {
            context: "theta_of_g safeguarded Newton".to_string(),
            residual: self.good_unknown_value(rho, x, eps) - g,
            iterations: THETA_OF_G_MAX_ITER,
        })
    }
}

//! Periodic Green's functions for `v'' = σ - mean(σ)` (Poisson) and
//! `v'' - v = σ` (Yukawa) on a period `L`.

use crate::{Error, Result, Side};

/// Which periodic Green's function represents the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum KernelKind {
    #[default]
    Poisson,
    Yukawa,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(KernelKind::Poisson),
            "yukawa" => Ok(KernelKind::Yukawa),
            other => Err(Error::Parameter(format!("unknown kernel '{other}'"))),
        }
    }
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelKind::Poisson => "poisson",
            KernelKind::Yukawa => "yukawa",
        })
    }
}

/// Floor-mod into `[0, L)`, also for negative arguments.
#[inline]
pub fn floor_mod(x: f64, period: f64) -> f64 {
    let m = x.rem_euclid(period);
    if m >= period {
        0.0
    } else {
        m
    }
}

/// `G_L(x) = -(mod(x,L) - L/2)²/(2L) + L/24`.
#[inline]
pub fn g_poisson(x: f64, period: f64) -> f64 {
    let y = floor_mod(x, period) - 0.5 * period;
    -y * y / (2.0 * period) + period / 24.0
}

/// `G_L'(x) = -(mod(x,L) - L/2)/L`, refused at `x ≡ 0` where it jumps from
/// `-1/2` to `+1/2`.
pub fn g_poisson_deriv(x: f64, period: f64) -> Result<f64> {
    if floor_mod(x, period) == 0.0 {
        return Err(Error::KernelJump(x));
    }
    Ok(g_poisson_deriv_unchecked(x, period))
}

/// One-sided derivative; only matters at the jump.
pub fn g_poisson_deriv_sided(x: f64, period: f64, side: Side) -> f64 {
    if floor_mod(x, period) == 0.0 {
        return match side {
            Side::Left => -0.5,
            Side::Right => 0.5,
        };
    }
    g_poisson_deriv_unchecked(x, period)
}

#[inline]
pub(crate) fn g_poisson_deriv_unchecked(x: f64, period: f64) -> f64 {
    -(floor_mod(x, period) - 0.5 * period) / period
}

/// Periodic Yukawa kernel `-cosh(y - L/2) / (2 sinh(L/2))`, `y = mod(x, L)`,
/// written in exponentials so that large periods do not overflow.
#[inline]
pub fn g_yukawa(x: f64, period: f64) -> f64 {
    let y = floor_mod(x, period);
    -((y - period).exp() + (-y).exp()) / (2.0 * (-(-period).exp_m1()))
}

/// Derivative of [`g_yukawa`]; refused at the jump `x ≡ 0`.
pub fn g_yukawa_deriv(x: f64, period: f64) -> Result<f64> {
    if floor_mod(x, period) == 0.0 {
        return Err(Error::KernelJump(x));
    }
    Ok(g_yukawa_deriv_unchecked(x, period))
}

pub fn g_yukawa_deriv_sided(x: f64, period: f64, side: Side) -> f64 {
    if floor_mod(x, period) == 0.0 {
        return match side {
            Side::Left => -0.5,
            Side::Right => 0.5,
        };
    }
    g_yukawa_deriv_unchecked(x, period)
}

#[inline]
pub(crate) fn g_yukawa_deriv_unchecked(x: f64, period: f64) -> f64 {
    let y = floor_mod(x, period);
    -((y - period).exp() - (-y).exp()) / (2.0 * (-(-period).exp_m1()))
}

/// A kernel bound to its period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub kind: KernelKind,
    pub period: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Parameter(format!("kernel period {period} must be positive")));
        }
        Ok(Self { kind, period })
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match self.kind {
            KernelKind::Poisson => g_poisson(x, self.period),
            KernelKind::Yukawa => g_yukawa(x, self.period),
        }
    }

    /// Derivative away from the jump; callers guarantee `x ≢ 0`.
    #[inline]
    pub(crate) fn deriv_unchecked(&self, x: f64) -> f64 {
        match self.kind {
            KernelKind::Poisson => g_poisson_deriv_unchecked(x, self.period),
            KernelKind::Yukawa => g_yukawa_deriv_unchecked(x, self.period),
        }
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        match self.kind {
            KernelKind::Poisson => g_poisson_deriv(x, self.period),
            KernelKind::Yukawa => g_yukawa_deriv(x, self.period),
        }
    }

    pub fn deriv_sided(&self, x: f64, side: Side) -> f64 {
        match self.kind {
            KernelKind::Poisson => g_poisson_deriv_sided(x, self.period, side),
            KernelKind::Yukawa => g_yukawa_deriv_sided(x, self.period, side),
        }
    }

    /// Integral of the kernel over one period: `0` for Poisson, `-1` for Yukawa.
    pub fn mean_integral(&self) -> f64 {
        match self.kind {
            KernelKind::Poisson => 0.0,
            KernelKind::Yukawa => -1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use std::f64::consts::PI;

    /// The Yukawa kernel exactly as typeset, `x̃ = mod(x - L/2, L) + L/2`.
    fn g_yukawa_as_printed(x: f64, period: f64) -> f64 {
        let xt = floor_mod(x - 0.5 * period, period) + 0.5 * period;
        -0.5 * (-xt.abs()).exp() - (-period).exp() / (1.0 - (-period).exp()) * xt.cosh()
    }

    /// The same expression with the symmetric branch `x̃ ∈ [-L/2, L/2)`.
    fn g_yukawa_symmetric_branch(x: f64, period: f64) -> f64 {
        let xt = floor_mod(x + 0.5 * period, period) - 0.5 * period;
        -0.5 * (-xt.abs()).exp() - (-period).exp() / (1.0 - (-period).exp()) * xt.cosh()
    }

    #[test]
    fn poisson_spot_values() {
        let l = 2.0 * PI;
        assert!((g_poisson(l / 2.0, l) - PI / 12.0).abs() < 1e-15);
        assert!((g_poisson(0.0, l) + PI / 6.0).abs() < 1e-15);
        assert!((g_poisson_deriv(l / 2.0, l).unwrap()).abs() < 1e-16);
        assert_eq!(g_poisson_deriv(1.0, 4.0).unwrap(), 0.25);
        assert!(matches!(g_poisson_deriv(0.0, 4.0), Err(Error::KernelJump(_))));
        assert!(matches!(g_poisson_deriv(8.0, 4.0), Err(Error::KernelJump(_))));
        assert_eq!(g_poisson_deriv_sided(0.0, 4.0, Side::Right), 0.5);
        assert_eq!(g_poisson_deriv_sided(0.0, 4.0, Side::Left), -0.5);
        assert!((g_poisson_deriv(1e-12, 4.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((g_poisson_deriv(4.0 - 1e-12, 4.0).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn poisson_has_zero_mean() {
        let g = gauss_legendre(16).unwrap();
        for l in [1.0, 2.0 * PI, 4.0] {
            let m = g.integrate(0.0, l, |x| g_poisson(x, l));
            assert!(m.abs() < 1e-14, "L={l}: {m}");
        }
    }

    #[test]
    fn floor_mod_handles_negatives() {
        assert_eq!(floor_mod(-1.0, 4.0), 3.0);
        assert_eq!(floor_mod(5.0, 4.0), 1.0);
        assert_eq!(floor_mod(-1e-300, 4.0), 0.0);
        assert!(g_poisson(-1.0, 4.0) == g_poisson(3.0, 4.0));
    }

    #[test]
    fn yukawa_mean_and_jump() {
        let g = gauss_legendre(32).unwrap();
        for l in [1.0, 2.0 * PI, 4.0] {
            let m = g.integrate(0.0, l, |x| g_yukawa(x, l));
            assert!((m + 1.0).abs() < 1e-14, "L={l}: {m}");
            assert!((g_yukawa_deriv(1e-14, l).unwrap() - 0.5).abs() < 1e-12);
            assert!((g_yukawa_deriv(l - 1e-14, l).unwrap() + 0.5).abs() < 1e-12);
        }
        assert!(matches!(g_yukawa_deriv(0.0, 1.0), Err(Error::KernelJump(_))));
    }

    #[test]
    fn yukawa_satisfies_its_ode_away_from_zero() {
        // G'' - G = 0 on (0, L): check with centred differences
        let l = 3.0;
        let h = 1e-4;
        for x in [0.2, 0.9, 1.5, 2.7] {
            let d2 = (g_yukawa(x + h, l) - 2.0 * g_yukawa(x, l) + g_yukawa(x - h, l)) / (h * h);
            assert!((d2 - g_yukawa(x, l)).abs() < 1e-6);
        }
    }

    #[test]
    fn printed_yukawa_form_matches_on_symmetric_branch_only() {
        let l = 2.5;
        for i in 0..50 {
            let x = -3.0 * l + 0.173 * i as f64;
            assert!((g_yukawa_symmetric_branch(x, l) - g_yukawa(x, l)).abs() < 1e-14);
        }
        // with x̃ ∈ [L/2, 3L/2) the printed expression is not the Green's function
        let x = 0.3 * l;
        assert!((g_yukawa_as_printed(x, l) - g_yukawa(x, l)).abs() > 1e-2);
    }
}

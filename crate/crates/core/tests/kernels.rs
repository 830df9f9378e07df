use std::f64::consts::PI;

use proptest::prelude::*;
use revlb::kernels::*;
use revlb::quadrature::gauss_legendre;
use revlb::Side;

/// `∫_0^L G(x - t) g(t) dt` with the rule split at `t = x`.
fn convolve(kind: KernelKind, l: f64, x: f64, g: impl Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre(40).unwrap();
    let k = Kernel::new(kind, l).unwrap();
    let mut total = 0.0;
    // eight sub-panels per side keep the cosine well resolved
    for (a, b) in [(0.0, x), (x, l)] {
        for j in 0..8 {
            let lo = a + (b - a) * j as f64 / 8.0;
            let hi = a + (b - a) * (j + 1) as f64 / 8.0;
            total += rule.integrate(lo, hi, |t| k.value(x - t) * g(t));
        }
    }
    total
}

#[test]
fn poisson_spot_values() {
    let l = 2.0 * PI;
    assert!((g_poisson(0.0, l) + PI / 6.0).abs() < 1e-15);
    assert!((g_poisson(PI, l) - PI / 12.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn poisson_is_even_and_periodic(x in -20.0f64..20.0, l in 0.5f64..10.0) {
        let g = g_poisson(x, l);
        prop_assert!((g - g_poisson(-x, l)).abs() < 1e-12 * l);
        prop_assert!((g - g_poisson(x + l, l)).abs() < 1e-12 * l.max(x.abs()));
    }

    #[test]
    fn poisson_is_piecewise_quadratic(u in 0.05f64..0.95, l in 0.5f64..10.0) {
        // second difference of a quadratic with G'' = -1/L
        let x = u * l;
        let h = 0.04 * l * u.min(1.0 - u);
        let dd = g_poisson(x + h, l) + g_poisson(x - h, l) - 2.0 * g_poisson(x, l);
        prop_assert!((dd + h * h / l).abs() < 1e-12 * l);
    }

    #[test]
    fn derivative_jumps_by_one(l in 0.5f64..10.0) {
        let jp = g_poisson_deriv_sided(0.0, l, Side::Right) - g_poisson_deriv_sided(0.0, l, Side::Left);
        let jy = g_yukawa_deriv_sided(0.0, l, Side::Right) - g_yukawa_deriv_sided(0.0, l, Side::Left);
        prop_assert!((jp - 1.0).abs() < 1e-14);
        prop_assert!((jy - 1.0).abs() < 1e-14);
    }

    #[test]
    fn yukawa_satisfies_its_ode(u in 0.05f64..0.95, l in 0.5f64..10.0) {
        let x = u * l;
        let h = 1e-3 * l * u.min(1.0 - u);
        let dd = (g_yukawa(x + h, l) + g_yukawa(x - h, l) - 2.0 * g_yukawa(x, l)) / (h * h);
        prop_assert!((dd - g_yukawa(x, l)).abs() < 1e-5 * g_yukawa(x, l).abs().max(1.0));
    }

    #[test]
    fn kernels_invert_their_operators_on_cosines(j in 1u32..5, l in 1.0f64..8.0, u in 0.01f64..0.99) {
        let x = u * l;
        let w = 2.0 * PI * j as f64 / l;
        let c = |t: f64| (w * t).cos();
        let sp = convolve(KernelKind::Poisson, l, x, c);
        let sy = convolve(KernelKind::Yukawa, l, x, c);
        prop_assert!((sp + c(x) / (w * w)).abs() < 1e-12);
        prop_assert!((sy + c(x) / (1.0 + w * w)).abs() < 1e-12);
    }

    #[test]
    fn integrals(l in 0.5f64..10.0) {
        let rule = gauss_legendre(16).unwrap();
        let mp = rule.integrate(0.0, l, |t| g_poisson(t, l));
        let my = rule.integrate(0.0, l / 2.0, |t| g_yukawa(t, l)) + rule.integrate(l / 2.0, l, |t| g_yukawa(t, l));
        prop_assert!(mp.abs() < 1e-13 * l * l);
        prop_assert!((my + 1.0).abs() < 1e-12);
        prop_assert_eq!(Kernel::new(KernelKind::Yukawa, l).unwrap().mean_integral(), -1.0);
    }
}

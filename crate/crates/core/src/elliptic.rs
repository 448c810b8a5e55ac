//! Jacobi elliptic functions sn, cn, dn and the complete elliptic integral K(m).
//!
//! Everything is computed from scratch with the arithmetic–geometric mean:
//! K(m) directly from the AGM limit, and (sn, cn, dn) by the descending
//! Landen transformation driven by the same AGM sequence.
//!
//! Convention: `m` is the *parameter* (m = k²), so sn(x, m) here matches
//! `scipy.special.ellipj(x, m)` and Abramowitz & Stegun chapter 16. Libraries
//! disagree on this; double-check before comparing against another source.

use crate::error::{Error, Result};

/// AGM iterations stop once the co-modulus term drops below this.
const AGM_TOL: f64 = 1e-15;
const MAX_AGM_ITERS: usize = 64;

/// Elliptic modulus parameter restricted to the open interval (0, 1).
///
/// The boundary values m = 0 and m = 1 are degenerate (trigonometric and
/// hyperbolic limits); the elliptic functions themselves accept them, but
/// every Lamé computation requires a strictly interior modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 && m < 1.0 {
            Ok(Self(m))
        } else {
            Err(Error::ModulusRange(m))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The values (sn, cn, dn) at a common argument.
#[derive(Debug, Clone, Copy)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Complete elliptic integral of the first kind,
/// K(m) = ∫₀^{π/2} dθ / √(1 − m sin²θ), for 0 ≤ m < 1.
///
/// Computed as π / (2 · agm(1, √(1−m))); the AGM converges quadratically,
/// so the relative error is below 1e-14 over the whole domain.
pub fn complete_elliptic_k(m: f64) -> Result<f64> {
    if !m.is_finite() || !(0.0..1.0).contains(&m) {
        return Err(Error::EllipticDomain(m));
    }
    if m == 0.0 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..MAX_AGM_ITERS {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (a + b))
}

/// Jacobi elliptic functions (sn, cn, dn)(x, m) for m in [0, 1].
///
/// The argument is reduced modulo the period 4K(m) and folded into [0, K]
/// with the quarter-period symmetries, then the amplitude is recovered by
/// running the AGM levels backwards (descending Landen transformation).
/// dn is reconstructed from the identity dn² = 1 − m sn², which keeps it
/// well conditioned at x = K where the cos-ratio form degenerates.
pub fn jacobi_elliptic(x: f64, m: f64) -> Result<EllipticTriple> {
    if !m.is_finite() || !(0.0..=1.0).contains(&m) {
        return Err(Error::JacobiDomain(m));
    }
    if m == 0.0 {
        return Ok(EllipticTriple {
            sn: x.sin(),
            cn: x.cos(),
            dn: 1.0,
        });
    }
    if m == 1.0 {
        let sech = 1.0 / x.cosh();
        return Ok(EllipticTriple {
            sn: x.tanh(),
            cn: sech,
            dn: sech,
        });
    }

    let quarter = complete_elliptic_k(m).expect("domain already checked");

    // Fold x into [0, K]: sn(x+2K) = -sn(x), cn(x+2K) = -cn(x), dn periodic 2K,
    // then sn(2K-x) = sn(x), cn(2K-x) = -cn(x), dn(2K-x) = dn(x).
    let period = 4.0 * quarter;
    let mut r = x % period;
    if r < 0.0 {
        r += period;
    }
    let mut sn_sign = 1.0;
    let mut cn_sign = 1.0;
    if r >= 2.0 * quarter {
        r -= 2.0 * quarter;
        sn_sign = -sn_sign;
        cn_sign = -cn_sign;
    }
    if r > quarter {
        r = 2.0 * quarter - r;
        cn_sign = -cn_sign;
    }

    // AGM levels: a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n),
    // c_{n+1} = (a_n - b_n)/2, until c is negligible.
    let mut scale = vec![1.0_f64];
    let mut comod = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while *comod.last().unwrap() > AGM_TOL && scale.len() < MAX_AGM_ITERS {
        let a = *scale.last().unwrap();
        scale.push(0.5 * (a + b));
        comod.push(0.5 * (a - b));
        b = (a * b).sqrt();
    }
    let top = scale.len() - 1;

    // Amplitude at the top level, then descend:
    // phi_{n-1} = (phi_n + asin((c_n / a_n) sin phi_n)) / 2.
    let mut phi = (1u64 << top) as f64 * scale[top] * r;
    for level in (1..=top).rev() {
        let s = (comod[level] / scale[level] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok(EllipticTriple {
        sn: sn_sign * sn,
        cn: cn_sign * cn,
        dn,
    })
}

/// Analytic derivatives (sn', cn', dn') = (cn·dn, −sn·dn, −m·sn·cn).
pub fn jacobi_derivatives(t: EllipticTriple, m: f64) -> (f64, f64, f64) {
    (t.cn * t.dn, -t.sn * t.dn, -m * t.sn * t.cn)
}

#[cfg(test)]
mod tests {
    // reference values are frozen exactly as the oracle printed them
    #![allow(clippy::excessive_precision)]

    use super::*;
    use proptest::prelude::*;

    /// Independent quadrature oracle for K(m): composite Simpson on the
    /// defining integral. Used to pin the AGM values, never the other way.
    fn k_by_quadrature(m: f64, panels: usize) -> f64 {
        let n = 2 * panels + 1;
        let h = std::f64::consts::FRAC_PI_2 / (n - 1) as f64;
        let f = |theta: f64| 1.0 / (1.0 - m * theta.sin().powi(2)).sqrt();
        let mut sum = f(0.0) + f(std::f64::consts::FRAC_PI_2);
        for i in 1..n - 1 {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(
            complete_elliptic_k(0.0).unwrap(),
            std::f64::consts::FRAC_PI_2
        );
    }

    #[test]
    fn k_matches_quadrature_oracle() {
        for &m in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let agm = complete_elliptic_k(m).unwrap();
            let quad = k_by_quadrature(m, 10_000);
            assert!(
                (agm - quad).abs() < 1e-12,
                "K({m}): agm={agm:.16}, quadrature={quad:.16}"
            );
        }
    }

    #[test]
    fn k_reference_values() {
        // scipy.special.ellipk
        let cases: &[(f64, f64)] = &[
            (0.1, 1.6124413487202192),
            (0.3, 1.713889448178791),
            (0.5, 1.8540746773013719),
            (0.7, 2.0753631352924691),
            (0.9, 2.5780921133481733),
        ];
        for &(m, expected) in cases {
            let got = complete_elliptic_k(m).unwrap();
            assert!(
                (got - expected).abs() < 1e-13,
                "K({m}) = {got:.16}, expected {expected:.16}"
            );
        }
    }

    #[test]
    fn k_diverges_towards_one() {
        let k = complete_elliptic_k(0.999999).unwrap();
        assert!(k > 7.0, "K(0.999999) = {k}");
        // Asymptotic K ~ ln(16/(1-m))/2 near m = 1.
        let asym = (16.0 / 1e-6_f64).ln() / 2.0;
        assert!((k - asym).abs() < 1e-4, "K = {k}, asymptotic {asym}");
    }

    #[test]
    fn k_domain_errors() {
        assert!(complete_elliptic_k(1.0).is_err());
        assert!(complete_elliptic_k(-0.1).is_err());
        assert!(complete_elliptic_k(f64::NAN).is_err());
    }

    #[test]
    fn trigonometric_limit() {
        for &x in &[0.0, 0.5, 1.7, -2.3, 9.0] {
            let t = jacobi_elliptic(x, 0.0).unwrap();
            assert!((t.sn - x.sin()).abs() < 1e-14);
            assert!((t.cn - x.cos()).abs() < 1e-14);
            assert_eq!(t.dn, 1.0);
        }
        // m -> 0 limit through the AGM path
        for &x in &[0.4, 1.9, -3.3] {
            let t = jacobi_elliptic(x, 1e-13).unwrap();
            assert!((t.sn - x.sin()).abs() < 1e-10);
            assert!((t.cn - x.cos()).abs() < 1e-10);
            assert!((t.dn - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hyperbolic_limit() {
        for &x in &[0.0, 0.8, 2.5, -1.4] {
            let t = jacobi_elliptic(x, 1.0).unwrap();
            assert!((t.sn - x.tanh()).abs() < 1e-14);
            assert!((t.cn - 1.0 / x.cosh()).abs() < 1e-14);
            assert!((t.dn - 1.0 / x.cosh()).abs() < 1e-14);
        }
        for &x in &[0.4, 1.9] {
            let t = jacobi_elliptic(x, 1.0 - 1e-13).unwrap();
            assert!((t.sn - x.tanh()).abs() < 1e-10);
            assert!((t.cn - 1.0 / x.cosh()).abs() < 1e-10);
            assert!((t.dn - 1.0 / x.cosh()).abs() < 1e-10);
        }
    }

    #[test]
    fn origin_values() {
        for &m in &[0.05, 0.5, 0.95] {
            let t = jacobi_elliptic(0.0, m).unwrap();
            assert_eq!(t.sn, 0.0);
            assert_eq!(t.cn, 1.0);
            assert_eq!(t.dn, 1.0);
        }
    }

    #[test]
    fn quarter_period_values() {
        let m = 0.5;
        let k = complete_elliptic_k(m).unwrap();
        let t = jacobi_elliptic(k, m).unwrap();
        assert!((t.sn - 1.0).abs() < 1e-12, "sn(K) = {}", t.sn);
        assert!(t.cn.abs() < 1e-10, "cn(K) = {}", t.cn);
        assert!((t.dn - (1.0 - m).sqrt()).abs() < 1e-12, "dn(K) = {}", t.dn);
    }

    #[test]
    fn reference_triples() {
        // scipy.special.ellipj
        let cases: &[(f64, f64, f64, f64, f64)] = &[
            (
                0.7,
                0.3,
                0.63230477631086457,
                0.77471973632692981,
                0.93811363968143036,
            ),
            (
                2.5,
                0.8,
                0.99401801921871435,
                -0.10921619599905298,
                0.45775816975211137,
            ),
            (
                -1.3,
                0.6,
                -0.90989570792534147,
                0.41483707729546271,
                0.70940389089673406,
            ),
            (
                17.35,
                0.95,
                0.099699524955756416,
                -0.99501759015788083,
                0.9952673030334197,
            ),
            (
                0.5,
                0.5,
                0.47075047365565736,
                0.88226639489044023,
                0.94297242577738571,
            ),
            (
                3.0,
                0.2,
                0.31284366176253148,
                -0.94980463427749751,
                0.99016451595631416,
            ),
        ];
        for &(x, m, sn, cn, dn) in cases {
            let t = jacobi_elliptic(x, m).unwrap();
            assert!((t.sn - sn).abs() < 1e-11, "sn({x},{m}) = {}", t.sn);
            assert!((t.cn - cn).abs() < 1e-11, "cn({x},{m}) = {}", t.cn);
            assert!((t.dn - dn).abs() < 1e-11, "dn({x},{m}) = {}", t.dn);
        }
    }

    #[test]
    fn periodicity_over_4k() {
        let m = 0.5;
        let k = complete_elliptic_k(m).unwrap();
        for i in 0..200 {
            let x = i as f64 * (4.0 * k) / 200.0;
            let a = jacobi_elliptic(x, m).unwrap();
            let b = jacobi_elliptic(x + 4.0 * k, m).unwrap();
            assert!(
                (a.sn - b.sn).abs() < 1e-10,
                "sn period violation at x = {x}"
            );
            assert!((a.cn - b.cn).abs() < 1e-10);
            assert!((a.dn - b.dn).abs() < 1e-10);
        }
    }

    #[test]
    fn derivatives_at_origin_and_quarter_period() {
        let m = 0.5;
        let t0 = jacobi_elliptic(0.0, m).unwrap();
        assert_eq!(jacobi_derivatives(t0, m), (1.0, 0.0, -0.0));
        let k = complete_elliptic_k(m).unwrap();
        let tk = jacobi_elliptic(k, m).unwrap();
        let (dsn, _, _) = jacobi_derivatives(tk, m);
        assert!(dsn.abs() < 1e-10, "sn'(K) = {dsn}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let step = 1e-5;
        for &m in &[0.2, 0.5, 0.8] {
            for i in 0..40 {
                let x = -4.0 + i as f64 * 0.37;
                let t = jacobi_elliptic(x, m).unwrap();
                let (dsn, dcn, ddn) = jacobi_derivatives(t, m);
                let plus = jacobi_elliptic(x + step, m).unwrap();
                let minus = jacobi_elliptic(x - step, m).unwrap();
                let fd_sn = (plus.sn - minus.sn) / (2.0 * step);
                let fd_cn = (plus.cn - minus.cn) / (2.0 * step);
                let fd_dn = (plus.dn - minus.dn) / (2.0 * step);
                assert!((dsn - fd_sn).abs() < 1e-8, "sn' at x={x}, m={m}");
                assert!((dcn - fd_cn).abs() < 1e-8, "cn' at x={x}, m={m}");
                assert!((ddn - fd_dn).abs() < 1e-8, "dn' at x={x}, m={m}");
            }
        }
    }

    #[test]
    fn modulus_type_rejects_boundaries() {
        assert!(EllipticModulus::new(0.0).is_err());
        assert!(EllipticModulus::new(1.0).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
        assert!(EllipticModulus::new(0.5).is_ok());
    }

    proptest! {
        #[test]
        fn pythagorean_identities(x in -50.0_f64..50.0, m in 0.0_f64..=1.0) {
            let t = jacobi_elliptic(x, m).unwrap();
            prop_assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() < 1e-12);
            prop_assert!((t.dn * t.dn + m * t.sn * t.sn - 1.0).abs() < 1e-12);
            prop_assert!(t.sn.abs() <= 1.0 + 1e-14);
            prop_assert!(t.cn.abs() <= 1.0 + 1e-14);
            prop_assert!(t.dn <= 1.0 + 1e-14);
            prop_assert!(t.dn >= (1.0 - m).sqrt() - 1e-12);
        }
    }
}

//! Complex special functions: log-gamma on the cut plane, gamma-factor
//! products along vertical lines, and the Hurwitz zeta function.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cx, is_finite_cx, Cx, Real};
use crate::characters::DirichletCharacter;
use crate::selberg::FunctionalEquation;

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Number of Bernoulli corrections used by the Stirling series.
const STIRLING_TERMS: usize = 8;
/// Real part the argument is raised to before the Stirling series applies.
const STIRLING_SHIFT_TARGET: f64 = 10.0;
/// Bernoulli corrections in the Euler–Maclaurin tail of the Hurwitz zeta.
const EM_TERMS: usize = 8;

fn is_nonpositive_integer<T: Real>(z: Cx<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// Principal branch of log Γ(z).
///
/// The imaginary part is the continuous argument obtained from the positive
/// real axis, so along vertical lines it grows like `t log t` without jumps.
pub fn log_gamma<T: Real>(z: Cx<T>) -> Result<Cx<T>> {
    if !is_finite_cx(z) {
        return Err(Error::Invalid(format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("Gamma at {z}")));
    }
    let target = T::lit(STIRLING_SHIFT_TARGET);
    let mut w = z;
    let mut correction = Complex::new(T::zero(), T::zero());
    while w.re < target {
        correction = correction + w.ln();
        w = w + T::one();
    }
    let half = T::lit(0.5);
    let mut series = (w - half) * w.ln() - w + T::lit(0.5 * (2.0 * std::f64::consts::PI).ln());
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().take(STIRLING_TERMS).enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series = series + pow * T::lit(b / (two_k * (two_k - 1.0)));
        pow = pow * inv2;
    }
    let out = series - correction;
    if !is_finite_cx(out) {
        return Err(Error::Evaluation(format!("log_gamma overflow at {z}")));
    }
    Ok(out)
}

/// Σⱼ log Γ(λⱼ s + μⱼ) for the gamma factor of a functional equation.
pub fn gamma_factor_log<T: Real>(fe: &FunctionalEquation<T>, s: Cx<T>) -> Result<Cx<T>> {
    let mut acc = cx(T::zero(), T::zero());
    for term in fe.terms() {
        acc = acc + log_gamma(s * term.lambda() + term.mu())?;
    }
    Ok(acc)
}

/// Hurwitz zeta value with the Euler–Maclaurin remainder bound attached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct HurwitzValue<T> {
    pub value: Cx<T>,
    pub error_bound: T,
    pub shift: usize,
}

/// Default tolerance for [`hurwitz_zeta`].
pub const HURWITZ_TOL: f64 = 1e-13;

/// ζ(s, a) = Σ_{n≥0} (n+a)^{-s}, analytically continued, for a ∈ (0, 1].
pub fn hurwitz_zeta<T: Real>(s: Cx<T>, a: T) -> Result<HurwitzValue<T>> {
    hurwitz_zeta_tol(s, a, T::lit(HURWITZ_TOL))
}

/// [`hurwitz_zeta`] with an explicit tolerance on the remainder estimate.
pub fn hurwitz_zeta_tol<T: Real>(s: Cx<T>, a: T, tol: T) -> Result<HurwitzValue<T>> {
    if !(a > T::zero() && a <= T::one()) {
        return Err(Error::Invalid(format!("Hurwitz parameter a = {a} outside (0, 1]")));
    }
    if s == cx(T::one(), T::zero()) {
        return Err(Error::Pole("Hurwitz zeta at s = 1".into()));
    }
    if !is_finite_cx(s) {
        return Err(Error::Invalid(format!("non-finite argument {s}")));
    }
    let sigma = s.re;
    let m_terms = EM_TERMS;
    if sigma + T::from_usize_lossy(2 * m_terms + 1) <= T::zero() {
        return Err(Error::Precision(format!("Re s = {sigma} too negative for the remainder bound")));
    }
    let mut shift = (2.0 * s.im.abs().to_f64_lossy()).max(10.0).ceil() as usize;
    // (s)_{2M+1} |B_{2M+2}| / (2M+2)! is independent of N; only the power moves.
    let poch = (0..=2 * m_terms).fold(T::one(), |acc, j| acc * (s + T::from_usize_lossy(j)).norm());
    let b_next = T::lit(BERNOULLI_EVEN[m_terms].abs());
    let fact = (1..=2 * m_terms + 2).fold(T::one(), |acc, j| acc * T::from_usize_lossy(j));
    let remainder_bound = |n: usize| -> T {
        let base = T::from_usize_lossy(n) + a;
        let expo = sigma + T::from_usize_lossy(2 * m_terms + 1);
        poch * b_next / fact * base.powf(-expo) / expo
    };
    let mut bound = remainder_bound(shift);
    let mut guard = 0;
    while bound > tol {
        shift *= 2;
        guard += 1;
        if guard > 24 {
            return Err(Error::Precision(format!(
                "Euler-Maclaurin tail {bound:e} above tolerance {tol:e}"
            )));
        }
        bound = remainder_bound(shift);
    }

    let mut head = cx(T::zero(), T::zero());
    for n in 0..shift {
        let base = T::from_usize_lossy(n) + a;
        head = head + (-s * base.ln()).exp();
    }
    let big = T::from_usize_lossy(shift) + a;
    let log_big = big.ln();
    let big_pow = (-s * log_big).exp();
    let one = T::one();
    let mut tail = big_pow * big / (s - one) + big_pow * T::lit(0.5);
    // Σ_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}
    let mut poch_k = s; // (s)_1
    let mut pow = big_pow / big; // N^{-s-1}
    let inv_big2 = (big * big).recip();
    let mut factorial = T::lit(2.0);
    for k in 1..=m_terms {
        let b = T::lit(BERNOULLI_EVEN[k - 1]);
        tail = tail + poch_k * pow * (b / factorial);
        let kk = T::from_usize_lossy(2 * k);
        poch_k = poch_k * (s + kk - one) * (s + kk);
        pow = pow * inv_big2;
        factorial = factorial * (kk + one) * (kk + T::lit(2.0));
    }
    let value = head + tail;
    if !is_finite_cx(value) {
        return Err(Error::Evaluation(format!("Hurwitz zeta overflow at {s}")));
    }
    let rounding = T::epsilon() * T::from_usize_lossy(shift) * head.norm().max(T::one());
    Ok(HurwitzValue { value, error_bound: bound + rounding, shift })
}

/// ζ(s) through the Hurwitz routine with a = 1.
pub fn zeta<T: Real>(s: Cx<T>) -> Result<Cx<T>> {
    hurwitz_zeta(s, T::one()).map(|h| h.value)
}

/// L(w, χ) = q^{−w} Σ_{a mod q} χ(a) ζ(w, a/q), valid for any character mod q.
pub fn dirichlet_l<T: Real>(chi: &DirichletCharacter, w: Cx<T>) -> Result<Cx<T>> {
    let q = chi.modulus();
    let qf = T::from_u64(q).unwrap();
    let mut acc = cx(T::zero(), T::zero());
    for a in 1..=q {
        let c = chi.value::<T>(a);
        if c.norm_sqr() == T::zero() {
            continue;
        }
        acc = acc + c * hurwitz_zeta(w, T::from_u64(a).unwrap() / qf)?.value;
    }
    Ok(acc * (-w * qf.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    #[test]
    fn log_gamma_simple_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        let z = log_gamma(c(2.0, 3.0)).unwrap();
        let w = log_gamma(c(2.0, -3.0)).unwrap();
        assert!((z - w.conj()).norm() < 1e-14);
    }

    #[test]
    fn log_gamma_matches_reference_values() {
        // Reference values from a 30-digit evaluation.
        let cases = [
            ((2.0, 3.0), (-2.092_851_753_092_733, 2.302_396_543_466_867_6)),
            ((0.25, 50.0), (-78.598_880_432_701_84, 145.208_659_524_257_23)),
            ((-3.5, 0.5), (-2.197_949_943_452_405, -11.870_658_484_233_09)),
            ((0.1, -200.0), (-315.359_653_622_393_4, -859.034_963_111_959_9)),
        ];
        for ((x, y), (re, im)) in cases {
            let (re, im): (f64, f64) = (re, im);
            let v = log_gamma(c(x, y)).unwrap();
            let scale = 1.0 + re.abs().max(im.abs());
            assert!((v.re - re).abs() < 1e-13 * scale, "{x}+{y}i: {v}");
            assert!((v.im - im).abs() < 1e-13 * scale, "{x}+{y}i: {v}");
        }
    }

    #[test]
    fn log_gamma_poles() {
        for k in 0..5 {
            assert!(matches!(log_gamma(c(-(k as f64), 0.0)), Err(Error::Pole(_))));
        }
        assert!(log_gamma(c(-1.0, 1e-9)).is_ok());
    }

    #[test]
    fn log_gamma_reflection_oracle_on_vertical_line() {
        // Γ(z)Γ(1−z) = π / sin(πz) with z = 1/4 + 50i, so
        // log|Γ(1/4+50i)| + log|Γ(3/4+50i)| = log π − log|sin(πz)|.
        let z = c(0.25, 50.0);
        let lhs = log_gamma(z).unwrap().re + log_gamma(c(0.75, 50.0)).unwrap().re;
        // log|sin(π(x+iy))| = log( sqrt(sin²πx cosh²πy + cos²πx sinh²πy) ), large-y form
        let y = PI * 50.0;
        let log_sin = y - 2f64.ln() + 0.5 * (1.0 + (-2.0 * y).exp()).ln();
        let rhs = PI.ln() - log_sin;
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn hurwitz_special_values() {
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1.0).unwrap();
        assert!((z2.value.re - PI * PI / 6.0).abs() < 1e-13);
        let h = hurwitz_zeta(c(2.0, 0.0), 0.5).unwrap();
        assert!((h.value.re - PI * PI / 2.0).abs() < 1e-12);
        assert!(matches!(hurwitz_zeta(c(1.0, 0.0), 0.5), Err(Error::Pole(_))));
        assert!(hurwitz_zeta(c(2.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn hurwitz_reference_values() {
        let cases = [
            ((0.5, 30.0), 1.0, (-0.120_642_287_590_043_7, -0.583_691_214_763_706_3)),
            ((0.5, 20.0), 0.25, (-2.861_452_296_113_653, 2.841_262_807_892_352)),
            ((0.7, -3.0), 1.0 / 3.0, (-2.013_689_696_515_875, 0.791_430_003_535_167_6)),
            ((-0.5, 10.0), 0.75, (-0.544_422_366_475_909, 1.426_886_616_978_488_3)),
        ];
        for ((x, y), a, (re, im)) in cases {
            let v = hurwitz_zeta(c(x, y), a).unwrap();
            assert!((v.value - c(re, im)).norm() < 1e-12, "s={x}+{y}i a={a}: {}", v.value);
            assert!(v.error_bound < 1e-12);
        }
    }

    /// Alternating-series (Borwein) evaluation of ζ, independent of the
    /// Euler–Maclaurin path.
    fn zeta_borwein(s: Cx<f64>, n: usize) -> Cx<f64> {
        let ln_fact = |m: usize| (1..=m).map(|j| (j as f64).ln()).sum::<f64>();
        // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!), normalised by d_n.
        let terms: Vec<f64> = (0..=n)
            .map(|i| {
                ((n as f64).ln() + ln_fact(n + i - 1) + i as f64 * 4f64.ln()
                    - ln_fact(n - i)
                    - ln_fact(2 * i))
                .exp()
            })
            .collect();
        let mut d = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for t in &terms {
            acc += t;
            d.push(acc);
        }
        let dn = d[n];
        let mut total = c(0.0, 0.0);
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            total += (-s * ((k + 1) as f64).ln()).exp() * (sign * (d[k] - dn) / dn);
        }
        let factor = c(1.0, 0.0) - (c(2f64.ln(), 0.0) * (c(1.0, 0.0) - s)).exp();
        -total / factor
    }

    #[test]
    fn zeta_matches_alternating_series() {
        for &sigma in &[0.4, 0.5, 1.3, 2.0, 3.0] {
            for &t in &[-50.0, -17.0, -2.5, 0.5, 9.0, 33.0, 50.0] {
                let s = c(sigma, t);
                let em = zeta(s).unwrap();
                let alt = zeta_borwein(s, 90);
                assert!((em - alt).norm() < 1e-10 * (1.0 + alt.norm()), "s = {s}: {em} vs {alt}");
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let v = log_gamma(cx(0.5f32, 0.0)).unwrap();
        assert!((v.re - 0.572_364_9).abs() < 1e-5);
        let z = hurwitz_zeta_tol(cx(2.0f32, 0.0), 1.0, 1e-6).unwrap();
        assert!((z.value.re - 1.644_934).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn recurrence_holds(r in 0.5f64..100.0, th in -3.0f64..3.0) {
            let z = c(r * th.cos(), r * th.sin());
            prop_assume!(z.re > -90.0 && (z.im.abs() > 1e-3 || z.re > 0.0));
            let ratio = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap()).exp();
            prop_assert!((ratio / z - 1.0).norm() < 1e-12);
        }

        #[test]
        fn conjugation_symmetry(x in -20.0f64..50.0, y in 0.01f64..500.0) {
            let a = log_gamma(c(x, y)).unwrap();
            let b = log_gamma(c(x, -y)).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-15 * (1.0 + a.norm()));
        }
    }
}

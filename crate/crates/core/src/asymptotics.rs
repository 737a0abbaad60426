//! Stirling constants (A, B, C) of the gamma-factor ratio and the O(1/t)
//! check of its asymptotic form.

use serde::{Deserialize, Serialize};

use crate::complexfn::gamma_factor_log;
use crate::error::{Error, Result};
use crate::scalar::{cis, cx, least_squares, reduce_angle, Cx, Real};
use crate::selberg::FunctionalEquation;

/// Anchor heights of the least-squares fit.
pub const FIT_ANCHORS: [f64; 3] = [1.0e3, 3.0e3, 1.0e4];
/// Relative offsets k/16, k = −2..2, sampled around each anchor.
const FIT_OFFSETS: [f64; 5] = [-2.0 / 16.0, -1.0 / 16.0, 0.0, 1.0 / 16.0, 2.0 / 16.0];
/// Largest tolerated residual·t before the fit is declared broken.
pub const FIT_K_LIMIT: f64 = 100.0;

/// Closed-form candidates for the constants, used only as a cross-check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ClosedForm<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

/// (A, B, C) with fit diagnostics. The fitted values are authoritative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StirlingConstants<T> {
    pub a: T,
    /// Reduced to (−π, π].
    pub b: T,
    pub c: T,
    /// (t, |phase − asymptotic phase|) at the fit samples.
    pub fit_residuals: Vec<(T, T)>,
    /// max residual·t over the fit samples.
    pub k: T,
    pub closed_form: ClosedForm<T>,
    pub closed_form_agrees: bool,
}

impl<T: Real> StirlingConstants<T> {
    /// πCQ², the conductor candidate.
    pub fn conductor_scale(&self, fe: &FunctionalEquation<T>) -> T {
        T::PI() * self.c * fe.q_scale() * fe.q_scale()
    }

    /// Phase of the asymptotic form −t log(t/2e) + π/4 + A log t − t log C + B.
    pub fn asymptotic_phase(&self, t: T) -> T {
        asymptotic_phase(self.a, self.b, self.c, t)
    }

    pub fn asymptotic_ratio(&self, t: T) -> Cx<T> {
        cis(self.asymptotic_phase(t))
    }

    /// Same constants with B moved by `delta` (for perturbation checks).
    pub fn with_b(&self, b: T) -> Self {
        StirlingConstants { b, ..self.clone() }
    }
}

fn asymptotic_phase<T: Real>(a: T, b: T, c: T, t: T) -> T {
    let ln_t = t.ln();
    -t * (ln_t - T::LN_2() - T::one()) + T::FRAC_PI_4() + a * ln_t - t * c.ln() + b
}

/// Ḡ(1/2 − it)/G(1/2 + it), computed as exp(conj L − L) with L = log G(1/2 + it).
pub fn exact_ratio<T: Real>(fe: &FunctionalEquation<T>, t: T) -> Result<Cx<T>> {
    Ok(cis(exact_phase(fe, t)?))
}

/// Continuous phase −2 Im log G(1/2 + it) of [`exact_ratio`].
pub fn exact_phase<T: Real>(fe: &FunctionalEquation<T>, t: T) -> Result<T> {
    let l = gamma_factor_log(fe, cx(T::lit(0.5), t))?;
    Ok(-(l.im + l.im))
}

/// Closed-form Stirling candidates for a degree-1 gamma factor.
pub fn closed_form_constants<T: Real>(fe: &FunctionalEquation<T>) -> ClosedForm<T> {
    let half = T::lit(0.5);
    let mut a = T::zero();
    let mut log_c = T::zero();
    let mut b = -T::FRAC_PI_4();
    for term in fe.terms() {
        let (lambda, mu) = (term.lambda(), term.mu());
        a = a - (mu.im + mu.im);
        log_c = log_c + (lambda + lambda) * lambda.ln();
        b = b - (mu.im + mu.im) * lambda.ln() - T::PI() * (lambda * half + mu.re - half);
    }
    ClosedForm { a, b: reduce_angle(b), c: T::lit(2.0) * log_c.exp() }
}

/// Fits (A, B, C) to the exact phase near t ∈ {10³, 3·10³, 10⁴}.
pub fn stirling_constants<T: Real>(fe: &FunctionalEquation<T>) -> Result<StirlingConstants<T>> {
    let anchors: Vec<T> = FIT_ANCHORS.iter().map(|t| T::lit(*t)).collect();
    stirling_constants_at(fe, &anchors)
}

/// [`stirling_constants`] on caller-chosen anchors.
///
/// Model: phase + t log t − t(1 + log 2) − π/4 = −t log C + A log t + B + D/t + E/t².
pub fn stirling_constants_at<T: Real>(fe: &FunctionalEquation<T>, anchors: &[T]) -> Result<StirlingConstants<T>> {
    let d = fe.degree();
    if (d - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
        return Err(Error::Degree(d.to_f64_lossy()));
    }
    if anchors.is_empty() || anchors.iter().any(|t| *t < T::lit(10.0)) {
        return Err(Error::Fit("fit anchors must be at least 10".into()));
    }
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    let mut ts = Vec::new();
    for &anchor in anchors {
        for off in FIT_OFFSETS {
            let t = anchor * (T::one() + T::lit(off));
            let ln_t = t.ln();
            let y = exact_phase(fe, t)? + t * ln_t - t * (T::one() + T::LN_2()) - T::FRAC_PI_4();
            rows.push(vec![t, ln_t, T::one(), t.recip(), (t * t).recip()]);
            ys.push(y);
            ts.push(t);
        }
    }
    let sol = least_squares(&rows, &ys).ok_or_else(|| Error::Fit("singular design matrix".into()))?;
    let (a, b_raw, c) = (sol[1], sol[2], (-sol[0]).exp());
    let b = reduce_angle(b_raw);
    let mut fit_residuals = Vec::with_capacity(ts.len());
    let mut k = T::zero();
    for &t in &ts {
        let diff = reduce_angle(exact_phase(fe, t)? - asymptotic_phase(a, b, c, t)).abs();
        k = k.max(diff * t);
        fit_residuals.push((t, diff));
    }
    if !(k <= T::lit(FIT_K_LIMIT)) || !(c > T::zero()) {
        return Err(Error::Fit(format!("residual * t reaches {k}")));
    }
    let closed_form = closed_form_constants(fe);
    let closed_form_agrees = (closed_form.a - a).abs() <= T::lit(1e-6)
        && (closed_form.c.ln() - c.ln()).abs() <= T::lit(1e-6)
        && reduce_angle(closed_form.b - b).abs() <= T::lit(1e-4);
    Ok(StirlingConstants { a, b, c, fit_residuals, k, closed_form, closed_form_agrees })
}

/// |exact/asymptotic − 1| at each t, with K = max residual·t.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Eq1Residuals<T> {
    pub rows: Vec<(T, T)>,
    pub k: T,
    /// max ||exact ratio| − 1|.
    pub max_modulus_defect: T,
}

pub fn verify_eq1_residual<T: Real>(
    fe: &FunctionalEquation<T>,
    sc: &StirlingConstants<T>,
    ts: &[T],
) -> Result<Eq1Residuals<T>> {
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("heights must be increasing".into()));
    }
    if ts.first().is_some_and(|t| *t < T::lit(10.0)) {
        return Err(Error::Invalid("heights must be at least 10".into()));
    }
    let mut rows = Vec::with_capacity(ts.len());
    let mut k = T::zero();
    let mut max_modulus_defect = T::zero();
    for &t in ts {
        let exact = exact_ratio(fe, t)?;
        max_modulus_defect = max_modulus_defect.max((exact.norm() - T::one()).abs());
        // exact/asymptotic = e^{iΔ}; |e^{iΔ} − 1| = 2|sin(Δ/2)|
        let delta = exact_phase(fe, t)? - sc.asymptotic_phase(t);
        let r = (T::lit(2.0) * (delta * T::lit(0.5)).sin()).abs();
        k = k.max(r * t);
        rows.push((t, r));
    }
    Ok(Eq1Residuals { rows, k, max_modulus_defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{build_l_element, enumerate_characters};
    use crate::complexfn::log_gamma;
    use crate::selberg::GammaFactorTerm;

    fn zeta_fe() -> FunctionalEquation<f64> {
        build_l_element::<f64>(&enumerate_characters(1).unwrap()[0], 0.0).unwrap().fe
    }

    fn single(mu: Cx<f64>) -> FunctionalEquation<f64> {
        FunctionalEquation::new(1.0, vec![GammaFactorTerm::new(0.5, mu).unwrap()], cx(1.0, 0.0), 0).unwrap()
    }

    #[test]
    fn ratio_is_unimodular_and_matches_single_term() {
        let fe = zeta_fe();
        for t in [1.0, 10.0, 100.0, 1e4] {
            assert!((exact_ratio(&fe, t).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        let direct = -2.0 * log_gamma(cx(0.25, 50.0)).unwrap().im;
        assert!((exact_phase(&fe, 100.0).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn phase_slope_tracks_imaginary_mu() {
        let delta = 0.3;
        let fe = single(cx(0.0, delta));
        let base = single(cx(0.0, 0.0));
        let diff = |t: f64| exact_phase(&fe, t).unwrap() - exact_phase(&base, t).unwrap();
        let slope = (diff(1e4) - diff(1e3)) / (1e4f64.ln() - 1e3f64.ln());
        assert!((slope + 2.0 * delta).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn zeta_constants() {
        let sc = stirling_constants(&zeta_fe()).unwrap();
        assert!(sc.a.abs() < 1e-8 && (sc.c - 1.0).abs() < 1e-8 && sc.b.abs() < 1e-6, "{sc:?}");
        assert!(sc.closed_form_agrees);
        assert!(sc.fit_residuals.iter().all(|(t, r)| *r <= 10.0 / t));
    }

    #[test]
    fn character_constants_give_conductor() {
        for q in [3u64, 4, 5, 7, 8] {
            for chi in enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive()) {
                let el = build_l_element::<f64>(&chi, 0.0).unwrap();
                let sc = stirling_constants(&el.fe).unwrap();
                assert!((sc.c - 1.0).abs() < 1e-8);
                assert!((sc.conductor_scale(&el.fe) - q as f64).abs() < 1e-6);
                let expect_b = if chi.parity() == 1 { -std::f64::consts::FRAC_PI_2 } else { 0.0 };
                assert!((sc.b - expect_b).abs() < 1e-5, "q={q} b={}", sc.b);
            }
        }
    }

    #[test]
    fn shift_gives_opposite_a() {
        let chi = enumerate_characters(3).unwrap().remove(1);
        for a0 in [0.5, -0.5] {
            let el = build_l_element::<f64>(&chi, a0).unwrap();
            let sc = stirling_constants(&el.fe).unwrap();
            assert!((sc.a + a0).abs() < 1e-7, "a = {}", sc.a);
            assert!(sc.closed_form_agrees);
        }
    }

    #[test]
    fn fit_is_stable_across_anchor_sets() {
        let chi = enumerate_characters(7).unwrap().remove(3);
        let el = build_l_element::<f64>(&chi, 0.5).unwrap();
        let lo = stirling_constants_at(&el.fe, &[1e3, 3e3]).unwrap();
        let hi = stirling_constants_at(&el.fe, &[3e3, 1e4]).unwrap();
        assert!((lo.a - hi.a).abs() < 1e-6);
        assert!((lo.c.ln() - hi.c.ln()).abs() < 1e-6);
        assert!(reduce_angle(lo.b - hi.b).abs() < 1e-4);
    }

    #[test]
    fn degree_two_is_rejected() {
        let t = GammaFactorTerm::new(0.5, cx(0.0, 0.0)).unwrap();
        let fe = FunctionalEquation::new(1.0, vec![t.clone(), t], cx(1.0, 0.0), 0).unwrap();
        assert!(matches!(stirling_constants(&fe), Err(Error::Degree(_))));
    }

    #[test]
    fn eq1_residuals_decay_like_one_over_t() {
        let fe = zeta_fe();
        let sc = stirling_constants(&fe).unwrap();
        let res = verify_eq1_residual(&fe, &sc, &[1e2, 1e3, 1e4]).unwrap();
        for w in res.rows.windows(2) {
            let ratio = w[0].1 / w[1].1;
            assert!(ratio > 8.0 && ratio < 12.0, "{ratio}");
        }
        assert!(res.k <= 10.0);
        let bumped = verify_eq1_residual(&fe, &sc.with_b(sc.b + 0.1), &[1e2, 1e3, 1e4]).unwrap();
        let floor = (cis(0.1) - cx(1.0, 0.0)).norm();
        assert!(bumped.rows.iter().all(|(_, r)| (r - floor).abs() < 0.01));
    }
}

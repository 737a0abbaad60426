//! Final identification: match the recovered periodic coefficients to a
//! character, pass to its primitive inducer, and test that
//! H(s) = Q^s G(s) F(s) / ((q′/π)^{s/2} Γ((s + iA + 𝔞)/2) L(s + iA, χ′))
//! is constant.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{stirling_constants, StirlingConstants};
use crate::characters::{gcd, CharacterGroup, DirichletCharacter};
use crate::complexfn::{dirichlet_l, gamma_factor_log, log_gamma};
use crate::detector::{conductor_from_constants, detect, DetectionReport, DetectorConfig, SignConvention};
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};
use crate::selberg::{smoothing_scale_for, validate_axioms, SelbergElement, ValidationReport};
use crate::smoothing::{smoothed_value_at, SMOOTHING_TOL};

/// Largest coprime deviation accepted by [`match_character`].
pub const MATCH_TOL: f64 = 0.2;
/// Default H-constancy tolerance of the verdict.
pub const H_TOL: f64 = 1e-4;
pub const SAMPLE_SIGMAS: [f64; 3] = [0.3, 0.5, 1.7];
pub const SAMPLE_HEIGHTS: [f64; 4] = [3.0, -3.0, 5.0, -5.0];

/// The 12 default sample points σ ∈ {0.3, 0.5, 1.7}, t ∈ {±3, ±5}.
pub fn default_sample_points<T: Real>() -> Vec<Cx<T>> {
    SAMPLE_SIGMAS
        .iter()
        .flat_map(|s| SAMPLE_HEIGHTS.iter().map(move |t| cx(T::lit(*s), T::lit(*t))))
        .collect()
}

/// Character mod q closest to a(m)·m^{−ia} on the units, with its deviation.
pub fn best_character<T: Real>(table: &[Cx<T>], q: u64, a: T) -> Result<(DirichletCharacter, T)> {
    if (table.len() as u64) < q {
        return Err(Error::InsufficientData { needed: q as usize, available: table.len() });
    }
    let twisted: Vec<Cx<T>> =
        table.iter().enumerate().map(|(i, v)| *v * crate::scalar::cis(-a * T::from_usize_lossy(i + 1).ln())).collect();
    let group = CharacterGroup::new(q)?;
    let mut best: Option<(DirichletCharacter, T)> = None;
    for chi in group.iter() {
        let dev = (1..=q)
            .filter(|m| gcd(*m, q) == 1)
            .map(|m| (twisted[m as usize - 1] - chi.value::<T>(m)).norm())
            .fold(T::zero(), T::max);
        if best.as_ref().is_none_or(|(_, d)| dev < *d) {
            best = Some((chi, dev));
        }
    }
    Ok(best.expect("character group is never empty"))
}

/// The character mod q with a(m)·m^{−ia} ≈ χ(m) for gcd(m, q) = 1.
///
/// NoMatch if the best coprime deviation reaches 0.2, or if an entry with
/// gcd(m, q) > 1 is not small.
pub fn match_character<T: Real>(table: &[Cx<T>], q: u64, a: T) -> Result<DirichletCharacter> {
    let (chi, dev) = best_character(table, q, a)?;
    let tol = T::lit(MATCH_TOL);
    let stray = (1..=q)
        .filter(|m| gcd(*m, q) != 1)
        .map(|m| table[m as usize - 1].norm())
        .fold(T::zero(), T::max);
    if dev >= tol || stray >= tol {
        return Err(Error::NoMatch { best_deviation: dev.max(stray).to_f64_lossy() });
    }
    Ok(chi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct HSample<T> {
    pub s: Cx<T>,
    pub value: Cx<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct HCheck<T> {
    pub samples: Vec<HSample<T>>,
    /// max |H(sᵢ)/H(s₀) − 1|.
    pub constancy: T,
}

/// Values F(s) at the sample points, by the smoothed sum.
pub fn f_values<T: Real>(el: &SelbergElement<T>, points: &[Cx<T>], x_cap: f64) -> Result<Vec<Cx<T>>> {
    let x = smoothing_scale_for(&el.coeffs, x_cap);
    points.iter().map(|s| smoothed_value_at(el, *s, x, T::lit(SMOOTHING_TOL)).map(|v| v.value)).collect()
}

/// H at the sample points for F(s) = L(s + i·a_shift, χ′).
///
/// When both sides have a pole, the regularising factor s(s − 1) of the
/// proof multiplies numerator and denominator alike and cancels, so it is
/// not applied numerically; sample points stay away from the pole.
pub fn verify_h_constant<T: Real>(
    el: &SelbergElement<T>,
    a_shift: T,
    chi_prime: &DirichletCharacter,
    points: &[Cx<T>],
) -> Result<HCheck<T>> {
    let f = f_values(el, points, 2.0e4)?;
    h_from_values(el, a_shift, chi_prime, points, &f)
}

fn h_from_values<T: Real>(
    el: &SelbergElement<T>,
    a_shift: T,
    chi_prime: &DirichletCharacter,
    points: &[Cx<T>],
    f: &[Cx<T>],
) -> Result<HCheck<T>> {
    if points.is_empty() {
        return Err(Error::Invalid("no sample points".into()));
    }
    let q_prime = T::from_u64(chi_prime.modulus()).unwrap();
    let parity = T::from_u8(chi_prime.parity()).unwrap();
    let half = T::lit(0.5);
    let mut samples = Vec::with_capacity(points.len());
    for (&s, &fv) in points.iter().zip(f) {
        if let Some(rho) = el.fe.pole_location() {
            if (s - rho).norm() < T::lit(0.5) {
                return Err(Error::Evaluation(format!("sample point {s} too close to the pole {rho}")));
            }
        }
        let w = s + cx(T::zero(), a_shift);
        let l = dirichlet_l(chi_prime, w)?;
        if l.norm() < T::lit(1e-8) {
            return Err(Error::Evaluation(format!("L vanishes near {s}; resample")));
        }
        let log_num = s * el.fe.q_scale().ln() + gamma_factor_log(&el.fe, s)?;
        let log_den = s * half * (q_prime / T::PI()).ln() + log_gamma((w + parity) * half)?;
        samples.push(HSample { s, value: (log_num - log_den).exp() * fv / l });
    }
    let h0 = samples[0].value;
    let constancy = samples.iter().map(|h| (h.value / h0 - cx(T::one(), T::zero())).norm()).fold(T::zero(), T::max);
    Ok(HCheck { samples, constancy })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Identified,
    Inconsistent,
}

/// Outcome of one sign candidate of the convention probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProbeBranch<T> {
    pub convention: SignConvention,
    pub a_shift: T,
    pub matched: bool,
    pub deviation: T,
    pub q_prime: u64,
    pub h_constancy: Option<T>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ConventionProbe<T> {
    pub selected: SignConvention,
    pub branches: Vec<ProbeBranch<T>>,
    /// Number of branches with a match and H constant within tolerance.
    pub passing: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Identification<T> {
    pub label: String,
    /// Shift with F(s) = L(s + i·A_shift, χ′).
    #[serde(rename = "A_shift")]
    pub a_shift: T,
    /// Fitted constant A of the gamma-ratio asymptotic.
    #[serde(rename = "A_fit")]
    pub a_fit: T,
    pub chi_prime: Option<DirichletCharacter>,
    /// Position of χ′ in the enumeration order mod q′.
    pub chi_prime_index: Option<usize>,
    pub q_prime: Option<u64>,
    pub h_samples: Vec<HSample<T>>,
    pub h_constancy: Option<T>,
    pub h_tolerance: T,
    pub verdict: Verdict,
    pub convention: ConventionProbe<T>,
    pub stirling: StirlingConstants<T>,
    pub validation: ValidationReport<T>,
    pub detection: Option<DetectionReport<T>>,
    /// Reasons for an inconsistent verdict.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifyConfig {
    pub detector: DetectorConfig,
    pub sample_budget: usize,
    pub h_tol: f64,
    /// Largest smoothing parameter for F values off the critical line.
    pub x_cap: f64,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        IdentifyConfig { detector: DetectorConfig::default(), sample_budget: 1000, h_tol: H_TOL, x_cap: 2.0e4 }
    }
}

pub fn identify<T: Real>(el: &SelbergElement<T>) -> Result<Identification<T>> {
    identify_with(el, &IdentifyConfig::default())
}

/// Full pipeline: validation, constants, detection, character match under
/// both signs of A, inducer, and the H test.
pub fn identify_with<T: Real>(el: &SelbergElement<T>, cfg: &IdentifyConfig) -> Result<Identification<T>> {
    el.require_degree_one()?;
    let mut failures = Vec::new();
    let validation = validate_axioms(el, cfg.sample_budget)?;
    if !validation.passed {
        failures.push("axiom validation failed".to_string());
    }
    let sc = stirling_constants(&el.fe)?;
    let (table, q, detection) = match detect(el, &sc, &cfg.detector) {
        Ok(rep) => {
            if rep.periodicity_residuals.iter().any(|r| !r.passed) {
                failures.push("periodicity residuals above tolerance".to_string());
            }
            let table: Vec<Cx<T>> = rep.coeff_table.iter().map(|c| c.value).collect();
            (table, rep.q_detected, Some(rep))
        }
        Err(e @ Error::ConductorMismatch { .. }) => {
            failures.push(format!("detection: {e}"));
            // Diagnostic only: read the table directly at the constants' conductor.
            let (scaled, q) = conductor_from_constants(&sc, &el.fe);
            let q = q.unwrap_or_else(|| scaled.round().to_u64().unwrap_or(1).max(1));
            (el.coeffs.range(1, q as usize)?, q, None)
        }
        Err(e) => return Err(e),
    };

    let points = default_sample_points::<T>();
    let f = f_values(el, &points, cfg.x_cap)?;
    let h_tol = T::lit(cfg.h_tol);
    let degenerate = sc.a.abs() < T::lit(1e-9);
    let candidates: &[SignConvention] =
        if degenerate { &[SignConvention::Indeterminate] } else { &[SignConvention::Minus, SignConvention::Plus] };
    let mut branches = Vec::new();
    let mut results = Vec::new();
    for &conv in candidates {
        let a_shift = if conv == SignConvention::Plus { sc.a } else { -sc.a };
        let (chi, deviation) = best_character(&table, q, -a_shift)?;
        let matched = match_character(&table, q, -a_shift).is_ok();
        let (q_prime, chi_prime) = chi.conductor_and_inducer();
        let h = h_from_values(el, a_shift, &chi_prime, &points, &f);
        branches.push(ProbeBranch {
            convention: conv,
            a_shift,
            matched,
            deviation,
            q_prime,
            h_constancy: h.as_ref().ok().map(|h| h.constancy),
            error: h.as_ref().err().map(|e| e.to_string()),
        });
        results.push((conv, a_shift, matched, q_prime, chi_prime, h.ok()));
    }
    let passes = |r: &(SignConvention, T, bool, u64, DirichletCharacter, Option<HCheck<T>>)| {
        r.2 && r.5.as_ref().is_some_and(|h| h.constancy <= h_tol)
    };
    let passing = results.iter().filter(|r| passes(r)).count();
    let score = |r: &(SignConvention, T, bool, u64, DirichletCharacter, Option<HCheck<T>>)| {
        (!passes(r), r.5.as_ref().map_or(T::infinity(), |h| h.constancy))
    };
    let chosen = results
        .into_iter()
        .min_by(|x, y| {
            let (a, b) = (score(x), score(y));
            a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        })
        .expect("at least one candidate");
    let (conv, a_shift, matched, q_prime, chi_prime, h) = chosen;
    if !matched {
        failures.push(format!("no character mod {q} matches the coefficients"));
    }
    match &h {
        Some(h) if h.constancy > h_tol => failures.push(format!("H varies by {:e}", h.constancy.to_f64_lossy())),
        None => failures.push("H could not be evaluated".to_string()),
        _ => {}
    }
    if passing > 1 {
        failures.push("both sign conventions pass".to_string());
    }
    let detection = detection.map(|mut d| {
        d.convention = Some(conv);
        d
    });
    let chi_prime_index = CharacterGroup::new(q_prime).ok().and_then(|g| g.index_of(&chi_prime));
    let verdict = if failures.is_empty() { Verdict::Identified } else { Verdict::Inconsistent };
    Ok(Identification {
        label: el.label.clone(),
        a_shift,
        a_fit: sc.a,
        chi_prime: Some(chi_prime),
        chi_prime_index,
        q_prime: Some(q_prime),
        h_constancy: h.as_ref().map(|h| h.constancy),
        h_samples: h.map(|h| h.samples).unwrap_or_default(),
        h_tolerance: h_tol,
        verdict,
        convention: ConventionProbe { selected: conv, branches, passing },
        stirling: sc,
        validation,
        detection,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{build_l_element, enumerate_characters};

    #[test]
    fn exact_table_lookup() {
        let table = vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.0)];
        let chi = match_character(&table, 4, 0.0).unwrap();
        assert!((chi.value::<f64>(3) - cx(-1.0, 0.0)).norm() < 1e-15);
        let bad = vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(1.0, 0.0), cx(2.0, 0.0)];
        assert!(matches!(match_character(&bad, 4, 0.0), Err(Error::NoMatch { .. })));
    }

    #[test]
    fn twisted_table_needs_the_right_shift() {
        let chi = enumerate_characters(5).unwrap().remove(1);
        let el = build_l_element::<f64>(&chi, 0.5).unwrap();
        let table = el.coeffs.range(1, 5).unwrap();
        // a(m) = χ(m) m^{−0.5i}, so a(m)·m^{−ia} is χ for a = −0.5.
        assert_eq!(match_character(&table, 5, -0.5).unwrap(), chi);
        assert!(match_character(&table, 5, 0.5).is_err());
    }

    #[test]
    fn h_is_constant_for_mod4() {
        let chi = enumerate_characters(4).unwrap().remove(1);
        let el = build_l_element::<f64>(&chi, 0.0).unwrap();
        let h = verify_h_constant(&el, 0.0, &chi, &default_sample_points()).unwrap();
        assert!(h.constancy <= 1e-6, "{}", h.constancy);
        assert_eq!(h.samples.len(), 12);
    }

    #[test]
    fn h_is_constant_for_zeta() {
        let chi = enumerate_characters(1).unwrap().remove(0);
        let el = build_l_element::<f64>(&chi, 0.0).unwrap();
        let h = verify_h_constant(&el, 0.0, &chi, &default_sample_points()).unwrap();
        assert!(h.constancy <= 1e-6, "{}", h.constancy);
    }

    #[test]
    fn wrong_shift_breaks_constancy() {
        let chi = enumerate_characters(3).unwrap().remove(1);
        let el = build_l_element::<f64>(&chi, 0.5).unwrap();
        let right = verify_h_constant(&el, 0.5, &chi, &default_sample_points()).unwrap();
        let wrong = verify_h_constant(&el, -0.5, &chi, &default_sample_points()).unwrap();
        assert!(right.constancy <= 1e-6 && wrong.constancy > 1e-2);
    }
}

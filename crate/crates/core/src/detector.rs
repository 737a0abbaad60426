//! Conductor and coefficient detection from the support of F(α).

use serde::{Deserialize, Serialize};

use crate::asymptotics::StirlingConstants;
use crate::characters::{gcd, lcm};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use crate::selberg::{FunctionalEquation, SelbergElement};
use crate::transform::{eq5_invert, inversion_gain, LimitEstimate, RationalLimitEngine};

/// Default grid denominator (divisible by 1..6, 10, 12, 15, 20, 30).
pub const DEFAULT_GRID_DEN: u64 = 60;
/// Default height of the expsum detection route.
pub const DEFAULT_T: f64 = 1.0e5;
/// Peak threshold: this multiple of the median off-grid magnitude ...
pub const PEAK_FACTOR: f64 = 3.0;
/// ... but never below this floor.
pub const PEAK_FLOOR: f64 = 0.02;
/// Acceptance bound on |F̂(α) − F̂(α+1)|.
pub const PERIODICITY_TOL: f64 = 0.05;
const OFF_GRID_PROBES: usize = 256;
/// Fractional offset of the off-grid probes (golden ratio conjugate).
const OFF_GRID_OFFSET: f64 = 0.618_033_988_749_895;

/// One grid point of the support scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SupportPoint<T> {
    pub alpha: T,
    pub k: u64,
    pub den: u64,
    pub magnitude: T,
    pub spread: T,
    pub peak: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SupportProfile<T> {
    #[serde(rename = "T")]
    pub t_height: T,
    /// Grid denominator actually used (requested one, lcm'd with round(πCQ²)).
    pub grid_den: u64,
    pub requested_grid_den: u64,
    pub m_max: u64,
    pub points: Vec<SupportPoint<T>>,
    pub off_grid_median: T,
    pub threshold: T,
}

impl<T: Real> SupportProfile<T> {
    pub fn peaks(&self) -> impl Iterator<Item = &SupportPoint<T>> {
        self.points.iter().filter(|p| p.peak)
    }

    /// Largest off-peak magnitude divided by the smallest peak magnitude.
    pub fn contrast(&self) -> Option<T> {
        let min_peak = self.peaks().map(|p| p.magnitude).fold(T::infinity(), T::min);
        let max_off = self.points.iter().filter(|p| !p.peak).map(|p| p.magnitude).fold(T::zero(), T::max);
        min_peak.is_finite().then(|| max_off / min_peak)
    }
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    if v.is_empty() {
        return T::zero();
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) * T::lit(0.5)
    }
}

/// round(πCQ²) when it is a positive integer within 10⁻⁶, else None.
pub fn conductor_from_constants<T: Real>(sc: &StirlingConstants<T>, fe: &FunctionalEquation<T>) -> (T, Option<u64>) {
    let x = sc.conductor_scale(fe);
    let r = x.round();
    let q = (r >= T::one() && (x - r).abs() <= T::lit(1e-6)).then(|| r.to_u64()).flatten();
    (x, q)
}

fn limit_engine<T: Real>(el: &SelbergElement<T>, sc: &StirlingConstants<T>, t_height: T) -> Result<RationalLimitEngine<T>> {
    RationalLimitEngine::new(el, sc, &[t_height * T::lit(0.5), t_height])
}

/// |limit estimate| on α = k/grid_den, 1 ≤ k ≤ M·grid_den, by the expsum route.
pub fn scan_support<T: Real>(
    el: &SelbergElement<T>,
    sc: &StirlingConstants<T>,
    t_height: T,
    grid_den: u64,
    m_max: u64,
) -> Result<SupportProfile<T>> {
    let engine = limit_engine(el, sc, t_height)?;
    scan_with(&engine, el, sc, grid_den, m_max)
}

fn scan_with<T: Real>(
    engine: &RationalLimitEngine<T>,
    el: &SelbergElement<T>,
    sc: &StirlingConstants<T>,
    grid_den: u64,
    m_max: u64,
) -> Result<SupportProfile<T>> {
    use rayon::prelude::*;
    if grid_den == 0 || m_max == 0 {
        return Err(Error::Invalid("grid denominator and M must be positive".into()));
    }
    let scaled = sc.conductor_scale(&el.fe).round().to_u64().unwrap_or(1).max(1);
    let den = lcm(grid_den, scaled);
    if den.saturating_mul(m_max) > 2_000_000 {
        return Err(Error::Invalid(format!("grid of {den} x {m_max} points is too large")));
    }
    let estimates: Vec<LimitEstimate<T>> = (1..=den * m_max).into_par_iter().map(|k| engine.at_rational(k, den)).collect();
    let probes = (den * m_max) as usize;
    let stride = probes.div_ceil(OFF_GRID_PROBES).max(1);
    let off: Vec<T> = (0..probes)
        .step_by(stride)
        .map(|j| engine.at(T::lit((j as f64 + OFF_GRID_OFFSET) / den as f64)).value.norm())
        .collect();
    let off_grid_median = median(off);
    let threshold = (off_grid_median * T::lit(PEAK_FACTOR)).max(T::lit(PEAK_FLOOR));
    let points = estimates
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let magnitude = e.value.norm();
            SupportPoint { alpha: e.alpha, k: i as u64 + 1, den, magnitude, spread: e.spread, peak: magnitude > threshold }
        })
        .collect();
    Ok(SupportProfile {
        t_height: engine.largest_t(),
        grid_den: den,
        requested_grid_den: grid_den,
        m_max,
        points,
        off_grid_median,
        threshold,
    })
}

/// Least common denominator of the peak positions.
pub fn q_from_peaks<T: Real>(profile: &SupportProfile<T>) -> Option<u64> {
    let mut q = None;
    for p in profile.peaks() {
        let d = p.den / gcd(p.k, p.den);
        q = Some(q.map_or(d, |acc| lcm(acc, d)));
    }
    q
}

/// round(πCQ²), cross-checked against the peak denominators.
pub fn detect_q<T: Real>(profile: &SupportProfile<T>, sc: &StirlingConstants<T>, fe: &FunctionalEquation<T>) -> Result<u64> {
    let (scaled, from_constants) = conductor_from_constants(sc, fe);
    let from_peaks = q_from_peaks(profile).unwrap_or(0);
    match from_constants {
        Some(q) if q == from_peaks => Ok(q),
        Some(q) => Err(Error::ConductorMismatch { from_constants: q, from_peaks }),
        None => Err(Error::ConductorMismatch { from_constants: scaled.round().to_u64().unwrap_or(0), from_peaks }),
    }
}

/// A recovered coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CoeffEstimate<T> {
    pub m: usize,
    pub value: Cx<T>,
    pub uncertainty: T,
}

/// a(m) for m = 1..=M from the limits at α = m/q.
pub fn extract_coeffs<T: Real>(
    el: &SelbergElement<T>,
    sc: &StirlingConstants<T>,
    q: u64,
    t_height: T,
    m_max: usize,
) -> Result<Vec<CoeffEstimate<T>>> {
    let engine = limit_engine(el, sc, t_height)?;
    extract_with(&engine, el, sc, q, m_max)
}

fn extract_with<T: Real>(
    engine: &RationalLimitEngine<T>,
    el: &SelbergElement<T>,
    sc: &StirlingConstants<T>,
    q: u64,
    m_max: usize,
) -> Result<Vec<CoeffEstimate<T>>> {
    if q == 0 {
        return Err(Error::Invalid("q must be positive".into()));
    }
    (1..=m_max)
        .map(|m| {
            let lim = engine.at_rational(m as u64, q);
            let value = eq5_invert(el, sc, lim.value, lim.alpha)?;
            Ok(CoeffEstimate { m, value, uncertainty: lim.spread * inversion_gain(el, sc, lim.alpha) })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PeriodicityResidual<T> {
    pub alpha: T,
    pub residual: T,
    pub passed: bool,
}

/// |F̂(α) − F̂(α + 1)| for each α.
pub fn periodicity_check<T: Real>(
    el: &SelbergElement<T>,
    sc: &StirlingConstants<T>,
    t_height: T,
    alphas: &[T],
) -> Result<Vec<PeriodicityResidual<T>>> {
    let engine = limit_engine(el, sc, t_height)?;
    Ok(alphas
        .iter()
        .map(|&a| {
            let residual = (engine.at(a).value - engine.at(a + T::one()).value).norm();
            PeriodicityResidual { alpha: a, residual, passed: residual <= T::lit(PERIODICITY_TOL) }
        })
        .collect())
}

fn periodicity_rational<T: Real>(engine: &RationalLimitEngine<T>, q: u64) -> Vec<PeriodicityResidual<T>> {
    (1..=q)
        .map(|m| {
            let a = engine.at_rational(m, q);
            let b = engine.at_rational(m + q, q);
            let residual = (a.value - b.value).norm();
            PeriodicityResidual { alpha: a.alpha, residual, passed: residual <= T::lit(PERIODICITY_TOL) }
        })
        .collect()
}

/// Which sign relates the fitted A to the shift of the matching L-function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// F(s) = L(s − iA, χ′): a(n) n^{−iA} is periodic.
    Minus,
    /// F(s) = L(s + iA, χ′).
    Plus,
    /// A = 0, both readings coincide.
    Indeterminate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    #[serde(rename = "T")]
    pub t_height: f64,
    pub grid_den: u64,
    /// Scan α ∈ (0, M].
    pub m_max: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { t_height: DEFAULT_T, grid_den: DEFAULT_GRID_DEN, m_max: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DetectionReport<T> {
    pub q_detected: u64,
    pub q_from_constants: T,
    pub support_profile: SupportProfile<T>,
    pub coeff_table: Vec<CoeffEstimate<T>>,
    pub periodicity_residuals: Vec<PeriodicityResidual<T>>,
    /// Filled in by the identifier's probe.
    pub convention: Option<SignConvention>,
}

/// Scan, conductor detection, coefficient recovery for m ≤ max(q, 2·M... ) and
/// the periodicity check at α = m/q, m ≤ q.
pub fn detect<T: Real>(el: &SelbergElement<T>, sc: &StirlingConstants<T>, cfg: &DetectorConfig) -> Result<DetectionReport<T>> {
    el.require_degree_one()?;
    let t_height = T::lit(cfg.t_height);
    let engine = limit_engine(el, sc, t_height)?;
    let m_max = cfg.m_max.max(2);
    let support_profile = scan_with(&engine, el, sc, cfg.grid_den, m_max)?;
    let q = detect_q(&support_profile, sc, &el.fe)?;
    let coeff_table = extract_with(&engine, el, sc, q, q as usize)?;
    let periodicity_residuals = periodicity_rational(&engine, q);
    Ok(DetectionReport {
        q_detected: q,
        q_from_constants: sc.conductor_scale(&el.fe),
        support_profile,
        coeff_table,
        periodicity_residuals,
        convention: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::stirling_constants;
    use crate::characters::{build_l_element, enumerate_characters};
    use crate::scalar::cx;

    fn element(q: u64, a0: f64) -> (SelbergElement<f64>, StirlingConstants<f64>) {
        let chi = enumerate_characters(q).unwrap().into_iter().rfind(|c| c.is_primitive()).unwrap();
        let el = build_l_element(&chi, a0).unwrap();
        let sc = stirling_constants(&el.fe).unwrap();
        (el, sc)
    }

    #[test]
    fn zeta_support_at_integers() {
        let (el, sc) = element(1, 0.0);
        let p = scan_support(&el, &sc, 1e5, 12, 2).unwrap();
        let peaks: Vec<f64> = p.peaks().map(|x| x.alpha).collect();
        assert_eq!(peaks, vec![1.0, 2.0]);
        assert!(p.contrast().unwrap() <= 0.1);
        assert_eq!(detect_q(&p, &sc, &el.fe).unwrap(), 1);
        let c = extract_coeffs(&el, &sc, 1, 1e5, 3).unwrap();
        assert!(c.iter().all(|e| (e.value - cx(1.0, 0.0)).norm() < 0.05));
        let r = periodicity_check(&el, &sc, 1e5, &[1.0, 0.37]).unwrap();
        assert!(r.iter().all(|x| x.passed));
    }

    #[test]
    fn mod4_support_at_odd_quarters() {
        let (el, sc) = element(4, 0.0);
        let p = scan_support(&el, &sc, 1e5, 12, 2).unwrap();
        let peaks: Vec<f64> = p.peaks().map(|x| x.alpha).collect();
        assert_eq!(peaks, vec![0.25, 0.75, 1.25, 1.75]);
        let five_twelfths = p.points.iter().find(|x| x.k == 5 && x.den == 12).unwrap();
        let top = p.peaks().map(|x| x.magnitude).fold(0.0, f64::max);
        assert!(five_twelfths.magnitude <= 0.1 * top);
        let c = extract_coeffs(&el, &sc, 4, 1e5, 4).unwrap();
        let truth = [1.0, 0.0, -1.0, 0.0];
        for (e, t) in c.iter().zip(truth) {
            assert!((e.value - cx(t, 0.0)).norm() < 0.05, "{e:?}");
        }
    }

    #[test]
    fn mod7_conductor_needs_extended_grid() {
        let (el, sc) = element(7, 0.5);
        let rep = detect(&el, &sc, &DetectorConfig::default()).unwrap();
        assert_eq!(rep.q_detected, 7);
        assert_eq!(rep.support_profile.grid_den, 420);
        for e in &rep.coeff_table {
            assert!((e.value - el.coeffs.a(e.m)).norm() < 0.05);
        }
        assert!(rep.periodicity_residuals.iter().all(|r| r.passed));
    }

    #[test]
    fn wrong_q_scale_is_a_mismatch() {
        let (el, _) = element(4, 0.0);
        let bad_fe = el.fe.with_q_scale(el.fe.q_scale() * 2.0).unwrap();
        let bad = SelbergElement::new(bad_fe, el.coeffs.clone(), "doubled Q");
        let sc = stirling_constants(&bad.fe).unwrap();
        let p = scan_support(&bad, &sc, 1e5, 60, 1).unwrap();
        assert!(matches!(detect_q(&p, &sc, &bad.fe), Err(Error::ConductorMismatch { from_constants: 16, from_peaks: 4 })));
    }

    #[test]
    fn missing_coefficients_are_reported() {
        let (el, sc) = element(4, 0.0);
        let short = SelbergElement::new(el.fe.clone(), el.coeffs.clone().with_max_index(1000), "short");
        assert!(matches!(scan_support(&short, &sc, 1e5, 60, 1), Err(Error::InsufficientData { .. })));
    }
}

//! Smoothed Dirichlet sums Σ a(n) n^{−s} e^{−n/X} with rigorous truncation,
//! the Hurwitz-based truth oracle, and a batch evaluator for long Dirichlet
//! polynomials on the critical line.
//!
//! Besides the plain sum, [`SmoothedValue`] carries a Richardson-extrapolated
//! value. With S(X) the plain sum, the Mellin expansion
//! S(X) = F(s) + rΓ(ρ−s)X^{ρ−s} + Σ_k (−1)^k F(s−k) X^{−k}/k!
//! shows that (8S(X) − 6S(X/2) + S(X/4))/3 cancels the X^{−1} and X^{−2}
//! terms. The pole term is subtracted exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexfn::{dirichlet_l, log_gamma};
use crate::error::{Error, Result};
use crate::scalar::{cis, cx, fitted_slope, Cx, Real};
use crate::selberg::{CoefficientKind, SelbergElement};

/// Default tail tolerance.
pub const SMOOTHING_TOL: f64 = 1e-12;
/// Σ|c_j| of the Richardson weights (8, −6, 1)/3.
pub const RICHARDSON_GAIN: f64 = 5.0;
const CHUNK: usize = 1 << 16;

/// A smoothed evaluation of F(s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SmoothedValue<T> {
    /// Richardson-extrapolated value with the pole term removed.
    pub value: Cx<T>,
    /// Plain sum Σ_{n≤N} a(n) n^{−s} e^{−n/X}.
    pub raw: Cx<T>,
    pub s: Cx<T>,
    pub x: T,
    pub terms_used: usize,
    pub truncation_error_bound: T,
    /// Pole contribution removed from `value` (zero without a pole).
    pub pole_term: Cx<T>,
}

/// Smallest N with K·gain·N^{−σ}·e^{−N/X}/(1 − e^{−1/X}) ≤ tol, and that bound.
pub fn tail_cutoff(sup: f64, gain: f64, sigma: f64, x: f64, tol: f64) -> Result<(usize, f64)> {
    if sigma < 0.0 {
        return Err(Error::Invalid(format!("smoothed sums need Re s >= 0, got {sigma}")));
    }
    if !(x >= 1.0) || !(tol > 0.0) {
        return Err(Error::Invalid(format!("need X >= 1 and tol > 0 (X = {x}, tol = {tol})")));
    }
    let denom = -(-1.0 / x).exp_m1();
    let log_bound = |n: f64| (sup * gain).max(f64::MIN_POSITIVE).ln() - sigma * n.ln() - n / x - denom.ln();
    let target = tol.ln();
    if log_bound(1.0) <= target {
        return Ok((1, log_bound(1.0).exp()));
    }
    let (mut lo, mut hi) = (1.0f64, x.max(2.0));
    while log_bound(hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e16 {
            return Err(Error::Precision("tail cutoff does not converge".into()));
        }
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) * 0.5).floor();
        if log_bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((hi as usize, log_bound(hi).exp()))
}

/// F(1/2 + it) by the smoothed sum.
pub fn smoothed_value<T: Real>(el: &SelbergElement<T>, t: T, x: T, tol: T) -> Result<SmoothedValue<T>> {
    smoothed_value_at(el, cx(T::lit(0.5), t), x, tol)
}

/// F(s) by the smoothed sum, for Re s ≥ 0.
pub fn smoothed_value_at<T: Real>(el: &SelbergElement<T>, s: Cx<T>, x: T, tol: T) -> Result<SmoothedValue<T>> {
    let (n_max, bound) = tail_cutoff(
        el.coeffs.sup_bound().to_f64_lossy(),
        RICHARDSON_GAIN,
        s.re.to_f64_lossy(),
        x.to_f64_lossy(),
        tol.to_f64_lossy(),
    )?;
    el.coeffs.require(n_max)?;
    let inv_x = x.recip();
    let third = T::one() / T::lit(3.0);
    let chunks: Vec<(Cx<T>, Cx<T>)> = (0..n_max.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(n_max);
            let mut raw = cx(T::zero(), T::zero());
            let mut val = cx(T::zero(), T::zero());
            for n in lo..=hi {
                let term = el.coeffs.twisted(n, s);
                let e1 = (-T::from_usize_lossy(n) * inv_x).exp();
                let e2 = e1 * e1;
                let w = (T::lit(8.0) * e1 - T::lit(6.0) * e2 + e2 * e2) * third;
                raw = raw + term * e1;
                val = val + term * w;
            }
            (raw, val)
        })
        .collect();
    let (raw, mut value) = chunks
        .into_iter()
        .fold((cx(T::zero(), T::zero()), cx(T::zero(), T::zero())), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    let mut pole_term = cx(T::zero(), T::zero());
    if let Some(rho) = el.fe.pole_location() {
        let r = pole_residue(el)?;
        if r.norm() > T::zero() {
            let g = log_gamma(rho - s)?.exp();
            let p = |xx: T| (rho - s) * xx.ln();
            let two = T::lit(2.0);
            let combo = (p(x).exp() * T::lit(8.0) - p(x / two).exp() * T::lit(6.0) + p(x / (two * two)).exp()) * third;
            pole_term = r * g * combo;
            value = value - pole_term;
        }
    }
    Ok(SmoothedValue { value, raw, s, x, terms_used: n_max, truncation_error_bound: T::lit(bound), pole_term })
}

/// Residue of Σ a(n) n^{−w} at its pole ρ (zero when there is none).
pub fn pole_residue<T: Real>(el: &SelbergElement<T>) -> Result<Cx<T>> {
    let Some(rho) = el.fe.pole_location() else {
        return Ok(cx(T::zero(), T::zero()));
    };
    if let Some(r) = kind_residue(el.coeffs.kind()) {
        return Ok(r);
    }
    // S(X) = Σ a(n) n^{1−ρ} e^{−n/X} = rX + c + d/X + ..., solved at X, 2X, 4X.
    let x0 = (el.coeffs.max_index() as f64 / 160.0).min(2.5e3);
    if x0 < 25.0 {
        return Err(Error::InsufficientData { needed: 4000, available: el.coeffs.max_index() });
    }
    let shift = cx(T::one(), T::zero()) - rho;
    let sum_at = |xx: f64| -> Result<Cx<T>> {
        let (n, _) = tail_cutoff(el.coeffs.sup_bound().to_f64_lossy(), 1.0, 0.0, xx, 1e-12)?;
        el.coeffs.require(n)?;
        let inv = T::lit(1.0 / xx);
        Ok((1..=n).fold(cx(T::zero(), T::zero()), |acc, k| {
            let kf = T::from_usize_lossy(k);
            acc + el.coeffs.a(k) * (shift * kf.ln()).exp() * (-kf * inv).exp()
        }))
    };
    let (s1, s2, s4) = (sum_at(x0)?, sum_at(2.0 * x0)?, sum_at(4.0 * x0)?);
    let xf = T::lit(x0);
    let d1 = s2 - s1; // rX − d/(2X)
    let d2 = s4 - s2; // 2rX − d/(4X)
    Ok((d2 * T::lit(2.0) - d1) / (T::lit(3.0) * xf))
}

fn kind_residue<T: Real>(kind: &CoefficientKind<T>) -> Option<Cx<T>> {
    match kind {
        CoefficientKind::Character { chi, .. } => {
            let q = chi.modulus();
            let units = (1..=q).filter(|a| chi.exponent(*a).is_some()).count();
            let r = if chi.is_principal() { T::from_usize_lossy(units) / T::from_u64(q).unwrap() } else { T::zero() };
            Some(cx(r, T::zero()))
        }
        CoefficientKind::Modified { base, .. } => kind_residue(base),
        CoefficientKind::Explicit { .. } => None,
    }
}

/// Independent value of F(s) from Hurwitz zeta values.
pub fn oracle_value<T: Real>(el: &SelbergElement<T>, s: Cx<T>) -> Result<Cx<T>> {
    kind_oracle(el.coeffs.kind(), s)
}

fn kind_oracle<T: Real>(kind: &CoefficientKind<T>, s: Cx<T>) -> Result<Cx<T>> {
    match kind {
        CoefficientKind::Character { chi, shift } => dirichlet_l(chi, s + cx(T::zero(), *shift)),
        CoefficientKind::Modified { base, overrides } => {
            let mut v = kind_oracle(base, s)?;
            for (&n, &a) in overrides {
                let ln_n = T::from_usize_lossy(n).ln();
                v = v + (a - base_value(base, n)) * (-s * ln_n).exp();
            }
            Ok(v)
        }
        CoefficientKind::Explicit { .. } => Err(Error::OracleUnavailable),
    }
}

fn base_value<T: Real>(kind: &CoefficientKind<T>, n: usize) -> Cx<T> {
    match kind {
        CoefficientKind::Character { chi, shift } => match chi.phase_fraction::<T>(n as u64) {
            Some(f) => cis(T::TAU() * f - *shift * T::from_usize_lossy(n).ln()),
            None => cx(T::zero(), T::zero()),
        },
        CoefficientKind::Explicit { values } => values[n - 1],
        CoefficientKind::Modified { base, overrides } => overrides.get(&n).copied().unwrap_or_else(|| base_value(base, n)),
    }
}

/// One row of a Lemma error probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LemmaRow<T> {
    pub x: T,
    /// |plain smoothed sum − truth|.
    pub raw_error: T,
    /// |extrapolated value − truth|.
    pub error: T,
    pub terms_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LemmaProbe<T> {
    pub t: T,
    pub truth: Cx<T>,
    pub rows: Vec<LemmaRow<T>>,
    /// Fitted slope of log error against log X (None for fewer than 2 rows).
    pub slope: Option<T>,
    pub raw_slope: Option<T>,
}

/// Errors of the smoothed sum at 1/2 + it against the Hurwitz oracle.
pub fn lemma_error_probe<T: Real>(el: &SelbergElement<T>, t: T, xs: &[T]) -> Result<LemmaProbe<T>> {
    let s = cx(T::lit(0.5), t);
    let truth = oracle_value(el, s)?;
    let tol = T::lit(SMOOTHING_TOL);
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let v = smoothed_value_at(el, s, x, tol)?;
        rows.push(LemmaRow { x, raw_error: (v.raw - truth).norm(), error: (v.value - truth).norm(), terms_used: v.terms_used });
    }
    let slope_of = |f: &dyn Fn(&LemmaRow<T>) -> T| {
        let pts: Vec<(T, T)> = rows.iter().map(|r| (r.x.ln(), f(r).max(T::min_positive_value()).ln())).collect();
        if pts.len() >= 2 {
            fitted_slope(&pts)
        } else {
            None
        }
    };
    let slope = slope_of(&|r| r.error);
    let raw_slope = slope_of(&|r| r.raw_error);
    Ok(LemmaProbe { t, truth, rows, slope, raw_slope })
}

// ---------------------------------------------------------------------------
// Batch evaluation of P(t) = Σ c_n e^{−it log n}

/// Half-width of the t-blocks sharing one set of Taylor moments.
pub const BLOCK_HALF_WIDTH: f64 = 10.0;
const BUCKET_WIDTH: f64 = 0.05;
const TAYLOR_TERMS: usize = 14;

#[derive(Clone, Debug)]
struct Bucket {
    start: usize,
    end: usize,
    center: f64,
}

/// A finite Dirichlet polynomial Σ_{n≤N} c_n n^{−it}.
///
/// Terms are grouped into buckets of width 0.05 in log n. Around a block
/// centre t₀, e^{−ih(log n − ℓ_b)} is expanded in a Taylor series, so each
/// evaluation costs O(#buckets) instead of O(N).
#[derive(Clone, Debug)]
pub struct DirichletPolynomial<T> {
    logs: Vec<T>,
    coeffs: Vec<Cx<T>>,
    buckets: Vec<Bucket>,
}

impl<T: Real> DirichletPolynomial<T> {
    /// c_n given for n = 1..=len.
    pub fn new(coeffs: Vec<Cx<T>>) -> Self {
        let logs: Vec<T> = (1..=coeffs.len()).map(|n| T::from_usize_lossy(n).ln()).collect();
        let mut buckets: Vec<Bucket> = Vec::new();
        for (i, l) in logs.iter().enumerate() {
            let b = (l.to_f64_lossy() / BUCKET_WIDTH).floor();
            let center = (b + 0.5) * BUCKET_WIDTH;
            match buckets.last_mut() {
                Some(last) if last.center == center => last.end = i + 1,
                _ => buckets.push(Bucket { start: i, end: i + 1, center }),
            }
        }
        DirichletPolynomial { logs, coeffs, buckets }
    }

    /// c_n = a(n) n^{−1/2} W(n) for n ≤ N, with the Richardson weights
    /// W(n) = (8e^{−n/X} − 6e^{−2n/X} + e^{−4n/X})/3 and N from the tail bound.
    pub fn smoothed_critical(el: &SelbergElement<T>, x: T, tol: T) -> Result<Self> {
        let (n_max, _) =
            tail_cutoff(el.coeffs.sup_bound().to_f64_lossy(), RICHARDSON_GAIN, 0.5, x.to_f64_lossy(), tol.to_f64_lossy())?;
        el.coeffs.require(n_max)?;
        let half = cx(T::lit(0.5), T::zero());
        let inv_x = x.recip();
        let third = T::one() / T::lit(3.0);
        let coeffs = (1..=n_max)
            .map(|n| {
                let e1 = (-T::from_usize_lossy(n) * inv_x).exp();
                let e2 = e1 * e1;
                el.coeffs.twisted(n, half) * ((T::lit(8.0) * e1 - T::lit(6.0) * e2 + e2 * e2) * third)
            })
            .collect();
        Ok(Self::new(coeffs))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Direct O(N) evaluation.
    pub fn eval_direct(&self, t: T) -> Cx<T> {
        self.logs.iter().zip(&self.coeffs).fold(cx(T::zero(), T::zero()), |acc, (l, c)| acc + *c * cis(-t * *l))
    }

    /// Taylor moments for |t − t₀| ≤ [`BLOCK_HALF_WIDTH`].
    pub fn block(&self, t0: T) -> PolyBlock<T> {
        let mut moments = Vec::with_capacity(self.buckets.len());
        let mut centers = Vec::with_capacity(self.buckets.len());
        for b in &self.buckets {
            let center = T::lit(b.center);
            let mut m = [cx(T::zero(), T::zero()); TAYLOR_TERMS];
            for i in b.start..b.end {
                let d = self.logs[i] - center;
                let mut z = self.coeffs[i] * cis(-t0 * d);
                for (k, slot) in m.iter_mut().enumerate() {
                    *slot = *slot + z;
                    z = z * (d / T::from_usize_lossy(k + 1));
                }
            }
            moments.push(m);
            centers.push(center);
        }
        PolyBlock { t0, moments, centers }
    }
}

/// Moments of a [`DirichletPolynomial`] around one block centre.
#[derive(Clone, Debug)]
pub struct PolyBlock<T> {
    t0: T,
    moments: Vec<[Cx<T>; TAYLOR_TERMS]>,
    centers: Vec<T>,
}

impl<T: Real> PolyBlock<T> {
    pub fn center(&self) -> T {
        self.t0
    }

    /// P(t) for t within the block.
    pub fn eval(&self, t: T) -> Cx<T> {
        let h = t - self.t0;
        let mut acc = cx(T::zero(), T::zero());
        for (m, &c) in self.moments.iter().zip(&self.centers) {
            // Σ_k (−ih)^k M_k by Horner; multiplying by −ih maps (re, im) to (h·im, −h·re).
            let mut inner = m[TAYLOR_TERMS - 1];
            for k in (0..TAYLOR_TERMS - 1).rev() {
                inner = cx(h * inner.im, -h * inner.re) + m[k];
            }
            acc = acc + inner * cis(-t * c);
        }
        acc
    }
}

//! Oscillatory integrals with log-type phases: the power kernel ∫ x^{it} t^{iA},
//! the stationary-phase kernel, and a panel-adaptive Gauss–Legendre engine.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, cx, Cx, Real};

const GL_ORDER: usize = 16;
/// Phase rate below which a panel counts as near-stationary.
pub const NEAR_STATIONARY_RATE: f64 = 0.05;

/// Result of an oscillatory integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OscIntegralResult<T> {
    pub value: Cx<T>,
    pub abs_error_estimate: T,
    pub panels_used: usize,
}

/// Gauss–Legendre nodes and weights on [−1, 1], computed once by Newton's method.
fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// An integrand evaluated on batches of abscissae.
pub trait BatchIntegrand<T: Real> {
    fn eval_batch(&mut self, ts: &[T], out: &mut [Cx<T>]) -> Result<()>;
}

/// Adapts a pointwise closure to [`BatchIntegrand`].
pub struct Pointwise<F>(pub F);

impl<T: Real, F: FnMut(T) -> Cx<T>> BatchIntegrand<T> for Pointwise<F> {
    fn eval_batch(&mut self, ts: &[T], out: &mut [Cx<T>]) -> Result<()> {
        for (t, o) in ts.iter().zip(out.iter_mut()) {
            *o = (self.0)(*t);
        }
        Ok(())
    }
}

/// Knobs of the adaptive engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOptions {
    /// Largest panel width.
    pub cap: f64,
    /// Budget on Gauss–Legendre panel evaluations.
    pub max_panels: usize,
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { cap: 1.0, max_panels: 20_000_000, max_depth: 40 }
    }
}

/// Initial panel width for a local phase rate: a quarter cycle, capped.
pub fn panel_width(rate: f64, cap: f64) -> f64 {
    if rate < NEAR_STATIONARY_RATE {
        cap
    } else {
        cap.min(std::f64::consts::FRAC_PI_2 / rate)
    }
}

/// ∫_a^b f with default options.
pub fn adaptive_osc_quadrature<T, F, R>(f: F, a: T, b: T, phase_rate: R, tol: T) -> Result<OscIntegralResult<T>>
where
    T: Real,
    F: FnMut(T) -> Cx<T>,
    R: Fn(T) -> T,
{
    adaptive_osc_quadrature_with(&mut Pointwise(f), a, b, phase_rate, tol, &QuadratureOptions::default())
}

/// Panel-adaptive Gauss–Legendre quadrature.
///
/// Panels start at the rate-based width; each is compared with its two
/// halves and split until |halves − whole| ≤ tol·width/(b − a). Panels are
/// processed left to right and summed in that order.
pub fn adaptive_osc_quadrature_with<T, I, R>(
    f: &mut I,
    a: T,
    b: T,
    phase_rate: R,
    tol: T,
    opts: &QuadratureOptions,
) -> Result<OscIntegralResult<T>>
where
    T: Real,
    I: BatchIntegrand<T>,
    R: Fn(T) -> T,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Invalid(format!("quadrature needs a < b, got [{a}, {b}]")));
    }
    if !(tol > T::zero()) {
        return Err(Error::Invalid("quadrature tolerance must be positive".into()));
    }
    let (af, bf) = (a.to_f64_lossy(), b.to_f64_lossy());
    let mut edges = vec![a];
    let mut t = af;
    while t < bf {
        let w0 = panel_width(phase_rate(T::lit(t)).to_f64_lossy().abs(), opts.cap);
        let w1 = panel_width(phase_rate(T::lit((t + w0).min(bf))).to_f64_lossy().abs(), opts.cap);
        let w = w0.min(w1);
        t = if bf - (t + w) < 1e-9 * w { bf } else { t + w };
        edges.push(if t >= bf { b } else { T::lit(t) });
    }
    let total = b - a;
    let mut engine = Engine { f, nodes: Vec::with_capacity(3 * GL_ORDER), vals: Vec::with_capacity(3 * GL_ORDER), panels: 0 };
    let mut value = cx(T::zero(), T::zero());
    let mut err = T::zero();
    let mut unresolved = false;
    // Coarse values of the initial panels in batches.
    for w in edges.windows(2) {
        let coarse = engine.rule(&[(w[0], w[1])])?[0];
        let mut stack = vec![(w[0], w[1], coarse, 0u32)];
        while let Some((l, r, whole, depth)) = stack.pop() {
            let m = (l + r) * T::lit(0.5);
            let halves = engine.rule(&[(l, m), (m, r)])?;
            let fine = halves[0] + halves[1];
            let e = (fine - whole).norm();
            if e <= tol * (r - l) / total || depth >= opts.max_depth {
                if e > tol * (r - l) / total {
                    unresolved = true;
                }
                value = value + fine;
                err = err + e;
            } else {
                stack.push((m, r, halves[1], depth + 1));
                stack.push((l, m, halves[0], depth + 1));
            }
            if engine.panels > opts.max_panels {
                return Err(Error::QuadratureBudgetExceeded { panels: engine.panels, estimate: err.to_f64_lossy() });
            }
        }
    }
    if unresolved && err > tol {
        return Err(Error::QuadratureBudgetExceeded { panels: engine.panels, estimate: err.to_f64_lossy() });
    }
    Ok(OscIntegralResult { value, abs_error_estimate: err, panels_used: engine.panels })
}

struct Engine<'a, T, I> {
    f: &'a mut I,
    nodes: Vec<T>,
    vals: Vec<Cx<T>>,
    panels: usize,
}

impl<T: Real, I: BatchIntegrand<T>> Engine<'_, T, I> {
    /// Gauss–Legendre values on each interval, with one batched integrand call.
    fn rule(&mut self, intervals: &[(T, T)]) -> Result<Vec<Cx<T>>> {
        let (x, w) = gauss_legendre();
        self.nodes.clear();
        for &(l, r) in intervals {
            let (c, h) = ((l + r) * T::lit(0.5), (r - l) * T::lit(0.5));
            self.nodes.extend(x.iter().map(|xi| c + h * T::lit(*xi)));
        }
        self.vals.clear();
        self.vals.resize(self.nodes.len(), cx(T::zero(), T::zero()));
        self.f.eval_batch(&self.nodes, &mut self.vals)?;
        self.panels += intervals.len();
        let mut out = Vec::with_capacity(intervals.len());
        for (i, &(l, r)) in intervals.iter().enumerate() {
            let h = (r - l) * T::lit(0.5);
            let chunk = &self.vals[i * GL_ORDER..(i + 1) * GL_ORDER];
            let s = chunk.iter().zip(w.iter()).fold(cx(T::zero(), T::zero()), |acc, (v, wi)| acc + *v * T::lit(*wi));
            out.push(s * h);
        }
        Ok(out)
    }
}

/// ∫_{αT}^{2αT} x^{it} t^{iA} dt.
///
/// For x = 1 the closed form ((2αT)^{1+iA} − (αT)^{1+iA})/(1+iA) is used.
/// Otherwise one integration by parts leaves
/// [t^{iA} x^{it}/(i log x)] − (A/log x) ∫ x^{it} t^{iA−1} dt,
/// whose remainder is integrated numerically.
pub fn power_kernel_integral<T: Real>(x: T, a: T, alpha: T, t_height: T) -> Result<OscIntegralResult<T>> {
    if !(x > T::zero()) || !(alpha > T::zero()) || !(t_height >= T::one()) {
        return Err(Error::Invalid("power kernel needs x > 0, alpha > 0, T >= 1".into()));
    }
    let lo = alpha * t_height;
    let hi = lo + lo;
    let one_ia = cx(T::one(), a);
    if x == T::one() {
        let p = |u: T| (one_ia * u.ln()).exp();
        return Ok(OscIntegralResult { value: (p(hi) - p(lo)) / one_ia, abs_error_estimate: T::zero(), panels_used: 1 });
    }
    let lx = x.ln();
    let kernel = |u: T| cis(u * lx + a * u.ln());
    let boundary = (kernel(hi) - kernel(lo)) / cx(T::zero(), lx);
    if a == T::zero() {
        return Ok(OscIntegralResult { value: boundary, abs_error_estimate: T::zero(), panels_used: 1 });
    }
    let tol = T::lit(1e-12);
    let rem = adaptive_osc_quadrature(|u: T| kernel(u) / u, lo, hi, |u: T| (lx + a / u).abs(), tol)?;
    Ok(OscIntegralResult {
        value: boundary - rem.value * (a / lx),
        abs_error_estimate: rem.abs_error_estimate * (a / lx).abs(),
        panels_used: rem.panels_used,
    })
}

/// Phase t(log t − log(2πnα) − 1) − π/4 of the stationary kernel.
pub fn stationary_phase<T: Real>(n: u64, alpha: T, t: T) -> T {
    let ln_c = (T::TAU() * T::from_u64(n).unwrap() * alpha).ln();
    t * (t.ln() - ln_c - T::one()) - T::FRAC_PI_4()
}

/// Stationary-phase prediction 2π √(nα) e(−nα).
pub fn stationary_main_term<T: Real>(n: u64, alpha: T) -> Cx<T> {
    let na = T::from_u64(n).unwrap() * alpha;
    let frac = na - na.floor();
    cis(-T::TAU() * frac) * (T::TAU() * na.sqrt())
}

/// ∫_{αT}^{2αT} e^{i t log(t/(2πenα)) − iπ/4} dt by adaptive quadrature.
pub fn stationary_kernel<T: Real>(n: u64, alpha: T, t_height: T, tol: T) -> Result<OscIntegralResult<T>> {
    if t_height < T::lit(10.0) || n == 0 || !(alpha > T::zero()) {
        return Err(Error::Invalid("stationary kernel needs T >= 10, n >= 1, alpha > 0".into()));
    }
    let lo = alpha * t_height;
    let ln_c = (T::TAU() * T::from_u64(n).unwrap() * alpha).ln();
    adaptive_osc_quadrature(
        |t: T| cis(stationary_phase(n, alpha, t)),
        lo,
        lo + lo,
        |t: T| (t.ln() - ln_c).abs(),
        tol,
    )
}

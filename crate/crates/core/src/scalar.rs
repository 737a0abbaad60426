//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

/// e^{iθ}
#[inline]
pub fn cis<T: Real>(theta: T) -> Cx<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// e(x) = e^{2πix}, with the argument reduced mod 1 before scaling.
#[inline]
pub fn e_frac<T: Real>(x: T) -> Cx<T> {
    let r = x - x.round();
    cis(T::TAU() * r)
}

/// `true` when both components are finite.
#[inline]
pub fn is_finite_cx<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Reduces an angle into (−π, π].
pub fn reduce_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let mut r = theta - tau * (theta / tau).round();
    if r <= -T::PI() {
        r = r + tau;
    } else if r > T::PI() {
        r = r - tau;
    }
    r
}

/// x^{iy} for positive x, computed from the logarithm directly.
#[inline]
pub fn pow_imag<T: Real>(x: T, y: T) -> Cx<T> {
    cis(y * x.ln())
}

/// Least-squares fit of `y ≈ X β` by Householder QR with column scaling.
///
/// `rows` are the design matrix rows; returns β.
pub fn least_squares<T: Real>(rows: &[Vec<T>], y: &[T]) -> Option<Vec<T>> {
    let m = rows.len();
    let n = rows.first()?.len();
    if m < n || y.len() != m {
        return None;
    }
    let mut scale = vec![T::zero(); n];
    for j in 0..n {
        let s = rows.iter().map(|r| r[j] * r[j]).sum::<T>().sqrt();
        if s == T::zero() {
            return None;
        }
        scale[j] = s;
    }
    let mut a: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().zip(&scale).map(|(v, s)| *v / *s).collect())
        .collect();
    let mut b = y.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if norm == T::zero() {
            return None;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a[i][k]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().map(|x| *x * *x).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k..n {
            let dot = (k..m).map(|i| v[i - k] * a[i][j]).sum::<T>();
            let f = (dot + dot) / vnorm2;
            for i in k..m {
                a[i][j] = a[i][j] - f * v[i - k];
            }
        }
        let dot = (k..m).map(|i| v[i - k] * b[i]).sum::<T>();
        let f = (dot + dot) / vnorm2;
        for i in k..m {
            b[i] = b[i] - f * v[i - k];
        }
    }
    let mut beta = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc = acc - a[k][j] * beta[j];
        }
        if a[k][k] == T::zero() {
            return None;
        }
        beta[k] = acc / a[k][k];
    }
    Some(beta.iter().zip(&scale).map(|(b, s)| *b / *s).collect())
}

/// Slope of the least-squares line through `(x, y)` pairs.
pub fn fitted_slope<T: Real>(points: &[(T, T)]) -> Option<T> {
    if points.len() < 2 {
        return None;
    }
    let rows: Vec<Vec<T>> = points.iter().map(|(x, _)| vec![T::one(), *x]).collect();
    let ys: Vec<T> = points.iter().map(|(_, y)| *y).collect();
    least_squares(&rows, &ys).map(|b| b[1])
}

//! Dirichlet characters with exact root-of-unity values.
//!
//! A character mod q is stored as a table of exponents: χ(a) = e(k_a / order)
//! for units a and 0 otherwise. All group-theoretic checks (multiplicativity,
//! equality, conductor) are exact integer computations; floating point only
//! appears when a value is materialised.
//!
//! Enumeration order: (ℤ/qℤ)* is split over the prime powers of q in
//! increasing order of the prime. An odd prime power contributes one cyclic
//! generator (the least primitive root mod p^e). The prime 2 contributes
//! nothing for 2^1, the generator −1 for 2^2, and the pair (−1, 5) for 2^e,
//! e ≥ 3. A character is the exponent vector (j₁, …, j_r) with χ(g_i) =
//! e(j_i / ord g_i); index = mixed-radix value of that vector with j₁ most
//! significant, so index 0 is always the principal character.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, Cx, Real};
use crate::selberg::{CoefficientSource, FunctionalEquation, GammaFactorTerm, SelbergElement};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `Some(p)` when n = p^k for a prime p and k ≥ 1.
pub fn prime_power_base(n: u64) -> Option<(u64, u32)> {
    let f = factorize(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

fn primitive_root_mod_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factorize(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|(r, _)| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("odd primes have primitive roots")
}

/// One cyclic generator of a prime-power component, as an element of the
/// component ring ℤ/p^eℤ.
#[derive(Clone, Debug)]
struct Generator {
    value: u64,
    order: u64,
}

#[derive(Clone, Debug)]
struct Component {
    modulus: u64,
    gens: Vec<Generator>,
    /// dlog[r] = exponents of r w.r.t. `gens`, None for non-units.
    dlog: Vec<Option<Vec<u64>>>,
}

impl Component {
    fn new(p: u64, e: u32) -> Self {
        let m = p.pow(e);
        let mut dlog = vec![None; m as usize];
        let gens = if p == 2 {
            match e {
                1 => {
                    dlog[1] = Some(vec![]);
                    vec![]
                }
                2 => {
                    dlog[1] = Some(vec![0]);
                    dlog[3] = Some(vec![1]);
                    vec![Generator { value: 3, order: 2 }]
                }
                _ => {
                    let ord5 = m / 4;
                    let mut x = 1u64;
                    for j in 0..ord5 {
                        dlog[x as usize] = Some(vec![0, j]);
                        dlog[(m - x) as usize] = Some(vec![1, j]);
                        x = x * 5 % m;
                    }
                    vec![Generator { value: m - 1, order: 2 }, Generator { value: 5, order: ord5 }]
                }
            }
        } else {
            let mut g = primitive_root_mod_prime(p);
            if e > 1 && pow_mod(g, p - 1, p * p) == 1 {
                g += p;
            }
            let order = m / p * (p - 1);
            let mut x = 1u64;
            for j in 0..order {
                dlog[x as usize] = Some(vec![j]);
                x = ((x as u128 * g as u128) % m as u128) as u64;
            }
            vec![Generator { value: g, order }]
        };
        Component { modulus: m, gens, dlog }
    }
}

/// The character group of (ℤ/qℤ)*, with characters built on demand.
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<Component>,
    orders: Vec<u64>,
    exponent: u64,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > 1_000_000 {
            return Err(Error::Invalid(format!("modulus {q} outside [1, 10^6]")));
        }
        let components: Vec<Component> = factorize(q).into_iter().map(|(p, e)| Component::new(p, e)).collect();
        let orders: Vec<u64> = components.iter().flat_map(|c| c.gens.iter().map(|g| g.order)).collect();
        let exponent = orders.iter().fold(1, |acc, &o| lcm(acc, o));
        Ok(CharacterGroup { modulus: q, components, orders, exponent })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(q).
    pub fn len(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn exponents_of_index(&self, mut index: usize) -> Vec<u64> {
        let mut js = vec![0u64; self.orders.len()];
        for (slot, &o) in js.iter_mut().zip(&self.orders).rev() {
            *slot = index as u64 % o;
            index /= o as usize;
        }
        js
    }

    /// Character number `index` in the documented lexicographic order.
    pub fn character(&self, index: usize) -> Result<DirichletCharacter> {
        if index >= self.len() {
            return Err(Error::Invalid(format!("character index {index} out of range for modulus {}", self.modulus)));
        }
        let js = self.exponents_of_index(index);
        let q = self.modulus;
        let big_l = self.exponent;
        let mut exps = vec![None; q as usize];
        for a in 0..q {
            if gcd(a, q) != 1 {
                continue;
            }
            let mut k: u128 = 0;
            let mut slot = 0;
            for comp in &self.components {
                let logs = comp.dlog[(a % comp.modulus) as usize].as_ref().expect("unit has a discrete log");
                for (g, l) in comp.gens.iter().zip(logs) {
                    k += js[slot] as u128 * *l as u128 * (big_l / g.order) as u128;
                    slot += 1;
                }
            }
            exps[a as usize] = Some((k % big_l as u128) as u64);
        }
        if q == 1 {
            exps[0] = Some(0);
        }
        Ok(DirichletCharacter::from_exponents(q, big_l, exps))
    }

    pub fn iter(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(move |i| self.character(i).expect("index in range"))
    }

    /// Index of `chi` in the enumeration order, if it is a character mod q.
    pub fn index_of(&self, chi: &DirichletCharacter) -> Option<usize> {
        if chi.modulus() != self.modulus {
            return None;
        }
        let q = self.modulus;
        let mut index = 0usize;
        for (ci, comp) in self.components.iter().enumerate() {
            for g in comp.gens.iter() {
                // Lift the generator: g mod its component, 1 mod the others.
                let lifted = self.lift(ci, g.value);
                let (k, ord) = chi.exponent(lifted)?;
                // χ(g) = e(k/ord) = e(j/g.order)
                let scaled = k as u128 * g.order as u128;
                if !scaled.is_multiple_of(ord as u128) {
                    return None;
                }
                let j = (scaled / ord as u128) as u64 % g.order;
                index = index * g.order as usize + j as usize;
            }
        }
        let candidate = self.character(index).ok()?;
        if &candidate == chi && q > 0 {
            Some(index)
        } else {
            None
        }
    }

    fn lift(&self, component: usize, value: u64) -> u64 {
        let q = self.modulus;
        let m = self.components[component].modulus;
        let rest = q / m;
        // x ≡ value (mod m), x ≡ 1 (mod rest)
        (0..m)
            .map(|k| 1 + k * rest)
            .find(|x| x % m == value % m)
            .map(|x| x % q)
            .unwrap_or(1)
    }
}

/// All φ(q) characters mod q in enumeration order.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(CharacterGroup::new(q)?.iter().collect())
}

/// A Dirichlet character with exact values e(k/order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    /// Exponent for each residue 0..q; None where gcd(a, q) > 1.
    exps: Vec<Option<u64>>,
}

impl DirichletCharacter {
    /// Builds a character from exponents e(k_a/order), reducing to the exact
    /// order. Multiplicativity is not checked here; see [`Self::validate`].
    pub fn from_exponents(modulus: u64, order: u64, exps: Vec<Option<u64>>) -> Self {
        let g = exps.iter().flatten().fold(order, |acc, &k| gcd(acc, k % order));
        let g = g.max(1);
        let exps = exps.into_iter().map(|k| k.map(|k| (k % order) / g)).collect();
        DirichletCharacter { modulus, order: order / g, exps }
    }

    /// Builds a character from normalised discrete logs x_a ∈ [0, 1) with
    /// χ(a) = e(x_a), snapping each to the nearest multiple of 1/order.
    pub fn from_dlog_table(modulus: u64, table: &[Option<f64>]) -> Result<Self> {
        if table.len() as u64 != modulus {
            return Err(Error::Invalid(format!("dlog table has {} entries, modulus is {modulus}", table.len())));
        }
        let order = CharacterGroup::new(modulus)?.exponent;
        let mut exps = Vec::with_capacity(table.len());
        for (a, x) in table.iter().enumerate() {
            let unit = gcd(a as u64, modulus) == 1 || modulus == 1;
            match (unit, x) {
                (true, Some(x)) => {
                    let k = (x.rem_euclid(1.0) * order as f64).round();
                    if ((k / order as f64) - x.rem_euclid(1.0)).abs() > 1e-9 {
                        return Err(Error::Invalid(format!("dlog entry {x} for residue {a} is not a multiple of 1/{order}")));
                    }
                    exps.push(Some(k as u64 % order));
                }
                (false, None) => exps.push(None),
                (true, None) => return Err(Error::Invalid(format!("unit residue {a} has no dlog entry"))),
                (false, Some(_)) => return Err(Error::Invalid(format!("non-unit residue {a} carries a dlog entry"))),
            }
        }
        let chi = Self::from_exponents(modulus, order, exps);
        chi.validate()?;
        Ok(chi)
    }

    /// Checks χ(1) = 1 and exact multiplicativity on the unit group.
    pub fn validate(&self) -> Result<()> {
        let q = self.modulus;
        if self.exps.len() as u64 != q {
            return Err(Error::Invalid("table length differs from modulus".into()));
        }
        if self.exponent(1) != Some((0, self.order)) {
            return Err(Error::Invalid("chi(1) != 1".into()));
        }
        for a in 0..q {
            for b in a..q {
                let ab = a * b % q;
                let lhs = self.exps[ab as usize];
                let rhs = match (self.exps[a as usize], self.exps[b as usize]) {
                    (Some(x), Some(y)) => Some((x + y) % self.order),
                    _ => None,
                };
                if lhs != rhs {
                    return Err(Error::Invalid(format!("not multiplicative at ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order of χ in the character group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// (k, order) with χ(n) = e(k/order), or None when gcd(n, q) > 1.
    pub fn exponent(&self, n: u64) -> Option<(u64, u64)> {
        self.exps[(n % self.modulus) as usize].map(|k| (k, self.order))
    }

    /// χ(n) as a complex number.
    pub fn value<T: Real>(&self, n: u64) -> Cx<T> {
        match self.exponent(n) {
            Some((k, o)) => cis(T::TAU() * T::from_u64(k).unwrap() / T::from_u64(o).unwrap()),
            None => Cx::new(T::zero(), T::zero()),
        }
    }

    /// χ(n) as the fraction k/order ∈ [0, 1), or None.
    pub fn phase_fraction<T: Real>(&self, n: u64) -> Option<T> {
        self.exponent(n).map(|(k, o)| T::from_u64(k).unwrap() / T::from_u64(o).unwrap())
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// 𝔞 = (1 − χ(−1))/2 ∈ {0, 1}.
    pub fn parity(&self) -> u8 {
        let q = self.modulus;
        let minus_one = if q == 1 { 0 } else { q - 1 };
        match self.exps[minus_one as usize] {
            Some(0) | None => 0,
            Some(_) => 1,
        }
    }

    pub fn conj(&self) -> Self {
        let exps = self.exps.iter().map(|k| k.map(|k| (self.order - k) % self.order)).collect();
        DirichletCharacter { modulus: self.modulus, order: self.order, exps }
    }

    /// Smallest modulus d | q whose character induces this one.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        let mut divisors: Vec<u64> = (1..=q).filter(|d| q.is_multiple_of(*d)).collect();
        divisors.sort_unstable();
        for d in divisors {
            let trivial = (0..q / d).map(|k| 1 + k * d).filter(|a| gcd(*a, q) == 1).all(|a| self.exponent(a) == Some((0, self.order)));
            if trivial {
                return d;
            }
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// Primitive character χ' mod q' inducing χ.
    pub fn conductor_and_inducer(&self) -> (u64, DirichletCharacter) {
        let q = self.modulus;
        let d = self.conductor();
        let mut exps = vec![None; d as usize];
        for b in 0..d {
            if gcd(b, d) != 1 && d != 1 {
                continue;
            }
            let lift = (0..q / d.max(1) + 1).map(|k| b + k * d).find(|a| gcd(*a % q, q) == 1 || q == 1);
            if let Some(a) = lift {
                exps[b as usize] = self.exps[(a % q) as usize];
            }
        }
        if d == 1 {
            exps[0] = Some(0);
        }
        (d, DirichletCharacter::from_exponents(d, self.order, exps))
    }

    /// Gauss sum τ(χ) = Σ_a χ(a) e(a/q); χ must be primitive.
    pub fn gauss_sum<T: Real>(&self) -> Result<Cx<T>> {
        let conductor = self.conductor();
        if conductor != self.modulus {
            return Err(Error::NotPrimitive { modulus: self.modulus, conductor });
        }
        let q = self.modulus as u128;
        let o = self.order as u128;
        let denom = q * o;
        let mut acc = Cx::new(T::zero(), T::zero());
        for a in 0..self.modulus {
            if let Some(k) = self.exps[a as usize] {
                let num = (k as u128 * q + a as u128 * o) % denom;
                acc = acc + cis(T::TAU() * T::from_u128(num).unwrap() / T::from_u128(denom).unwrap());
            }
        }
        Ok(acc)
    }

    /// Root number τ(χ) / (i^𝔞 √q) of the unshifted L-function.
    pub fn root_number<T: Real>(&self) -> Result<Cx<T>> {
        let tau = self.gauss_sum::<T>()?;
        let q = T::from_u64(self.modulus).unwrap();
        let i_pow = if self.parity() == 1 { Cx::new(T::zero(), T::one()) } else { Cx::new(T::one(), T::zero()) };
        Ok(tau / (i_pow * q.sqrt()))
    }

    /// Normalised discrete-log table (the coefficient-file encoding).
    pub fn dlog_table(&self) -> Vec<Option<f64>> {
        self.exps.iter().map(|k| k.map(|k| k as f64 / self.order as f64)).collect()
    }
}

/// The degree-1 element F(s) = L(s + iA₀, χ) for primitive χ (ζ when q = 1).
///
/// Shifting by iA₀ multiplies the classical root number by (q/π)^{−iA₀}.
pub fn build_l_element<T: Real>(chi: &DirichletCharacter, a0: T) -> Result<SelbergElement<T>> {
    let q = chi.modulus();
    let omega = chi.root_number::<T>()?;
    let qf = T::from_u64(q).unwrap();
    let omega = omega * cis(-a0 * (qf / T::PI()).ln());
    let half = T::lit(0.5);
    let mu = Cx::new(T::from_u8(chi.parity()).unwrap() * half, a0 * half);
    let term = GammaFactorTerm::new(half, mu)?;
    let fe = FunctionalEquation::new((qf / T::PI()).sqrt(), vec![term], omega, u32::from(q == 1))?;
    let coeffs = CoefficientSource::character(chi.clone(), a0);
    let label = if q == 1 { format!("zeta(s+{}i)", a0) } else { format!("L(s+{}i, chi mod {q})", a0) };
    Ok(SelbergElement::new(fe, coeffs, label))
}

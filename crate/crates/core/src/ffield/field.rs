use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field elements are small integers: the element with polynomial
/// representative `c_0 + c_1 x + ... + c_{r-1} x^{r-1}` is `sum c_i p^i`.
/// `0` is zero and `1` is one in every field.
pub type Elem = u16;

/// The data defining `F_{p^r}`: the prime, the degree, and the monic
/// irreducible modulus (`r + 1` coefficients, low degree first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn q(&self) -> u32 {
        self.p.pow(self.r)
    }
}

const ADD_TABLE_MAX: u32 = 1024;

struct Tables {
    spec: FieldSpec,
    q: u32,
    // exp[k] = g^k for 0 <= k < 2(q-1), so products of logs need no reduction.
    exp: Vec<Elem>,
    log: Vec<u32>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    add: Option<Vec<Elem>>,
}

/// A finite field with precomputed log/exp tables.  Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q = p^r`, or returns `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let (mut m, mut r) = (q, 0);
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

// Polynomials over F_p as coefficient vectors, low degree first.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic.
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let dm = m.len() - 1;
    while a.len() > dm {
        let shift = a.len() - 1 - dm;
        let c = *a.last().unwrap();
        for (i, &mi) in m.iter().enumerate() {
            a[shift + i] = (a[shift + i] + (p - c) * mi % p) % p;
        }
        poly_trim(&mut a);
    }
    a
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let r = m.len() - 1;
    if r <= 1 {
        return true;
    }
    // Try every monic divisor of degree 1..=r/2.
    for d in 1..=r / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                f.push((c % p as u64) as u32);
                c /= p as u64;
            }
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically least monic irreducible of degree `r` over `F_p`,
/// comparing coefficient sequences `(c_0, ..., c_{r-1})`.
fn least_irreducible(p: u32, r: u32) -> Vec<u32> {
    let total = (p as u64).pow(r);
    for code in 0..total {
        // c_0 is the most significant digit so that `code` order is lex order.
        let mut coeffs = vec![0u32; r as usize];
        let mut c = code;
        for i in (0..r as usize).rev() {
            coeffs[i] = (c % p as u64) as u32;
            c /= p as u64;
        }
        coeffs.push(1);
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn to_digits(a: u32, p: u32, r: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(r as usize);
    let mut a = a;
    for _ in 0..r {
        v.push(a % p);
        a /= p;
    }
    v
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digit_add(a: u32, b: u32, p: u32, r: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let (mut out, mut place) = (0, 1);
    for _ in 0..r {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn slow_mul(a: u32, b: u32, spec: &FieldSpec) -> u32 {
    let (p, r) = (spec.p, spec.r);
    let da = to_digits(a, p, r);
    let db = to_digits(b, p, r);
    let mut prod = vec![0u32; 2 * r as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut rem = poly_rem(&prod, &spec.modulus, p);
    rem.resize(r as usize, 0);
    from_digits(&rem, p)
}

impl Field {
    /// Builds `F_{p^r}`.  Fails unless `p` is prime and `p^r <= 2^16`.
    pub fn new(p: u32, r: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::BadParameters("field degree must be positive".into()));
        }
        let q = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if q > 1 << 16 {
            return Err(Error::FieldTooLarge { p: p as u64, r });
        }
        let modulus = least_irreducible(p, r);
        Ok(Self::from_spec(FieldSpec { p, r, modulus }))
    }

    /// Builds the field of order `q`.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, r) = prime_power(q).ok_or(Error::NotPrime(q))?;
        if p > u32::MAX as u64 {
            return Err(Error::FieldTooLarge { p, r });
        }
        Field::new(p as u32, r)
    }

    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1)
    }

    fn from_spec(spec: FieldSpec) -> Field {
        let (p, r) = (spec.p, spec.r);
        let q = spec.q();
        let n = (q - 1) as usize;
        // Least primitive element by index.
        let mut gen = 0;
        let mut powers = Vec::new();
        'search: for g in 1..q {
            powers.clear();
            let mut x = 1u32;
            for k in 0..n {
                if k > 0 && x == 1 {
                    continue 'search;
                }
                powers.push(x);
                x = slow_mul(x, g, &spec);
            }
            if x == 1 {
                gen = g;
                break;
            }
        }
        assert!(gen != 0, "multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(2 * n);
        for k in 0..2 * n {
            exp.push(powers[k % n] as Elem);
        }
        let mut log = vec![u32::MAX; q as usize];
        for (k, &x) in powers.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        let neg: Vec<Elem> = (0..q)
            .map(|a| {
                let d: Vec<u32> = to_digits(a, p, r).iter().map(|&c| (p - c) % p).collect();
                from_digits(&d, p) as Elem
            })
            .collect();
        let mut inv = vec![0; q as usize];
        for a in 1..q as usize {
            let l = log[a] as usize;
            inv[a] = exp[(n - l) % n];
        }
        let add = (r > 1 && p != 2 && q <= ADD_TABLE_MAX).then(|| {
            let mut t = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b, p, r) as Elem;
                }
            }
            t
        });
        Field(Arc::new(Tables { spec, q, exp, log, neg, inv, add }))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn p(&self) -> u32 {
        self.0.spec.p
    }
    pub fn r(&self) -> u32 {
        self.0.spec.r
    }
    pub fn is_prime_field(&self) -> bool {
        self.0.spec.r == 1
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let t = &self.0;
        if t.spec.p == 2 {
            a ^ b
        } else if t.spec.r == 1 {
            ((a as u32 + b as u32) % t.q) as Elem
        } else if let Some(tab) = &t.add {
            tab[a as usize * t.q as usize + b as usize]
        } else {
            digit_add(a as u32, b as u32, t.spec.p, t.spec.r) as Elem
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.0;
        if t.spec.r == 1 {
            return ((a as u32 * b as u32) % t.q) as Elem;
        }
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        self.0.inv[a as usize]
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.0.q - 1) as u64;
        let l = self.0.log[a as usize] as u64;
        self.0.exp[((l * (e % n)) % n) as usize]
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, k: i64) -> Elem {
        k.rem_euclid(self.p() as i64) as Elem
    }

    /// The chosen primitive element `g` (least index of order `q-1`).
    pub fn primitive(&self) -> Elem {
        self.0.exp[1 % self.0.exp.len().max(1)]
    }

    /// `g^k` for the primitive element `g`.
    pub fn exp(&self, k: u32) -> Elem {
        self.0.exp[(k % (self.0.q - 1)) as usize]
    }

    /// Discrete logarithm to the base of [`Field::primitive`]; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.0.log[a as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.0.q as Elem
    }

    /// An `F_p`-basis of the field: `1, g, ..., g^{r-1}`.
    pub fn additive_basis(&self) -> Vec<Elem> {
        (0..self.r()).map(|k| self.exp(k)).collect()
    }

    /// Multiplicative order of `q` modulo a prime `l` not dividing `q`.
    pub fn order_mod(q: u64, l: u64) -> u32 {
        let mut x = q % l;
        let mut t = 1;
        while x != 1 {
            x = x * q % l;
            t += 1;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_are_least_irreducibles() {
        assert_eq!(Field::new(2, 1).unwrap().spec().modulus, vec![0, 1]);
        assert_eq!(Field::new(2, 2).unwrap().spec().modulus, vec![1, 1, 1]);
        // x^3 + x^2 + 1 has coefficient sequence (1,0,1) < (1,1,0).
        assert_eq!(Field::new(2, 3).unwrap().spec().modulus, vec![1, 0, 1, 1]);
        assert_eq!(Field::new(3, 2).unwrap().spec().modulus, vec![1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(Field::new(2, 17), Err(Error::FieldTooLarge { .. })));
        assert!(Field::new(2, 16).is_ok());
    }

    #[test]
    fn field_axioms_small() {
        for (p, r) in [(2, 1), (2, 2), (3, 1), (2, 3), (3, 2), (5, 1), (7, 1), (2, 4)] {
            let f = Field::new(p, r).unwrap();
            let q = f.q() as Elem;
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), slow_mul(a as u32, b as u32, f.spec()) as Elem);
                    for c in [0, 1, q - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn digit_add_matches_table() {
        let f = Field::new(3, 7).unwrap();
        assert!(f.q() > ADD_TABLE_MAX);
        let g = Field::new(3, 3).unwrap();
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(g.add(a, b), digit_add(a as u32, b as u32, 3, 3) as Elem);
            }
        }
        assert_eq!(f.add(f.neg(7), 7), 0);
    }

    #[test]
    fn order_mod() {
        assert_eq!(Field::order_mod(2, 3), 2);
        assert_eq!(Field::order_mod(3, 2), 1);
        assert_eq!(Field::order_mod(4, 3), 1);
        assert_eq!(Field::order_mod(2, 7), 3);
    }
}

//! Exact coefficients: rationals, univariate polynomials over Q in the formal
//! parameter `p`, and the fraction field Q(p).
//!
//! Every value is kept in normal form: a `Poly` never stores trailing zero
//! coefficients, and a `Coeff` has a monic denominator coprime to its
//! numerator. Normal forms make structural equality coincide with equality
//! of rational functions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always reduced with positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"a"` or `"a/b"` (base 10, optional sign on the numerator).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Dense polynomial in `p` with rational coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c p^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> Rat {
        self.coeffs.first().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lc) if !lc.is_one() => self.scale(&lc.recip()),
            _ => self.clone(),
        }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lc_inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dj;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_constant() && !a.is_zero() || b.is_constant() && !b.is_zero() {
            return Poly::one();
        }
        if !a.is_zero() && !b.is_zero() && coprime_mod_p(a, b) {
            return Poly::one();
        }
        let mut x = a.monic();
        let mut y = b.monic();
        while !y.is_zero() {
            if y.is_constant() {
                return Poly::one();
            }
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x
    }

    /// Exact quotient; the caller guarantees divisibility.
    fn exact_div(&self, d: &Poly) -> Poly {
        if d.is_one() {
            return self.clone();
        }
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat_int(k as i64))
                .collect(),
        )
    }

    fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if mono.is_empty() {
                out.push_str(&format_rat(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else if a.denom().is_one() {
                out.push_str(&format!("{}*{mono}", a.numer()));
            } else {
                out.push_str(&format!("{}*{mono}", format_rat(&a)));
            }
        }
        out
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= o.coeffs.len() {
            (self, o)
        } else {
            (o, self)
        };
        let mut v = long.coeffs.clone();
        for (a, b) in v.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        Poly::from_coeffs(v)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = o.coeffs.get(i);
            v.push(match (a, b) {
                (Some(a), Some(b)) => a - b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b,
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(v)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Element of Q(p): `num / den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    num: Poly,
    den: Poly,
}

const MOD_P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, MOD_P - 2)
}

fn rat_mod(r: &Rat) -> Option<u64> {
    let p = BigInt::from(MOD_P);
    let n = r.numer().mod_floor(&p);
    let d = r.denom().mod_floor(&p);
    let n: u64 = n.try_into().ok()?;
    let d: u64 = d.try_into().ok()?;
    (d != 0).then(|| mul_mod(n, inv_mod(d)))
}

/// Image mod p with the same degree, if every coefficient reduces.
fn poly_mod(a: &Poly) -> Option<Vec<u64>> {
    let v: Vec<u64> = a.coeffs.iter().map(rat_mod).collect::<Option<_>>()?;
    (v.last().copied().unwrap_or(0) != 0).then_some(v)
}

fn rem_mod(a: &mut Vec<u64>, b: &[u64]) {
    let db = b.len() - 1;
    let inv = inv_mod(b[db]);
    while a.len() > db {
        let c = mul_mod(*a.last().unwrap(), inv);
        let off = a.len() - 1 - db;
        for (j, bj) in b.iter().enumerate() {
            let t = mul_mod(c, *bj);
            a[off + j] = (a[off + j] + MOD_P - t) % MOD_P;
        }
        a.pop();
        while a.last() == Some(&0) {
            a.pop();
        }
    }
}

/// True when the images mod a large prime are coprime, which proves the
/// polynomials coprime over Q (leading coefficients survive the reduction).
fn coprime_mod_p(a: &Poly, b: &Poly) -> bool {
    let (Some(mut x), Some(mut y)) = (poly_mod(a), poly_mod(b)) else {
        return false;
    };
    while !y.is_empty() {
        if y.len() == 1 {
            return true;
        }
        rem_mod(&mut x, &y);
        std::mem::swap(&mut x, &mut y);
    }
    x.len() == 1
}

/// Builds a normalized `Coeff` from an arbitrary numerator/denominator pair.
pub fn coeff_normalize(num: Poly, den: Poly) -> Result<Coeff> {
    if den.is_zero() {
        return Err(Error::Validation("zero denominator".into()));
    }
    Ok(Coeff::reduce(num, den))
}

impl Coeff {
    fn reduce(num: Poly, den: Poly) -> Coeff {
        if num.is_zero() {
            return Coeff::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        Coeff::with_monic_den(num, den)
    }

    fn with_monic_den(num: Poly, den: Poly) -> Coeff {
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            Coeff { num, den }
        } else {
            let inv = lc.recip();
            Coeff {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        Coeff {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Coeff::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Coeff {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::from_rat(rat_int(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Coeff::from_rat(rat(n, d))
    }

    /// The formal parameter `p` itself.
    pub fn param() -> Self {
        Coeff::from_poly(Poly::monomial(Rat::one(), 1))
    }

    pub fn from_poly(p: Poly) -> Self {
        Coeff {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational, when it does not depend on `p`.
    pub fn as_rat(&self) -> Option<Rat> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.constant_term())
    }

    pub fn eval(&self, probe: &Rat) -> Result<Rat> {
        let d = self.den.eval(probe);
        if d.is_zero() {
            return Err(Error::Pole(format!(
                "p = {} is a root of the denominator {}",
                format_rat(probe),
                self.den.fmt_in("p")
            )));
        }
        Ok(self.num.eval(probe) / d)
    }

    pub fn inv(&self) -> Result<Coeff> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero coefficient".into()));
        }
        Ok(Coeff::with_monic_den(self.den.clone(), self.num.clone()))
    }

    pub fn scale_rat(&self, r: &Rat) -> Coeff {
        if r.is_zero() {
            return Coeff::zero();
        }
        Coeff {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Coeff {
        let mut acc = Coeff::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Equality decided by cross-multiplication, independent of normal form.
    pub fn eq_cross(&self, other: &Coeff) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    /// Human-readable form in the parameter name `var`, e.g. `"p/12"`.
    pub fn display_in(&self, var: &str) -> String {
        if let Some(r) = self.as_rat() {
            return format_rat(&r);
        }
        // Clear coefficient denominators so that p/12 prints as "p/12".
        let l = self
            .num
            .coeffs
            .iter()
            .chain(self.den.coeffs.iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let lr = Rat::from_integer(l);
        let num = self.num.scale(&lr);
        let den = self.den.scale(&lr);
        let terms = |p: &Poly| p.coeffs.iter().filter(|c| !c.is_zero()).count();
        let wrap = |s: String, single: bool| if single { s } else { format!("({s})") };
        let num_s = num.fmt_in(var);
        if den.is_one() {
            return num_s;
        }
        if let Some(d) = den.as_const_int() {
            return format!("{}/{}", wrap(num_s, terms(&num) == 1), d);
        }
        format!(
            "{}/{}",
            wrap(num_s, terms(&num) == 1),
            wrap(den.fmt_in(var), terms(&den) == 1)
        )
    }
}

impl Poly {
    fn as_const_int(&self) -> Option<BigInt> {
        (self.is_constant() && self.constant_term().denom().is_one())
            .then(|| self.constant_term().numer().clone())
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("p"))
    }
}

impl Add<&Coeff> for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Coeff::from_poly(&self.num + &o.num);
        }
        // a/b + c/1 and a/1 + c/d stay reduced without a gcd.
        if o.den.is_one() {
            return Coeff {
                num: &self.num + &(&o.num * &self.den),
                den: self.den.clone(),
            };
        }
        if self.den.is_one() {
            return Coeff {
                num: &(&self.num * &o.den) + &o.num,
                den: o.den.clone(),
            };
        }
        if self.den == o.den {
            return Coeff::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &o.den);
        let b1 = self.den.exact_div(&g);
        let d1 = o.den.exact_div(&g);
        let num = &(&self.num * &d1) + &(&o.num * &b1);
        if num.is_zero() {
            return Coeff::zero();
        }
        let den = &b1 * &o.den;
        if g.is_one() {
            return Coeff::with_monic_den(num, den);
        }
        let g2 = Poly::gcd(&num, &g);
        if g2.is_one() {
            Coeff::with_monic_den(num, den)
        } else {
            Coeff::with_monic_den(num.exact_div(&g2), den.exact_div(&g2))
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub<&Coeff> for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        self + &(-o)
    }
}

impl Mul<&Coeff> for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.is_zero() || o.is_zero() {
            return Coeff::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Coeff::from_poly(&self.num * &o.num);
        }
        if let Some(r) = self.as_rat() {
            return o.scale_rat(&r);
        }
        if let Some(r) = o.as_rat() {
            return self.scale_rat(&r);
        }
        let g1 = Poly::gcd(&self.num, &o.den);
        let g2 = Poly::gcd(&o.num, &self.den);
        let num = &self.num.exact_div(&g1) * &o.num.exact_div(&g2);
        let den = &self.den.exact_div(&g2) * &o.den.exact_div(&g1);
        Coeff::with_monic_den(num, den)
    }
}

impl Div<&Coeff> for &Coeff {
    type Output = Coeff;
    fn div(self, o: &Coeff) -> Coeff {
        self * &o.inv().expect("division by zero coefficient")
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { (&self).$m(&o) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t { (&self).$m(o) }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { self.$m(&o) }
        }
    )*};
}
forward_owned!(Coeff, Add add, Sub sub, Mul mul, Div div);
forward_owned!(Poly, Add add, Sub sub, Mul mul);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl std::ops::AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, o: &Coeff) {
        *self = &*self + o;
    }
}

/// Sum of many terms, kept as unreduced numerators grouped by denominator
/// and reduced once in [`CoeffSum::finish`].
#[derive(Clone, Debug, Default)]
pub struct CoeffSum {
    groups: Vec<(Poly, Poly)>,
}

impl CoeffSum {
    pub fn new() -> Self {
        CoeffSum::default()
    }

    fn push(&mut self, num: Poly, den: Poly) {
        if num.is_zero() {
            return;
        }
        match self.groups.iter_mut().find(|(_, d)| *d == den) {
            Some((n, _)) => *n = &*n + &num,
            None => self.groups.push((num, den)),
        }
    }

    pub fn add(&mut self, c: &Coeff) {
        self.push(c.num.clone(), c.den.clone());
    }

    /// Adds `a·b` without reducing the product.
    pub fn add_product(&mut self, a: &Coeff, b: &Coeff) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let den = if a.den.is_one() {
            b.den.clone()
        } else if b.den.is_one() {
            a.den.clone()
        } else {
            &a.den * &b.den
        };
        self.push(&a.num * &b.num, den);
    }

    pub fn finish(self) -> Coeff {
        let mut acc = Coeff::zero();
        for (num, den) in self.groups {
            if !num.is_zero() {
                acc += &Coeff::reduce(num, den);
            }
        }
        acc
    }
}

impl std::ops::SubAssign<&Coeff> for Coeff {
    fn sub_assign(&mut self, o: &Coeff) {
        *self = &*self - o;
    }
}

impl From<Rat> for Coeff {
    fn from(r: Rat) -> Self {
        Coeff::from_rat(r)
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// Textual form: `{"num": ["a/b", ...], "den": [...]}`, ascending in degree.
#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    num: Vec<String>,
    den: Vec<String>,
}

fn poly_strings(p: &Poly) -> Vec<String> {
    p.coeffs.iter().map(format_rat).collect()
}

fn poly_from_strings(v: &[String]) -> Result<Poly> {
    Ok(Poly::from_coeffs(
        v.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?,
    ))
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        poly_strings(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        poly_from_strings(&v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffRepr {
            num: poly_strings(&self.num),
            den: poly_strings(&self.den),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // Accept either the structured form or a bare rational string.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Structured(CoeffRepr),
            Scalar(String),
        }
        match Either::deserialize(d)? {
            Either::Structured(r) => {
                let num = poly_from_strings(&r.num).map_err(serde::de::Error::custom)?;
                let den = poly_from_strings(&r.den).map_err(serde::de::Error::custom)?;
                coeff_normalize(num, den).map_err(serde::de::Error::custom)
            }
            Either::Scalar(s) => parse_rat(&s)
                .map(Coeff::from_rat)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| rat_int(x)).collect())
    }

    #[test]
    fn normalize_cancels_common_factor() {
        let c = coeff_normalize(poly(&[0, 2, 2]), poly(&[0, 4])).unwrap();
        assert_eq!(c.num(), &Poly::from_coeffs(vec![rat(1, 2), rat(1, 2)]));
        assert!(c.den().is_one());
        assert_eq!(c.display_in("p"), "(p + 1)/2");
    }

    #[test]
    fn normalize_zero_numerator() {
        let c = coeff_normalize(Poly::zero(), poly(&[1, 0, 0, 1])).unwrap();
        assert!(c.is_zero());
        assert!(c.den().is_one());
    }

    #[test]
    fn normalize_exact_division() {
        let c = coeff_normalize(poly(&[-1, 0, 1]), poly(&[-1, 1])).unwrap();
        assert_eq!(c, Coeff::from_poly(poly(&[1, 1])));
    }

    #[test]
    fn normalize_rejects_zero_denominator() {
        assert!(matches!(
            coeff_normalize(poly(&[1]), Poly::zero()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn eval_examples() {
        let c = coeff_normalize(poly(&[1, 1]), poly(&[2])).unwrap();
        assert_eq!(c.eval(&rat_int(3)).unwrap(), rat_int(2));
        assert_eq!(Coeff::zero().eval(&rat_int(7)).unwrap(), rat_int(0));
        let c = coeff_normalize(poly(&[-1, 0, 1]), poly(&[2, 1])).unwrap();
        assert_eq!(c.eval(&rat_int(1)).unwrap(), rat_int(0));
        assert!(matches!(c.eval(&rat_int(-2)), Err(Error::Pole(_))));
    }

    #[test]
    fn negative_leading_denominator_is_flipped() {
        let c = coeff_normalize(poly(&[1]), poly(&[1, -1])).unwrap();
        assert_eq!(c.den().leading(), Some(&rat_int(1)));
        assert_eq!(c.eval(&rat_int(2)).unwrap(), rat_int(-1));
    }

    #[test]
    fn constants_round_trip_through_rat() {
        let r = rat(-44, 135);
        let c = Coeff::from_rat(r.clone());
        assert_eq!(c.as_rat(), Some(r));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"num":["-44/135"],"den":["1"]}"#);
        let back: Coeff = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(format_rat(&rat(-3, 2)), "-3/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn display_forms() {
        let p = Coeff::param();
        assert_eq!((&p / &Coeff::from_int(12)).display_in("p"), "p/12");
        let c = &Coeff::one() / &(&p - &Coeff::one());
        assert_eq!(c.display_in("g"), "1/(g - 1)");
    }
}

/// Serde adapter writing a [`Rat`] as the string `"a"` or `"a/b"`.
pub mod rat_string {
    use super::{format_rat, parse_rat, Rat};

    pub fn serialize<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s: String = serde::Deserialize::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

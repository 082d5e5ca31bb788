//! Polynomials and rational maps in the global curve coordinate `z`, with
//! coefficients in Q(p).

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::coeff::{rat_int, Coeff};
use crate::error::{Error, Result};
use crate::series::LaurentSeries;

/// Dense polynomial in `z`, ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Coeff>", into = "Vec<Coeff>")]
pub struct ZPoly(Vec<Coeff>);

impl From<Vec<Coeff>> for ZPoly {
    fn from(c: Vec<Coeff>) -> Self {
        ZPoly::new(c)
    }
}

impl From<ZPoly> for Vec<Coeff> {
    fn from(p: ZPoly) -> Self {
        p.0
    }
}

impl ZPoly {
    pub fn new(mut c: Vec<Coeff>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ZPoly(c)
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn constant(c: Coeff) -> Self {
        ZPoly::new(vec![c])
    }

    /// `z - a`
    pub fn linear_root(a: &Coeff) -> Self {
        ZPoly::new(vec![-a, Coeff::one()])
    }

    /// Shorthand for integer coefficient lists.
    pub fn from_ints(c: &[i64]) -> Self {
        ZPoly::new(c.iter().map(|&x| Coeff::from_int(x)).collect())
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, z: &Coeff) -> Coeff {
        let mut acc = Coeff::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale_rat(&rat_int(k as i64)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Coeff) -> ZPoly {
        ZPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Coefficients of `P(a + ζ)` as a polynomial in ζ.
    pub fn taylor_shift(&self, a: &Coeff) -> ZPoly {
        // Repeated synthetic division by (z - a).
        let mut c = self.0.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * a;
                c[j] = &c[j] + &t;
            }
        }
        ZPoly::new(c)
    }

    pub fn div_rem(&self, d: &ZPoly) -> Result<(ZPoly, ZPoly)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::NotInvertible("division by zero polynomial".into()))?;
        if self.0.len() <= dd {
            return Ok((ZPoly::zero(), self.clone()));
        }
        let lc_inv = d.0[dd].inv()?;
        let mut r = self.0.clone();
        let mut q = vec![Coeff::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[i + j] = &r[i + j] - &(&c * dj);
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((ZPoly::new(q), ZPoly::new(r)))
    }

    pub fn monic(&self) -> ZPoly {
        match self.0.last() {
            Some(lc) if !lc.is_one() => self.scale(&lc.inv().expect("nonzero leading")),
            _ => self.clone(),
        }
    }

    pub fn gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
        let mut x = a.monic();
        let mut y = b.monic();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y).expect("nonzero divisor");
            x = y;
            y = r.monic();
        }
        x
    }

    /// Exact series of the polynomial in ζ = z - a, known to every order.
    pub fn local_series(&self, a: &Coeff, var: &str, hi: i32) -> LaurentSeries {
        LaurentSeries::from_poly(var, self.taylor_shift(a).coeffs(), hi)
    }
}

impl Add<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.0.len().max(o.0.len());
        ZPoly::new(
            (0..n)
                .map(|i| match (self.0.get(i), o.0.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    _ => unreachable!(),
                })
                .collect(),
        )
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        self + &(-o)
    }
}

impl Mul<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![Coeff::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += &(a * b);
                }
            }
        }
        ZPoly::new(v)
    }
}

/// Rational map `num(z) / den(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatMap {
    pub num: ZPoly,
    pub den: ZPoly,
}

impl RatMap {
    pub fn new(num: ZPoly, den: ZPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Validation("rational map with zero denominator".into()));
        }
        Ok(RatMap { num, den })
    }

    pub fn polynomial(num: ZPoly) -> Self {
        RatMap {
            num,
            den: ZPoly::constant(Coeff::one()),
        }
    }

    pub fn identity() -> Self {
        RatMap::polynomial(ZPoly::from_ints(&[0, 1]))
    }

    /// Divides out the common factor of numerator and denominator.
    pub fn reduced(&self) -> RatMap {
        let g = ZPoly::gcd(&self.num, &self.den);
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let (n, _) = self.num.div_rem(&g).expect("gcd divides");
        let (d, _) = self.den.div_rem(&g).expect("gcd divides");
        RatMap { num: n, den: d }
    }

    pub fn is_reduced(&self) -> bool {
        ZPoly::gcd(&self.num, &self.den).degree().unwrap_or(0) == 0
    }

    pub fn eval(&self, z: &Coeff) -> Result<Coeff> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::Pole(format!("rational map has a pole at z = {z}")));
        }
        Ok(&self.num.eval(z) / &d)
    }

    pub fn derivative(&self) -> RatMap {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatMap {
            num,
            den: &self.den * &self.den,
        }
        .reduced()
    }

    /// `self ∘ inner`, returned reduced.
    pub fn compose(&self, inner: &RatMap) -> RatMap {
        let m = self
            .num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0));
        // Homogenize: P(N/D) * D^m = sum p_i N^i D^(m-i).
        let homog = |p: &ZPoly| {
            let mut acc = ZPoly::zero();
            for (i, c) in p.coeffs().iter().enumerate() {
                let mut term = ZPoly::constant(c.clone());
                for _ in 0..i {
                    term = &term * &inner.num;
                }
                for _ in i..m {
                    term = &term * &inner.den;
                }
                acc = &acc + &term;
            }
            acc
        };
        RatMap {
            num: homog(&self.num),
            den: homog(&self.den),
        }
        .reduced()
    }

    /// Equality as rational functions (cross-multiplication).
    pub fn same_function(&self, o: &RatMap) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    /// Laurent expansion of `self(a + ζ)` to `O(ζ^hi)`.
    pub fn expand_at(&self, a: &Coeff, var: &str, hi: i32) -> Result<LaurentSeries> {
        let den_shift = self.den.taylor_shift(a);
        let v_d = den_shift
            .coeffs()
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::Validation("zero denominator".into()))? as i32;
        let num = LaurentSeries::from_poly(var, self.num.taylor_shift(a).coeffs(), hi + v_d);
        let den = LaurentSeries::from_poly(var, den_shift.coeffs(), hi + 2 * v_d);
        Ok(num.mul(&den.invert()?)?.truncate(hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = ZPoly::from_ints(&[1, -2, 0, 3]);
        let a = Coeff::from_int(2);
        let s = p.taylor_shift(&a);
        // value at ζ = 1 equals p(3)
        let at1 = s.coeffs().iter().fold(Coeff::zero(), |acc, c| &acc + c);
        assert_eq!(at1, p.eval(&Coeff::from_int(3)));
        assert_eq!(s.coeffs()[0], p.eval(&a));
    }

    #[test]
    fn inverse_map_is_involution() {
        let rho = RatMap::new(ZPoly::from_ints(&[1]), ZPoly::from_ints(&[0, 1])).unwrap();
        assert!(rho.compose(&rho).same_function(&RatMap::identity()));
    }

    #[test]
    fn expansion_with_pole() {
        // 1/(z (1 - z)) at a = 0: ζ^-1 + 1 + ζ + ...
        let f = RatMap::new(ZPoly::from_ints(&[1]), ZPoly::from_ints(&[0, 1, -1])).unwrap();
        let s = f.expand_at(&Coeff::zero(), "ζ", 3).unwrap();
        assert_eq!(s.lo(), -1);
        assert_eq!(s.hi(), 3);
        for k in -1..3 {
            assert_eq!(s.coeff(k).unwrap(), Coeff::one());
        }
    }

    #[test]
    fn gcd_reduces() {
        let f = RatMap::new(ZPoly::from_ints(&[-1, 0, 1]), ZPoly::from_ints(&[-1, 1])).unwrap();
        assert!(!f.is_reduced());
        assert_eq!(f.reduced().num, ZPoly::from_ints(&[1, 1]));
    }
}

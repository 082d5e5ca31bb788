//! Truncated Laurent series over `Coeff`.
//!
//! A series stores the coefficients of `ζ^lo .. ζ^(hi-1)`; everything from
//! `ζ^hi` on is unknown. In canonical form `lo` is the true valuation (the
//! first stored coefficient is nonzero), or `lo == hi` when no nonzero
//! coefficient is known. Every operation reports the tightest truncation
//! bound that follows from the bounds of its inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeff::{format_rat, parse_rat, rat_int, Coeff, CoeffSum};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    var: String,
    lo: i32,
    coeffs: Vec<Coeff>,
}

impl LaurentSeries {
    /// Series with `coeffs[i]` the coefficient of `ζ^(lo+i)`, known up to `lo + len`.
    pub fn new(var: impl Into<String>, lo: i32, coeffs: Vec<Coeff>) -> Self {
        let mut s = LaurentSeries {
            var: var.into(),
            lo,
            coeffs,
        };
        s.canonicalize();
        s
    }

    /// The unknown series `O(ζ^hi)`.
    pub fn big_o(var: impl Into<String>, hi: i32) -> Self {
        LaurentSeries {
            var: var.into(),
            lo: hi,
            coeffs: Vec::new(),
        }
    }

    /// `c ζ^k + O(ζ^hi)`.
    pub fn monomial(var: impl Into<String>, c: Coeff, k: i32, hi: i32) -> Self {
        if k >= hi {
            return LaurentSeries::big_o(var, hi);
        }
        let mut coeffs = vec![Coeff::zero(); (hi - k) as usize];
        coeffs[0] = c;
        LaurentSeries::new(var, k, coeffs)
    }

    pub fn one(var: impl Into<String>, hi: i32) -> Self {
        LaurentSeries::monomial(var, Coeff::one(), 0, hi)
    }

    /// The identity series `ζ + O(ζ^hi)`.
    pub fn identity(var: impl Into<String>, hi: i32) -> Self {
        LaurentSeries::monomial(var, Coeff::one(), 1, hi)
    }

    /// A polynomial in ζ (ascending coefficients from ζ^0), truncated at `hi`.
    pub fn from_poly(var: impl Into<String>, coeffs: &[Coeff], hi: i32) -> Self {
        let n = hi.max(0) as usize;
        let mut v: Vec<Coeff> = coeffs.iter().take(n).cloned().collect();
        v.resize(n, Coeff::zero());
        LaurentSeries::new(var, 0, v)
    }

    fn canonicalize(&mut self) {
        let lead = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i32;
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Valuation (first possibly nonzero exponent).
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Truncation bound (exclusive).
    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32
    }

    /// True when no nonzero coefficient is known.
    pub fn is_big_o(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Known coefficient of `ζ^k`, or a precision error if `k >= hi`.
    pub fn coeff(&self, k: i32) -> Result<Coeff> {
        if k >= self.hi() {
            return Err(Error::precision(
                format!("coefficient of {}^{k}", self.var),
                k as i64 + 1,
                self.hi() as i64,
            ));
        }
        Ok(self.coeff_or_zero(k))
    }

    /// Coefficient of `ζ^k`, zero outside the stored range (caller checks bounds).
    pub fn coeff_or_zero(&self, k: i32) -> Coeff {
        if k < self.lo || k >= self.hi() {
            Coeff::zero()
        } else {
            self.coeffs[(k - self.lo) as usize].clone()
        }
    }

    pub(crate) fn coeff_ref(&self, k: i32) -> Option<&Coeff> {
        if k < self.lo || k >= self.hi() {
            None
        } else {
            Some(&self.coeffs[(k - self.lo) as usize])
        }
    }

    /// Iterates over the known nonzero terms `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Coeff)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i32, c))
    }

    pub fn with_var(mut self, var: impl Into<String>) -> Self {
        self.var = var.into();
        self
    }

    /// Forgets everything from `ζ^hi` on.
    pub fn truncate(&self, hi: i32) -> Self {
        if hi >= self.hi() {
            return self.clone();
        }
        if hi <= self.lo {
            return LaurentSeries::big_o(self.var.clone(), hi);
        }
        LaurentSeries {
            var: self.var.clone(),
            lo: self.lo,
            coeffs: self.coeffs[..(hi - self.lo) as usize].to_vec(),
        }
    }

    /// Declares the stored terms exact and the rest zero, up to `hi`.
    ///
    /// Only valid when the series is known to be a polynomial (e.g. a Newton
    /// approximant being refined).
    pub(crate) fn pad_exact(&self, hi: i32) -> Self {
        if hi <= self.hi() {
            return self.truncate(hi);
        }
        let mut coeffs = self.coeffs.clone();
        let lo = if coeffs.is_empty() { hi } else { self.lo };
        coeffs.resize((hi - lo) as usize, Coeff::zero());
        LaurentSeries {
            var: self.var.clone(),
            lo,
            coeffs,
        }
    }

    fn check_var(&self, o: &LaurentSeries) -> Result<()> {
        if self.var != o.var {
            return Err(Error::Validation(format!(
                "series variables differ: {} vs {}",
                self.var, o.var
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_var(o)?;
        let hi = self.hi().min(o.hi());
        let lo = self.lo.min(o.lo).min(hi);
        let coeffs = (lo..hi)
            .map(|k| match (self.coeff_ref(k), o.coeff_ref(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Coeff::zero(),
            })
            .collect();
        Ok(LaurentSeries::new(self.var.clone(), lo, coeffs))
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            var: self.var.clone(),
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, o: &LaurentSeries) -> Result<LaurentSeries> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Coeff) -> LaurentSeries {
        if c.is_zero() {
            return LaurentSeries::big_o(self.var.clone(), self.hi());
        }
        LaurentSeries {
            var: self.var.clone(),
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `ζ^k`.
    pub fn shift(&self, k: i32) -> LaurentSeries {
        LaurentSeries {
            var: self.var.clone(),
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn mul(&self, o: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_var(o)?;
        Ok(self.mul_to(o, i32::MAX))
    }

    /// Product, additionally truncated at `cap`.
    pub(crate) fn mul_to(&self, o: &LaurentSeries, cap: i32) -> LaurentSeries {
        let var = self.var.clone();
        let hi = (self.hi() + o.lo).min(o.hi() + self.lo).min(cap);
        let lo = self.lo + o.lo;
        if self.is_big_o() || o.is_big_o() || hi <= lo {
            return LaurentSeries::big_o(var, hi);
        }
        let n = (hi - lo) as usize;
        let mut sums = vec![CoeffSum::new(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                sums[i + j].add_product(a, b);
            }
        }
        LaurentSeries::new(var, lo, sums.into_iter().map(CoeffSum::finish).collect())
    }

    /// Multiplicative inverse; needs a known nonzero leading coefficient.
    pub fn invert(&self) -> Result<LaurentSeries> {
        if self.is_big_o() {
            return Err(Error::NotInvertible(format!(
                "series is O({}^{}) with no known nonzero coefficient",
                self.var,
                self.hi()
            )));
        }
        let n = self.coeffs.len();
        let u0_inv = self.coeffs[0].inv()?;
        let mut b: Vec<Coeff> = Vec::with_capacity(n);
        b.push(u0_inv.clone());
        for m in 1..n {
            let mut acc = CoeffSum::new();
            for i in 1..=m {
                acc.add_product(&self.coeffs[i], &b[m - i]);
            }
            b.push(-(&acc.finish() * &u0_inv));
        }
        Ok(LaurentSeries::new(self.var.clone(), -self.lo, b))
    }

    pub fn div(&self, o: &LaurentSeries) -> Result<LaurentSeries> {
        self.mul(&o.invert()?)
    }

    /// Integer power (negative powers go through `invert`).
    pub fn pow(&self, e: i32) -> Result<LaurentSeries> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        if e != 0 {
            let mut acc = base.clone();
            for _ in 1..e.unsigned_abs() {
                acc = acc.mul(&base)?;
            }
            return Ok(acc);
        }
        // 1 is exact; give it the relative precision of the base.
        Ok(LaurentSeries::one(
            self.var.clone(),
            (self.hi() - self.lo).max(1),
        ))
    }

    pub fn differentiate(&self) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale_rat(&rat_int((self.lo + i as i32) as i64)))
            .collect();
        LaurentSeries::new(self.var.clone(), self.lo - 1, coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn antidifferentiate(&self) -> Result<LaurentSeries> {
        if self.hi() <= -1 {
            return Err(Error::precision(
                format!("residue of {}-series before integrating", self.var),
                0,
                self.hi() as i64,
            ));
        }
        if !self.coeff_or_zero(-1).is_zero() {
            return Err(Error::LogTerm);
        }
        let lo = self.lo + 1;
        let hi = self.hi() + 1;
        let coeffs = (lo..hi)
            .map(|k| {
                if k == 0 {
                    Coeff::zero()
                } else {
                    self.coeff_or_zero(k - 1)
                        .scale_rat(&rat_int(k as i64).recip())
                }
            })
            .collect();
        Ok(LaurentSeries::new(self.var.clone(), lo, coeffs))
    }

    /// Coefficient of `ζ^-1`.
    pub fn residue(&self) -> Result<Coeff> {
        self.coeff(-1)
            .map_err(|_| Error::precision(format!("residue in {}", self.var), 0, self.hi() as i64))
    }

    /// Composition `self ∘ g`.
    ///
    /// Requires `val(g) >= 1`; when `self` has a pole, `val(g)` must be exactly 1.
    pub fn compose(&self, g: &LaurentSeries) -> Result<LaurentSeries> {
        if g.is_big_o() {
            return Err(Error::Valuation(
                "inner series has no known nonzero coefficient".into(),
            ));
        }
        let v = g.lo;
        if v < 1 {
            return Err(Error::Valuation(format!(
                "inner series must vanish at 0 (valuation {v})"
            )));
        }
        let var = g.var.clone();
        if self.lo < 0 {
            if v != 1 {
                return Err(Error::Valuation(
                    "composing a series with a pole needs an inner series of valuation exactly 1"
                        .into(),
                ));
            }
            let regular = self.shift(-self.lo);
            let head = g.pow(self.lo)?;
            let tail = regular.compose(g)?;
            return head.mul(&tail);
        }
        if self.is_big_o() {
            return Ok(LaurentSeries::big_o(var, self.hi().saturating_mul(v)));
        }
        let rel = g.hi() - v;
        let mut hi = self.hi().saturating_mul(v);
        for (k, _) in self.terms() {
            if k >= 1 {
                hi = hi.min(k * v + rel);
            }
        }
        // Horner: (((f_n g + f_{n-1}) g + ...) g + f_0, everything cut at `hi`.
        let g = g.truncate(hi);
        let top = self.hi() - 1;
        let mut acc = LaurentSeries::monomial(var.clone(), self.coeff_or_zero(top), 0, hi);
        for k in (self.lo.max(0)..top).rev() {
            acc = acc.mul_to(&g, hi).pad_to(hi);
            let c = self.coeff_or_zero(k);
            if !c.is_zero() {
                acc = acc.add_exact_constant(&c, hi);
            }
        }
        if self.lo > 0 {
            acc = acc.mul_to(&g.pow(self.lo)?, hi);
        }
        Ok(acc.truncate(hi))
    }

    /// Extends the known window of an intermediate Horner product to `hi`.
    ///
    /// Sound inside `compose` because the only truncation there is the global
    /// cap, which every product already respects.
    fn pad_to(&self, hi: i32) -> Self {
        self.pad_exact(hi)
    }

    fn add_exact_constant(&self, c: &Coeff, hi: i32) -> Self {
        let mut s = self.pad_exact(hi);
        if hi <= 0 {
            return s;
        }
        if s.lo > 0 {
            let mut coeffs = vec![Coeff::zero(); s.lo as usize];
            coeffs.extend(s.coeffs);
            s = LaurentSeries {
                var: s.var,
                lo: 0,
                coeffs,
            };
        }
        let idx = (-s.lo) as usize;
        s.coeffs[idx] = &s.coeffs[idx] + c;
        s.canonicalize();
        s
    }

    /// Compositional inverse of a series `c₁ζ + O(ζ²)` by Newton iteration.
    pub fn revert(&self) -> Result<LaurentSeries> {
        if self.lo != 1 || self.is_big_o() {
            return Err(Error::Valuation(format!(
                "reversion needs c1 ζ + O(ζ^2) with c1 != 0 (valuation {})",
                self.lo
            )));
        }
        let target = self.hi();
        let var = self.var.clone();
        let c1_inv = self.coeffs[0].inv()?;
        let deriv = self.differentiate();
        let id = LaurentSeries::identity(var.clone(), target);
        let mut h = LaurentSeries::monomial(var.clone(), c1_inv, 1, 2.min(target));
        let mut prec = 2;
        while prec < target {
            prec = (2 * prec).min(target);
            let hp = h.pad_exact(prec);
            let fh = self.compose(&hp)?.truncate(prec);
            let dfh = deriv.compose(&hp)?.truncate(prec);
            let err = fh.sub(&id.truncate(prec))?;
            let step = err.div(&dfh)?;
            h = hp.sub(&step)?.truncate(prec);
        }
        Ok(h.truncate(target))
    }

    /// Square root of a series with constant term 1.
    pub fn sqrt_unit(&self) -> Result<LaurentSeries> {
        if self.lo != 0 || !self.coeffs[0].is_one() {
            return Err(Error::Domain(
                "square root needs a series of the form 1 + O(ζ)".into(),
            ));
        }
        let n = self.coeffs.len();
        let half = Coeff::from_frac(1, 2);
        let mut s: Vec<Coeff> = vec![Coeff::one()];
        for m in 1..n {
            let mut acc = self.coeffs[m].clone();
            for i in 1..m {
                acc -= &(&s[i] * &s[m - i]);
            }
            s.push(&acc * &half);
        }
        Ok(LaurentSeries::new(self.var.clone(), 0, s))
    }
}

/// JSON form: `{"var":"ζ","lo":-3,"hi":8,"coeffs":{"-3":"1/8", ...}}`.
#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    var: String,
    lo: i32,
    hi: i32,
    coeffs: BTreeMap<String, Coeff>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        // Exponents are emitted in numeric order, constants as plain strings.
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("var", &self.var)?;
        m.serialize_entry("lo", &self.lo)?;
        m.serialize_entry("hi", &self.hi())?;
        struct Terms<'a>(&'a LaurentSeries);
        impl Serialize for Terms<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                s: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(None)?;
                for (k, c) in self.0.terms() {
                    match c.as_rat() {
                        Some(r) => m.serialize_entry(&k.to_string(), &format_rat(&r))?,
                        None => m.serialize_entry(&k.to_string(), c)?,
                    }
                }
                m.end()
            }
        }
        m.serialize_entry("coeffs", &Terms(self))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SeriesRepr::deserialize(d)?;
        if r.lo > r.hi {
            return Err(D::Error::custom("lo must not exceed hi"));
        }
        let mut coeffs = vec![Coeff::zero(); (r.hi - r.lo) as usize];
        for (k, c) in r.coeffs {
            let k: i32 = k.parse().map_err(D::Error::custom)?;
            if k < r.lo || k >= r.hi {
                return Err(D::Error::custom(format!("exponent {k} outside [lo, hi)")));
            }
            coeffs[(k - r.lo) as usize] = c;
        }
        Ok(LaurentSeries::new(r.var, r.lo, coeffs))
    }
}

/// Parses a rational-coefficient series from `(exponent, "a/b")` pairs.
pub fn series_from_rats(var: &str, hi: i32, terms: &[(i32, &str)]) -> Result<LaurentSeries> {
    let lo = terms.iter().map(|t| t.0).min().unwrap_or(hi).min(hi);
    let mut coeffs = vec![Coeff::zero(); (hi - lo) as usize];
    for (k, s) in terms {
        coeffs[(k - lo) as usize] = Coeff::from_rat(parse_rat(s)?);
    }
    Ok(LaurentSeries::new(var, lo, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(hi: i32, terms: &[(i32, &str)]) -> LaurentSeries {
        series_from_rats("ζ", hi, terms).unwrap()
    }

    #[test]
    fn invert_geometric() {
        let f = s(3, &[(0, "1"), (1, "-1")]);
        let inv = f.invert().unwrap();
        assert_eq!(inv, s(3, &[(0, "1"), (1, "1"), (2, "1")]));
    }

    #[test]
    fn mul_with_pole() {
        let f = s(3, &[(-1, "1"), (0, "1")]);
        let g = LaurentSeries::from_poly("ζ", &[Coeff::zero(), Coeff::one()], 10);
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod.coeff(0).unwrap(), Coeff::one());
        assert_eq!(prod.coeff(1).unwrap(), Coeff::one());
        assert_eq!(prod.coeff(2).unwrap(), Coeff::zero());
        // f known to ζ^3 relative to ζ^-1, g relative precision 9: hi = min(3+1, 10-1)
        assert_eq!(prod.hi(), 4);
    }

    #[test]
    fn antiderivative_power_rule() {
        let f = s(3, &[(-2, "1"), (0, "3")]);
        let a = f.antidifferentiate().unwrap();
        assert_eq!(a.coeff(-1).unwrap(), Coeff::from_int(-1));
        assert_eq!(a.coeff(1).unwrap(), Coeff::from_int(3));
        assert_eq!(a.coeff(0).unwrap(), Coeff::zero());
        assert_eq!(a.hi(), 4);
    }

    #[test]
    fn antiderivative_rejects_log() {
        let f = s(3, &[(-1, "2")]);
        assert_eq!(f.antidifferentiate(), Err(Error::LogTerm));
    }

    #[test]
    fn invert_of_unknown_series_fails() {
        assert!(matches!(
            LaurentSeries::big_o("ζ", 4).invert(),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn compose_examples() {
        let geo = s(6, &[(0, "1"), (1, "1"), (2, "1"), (3, "1"), (4, "1"), (5, "1")]);
        let neg = s(6, &[(1, "-1")]);
        let c = geo.compose(&neg).unwrap();
        assert_eq!(
            c,
            s(6, &[(0, "1"), (1, "-1"), (2, "1"), (3, "-1"), (4, "1"), (5, "-1")])
        );

        let sq = s(8, &[(2, "1")]);
        let g = s(8, &[(1, "1"), (2, "1")]);
        let c = sq.compose(&g).unwrap();
        assert_eq!(c.coeff(2).unwrap(), Coeff::from_int(1));
        assert_eq!(c.coeff(3).unwrap(), Coeff::from_int(2));
        assert_eq!(c.coeff(4).unwrap(), Coeff::from_int(1));
        assert_eq!(c.coeff(5).unwrap(), Coeff::zero());
    }

    #[test]
    fn compose_rejects_bad_valuation() {
        let f = s(4, &[(0, "1"), (1, "1")]);
        let g = s(4, &[(0, "1"), (1, "1")]);
        assert!(matches!(f.compose(&g), Err(Error::Valuation(_))));
        let pole = s(4, &[(-1, "1")]);
        let g2 = s(6, &[(2, "1")]);
        assert!(matches!(pole.compose(&g2), Err(Error::Valuation(_))));
    }

    #[test]
    fn compose_with_pole() {
        // 1/ζ ∘ (ζ + ζ^2) = 1/ζ - 1 + ζ - ...
        let f = s(4, &[(-1, "1")]);
        let g = s(6, &[(1, "1"), (2, "1")]);
        let c = f.compose(&g).unwrap();
        assert_eq!(c.coeff(-1).unwrap(), Coeff::one());
        assert_eq!(c.coeff(0).unwrap(), Coeff::from_int(-1));
        assert_eq!(c.coeff(1).unwrap(), Coeff::one());
    }

    #[test]
    fn revert_identity_and_catalan() {
        let id = s(6, &[(1, "1")]);
        assert_eq!(id.revert().unwrap(), id);
        let f = s(5, &[(1, "1"), (2, "-1")]);
        let h = f.revert().unwrap();
        assert_eq!(h, s(5, &[(1, "1"), (2, "1"), (3, "2"), (4, "5")]));
    }

    #[test]
    fn revert_rejects_zero_linear_term() {
        let f = s(5, &[(2, "1")]);
        assert!(matches!(f.revert(), Err(Error::Valuation(_))));
    }

    #[test]
    fn residue_extraction() {
        assert_eq!(s(3, &[(-1, "1")]).residue().unwrap(), Coeff::one());
        assert_eq!(s(3, &[(-2, "1"), (0, "3")]).residue().unwrap(), Coeff::zero());
        assert!(s(-1, &[(-3, "1")]).residue().unwrap_err().is_precision());
    }

    #[test]
    fn sqrt_of_square() {
        let f = s(8, &[(0, "1"), (1, "1")]);
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.sqrt_unit().unwrap().truncate(8), f);
    }

    #[test]
    fn json_round_trip() {
        let f = s(8, &[(-3, "1/8"), (0, "-2/3"), (5, "7")]);
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(
            j,
            r#"{"var":"ζ","lo":-3,"hi":8,"coeffs":{"-3":"1/8","0":"-2/3","5":"7"}}"#
        );
        let back: LaurentSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(back, f);
    }
}

//! Enumerative data read off the invariants: simple Hurwitz numbers from the
//! Lambert curve and rooted quadrangulation counts from the map curve.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{gamma2_series, lambert, maps_quad};
use crate::coeff::{rat, rat_int, rat_string, Coeff, Poly, Rat};
use crate::curve::{Family, SpectralCurve, XData, YData};
use crate::engine::{EngineOptions, OmegaTable};
use crate::error::{Error, Result};
use crate::form::MultiForm;
use crate::poly_z::{RatMap, ZPoly};
use crate::series::LaurentSeries;

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

// ---------------------------------------------------------------------------
// Hurwitz numbers

pub const HURWITZ_NORMALIZATION: &str = "H(mu) = (2g-2+n+|mu|)! * [w_1^mu_1 ... w_n^mu_n] W_{g,n}, \
     w_i = e^{x_i}; the sum over orderings contributes one term per distinct monomial";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzRequest {
    pub g: u32,
    pub n: usize,
    /// Largest |μ| tabulated.
    pub max_degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzEntry {
    /// Non-increasing parts.
    pub mu: Vec<u32>,
    /// Coefficient of ∏ w_i^{μ_i} in W_{g,n}.
    #[serde(with = "rat_string")]
    pub coefficient: Rat,
    #[serde(with = "rat_string")]
    pub hurwitz: Rat,
    /// Number of permutations of the parts fixing μ.
    pub stabilizer: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzTable {
    pub g: u32,
    pub n: usize,
    pub normalization: String,
    pub entries: Vec<HurwitzEntry>,
}

impl HurwitzTable {
    pub fn get(&self, mu: &[u32]) -> Option<&HurwitzEntry> {
        let mut key = mu.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.entries.iter().find(|e| e.mu == key)
    }
}

/// z(w) on the branch z → 0 of w = z e^{-z} (i.e. w = e^x on the Lambert
/// curve), by series reversion; exact below w^hi.
pub fn tree_function(hi: i32) -> Result<LaurentSeries> {
    let hi = hi.max(2);
    let mut coeffs = vec![Coeff::zero()];
    let mut fact = BigInt::one();
    for k in 0..hi - 1 {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        coeffs.push(Coeff::from_rat(Rat::new(BigInt::from(sign), fact.clone())));
    }
    LaurentSeries::new("z", 0, coeffs).revert().map(|t| t.with_var("w"))
}

/// Non-increasing partitions of every total in `n..=max` into `n` parts.
pub fn partitions(n: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(left: usize, cap: u32, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        // leave at least 1 for each remaining part
        let top = cap.min(budget.saturating_sub(left as u32 - 1));
        for part in (1..=top).rev() {
            cur.push(part);
            rec(left - 1, part, budget - part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max, max, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let sa: u32 = a.iter().sum();
        let sb: u32 = b.iter().sum();
        sa.cmp(&sb).then(b.cmp(a))
    });
    out
}

fn stabilizer(mu: &[u32]) -> u64 {
    let mut out = 1u64;
    let mut i = 0;
    while i < mu.len() {
        let j = (i..mu.len()).find(|&j| mu[j] != mu[i]).unwrap_or(mu.len());
        out *= (1..=(j - i) as u64).product::<u64>();
        i = j;
    }
    out
}

fn hurwitz_entry(g: u32, mu: Vec<u32>, coefficient: Rat) -> HurwitzEntry {
    let n = mu.len() as i64;
    let total: i64 = mu.iter().map(|&m| m as i64).sum();
    let b = (2 * g as i64 - 2 + n + total) as u64;
    let hurwitz = &coefficient * Rat::from_integer(factorial(b));
    HurwitzEntry {
        stabilizer: stabilizer(&mu),
        mu,
        coefficient,
        hurwitz,
    }
}

/// dz/dx / (z-1)^k in w = e^x, for k = 1..=kmax, exact below w^hi.
fn lambert_factors(kmax: u32, hi: i32) -> Result<Vec<LaurentSeries>> {
    let t = tree_function(hi + 1)?;
    let w_dt = t.differentiate().shift(1).truncate(hi);
    let inv = t.sub(&LaurentSeries::one("w", hi + 1))?.invert()?;
    let mut out = Vec::with_capacity(kmax as usize);
    let mut acc = w_dt;
    for _ in 0..kmax {
        acc = acc.mul(&inv)?.truncate(hi);
        out.push(acc.clone());
    }
    Ok(out)
}

fn rat_of(c: &Coeff) -> Result<Rat> {
    c.as_rat()
        .ok_or_else(|| Error::Internal(format!("expected a rational coefficient, got {c}")))
}

/// Hurwitz numbers H_{g,n}(μ) for |μ| ≤ `max_degree`.
pub fn hurwitz_extract(req: &HurwitzRequest) -> Result<HurwitzTable> {
    let mut table = OmegaTable::new(lambert(), EngineOptions::default())?;
    hurwitz_extract_with(&mut table, req)
}

/// As [`hurwitz_extract`], reusing a table built on the Lambert curve.
pub fn hurwitz_extract_with(table: &mut OmegaTable, req: &HurwitzRequest) -> Result<HurwitzTable> {
    if req.n == 0 {
        return Err(Error::Domain("Hurwitz numbers need n ≥ 1".into()));
    }
    let d = req.max_degree;
    let mus = partitions(req.n, d);
    let entries = match (req.g, req.n) {
        (0, 1) => {
            // W₀,₁ = y = z
            let t = tree_function(d as i32 + 1)?;
            mus.into_iter()
                .map(|mu| Ok(hurwitz_entry(0, mu.clone(), rat_of(&t.coeff(mu[0] as i32)?)?)))
                .collect::<Result<Vec<_>>>()?
        }
        (0, 2) => {
            let f = w02_series(d)?;
            mus.into_iter()
                .map(|mu| {
                    let c = f.coeff(mu[0], mu[1]);
                    hurwitz_entry(0, mu, c)
                })
                .collect()
        }
        (g, n) => {
            let name = &table.curve().name;
            if name != "lambert" {
                return Err(Error::Validation(format!(
                    "Hurwitz extraction needs the lambert curve, got '{name}'"
                )));
            }
            let omega = table.omega(g, n)?;
            let factors = lambert_factors(omega.max_order(), d as i32 + 1)?;
            mus.into_iter()
                .map(|mu| Ok(hurwitz_entry(g, mu.clone(), monomial_coeff(&omega, &factors, &mu)?)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(HurwitzTable {
        g: req.g,
        n: req.n,
        normalization: HURWITZ_NORMALIZATION.into(),
        entries,
    })
}

fn monomial_coeff(omega: &MultiForm, factors: &[LaurentSeries], mu: &[u32]) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (key, c) in omega.terms() {
        let mut t = rat_of(c)?;
        for (slot, &m) in key.iter().zip(mu) {
            t *= rat_of(&factors[slot.order as usize - 1].coeff(m as i32)?)?;
            if t.is_zero() {
                break;
            }
        }
        acc += t;
    }
    Ok(acc)
}

/// Bivariate series in w₁, w₂ stored by homogeneous components:
/// `c[d][i]` is the coefficient of w₁^i w₂^{d-i}.
#[derive(Clone, Debug)]
struct Biv {
    c: Vec<Vec<Rat>>,
}

impl Biv {
    fn zero(deg: usize) -> Self {
        Biv {
            c: (0..=deg).map(|d| vec![Rat::zero(); d + 1]).collect(),
        }
    }

    fn deg(&self) -> usize {
        self.c.len() - 1
    }

    fn mul(&self, o: &Biv) -> Biv {
        let deg = self.deg().min(o.deg());
        let mut out = Biv::zero(deg);
        for da in 0..=deg {
            for db in 0..=deg - da {
                for (i, a) in self.c[da].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in o.c[db].iter().enumerate() {
                        if !b.is_zero() {
                            out.c[da + db][i + j] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Inverse of a series with constant term c₀ ≠ 0.
    fn invert(&self) -> Biv {
        let deg = self.deg();
        let c0_inv = self.c[0][0].recip();
        let mut out = Biv::zero(deg);
        out.c[0][0] = c0_inv.clone();
        for d in 1..=deg {
            let mut acc = vec![Rat::zero(); d + 1];
            for k in 1..=d {
                for (i, a) in self.c[k].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in out.c[d - k].iter().enumerate() {
                        acc[i + j] += a * b;
                    }
                }
            }
            out.c[d] = acc.into_iter().map(|x| -(x * &c0_inv)).collect();
        }
        out
    }

    fn coeff(&self, i: u32, j: u32) -> Rat {
        let d = (i + j) as usize;
        self.c.get(d).map(|v| v[i as usize].clone()).unwrap_or_else(Rat::zero)
    }
}

/// Divides a homogeneous component by (w₁ - w₂)², which must divide it.
fn divide_by_diagonal_square(comp: &[Rat]) -> Option<Vec<Rat>> {
    // Dehomogenized at w₂ = 1: synthetic division by (w₁ - 1), twice.
    let mut p = comp.to_vec();
    for _ in 0..2 {
        if p.len() <= 1 {
            return p.iter().all(|c| c.is_zero()).then(Vec::new);
        }
        let n = p.len() - 1;
        let mut q = vec![Rat::zero(); n];
        let mut carry = Rat::zero();
        for i in (0..=n).rev() {
            let v = &p[i] + &carry;
            if i == 0 {
                if !v.is_zero() {
                    return None;
                }
            } else {
                q[i - 1] = v.clone();
                carry = v;
            }
        }
        p = q;
    }
    Some(p)
}

/// W₀,₂ in w₁ = e^{x₁}, w₂ = e^{x₂} through total degree `deg`:
/// w₁w₂ T'(w₁)T'(w₂)/(T(w₁)-T(w₂))² - w₁w₂/(w₁-w₂)².
fn w02_series(deg: u32) -> Result<Biv> {
    let top = deg as usize + 1;
    let t = tree_function(top as i32 + 2)?;
    let a = |k: usize| t.coeff_or_zero(k as i32).as_rat().unwrap_or_else(Rat::zero);
    // (T₁ - T₂)/(w₁ - w₂) = Σ a_k h_{k-1}(w₁, w₂)
    let mut q = Biv::zero(top);
    let mut d1 = Biv::zero(top);
    let mut d2 = Biv::zero(top);
    for d in 0..=top {
        let ak = a(d + 1);
        for i in 0..=d {
            q.c[d][i] = ak.clone();
        }
        let dk = &ak * rat_int(d as i64 + 1);
        d1.c[d][d] = dk.clone();
        d2.c[d][0] = dk;
    }
    let qi = q.invert();
    let mut g = d1.mul(&d2).mul(&qi).mul(&qi);
    g.c[0][0] -= Rat::one();
    // w₁w₂ · G/(w₁-w₂)²: component d of G lands at degree d of the result.
    let mut out = Biv::zero(top);
    for d in 0..=top {
        let quo = divide_by_diagonal_square(&g.c[d])
            .ok_or_else(|| Error::Internal("W₀,₂ has a pole on the diagonal".into()))?;
        for (i, c) in quo.into_iter().enumerate() {
            out.c[d][i + 1] = c;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Rooted maps

pub const MAP_NORMALIZATION: &str = "count = [x^{-1-l} t^V] W_{g,1} / t4^{n4}, \
     V = l/2 + 1 - 2g + n4, faces = n4 + 1 including the marked face of size l";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCountRequest {
    pub g: u32,
    /// Total face counts (including the marked face) to tabulate.
    pub faces: Vec<u32>,
    /// Size l of the marked face.
    pub boundary: u32,
    #[serde(with = "rat_string")]
    pub t4: Rat,
}

impl MapCountRequest {
    pub fn new(g: u32, faces: impl IntoIterator<Item = u32>) -> Self {
        MapCountRequest {
            g,
            faces: faces.into_iter().collect(),
            boundary: 4,
            t4: rat_int(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCount {
    pub faces: u32,
    pub unmarked: u32,
    pub vertices: i64,
    #[serde(with = "rat_string")]
    pub count: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCountTable {
    pub g: u32,
    pub boundary: u32,
    #[serde(with = "rat_string")]
    pub t4: Rat,
    pub normalization: String,
    pub entries: Vec<MapCount>,
}

impl MapCountTable {
    pub fn get(&self, faces: u32) -> Option<&Rat> {
        self.entries.iter().find(|e| e.faces == faces).map(|e| &e.count)
    }
}

/// Laurent polynomial `P(1/s)` as a series in s.
fn poly_at_infinity(p: &ZPoly, var: &str, hi: i32) -> LaurentSeries {
    let d = p.degree().unwrap_or(0) as i32;
    let rev: Vec<Coeff> = p.coeffs().iter().rev().cloned().collect();
    LaurentSeries::from_poly(var, &rev, hi + d).shift(-d)
}

/// A rational map `R(z)` at z = 1/s, as a series in s.
fn rational_at_infinity(r: &RatMap, var: &str, hi: i32) -> Result<LaurentSeries> {
    let dn = r.num.degree().unwrap_or(0) as i32;
    let dd = r.den.degree().unwrap_or(0) as i32;
    let margin = (dn - dd).max(0) + 1;
    let num = poly_at_infinity(&r.num, var, hi + margin);
    let den = poly_at_infinity(&r.den, var, hi + margin);
    Ok(num.div(&den)?.truncate(hi))
}

/// s = 1/z as a series in u = 1/x on the branch z → ∞, exact below u^hi.
fn inverse_z_at_infinity(x: &RatMap, hi: i32) -> Result<LaurentSeries> {
    // u = 1/x(1/s) has valuation 1 in s when x has a simple pole at z = ∞.
    let x_s = rational_at_infinity(x, "s", hi + 1)?;
    if x_s.lo() != -1 {
        return Err(Error::Domain("x must have a simple pole at z = ∞".into()));
    }
    let u_of_s = x_s.invert()?;
    Ok(u_of_s.truncate(hi).revert()?.with_var("u"))
}

/// z as a Laurent series in u = 1/x for x = α + γ(z + 1/z), exact below u^hi.
pub fn expand_at_infinity(alpha: &Coeff, gamma: &Coeff, hi: i32) -> Result<LaurentSeries> {
    if gamma.is_zero() {
        return Err(Error::Validation("γ must be nonzero".into()));
    }
    let x = RatMap::new(
        ZPoly::new(vec![gamma.clone(), alpha.clone(), gamma.clone()]),
        ZPoly::from_ints(&[0, 1]),
    )?;
    // z = 1/s loses one order of relative precision to the leading u.
    inverse_z_at_infinity(&x, hi + 2)?.invert().map(|z| z.truncate(hi))
}

fn x_map(c: &SpectralCurve) -> Result<&RatMap> {
    match &c.x {
        XData::Function(x) => Ok(x),
        XData::Differential(_) => Err(Error::Domain("x must be a rational function of z".into())),
    }
}

/// W_{g,1} = ω_{g,1}/dx as a series in u = 1/x at z → ∞, exact below u^hi.
/// For (0, 1) this is y itself.
pub fn w_at_infinity(c: &SpectralCurve, omega: Option<&MultiForm>, hi: i32) -> Result<LaurentSeries> {
    let x = x_map(c)?;
    let s_of_u = inverse_z_at_infinity(x, hi)?;
    let in_s = match omega {
        None => match &c.y {
            YData::Rational(y) => rational_at_infinity(y, "s", hi)?,
            YData::Germs(_) => return Err(Error::Domain("y must be a rational function of z".into())),
        },
        Some(m) => {
            if m.n() != 1 {
                return Err(Error::Validation("expected a one-variable form".into()));
            }
            let dz_dx = rational_at_infinity(&x.derivative(), "s", hi)?.invert()?;
            let mut acc = LaurentSeries::big_o("s", hi);
            for (key, coef) in m.terms() {
                let slot = key[0];
                let a = &c.branchpoints[slot.bp as usize].a;
                // 1/(z-a)^k = s^k / (1 - a s)^k
                let base = LaurentSeries::from_poly("s", &[Coeff::one(), -a], hi).invert()?.shift(1);
                let term = base.pow(slot.order as i32)?.truncate(hi).scale(coef);
                acc = acc.add(&term)?;
            }
            acc.mul(&dz_dx)?.truncate(hi)
        }
    };
    in_s.compose(&s_of_u)
}

/// Writes an even rational function of γ as N(γ²)/D(γ²).
fn even_in_gamma(c: &Coeff) -> Result<(Vec<Coeff>, Vec<Coeff>)> {
    // Some(0) if only even powers occur, Some(1) if only odd ones.
    let parity = |p: &Poly| -> Option<usize> {
        let mut seen = None;
        for (i, x) in p.coeffs().iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match seen {
                None => seen = Some(i % 2),
                Some(q) if q != i % 2 => return None,
                _ => {}
            }
        }
        seen
    };
    if c.is_zero() {
        return Ok((Vec::new(), vec![Coeff::one()]));
    }
    let offset = match (parity(c.num()), parity(c.den())) {
        (Some(a), Some(b)) if a == b => a,
        _ => {
            return Err(Error::Internal(format!(
                "coefficient {c} is not a function of γ²"
            )))
        }
    };
    let halve = |p: &Poly| -> Vec<Coeff> {
        p.coeffs()
            .iter()
            .skip(offset)
            .step_by(2)
            .map(|x| Coeff::from_rat(x.clone()))
            .collect()
    };
    Ok((halve(c.num()), halve(c.den())))
}

fn horner(p: &[Coeff], x: &LaurentSeries, hi: i32) -> Result<LaurentSeries> {
    let mut acc = LaurentSeries::big_o(x.var(), hi);
    for c in p.iter().rev() {
        acc = acc.mul(x)?.truncate(hi);
        acc = acc.add(&LaurentSeries::monomial(x.var(), c.clone(), 0, hi))?;
    }
    Ok(acc)
}

/// C(γ) with γ² = γ²(t) substituted, exact below t^hi.
pub fn substitute_gamma(c: &Coeff, t4: &Rat, hi: i32) -> Result<LaurentSeries> {
    let (n, d) = even_in_gamma(c)?;
    let shift = d.iter().position(|x| !x.is_zero()).unwrap_or(0) as i32;
    let work = hi + 2 * shift + 1;
    let g2 = gamma2_series(t4, work)?;
    let num = horner(&n, &g2, work)?;
    let den = horner(&d, &g2, work)?;
    let q = num.div(&den)?;
    if q.hi() < hi {
        return Err(Error::precision("t-expansion", hi as i64, q.hi() as i64));
    }
    Ok(q.truncate(hi))
}

/// Rooted quadrangulation counts of genus `g` with a marked face of size `l`.
pub fn map_count_extract(req: &MapCountRequest) -> Result<MapCountTable> {
    let mut table = OmegaTable::new(maps_quad(&req.t4, None)?, EngineOptions::default())?;
    map_count_extract_with(&mut table, req)
}

/// As [`map_count_extract`], reusing a table built on the symbolic-γ map curve.
pub fn map_count_extract_with(table: &mut OmegaTable, req: &MapCountRequest) -> Result<MapCountTable> {
    let l = req.boundary;
    if l % 2 == 1 || l == 0 {
        return Err(Error::Validation(format!(
            "quadrangulations have even face sizes; marked face size {l} rejected"
        )));
    }
    if req.t4.is_zero() {
        return Err(Error::Validation("t4 must be nonzero".into()));
    }
    if req.faces.contains(&0) {
        return Err(Error::Validation("face counts include the marked face, so start at 1".into()));
    }
    let curve = table.curve().clone();
    match &curve.family {
        Some(Family::MapsQuad { gamma, t4 }) if *gamma == Coeff::param() && t4.as_rat().as_ref() == Some(&req.t4) => {}
        _ => {
            return Err(Error::Validation(
                "map counting needs the quadrangulation curve with γ = p symbolic and the requested t4".into(),
            ))
        }
    }
    let hi = l as i32 + 2;
    let w = if req.g == 0 {
        w_at_infinity(&curve, None, hi)?
    } else {
        let m = table.omega(req.g, 1)?;
        w_at_infinity(&curve, Some(&m), hi)?
    };
    let c = w.coeff(l as i32 + 1)?;
    let vertices = |f: u32| l as i64 / 2 + 1 - 2 * req.g as i64 + (f as i64 - 1);
    let vmax = req.faces.iter().map(|&f| vertices(f)).max().unwrap_or(0).max(0);
    let series = substitute_gamma(&c, &req.t4, vmax as i32 + 1)?;
    let entries = req
        .faces
        .iter()
        .map(|&f| {
            let v = vertices(f);
            let raw = if v < 0 { Rat::zero() } else { rat_of(&series.coeff(v as i32)?)? };
            let count = raw / req.t4.pow(f as i32 - 1);
            Ok(MapCount {
                faces: f,
                unmarked: f - 1,
                vertices: v,
                count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MapCountTable {
        g: req.g,
        boundary: l,
        t4: req.t4.clone(),
        normalization: MAP_NORMALIZATION.into(),
        entries,
    })
}

/// Closed-form simple Hurwitz numbers in genus 0 for one and two parts.
pub mod closed_forms {
    use super::*;

    /// Cayley: H₀,₁(k) = k^{k-2}.
    pub fn h01(k: u32) -> Rat {
        if k == 1 {
            return rat_int(1);
        }
        Rat::from_integer(BigInt::from(k).pow(k - 2))
    }

    /// (μ₁+μ₂-1)! μ₁^{μ₁+1} μ₂^{μ₂+1} / (μ₁! μ₂!)
    pub fn h02(m1: u32, m2: u32) -> Rat {
        let num = factorial((m1 + m2 - 1) as u64)
            * BigInt::from(m1).pow(m1 + 1)
            * BigInt::from(m2).pow(m2 + 1);
        Rat::new(num, factorial(m1 as u64) * factorial(m2 as u64))
    }

    fn binom_half(top2: i64, k: u32) -> Rat {
        // C(top2/2, k) for a half-integer or integer top
        let top = rat(top2, 2);
        let mut acc = rat_int(1);
        for i in 0..k as i64 {
            acc = acc * (&top - rat_int(i)) / rat_int(i + 1);
        }
        acc
    }

    /// Genus 0, m faces including a marked quadrangle: 2·3^m (2m)!/((m+2)! m!).
    pub fn quad_g0(m: u32) -> Rat {
        Rat::new(
            BigInt::from(2) * BigInt::from(3).pow(m) * factorial(2 * m as u64),
            factorial(m as u64 + 2) * factorial(m as u64),
        )
    }

    /// Genus 1, n faces including the marked one: 3^n/6 ((2n)!/(n!)² - 2^n).
    pub fn quad_g1(n: u32) -> Rat {
        let c = Rat::new(factorial(2 * n as u64), factorial(n as u64).pow(2));
        Rat::new(BigInt::from(3).pow(n), BigInt::from(6)) * (c - Rat::from_integer(BigInt::from(2).pow(n)))
    }

    /// Genus 2 with index n: 12^n/2 (14 C(n+5/2,n) - 13 C(n+2,n) - C(n+3/2,n)).
    pub fn quad_g2(n: u32) -> Rat {
        let n2 = 2 * n as i64;
        let inner = rat_int(14) * binom_half(n2 + 5, n)
            - rat_int(13) * binom_half(n2 + 4, n)
            - binom_half(n2 + 3, n);
        Rat::new(BigInt::from(12).pow(n), BigInt::from(2)) * inner
    }

    /// Genus 3 with index n:
    /// 12^n (-2450 C(n+5,n) + 3033 C(n+9/2,n) - 291 C(n+4,n) + 292 C(n+7/2,n)).
    pub fn quad_g3(n: u32) -> Rat {
        let n2 = 2 * n as i64;
        let inner = rat_int(-2450) * binom_half(n2 + 10, n)
            + rat_int(3033) * binom_half(n2 + 9, n)
            - rat_int(291) * binom_half(n2 + 8, n)
            + rat_int(292) * binom_half(n2 + 7, n);
        Rat::from_integer(BigInt::from(12).pow(n)) * inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_listed_by_total() {
        let p = partitions(2, 4);
        assert_eq!(p, vec![vec![1, 1], vec![2, 1], vec![3, 1], vec![2, 2]]);
        assert_eq!(stabilizer(&[2, 2, 1]), 2);
    }

    #[test]
    fn tree_function_head() {
        let t = tree_function(5).unwrap();
        let want = crate::series::series_from_rats("w", 5, &[(1, "1"), (2, "1"), (3, "3/2"), (4, "8/3")]).unwrap();
        assert_eq!(t, want);
    }

    #[test]
    fn diagonal_division() {
        // (w₁ - w₂)² w₁ = w₁³ - 2w₁²w₂ + w₁w₂²
        let comp = vec![rat_int(0), rat_int(1), rat_int(-2), rat_int(1)];
        assert_eq!(divide_by_diagonal_square(&comp).unwrap(), vec![rat_int(0), rat_int(1)]);
        assert!(divide_by_diagonal_square(&[rat_int(1), rat_int(0), rat_int(0)]).is_none());
    }

    #[test]
    fn z_at_infinity_unit_gamma() {
        let z = expand_at_infinity(&Coeff::zero(), &Coeff::one(), 7).unwrap();
        let want = crate::series::series_from_rats("u", 7, &[(-1, "1"), (1, "-1"), (3, "-1"), (5, "-2")]).unwrap();
        assert_eq!(z, want);
    }

    #[test]
    fn odd_boundary_rejected() {
        let mut req = MapCountRequest::new(0, [1]);
        req.boundary = 3;
        assert!(matches!(map_count_extract(&req), Err(Error::Validation(_))));
    }
}

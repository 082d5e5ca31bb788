//! Named spectral curves and the map-counting curve built from face weights.

use serde::Serialize;

use crate::coeff::{rat_int, Coeff, Rat};
use crate::curve::{Bergman, Branchpoint, Family, Involution, SpectralCurve, XData, YData, LOCAL_VAR};
use crate::error::{Error, Result};
use crate::poly_z::{RatMap, ZPoly};
use crate::series::LaurentSeries;

pub const CATALOG_NAMES: [&str; 4] = ["airy", "weil-petersson", "lambert", "maps-quad"];

/// Default length of the sine germ of the Weil–Petersson curve.
pub const WP_GERM_WINDOW: i32 = 48;

/// Parameters for [`catalog_get`]. Only `maps-quad` and `weil-petersson` read them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogParams {
    /// Quadrangle weight.
    pub t4: Rat,
    /// Curve parameter γ; `None` means the symbolic parameter p.
    pub gamma: Option<Coeff>,
    /// Number of known terms of the Weil–Petersson y germ.
    pub germ_window: i32,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams {
            t4: rat_int(1),
            gamma: None,
            germ_window: WP_GERM_WINDOW,
        }
    }
}

/// One line of the `catalog` listing.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub x: &'static str,
    pub y: &'static str,
    pub branchpoints: &'static str,
    pub parameters: &'static str,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "airy",
            x: "z^2",
            y: "z",
            branchpoints: "0 (σ = -z)",
            parameters: "none",
        },
        CatalogEntry {
            name: "weil-petersson",
            x: "z^2",
            y: "sin(2πz)/(4π), germ in p = π²",
            branchpoints: "0 (σ = -z)",
            parameters: "germ window (default 48)",
        },
        CatalogEntry {
            name: "lambert",
            x: "-z + ln z (given by dx = (1-z)/z dz)",
            y: "z",
            branchpoints: "1 (σ solved from s e^{-s} = z e^{-z})",
            parameters: "none",
        },
        CatalogEntry {
            name: "maps-quad",
            x: "γ(z + 1/z)",
            y: "v₁/z + v₃/z³, v₁ = γ - 3t₄γ³, v₃ = -t₄γ³",
            branchpoints: "±1 (σ = 1/z)",
            parameters: "t4 (default 1), gamma (default symbolic p)",
        },
    ]
}

fn neg_z() -> RatMap {
    RatMap::polynomial(ZPoly::from_ints(&[0, -1]))
}

fn z_squared() -> RatMap {
    RatMap::polynomial(ZPoly::from_ints(&[0, 0, 1]))
}

pub fn airy() -> SpectralCurve {
    SpectralCurve {
        name: "airy".into(),
        parameter: "p".into(),
        x: XData::Function(z_squared()),
        y: YData::Rational(RatMap::identity()),
        branchpoints: vec![Branchpoint {
            a: Coeff::zero(),
            involution: Involution::Global(neg_z()),
        }],
        bergman: Bergman::Standard,
        family: Some(Family::Airy),
    }
}

/// y = sin(2πz)/(4π) = Σ_j (-1)^j 2^{2j-1} p^j z^{2j+1}/(2j+1)!, p = π².
pub fn weil_petersson_germ(hi: i32) -> LaurentSeries {
    let hi = hi.max(2);
    let mut coeffs = vec![Coeff::zero(); hi as usize];
    let mut fact = rat_int(1);
    let mut j: i64 = 0;
    while 2 * j + 1 < hi as i64 {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let two = Rat::new(2.into(), 1.into()).pow(2 * j as i32 - 1);
        let c = &Coeff::param().pow(j as u32) * &Coeff::from_rat(two * rat_int(sign) / &fact);
        coeffs[(2 * j + 1) as usize] = c;
        fact *= rat_int((2 * j + 2) * (2 * j + 3));
        j += 1;
    }
    LaurentSeries::new(LOCAL_VAR, 0, coeffs)
}

pub fn weil_petersson(germ_window: i32) -> SpectralCurve {
    SpectralCurve {
        name: "weil-petersson".into(),
        parameter: "p".into(),
        x: XData::Function(z_squared()),
        y: YData::Germs(vec![weil_petersson_germ(germ_window)]),
        branchpoints: vec![Branchpoint {
            a: Coeff::zero(),
            involution: Involution::Global(neg_z()),
        }],
        bergman: Bergman::Standard,
        family: Some(Family::WeilPetersson),
    }
}

pub fn lambert() -> SpectralCurve {
    SpectralCurve {
        name: "lambert".into(),
        parameter: "p".into(),
        x: XData::Differential(
            RatMap::new(ZPoly::from_ints(&[1, -1]), ZPoly::from_ints(&[0, 1])).expect("nonzero"),
        ),
        y: YData::Rational(RatMap::identity()),
        branchpoints: vec![Branchpoint {
            a: Coeff::one(),
            involution: Involution::Solve,
        }],
        bergman: Bergman::Standard,
        family: Some(Family::Lambert),
    }
}

/// Coefficients of the local involution at z = 1 of the Lambert curve as
/// printed alongside its recursion: s(1+ζ) - 1 = -ζ + 2/3 ζ² - ….
pub const LAMBERT_INVOLUTION_PRINTED: [&str; 5] = ["-1", "2/3", "-4/9", "44/135", "-104/405"];

/// Parameters of the map-counting curve x = α + γ(z + 1/z), y = Σ v_k z^{-k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCurveParams {
    /// Vertex weight, t = γ v₁.
    pub t: Coeff,
    /// Face weights (j, t_j), j ≥ 3.
    pub weights: Vec<(u32, Coeff)>,
    pub alpha: Coeff,
    pub gamma: Coeff,
    /// v_k for k = 0, 1, 2, …
    pub v: Vec<Coeff>,
}

impl MapCurveParams {
    /// Σ_k v_k (z^k + z^{-k}) - (x - Σ t_{k+1} x^k) as coefficients of z^{-d..=d};
    /// all zero exactly when the parameters are consistent.
    pub fn identity_defect(&self) -> Vec<Coeff> {
        let (mut out, d) = potential_in_z(&self.alpha, &self.gamma, &self.weights);
        for (k, vk) in self.v.iter().enumerate() {
            let k = k as i64;
            for idx in [d + k, d - k] {
                if (0..out.len() as i64).contains(&idx) {
                    out[idx as usize] = &out[idx as usize] + vk;
                }
            }
        }
        out
    }

    pub fn curve(&self) -> Result<SpectralCurve> {
        let quad = self.alpha.is_zero()
            && self.weights.iter().all(|(j, tj)| *j == 4 || tj.is_zero());
        let t4 = self
            .weights
            .iter()
            .find(|(j, _)| *j == 4)
            .map(|(_, t)| t.clone())
            .unwrap_or_else(Coeff::zero);
        let family = match (quad, t4.as_rat()) {
            (true, Some(_)) => Some(Family::MapsQuad {
                gamma: self.gamma.clone(),
                t4,
            }),
            _ => None,
        };
        maps_curve(&self.alpha, &self.gamma, &self.v, family)
    }
}

/// Coefficients of -(x - Σ_j t_j x^{j-1}) in z^{-d..=d}, and d.
fn potential_in_z(alpha: &Coeff, gamma: &Coeff, weights: &[(u32, Coeff)]) -> (Vec<Coeff>, i64) {
    let d = weights.iter().map(|(j, _)| *j as i64 - 1).max().unwrap_or(1).max(1);
    let len = (2 * d + 1) as usize;
    // x as a Laurent polynomial: index i ↔ z^{i-d}
    let mut x = vec![Coeff::zero(); len];
    x[(d - 1) as usize] = gamma.clone();
    x[d as usize] = alpha.clone();
    x[(d + 1) as usize] = gamma.clone();
    let mul = |a: &[Coeff], b: &[Coeff]| {
        let mut out = vec![Coeff::zero(); len];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let k = i as i64 + j as i64 - d;
                if (0..len as i64).contains(&k) {
                    out[k as usize] = &out[k as usize] + &(ai * bj);
                }
            }
        }
        out
    };
    let mut acc: Vec<Coeff> = x.iter().map(|c| -c).collect();
    let mut pw = x.clone();
    for k in 2..=d {
        pw = mul(&pw, &x);
        if let Some((_, tj)) = weights.iter().find(|(j, _)| *j as i64 == k + 1) {
            for (i, c) in pw.iter().enumerate() {
                acc[i] = &acc[i] + &(tj * c);
            }
        }
    }
    (acc, d)
}

/// Solves Σ v_k (z^k + z^{-k}) = x - Σ t_{k+1} x^k for the v_k given α and γ,
/// and sets t = γ v₁. Fails unless v₀ = 0.
pub fn map_curve_from_gamma(
    alpha: &Coeff,
    gamma: &Coeff,
    weights: &[(u32, Coeff)],
) -> Result<MapCurveParams> {
    if gamma.is_zero() {
        return Err(Error::Validation("γ must be nonzero".into()));
    }
    if let Some((j, _)) = weights.iter().find(|(j, _)| *j < 3) {
        return Err(Error::Validation(format!("face weight t_{j}: faces need degree ≥ 3")));
    }
    let (neg, d) = potential_in_z(alpha, gamma, weights);
    let rhs: Vec<Coeff> = neg.iter().map(|c| -c).collect();
    // symmetric in z ↔ 1/z because x is
    for k in 1..=d {
        if rhs[(d + k) as usize] != rhs[(d - k) as usize] {
            return Err(Error::Internal("potential is not z ↔ 1/z symmetric".into()));
        }
    }
    let v0 = rhs[d as usize].scale_rat(&Rat::new(1.into(), 2.into()));
    if !v0.is_zero() {
        return Err(Error::Validation(format!(
            "inconsistent weights: v₀ = {v0} ≠ 0 for the given α"
        )));
    }
    let v: Vec<Coeff> = (0..=d).map(|k| if k == 0 { v0.clone() } else { rhs[(d + k) as usize].clone() }).collect();
    let t = gamma * &v[1];
    Ok(MapCurveParams {
        t,
        weights: weights.to_vec(),
        alpha: alpha.clone(),
        gamma: gamma.clone(),
        v,
    })
}

/// Map curve from the vertex weight and face weights. The system for (α, γ)
/// is algebraic in t; exact solutions exist in the coefficient field only in
/// special cases, handled here: no faces (γ² = t must be a square in Q), or
/// an explicitly supplied γ consistent with t.
pub fn map_curve_from_weights(
    t: &Coeff,
    weights: &[(u32, Coeff)],
    gamma: Option<&Coeff>,
) -> Result<MapCurveParams> {
    let alpha_zero = weights.iter().all(|(j, tj)| j % 2 == 0 || tj.is_zero());
    if !alpha_zero {
        return Err(Error::Domain(
            "odd face weights need α ≠ 0, which requires an algebraic extension".into(),
        ));
    }
    let gamma = match gamma {
        Some(g) => g.clone(),
        None => {
            if weights.iter().any(|(_, tj)| !tj.is_zero()) {
                return Err(Error::Domain(
                    "γ is algebraic over t; pass γ, or use the series γ²(t)".into(),
                ));
            }
            let r = t
                .as_rat()
                .ok_or_else(|| Error::Domain("γ² = t needs a rational t".into()))?;
            Coeff::from_rat(rational_sqrt(&r).ok_or_else(|| {
                Error::Domain(format!("γ² = {t} has no rational square root"))
            })?)
        }
    };
    let params = map_curve_from_gamma(&Coeff::zero(), &gamma, weights)?;
    if params.t != *t {
        return Err(Error::Validation(format!(
            "inconsistent weights: γ = {gamma} gives t = {}, not {t}",
            params.t
        )));
    }
    Ok(params)
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r < &rat_int(0) {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rat::new(n, d))
}

/// γ² as a series in t for quadrangulations: the reversion of t = u - 3t₄u².
pub fn gamma2_series(t4: &Rat, hi: i32) -> Result<LaurentSeries> {
    let t_of_u = LaurentSeries::from_poly(
        "t",
        &[
            Coeff::zero(),
            Coeff::one(),
            Coeff::from_rat(-(t4 * rat_int(3))),
        ],
        hi,
    );
    t_of_u.revert()
}

/// Quadrangulation curve parameters with γ as the free parameter.
pub fn quadrangulation_params(t4: &Rat, gamma: &Coeff) -> Result<MapCurveParams> {
    map_curve_from_gamma(&Coeff::zero(), gamma, &[(4, Coeff::from_rat(t4.clone()))])
}

fn maps_curve(alpha: &Coeff, gamma: &Coeff, v: &[Coeff], family: Option<Family>) -> Result<SpectralCurve> {
    // x = (γ z² + α z + γ)/z
    let x = RatMap::new(
        ZPoly::new(vec![gamma.clone(), alpha.clone(), gamma.clone()]),
        ZPoly::from_ints(&[0, 1]),
    )?;
    // y = Σ_{k≥1} v_k z^{-k} = (Σ v_k z^{m-k}) / z^m
    let m = v.len().saturating_sub(1).max(1);
    let mut num = vec![Coeff::zero(); m + 1];
    for (k, vk) in v.iter().enumerate().skip(1) {
        num[m - k] = vk.clone();
    }
    let mut den = vec![Coeff::zero(); m + 1];
    den[m] = Coeff::one();
    let y = RatMap::new(ZPoly::new(num), ZPoly::new(den))?;
    let inv = RatMap::new(ZPoly::from_ints(&[1]), ZPoly::from_ints(&[0, 1]))?;
    Ok(SpectralCurve {
        name: if family.is_some() { "maps-quad".into() } else { "maps".into() },
        parameter: "p".into(),
        x: XData::Function(x),
        y: YData::Rational(y),
        branchpoints: vec![
            Branchpoint {
                a: Coeff::one(),
                involution: Involution::Global(inv.clone()),
            },
            Branchpoint {
                a: Coeff::from_int(-1),
                involution: Involution::Global(inv),
            },
        ],
        bergman: Bergman::Standard,
        family,
    })
}

/// The quadrangulation curve; `gamma = None` leaves γ = p symbolic.
pub fn maps_quad(t4: &Rat, gamma: Option<&Coeff>) -> Result<SpectralCurve> {
    let gamma = gamma.cloned().unwrap_or_else(Coeff::param);
    quadrangulation_params(t4, &gamma)?.curve()
}

pub fn catalog_get(name: &str, params: &CatalogParams) -> Result<SpectralCurve> {
    match name {
        "airy" => Ok(airy()),
        "weil-petersson" | "wp" => Ok(weil_petersson(params.germ_window)),
        "lambert" | "hurwitz" => Ok(lambert()),
        "maps-quad" | "maps" => maps_quad(&params.t4, params.gamma.as_ref()),
        _ => Err(Error::Validation(format!(
            "unknown curve '{name}' (known: {})",
            CATALOG_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{local_involution, validate_curve};
    use crate::series::series_from_rats;

    #[test]
    fn catalog_curves_validate() {
        for name in CATALOG_NAMES {
            let c = catalog_get(name, &CatalogParams::default()).unwrap();
            assert!(validate_curve(&c).is_empty(), "{name}: {:?}", validate_curve(&c));
        }
    }

    #[test]
    fn quadrangulation_parameters() {
        let p = quadrangulation_params(&rat_int(1), &Coeff::param()).unwrap();
        let g = Coeff::param();
        let g3 = g.pow(3);
        assert_eq!(p.v[1], &g - &(&g3 * &Coeff::from_int(3)));
        assert_eq!(p.v[3], -&g3);
        assert_eq!(p.v[2], Coeff::zero());
        assert_eq!(p.t, &g.pow(2) - &(&g.pow(4) * &Coeff::from_int(3)));
    }

    #[test]
    fn no_faces_gives_gaussian_curve() {
        let p = map_curve_from_weights(&Coeff::from_frac(4, 9), &[], None).unwrap();
        assert_eq!(p.gamma, Coeff::from_frac(2, 3));
        assert_eq!(p.v[1], p.gamma);
    }

    #[test]
    fn gamma_squared_series() {
        let s = gamma2_series(&rat_int(1), 6).unwrap();
        let want = series_from_rats("t", 6, &[(1, "1"), (2, "3"), (3, "18"), (4, "135"), (5, "1134")]).unwrap();
        assert_eq!(s, want);
    }

    #[test]
    fn lambert_involution_matches_printed() {
        let s = local_involution(&lambert(), 0, 6).unwrap();
        for (k, c) in LAMBERT_INVOLUTION_PRINTED.iter().enumerate() {
            assert_eq!(
                s.coeff(k as i32 + 1).unwrap(),
                Coeff::from_rat(crate::coeff::parse_rat(c).unwrap())
            );
        }
    }

    #[test]
    fn wp_germ_head() {
        let s = weil_petersson_germ(6);
        assert_eq!(s.coeff(1).unwrap(), Coeff::from_frac(1, 2));
        assert_eq!(s.coeff(3).unwrap(), &Coeff::param() * &Coeff::from_frac(-1, 3));
        assert_eq!(s.coeff(5).unwrap(), &Coeff::param().pow(2) * &Coeff::from_frac(1, 15));
    }

    #[test]
    fn identity_defect_vanishes() {
        let p = quadrangulation_params(&rat_int(1), &Coeff::param()).unwrap();
        assert!(p.identity_defect().iter().all(|c| c.is_zero()));
    }
}

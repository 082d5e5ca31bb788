//! Genus-zero spectral curves with simple branchpoints and the local data
//! (involutions, local expansions of x and y, ω₀,₁, its primitive Φ) that
//! the recursion consumes.

use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::poly_z::{RatMap, ZPoly};
use crate::series::LaurentSeries;

/// Name of the local coordinate ζ = z - a at a branchpoint.
pub const LOCAL_VAR: &str = "ζ";

/// How `x` is supplied. Curves whose `x` has logarithmic terms
/// (e.g. `x = -z + ln z`) are given through `dx/dz`, which is rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XData {
    Function(RatMap),
    Differential(RatMap),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum YData {
    Rational(RatMap),
    /// `y(a + ζ)` at each branchpoint, in branchpoint order.
    Germs(Vec<LaurentSeries>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Involution {
    /// A global rational map ρ with ρ(a) = a and x∘ρ = x.
    Global(RatMap),
    /// σ(ζ) in the local coordinate, σ = -ζ + O(ζ²).
    Local(LaurentSeries),
    /// Solve x(a + σ) = x(a + ζ) by series reversion.
    Solve,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branchpoint {
    pub a: Coeff,
    pub involution: Involution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bergman {
    /// dz₁dz₂/(z₁-z₂)²
    Standard,
    /// Anything else is recorded so validation can reject it.
    Unsupported(String),
}

/// Catalog families with a printed recursion kernel of their own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Airy,
    /// Parameter `p` stands for π².
    WeilPetersson,
    Lambert,
    /// Quadrangulations; `gamma` is the curve parameter γ (often `p` itself).
    MapsQuad { gamma: Coeff, t4: Coeff },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Airy => "airy",
            Family::WeilPetersson => "weil-petersson",
            Family::Lambert => "lambert",
            Family::MapsQuad { .. } => "maps-quad",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCurve {
    pub name: String,
    /// Display name of the formal parameter.
    pub parameter: String,
    pub x: XData,
    pub y: YData,
    pub branchpoints: Vec<Branchpoint>,
    pub bergman: Bergman,
    pub family: Option<Family>,
}

/// One failed predicate found by [`validate_curve`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub branchpoint: Option<usize>,
    pub predicate: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.branchpoint {
            Some(i) => write!(f, "branchpoint {i}: {}: {}", self.predicate, self.message),
            None => write!(f, "{}: {}", self.predicate, self.message),
        }
    }
}

/// Local data at one branchpoint, all series in ζ = z - a and known to `window`.
#[derive(Clone, Debug)]
pub struct LocalFrame {
    pub bp: usize,
    pub a: Coeff,
    pub window: i32,
    /// x(a+ζ) - x(a)
    pub x: LaurentSeries,
    /// x'(a+ζ)
    pub dx: LaurentSeries,
    pub y: LaurentSeries,
    pub sigma: LaurentSeries,
    /// σ'(ζ)
    pub dsigma: LaurentSeries,
    /// ω₀,₁ / dζ = y(a+ζ) x'(a+ζ)
    pub omega01: LaurentSeries,
    /// Primitive of ω₀,₁ with zero constant term.
    pub phi: LaurentSeries,
}

impl SpectralCurve {
    /// x'(z) as a rational map.
    pub fn dx(&self) -> RatMap {
        match &self.x {
            XData::Function(x) => x.derivative(),
            XData::Differential(dx) => dx.clone(),
        }
    }

    /// Rescales y by a constant factor (F_g then scales by λ^(2-2g)).
    pub fn scale_y(&self, lambda: &Coeff) -> SpectralCurve {
        let mut c = self.clone();
        c.y = match &self.y {
            YData::Rational(y) => YData::Rational(RatMap {
                num: y.num.scale(lambda),
                den: y.den.clone(),
            }),
            YData::Germs(g) => YData::Germs(g.iter().map(|s| s.scale(lambda)).collect()),
        };
        c.family = None;
        c.name = format!("{} (y scaled by {lambda})", self.name);
        c
    }

    fn branchpoint(&self, bp: usize) -> Result<&Branchpoint> {
        self.branchpoints
            .get(bp)
            .ok_or_else(|| Error::Validation(format!("no branchpoint with index {bp}")))
    }

    /// x(a+ζ) - x(a) to O(ζ^hi).
    pub fn local_x(&self, bp: usize, hi: i32) -> Result<LaurentSeries> {
        let a = &self.branchpoint(bp)?.a;
        match &self.x {
            XData::Function(x) => {
                let s = x.expand_at(a, LOCAL_VAR, hi)?;
                let x0 = LaurentSeries::monomial(LOCAL_VAR, s.coeff_or_zero(0), 0, hi);
                s.sub(&x0)
            }
            XData::Differential(dx) => dx.expand_at(a, LOCAL_VAR, hi - 1)?.antidifferentiate(),
        }
    }

    /// x'(a+ζ) to O(ζ^hi).
    pub fn local_dx(&self, bp: usize, hi: i32) -> Result<LaurentSeries> {
        let a = &self.branchpoint(bp)?.a;
        self.dx().expand_at(a, LOCAL_VAR, hi)
    }

    /// y(a+ζ) to O(ζ^hi).
    pub fn local_y(&self, bp: usize, hi: i32) -> Result<LaurentSeries> {
        let a = &self.branchpoint(bp)?.a;
        match &self.y {
            YData::Rational(y) => y.expand_at(a, LOCAL_VAR, hi),
            YData::Germs(g) => {
                let germ = g.get(bp).ok_or_else(|| {
                    Error::Validation(format!("no y germ for branchpoint {bp}"))
                })?;
                if germ.hi() < hi {
                    return Err(Error::precision(
                        format!("y germ at branchpoint {bp}"),
                        hi as i64,
                        germ.hi() as i64,
                    ));
                }
                Ok(germ.truncate(hi).with_var(LOCAL_VAR))
            }
        }
    }
}

/// Local Galois involution σ at branchpoint `bp`, to O(ζ^window).
pub fn local_involution(c: &SpectralCurve, bp: usize, window: i32) -> Result<LaurentSeries> {
    let b = c.branchpoint(bp)?;
    match &b.involution {
        Involution::Global(rho) => {
            let s = rho.expand_at(&b.a, LOCAL_VAR, window)?;
            let shift = LaurentSeries::monomial(LOCAL_VAR, b.a.clone(), 0, window);
            s.sub(&shift)
        }
        Involution::Local(sigma) => {
            if sigma.hi() < window {
                return Err(Error::precision(
                    format!("local involution at branchpoint {bp}"),
                    window as i64,
                    sigma.hi() as i64,
                ));
            }
            Ok(sigma.truncate(window).with_var(LOCAL_VAR))
        }
        Involution::Solve => solve_involution(&c.local_x(bp, window + 2)?, bp, window),
    }
}

/// Writes x(a+ζ) - x(a) = c₂ (ζ u(ζ))² with u(0) = 1 and returns
/// σ = w⁻¹(-w(ζ)) for w = ζ u(ζ).
fn solve_involution(x: &LaurentSeries, bp: usize, window: i32) -> Result<LaurentSeries> {
    if x.is_big_o() || x.lo() != 2 {
        return Err(Error::Internal(format!(
            "branchpoint {bp} is not simple (x - x(a) has valuation {})",
            x.lo()
        )));
    }
    let c2 = x.coeff(2)?;
    let unit = x.shift(-2).scale(&c2.inv()?);
    let w = unit.sqrt_unit()?.shift(1);
    let w_inv = w.revert()?;
    let sigma = w_inv.compose(&w.neg())?;
    if sigma.hi() < window {
        return Err(Error::Internal(format!(
            "involution solve at branchpoint {bp} lost precision ({} < {window})",
            sigma.hi()
        )));
    }
    Ok(sigma.truncate(window))
}

/// Computes the local frame at `bp` with every series known to O(ζ^window).
pub fn local_frame(c: &SpectralCurve, bp: usize, window: i32) -> Result<LocalFrame> {
    if window < 4 {
        return Err(Error::precision("local frame", 4, window as i64));
    }
    let a = c.branchpoint(bp)?.a.clone();
    let x = c.local_x(bp, window)?;
    let dx = c.local_dx(bp, window)?;
    let y = c.local_y(bp, window)?;
    let sigma = local_involution(c, bp, window)?;
    let dsigma = sigma.differentiate();
    let omega01 = y.mul(&dx)?.truncate(window);
    let phi = omega01.antidifferentiate()?.truncate(window);
    Ok(LocalFrame {
        bp,
        a,
        window,
        x,
        dx,
        y,
        sigma,
        dsigma,
        omega01,
        phi,
    })
}

impl LocalFrame {
    /// ω₀,₁(q) - ω₀,₁(σ(q)) divided by dζ, i.e. (y(ζ) - y(σ(ζ))) x'(a+ζ).
    pub fn kernel_denominator(&self) -> Result<LaurentSeries> {
        let y_sigma = self.y.compose(&self.sigma)?;
        self.y.sub(&y_sigma)?.mul(&self.dx)
    }

    /// B(q, σ(q)) / dζ² = σ'(ζ) / (ζ - σ(ζ))².
    pub fn bergman_on_involution(&self) -> Result<LaurentSeries> {
        let diff = LaurentSeries::identity(LOCAL_VAR, self.window + 1).sub(&self.sigma)?;
        self.dsigma.mul(&diff.pow(-2)?)
    }

    /// Coefficients c_k(ζ) = ζ^k - σ(ζ)^k of
    /// ∫_{σ(q)}^{q} B(z₁, ·) = Σ_k c_k(ζ) dz₁ / (z₁ - a)^(k+1), for k = 1..=kmax.
    pub fn bergman_integral(&self, kmax: usize) -> Result<Vec<LaurentSeries>> {
        let mut out = Vec::with_capacity(kmax);
        // ζ^k is exact; any cap above the precision of σ^k will do.
        let cap = self.sigma.hi() + kmax as i32 + 1;
        let mut zk = LaurentSeries::one(LOCAL_VAR, cap);
        let mut sk = LaurentSeries::one(LOCAL_VAR, cap);
        let id = LaurentSeries::identity(LOCAL_VAR, cap);
        for _ in 0..kmax {
            zk = zk.mul(&id)?;
            sk = sk.mul(&self.sigma)?;
            out.push(zk.sub(&sk)?);
        }
        Ok(out)
    }
}

/// Expansion of the standard Bergman kernel B(z₁, b+ζ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BergmanExpansion {
    /// Σ_k (k+1) ζ^k dz₁dζ / (z₁-b)^(k+2): entries `(k, pole order k+2, k+1)`.
    Diagonal(Vec<(i32, u32, Coeff)>),
    /// B(a+ζ₁, b+ζ₂) = Σ c[i][j] ζ₁^i ζ₂^j dζ₁dζ₂ for a ≠ b.
    Regular(Vec<Vec<Coeff>>),
}

/// Expansion of B about its own double pole (`a == b`) or the regular double
/// expansion between two distinct centers, to total order `window`.
pub fn bergman_expand(a: &Coeff, b: &Coeff, window: usize) -> Result<BergmanExpansion> {
    if a == b {
        return Ok(BergmanExpansion::Diagonal(
            (0..window)
                .map(|k| (k as i32, k as u32 + 2, Coeff::from_int(k as i64 + 1)))
                .collect(),
        ));
    }
    // 1/(d + ζ₁ - ζ₂)² with d = a - b: Σ (i+j+1)!/(i! j!) (-1)^i d^-(i+j+2) ζ₁^i ζ₂^j.
    let d = a - b;
    let d_inv = d.inv()?;
    let mut rows = Vec::with_capacity(window);
    for i in 0..window {
        let mut row = Vec::with_capacity(window - i);
        for j in 0..window - i {
            let mut binom = Coeff::from_int((i + j + 1) as i64);
            for m in 1..=i {
                binom = binom.scale_rat(&crate::coeff::rat((i + j + 1 - m) as i64, m as i64));
            }
            // (i+j+1) * C(i+j, i)
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let c = &binom.scale_rat(&crate::coeff::rat_int(sign)) * &d_inv.pow((i + j + 2) as u32);
            row.push(c);
        }
        rows.push(row);
    }
    Ok(BergmanExpansion::Regular(rows))
}

/// Checks every structural assumption the recursion relies on.
pub fn validate_curve(c: &SpectralCurve) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |bp: Option<usize>, predicate: &str, message: String| {
        out.push(Diagnostic {
            branchpoint: bp,
            predicate: predicate.into(),
            message,
        })
    };
    if let Bergman::Unsupported(kind) = &c.bergman {
        diag(
            None,
            "standard-bergman",
            format!("only B = dz₁dz₂/(z₁-z₂)² is supported, got {kind}"),
        );
    }
    if c.branchpoints.is_empty() {
        diag(None, "has-branchpoints", "no branchpoints given".into());
    }
    if let YData::Germs(g) = &c.y {
        if g.len() != c.branchpoints.len() {
            diag(
                None,
                "germ-count",
                format!(
                    "{} y germs for {} branchpoints",
                    g.len(),
                    c.branchpoints.len()
                ),
            );
        }
    }
    for i in 0..c.branchpoints.len() {
        for j in 0..i {
            if c.branchpoints[i].a == c.branchpoints[j].a {
                diag(Some(i), "distinct", format!("same location as branchpoint {j}"));
            }
        }
    }

    let dx = c.dx();
    let ddx = dx.derivative();
    const W: i32 = 8;
    for (i, b) in c.branchpoints.iter().enumerate() {
        let a = &b.a;
        match dx.eval(a) {
            Err(_) => {
                diag(Some(i), "dx-regular", format!("dx has a pole at a = {a}"));
                continue;
            }
            Ok(v) if !v.is_zero() => {
                diag(Some(i), "dx-zero", format!("x'(a) = {v} is not zero"));
                continue;
            }
            Ok(_) => {}
        }
        match ddx.eval(a) {
            Ok(v) if v.is_zero() => {
                diag(
                    Some(i),
                    "simple",
                    "x''(a) = 0: branchpoint is not simple".into(),
                );
                continue;
            }
            Err(e) => {
                diag(Some(i), "simple", e.to_string());
                continue;
            }
            Ok(_) => {}
        }
        match &b.involution {
            Involution::Global(rho) => check_global_involution(c, i, rho, &mut diag),
            Involution::Local(sigma) => {
                if sigma.lo() != 1 || sigma.coeff_or_zero(1) != Coeff::from_int(-1) {
                    diag(
                        Some(i),
                        "involution-leading",
                        "local involution must start -ζ + O(ζ²)".into(),
                    );
                }
            }
            Involution::Solve => {}
        }
        let sigma = match local_involution(c, i, W) {
            Ok(s) => s,
            Err(e) => {
                diag(Some(i), "involution", e.to_string());
                continue;
            }
        };
        match check_local_consistency(c, i, &sigma, W) {
            Ok(msgs) => msgs
                .into_iter()
                .for_each(|(p, m)| diag(Some(i), p, m)),
            Err(e) => diag(Some(i), "local-data", e.to_string()),
        }
    }

    if let Some(quot) = unlisted_dx_zeros(&dx, &c.branchpoints) {
        diag(
            None,
            "all-branchpoints",
            format!("dx has zeros not listed as branchpoints (leftover factor of degree {quot})"),
        );
    }
    out
}

fn check_global_involution(
    c: &SpectralCurve,
    i: usize,
    rho: &RatMap,
    diag: &mut impl FnMut(Option<usize>, &str, String),
) {
    let a = &c.branchpoints[i].a;
    match rho.eval(a) {
        Ok(v) if &v == a => {}
        Ok(v) => diag(Some(i), "involution-fixes-a", format!("ρ(a) = {v} ≠ a")),
        Err(e) => diag(Some(i), "involution-fixes-a", e.to_string()),
    }
    if rho.same_function(&RatMap::identity()) {
        diag(Some(i), "involution-nontrivial", "ρ is the identity".into());
    }
    if !rho.compose(rho).same_function(&RatMap::identity()) {
        diag(Some(i), "involution-squared", "ρ∘ρ ≠ id".into());
    }
    let preserves_x = match &c.x {
        XData::Function(x) => x.compose(rho).same_function(x),
        XData::Differential(dx) => {
            let lhs = dx.compose(rho);
            let d = rho.derivative();
            let prod = RatMap {
                num: &lhs.num * &d.num,
                den: &lhs.den * &d.den,
            };
            prod.same_function(dx)
        }
    };
    if !preserves_x {
        diag(Some(i), "involution-preserves-x", "x∘ρ ≠ x".into());
    }
}

fn check_local_consistency(
    c: &SpectralCurve,
    i: usize,
    sigma: &LaurentSeries,
    w: i32,
) -> Result<Vec<(&'static str, String)>> {
    let mut msgs = Vec::new();
    let x = c.local_x(i, w)?;
    let xs = x.compose(sigma)?;
    let diff = xs.sub(&x)?;
    if !diff.is_big_o() {
        msgs.push((
            "involution-preserves-x",
            format!("x(a+σ(ζ)) - x(a+ζ) has a nonzero ζ^{} term", diff.lo()),
        ));
    }
    let ss = sigma.compose(sigma)?;
    let back = ss.sub(&LaurentSeries::identity(LOCAL_VAR, w))?;
    if !back.is_big_o() {
        msgs.push(("involution-squared", "σ(σ(ζ)) ≠ ζ".into()));
    }
    let y = c.local_y(i, w)?;
    let odd = y.sub(&y.compose(sigma)?)?;
    if odd.coeff_or_zero(1).is_zero() || odd.lo() < 1 {
        msgs.push((
            "y-first-order",
            "y(a+ζ) - y(a+σ(ζ)) does not start at order ζ (t̃_{a,1} = 0)".into(),
        ));
    }
    Ok(msgs)
}

fn unlisted_dx_zeros(dx: &RatMap, bps: &[Branchpoint]) -> Option<usize> {
    let dx = dx.reduced();
    let mut q = dx.num.clone();
    for b in bps {
        let (quot, rem) = q.div_rem(&ZPoly::linear_root(&b.a)).ok()?;
        if !rem.is_zero() {
            return None;
        }
        q = quot;
    }
    match q.degree() {
        Some(d) if d > 0 => Some(d),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::series_from_rats;

    fn airy() -> SpectralCurve {
        SpectralCurve {
            name: "airy".into(),
            parameter: "p".into(),
            x: XData::Function(RatMap::polynomial(ZPoly::from_ints(&[0, 0, 1]))),
            y: YData::Rational(RatMap::polynomial(ZPoly::from_ints(&[0, 1]))),
            branchpoints: vec![Branchpoint {
                a: Coeff::zero(),
                involution: Involution::Global(RatMap::polynomial(ZPoly::from_ints(&[0, -1]))),
            }],
            bergman: Bergman::Standard,
            family: None,
        }
    }

    #[test]
    fn airy_is_valid() {
        assert_eq!(validate_curve(&airy()), vec![]);
    }

    #[test]
    fn cubic_x_is_not_simple() {
        let mut c = airy();
        c.x = XData::Function(RatMap::polynomial(ZPoly::from_ints(&[0, 0, 0, 1])));
        c.branchpoints[0].involution = Involution::Solve;
        let d = validate_curve(&c);
        assert!(d.iter().any(|d| d.predicate == "simple"), "{d:?}");
    }

    #[test]
    fn non_standard_bergman_rejected() {
        let mut c = airy();
        c.bergman = Bergman::Unsupported("B-hat times".into());
        assert!(validate_curve(&c)
            .iter()
            .any(|d| d.predicate == "standard-bergman"));
    }

    #[test]
    fn bad_involution_reported() {
        let mut c = airy();
        c.branchpoints[0].involution =
            Involution::Global(RatMap::polynomial(ZPoly::from_ints(&[0, 1])));
        let d = validate_curve(&c);
        assert!(d.iter().any(|d| d.predicate == "involution-nontrivial"));
    }

    #[test]
    fn airy_frame() {
        let f = local_frame(&airy(), 0, 8).unwrap();
        assert_eq!(f.sigma, series_from_rats("ζ", 8, &[(1, "-1")]).unwrap());
        assert_eq!(f.omega01, series_from_rats("ζ", 8, &[(2, "2")]).unwrap());
        assert_eq!(f.phi, series_from_rats("ζ", 8, &[(3, "2/3")]).unwrap());
        let d = f.kernel_denominator().unwrap();
        assert_eq!(d.lo(), 2);
        assert_eq!(d.coeff(2).unwrap(), Coeff::from_int(4));
    }

    #[test]
    fn solved_involution_matches_global_for_airy() {
        let mut c = airy();
        c.branchpoints[0].involution = Involution::Solve;
        let s = local_involution(&c, 0, 10).unwrap();
        assert_eq!(s, series_from_rats("ζ", 10, &[(1, "-1")]).unwrap());
    }

    #[test]
    fn bergman_on_airy_involution() {
        let f = local_frame(&airy(), 0, 8).unwrap();
        let b = f.bergman_on_involution().unwrap();
        assert_eq!(b.lo(), -2);
        assert_eq!(b.coeff(-2).unwrap(), Coeff::from_frac(-1, 4));
        assert_eq!(b.coeff(0).unwrap(), Coeff::zero());
    }

    #[test]
    fn bergman_integral_airy_odd_terms() {
        let f = local_frame(&airy(), 0, 8).unwrap();
        let c = f.bergman_integral(4).unwrap();
        for (k, ck) in c.iter().enumerate() {
            let k = k as i32 + 1;
            let expect = if k % 2 == 1 { Coeff::from_int(2) } else { Coeff::zero() };
            assert_eq!(ck.coeff_or_zero(k), expect);
        }
    }

    #[test]
    fn bergman_expand_diagonal_and_regular() {
        match bergman_expand(&Coeff::zero(), &Coeff::zero(), 3).unwrap() {
            BergmanExpansion::Diagonal(v) => {
                assert_eq!(v[2], (2, 4, Coeff::from_int(3)));
            }
            _ => panic!(),
        }
        // a = 1, b = -1: 1/(2 + ζ₁ - ζ₂)² = 1/4 - ζ₁/4 + ζ₂/4 + ...
        match bergman_expand(&Coeff::one(), &Coeff::from_int(-1), 3).unwrap() {
            BergmanExpansion::Regular(r) => {
                assert_eq!(r[0][0], Coeff::from_frac(1, 4));
                assert_eq!(r[1][0], Coeff::from_frac(-1, 4));
                assert_eq!(r[0][1], Coeff::from_frac(1, 4));
                // ζ₁ζ₂ coefficient: 6/(2^4) * (-1) = -3/8
                assert_eq!(r[1][1], Coeff::from_frac(-3, 8));
            }
            _ => panic!(),
        }
    }
}

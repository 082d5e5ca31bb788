//! Recursion kernels as series in the local coordinate at a branchpoint.
//!
//! Every kernel used here has the shape
//! `K(p₁, a+ζ) = f(ζ) · Σ_{k≥1} (ζ^k - σ(ζ)^k) dz₁/(z₁-a)^{k+1} / dζ`,
//! since `1/(z₁-z) - 1/(z₁-σ(z))` expands that way around `a`. Only the scalar
//! factor `f` depends on the mode.

use std::fmt;

use crate::coeff::{rat, Coeff, Rat};
use crate::curve::{local_frame, Family, LocalFrame, SpectralCurve, LOCAL_VAR};
use crate::error::{Error, Result};
use crate::poly_z::{RatMap, ZPoly};
use crate::series::LaurentSeries;

/// The printed kernels of the three worked families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrintedKernel {
    /// `1/(z₁²-z²) · π/sin(2πz)`, for function-valued W's.
    WeilPetersson,
    /// `dz₁/2 · (1/(z₁-z) - 1/(z₁-s(z)))/(z-s(z)) · z/((1-z)dz)`.
    Hurwitz,
    /// `dz₁/(2γ) · (1/(z₁-z) - 1/(z₁-1/z))/(y(z)-y(1/z)) · 1/((1-z⁻²)dz)`.
    Maps,
}

impl PrintedKernel {
    pub const ALL: [PrintedKernel; 3] = [
        PrintedKernel::WeilPetersson,
        PrintedKernel::Hurwitz,
        PrintedKernel::Maps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrintedKernel::WeilPetersson => "weil-petersson",
            PrintedKernel::Hurwitz => "hurwitz",
            PrintedKernel::Maps => "maps",
        }
    }

    /// Catalog curve this kernel belongs to.
    pub fn curve_name(self) -> &'static str {
        match self {
            PrintedKernel::WeilPetersson => "weil-petersson",
            PrintedKernel::Hurwitz => "lambert",
            PrintedKernel::Maps => "maps-quad",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "weil-petersson" | "wp" | "mirzakhani" => Ok(PrintedKernel::WeilPetersson),
            "hurwitz" | "lambert" => Ok(PrintedKernel::Hurwitz),
            "maps" | "maps-quad" => Ok(PrintedKernel::Maps),
            _ => Err(Error::Validation(format!("unknown printed kernel '{s}'"))),
        }
    }

    /// The printed kernel for a catalog family, if it has one.
    pub fn for_family(f: &Family) -> Option<Self> {
        match f {
            Family::WeilPetersson => Some(PrintedKernel::WeilPetersson),
            Family::Lambert => Some(PrintedKernel::Hurwitz),
            Family::MapsQuad { .. } => Some(PrintedKernel::Maps),
            Family::Airy => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum KernelMode {
    /// `-½ ∫B / (ω₀,₁(q) - ω₀,₁(σq))`, times the calibration constant.
    #[default]
    General,
    Printed(PrintedKernel),
}

impl fmt::Display for KernelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelMode::General => f.write_str("general"),
            KernelMode::Printed(p) => write!(f, "printed({})", p.name()),
        }
    }
}

/// `K_a(p₁, a+ζ)/dζ` as `Σ_i ζ^i Σ_k c_{i,k} dz₁/(z₁-a)^k`, exact for `i < hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSeries {
    bp: usize,
    lo: i32,
    terms: Vec<Vec<(u32, Coeff)>>,
}

impl KernelSeries {
    pub fn bp(&self) -> usize {
        self.bp
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Exclusive bound of the known exponents.
    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32
    }

    /// Pole-order/coefficient pairs at ζ^i (empty outside the stored range).
    pub fn at(&self, i: i32) -> &[(u32, Coeff)] {
        if i < self.lo || i >= self.hi() {
            return &[];
        }
        &self.terms[(i - self.lo) as usize]
    }

    /// Exponents present, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = i32> + '_ {
        (self.lo..self.hi()).filter(|&i| !self.at(i).is_empty())
    }
}

/// The scalar factor `f(ζ)` of the kernel in the given mode.
pub(crate) fn kernel_scalar(
    curve: &SpectralCurve,
    frame: &LocalFrame,
    mode: KernelMode,
    kappa: &Rat,
) -> Result<LaurentSeries> {
    let w = frame.window;
    match mode {
        KernelMode::General => {
            let d = frame.kernel_denominator()?;
            let k = Coeff::from(-kappa / rat(2, 1));
            Ok(d.invert()?.scale(&k))
        }
        KernelMode::Printed(p) => {
            check_family(curve, p)?;
            match p {
                PrintedKernel::WeilPetersson => {
                    // π/sin(2πζ) = 1/(2ζ) · S⁻¹, S = Σ (-4p)^j ζ^{2j}/(2j+1)!;
                    // 1/(z₁²-ζ²) = N/(2ζ) and the pull-back by σ' = -1 give
                    // f = -S⁻¹/(4ζ²).
                    let s = sine_ratio(w)?;
                    Ok(s.invert()?.shift(-2).scale(&Coeff::from_frac(-1, 4)))
                }
                PrintedKernel::Hurwitz => {
                    // ½ · 1/(ζ - σ) · (1+ζ)/(-ζ)
                    let diff = LaurentSeries::identity(LOCAL_VAR, w + 1).sub(&frame.sigma)?;
                    let z_over = LaurentSeries::from_poly(
                        LOCAL_VAR,
                        &[Coeff::from_int(-1), Coeff::from_int(-1)],
                        w + 1,
                    )
                    .shift(-1);
                    Ok(diff.invert()?.mul(&z_over)?.scale(&Coeff::from_frac(1, 2)))
                }
                PrintedKernel::Maps => {
                    let gamma = match &curve.family {
                        Some(Family::MapsQuad { gamma, .. }) => gamma.clone(),
                        _ => unreachable!("checked by check_family"),
                    };
                    // 1/(2γ) · 1/((y(z) - y(1/z)) (1 - z⁻²)), z = a + ζ
                    let y_sigma = frame.y.compose(&frame.sigma)?;
                    let dy = frame.y.sub(&y_sigma)?;
                    let inv_z2 = RatMap::new(ZPoly::from_ints(&[1]), ZPoly::from_ints(&[0, 0, 1]))?
                        .expand_at(&frame.a, LOCAL_VAR, w)?;
                    let one_minus = LaurentSeries::one(LOCAL_VAR, w).sub(&inv_z2)?;
                    let d = dy.mul(&one_minus)?;
                    Ok(d.invert()?.scale(&(&Coeff::from_int(2) * &gamma).inv()?))
                }
            }
        }
    }
}

fn check_family(curve: &SpectralCurve, p: PrintedKernel) -> Result<()> {
    let ok = curve
        .family
        .as_ref()
        .and_then(PrintedKernel::for_family)
        .is_some_and(|q| q == p);
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "printed kernel '{}' needs the {} catalog curve, got '{}'",
            p.name(),
            p.curve_name(),
            curve.name
        )))
    }
}

/// `sin(2πζ)/(2πζ)` with `p = π²`, to `O(ζ^hi)`.
fn sine_ratio(hi: i32) -> Result<LaurentSeries> {
    let hi = hi.max(1);
    let minus_4p = &Coeff::param() * &Coeff::from_int(-4);
    let mut coeffs = vec![Coeff::zero(); hi as usize];
    let mut pw = Coeff::one();
    let mut fact = Rat::from_integer(1.into());
    for j in 0..(hi as i64 + 1) / 2 {
        coeffs[2 * j as usize] = pw.scale_rat(&fact.recip());
        pw = &pw * &minus_4p;
        fact *= Rat::from_integer(((2 * j + 2) * (2 * j + 3)).into());
    }
    Ok(LaurentSeries::new(LOCAL_VAR, 0, coeffs))
}

/// Multiplies `f` by the Bergman integrals `ζ^k - σ^k` and collects the kernel
/// coefficients for exponents below `hi`.
pub(crate) fn assemble_kernel(frame: &LocalFrame, f: &LaurentSeries, hi: i32) -> Result<KernelSeries> {
    if f.is_big_o() {
        return Err(Error::precision("kernel prefactor", hi as i64, f.hi() as i64));
    }
    let lo = f.lo() + 1;
    let kmax = (hi - 1 - f.lo()).max(0) as usize;
    let n = frame.bergman_integral(kmax)?;
    let mut terms: Vec<Vec<(u32, Coeff)>> = vec![Vec::new(); (hi - lo).max(0) as usize];
    let mut known = hi;
    for (idx, nk) in n.iter().enumerate() {
        let k = idx as u32 + 1;
        let prod = f.mul(nk)?;
        // Products with higher k start later, so only the exponents below hi matter.
        known = known.min(prod.hi());
        for (i, c) in prod.terms() {
            if i < hi && !c.is_zero() {
                terms[(i - lo) as usize].push((k + 1, c.clone()));
            }
        }
    }
    if known < hi {
        return Err(Error::precision("kernel series", hi as i64, known as i64));
    }
    Ok(KernelSeries {
        bp: frame.bp,
        lo,
        terms,
    })
}

/// The kernel at branchpoint `bp`, known for all exponents below the largest
/// bound that the frame window supports.
pub fn kernel(c: &SpectralCurve, bp: usize, window: i32, mode: KernelMode, kappa: &Rat) -> Result<KernelSeries> {
    let frame = local_frame(c, bp, window)?;
    let f = kernel_scalar(c, &frame, mode, kappa)?;
    // The k = 1 product is the least precise one.
    let n1 = frame.bergman_integral(1)?;
    let hi = f.mul(&n1[0])?.hi();
    assemble_kernel(&frame, &f, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_ratio_head() {
        let s = sine_ratio(6).unwrap();
        assert_eq!(s.coeff(0).unwrap(), Coeff::one());
        // -(2π)²/6 = -2p/3
        assert_eq!(s.coeff(2).unwrap(), &Coeff::param() * &Coeff::from_frac(-2, 3));
        // (2π)⁴/120 = 2p²/15
        assert_eq!(
            s.coeff(4).unwrap(),
            &Coeff::param().pow(2) * &Coeff::from_frac(2, 15)
        );
        assert_eq!(s.coeff(5).unwrap(), Coeff::zero());
    }
}

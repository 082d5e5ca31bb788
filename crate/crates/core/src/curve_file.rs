//! JSON description of a spectral curve, for curves that are not in the
//! catalog. A coefficient is either a rational string such as `"3/4"` or
//! `{"num": [...], "den": [...]}` listing a quotient of polynomials in `p`.
//! Rational maps in `z` are `{"num": [...], "den": [...]}` with coefficients
//! listed from degree 0 upwards.

use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::curve::{Bergman, Branchpoint, Involution, SpectralCurve, XData, YData};
use crate::error::{Error, Result};
use crate::poly_z::RatMap;
use crate::series::LaurentSeries;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    /// Exactly one of `x` and `dx` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<RatMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<RatMap>,
    /// Exactly one of `y` and `y_germs` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<RatMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_germs: Option<Vec<LaurentSeries>>,
    pub branchpoints: Vec<BranchpointSpec>,
    /// `"standard"` when omitted; anything else is rejected by validation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bergman: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchpointSpec {
    pub a: Coeff,
    #[serde(default)]
    pub involution: InvolutionSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvolutionSpec {
    Global(RatMap),
    Local(LaurentSeries),
    #[default]
    Solve,
}

fn checked(r: RatMap, what: &str) -> Result<RatMap> {
    RatMap::new(r.num, r.den)
        .map(|m| m.reduced())
        .map_err(|_| Error::Validation(format!("{what}: zero denominator")))
}

impl CurveSpec {
    pub fn parse(json: &str) -> Result<CurveSpec> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("curve file: {e}")))
    }

    /// Builds the curve. Structural problems are errors here; the
    /// mathematical conditions are left to `validate_curve`.
    pub fn into_curve(self) -> Result<SpectralCurve> {
        let x = match (self.x, self.dx) {
            (Some(x), None) => XData::Function(checked(x, "x")?),
            (None, Some(dx)) => XData::Differential(checked(dx, "dx")?),
            _ => return Err(Error::Validation("give exactly one of x and dx".into())),
        };
        let y = match (self.y, self.y_germs) {
            (Some(y), None) => YData::Rational(checked(y, "y")?),
            (None, Some(g)) => YData::Germs(g),
            _ => return Err(Error::Validation("give exactly one of y and y_germs".into())),
        };
        let branchpoints = self
            .branchpoints
            .into_iter()
            .map(|b| {
                let involution = match b.involution {
                    InvolutionSpec::Global(r) => Involution::Global(checked(r, "involution")?),
                    InvolutionSpec::Local(s) => Involution::Local(s),
                    InvolutionSpec::Solve => Involution::Solve,
                };
                Ok(Branchpoint { a: b.a, involution })
            })
            .collect::<Result<Vec<_>>>()?;
        let bergman = match self.bergman.as_deref() {
            None | Some("standard") => Bergman::Standard,
            Some(other) => Bergman::Unsupported(other.to_string()),
        };
        Ok(SpectralCurve {
            name: self.name,
            parameter: "p".into(),
            x,
            y,
            branchpoints,
            bergman,
            family: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::validate_curve;

    const AIRY: &str = r#"{
        "name": "my-airy",
        "x": {"num": ["0", "0", "1"], "den": ["1"]},
        "y": {"num": ["0", "1"], "den": ["1"]},
        "branchpoints": [{"a": "0", "involution": {"global": {"num": ["0", "-1"], "den": ["1"]}}}]
    }"#;

    #[test]
    fn airy_file_matches_catalog_data() {
        let c = CurveSpec::parse(AIRY).unwrap().into_curve().unwrap();
        let cat = crate::catalog::airy();
        assert_eq!(c.x, cat.x);
        assert_eq!(c.y, cat.y);
        assert_eq!(c.branchpoints, cat.branchpoints);
        assert!(validate_curve(&c).is_empty());
    }

    #[test]
    fn lambert_by_differential_and_solved_involution() {
        let json = r#"{
            "name": "w",
            "dx": {"num": ["1", "-1"], "den": ["0", "1"]},
            "y": {"num": ["0", "1"], "den": ["1"]},
            "branchpoints": [{"a": "1"}]
        }"#;
        let c = CurveSpec::parse(json).unwrap().into_curve().unwrap();
        assert_eq!(c.x, crate::catalog::lambert().x);
        assert!(validate_curve(&c).is_empty());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let both = AIRY.replace("\"y\":", "\"dx\": {\"num\": [\"1\"], \"den\": [\"1\"]}, \"y\":");
        assert!(matches!(
            CurveSpec::parse(&both).unwrap().into_curve(),
            Err(Error::Validation(_))
        ));
        let zero_den = AIRY.replace(r#""den": ["1"]},
        "y""#, r#""den": ["0"]},
        "y""#);
        assert!(CurveSpec::parse(&zero_den).unwrap().into_curve().is_err());
        assert!(matches!(CurveSpec::parse("{\"name\": 1}"), Err(Error::Parse(_))));
        let odd = AIRY.replace("\"name\"", "\"colour\": 3, \"name\"");
        assert!(CurveSpec::parse(&odd).is_err());
    }

    #[test]
    fn non_standard_bergman_fails_validation() {
        let json = AIRY.replace("\"name\"", "\"bergman\": \"theta\", \"name\"");
        let c = CurveSpec::parse(&json).unwrap().into_curve().unwrap();
        assert!(validate_curve(&c).iter().any(|d| d.predicate == "standard-bergman"));
    }

    #[test]
    fn round_trips_through_json() {
        let s = CurveSpec::parse(AIRY).unwrap();
        let back = CurveSpec::parse(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }
}

//! JSON multiplier literals and CSV bracket reports.
//!
//! Accepted literals (optionally with `"name"` and `"symmetric"`):
//!
//! ```text
//! {"support": [["(0)", 1, 0], ["(1)", 1, 0]]}
//! {"radial": {"coeffs_by_length": [1, 0.5, [0, 0.25]], "tail": 0}}
//! {"fejer": {"n": 8, "r": 0.9}}
//! {"constant": 1}
//! ```

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::Group;
use crate::linalg::{C64, ZERO};

use super::{Multiplier, MultiplierError, NormBracket, Rule, BRACKET_CSV_HEADER};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexLiteral {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexLiteral> for C64 {
    fn from(c: ComplexLiteral) -> C64 {
        match c {
            ComplexLiteral::Real(x) => C64::new(x, 0.0),
            ComplexLiteral::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for ComplexLiteral {
    fn from(z: C64) -> Self {
        if z.im == 0.0 {
            ComplexLiteral::Real(z.re)
        } else {
            ComplexLiteral::Pair([z.re, z.im])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialLiteral {
    pub coeffs_by_length: Vec<ComplexLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<ComplexLiteral>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FejerLiteral {
    pub n: usize,
    pub r: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierLiteral {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<(String, f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fejer: Option<FejerLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<ComplexLiteral>,
}

impl MultiplierLiteral {
    pub fn from_json(text: &str) -> Result<Self, MultiplierError> {
        serde_json::from_str(text).map_err(|e| MultiplierError::Parse(e.to_string()))
    }

    pub fn build(&self, group: Arc<Group>) -> Result<Multiplier, MultiplierError> {
        let forms = [self.support.is_some(), self.radial.is_some(), self.fejer.is_some(), self.constant.is_some()];
        if forms.iter().filter(|&&x| x).count() != 1 {
            return Err(MultiplierError::Parse(
                "exactly one of `support`, `radial`, `fejer`, `constant` is required".into(),
            ));
        }
        let finite = |x: f64| x.is_finite();
        let mut phi = if let Some(entries) = &self.support {
            let parsed = entries
                .iter()
                .map(|(t, re, im)| {
                    if !(finite(*re) && finite(*im)) {
                        return Err(MultiplierError::Parse(format!("non-finite value at {t}")));
                    }
                    Ok((group.parse_element(t)?, C64::new(*re, *im)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Multiplier::finite(group, parsed, "support")?
        } else if let Some(r) = &self.radial {
            let coeffs: Vec<C64> = r.coeffs_by_length.iter().map(|&c| c.into()).collect();
            let tail: C64 = r.tail.map_or(ZERO, Into::into);
            if coeffs.iter().chain([&tail]).any(|z| !(finite(z.re) && finite(z.im))) {
                return Err(MultiplierError::Parse("non-finite radial coefficient".into()));
            }
            let symmetric = coeffs.iter().chain([&tail]).all(|z| z.im == 0.0);
            Multiplier::radial_table(group, coeffs, tail, "radial").with_symmetry(symmetric)
        } else if let Some(f) = &self.fejer {
            crate::family::fejer_multiplier(group, f.n, f.r)?
        } else {
            let c: C64 = self.constant.expect("checked above").into();
            Multiplier::radial_table(group, vec![], c, format!("constant({c})")).with_symmetry(c.im == 0.0)
        };
        if let Some(name) = &self.name {
            phi = phi.named(name.clone());
        }
        if let Some(s) = self.symmetric {
            phi = phi.with_symmetry(s);
        }
        Ok(phi)
    }

    /// Literal for a finitely supported or radial-table multiplier.
    pub fn of(phi: &Multiplier) -> Result<Self, MultiplierError> {
        let mut lit = MultiplierLiteral {
            name: Some(phi.name().to_string()),
            symmetric: Some(phi.is_symmetric()),
            ..Default::default()
        };
        match phi.rule() {
            Rule::Support(s) => {
                lit.support = Some(s.iter().map(|(t, v)| (t.canonical_string(), v.re, v.im)).collect());
            }
            Rule::RadialTable { coeffs, tail } => {
                lit.radial = Some(RadialLiteral {
                    coeffs_by_length: coeffs.iter().map(|&c| c.into()).collect(),
                    tail: (*tail != ZERO).then(|| (*tail).into()),
                });
            }
            _ => return Err(MultiplierError::Invalid(format!("{} has no finite literal form", phi.name()))),
        }
        Ok(lit)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("literal serializes")
    }
}

pub fn parse_multiplier(text: &str, group: Arc<Group>) -> Result<Multiplier, MultiplierError> {
    MultiplierLiteral::from_json(text)?.build(group)
}

/// Writes `# key = value` header lines, the column header and one row per bracket.
pub fn write_bracket_csv<W: Write>(
    header: &[(String, String)],
    brackets: &[NormBracket],
    mut w: W,
) -> std::io::Result<()> {
    for (k, v) in header {
        writeln!(w, "# {k} = {v}")?;
    }
    writeln!(w, "{BRACKET_CSV_HEADER}")?;
    for b in brackets {
        writeln!(w, "{}", b.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Element;

    #[test]
    fn support_literal() {
        let z = Arc::new(Group::zn(1));
        let phi =
            parse_multiplier(r#"{"support": [["(0)", 1, 0], ["(1)", 1, 0]], "name": "ind01"}"#, z.clone()).unwrap();
        assert_eq!(phi.name(), "ind01");
        assert_eq!(phi.eval(&Element::Vector(vec![1])).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(phi.eval(&Element::Vector(vec![2])).unwrap(), ZERO);
        let back = MultiplierLiteral::of(&phi).unwrap();
        let again = back.build(z).unwrap();
        assert_eq!(again.support(), phi.support());
    }

    #[test]
    fn radial_and_fejer_literals() {
        let f2 = Arc::new(Group::free(2));
        let phi =
            parse_multiplier(r#"{"radial": {"coeffs_by_length": [1, [0, 0.5]], "tail": 0.25}}"#, f2.clone()).unwrap();
        assert_eq!(phi.eval(&Element::parse("a").unwrap()).unwrap(), C64::new(0.0, 0.5));
        assert_eq!(phi.eval(&Element::parse("abab").unwrap()).unwrap(), C64::new(0.25, 0.0));
        assert!(!phi.is_symmetric());
        let fej = parse_multiplier(r#"{"fejer": {"n": 4, "r": 0.9}}"#, f2.clone()).unwrap();
        assert!((fej.eval(&Element::parse("ab").unwrap()).unwrap().re - 0.486).abs() < 1e-15);
        let one = parse_multiplier(r#"{"constant": 1}"#, f2).unwrap();
        assert_eq!(one.eval(&Element::parse("aB").unwrap()).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn malformed_literals() {
        let z = Arc::new(Group::zn(1));
        for bad in [
            "{}",
            r#"{"support": [], "constant": 1}"#,
            r#"{"support": [["(0,0)", 1, 0]]}"#,
            r#"{"bogus": 1}"#,
            "not json",
        ] {
            assert!(parse_multiplier(bad, z.clone()).is_err(), "{bad}");
        }
    }

    #[test]
    fn bracket_csv() {
        let b = NormBracket::new("phi", 2, 4).with_lower(1.0, "sdp(F=B_4)").with_upper(1.0, "trivial");
        let mut buf = Vec::new();
        write_bracket_csv(&[("tol".into(), "1e-6".into())], &[b], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tol = 1e-6");
        assert_eq!(lines[1], BRACKET_CSV_HEADER);
        assert!(lines[2].starts_with("phi,2,4,1.000000000000e0,1.000000000000e0,"));
    }
}

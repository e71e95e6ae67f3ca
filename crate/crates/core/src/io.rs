//! Family JSON: `{"ambient_degree": d, "polys": [[c0, ..., cd], ...], "labels": [...]}`
//! with coefficients in ascending powers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Family, Poly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub ambient_degree: usize,
    pub polys: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl FamilyFile {
    pub fn into_family(self) -> Result<Family> {
        let len = self.ambient_degree + 1;
        let mut members = Vec::with_capacity(self.polys.len());
        for coeffs in self.polys {
            if coeffs.len() != len {
                return Err(Error::DegreeMismatch {
                    expected: len,
                    found: coeffs.len(),
                });
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite);
            }
            members.push(Poly::new(coeffs));
        }
        let family = Family::new(members)?;
        match self.labels {
            Some(labels) => family.with_labels(labels),
            None => Ok(family),
        }
    }
}

impl From<&Family> for FamilyFile {
    fn from(family: &Family) -> Self {
        FamilyFile {
            ambient_degree: family.ambient_degree(),
            polys: family.members().iter().map(|p| p.coeffs().to_vec()).collect(),
            labels: family.labels().map(<[String]>::to_vec),
        }
    }
}

pub fn parse_family(json: &str) -> Result<Family> {
    let file: FamilyFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("family JSON: {e}")))?;
    file.into_family()
}

pub fn family_to_json(family: &Family) -> String {
    serde_json::to_string(&FamilyFile::from(family)).expect("family JSON is always serialisable")
}

//! JSON system-definition schema, shared with the command-line front-end.
//!
//! Conformal systems:
//! `{"dimension": d, "alphabet": [..], "maps": [{"kind": "similitude", ..}, ..],
//!   "subshift": [[0/1]..], "boxes": [[[lo..],[hi..]]..]}`
//!
//! Restricted products (carpet-like non-conformal systems):
//! `{"kind": "restricted_product", "components": [{"maps": [..]}, ..],
//!   "tuples": [[i,j,..], ..]}`

use crate::geom::{Interval, IntervalBox};
use crate::ifs::map::{ConformalMap, MobiusInvolutionMap, OrthogonalMatrix, Similitude};
use crate::ifs::{IFSSystem, SubshiftMatrix};
use crate::nonconformal::RestrictedProductIFS;
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// One map entry in the JSON schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapDef {
    Similitude {
        ratio: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        rotation: Option<Vec<Vec<f64>>>,
        /// d = 2 shorthand: anticlockwise rotation by `2π·angle`.
        #[serde(skip_serializing_if = "Option::is_none")]
        angle: Option<f64>,
        translation: Vec<f64>,
    },
    Mobius {
        t: Vec<f64>,
        lambda: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        o: Option<Vec<Vec<f64>>>,
        u: Vec<f64>,
    },
}

impl MapDef {
    pub fn build(&self, dimension: usize) -> Result<ConformalMap> {
        match self {
            MapDef::Similitude {
                ratio,
                rotation,
                angle,
                translation,
            } => {
                let rot = match (rotation, angle) {
                    (Some(rows), None) => OrthogonalMatrix::new(rows_to_matrix(rows, dimension)?)?,
                    (None, Some(theta)) => {
                        if dimension != 2 {
                            return Err(CoreError::invalid("angle shorthand needs dimension 2"));
                        }
                        OrthogonalMatrix::rotation2(*theta)
                    }
                    (None, None) => {
                        if *ratio < 0.0 && dimension == 1 {
                            OrthogonalMatrix::new(DMatrix::from_element(1, 1, -1.0))?
                        } else {
                            OrthogonalMatrix::identity(dimension)
                        }
                    }
                    (Some(_), Some(_)) => {
                        return Err(CoreError::invalid("give rotation or angle, not both"))
                    }
                };
                if translation.len() != dimension {
                    return Err(CoreError::invalid("translation length must equal dimension"));
                }
                Ok(ConformalMap::Similitude(Similitude::new(
                    ratio.abs(),
                    rot,
                    DVector::from_vec(translation.clone()),
                )?))
            }
            MapDef::Mobius { t, lambda, o, u } => {
                let rot = match o {
                    Some(rows) => OrthogonalMatrix::new(rows_to_matrix(rows, dimension)?)?,
                    None => OrthogonalMatrix::identity(dimension),
                };
                Ok(ConformalMap::Mobius(MobiusInvolutionMap::new(
                    DVector::from_vec(t.clone()),
                    *lambda,
                    rot,
                    DVector::from_vec(u.clone()),
                )?))
            }
        }
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], d: usize) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(CoreError::invalid("rotation matrix must be d×d"));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

/// Conformal system definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalSystemDef {
    pub dimension: usize,
    pub alphabet: Vec<String>,
    pub maps: Vec<MapDef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subshift: Option<Vec<Vec<u8>>>,
    /// Optional `U_a` boxes, each given as `[lo_coords, hi_coords]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boxes: Option<Vec<[Vec<f64>; 2]>>,
}

impl ConformalSystemDef {
    pub fn build(&self) -> Result<IFSSystem> {
        if self.alphabet.len() != self.maps.len() {
            return Err(CoreError::invalid("alphabet and maps must have equal length"));
        }
        let maps = self
            .maps
            .iter()
            .map(|m| m.build(self.dimension))
            .collect::<Result<Vec<_>>>()?;
        let subshift = match &self.subshift {
            Some(rows) => Some(SubshiftMatrix::from_u8(rows)?),
            None => None,
        };
        let boxes = match &self.boxes {
            Some(bs) => Some(
                bs.iter()
                    .map(|[lo, hi]| {
                        if lo.len() != self.dimension || hi.len() != self.dimension {
                            return Err(CoreError::invalid("box bounds must have length d"));
                        }
                        Ok(IntervalBox::new(
                            lo.iter()
                                .zip(hi)
                                .map(|(&l, &h)| Interval::new(l, h))
                                .collect(),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        IFSSystem::new(self.alphabet.clone(), maps, subshift, boxes)
    }
}

/// Restricted-product definition: d one-dimensional component families plus
/// the admissible tuple set.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictedProductDef {
    pub kind: String,
    pub components: Vec<ComponentDef>,
    pub tuples: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDef {
    pub maps: Vec<MapDef>,
}

impl RestrictedProductDef {
    pub fn build(&self) -> Result<RestrictedProductIFS> {
        if self.kind != "restricted_product" {
            return Err(CoreError::invalid(format!("unknown system kind {}", self.kind)));
        }
        let components = self
            .components
            .iter()
            .map(|c| c.maps.iter().map(|m| m.build(1)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let weights = match &self.weights {
            Some(w) => w.clone(),
            None => vec![1.0 / self.tuples.len() as f64; self.tuples.len()],
        };
        RestrictedProductIFS::new(components, self.tuples.clone(), weights)
    }
}

/// Either kind of system definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemDef {
    RestrictedProduct(RestrictedProductDef),
    Conformal(ConformalSystemDef),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformal_roundtrip() {
        let json = r#"{
            "dimension": 1,
            "alphabet": ["a", "b"],
            "maps": [
                {"kind": "similitude", "ratio": 0.3333333333333333, "translation": [0.0]},
                {"kind": "similitude", "ratio": 0.3333333333333333, "translation": [0.6666666666666666]}
            ]
        }"#;
        let def: SystemDef = serde_json::from_str(json).unwrap();
        match def {
            SystemDef::Conformal(c) => {
                let sys = c.build().unwrap();
                assert_eq!(sys.alphabet_len(), 2);
            }
            _ => panic!("expected conformal"),
        }
    }

    #[test]
    fn restricted_product_parses() {
        let json = r#"{
            "kind": "restricted_product",
            "components": [
                {"maps": [{"kind": "mobius", "t": [0.0], "lambda": 0.99, "u": [-1.0]},
                          {"kind": "mobius", "t": [0.0], "lambda": 0.99, "u": [-2.0]}]},
                {"maps": [{"kind": "mobius", "t": [0.0], "lambda": 0.99, "u": [-1.0]},
                          {"kind": "mobius", "t": [0.0], "lambda": 0.99, "u": [-2.0]}]}
            ],
            "tuples": [[0,1],[1,0],[0,0],[1,1]]
        }"#;
        let def: SystemDef = serde_json::from_str(json).unwrap();
        assert!(matches!(def, SystemDef::RestrictedProduct(_)));
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = r#"{"dimension": 1, "alphabet": ["a"], "maps": [], "bogus": 1}"#;
        assert!(serde_json::from_str::<ConformalSystemDef>(json).is_err());
    }
}

//! The JSON configuration schema: a single document with a `kind`
//! discriminator, factor descriptors, and class maps keyed by characters
//! rendered as comma-joined exponent strings.

use crate::cover::{
    BoxFactor, BundleClass, CoverConfiguration, DirectBoxCover, FactorDatum, ProductQuotient,
};
use crate::error::Error;
use crate::group::{FiniteAbelianGroup, GroupElement, Subgroup};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassView {
    pub degree: i64,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorView {
    pub group: Vec<u64>,
    #[serde(default)]
    pub torsion_group: Vec<u64>,
    #[serde(default = "default_one")]
    pub base_dim: u32,
    #[serde(default = "default_one")]
    pub simple_factors: u32,
    pub classes: BTreeMap<String, ClassView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxFactorView {
    #[serde(default = "default_one")]
    pub base_dim: u32,
    #[serde(default = "default_one")]
    pub simple_factors: u32,
    #[serde(default)]
    pub torsion_group: Vec<u64>,
}

fn default_one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductQuotientFile {
    pub factors: Vec<FactorView>,
    /// Generator rows for the cover subgroup H of the product group.
    pub subgroup: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCoverFile {
    pub factors: Vec<BoxFactorView>,
    pub group: Vec<u64>,
    pub classes: BTreeMap<String, Vec<ClassView>>,
}

/// The on-disk configuration document: a JSON object with a "kind"
/// discriminator. Parsing dispatches on the kind by hand so that schema
/// violations keep their JSON pointer paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigFile {
    ProductQuotient(ProductQuotientFile),
    BoxCover(BoxCoverFile),
}

impl serde::Serialize for ConfigFile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (kind, mut value) = match self {
            ConfigFile::ProductQuotient(f) => {
                ("product_quotient", serde_json::to_value(f).map_err(serde::ser::Error::custom)?)
            }
            ConfigFile::BoxCover(f) => {
                ("box_cover", serde_json::to_value(f).map_err(serde::ser::Error::custom)?)
            }
        };
        value
            .as_object_mut()
            .expect("config files serialize to objects")
            .insert("kind".into(), serde_json::Value::String(kind.into()));
        value.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for ConfigFile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        ConfigFile::from_value(value).map_err(serde::de::Error::custom)
    }
}

impl ConfigFile {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ConfigFile::ProductQuotient { .. } => "product quotient",
            ConfigFile::BoxCover { .. } => "box cover",
        }
    }

    /// Parse a JSON document, reporting schema violations with their JSON
    /// pointer path.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::malformed(format!("not valid JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, Error> {
        let kind = value
            .get("kind")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| Error::malformed("at /kind: missing or non-string"))?
            .to_string();
        match kind.as_str() {
            "product_quotient" => {
                let parsed: ProductQuotientFile = serde_path_to_error::deserialize(value)
                    .map_err(|e| Error::malformed(format!("at /{}: {}", e.path(), e.inner())))?;
                Ok(ConfigFile::ProductQuotient(parsed))
            }
            "box_cover" => {
                let parsed: BoxCoverFile = serde_path_to_error::deserialize(value)
                    .map_err(|e| Error::malformed(format!("at /{}: {}", e.path(), e.inner())))?;
                Ok(ConfigFile::BoxCover(parsed))
            }
            other => Err(Error::malformed(format!(
                "at /kind: unknown configuration kind {other:?} (expected product_quotient or box_cover)"
            ))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn to_configuration(&self) -> Result<CoverConfiguration, Error> {
        match self {
            ConfigFile::ProductQuotient(ProductQuotientFile { factors, subgroup }) => {
                let mut data = Vec::with_capacity(factors.len());
                for (j, f) in factors.iter().enumerate() {
                    data.push(factor_from_view(f).map_err(|e| {
                        Error::malformed(format!("factors/{j}: {e}"))
                    })?);
                }
                let moduli: Vec<u64> = data
                    .iter()
                    .flat_map(|f: &FactorDatum| f.group.invariant_factors().iter().copied())
                    .collect();
                let gens: Vec<Vec<i64>> = subgroup
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        if row.len() != moduli.len() {
                            return Err(Error::malformed(format!(
                                "subgroup/{i}: generator has {} coordinates, ambient rank is {}",
                                row.len(),
                                moduli.len()
                            )));
                        }
                        Ok(row.iter().map(|&v| v as i64).collect())
                    })
                    .collect::<Result<_, _>>()?;
                let subgroup = Subgroup::from_generators(&moduli, &gens)?;
                Ok(CoverConfiguration::ProductQuotient(ProductQuotient {
                    factors: data,
                    subgroup,
                }))
            }
            ConfigFile::BoxCover(BoxCoverFile { factors, group, classes }) => {
                let q = FiniteAbelianGroup::new(group.clone())?;
                let mut fs = Vec::with_capacity(factors.len());
                for f in factors {
                    fs.push(BoxFactor {
                        base_dim: f.base_dim,
                        simple_factors: f.simple_factors,
                        torsion_group: FiniteAbelianGroup::new(f.torsion_group.clone())?,
                    });
                }
                let mut map = BTreeMap::new();
                for (key, tuple) in classes {
                    let tau = parse_character(&q, key)?;
                    if tuple.len() != fs.len() {
                        return Err(Error::malformed(format!(
                            "classes/{key}: {} entries for {} factors",
                            tuple.len(),
                            fs.len()
                        )));
                    }
                    let parsed: Vec<BundleClass> = tuple
                        .iter()
                        .zip(&fs)
                        .map(|(c, f)| class_from_view(c, &f.torsion_group))
                        .collect::<Result<_, _>>()
                        .map_err(|e| Error::malformed(format!("classes/{key}: {e}")))?;
                    map.insert(tau, parsed);
                }
                Ok(CoverConfiguration::DirectBoxCover(DirectBoxCover {
                    factors: fs,
                    group: q,
                    classes: map,
                }))
            }
        }
    }

    pub fn from_configuration(config: &CoverConfiguration) -> Self {
        match config {
            CoverConfiguration::ProductQuotient(pq) => ConfigFile::ProductQuotient(ProductQuotientFile {
                factors: pq
                    .factors
                    .iter()
                    .map(|f| FactorView {
                        group: f.group.invariant_factors().to_vec(),
                        torsion_group: f.torsion_group.invariant_factors().to_vec(),
                        base_dim: f.base_dim,
                        simple_factors: f.simple_factors,
                        classes: f
                            .classes
                            .iter()
                            .map(|(chi, c)| {
                                (
                                    join_coords(chi.coords()),
                                    ClassView {
                                        degree: c.degree,
                                        torsion: c.torsion.coords().to_vec(),
                                    },
                                )
                            })
                            .collect(),
                    })
                    .collect(),
                subgroup: pq.subgroup.generator_rows(),
            }),
            CoverConfiguration::DirectBoxCover(bx) => ConfigFile::BoxCover(BoxCoverFile {
                factors: bx
                    .factors
                    .iter()
                    .map(|f| BoxFactorView {
                        base_dim: f.base_dim,
                        simple_factors: f.simple_factors,
                        torsion_group: f.torsion_group.invariant_factors().to_vec(),
                    })
                    .collect(),
                group: bx.group.invariant_factors().to_vec(),
                classes: bx
                    .classes
                    .iter()
                    .map(|(tau, tuple)| {
                        (
                            join_coords(tau.coords()),
                            tuple
                                .iter()
                                .map(|c| ClassView {
                                    degree: c.degree,
                                    torsion: c.torsion.coords().to_vec(),
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            }),
        }
    }
}

fn factor_from_view(view: &FactorView) -> Result<FactorDatum, Error> {
    let group = FiniteAbelianGroup::new(view.group.clone())?;
    let torsion_group = FiniteAbelianGroup::new(view.torsion_group.clone())?;
    let mut classes = BTreeMap::new();
    for (key, c) in &view.classes {
        let chi = parse_character(&group, key)?;
        classes.insert(chi, class_from_view(c, &torsion_group)?);
    }
    Ok(FactorDatum {
        base_dim: view.base_dim,
        simple_factors: view.simple_factors,
        torsion_group,
        group,
        classes,
    })
}

fn class_from_view(view: &ClassView, torsion_group: &FiniteAbelianGroup) -> Result<BundleClass, Error> {
    if view.torsion.len() != torsion_group.rank() {
        return Err(Error::malformed(format!(
            "torsion tag has {} coordinates, torsion group has rank {}",
            view.torsion.len(),
            torsion_group.rank()
        )));
    }
    let coords: Vec<i64> = view.torsion.iter().map(|&v| v as i64).collect();
    Ok(BundleClass { degree: view.degree, torsion: torsion_group.element(&coords)? })
}

/// Characters are keyed as comma-joined exponents, e.g. "1,0,2".
pub fn parse_character(group: &FiniteAbelianGroup, key: &str) -> Result<GroupElement, Error> {
    let coords: Vec<i64> = if key.is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|part| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::malformed(format!("bad character key {key:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    group.element(&coords)
}

pub fn join_coords(coords: &[u64]) -> String {
    coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_quotient_round_trip() {
        let text = r#"{
            "kind": "product_quotient",
            "factors": [
                {"group": [2], "torsion_group": [], "classes": {"1": {"degree": 1, "torsion": []}}},
                {"group": [2], "torsion_group": [2], "classes": {"1": {"degree": 0, "torsion": [1]}}}
            ],
            "subgroup": [[1, 1]]
        }"#;
        let file = ConfigFile::from_json(text).unwrap();
        let config = file.to_configuration().unwrap();
        assert!(config.validate().is_valid());
        let back = ConfigFile::from_configuration(&config);
        let config2 = back.to_configuration().unwrap();
        assert_eq!(config, config2);
    }

    #[test]
    fn schema_violation_reports_pointer() {
        let text = r#"{"kind": "product_quotient", "factors": [{"group": [2], "classes": {"1": {"degree": "x"}}}], "subgroup": []}"#;
        let err = ConfigFile::from_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("factors[0].classes.1.degree"), "{msg}");
    }

    #[test]
    fn subgroup_generator_outside_ambient_is_malformed() {
        let text = r#"{
            "kind": "product_quotient",
            "factors": [
                {"group": [2], "torsion_group": [], "classes": {"1": {"degree": 1, "torsion": []}}}
            ],
            "subgroup": [[1, 0]]
        }"#;
        let file = ConfigFile::from_json(text).unwrap();
        let err = file.to_configuration().unwrap_err();
        assert!(err.to_string().contains("subgroup/0"));
    }

    #[test]
    fn box_cover_parses() {
        let text = r#"{
            "kind": "box_cover",
            "factors": [
                {"base_dim": 1, "torsion_group": [2]},
                {"base_dim": 2, "simple_factors": 2, "torsion_group": [2]}
            ],
            "group": [2],
            "classes": {"1": [{"degree": 0, "torsion": [1]}, {"degree": 3, "torsion": [0]}]}
        }"#;
        let config = ConfigFile::from_json(text).unwrap().to_configuration().unwrap();
        assert!(config.validate().is_valid());
        assert_eq!(config.total_dim(), 3);
        assert_eq!(config.degree_albanese(), 2);
    }

    #[test]
    fn character_keys_reduce_modulo_group() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let chi = parse_character(&g, "3,5").unwrap();
        assert_eq!(chi.coords(), &[1, 1]);
        assert!(parse_character(&g, "1").is_err());
        assert!(parse_character(&g, "a,b").is_err());
    }
}

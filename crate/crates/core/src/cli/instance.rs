use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::cut::{DemandPair, Demands};
use crate::oracle::{complemented, with_modular, BoxedOracle, Sign, SubsetMask};
use crate::zoo::{
    Coverage, GraphCut, HardPairF1F2, HardPairF3F4, HardPairF5F6, Modular, PartitionMatroid, TwoPartitionTable,
};

/// A problem instance as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(with = "kind_tag")]
    pub oracle: OracleSpec,
    /// Adds or subtracts a modular function after the base oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modular: Option<ModularSpec>,
    /// Evaluates at the complement, before any modular shift.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub complement: bool,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "type_tag")]
    pub problem: Option<ProblemSpec>,
    /// The target value `B` of the decision procedures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Success probability; `--prob` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularSpec {
    pub weights: Vec<f64>,
    pub sign: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Member {
    /// The function without hidden structure (f1, f3 or f5).
    First,
    /// The function built on the hidden set or partition (f2, f4 or f6).
    Second,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    GraphCut {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    Coverage {
        item_weights: Vec<f64>,
        covers: Vec<Vec<usize>>,
    },
    PartitionMatroid {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    Modular {
        weights: Vec<f64>,
    },
    TwoPartition {
        n: usize,
        hidden: Vec<usize>,
        grid: Vec<Vec<f64>>,
    },
    #[serde(rename = "f1f2")]
    F1F2 {
        n: usize,
        beta: usize,
        member: Member,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hidden: Option<Vec<usize>>,
    },
    #[serde(rename = "f3f4")]
    F3F4 {
        n: usize,
        alpha: usize,
        beta: usize,
        member: Member,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hidden: Option<Vec<usize>>,
    },
    #[serde(rename = "f5f6")]
    F5F6 {
        n: usize,
        m: usize,
        beta: usize,
        member: Member,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<Vec<Vec<usize>>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Demand pairs, or product demands from node weights; uniform when both are absent.
    Ssc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<Vec<(usize, usize, f64)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        node_weights: Option<Vec<f64>>,
    },
    Sbc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        b_prime: f64,
    },
    /// `weighted` lists the elements of weight one; all of them when absent.
    Sml {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weighted: Option<Vec<usize>>,
        target_weight: usize,
    },
    Slb {
        m: usize,
    },
}

/// On disk a variant is a flat object whose `tag` field names it. It is
/// rewritten to serde's external tagging before deserializing, so errors keep
/// the path inside the variant.
fn to_flat<T: Serialize>(tag: &str, value: &T) -> Result<serde_json::Value, serde_json::Error> {
    let external = serde_json::to_value(value)?;
    let serde_json::Value::Object(outer) = external else {
        return Ok(external);
    };
    let (name, body) = outer.into_iter().next().expect("one variant");
    let mut flat = serde_json::Map::new();
    flat.insert(tag.to_string(), serde_json::Value::String(name));
    if let serde_json::Value::Object(fields) = body {
        flat.extend(fields);
    }
    Ok(serde_json::Value::Object(flat))
}

fn from_flat<T: serde::de::DeserializeOwned, E: serde::de::Error>(
    tag: &'static str,
    mut flat: serde_json::Map<String, serde_json::Value>,
) -> Result<T, E> {
    let name = match flat.remove(tag) {
        Some(serde_json::Value::String(name)) => name,
        Some(_) => return Err(E::custom(format!("`{tag}` must be a string"))),
        None => return Err(E::missing_field(tag)),
    };
    let mut external = serde_json::Map::new();
    external.insert(name, serde_json::Value::Object(flat));
    serde_path_to_error::deserialize(serde_json::Value::Object(external)).map_err(|e| {
        let path = e.path().to_string();
        let inner = path.split_once('.').map(|(_, rest)| rest.to_string());
        match inner {
            Some(p) => E::custom(format!("at `{p}`: {}", e.into_inner())),
            None => E::custom(e.into_inner()),
        }
    })
}

mod kind_tag {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &OracleSpec, s: S) -> Result<S::Ok, S::Error> {
        to_flat("kind", v).map_err(serde::ser::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<OracleSpec, D::Error> {
        from_flat("kind", serde_json::Map::deserialize(d)?)
    }
}

mod type_tag {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &Option<ProblemSpec>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(p) => to_flat("type", p).map_err(serde::ser::Error::custom)?.serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<ProblemSpec>, D::Error> {
        match Option::<serde_json::Map<String, serde_json::Value>>::deserialize(d)? {
            Some(flat) => from_flat("type", flat).map(Some),
            None => Ok(None),
        }
    }
}

/// A built oracle plus whether its hidden structure came from a seed rather
/// than the file.
pub struct Built {
    pub oracle: BoxedOracle,
    pub secret_hidden: bool,
}

impl InstanceSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow!("field `{path}`: {}", e.into_inner())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn n(&self) -> usize {
        match &self.oracle {
            OracleSpec::GraphCut { n, .. }
            | OracleSpec::TwoPartition { n, .. }
            | OracleSpec::F1F2 { n, .. }
            | OracleSpec::F3F4 { n, .. }
            | OracleSpec::F5F6 { n, .. } => *n,
            OracleSpec::Coverage { covers, .. } => covers.len(),
            OracleSpec::PartitionMatroid { blocks, .. } => blocks.iter().map(Vec::len).sum(),
            OracleSpec::Modular { weights } => weights.len(),
        }
    }

    pub fn build(&self) -> Result<Built> {
        let (mut oracle, secret_hidden) = self.oracle.build().context("field `oracle`")?;
        if self.complement {
            oracle = Box::new(complemented(oracle));
        }
        if let Some(m) = &self.modular {
            oracle = Box::new(with_modular(oracle, m.weights.clone(), m.sign).context("field `modular.weights`")?);
        }
        Ok(Built { oracle, secret_hidden })
    }

    pub fn target(&self) -> Result<f64> {
        self.b.ok_or_else(|| anyhow!("field `b`: this command needs a target value"))
    }

    pub fn problem(&self) -> Result<&ProblemSpec> {
        self.problem.as_ref().ok_or_else(|| anyhow!("field `problem`: this command needs a problem section"))
    }

    pub fn demands(&self) -> Result<Demands> {
        match self.problem.as_ref() {
            None | Some(ProblemSpec::Ssc { pairs: None, node_weights: None }) => Ok(Demands::Product(vec![1.0; self.n()])),
            Some(ProblemSpec::Ssc { pairs: Some(pairs), node_weights: None }) => {
                let pairs = pairs
                    .iter()
                    .map(|&(u, v, d)| DemandPair::new(u, v, d))
                    .collect::<Result<Vec<_>, _>>()
                    .context("field `problem.pairs`")?;
                Ok(Demands::Pairs(pairs))
            }
            Some(ProblemSpec::Ssc { pairs: None, node_weights: Some(w) }) => Ok(Demands::Product(w.clone())),
            Some(ProblemSpec::Ssc { .. }) => bail!("field `problem`: give either `pairs` or `node_weights`, not both"),
            Some(_) => bail!("field `problem.type`: expected `ssc`"),
        }
    }

    pub fn sbc(&self) -> Result<(Vec<f64>, f64)> {
        match self.problem()? {
            ProblemSpec::Sbc { weights, b_prime } => {
                Ok((weights.clone().unwrap_or_else(|| vec![1.0; self.n()]), *b_prime))
            }
            _ => bail!("field `problem.type`: expected `sbc`"),
        }
    }

    pub fn sml(&self) -> Result<(SubsetMask, usize)> {
        match self.problem()? {
            ProblemSpec::Sml { weighted, target_weight } => {
                let n = self.n();
                let mask = match weighted {
                    Some(list) => SubsetMask::from_indices(n, list.iter().copied()).context("field `problem.weighted`")?,
                    None => SubsetMask::full(n),
                };
                Ok((mask, *target_weight))
            }
            _ => bail!("field `problem.type`: expected `sml`"),
        }
    }

    pub fn slb(&self) -> Result<usize> {
        match self.problem()? {
            ProblemSpec::Slb { m } => Ok(*m),
            _ => bail!("field `problem.type`: expected `slb`"),
        }
    }
}

impl OracleSpec {
    fn build(&self) -> Result<(BoxedOracle, bool)> {
        let plain = |o: BoxedOracle| Ok((o, false));
        match self {
            OracleSpec::GraphCut { n, edges } => plain(Box::new(GraphCut::new(*n, edges)?)),
            OracleSpec::Coverage { item_weights, covers } => {
                plain(Box::new(Coverage::new(item_weights.clone(), covers.clone())?))
            }
            OracleSpec::PartitionMatroid { blocks, caps } => {
                plain(Box::new(PartitionMatroid::new(blocks, caps.clone())?))
            }
            OracleSpec::Modular { weights } => plain(Box::new(Modular::new(weights.clone())?)),
            OracleSpec::TwoPartition { n, hidden, grid } => {
                let hidden = SubsetMask::from_indices(*n, hidden.iter().copied()).context("field `hidden`")?;
                plain(Box::new(TwoPartitionTable::from_grid(hidden, grid.clone())?))
            }
            OracleSpec::F1F2 { n, beta, member, seed, hidden } => {
                let pair = match hidden {
                    Some(h) => HardPairF1F2::new(*n, *beta, SubsetMask::from_indices(*n, h.iter().copied())?)?,
                    None => HardPairF1F2::with_seed(*n, *beta, seed.unwrap_or(0))?,
                };
                match member {
                    Member::First => plain(Box::new(pair.f1())),
                    Member::Second => Ok((Box::new(pair.f2()), hidden.is_none())),
                }
            }
            OracleSpec::F3F4 { n, alpha, beta, member, seed, hidden } => {
                let pair = match hidden {
                    Some(h) => {
                        HardPairF3F4::new(*n, *alpha, *beta, SubsetMask::from_indices(*n, h.iter().copied())?)?
                    }
                    None => HardPairF3F4::with_seed(*n, *alpha, *beta, seed.unwrap_or(0))?,
                };
                match member {
                    Member::First => plain(Box::new(pair.f3())),
                    Member::Second => Ok((Box::new(pair.f4()), hidden.is_none())),
                }
            }
            OracleSpec::F5F6 { n, m, beta, member, seed, blocks } => {
                let pair = match blocks {
                    Some(bs) => {
                        let masks = bs
                            .iter()
                            .map(|b| SubsetMask::from_indices(*n, b.iter().copied()))
                            .collect::<Result<Vec<_>, _>>()?;
                        HardPairF5F6::new(*n, *m, *beta, masks)?
                    }
                    None => HardPairF5F6::with_seed(*n, *m, *beta, seed.unwrap_or(0))?,
                };
                match member {
                    Member::First => plain(Box::new(pair.f5())),
                    Member::Second => Ok((Box::new(pair.f6()), blocks.is_none())),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::evaluate;

    const TRIANGLE: &str = r#"{
        "oracle": {"kind": "graph_cut", "n": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0]]},
        "modular": {"weights": [1.5, 0.0, 0.0], "sign": "minus"}
    }"#;

    #[test]
    fn triangle_minus_modular_builds() {
        let spec = InstanceSpec::parse(TRIANGLE).unwrap();
        let f = spec.build().unwrap().oracle;
        assert_eq!(evaluate(&f, &SubsetMask::full(3)).unwrap(), -1.5);
        assert_eq!(evaluate(&f, &SubsetMask::singleton(3, 1).unwrap()).unwrap(), 2.0);
    }

    #[test]
    fn canonical_form_round_trips() {
        let spec = InstanceSpec::parse(TRIANGLE).unwrap();
        let again = InstanceSpec::parse(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
        assert_eq!(again.to_json(), spec.to_json());
        let hard = InstanceSpec {
            oracle: OracleSpec::F3F4 { n: 12, alpha: 6, beta: 2, member: Member::Second, seed: Some(3), hidden: None },
            modular: None,
            complement: true,
            problem: Some(ProblemSpec::Sml { weighted: None, target_weight: 6 }),
            b: Some(2.5),
            p: Some(0.9),
        };
        assert_eq!(InstanceSpec::parse(&hard.to_json()).unwrap(), hard);
    }

    #[test]
    fn malformed_input_names_the_field() {
        let err = InstanceSpec::parse(r#"{"oracle": {"kind": "graph_cut", "n": 3, "edges": [[0, 1, "x"]]}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("oracle") && err.contains("edges[0][2]"), "{err}");
        let err = InstanceSpec::parse(r#"{"oracle": {"kind": "modular", "weights": [1]}, "bee": 1}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("bee"), "{err}");
        let spec = InstanceSpec::parse(r#"{"oracle": {"kind": "f1f2", "n": 6, "beta": 2, "member": "first"}}"#).unwrap();
        let err = format!("{:#}", spec.build().err().unwrap());
        assert!(err.contains("oracle") && err.contains("multiple of 4"), "{err}");
    }

    #[test]
    fn seeded_hidden_sets_are_secret() {
        let spec = InstanceSpec::parse(r#"{"oracle": {"kind": "f1f2", "n": 8, "beta": 3, "member": "second"}}"#).unwrap();
        assert!(spec.build().unwrap().secret_hidden);
        let pinned = InstanceSpec::parse(
            r#"{"oracle": {"kind": "f1f2", "n": 8, "beta": 3, "member": "second", "hidden": [0, 1, 2, 3]}}"#,
        )
        .unwrap();
        assert!(!pinned.build().unwrap().secret_hidden);
    }
}

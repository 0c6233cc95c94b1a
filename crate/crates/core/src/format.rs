//! JSON instance and allocation files.
//!
//! Instance:
//! `{"m": 3, "agents": [{"name": "a1", "valuation": "A"}],
//!   "valuations": {"A": {"type": "additive", "values": [1, 2, 4]}}}`;
//! table valuations use `{"type": "table", "values": [...]}` with `2^m`
//! entries indexed by bitmask (bit `k` set iff good `k` is in the bundle).
//!
//! Allocation: `{"bundles": [[0, 2], [1]], "assignment": {"a1": 0, "a2": 1}}`,
//! plus `"certified_efx": true` on solver output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{EfxError, Result};
use crate::model::{Agent, Allocation, Bundle, Good, Instance, Valuation, Value, MAX_GOODS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub agents: Vec<AgentEntry>,
    pub valuations: BTreeMap<String, ValuationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub name: String,
    pub valuation: String,
}

// A flat struct rather than an internally tagged enum: serde cannot buffer
// u128 values while looking for the tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationEntry {
    #[serde(rename = "type")]
    pub kind: EntryKind,
    pub values: Vec<Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Additive,
    Table,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationFile {
    pub bundles: Vec<Vec<Good>>,
    pub assignment: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_efx: Option<bool>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        let m = self.m;
        let valuations = self
            .valuations
            .into_iter()
            .map(|(id, entry)| {
                let values = entry.values;
                let v = match entry.kind {
                    EntryKind::Additive => {
                        if values.len() != m {
                            return Err(EfxError::Invalid(format!(
                                "additive valuation {id:?} lists {} values for {m} goods",
                                values.len()
                            )));
                        }
                        Valuation::additive(values)
                    }
                    EntryKind::Table => Valuation::table(m, values),
                }
                .map_err(|e| EfxError::Invalid(format!("valuation {id:?}: {e}")))?;
                Ok((id, v))
            })
            .collect::<Result<_>>()?;
        let agents = self
            .agents
            .into_iter()
            .map(|a| Agent {
                name: a.name,
                valuation: a.valuation,
            })
            .collect();
        Instance::new(m, agents, valuations)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let valuations = inst
            .valuations()
            .iter()
            .map(|(id, v)| {
                let entry = match (v.weights(), v.entries()) {
                    (Some(w), _) => ValuationEntry {
                        kind: EntryKind::Additive,
                        values: w.to_vec(),
                    },
                    (None, Some(t)) => ValuationEntry {
                        kind: EntryKind::Table,
                        values: t.to_vec(),
                    },
                    (None, None) => unreachable!("a valuation is additive or a table"),
                };
                (id.clone(), entry)
            })
            .collect();
        InstanceFile {
            m: inst.goods(),
            agents: inst
                .agents()
                .iter()
                .map(|a| AgentEntry {
                    name: a.name.clone(),
                    valuation: a.valuation.clone(),
                })
                .collect(),
            valuations,
        }
    }
}

impl AllocationFile {
    pub fn from_allocation(inst: &Instance, x: &Allocation, certified: Option<bool>) -> Self {
        AllocationFile {
            bundles: x.bundles.iter().map(|b| b.iter().collect()).collect(),
            assignment: inst
                .agents()
                .iter()
                .zip(&x.assignment)
                .map(|(a, &b)| (a.name.clone(), b))
                .collect(),
            certified_efx: certified,
        }
    }

    /// Resolves agent names against `inst`. Structural validity (disjointness,
    /// completeness) is left to [`crate::model::validate_allocation`].
    pub fn into_allocation(self, inst: &Instance) -> Result<Allocation> {
        let bundles = self
            .bundles
            .iter()
            .map(|goods| {
                let mut b = Bundle::EMPTY;
                for &g in goods {
                    if g >= MAX_GOODS || g >= inst.goods() {
                        return Err(EfxError::Invalid(format!(
                            "good {g} is out of range for {} goods",
                            inst.goods()
                        )));
                    }
                    if b.contains(g) {
                        return Err(EfxError::Invalid(format!(
                            "good {g} listed twice in one bundle"
                        )));
                    }
                    b = b.with(g);
                }
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()?;
        if self.assignment.len() != inst.agent_count() {
            return Err(EfxError::Invalid(format!(
                "assignment names {} agents, instance has {}",
                self.assignment.len(),
                inst.agent_count()
            )));
        }
        let assignment =
            inst.agents()
                .iter()
                .map(|a| {
                    self.assignment.get(&a.name).copied().ok_or_else(|| {
                        EfxError::Invalid(format!("agent {:?} has no bundle", a.name))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        Ok(Allocation::new(bundles, assignment))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("serializable")
}

pub fn read_allocation(path: &Path, inst: &Instance) -> Result<Allocation> {
    let file: AllocationFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.into_allocation(inst)
}

pub fn allocation_to_json(inst: &Instance, x: &Allocation, certified: Option<bool>) -> String {
    serde_json::to_string_pretty(&AllocationFile::from_allocation(inst, x, certified))
        .expect("serializable")
}

//! Seeded instance generator.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EfxError, Result};
use crate::model::{Agent, Bundle, Instance, Valuation, Value, TABLE_MAX_GOODS};
use crate::oracle::is_mms_feasible;

/// Resampling budget for MMS-feasible tables.
pub const MMS_RETRIES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    /// 1: everyone shares one valuation. 2: all but the last agent share one.
    /// 3: `n − 2` agents share one, plus agents `b` and `c`.
    pub classes: u8,
    pub max_value: Value,
    pub seed: u64,
    /// Emit `b`'s valuation as a random monotone table (classes 2 and 3).
    pub table_b: bool,
    /// Emit `c`'s valuation as an MMS-feasible table (classes 3).
    pub table_c: bool,
}

impl GenParams {
    pub fn additive(n: usize, m: usize, classes: u8, max_value: Value, seed: u64) -> Self {
        GenParams {
            n,
            m,
            classes,
            max_value,
            seed,
            table_b: false,
            table_c: false,
        }
    }
}

fn check(params: &GenParams) -> Result<()> {
    let bad = |msg: String| Err(EfxError::Invalid(msg));
    match params.classes {
        1 if params.n >= 1 => {}
        2 if params.n >= 2 => {}
        3 if params.n >= 3 => {}
        1..=3 => {
            return bad(format!(
                "{} classes need more than {} agents",
                params.classes, params.n
            ))
        }
        k => return bad(format!("classes must be 1, 2 or 3, got {k}")),
    }
    if params.max_value == 0 {
        return bad("max value must be positive".into());
    }
    if params.table_c && params.classes != 3 {
        return bad("a table for agent c needs 3 classes".into());
    }
    if params.table_b && params.classes == 1 {
        return bad("a table for agent b needs at least 2 classes".into());
    }
    if (params.table_b || params.table_c) && params.m > TABLE_MAX_GOODS {
        return bad(format!(
            "table valuations support at most {TABLE_MAX_GOODS} goods"
        ));
    }
    Ok(())
}

fn uniform_additive(rng: &mut ChaCha8Rng, m: usize, max_value: Value) -> Result<Valuation> {
    Valuation::additive((0..m).map(|_| rng.gen_range(1..=max_value)).collect())
}

/// Raises every entry to the largest value of its subsets.
fn monotone_closure(table: &mut [Value]) {
    for s in 1..table.len() {
        let mut bits = s;
        while bits != 0 {
            let low = bits & bits.wrapping_neg();
            table[s] = table[s].max(table[s ^ low]);
            bits ^= low;
        }
    }
}

/// Random monotone table, perturbed to be non-degenerate.
pub fn random_monotone_table(
    rng: &mut ChaCha8Rng,
    m: usize,
    max_value: Value,
) -> Result<Valuation> {
    let mut table: Vec<Value> = (0..1u64 << m)
        .map(|s| {
            let size = Bundle::from_bits(s).len() as Value;
            if size == 0 {
                0
            } else {
                rng.gen_range(1..=max_value * size)
            }
        })
        .collect();
    monotone_closure(&mut table);
    Valuation::table(m, table)?.perturbed()
}

/// MMS-feasible table: an additive base with distinct subset sums, scaled
/// up, plus per-bundle noise below half the scale, closed under monotonicity
/// and perturbed. Candidates are checked and resampled.
pub fn random_mms_table(rng: &mut ChaCha8Rng, m: usize, max_value: Value) -> Result<Valuation> {
    const SCALE: Value = 8;
    for _ in 0..MMS_RETRIES {
        let base = uniform_additive(rng, m, max_value)?.perturbed()?;
        let mut table: Vec<Value> = (0..1u64 << m)
            .map(|s| {
                let b = Bundle::from_bits(s);
                if b.is_empty() {
                    0
                } else {
                    base.value(b) * SCALE + rng.gen_range(0..SCALE / 2)
                }
            })
            .collect();
        monotone_closure(&mut table);
        let v = Valuation::table(m, table)?.perturbed()?;
        if is_mms_feasible(&v, m)?.feasible {
            return Ok(v);
        }
    }
    Err(EfxError::Invalid(format!(
        "no MMS-feasible table found in {MMS_RETRIES} attempts"
    )))
}

/// Deterministic instance for the given parameters.
pub fn generate(params: &GenParams) -> Result<Instance> {
    check(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (n, m) = (params.n, params.m);
    let mut valuations = BTreeMap::new();
    let mut agents = Vec::with_capacity(n);
    let shared = match params.classes {
        1 => n,
        2 => n - 1,
        _ => n - 2,
    };
    valuations.insert(
        "A".to_string(),
        uniform_additive(&mut rng, m, params.max_value)?,
    );
    for i in 0..shared {
        agents.push(Agent {
            name: format!("a{}", i + 1),
            valuation: "A".into(),
        });
    }
    if params.classes >= 2 {
        let vb = if params.table_b {
            random_monotone_table(&mut rng, m, params.max_value)?
        } else {
            uniform_additive(&mut rng, m, params.max_value)?
        };
        valuations.insert("B".into(), vb);
        agents.push(Agent {
            name: "b".into(),
            valuation: "B".into(),
        });
    }
    if params.classes == 3 {
        let vc = if params.table_c {
            random_mms_table(&mut rng, m, params.max_value)?
        } else {
            uniform_additive(&mut rng, m, params.max_value)?
        };
        valuations.insert("C".into(), vc);
        agents.push(Agent {
            name: "c".into(),
            valuation: "C".into(),
        });
    }
    Instance::new(m, agents, valuations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let p = GenParams::additive(4, 6, 3, 100, 7);
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        let q = GenParams {
            seed: 8,
            ..p.clone()
        };
        assert_ne!(generate(&p).unwrap(), generate(&q).unwrap());
    }

    #[test]
    fn class_layouts() {
        let one = generate(&GenParams::additive(3, 4, 1, 10, 1)).unwrap();
        assert!(one.agents().iter().all(|a| a.valuation == "A"));
        let two = generate(&GenParams::additive(3, 4, 2, 10, 1)).unwrap();
        assert_eq!(two.valuations().len(), 2);
        let three = generate(&GenParams::additive(5, 4, 3, 10, 1)).unwrap();
        let shared = three.agents().iter().filter(|a| a.valuation == "A").count();
        assert_eq!(shared, 3);
        assert!(generate(&GenParams::additive(2, 4, 3, 10, 1)).is_err());
        assert!(generate(&GenParams::additive(4, 4, 4, 10, 1)).is_err());
        assert!(generate(&GenParams::additive(4, 4, 3, 0, 1)).is_err());
    }

    #[test]
    fn values_within_range() {
        let inst = generate(&GenParams::additive(4, 9, 3, 5, 3)).unwrap();
        for v in inst.valuations().values() {
            assert!(v.weights().unwrap().iter().all(|&w| (1..=5).contains(&w)));
        }
    }

    #[test]
    fn tables_have_required_properties() {
        for seed in 0..5 {
            let p = GenParams {
                table_b: true,
                table_c: true,
                ..GenParams::additive(4, 6, 3, 20, seed)
            };
            let inst = generate(&p).unwrap();
            let vb = &inst.valuations()["B"];
            let vc = &inst.valuations()["C"];
            assert!(vb.is_monotone() && vb.is_nondegenerate(20).unwrap());
            assert!(vc.is_monotone() && vc.is_nondegenerate(20).unwrap());
            assert!(is_mms_feasible(vc, 16).unwrap().feasible);
        }
    }
}

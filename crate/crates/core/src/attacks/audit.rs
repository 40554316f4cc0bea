use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{instantiate, AttackError, AttackKind, AttackSpec};
use crate::gf2::{mask, BitWord};
use crate::qsim::{epsilon, FunctionTable};
use crate::rng::SimRng;

/// Largest Simon-domain width the exhaustive ε computation accepts.
pub const MAX_AUDIT_WIDTH: u32 = 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonAudit {
    pub attack: String,
    pub width: u32,
    pub simon_width: u32,
    pub period: Option<BitWord>,
    /// Largest collision probability over shifts other than `0` and the
    /// period.
    pub epsilon: f64,
    pub bound: f64,
    pub within_bound: bool,
}

fn audit_table(attack: String, width: u32, table: &FunctionTable, period: Option<BitWord>) -> Result<EpsilonAudit, AttackError> {
    let s = match period {
        Some(s) => s,
        None => BitWord::zero(table.in_width())?,
    };
    let eps = epsilon(table, s)?;
    Ok(EpsilonAudit {
        attack,
        width,
        simon_width: table.in_width(),
        period,
        epsilon: eps,
        bound: 0.5,
        within_bound: eps <= 0.5,
    })
}

/// Computes `ε` of the Simon function of `spec` exactly. Nonce-based
/// attacks are audited under nonce 0.
pub fn epsilon_audit(spec: &AttackSpec) -> Result<EpsilonAudit, AttackError> {
    if spec.simon_width() > MAX_AUDIT_WIDTH {
        return Err(AttackError::Width {
            kind: spec.kind,
            width: spec.width,
            min: spec.kind.width_range().0,
            max: MAX_AUDIT_WIDTH - spec.kind.has_selector() as u32,
        });
    }
    let inst = instantiate(spec)?;
    let table = inst.simon_table(0)?;
    audit_table(spec.kind.name().to_string(), spec.width, &table, inst.planted_period())
}

/// Audit of a constant function, whose `ε` is 1.
pub fn constant_control_audit(width: u32) -> Result<EpsilonAudit, AttackError> {
    if width == 0 || width > MAX_AUDIT_WIDTH {
        return Err(AttackError::Parameters(format!(
            "control width {width} outside 1..={MAX_AUDIT_WIDTH}"
        )));
    }
    let table = FunctionTable::tabulate(width, 1, |_| 0)?;
    audit_table("constant".into(), width, &table, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub attack: AttackKind,
    pub width: u32,
    /// Classical queries until a verified collision, the check included.
    pub queries: u64,
    pub period: Option<BitWord>,
    pub correct: bool,
}

/// Classical collision search on the Simon function: query distinct random
/// inputs until two collide, then confirm the difference on one known point
/// with one more query.
pub fn classical_baseline(spec: &AttackSpec, rng: &mut SimRng) -> Result<BaselineResult, AttackError> {
    if spec.kind.nonce_randomized() {
        return Err(AttackError::Parameters(format!(
            "{} draws a fresh nonce per query; no fixed function to search",
            spec.kind
        )));
    }
    let inst = instantiate(spec)?;
    let w = inst.simon_width();
    let m = mask(w);
    let domain = 1u64 << w;
    let mut by_value: HashMap<u32, u32> = HashMap::new();
    let mut answers: HashMap<u32, u32> = HashMap::new();
    let mut order = Vec::new();
    let mut found = None;
    while (answers.len() as u64) < domain {
        let x = rng.gen::<u32>() & m;
        if answers.contains_key(&x) {
            continue;
        }
        let y = inst.classical_eval(x).expect("nonce-free target");
        answers.insert(x, y);
        order.push(x);
        if let Some(&prev) = by_value.get(&y) {
            let cand = prev ^ x;
            // confirm on a known point outside the colliding pair
            let probe = order
                .iter()
                .copied()
                .find(|&z| z != prev && z != x && !answers.contains_key(&(z ^ cand)));
            let confirmed = match probe {
                Some(z) => {
                    let fz = inst.classical_eval(z ^ cand).expect("nonce-free target");
                    answers.insert(z ^ cand, fz);
                    order.push(z ^ cand);
                    fz == answers[&z]
                }
                None => true,
            };
            if confirmed {
                found = Some(cand);
                break;
            }
        }
        by_value.insert(y, x);
    }
    let period = found.map(|s| BitWord::new(w, s).expect("fits width"));
    Ok(BaselineResult {
        attack: spec.kind,
        width: spec.width,
        queries: inst.queries_total(),
        correct: period.is_some() && period == inst.planted_period(),
        period,
    })
}

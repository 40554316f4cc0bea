use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::instance::{Instance, Target};
use super::{AttackError, AttackKind};
use crate::gf2::mask;
use crate::rng::SimRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForgeryOrigin {
    /// Returned by a classical oracle query.
    Queried,
    /// Built offline from the queried entry with the same `source` index.
    Derived { source: usize },
}

/// A message (or ciphertext) with a tag claimed valid under the target key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forgery {
    pub origin: ForgeryOrigin,
    pub nonce: Option<u32>,
    pub associated_data: Vec<u32>,
    /// Message blocks for MACs, ciphertext blocks for AEAD.
    pub payload: Vec<u32>,
    pub tag: u32,
    /// Accepted by the honest scheme.
    pub verified: bool,
}

impl Forgery {
    fn key(&self) -> (Option<u32>, Vec<u32>, Vec<u32>) {
        (self.nonce, self.associated_data.clone(), self.payload.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgeryBatch {
    pub forgeries: Vec<Forgery>,
    /// Set when fewer than the requested derived forgeries were found.
    pub shortfall: Option<String>,
}

struct Pair {
    queried: Forgery,
    derived: Forgery,
}

fn entry(nonce: Option<u32>, ad: Vec<u32>, payload: Vec<u32>, tag: u32) -> Forgery {
    Forgery {
        origin: ForgeryOrigin::Queried,
        nonce,
        associated_data: ad,
        payload,
        tag,
        verified: false,
    }
}

fn one_pair(inst: &Instance, secret: u32, rng: &mut SimRng) -> Result<Pair, AttackError> {
    let spec = inst.spec();
    let m = mask(spec.width);
    let mut r = || rng.gen::<u32>() & m;
    let (a0, a1) = (spec.alpha0, spec.alpha1);
    let pair = match (inst.target(), spec.kind) {
        (Target::CbcMac(o), _) => {
            let (x, y) = (r(), r());
            let tag = o.tag(&[a0, x, y])?;
            Pair {
                queried: entry(None, vec![], vec![a0, x, y], tag),
                derived: entry(None, vec![], vec![a1, x ^ secret, y], tag),
            }
        }
        (Target::Pmac(o), AttackKind::Pmac1) => {
            let (x, y) = (r(), r());
            let tag = o.tag(&[a0, x, y])?;
            Pair {
                queried: entry(None, vec![], vec![a0, x, y], tag),
                derived: entry(None, vec![], vec![a1, x, y ^ secret], tag),
            }
        }
        (Target::Pmac(o), _) => {
            let (x, z) = (r(), r());
            let tag = o.tag(&[x, x, z])?;
            let y = x ^ secret;
            Pair {
                queried: entry(None, vec![], vec![x, x, z], tag),
                derived: entry(None, vec![], vec![y, y, z], tag),
            }
        }
        (Target::Gmac(o), _) => {
            let (x, y) = (r(), r());
            let (nonce, tag) = o.tag(&[x, y])?;
            Pair {
                queried: entry(Some(nonce), vec![], vec![x, y], tag),
                derived: entry(Some(nonce), vec![], vec![x ^ 1, y ^ secret], tag),
            }
        }
        (Target::Gcm(o), _) => {
            let (a, b, msg) = (r(), r(), r());
            let sealed = o.seal(&[a, b], &[msg])?;
            Pair {
                queried: entry(Some(sealed.nonce), vec![a, b], sealed.ciphertext.clone(), sealed.tag),
                derived: entry(Some(sealed.nonce), vec![a ^ 1, b ^ secret], sealed.ciphertext, sealed.tag),
            }
        }
        (Target::Ocb(o), AttackKind::OcbAuth) => {
            let (a, z, msg) = (r(), r(), r());
            let sealed = o.seal(&[a, a, z], &[msg])?;
            let b = a ^ secret;
            Pair {
                queried: entry(Some(sealed.nonce), vec![a, a, z], sealed.ciphertext.clone(), sealed.tag),
                derived: entry(Some(sealed.nonce), vec![b, b, z], sealed.ciphertext, sealed.tag),
            }
        }
        (Target::Ocb(o), _) => {
            let msg = [r(), r()];
            let sealed = o.seal(&[], &msg)?;
            let c = &sealed.ciphertext;
            let swapped = vec![c[1] ^ secret, c[0] ^ secret];
            Pair {
                queried: entry(Some(sealed.nonce), vec![], c.clone(), sealed.tag),
                derived: entry(Some(sealed.nonce), vec![], swapped, sealed.tag),
            }
        }
        _ => {
            return Err(AttackError::Parameters(format!(
                "{} does not produce forgeries",
                spec.kind
            )))
        }
    };
    Ok(pair)
}

fn verify(inst: &Instance, f: &Forgery) -> bool {
    let nonce = f.nonce.unwrap_or(0);
    match inst.target() {
        Target::CbcMac(o) => o.scheme().tag(&f.payload) == Ok(f.tag),
        Target::Pmac(o) => o.scheme().tag(&f.payload) == Ok(f.tag),
        Target::Gmac(o) => o.scheme().tag(nonce, &f.payload) == Ok(f.tag),
        Target::Gcm(o) => o
            .scheme()
            .open(nonce, &f.associated_data, &f.payload, f.tag)
            .is_some(),
        Target::Ocb(o) => o
            .scheme()
            .open(nonce, &f.associated_data, &f.payload, f.tag)
            .is_some(),
        _ => false,
    }
}

/// Queries the oracle classically and derives one new valid pair from each
/// answer using `secret`, until `needed` derived pairs exist and the list
/// outnumbers all queries made so far.
///
/// Queried and derived entries are both returned, each checked against the
/// honest scheme. Duplicates are dropped.
pub fn make_forgeries(
    inst: &Instance,
    secret: u32,
    needed: u64,
    rng: &mut SimRng,
) -> Result<ForgeryBatch, AttackError> {
    let cap = 4 * needed + 64;
    let mut seen = HashSet::new();
    let mut forgeries = Vec::new();
    let mut derived = 0u64;
    let mut attempts = 0u64;
    let short = |derived: u64, len: usize| derived < needed || len as u64 <= inst.queries_total();
    while short(derived, forgeries.len()) && attempts < cap {
        attempts += 1;
        let Pair {
            mut queried,
            derived: mut forged,
        } = one_pair(inst, secret, rng)?;
        let source = if seen.insert(queried.key()) {
            queried.verified = verify(inst, &queried);
            forgeries.push(queried);
            forgeries.len() - 1
        } else {
            continue;
        };
        if !seen.insert(forged.key()) {
            continue;
        }
        forged.origin = ForgeryOrigin::Derived { source };
        forged.verified = verify(inst, &forged);
        forgeries.push(forged);
        derived += 1;
    }
    let shortfall = short(derived, forgeries.len()).then(|| {
        format!(
            "{derived} of {needed} derived forgeries, {} entries against {} queries",
            forgeries.len(),
            inst.queries_total()
        )
    });
    Ok(ForgeryBatch {
        forgeries,
        shortfall,
    })
}

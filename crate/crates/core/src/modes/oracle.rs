use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::TweakableCipher;
use crate::gf2::mask;
use crate::primitives::BlockCipher;
use crate::qsim::{FunctionTable, QsimError};
use crate::rng::{rng_from_seed, SimRng};

/// Monotone query totals for one oracle.
#[derive(Debug, Default)]
pub struct QueryCounter {
    classical: AtomicU64,
    superposition: AtomicU64,
}

impl QueryCounter {
    pub fn classical(&self) -> u64 {
        self.classical.load(Ordering::SeqCst)
    }

    pub fn superposition(&self) -> u64 {
        self.superposition.load(Ordering::SeqCst)
    }

    pub fn total(&self) -> u64 {
        self.classical() + self.superposition()
    }

    pub(crate) fn charge_classical(&self) {
        self.classical.fetch_add(1, Ordering::SeqCst);
    }

    pub(crate) fn charge_superposition(&self) {
        self.superposition.fetch_add(1, Ordering::SeqCst);
    }
}

/// Schemes whose oracle picks the nonce itself.
pub trait NonceScheme {
    fn nonce_width(&self) -> u32;
}

/// Output of a nonce-based seal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sealed {
    pub nonce: u32,
    pub ciphertext: Vec<u32>,
    pub tag: u32,
}

/// Keyed scheme behind a counting interface.
///
/// Classical methods are provided per scheme. `superposition` models one
/// quantum query: the circuit evaluates the keyed scheme on every basis
/// input, and the whole tabulation is charged once.
pub struct Oracle<S> {
    scheme: Arc<S>,
    counter: Arc<QueryCounter>,
    nonce_rng: Mutex<SimRng>,
}

impl<S: Send + Sync> Oracle<S> {
    /// `seed` drives the nonces the oracle draws for classical queries.
    pub fn new(scheme: Arc<S>, seed: u64) -> Self {
        Self {
            scheme,
            counter: Arc::new(QueryCounter::default()),
            nonce_rng: Mutex::new(rng_from_seed(seed)),
        }
    }

    pub fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    /// Direct access to the keyed scheme. Used for honest verification and
    /// ground truth only; never charged.
    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    /// Tabulates `circuit` over all `in_width`-bit inputs as one query.
    pub fn superposition<F>(
        &self,
        in_width: u32,
        out_width: u32,
        circuit: F,
    ) -> Result<FunctionTable, QsimError>
    where
        F: Fn(&S, u32) -> u32 + Sync,
    {
        let scheme = &*self.scheme;
        let table = FunctionTable::tabulate(in_width, out_width, |x| circuit(scheme, x))?;
        self.counter.charge_superposition();
        Ok(table)
    }

    pub(crate) fn classical<R>(&self, query: impl FnOnce(&S) -> R) -> R {
        self.counter.charge_classical();
        query(&self.scheme)
    }
}

impl<S: NonceScheme + Send + Sync> Oracle<S> {
    pub(crate) fn draw_nonce(&self) -> u32 {
        let width = self.scheme.nonce_width();
        self.nonce_rng.lock().expect("nonce rng").gen::<u32>() & mask(width)
    }

    /// One superposition query under a nonce the oracle draws from
    /// `step_rng`; the circuit sees that nonce but cannot choose it.
    pub fn superposition_with_nonce<F>(
        &self,
        in_width: u32,
        out_width: u32,
        step_rng: &mut SimRng,
        circuit: F,
    ) -> Result<FunctionTable, QsimError>
    where
        F: Fn(&S, u32, u32) -> u32 + Sync,
    {
        let nonce = step_rng.gen::<u32>() & mask(self.scheme.nonce_width());
        self.superposition(in_width, out_width, |s, x| circuit(s, nonce, x))
    }
}

impl<S: BlockCipher> Oracle<S> {
    /// One classical encryption query.
    pub fn encrypt(&self, x: u32) -> u32 {
        self.classical(|e| e.encrypt(x))
    }
}

impl<S: TweakableCipher> Oracle<S> {
    /// One classical tweakable encryption query.
    pub fn encrypt_tweaked(&self, tweak: u64, x: u32) -> u32 {
        self.classical(|e| e.encrypt_tweaked(tweak, x))
    }
}

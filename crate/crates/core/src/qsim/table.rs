use std::sync::OnceLock;

use rayon::prelude::*;

use super::QsimError;
use crate::gf2::{mask, BitWord, MAX_WIDTH};

/// Exhaustive truth table of `f: {0,1}^m -> {0,1}^p`.
///
/// This is the classical stand-in for an oracle that can be queried in
/// superposition.
#[derive(Clone, Debug)]
pub struct FunctionTable {
    in_width: u32,
    out_width: u32,
    table: Vec<u32>,
    // inputs sorted by (f(x), x); built on first use by tables sampled repeatedly
    index: OnceLock<Vec<u32>>,
}

impl PartialEq for FunctionTable {
    fn eq(&self, other: &Self) -> bool {
        self.in_width == other.in_width
            && self.out_width == other.out_width
            && self.table == other.table
    }
}

impl Eq for FunctionTable {}

fn check_widths(in_width: u32, out_width: u32) -> Result<(), QsimError> {
    if in_width == 0 || in_width > MAX_WIDTH {
        return Err(QsimError::WidthOverflow(in_width));
    }
    if out_width == 0 || out_width > MAX_WIDTH {
        return Err(QsimError::WidthOverflow(out_width));
    }
    Ok(())
}

impl FunctionTable {
    /// Evaluates `oracle` on every input. Large tables are filled in parallel;
    /// the result does not depend on scheduling.
    pub fn tabulate<F>(in_width: u32, out_width: u32, oracle: F) -> Result<Self, QsimError>
    where
        F: Fn(u32) -> u32 + Sync,
    {
        check_widths(in_width, out_width)?;
        let size = 1u32 << in_width;
        let table: Vec<u32> = if in_width >= 12 {
            (0..size).into_par_iter().map(&oracle).collect()
        } else {
            (0..size).map(&oracle).collect()
        };
        Self::from_values(in_width, out_width, table)
    }

    pub fn from_values(in_width: u32, out_width: u32, table: Vec<u32>) -> Result<Self, QsimError> {
        check_widths(in_width, out_width)?;
        if table.len() != 1usize << in_width {
            return Err(QsimError::TableLength {
                expected: 1usize << in_width,
                actual: table.len(),
            });
        }
        let limit = mask(out_width);
        if let Some((x, &value)) = table.iter().enumerate().find(|(_, &v)| v & !limit != 0) {
            return Err(QsimError::OutputTooWide {
                input: x as u32,
                value,
                out_width,
            });
        }
        Ok(Self {
            in_width,
            out_width,
            table,
            index: OnceLock::new(),
        })
    }

    pub fn in_width(&self) -> u32 {
        self.in_width
    }

    pub fn out_width(&self) -> u32 {
        self.out_width
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    #[inline]
    pub fn eval(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn get(&self, x: BitWord) -> Result<BitWord, QsimError> {
        if x.width() != self.in_width {
            return Err(QsimError::WidthMismatch {
                expected: self.in_width,
                actual: x.width(),
            });
        }
        Ok(BitWord::new(self.out_width, self.eval(x.value())).expect("entries fit out_width"))
    }

    pub fn values(&self) -> &[u32] {
        &self.table
    }

    /// `#{x : f(x) = f(x ⊕ t)}` by direct enumeration.
    pub fn collision_count(&self, t: u32) -> u64 {
        self.table
            .iter()
            .enumerate()
            .filter(|&(x, &v)| self.table[x ^ t as usize] == v)
            .count() as u64
    }

    /// Whether `f(x ⊕ s) = f(x)` for every `x`.
    pub fn has_period(&self, s: u32) -> bool {
        self.collision_count(s) == self.table.len() as u64
    }

    /// Builds the inverse index so later `preimage` calls avoid a full scan.
    pub fn prepare(&self) {
        self.index.get_or_init(|| {
            let mut xs: Vec<u32> = (0..self.table.len() as u32).collect();
            xs.sort_unstable_by_key(|&x| (self.table[x as usize], x));
            xs
        });
    }

    /// Inputs mapping to `value`, in increasing order.
    pub fn preimage(&self, value: u32) -> Vec<u32> {
        match self.index.get() {
            Some(xs) => {
                let lo = xs.partition_point(|&x| self.table[x as usize] < value);
                let hi = xs.partition_point(|&x| self.table[x as usize] <= value);
                xs[lo..hi].to_vec()
            }
            None => self
                .table
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v == value)
                .map(|(x, _)| x as u32)
                .collect(),
        }
    }

    /// Distinct output values with their preimages, by increasing value.
    pub fn classes(&self) -> Vec<(u32, Vec<u32>)> {
        self.prepare();
        let xs = self.index.get().expect("index built");
        let mut out: Vec<(u32, Vec<u32>)> = Vec::new();
        for &x in xs {
            let v = self.table[x as usize];
            match out.last_mut() {
                Some((last, members)) if *last == v => members.push(x),
                _ => out.push((v, vec![x])),
            }
        }
        out
    }
}

/// Tabulates a black-box oracle over all `2^in_width` inputs.
pub fn tabulate<F>(oracle: F, in_width: u32, out_width: u32) -> Result<FunctionTable, QsimError>
where
    F: Fn(u32) -> u32 + Sync,
{
    FunctionTable::tabulate(in_width, out_width, oracle)
}

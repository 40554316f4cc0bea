use super::bitword::{check_width, mask};
use super::{BitWord, Gf2Error};

/// Rows of equal-width bit vectors, one per collected Simon sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    width: u32,
    rows: Vec<u32>,
}

/// Reduced row echelon form: nonzero rows with their pivot columns.
#[derive(Clone, Debug)]
struct Echelon {
    rows: Vec<u32>,
    pivots: Vec<u32>,
}

impl Gf2Matrix {
    pub fn new(width: u32) -> Result<Self, Gf2Error> {
        check_width(width)?;
        Ok(Self {
            width,
            rows: Vec::new(),
        })
    }

    pub fn from_rows(width: u32, rows: &[BitWord]) -> Result<Self, Gf2Error> {
        let mut m = Self::new(width)?;
        for &row in rows {
            m.push(row)?;
        }
        Ok(m)
    }

    /// Builds a matrix from raw row values; bits above `width` are rejected.
    pub fn from_raw(width: u32, rows: Vec<u32>) -> Result<Self, Gf2Error> {
        check_width(width)?;
        if let Some(&bad) = rows.iter().find(|&&r| r & !mask(width) != 0) {
            return Err(Gf2Error::ValueTooWide { width, value: bad });
        }
        Ok(Self { width, rows })
    }

    pub fn push(&mut self, row: BitWord) -> Result<(), Gf2Error> {
        if row.width() != self.width {
            return Err(Gf2Error::WidthMismatch {
                left: self.width,
                right: row.width(),
            });
        }
        self.rows.push(row.value());
        Ok(())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = BitWord> + '_ {
        self.rows
            .iter()
            .map(move |&r| BitWord::new(self.width, r).expect("row fits width"))
    }

    // Pivots are chosen lowest column first; each pivot column is cleared in
    // every other row.
    fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..self.width {
            let bit = 1u32 << col;
            let Some(found) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(rank, found);
            let pivot_row = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row & bit != 0 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rows.truncate(rank);
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rows.len()
    }

    /// The reduced row echelon form with zero rows removed.
    pub fn row_reduce(&self) -> Gf2Matrix {
        Gf2Matrix {
            width: self.width,
            rows: self.echelon().rows,
        }
    }

    /// Basis of `{ s : u · s = 0 for every row u }`, one vector per free
    /// column in ascending column order.
    pub fn kernel_basis(&self) -> Vec<BitWord> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.width as usize];
        for &p in &ech.pivots {
            is_pivot[p as usize] = true;
        }
        (0..self.width)
            .filter(|&col| !is_pivot[col as usize])
            .map(|free| {
                let mut v = 1u32 << free;
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row >> free & 1 == 1 {
                        v |= 1 << p;
                    }
                }
                BitWord::new(self.width, v).expect("kernel vector fits width")
            })
            .collect()
    }
}

/// Kernel basis of the matrix whose rows are the given words.
pub fn kernel_basis(m: &Gf2Matrix) -> Vec<BitWord> {
    m.kernel_basis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::bitword::parity;
    use proptest::prelude::*;

    fn words(width: u32, values: &[u32]) -> Vec<BitWord> {
        values
            .iter()
            .map(|&v| BitWord::new(width, v).unwrap())
            .collect()
    }

    // Independent oracle: every vector orthogonal to all rows.
    fn orthogonal_space(width: u32, rows: &[u32]) -> Vec<u32> {
        (0..1u32 << width)
            .filter(|&s| rows.iter().all(|&u| !parity(u & s)))
            .collect()
    }

    fn span(basis: &[BitWord]) -> Vec<u32> {
        let mut out: Vec<u32> = (0..1u32 << basis.len())
            .map(|mask| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0, |acc, (_, b)| acc ^ b.value())
            })
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn kernel_of_two_rows() {
        let m = Gf2Matrix::from_rows(3, &words(3, &[0b110, 0b011])).unwrap();
        assert_eq!(m.kernel_basis(), words(3, &[0b111]));
    }

    #[test]
    fn kernel_of_empty_matrix_is_everything() {
        let m = Gf2Matrix::new(2).unwrap();
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 2);
        assert_eq!(span(&basis), vec![0, 1, 2, 3]);
    }

    #[test]
    fn kernel_of_full_matrix_is_trivial() {
        let all: Vec<u32> = (0..8).collect();
        let m = Gf2Matrix::from_rows(3, &words(3, &all)).unwrap();
        assert!(m.kernel_basis().is_empty());
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn wrong_width_row_rejected() {
        let mut m = Gf2Matrix::new(4).unwrap();
        assert!(m.push(BitWord::new(3, 1).unwrap()).is_err());
        assert!(Gf2Matrix::from_raw(3, vec![0b1000]).is_err());
    }

    proptest! {
        #[test]
        fn kernel_matches_exhaustive_search(
            width in 1u32..=10,
            raw in prop::collection::vec(any::<u32>(), 0..14),
        ) {
            let rows: Vec<u32> = raw.iter().map(|r| r & mask(width)).collect();
            let m = Gf2Matrix::from_raw(width, rows.clone()).unwrap();
            let basis = m.kernel_basis();
            prop_assert_eq!(basis.len(), width as usize - m.rank());
            for b in &basis {
                for &u in &rows {
                    prop_assert!(!parity(u & b.value()));
                }
            }
            prop_assert_eq!(span(&basis), orthogonal_space(width, &rows));
        }

        #[test]
        fn row_reduction_is_idempotent(
            width in 1u32..=12,
            raw in prop::collection::vec(any::<u32>(), 0..16),
        ) {
            let rows: Vec<u32> = raw.iter().map(|r| r & mask(width)).collect();
            let m = Gf2Matrix::from_raw(width, rows).unwrap();
            let once = m.row_reduce();
            prop_assert_eq!(once.row_reduce(), once.clone());
            prop_assert!(m.rank() <= m.row_count().min(width as usize));
            prop_assert_eq!(once.rank(), m.rank());
        }
    }
}

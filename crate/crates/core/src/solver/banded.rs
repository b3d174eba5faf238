//! Pentadiagonal linear solves for the collocation Jacobian.
//!
//! The interleaved two-field stencil couples each unknown to at most two
//! neighbors on either side, so the Jacobian has half-bandwidth 2. Row-pivoted
//! Gaussian elimination stays inside the band plus two spare fill rows, which
//! keeps the solve linear in the mesh size.

const KL: usize = 2;
const KU: usize = 2;
/// Superdiagonals of the factored band, including pivoting fill.
const KV: usize = KL + KU;
/// Stored rows per column.
const LDAB: usize = 2 * KL + KU + 1;

/// A square matrix with half-bandwidth 2, stored column-major in band form:
/// entry `(i, j)` lives at row offset `KV + i - j` of column `j`.
pub(crate) struct BandedMatrix {
    m: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(m: usize) -> Self {
        BandedMatrix {
            m,
            data: vec![0.0; m * LDAB],
        }
    }

    #[cfg(test)]
    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(offset: usize, col: usize) -> usize {
        col * LDAB + offset
    }

    /// Write entry `(i, j)`; the pair must lie within the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.m && j < self.m);
        debug_assert!(
            i + KU >= j && j + KL >= i,
            "entry ({i}, {j}) lies outside the band"
        );
        self.data[Self::idx(KV + i - j, j)] = value;
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + KU >= j && j + KL >= i {
            self.data[Self::idx(KV + i - j, j)]
        } else {
            0.0
        }
    }

    /// Factor with partial pivoting and solve `A x = b` in one pass, leaving
    /// the solution in `b`. A zero pivot reports the offending column.
    pub fn solve_in_place(mut self, b: &mut [f64]) -> Result<(), usize> {
        assert_eq!(b.len(), self.m, "right side length must match dimension");
        let m = self.m;
        let mut ipiv = vec![0usize; m];

        for j in 0..m {
            let km = KL.min(m - 1 - j);
            // Largest entry on or below the diagonal of column j.
            let mut piv = 0;
            let mut best = self.data[Self::idx(KV, j)].abs();
            for t in 1..=km {
                let a = self.data[Self::idx(KV + t, j)].abs();
                if a > best {
                    best = a;
                    piv = t;
                }
            }
            if best == 0.0 {
                return Err(j);
            }
            ipiv[j] = j + piv;
            let last_col = (j + KV).min(m - 1);
            if piv != 0 {
                for c in j..=last_col {
                    let a = Self::idx(KV + j - c, c);
                    let b_ = Self::idx(KV + j + piv - c, c);
                    self.data.swap(a, b_);
                }
            }
            let pivot = self.data[Self::idx(KV, j)];
            for t in 1..=km {
                self.data[Self::idx(KV + t, j)] /= pivot;
            }
            for c in j + 1..=last_col {
                let ajc = self.data[Self::idx(KV + j - c, c)];
                if ajc != 0.0 {
                    for t in 1..=km {
                        self.data[Self::idx(KV + j + t - c, c)] -=
                            self.data[Self::idx(KV + t, j)] * ajc;
                    }
                }
            }
        }

        // Forward substitution with the stored multipliers.
        for j in 0..m {
            let jp = ipiv[j];
            if jp != j {
                b.swap(j, jp);
            }
            let km = KL.min(m - 1 - j);
            for t in 1..=km {
                b[j + t] -= self.data[Self::idx(KV + t, j)] * b[j];
            }
        }
        // Back substitution against the banded upper factor.
        for j in (0..m).rev() {
            b[j] /= self.data[Self::idx(KV, j)];
            let xj = b[j];
            for i in j.saturating_sub(KV)..j {
                b[i] -= self.data[Self::idx(KV + i - j, j)] * xj;
            }
        }
        Ok(())
    }
}

//! Abelianization: exponent-sum matrices and their Smith normal form.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{GeneratorId, Presentation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix row {i}");
            for (j, v) in row.iter().enumerate() {
                m.entries[i * cols + j] = v.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let delta = q * &self.entries[src * self.cols + j];
            self.entries[dst * self.cols + j] -= delta;
        }
    }

    /// col[dst] -= q * col[src]
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let delta = q * &self.entries[i * self.cols + src];
            self.entries[i * self.cols + dst] -= delta;
        }
    }

    fn add_row(&mut self, dst: usize, src: usize) {
        for j in 0..self.cols {
            let v = self.entries[src * self.cols + j].clone();
            self.entries[dst * self.cols + j] += v;
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Rows are relators, columns generators, entries exponent sums.
pub fn relator_matrix(p: &Presentation) -> IntegerMatrix {
    let n = p.generator_count();
    let mut m = IntegerMatrix::zeros(p.relators().len(), n);
    for (i, r) in p.relators().iter().enumerate() {
        for g in 1..=n {
            let id = GeneratorId::new(g as u32).expect("g >= 1");
            m.set(i, g - 1, BigInt::from(r.exponent_sum(id)));
        }
    }
    m
}

/// Position of the nonzero entry of smallest absolute value in the
/// trailing block starting at `(t, t)`.
fn smallest_pivot(m: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if m.get(bi, bj).abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Diagonal of the Smith normal form: `min(rows, cols)` nonnegative
/// entries with `d₁ | d₂ | …`, zeros last.
pub fn smith_normal_form(matrix: &IntegerMatrix) -> Vec<BigUint> {
    let mut m = matrix.clone();
    let size = m.rows.min(m.cols);
    let mut diag = Vec::with_capacity(size);

    for t in 0..size {
        let Some((pi, pj)) = smallest_pivot(&m, t) else {
            break;
        };
        m.swap_rows(t, pi);
        m.swap_cols(t, pj);

        loop {
            // Clear column t below and row t to the right. Any nonzero
            // remainder is smaller than the pivot and becomes the new pivot.
            let mut dirty = false;
            for i in t + 1..m.rows {
                if m.get(i, t).is_zero() {
                    continue;
                }
                let q = m.get(i, t).div_floor(m.get(t, t));
                m.sub_row(i, t, &q);
                if !m.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..m.cols {
                if m.get(t, j).is_zero() {
                    continue;
                }
                let q = m.get(t, j).div_floor(m.get(t, t));
                m.sub_col(j, t, &q);
                if !m.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = smallest_pivot_in_cross(&m, t);
                m.swap_rows(t, pi);
                m.swap_cols(t, pj);
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let pivot = m.get(t, t).clone();
            let offender = (t + 1..m.rows).find(|&i| (t + 1..m.cols).any(|j| !m.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => m.add_row(t, i),
                None => break,
            }
        }
        diag.push(m.get(t, t).magnitude().clone());
    }
    diag.resize(size, BigUint::zero());
    diag
}

/// Smallest nonzero entry in row `t` or column `t` (the only places where
/// remainders can appear after one clearing sweep).
fn smallest_pivot_in_cross(m: &IntegerMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs: Option<BigInt> = None;
    let candidates = (t..m.rows).map(|i| (i, t)).chain((t + 1..m.cols).map(|j| (t, j)));
    for (i, j) in candidates {
        let v = m.get(i, j);
        if v.is_zero() {
            continue;
        }
        if best_abs.as_ref().is_none_or(|b| v.abs() < *b) {
            best_abs = Some(v.abs());
            best = (i, j);
        }
    }
    best
}

/// `H₁ = Z^rank ⊕ ⨁ Z/dᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigUint>,
}

impl fmt::Display for Homology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(alloc::format!("Z^{}", self.rank));
        }
        for d in &self.torsion {
            parts.push(alloc::format!("Z/{d}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn first_homology(p: &Presentation) -> Homology {
    let m = relator_matrix(p);
    let diag = smith_normal_form(&m);
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    Homology {
        rank: p.generator_count() - nonzero,
        torsion: diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect(),
    }
}

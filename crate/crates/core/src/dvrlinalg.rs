//! Matrices over Q(t) and Smith normal form over the local ring at `t = 0`.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::{RatFunc, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular over the fraction field")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense row-major matrix of rational functions.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<RatFunc>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            entries: vec![RatFunc::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, RatFunc::one());
        }
        m
    }

    pub fn diag(entries: Vec<RatFunc>) -> Mat {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Result<Mat, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(LinalgError::Dimension("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Parse a matrix from rows of strings in the rational-function grammar.
    pub fn parse_rows(rows: &[&[&str]]) -> Result<Mat, Box<dyn std::error::Error>> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| s.parse::<RatFunc>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Mat::from_rows(parsed)?)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &RatFunc {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RatFunc) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[RatFunc] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn scale(&self, f: &RatFunc) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * f).collect(),
        }
    }

    pub fn mul(&self, rhs: &Mat) -> Result<Mat, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = RatFunc::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn all_regular(&self) -> bool {
        self.entries.iter().all(RatFunc::is_regular_at_origin)
    }

    /// Smallest valuation among the entries (`Infinite` for the zero matrix).
    pub fn min_valuation(&self) -> Valuation {
        self.entries
            .iter()
            .map(RatFunc::val)
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn scale_row(&mut self, r: usize, f: &RatFunc) {
        for c in 0..self.cols {
            let v = self.get(r, c) * f;
            self.set(r, c, v);
        }
    }

    /// `row[dst] -= f * row[src]`
    fn row_axpy(&mut self, dst: usize, src: usize, f: &RatFunc) {
        for c in 0..self.cols {
            let v = self.get(dst, c) - &(f * self.get(src, c));
            self.set(dst, c, v);
        }
    }

    /// `col[dst] -= f * col[src]`
    fn col_axpy(&mut self, dst: usize, src: usize, f: &RatFunc) {
        for r in 0..self.rows {
            let v = self.get(r, dst) - &(f * self.get(r, src));
            self.set(r, dst, v);
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<RatFunc>>,
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatRepr {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|r| self.row(r).to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(D::Error::custom(format!(
                "entries do not match declared shape {}x{}",
                repr.rows, repr.cols
            )));
        }
        Mat::from_rows(repr.entries).map_err(D::Error::custom)
    }
}

/// Smallest `l >= 0` such that every entry of `t^l * a` is regular at the origin.
pub fn clear_denominators(a: &Mat) -> u32 {
    match a.min_valuation() {
        Valuation::Finite(v) if v < 0 => (-v) as u32,
        _ => 0,
    }
}

/// Output of [`smith_normal_form`].
///
/// `left * (t^shift * a) * right` is `diag(t^m_1, ..., t^m_n)` with
/// `m_i = diag_valuations[i]`; `left` and `right` are invertible over the
/// local ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnfResult {
    pub left: Mat,
    pub diag_valuations: Vec<i64>,
    pub right: Mat,
    pub shift: u32,
}

impl SnfResult {
    /// Valuations of the invariant factors of `a` itself (may be negative).
    pub fn signed_valuations(&self) -> Vec<i64> {
        self.diag_valuations.iter().map(|m| m - self.shift as i64).collect()
    }
}

/// Smith normal form of a square invertible matrix over the local ring.
///
/// The pivot at each stage is an entry of minimal valuation in the remaining
/// block, ties broken by the smallest `(row, col)`. Only unit scalings, swaps
/// and additions of regular multiples are used, so both transforms stay
/// unimodular. The pivot is normalized to exactly `t^m`.
pub fn smith_normal_form(a: &Mat) -> Result<SnfResult, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let shift = clear_denominators(a);
    let mut work = a.scale(&RatFunc::t_pow(shift as i64));
    let mut left = Mat::identity(n);
    let mut right = Mat::identity(n);
    let mut diag = Vec::with_capacity(n);

    for i in 0..n {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for r in i..n {
            for c in i..n {
                let v = work.get(r, c).val();
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, r, c));
                }
            }
        }
        let (v, pr, pc) = best.expect("nonempty block");
        let Valuation::Finite(v) = v else {
            return Err(LinalgError::Singular);
        };
        work.swap_rows(i, pr);
        left.swap_rows(i, pr);
        work.swap_cols(i, pc);
        right.swap_cols(i, pc);

        let (unit, _) = work.get(i, i).unit_part().expect("pivot is nonzero");
        let unit_inv = unit.inv().expect("unit is nonzero");
        work.scale_row(i, &unit_inv);
        left.scale_row(i, &unit_inv);

        let pivot_inv = RatFunc::t_pow(-v);
        for r in i + 1..n {
            if work.get(r, i).is_zero() {
                continue;
            }
            let f = work.get(r, i) * &pivot_inv;
            debug_assert!(f.is_regular_at_origin());
            work.row_axpy(r, i, &f);
            left.row_axpy(r, i, &f);
        }
        for c in i + 1..n {
            if work.get(i, c).is_zero() {
                continue;
            }
            let f = work.get(i, c) * &pivot_inv;
            debug_assert!(f.is_regular_at_origin());
            work.col_axpy(c, i, &f);
            right.col_axpy(c, i, &f);
        }
        diag.push(v);
    }
    debug_assert!(work.is_diagonal());
    Ok(SnfResult {
        left,
        diag_valuations: diag,
        right,
        shift,
    })
}

/// Determinant by Gaussian elimination over the fraction field.
pub fn determinant(a: &Mat) -> Result<RatFunc, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut det = RatFunc::one();
    for i in 0..n {
        let Some(p) = (i..n).find(|&r| !m.get(r, i).is_zero()) else {
            return Ok(RatFunc::zero());
        };
        if p != i {
            m.swap_rows(i, p);
            det = -det;
        }
        let piv = m.get(i, i).clone();
        let piv_inv = piv.inv().expect("nonzero pivot");
        for r in i + 1..n {
            if m.get(r, i).is_zero() {
                continue;
            }
            let f = m.get(r, i) * &piv_inv;
            m.row_axpy(r, i, &f);
        }
        det = &det * &piv;
    }
    Ok(det)
}

/// Valuation of the determinant; `Infinite` when singular.
pub fn valuation_of_det(a: &Mat) -> Result<Valuation, LinalgError> {
    Ok(determinant(a)?.val())
}

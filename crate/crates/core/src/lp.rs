//! Exact two-phase simplex with Bland's rule.
//!
//! Problems are `min c·x` subject to `A x = b`, `x >= 0` with integer data.
//! The tableau runs on `Ratio<i128>` with checked arithmetic and is redone
//! in `BigRational` if anything overflows, so results are always exact.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

use crate::error::{Error, Result};

/// Equality-form linear program with integer data.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Sparse rows of `A`.
    pub rows: Vec<Vec<(usize, i64)>>,
    pub rhs: Vec<i64>,
    pub cost: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: BigRational, x: Vec<BigRational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, rows: Vec::new(), rhs: Vec::new(), cost: vec![0; num_vars] }
    }

    pub fn add_row(&mut self, row: Vec<(usize, i64)>, rhs: i64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        for row in &self.rows {
            if row.iter().any(|&(j, _)| j >= self.num_vars) {
                return Err(Error::Internal("LP row references a missing variable".into()));
            }
        }
        match Tableau::<Ratio<i128>>::solve(self) {
            Some(out) => Ok(out),
            None => Tableau::<BigRational>::solve(self)
                .ok_or_else(|| Error::Internal("arbitrary-precision simplex reported overflow".into())),
        }
    }
}

trait Field: Clone + PartialEq + PartialOrd + Zero + One + Signed {
    fn from_i64(v: i64) -> Self;
    fn add_(&self, o: &Self) -> Option<Self>;
    fn sub_(&self, o: &Self) -> Option<Self>;
    fn mul_(&self, o: &Self) -> Option<Self>;
    fn div_(&self, o: &Self) -> Option<Self>;
    fn to_big(&self) -> BigRational;
}

impl Field for Ratio<i128> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn add_(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub_(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div_(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn add_(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub_(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul_(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

/// Dense tableau. Column `cols` is the right-hand side; the objective row
/// stores reduced costs and, in its last entry, minus the objective value.
struct Tableau<F> {
    rows: Vec<Vec<F>>,
    obj: Vec<F>,
    basis: Vec<usize>,
    cols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<F: Field> Tableau<F> {
    fn solve(lp: &LinearProgram) -> Option<LpOutcome> {
        let n = lp.num_vars;
        let m = lp.rows.len();
        let cols = n + m;
        let mut rows = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let mut r = vec![F::zero(); cols + 1];
            let flip = lp.rhs[i] < 0;
            for &(j, a) in row {
                let a = if flip { -a } else { a };
                r[j] = r[j].add_(&F::from_i64(a))?;
            }
            r[n + i] = F::one();
            r[cols] = F::from_i64(lp.rhs[i].abs());
            rows.push(r);
        }
        // Phase 1: minimize the artificial sum.
        let mut obj = vec![F::zero(); cols + 1];
        for r in &rows {
            for j in (0..n).chain(std::iter::once(cols)) {
                if !r[j].is_zero() {
                    obj[j] = obj[j].sub_(&r[j])?;
                }
            }
        }
        let mut t = Tableau { rows, obj, basis: (n..n + m).collect(), cols };
        t.run(n + m)?;
        if !t.obj[cols].is_zero() {
            return Some(LpOutcome::Infeasible);
        }
        // Drive artificials out of the basis; drop rows that stay redundant.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n {
                match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j)?;
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        // Phase 2 on the original columns; artificial columns are frozen.
        let mut obj = vec![F::zero(); cols + 1];
        for (j, &c) in lp.cost.iter().enumerate() {
            obj[j] = F::from_i64(c);
        }
        for (i, &b) in t.basis.iter().enumerate() {
            let cb = obj[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in (0..=cols).filter(|&j| !t.rows[i][j].is_zero()) {
                obj[j] = obj[j].sub_(&cb.mul_(&t.rows[i][j])?)?;
            }
        }
        t.obj = obj;
        match t.run(n)? {
            Phase::Unbounded => Some(LpOutcome::Unbounded),
            Phase::Optimal => {
                let mut x = vec![BigRational::zero(); n];
                for (i, &b) in t.basis.iter().enumerate() {
                    if b < n {
                        x[b] = t.rows[i][cols].to_big();
                    }
                }
                let value = -t.obj[cols].to_big();
                Some(LpOutcome::Optimal { value, x })
            }
        }
    }

    /// Bland's rule over the first `active` columns.
    fn run(&mut self, active: usize) -> Option<Phase> {
        loop {
            let Some(s) = (0..active).find(|&j| self.obj[j].is_negative()) else {
                return Some(Phase::Optimal);
            };
            let mut best: Option<(usize, F)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][s];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rows[i][self.cols].div_(a)?;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Some(Phase::Unbounded);
            };
            self.pivot(r, s)?;
        }
    }

    fn pivot(&mut self, r: usize, s: usize) -> Option<()> {
        let p = self.rows[r][s].clone();
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        for &j in &nz {
            self.rows[r][j] = self.rows[r][j].div_(&p)?;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[s].is_zero() {
                continue;
            }
            let f = row[s].clone();
            for &j in &nz {
                row[j] = row[j].sub_(&f.mul_(&pivot_row[j])?)?;
            }
        }
        if !self.obj[s].is_zero() {
            let f = self.obj[s].clone();
            for &j in &nz {
                self.obj[j] = self.obj[j].sub_(&f.mul_(&pivot_row[j])?)?;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = s;
        Some(())
    }
}

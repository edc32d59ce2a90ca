//! Dense two-phase primal simplex, generic over the field it computes in.
//!
//! Pricing is Dantzig's rule until a run of degenerate pivots is seen, then
//! Bland's rule, which cannot cycle. Instantiated with `f64` (tolerances
//! below) or with exact `BigRational` arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Values within this distance of zero are treated as zero when
    /// pivoting.
    fn pivot_tolerance() -> Self;
    /// Phase-one objectives above this prove infeasibility.
    fn feasibility_tolerance() -> Self;
    fn is_integral(&self) -> bool;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;

    fn is_pos(&self) -> bool {
        *self > Self::pivot_tolerance()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::pivot_tolerance()
    }

    fn is_nonzero(&self) -> bool {
        self.is_pos() || self.is_neg()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational64) -> Self {
        r.to_f64().expect("finite rational")
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pivot_tolerance() -> Self {
        1e-9
    }
    fn feasibility_tolerance() -> Self {
        1e-7
    }
    fn is_integral(&self) -> bool {
        (self - self.round()).abs() <= 1e-6
    }
    fn floor(&self) -> Self {
        // values within tolerance of an integer branch as that integer
        if Scalar::is_integral(self) {
            self.round()
        } else {
            f64::floor(*self)
        }
    }
    fn ceil(&self) -> Self {
        if Scalar::is_integral(self) {
            self.round()
        } else {
            f64::ceil(*self)
        }
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational64) -> Self {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn pivot_tolerance() -> Self {
        Zero::zero()
    }
    fn feasibility_tolerance() -> Self {
        Zero::zero()
    }
    fn is_integral(&self) -> bool {
        BigRational::is_integer(self)
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coefficients: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SimplexResult<T> {
    pub status: SimplexStatus,
    pub values: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland.
    pub degenerate_run: usize,
    pub always_bland: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iterations: 100_000, degenerate_run: 50, always_bland: false }
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.rows[r][q].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[q].clone();
            if !f.is_nonzero() {
                row[q] = T::zero();
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if pv.is_nonzero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            row[q] = T::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = q;
    }

    /// Runs simplex iterations on the current objective row. Columns with
    /// `allowed[j] == false` never enter.
    fn optimize(&mut self, allowed: &[bool], opts: &SimplexOptions, iterations: &mut usize) -> SimplexStatus {
        let mut degenerate = 0usize;
        loop {
            if *iterations >= opts.max_iterations {
                return SimplexStatus::IterationLimit;
            }
            let bland = opts.always_bland || degenerate >= opts.degenerate_run;
            let mut entering: Option<usize> = None;
            for (j, &ok) in allowed.iter().enumerate().take(self.width) {
                if !ok || !self.obj[j].is_neg() {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(e) if !bland && self.obj[j] < self.obj[e] => entering = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(q) = entering else {
                return SimplexStatus::Optimal;
            };
            let mut leaving: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                let better = match &leaving {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leaving else {
                return SimplexStatus::Unbounded;
            };
            if ratio.is_nonzero() {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            self.pivot(r, q);
            *iterations += 1;
        }
    }
}

/// Minimizes `objective·x` subject to `constraints` and `x ≥ 0`.
pub fn minimize<T: Scalar>(
    num_vars: usize,
    objective: &[T],
    constraints: &[Constraint<T>],
    opts: &SimplexOptions,
) -> SimplexResult<T> {
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|c| c.sense != Sense::Eq).count();
    let n_art = constraints.iter().filter(|c| c.sense != Sense::Le || c.rhs.is_neg()).count();
    let width = num_vars + n_slack + n_art;
    let art_start = num_vars + n_slack;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (num_vars, art_start);
    for c in constraints {
        let mut row = vec![T::zero(); width + 1];
        for (j, a) in &c.coefficients {
            row[*j] = row[*j].clone() + a.clone();
        }
        row[width] = c.rhs.clone();
        match c.sense {
            Sense::Le => row[next_slack] = T::one(),
            Sense::Ge => row[next_slack] = -T::one(),
            Sense::Eq => {}
        }
        let slack = (c.sense != Sense::Eq).then(|| {
            next_slack += 1;
            next_slack - 1
        });
        if row[width].is_neg() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        // a slack with coefficient +1 after normalization can start basic
        match slack {
            Some(s) if row[s].is_pos() => basis.push(s),
            _ => {
                row[next_art] = T::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    let used_art = next_art;

    let mut tab = Tableau { rows, obj: vec![T::zero(); width + 1], basis, width };
    let mut iterations = 0;

    // phase one: minimize the sum of artificials
    for (i, &b) in tab.basis.iter().enumerate() {
        if b >= art_start {
            for (o, v) in tab.obj.iter_mut().zip(&tab.rows[i]) {
                *o = o.clone() - v.clone();
            }
        }
    }
    for j in art_start..used_art {
        tab.obj[j] = T::zero();
    }
    let mut allowed = vec![true; width];
    for a in allowed.iter_mut().skip(used_art) {
        *a = false;
    }
    let status = tab.optimize(&allowed, opts, &mut iterations);
    if status == SimplexStatus::IterationLimit {
        return SimplexResult { status, values: vec![T::zero(); num_vars], objective: T::zero(), iterations };
    }
    let infeasibility = -tab.obj[width].clone();
    if infeasibility > T::feasibility_tolerance() {
        return SimplexResult {
            status: SimplexStatus::Infeasible,
            values: vec![T::zero(); num_vars],
            objective: T::zero(),
            iterations,
        };
    }

    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= art_start {
            match (0..art_start).find(|&j| tab.rows[i][j].is_nonzero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.rows.swap_remove(i);
                    tab.basis.swap_remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    for a in allowed.iter_mut().skip(art_start) {
        *a = false;
    }

    // phase two
    tab.obj = vec![T::zero(); width + 1];
    for (j, c) in objective.iter().enumerate() {
        tab.obj[j] = c.clone();
    }
    for i in 0..tab.rows.len() {
        let b = tab.basis[i];
        let cb = tab.obj[b].clone();
        if cb.is_nonzero() {
            for (o, v) in tab.obj.iter_mut().zip(&tab.rows[i]) {
                *o = o.clone() - cb.clone() * v.clone();
            }
        }
        tab.obj[b] = T::zero();
    }
    let status = tab.optimize(&allowed, opts, &mut iterations);

    let mut values = vec![T::zero(); num_vars];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < num_vars {
            values[b] = tab.rhs(i).clone();
        }
    }
    let objective_value = objective.iter().zip(&values).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    SimplexResult { status, values, objective: objective_value, iterations }
}

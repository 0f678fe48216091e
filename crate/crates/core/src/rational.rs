//! Exact rational helpers shared by the geometric modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
        None => {
            let num: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(num))
        }
    }
}

/// Always `num/den`, even for integers, so the output format is uniform.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn to_f64(value: &Rational) -> f64 {
    let num: f64 = value.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = value.denom().to_string().parse().unwrap_or(f64::NAN);
    num / den
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn determinant(mut rows: Vec<Vec<Rational>>) -> Rational {
    let size = rows.len();
    let mut det = Rational::one();
    for col in 0..size {
        let Some(pivot) = (col..size).find(|&r| !rows[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let pivot_value = rows[col][col].clone();
        det *= &pivot_value;
        for r in col + 1..size {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &pivot_value;
            let (upper, lower) = rows.split_at_mut(r);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= &factor * p;
            }
        }
    }
    det
}

/// Solves `a x = b` exactly. Returns `None` when the system is inconsistent
/// or its solution is not unique.
pub fn solve_unique(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, row);
        b.swap(pivot, row);
        let inv = a[row][col].recip();
        for x in &mut a[row][col..] {
            *x *= &inv;
        }
        b[row] *= &inv;
        let pivot_row = a[row].clone();
        for r in 0..rows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * p;
            }
            let delta = &factor * &b[row];
            b[r] -= delta;
        }
        row += 1;
    }
    if b[row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some(b.into_iter().take(cols).collect())
}

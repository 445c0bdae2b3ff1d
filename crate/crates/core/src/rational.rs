//! Exact rationals for the symbolic order engine.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-1"` or `"3/2"`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let bad = || Error::InvalidFormula(format!("malformed rational literal `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n: BigInt = num.trim().parse().map_err(|_| bad())?;
    let d: BigInt = den.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Canonical text: integers without a denominator, otherwise `n/d` with
/// positive denominator.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn midpoint(a: &Rat, b: &Rat) -> Rat {
    (a + b) / int(2)
}

/// `count` points strictly inside every gap of the sorted list `anchors`
/// (including the two unbounded ends), together with the anchors
/// themselves, in increasing order.
///
/// Any tuple of at most `count` new rationals realizes, relative to the
/// anchors, some order type that is also realized inside this grid.
pub fn gap_grid(anchors: &[Rat], count: usize) -> Vec<Rat> {
    let mut sorted: Vec<Rat> = anchors.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    if sorted.is_empty() {
        for t in 0..count {
            out.push(int(t as i64));
        }
        return out;
    }
    let first = sorted[0].clone();
    for t in (1..=count).rev() {
        out.push(&first - int(t as i64));
    }
    for (i, a) in sorted.iter().enumerate() {
        out.push(a.clone());
        if let Some(b) = sorted.get(i + 1) {
            let width = b - a;
            for t in 1..=count {
                out.push(a + &width * ratio(t as i64, count as i64 + 1));
            }
        }
    }
    let last = sorted[sorted.len() - 1].clone();
    for t in 1..=count {
        out.push(&last + int(t as i64));
    }
    out
}

pub fn abs_diff(a: &Rat, b: &Rat) -> Rat {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rat("-4/2").unwrap(), int(-2));
        assert_eq!(format_rat(&ratio(6, 4)), "3/2");
        assert_eq!(format_rat(&int(-7)), "-7");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a").is_err());
    }

    #[test]
    fn grid_covers_every_gap() {
        let g = gap_grid(&[int(0), int(1)], 2);
        let shown: Vec<String> = g.iter().map(format_rat).collect();
        assert_eq!(shown, ["-2", "-1", "0", "1/3", "2/3", "1", "2", "3"]);
        assert_eq!(gap_grid(&[], 3), vec![int(0), int(1), int(2)]);
    }
}

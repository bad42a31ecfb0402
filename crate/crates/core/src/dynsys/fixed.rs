//! Fixed-point coordinates on the circle ℝ/ℤ.
//!
//! A circle coordinate is a `u128` holding the fraction `x · 2^128`. Addition
//! modulo 1 is wrapping addition, so rotation orbits are exact: every endpoint
//! produced by the region algebra is a translate of an input endpoint by an
//! integer multiple of the stored rotation number, with no rounding anywhere.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Number of fractional bits in a circle coordinate.
pub const FRACTION_BITS: u32 = 128;

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

/// Converts a fixed-point coordinate to the nearest double.
pub fn to_f64(x: u128) -> f64 {
    x as f64 / TWO_POW_128
}

/// Converts a double in `[0, 1)` (reduced mod 1 otherwise) to fixed point.
pub fn from_f64(x: f64) -> u128 {
    let r = x.rem_euclid(1.0);
    let scaled = r * TWO_POW_128;
    if scaled >= TWO_POW_128 {
        0
    } else {
        scaled as u128
    }
}

/// Signed length of a step of `units` in `[0,1)`-units, as a double.
pub fn units_to_f64(units: u128) -> f64 {
    to_f64(units)
}

/// Circular distance between two coordinates, in fixed-point units.
pub fn circ_dist(a: u128, b: u128) -> u128 {
    let d = a.wrapping_sub(b);
    d.min(b.wrapping_sub(a))
}

fn round_ratio(num: &BigUint, den: &BigUint) -> BigUint {
    let scaled = num << FRACTION_BITS;
    (scaled + (den >> 1u32)) / den
}

fn biguint_to_fraction(v: BigUint) -> u128 {
    // reduce mod 2^128 so that a round-up to 1.0 wraps to 0
    let mask = (BigUint::one() << FRACTION_BITS) - BigUint::one();
    (v & mask).to_u128().unwrap_or(0)
}

/// Parses a decimal literal (`"0.5"`, `"1"`, `".25"`, `"-0.1"`) and reduces it mod 1.
pub fn parse_decimal(s: &str) -> Result<u128> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let valid = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !valid(int_part) || !valid(frac_part) {
        return Err(Error::Config(format!("not a decimal number: {s:?}")));
    }
    let frac = if frac_part.is_empty() {
        0
    } else {
        let num: BigUint = frac_part.parse().expect("digits");
        let den = BigUint::from(10u32).pow(frac_part.len() as u32);
        biguint_to_fraction(round_ratio(&num, &den))
    };
    Ok(if neg { 0u128.wrapping_sub(frac) } else { frac })
}

/// Fractional part of the continued fraction `[a0; a1, a2, ...]`.
pub fn from_continued_fraction(terms: &[u64]) -> Result<u128> {
    if terms.is_empty() {
        return Err(Error::Config("continued fraction needs at least one term".into()));
    }
    if terms[1..].contains(&0) {
        return Err(Error::Config("continued fraction terms after the first must be positive".into()));
    }
    // evaluate from the tail: value = a0 + 1/(a1 + 1/(...))
    let mut num = BigUint::from(*terms.last().unwrap());
    let mut den = BigUint::one();
    for &a in terms[..terms.len() - 1].iter().rev() {
        let next_num = BigUint::from(a) * &num + &den;
        den = num;
        num = next_num;
    }
    if den.is_zero() {
        return Err(Error::Config("degenerate continued fraction".into()));
    }
    let rem = &num % &den;
    Ok(biguint_to_fraction(round_ratio(&rem, &den)))
}

/// Rounds a coordinate to the nearest multiple of `2^-bits`.
pub fn round_to_bits(x: u128, bits: u32) -> u128 {
    if bits >= FRACTION_BITS {
        return x;
    }
    let shift = FRACTION_BITS - bits;
    let half = 1u128 << (shift - 1);
    (x.wrapping_add(half) >> shift) << shift
}

/// Exact decimal expansion of a coordinate (a dyadic rational has a finite one).
pub fn to_decimal(x: u128) -> String {
    if x == 0 {
        return "0".to_string();
    }
    let mut hi = (x >> 64) as u64;
    let mut lo = x as u64;
    let mut digits = String::from("0.");
    while hi != 0 || lo != 0 {
        let l = lo as u128 * 10;
        let carry = l >> 64;
        lo = l as u64;
        let h = hi as u128 * 10 + carry;
        let digit = (h >> 64) as u8;
        hi = h as u64;
        digits.push((b'0' + digit) as char);
    }
    digits
}

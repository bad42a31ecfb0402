//! Clopen subsets of a mixed-radix odometer as unions of digit-prefix cylinders.
//!
//! Digit `d_0` is least significant: the prefix `(d_0, ..., d_{L-1})` is the
//! residue `d_0 + m_0 d_1 + m_0 m_1 d_2 + ...` modulo `M_L = m_0 ... m_{L-1}`,
//! and the odometer acts on level-`L` cylinders as `c ↦ c + 1 (mod M_L)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A union of cylinders, all expressed at one common prefix length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSet {
    level: usize,
    residues: Vec<u64>,
}

/// Serializable cylinder: the fixed leading digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderDescription {
    pub prefix: Vec<u32>,
}

/// Product of the first `level` radices.
pub fn modulus(radices: &[u32], level: usize) -> Result<u64> {
    if level > radices.len() {
        return Err(Error::DepthExhausted { depth: radices.len() });
    }
    radices[..level].iter().try_fold(1u64, |acc, &m| {
        acc.checked_mul(m as u64).ok_or(Error::DepthExhausted { depth: level })
    })
}

/// Mixed-radix value of the first `level` digits.
pub fn residue(radices: &[u32], digits: &[u32], level: usize) -> u64 {
    let mut value = 0u64;
    let mut place = 1u64;
    for i in 0..level {
        value += digits[i] as u64 * place;
        place *= radices[i] as u64;
    }
    value
}

fn digits_of(radices: &[u32], mut c: u64, level: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(level);
    for &m in &radices[..level] {
        out.push((c % m as u64) as u32);
        c /= m as u64;
    }
    out
}

impl CylinderSet {
    pub fn empty() -> Self {
        CylinderSet { level: 0, residues: Vec::new() }
    }

    pub fn full() -> Self {
        CylinderSet { level: 0, residues: vec![0] }
    }

    /// The cylinder of all points whose leading digits equal `prefix`.
    pub fn cylinder(radices: &[u32], prefix: &[u32]) -> Result<Self> {
        if prefix.len() > radices.len() {
            return Err(Error::DepthExhausted { depth: radices.len() });
        }
        for (i, (&d, &m)) in prefix.iter().zip(radices).enumerate() {
            if d >= m {
                return Err(Error::Config(format!("digit {d} at position {i} exceeds radix {m}")));
            }
        }
        modulus(radices, prefix.len())?;
        let c = residue(radices, prefix, prefix.len());
        Ok(CylinderSet { level: prefix.len(), residues: vec![c] }.coarsened(radices))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.level == 0 && !self.residues.is_empty()
    }

    fn refined(&self, radices: &[u32], level: usize) -> Result<Vec<u64>> {
        if level == self.level {
            return Ok(self.residues.clone());
        }
        let base = modulus(radices, self.level)?;
        let target = modulus(radices, level)?;
        let copies = target / base;
        let mut out = Vec::with_capacity(self.residues.len() * copies as usize);
        for j in 0..copies {
            for &c in &self.residues {
                out.push(c + j * base);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    fn coarsened(mut self, radices: &[u32]) -> Self {
        while self.level > 0 {
            let parent_mod = modulus(radices, self.level - 1).expect("smaller level fits");
            let fan = radices[self.level - 1] as usize;
            let mut parents: Vec<u64> = self.residues.iter().map(|c| c % parent_mod).collect();
            parents.sort_unstable();
            let mut kept = Vec::new();
            let mut i = 0;
            let mut complete = true;
            while i < parents.len() {
                let mut j = i;
                while j < parents.len() && parents[j] == parents[i] {
                    j += 1;
                }
                if j - i != fan {
                    complete = false;
                    break;
                }
                kept.push(parents[i]);
                i = j;
            }
            if !complete {
                break;
            }
            self.level -= 1;
            self.residues = kept;
        }
        if self.residues.is_empty() {
            self.level = 0;
        }
        self
    }

    fn combine(&self, other: &Self, radices: &[u32], keep: impl Fn(bool, bool) -> bool) -> Result<Self> {
        let level = self.level.max(other.level);
        let a = self.refined(radices, level)?;
        let b = other.refined(radices, level)?;
        let total = modulus(radices, level)?;
        let mut out = Vec::new();
        // both sorted; walk the union of candidates
        let mut candidates: Vec<u64> = a.iter().chain(b.iter()).copied().collect();
        candidates.sort_unstable();
        candidates.dedup();
        if keep(false, false) {
            return Err(Error::Precondition("complement-type combination needs a universe".into()));
        }
        for c in candidates {
            if keep(a.binary_search(&c).is_ok(), b.binary_search(&c).is_ok()) {
                out.push(c);
            }
        }
        debug_assert!(out.iter().all(|&c| c < total));
        Ok(CylinderSet { level, residues: out }.coarsened(radices))
    }

    pub fn union(&self, other: &Self, radices: &[u32]) -> Result<Self> {
        self.combine(other, radices, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self, radices: &[u32]) -> Result<Self> {
        self.combine(other, radices, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self, radices: &[u32]) -> Result<Self> {
        self.combine(other, radices, |a, b| a && !b)
    }

    pub fn complement(&self, radices: &[u32]) -> Result<Self> {
        CylinderSet::full().difference(self, radices)
    }

    /// Image under the `n`-th power of the odometer.
    pub fn shift(&self, n: i64, radices: &[u32]) -> Result<Self> {
        let total = modulus(radices, self.level)? as i128;
        let step = (n as i128).rem_euclid(total);
        let mut out: Vec<u64> = self
            .residues
            .iter()
            .map(|&c| ((c as i128 + step) % total) as u64)
            .collect();
        out.sort_unstable();
        Ok(CylinderSet { level: self.level, residues: out })
    }

    pub fn contains(&self, radices: &[u32], digits: &[u32]) -> bool {
        if self.level > digits.len() {
            return false;
        }
        let c = residue(radices, digits, self.level);
        self.residues.binary_search(&c).is_ok()
    }

    pub fn measure(&self, radices: &[u32]) -> BigRational {
        let total = modulus(radices, self.level).expect("level validated at construction");
        BigRational::new(BigInt::from(self.residues.len()), BigInt::from(total))
    }

    /// Residues at the stored level, for sampling.
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn prefixes(&self, radices: &[u32]) -> Vec<Vec<u32>> {
        self.residues.iter().map(|&c| digits_of(radices, c, self.level)).collect()
    }

    pub fn describe(&self, radices: &[u32]) -> Vec<CylinderDescription> {
        self.prefixes(radices).into_iter().map(|prefix| CylinderDescription { prefix }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: [u32; 6] = [2, 3, 2, 3, 2, 3];

    #[test]
    fn shift_moves_first_digit() {
        let y = CylinderSet::cylinder(&R, &[0]).unwrap();
        let img = y.shift(1, &R).unwrap();
        assert_eq!(img, CylinderSet::cylinder(&R, &[1]).unwrap());
        assert_eq!(y.shift(2, &R).unwrap(), y);
    }

    #[test]
    fn complete_sibling_groups_coarsen() {
        let a = CylinderSet::cylinder(&R, &[0, 0]).unwrap();
        let b = CylinderSet::cylinder(&R, &[0, 1]).unwrap();
        let c = CylinderSet::cylinder(&R, &[0, 2]).unwrap();
        let u = a.union(&b, &R).unwrap().union(&c, &R).unwrap();
        assert_eq!(u, CylinderSet::cylinder(&R, &[0]).unwrap());
        let all = u.union(&CylinderSet::cylinder(&R, &[1]).unwrap(), &R).unwrap();
        assert!(all.is_full());
    }

    #[test]
    fn measure_is_exact() {
        let a = CylinderSet::cylinder(&R, &[1, 2]).unwrap();
        assert_eq!(a.measure(&R), BigRational::new(1.into(), 6.into()));
        let d = CylinderSet::full().difference(&a, &R).unwrap();
        assert_eq!(d.measure(&R), BigRational::new(5.into(), 6.into()));
    }

    #[test]
    fn bad_digit_rejected() {
        assert!(CylinderSet::cylinder(&R, &[2]).is_err());
    }
}

//! Restriction regions for the localized Euler characteristic.
//!
//! A simplex is attributed to the region containing its left-most point
//! (lexicographic minimum of its vertex coordinates). Boxes are half-open,
//! `lo <= x < hi` per coordinate, so that a family of boxes tiling space
//! partitions simplices without double counting.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegionSpec {
    AllSpace,
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl RegionSpec {
    /// Axis-aligned box `[lo, hi)`.
    pub fn bounded_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidParameter(
                "region box lo/hi dimensions differ".into(),
            ));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParameter(
                "region box requires lo < hi componentwise".into(),
            ));
        }
        Ok(RegionSpec::Box { lo, hi })
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            RegionSpec::AllSpace => Ok(()),
            RegionSpec::Box { lo, hi } => {
                if lo.len() != dim || hi.len() != dim {
                    return Err(Error::InvalidParameter(format!(
                        "region box is {}-dimensional, expected {dim}",
                        lo.len()
                    )));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::InvalidParameter(
                        "region box requires lo < hi componentwise".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Half-open membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            RegionSpec::AllSpace => true,
            RegionSpec::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v < *b),
        }
    }

    pub fn is_all_space(&self) -> bool {
        matches!(self, RegionSpec::AllSpace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_membership() {
        let r = RegionSpec::bounded_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(r.contains(&[0.0, 0.5]));
        assert!(!r.contains(&[1.0, 0.5]));
        assert!(!r.contains(&[0.5, -0.1]));
    }

    #[test]
    fn box_requires_lo_below_hi() {
        assert!(RegionSpec::bounded_box(vec![0.0], vec![0.0]).is_err());
        assert!(RegionSpec::bounded_box(vec![1.0], vec![0.0]).is_err());
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use super::AnalyticSet;
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point};

/// The three one-parameter families that deform the square `[-1,1]^2`.
///
/// * `A1(t)`: the square with the centred open square `(-t,t)^2` removed.
/// * `A2(t)`: the square with a triangular notch cut from the right side;
///   the notch `{|y| < (x-1)/t + 1}` has its apex at `(1-t, 0)`.
/// * `A3(t)`: four unit squares centred at `(±(t+1/2), ±(t+1/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A1,
    A2,
    A3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::A1, Family::A2, Family::A3];

    /// Valid range of `t`.
    pub fn range(self) -> (f64, f64) {
        match self {
            Family::A1 => (0.0, 0.9),
            Family::A2 => (0.0, 2.0),
            Family::A3 => (0.0, 1.0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(Family::A1),
            "A2" => Ok(Family::A2),
            "A3" => Ok(Family::A3),
            _ => Err(Error::InvalidConfig(format!("unknown family {s:?} (expected A1, A2 or A3)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParam {
    pub family: Family,
    pub t: f64,
}

impl FamilyParam {
    pub fn new(family: Family, t: f64) -> Result<Self> {
        let (min, max) = family.range();
        if !(t >= min && t <= max) {
            return Err(Error::ParamOutOfRange {
                name: "t",
                value: t,
                min,
                max,
            });
        }
        Ok(FamilyParam { family, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySet {
    param: FamilyParam,
}

impl FamilySet {
    pub fn new(param: FamilyParam) -> Result<Self> {
        let param = FamilyParam::new(param.family, param.t)?;
        Ok(FamilySet { param })
    }

    pub fn of(family: Family, t: f64) -> Result<Self> {
        Self::new(FamilyParam { family, t })
    }

    pub fn param(&self) -> FamilyParam {
        self.param
    }
}

impl AnalyticSet for FamilySet {
    fn contains(&self, p: Point) -> bool {
        let t = self.param.t;
        match self.param.family {
            Family::A1 => p.x.abs() <= 1.0 && p.y.abs() <= 1.0 && !(p.x.abs() < t && p.y.abs() < t),
            Family::A2 => {
                let in_square = p.x.abs() <= 1.0 && p.y.abs() <= 1.0;
                in_square && (t == 0.0 || p.y.abs() >= (p.x - 1.0) / t + 1.0)
            }
            Family::A3 => {
                let c = t + 0.5;
                (p.x.abs() - c).abs() <= 0.5 && (p.y.abs() - c).abs() <= 0.5
            }
        }
    }

    fn bbox(&self) -> BBox {
        let h = match self.param.family {
            Family::A1 | Family::A2 => 1.0,
            Family::A3 => self.param.t + 1.0,
        };
        BBox::new(Point::new(-h, -h), Point::new(h, h))
    }

    fn area(&self) -> Option<f64> {
        let t = self.param.t;
        Some(match self.param.family {
            Family::A1 => 4.0 - 4.0 * t * t,
            Family::A2 => 4.0 - t,
            Family::A3 => 4.0,
        })
    }

    fn label(&self) -> String {
        format!("{}({})", self.param.family, self.param.t)
    }
}

/// Closed-form `D` for a family member.
pub fn analytic_d(p: FamilyParam) -> Result<f64> {
    let p = FamilyParam::new(p.family, p.t)?;
    let t = p.t;
    Ok(match p.family {
        Family::A1 => t / 8f64.sqrt(),
        Family::A2 => t / (8.0 * (1.0 + t * t)).sqrt(),
        Family::A3 => t / (2.0 * (1.0 + t)),
    })
}

/// Closed-form `M` for a family member.
pub fn analytic_m(p: FamilyParam) -> Result<f64> {
    let p = FamilyParam::new(p.family, p.t)?;
    let t = p.t;
    Ok(match p.family {
        Family::A1 => t * t,
        Family::A2 => t / 4.0,
        Family::A3 => 1.0 - 1.0 / ((1.0 + t) * (1.0 + t)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_families_start_at_the_square() {
        for f in Family::ALL {
            let s = FamilySet::of(f, 0.0).unwrap();
            assert!(s.contains(Point::new(0.0, 0.0)));
            assert!(s.contains(Point::new(1.0, -1.0)));
            assert_eq!(s.area(), Some(4.0));
            let p = FamilyParam::new(f, 0.0).unwrap();
            assert_eq!(analytic_d(p).unwrap(), 0.0);
            assert_eq!(analytic_m(p).unwrap(), 0.0);
        }
    }

    #[test]
    fn a1_hole() {
        let s = FamilySet::of(Family::A1, 0.5).unwrap();
        assert!(!s.contains(Point::new(0.0, 0.0)));
        assert!(s.contains(Point::new(0.75, 0.75)));
        // the hole is open, its edge stays in the set
        assert!(s.contains(Point::new(0.5, 0.0)));
    }

    #[test]
    fn a2_notch() {
        let s = FamilySet::of(Family::A2, 1.0).unwrap();
        assert!(!s.contains(Point::new(0.5, 0.0)));
        assert!(s.contains(Point::new(-0.5, 0.0)));
        assert!(s.contains(Point::new(0.0, 0.0)));
        assert!(s.contains(Point::new(0.9, 0.95)));
    }

    #[test]
    fn a3_squares() {
        let s = FamilySet::of(Family::A3, 0.5).unwrap();
        assert!(!s.contains(Point::new(0.0, 0.0)));
        assert!(s.contains(Point::new(1.0, -1.0)));
        assert!(s.contains(Point::new(0.5, 0.5)));
        assert!(!s.contains(Point::new(0.49, 0.8)));
        assert_eq!(s.bbox().max, Point::new(1.5, 1.5));
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            FamilySet::of(Family::A1, 0.95),
            Err(Error::ParamOutOfRange { name: "t", .. })
        ));
        assert!(FamilySet::of(Family::A2, -0.1).is_err());
        assert!(analytic_d(FamilyParam { family: Family::A3, t: 1.5 }).is_err());
        assert!(FamilySet::of(Family::A1, f64::NAN).is_err());
    }
}

//! The named one-parameter families: a representative polytope, the
//! hypergeometric data of its vertex pencil, the printed coefficient
//! convention, the Picard–Fuchs equation and the ambient model used for counts.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{QPoly, RatFunc};
use crate::hypergeometric::{Argument, ClausenPair, HypergeometricData};
use crate::lattice_polytope::LatticePolytope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    EllipticP1xP1,
    Quartic,
    Sextic,
    GroupI,
    GroupII,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown family `{0}` (expected elliptic, quartic, sextic, group-i or group-ii)")]
pub struct UnknownFamily(pub String);

/// Where brute-force counts of a family member live.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CountModel {
    /// Variables `(x0, x1, y0, y1)`.
    Biprojective,
    Projective,
    WeightedProjective(Vec<u64>),
}

/// The family as usually written: the product monomial carries
/// `psi_coefficient * psi`, i.e. the vertex-pencil parameter is
/// `psi_coefficient * psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedConvention {
    pub psi_coefficient: BigRational,
    pub hypergeometric: HypergeometricData,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn rf(num: &[i64], den: &[i64]) -> RatFunc {
    RatFunc::new(QPoly::from_ints(num), QPoly::from_ints(den))
}

fn poly(rows: &[&[i64]]) -> LatticePolytope {
    LatticePolytope::from_rows(rows).expect("built-in representative is a valid polytope")
}

const HALF: (i64, i64) = (1, 2);
const ONE: (i64, i64) = (1, 1);

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] = [
        FamilyTag::EllipticP1xP1,
        FamilyTag::Quartic,
        FamilyTag::Sextic,
        FamilyTag::GroupI,
        FamilyTag::GroupII,
    ];

    pub const K3: [FamilyTag; 4] = [FamilyTag::Quartic, FamilyTag::Sextic, FamilyTag::GroupI, FamilyTag::GroupII];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::EllipticP1xP1 => "elliptic",
            FamilyTag::Quartic => "quartic",
            FamilyTag::Sextic => "sextic",
            FamilyTag::GroupI => "group-i",
            FamilyTag::GroupII => "group-ii",
        }
    }

    /// Polytope whose vertex pencil is the family.
    pub fn representative(self) -> LatticePolytope {
        match self {
            FamilyTag::EllipticP1xP1 => poly(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]),
            FamilyTag::Quartic => poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]]),
            FamilyTag::Sextic => poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-3, -1, -1]]),
            FamilyTag::GroupI => poly(&[&[1, 0, 0], &[0, 1, 0], &[-1, -1, 0], &[0, 0, 1], &[-1, 0, -1]]).with_id(3),
            FamilyTag::GroupII => poly(&[&[1, 0, 0], &[0, 1, 0], &[-2, -1, 0], &[0, 0, 1], &[-2, 0, -1]]).with_id(10),
        }
    }

    /// Hypergeometric data in the vertex-pencil convention (`+psi`).
    pub fn hypergeometric(self) -> HypergeometricData {
        match self {
            FamilyTag::EllipticP1xP1 => {
                HypergeometricData::from_pairs(&[HALF, HALF], &[ONE], Argument::from_ints(1, 16, 2))
            }
            FamilyTag::Quartic | FamilyTag::GroupII => {
                HypergeometricData::from_pairs(&[HALF, (1, 4), (3, 4)], &[ONE, ONE], Argument::from_ints(256, 1, -4))
            }
            FamilyTag::Sextic => {
                HypergeometricData::from_pairs(&[HALF, (1, 6), (5, 6)], &[ONE, ONE], Argument::from_ints(1728, 1, -6))
            }
            FamilyTag::GroupI => {
                HypergeometricData::from_pairs(&[HALF, (1, 3), (2, 3)], &[ONE, ONE], Argument::from_ints(-108, 1, -3))
            }
        }
    }

    pub fn printed(self) -> PrintedConvention {
        let vertex = self.hypergeometric();
        match self {
            FamilyTag::Quartic => PrintedConvention {
                psi_coefficient: q(-4),
                hypergeometric: vertex.with_argument(Argument::from_ints(1, 1, -4)),
            },
            FamilyTag::Sextic => PrintedConvention {
                psi_coefficient: q(-1),
                hypergeometric: vertex,
            },
            _ => PrintedConvention {
                psi_coefficient: q(1),
                hypergeometric: vertex,
            },
        }
    }

    /// Coefficients `c_0 .. c_{n-1}` of `F^(n) + sum_j c_j F^(j) = 0` in `psi`.
    ///
    /// The quartic uses the Group II operator: both vertex pencils have the
    /// same period coefficients `(4m)!/m!^4`.
    pub fn pf_equation(self) -> Vec<RatFunc> {
        match self {
            FamilyTag::EllipticP1xP1 => vec![rf(&[0, 1], &[0, -16, 0, 1]), rf(&[-16, 0, 3], &[0, -16, 0, 1])],
            FamilyTag::Sextic => vec![
                rf(&[0, 0, 0, 1], &[-1728, 0, 0, 0, 0, 0, 1]),
                rf(&[-5184, 0, 0, 0, 0, 0, 7], &[0, 0, -1728, 0, 0, 0, 0, 0, 1]),
                rf(&[5184, 0, 0, 0, 0, 0, 6], &[0, -1728, 0, 0, 0, 0, 0, 1]),
            ],
            FamilyTag::GroupI => vec![
                rf(&[0, 1], &[0, 108, 0, 0, 1]),
                rf(&[0, 0, 7], &[0, 108, 0, 0, 1]),
                rf(&[162, 0, 0, 6], &[0, 108, 0, 0, 1]),
            ],
            FamilyTag::Quartic | FamilyTag::GroupII => vec![
                rf(&[0, 1], &[-256, 0, 0, 0, 1]),
                rf(&[0, 0, 7], &[-256, 0, 0, 0, 1]),
                rf(&[0, 0, 0, 6], &[-256, 0, 0, 0, 1]),
            ],
        }
    }

    /// `(k, c)`: the singular locus of the Picard–Fuchs equation is `psi^k = c`.
    pub fn substitution(self) -> (usize, BigRational) {
        match self {
            FamilyTag::EllipticP1xP1 => (2, q(16)),
            FamilyTag::Sextic => (6, q(1728)),
            FamilyTag::GroupI => (3, q(-108)),
            FamilyTag::Quartic | FamilyTag::GroupII => (4, q(256)),
        }
    }

    pub fn count_model(self) -> Option<CountModel> {
        match self {
            FamilyTag::EllipticP1xP1 => Some(CountModel::Biprojective),
            FamilyTag::Quartic => Some(CountModel::Projective),
            FamilyTag::Sextic => Some(CountModel::WeightedProjective(vec![3, 1, 1, 1])),
            FamilyTag::GroupI | FamilyTag::GroupII => None,
        }
    }

    /// Dimension of the family's fibres.
    pub fn fibre_dimension(self) -> usize {
        match self {
            FamilyTag::EllipticP1xP1 => 1,
            _ => 2,
        }
    }

    /// `(-1)^dim`: the sign in `N = 1 + sign * HW (mod p)`.
    pub fn count_sign(self) -> i64 {
        if self.fibre_dimension() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The `2F1` whose square is the family's `3F2`, if there is one.
    pub fn clausen_pair(self) -> Option<ClausenPair> {
        let (a, b) = match self {
            FamilyTag::EllipticP1xP1 => return None,
            FamilyTag::Quartic | FamilyTag::GroupII => ((1, 8), (3, 8)),
            FamilyTag::Sextic => ((1, 12), (5, 12)),
            FamilyTag::GroupI => ((1, 6), (1, 3)),
        };
        let r = |(n, d): (i64, i64)| BigRational::new(n.into(), d.into());
        Some(ClausenPair::from_2f1(r(a), r(b), self.hypergeometric().argument).expect("valid Clausen parameters"))
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for FamilyTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "elliptic" | "ellipticp1xp1" | "p1xp1" => Ok(FamilyTag::EllipticP1xP1),
            "quartic" => Ok(FamilyTag::Quartic),
            "sextic" => Ok(FamilyTag::Sextic),
            "groupi" | "group1" => Ok(FamilyTag::GroupI),
            "groupii" | "group2" => Ok(FamilyTag::GroupII),
            _ => Err(UnknownFamily(s.to_string())),
        }
    }
}

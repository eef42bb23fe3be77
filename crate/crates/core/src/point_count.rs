//! Brute-force point counts over F_p on the torus, projective space, weighted
//! projective space and P^1 x P^1, and the count/truncation congruences.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{format_rational, Prime};
use crate::family::{CountModel, FamilyTag};
use crate::hypergeometric::{truncated_pfq, HypergeometricError};
use crate::pencil::{build_vertex_pencil, homogeneous_form, is_smooth_printed, LaurentPolynomial, PencilError, VariableSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("coefficient {0} has a denominator divisible by p")]
    BadDenominator(String),
    #[error("polynomial is not homogeneous")]
    NonHomogeneous,
    #[error("polynomial is not weighted homogeneous for weights {0:?}")]
    NonWeightedHomogeneous(Vec<u64>),
    #[error("polynomial is not bihomogeneous in (x0, x1), (y0, y1)")]
    NonBihomogeneous,
    #[error("orbit sum {sum} is not divisible by p - 1 = {modulus}")]
    NonIntegerOrbitSum { sum: u64, modulus: u64 },
    #[error("family {0} has no ambient model for point counts")]
    UncountableAmbient(FamilyTag),
    #[error("psi = {0} gives a singular member")]
    SingularMember(String),
    #[error("expected {expected} variables, found {found}")]
    WrongVariableCount { expected: usize, found: usize },
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Hypergeometric(#[from] HypergeometricError),
}

/// A polynomial over Q in `nvars` variables with combined, nonzero terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Vec<u32>, BigRational)>,
}

impl Polynomial {
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut combined: Vec<(Vec<u32>, BigRational)> = Vec::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            match combined.iter_mut().find(|(f, _)| *f == e) {
                Some((_, d)) => *d += c,
                None => combined.push((e, c)),
            }
        }
        combined.retain(|(_, c)| !c.is_zero());
        combined.sort_by(|a, b| b.0.cmp(&a.0));
        Polynomial { nvars, terms: combined }
    }

    pub fn from_ints(nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        Polynomial::new(
            nvars,
            terms.iter().map(|(e, c)| (e.to_vec(), BigRational::from_integer((*c).into()))),
        )
    }

    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common weighted degree of every term, if there is one.
    pub fn weighted_degree(&self, weights: &[u64]) -> Option<u64> {
        let mut degs = self
            .terms
            .iter()
            .map(|(e, _)| e.iter().zip(weights).map(|(&a, &w)| a as u64 * w).sum::<u64>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    fn reduced(&self, p: Prime) -> Result<ModPoly, CountError> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                p.reduce(c)
                    .map(|c| (e.clone(), c))
                    .ok_or_else(|| CountError::BadDenominator(format_rational(c)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ModPoly::new(p, self.nvars, terms))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{j}") } else { format!("x{j}^{k}") })
                .collect();
            let c = format_rational(c);
            match (vars.is_empty(), c.as_str()) {
                (true, _) => f.write_str(&c)?,
                (false, "1") => f.write_str(&vars.join("*"))?,
                (false, _) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// A polynomial reduced mod p with per-variable power tables.
struct ModPoly {
    p: Prime,
    nvars: usize,
    terms: Vec<(Vec<u32>, u64)>,
}

impl ModPoly {
    fn new(p: Prime, nvars: usize, terms: Vec<(Vec<u32>, u64)>) -> Self {
        ModPoly {
            p,
            nvars,
            terms: terms.into_iter().filter(|(_, c)| *c != 0).collect(),
        }
    }

    fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p;
        self.terms.iter().fold(0, |acc, (e, c)| {
            let v = e.iter().zip(x).fold(*c, |v, (&k, &xi)| if k == 0 { v } else { p.mul(v, p.pow(xi, k as u64)) });
            p.add(acc, v)
        })
    }

    /// Number of zeros in F_p^nvars.
    fn affine_zeros(&self) -> u64 {
        let q = self.p.get();
        if self.terms.is_empty() {
            return q.pow(self.nvars as u32);
        }
        let mut x = vec![0u64; self.nvars];
        let mut count = 0;
        loop {
            if self.eval(&x) == 0 {
                count += 1;
            }
            let mut i = self.nvars;
            loop {
                if i == 0 {
                    return count;
                }
                i -= 1;
                x[i] += 1;
                if x[i] < q {
                    break;
                }
                x[i] = 0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbientModel {
    Torus,
    Projective,
    WeightedProjective { weights: Vec<u64> },
    Biprojective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub model: AmbientModel,
    pub prime: Prime,
    #[serde(serialize_with = "ser_opt_rational")]
    pub psi: Option<BigRational>,
    pub count: u64,
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

/// `#{x in (F_p^*)^n : f(x) = 0}`.
pub fn count_torus(f: &LaurentPolynomial, p: Prime) -> Result<u64, CountError> {
    for (_, c) in f.terms() {
        if p.reduce(c).is_none() {
            return Err(CountError::BadDenominator(format_rational(c)));
        }
    }
    let n = f.nvars();
    let q = p.get();
    let mut x = vec![1u64; n];
    let mut count = 0;
    loop {
        if f.eval_mod(&x, p) == Some(0) {
            count += 1;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 1;
        }
    }
}

/// Points of the hypersurface `F = 0` in `P^(nvars - 1)(F_p)`.
pub fn count_projective(f: &Polynomial, p: Prime) -> Result<u64, CountError> {
    count_weighted_projective(f, &vec![1; f.nvars()], p).map_err(|e| match e {
        CountError::NonWeightedHomogeneous(_) => CountError::NonHomogeneous,
        other => other,
    })
}

/// Points of `F = 0` in the weighted projective space with the given weights:
/// `(A - 1)/(p - 1)` with `A` the number of affine zeros.
///
/// Each F_p-rational point of a weighted projective space (p not dividing the
/// weights) is the image of exactly `p - 1` nonzero rational vectors, so the
/// division is exact; a remainder means the model is wrong.
pub fn count_weighted_projective(f: &Polynomial, weights: &[u64], p: Prime) -> Result<u64, CountError> {
    if weights.len() != f.nvars() {
        return Err(CountError::WrongVariableCount {
            expected: f.nvars(),
            found: weights.len(),
        });
    }
    if !f.is_zero() && f.weighted_degree(weights).is_none() {
        return Err(CountError::NonWeightedHomogeneous(weights.to_vec()));
    }
    let m = f.reduced(p)?;
    let affine = m.affine_zeros();
    let origin = u64::from(m.eval(&vec![0; f.nvars()]) == 0);
    let sum = affine - origin;
    let modulus = p.get() - 1;
    if sum % modulus != 0 {
        return Err(CountError::NonIntegerOrbitSum { sum, modulus });
    }
    Ok(sum / modulus)
}

/// Points of `F(x0, x1, y0, y1) = 0` in `P^1 x P^1(F_p)`.
pub fn count_biprojective(f: &Polynomial, p: Prime) -> Result<u64, CountError> {
    if f.nvars() != 4 {
        return Err(CountError::WrongVariableCount {
            expected: 4,
            found: f.nvars(),
        });
    }
    if !f.is_zero() && (f.weighted_degree(&[1, 1, 0, 0]).is_none() || f.weighted_degree(&[0, 0, 1, 1]).is_none()) {
        return Err(CountError::NonBihomogeneous);
    }
    let m = f.reduced(p)?;
    let q = p.get();
    let line: Vec<[u64; 2]> = (0..q).map(|t| [1, t]).chain(std::iter::once([0, 1])).collect();
    let mut count = 0;
    for a in &line {
        for b in &line {
            if m.eval(&[a[0], a[1], b[0], b[1]]) == 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The member at printed parameter `psi` in the family's count model, with
/// the variables in the model's order.
pub fn family_member(family: FamilyTag, psi: &BigRational) -> Result<(CountModel, Polynomial), CountError> {
    let model = family.count_model().ok_or(CountError::UncountableAmbient(family))?;
    let delta = family.representative();
    let pencil = build_vertex_pencil(&delta)?;
    let form = homogeneous_form(&delta, &pencil.terms, VariableSet::Vertices)?;
    let vertex_psi = &family.printed().psi_coefficient * psi;
    let f = form.specialize(&vertex_psi);
    let f = match model {
        // vertices (1,0),(0,1),(-1,0),(0,-1) pair up as the two rulings
        CountModel::Biprojective => permute(&f, &[0, 2, 1, 3]),
        _ => f,
    };
    Ok((model, f))
}

fn permute(f: &Polynomial, order: &[usize]) -> Polynomial {
    Polynomial::new(
        f.nvars(),
        f.terms().iter().map(|(e, c)| (order.iter().map(|&i| e[i]).collect(), c.clone())),
    )
}

/// Count of the family member at printed parameter `psi`.
pub fn count_family(family: FamilyTag, psi: &BigRational, p: Prime) -> Result<CountResult, CountError> {
    let (model, f) = family_member(family, psi)?;
    let (ambient, count) = match model {
        CountModel::Biprojective => (AmbientModel::Biprojective, count_biprojective(&f, p)?),
        CountModel::Projective => (AmbientModel::Projective, count_projective(&f, p)?),
        CountModel::WeightedProjective(w) => {
            let c = count_weighted_projective(&f, &w, p)?;
            (AmbientModel::WeightedProjective { weights: w }, c)
        }
    };
    Ok(CountResult {
        model: ambient,
        prime: p,
        psi: Some(psi.clone()),
        count,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub family: FamilyTag,
    pub prime: Prime,
    #[serde(serialize_with = "ser_rational")]
    pub psi: BigRational,
    pub count: u64,
    pub truncation: u64,
    /// `count_sign` of the family: `N = 1 + sign * truncation (mod p)`.
    pub sign: i64,
    pub holds: bool,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Compare the brute-force count with `1 + sign * truncated pFq` mod p, in the
/// printed convention; `sign = (-1)^dim` of the fibre.
pub fn congruence_check(family: FamilyTag, psi: &BigRational, p: Prime) -> Result<CongruenceReport, CountError> {
    if family.count_model().is_none() {
        return Err(CountError::UncountableAmbient(family));
    }
    if !is_smooth_printed(family, psi) {
        return Err(CountError::SingularMember(format_rational(psi)));
    }
    let count = count_family(family, psi, p)?.count;
    let truncation = truncated_pfq(&family.printed().hypergeometric, psi, p)?.value;
    let sign = family.count_sign();
    let expected = if sign > 0 {
        p.add(1, truncation)
    } else {
        p.sub(1, truncation)
    };
    Ok(CongruenceReport {
        family,
        prime: p,
        psi: psi.clone(),
        count,
        truncation,
        sign,
        holds: count % p.get() == expected,
    })
}

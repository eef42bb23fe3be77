//! Hasse–Witt invariants as constant terms of `f^(p-1)` mod p, exact period
//! coefficients, and the Key Lemma and truncation checks built on them.
//!
//! The constant term of `(sum_i c_i x^(w_i))^e` is the sum over `a >= 0` with
//! `sum a_i = e` and `sum a_i w_i = 0` of `multinomial(e; a) prod c_i^(a_i)`.
//! Those `a` are found by solving the linear system once (reduced row echelon
//! form over Q) and enumerating only the free coordinates.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{format_rational, FactorialTable, Prime};
use crate::family::FamilyTag;
use crate::hypergeometric::{truncated_pfq, HypergeometricData, HypergeometricError};
use crate::lattice_polytope::{double_kernel_pair, LatticePolytope, PolytopeError};
use crate::pencil::{build_vertex_pencil, is_smooth_member, HomogeneousForm, LaurentPencil, LaurentPolynomial, PencilError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HwError {
    #[error("coefficient {0} has a denominator divisible by p")]
    BadDenominator(String),
    #[error("exponent {e} must be below p = {p}")]
    ExponentTooLarge { e: u64, p: u64 },
    #[error("psi = {0} gives a singular member")]
    SingularMember(String),
    #[error("the polytopes are not a kernel pair with kernel-paired duals")]
    NotKernelPair,
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Hypergeometric(#[from] HypergeometricError),
}

/// Nonnegative integer solutions of `sum a_i w_i = 0`, `sum a_i = e`.
#[derive(Debug, Clone)]
pub struct ExponentSolver {
    len: usize,
    free: Vec<usize>,
    /// `scale * a_pivot = e * rhs - sum_j coeffs[j] * a_free[j]`
    rows: Vec<PivotRow>,
    /// Some zero row has a nonzero right-hand side: only `e = 0` is solvable.
    needs_zero_total: bool,
}

#[derive(Debug, Clone)]
struct PivotRow {
    pivot: usize,
    scale: i128,
    rhs: i128,
    coeffs: Vec<i128>,
}

fn lcm(a: i128, b: i128) -> i128 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x * b).abs()
}

fn to_i128(q: &BigRational) -> i128 {
    q.to_integer().to_i128().expect("solver coefficient fits in i128")
}

impl ExponentSolver {
    pub fn new(exponents: &[Vec<i64>]) -> Self {
        let len = exponents.len();
        let n = exponents.first().map_or(0, Vec::len);
        // rows: each coordinate, then the total; last column is the right-hand side
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = exponents.iter().map(|w| BigRational::from_integer(w[i].into())).collect();
                row.push(BigRational::zero());
                row
            })
            .collect();
        let mut total = vec![BigRational::one(); len];
        total.push(BigRational::one());
        m.push(total);

        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..len {
            let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, pr);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..=len {
                        let t = &f * &m[r][j];
                        m[i][j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let needs_zero_total = m[r..].iter().any(|row| !row[len].is_zero());
        let free: Vec<usize> = (0..len).filter(|c| !pivots.contains(c)).collect();
        let rows = pivots
            .iter()
            .enumerate()
            .map(|(i, &pivot)| {
                let row = &m[i];
                let scale = free
                    .iter()
                    .map(|&j| &row[j])
                    .chain(std::iter::once(&row[len]))
                    .fold(1i128, |acc, q| lcm(acc, q.denom().to_i128().expect("small denominator")));
                let s = BigRational::from_integer(scale.into());
                PivotRow {
                    pivot,
                    scale,
                    rhs: to_i128(&(&row[len] * &s)),
                    coeffs: free.iter().map(|&j| to_i128(&(&row[j] * &s))).collect(),
                }
            })
            .collect();
        ExponentSolver {
            len,
            free,
            rows,
            needs_zero_total,
        }
    }

    /// Number of free coordinates (the rank of the relation lattice).
    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    pub fn for_each_solution(&self, e: u64, mut visit: impl FnMut(&[u64])) {
        if self.needs_zero_total && e != 0 {
            return;
        }
        let mut a = vec![0u64; self.len];
        let mut free_vals = vec![0u64; self.free.len()];
        self.recurse(0, e, e, &mut free_vals, &mut a, &mut visit);
    }

    fn recurse(&self, k: usize, e: u64, budget: u64, free_vals: &mut Vec<u64>, a: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        if k == self.free.len() {
            for row in &self.rows {
                let mut num = e as i128 * row.rhs;
                for (c, &f) in row.coeffs.iter().zip(free_vals.iter()) {
                    num -= c * f as i128;
                }
                if num < 0 || num % row.scale != 0 {
                    return;
                }
                let v = num / row.scale;
                if v > e as i128 {
                    return;
                }
                a[row.pivot] = v as u64;
            }
            for (&j, &f) in self.free.iter().zip(free_vals.iter()) {
                a[j] = f;
            }
            visit(a);
            return;
        }
        for v in 0..=budget {
            free_vals[k] = v;
            self.recurse(k + 1, e, budget - v, free_vals, a, visit);
        }
        free_vals[k] = 0;
    }
}

fn reduce_coeffs<'a>(coeffs: impl Iterator<Item = &'a BigRational>, p: Prime) -> Result<Vec<u64>, HwError> {
    coeffs
        .map(|c| p.reduce(c).ok_or_else(|| HwError::BadDenominator(format_rational(c))))
        .collect()
}

/// Constant term of `f^e` mod p, for `e < p`.
pub fn constant_term_power(f: &LaurentPolynomial, e: u64, p: Prime) -> Result<u64, HwError> {
    if e >= p.get() {
        return Err(HwError::ExponentTooLarge { e, p: p.get() });
    }
    let (exps, coeffs): (Vec<Vec<i64>>, Vec<&BigRational>) = f.terms().map(|(e, c)| (e.clone(), c)).unzip();
    let cs = reduce_coeffs(coeffs.into_iter(), p)?;
    if exps.is_empty() {
        return Ok(u64::from(e == 0));
    }
    let table = FactorialTable::new(p);
    let mut total = 0;
    ExponentSolver::new(&exps).for_each_solution(e, |a| {
        let mut term = table.multinomial(a);
        for (&c, &ai) in cs.iter().zip(a) {
            term = p.mul(term, p.pow(c, ai));
        }
        total = p.add(total, term);
    });
    Ok(total)
}

/// Constant term of `pencil^(p-1)` as a polynomial in `psi` mod p,
/// coefficients lowest degree first.
pub fn hasse_witt_polynomial(pencil: &LaurentPencil, p: Prime) -> Result<Vec<u64>, HwError> {
    let e = p.get() - 1;
    let cs = reduce_coeffs(pencil.terms.iter().map(|t| &t.coeff), p)?;
    let table = FactorialTable::new(p);
    let mut poly = vec![0u64; e as usize + 1];
    ExponentSolver::new(&pencil.exponents()).for_each_solution(e, |a| {
        let mut term = table.multinomial(a);
        let mut deg = 0;
        for ((t, &c), &ai) in pencil.terms.iter().zip(&cs).zip(a) {
            term = p.mul(term, p.pow(c, ai));
            if t.has_psi {
                deg += ai as usize;
            }
        }
        poly[deg] = p.add(poly[deg], term);
    });
    while poly.len() > 1 && poly.last() == Some(&0) {
        poly.pop();
    }
    Ok(poly)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HwInvariant {
    pub prime: Prime,
    pub value: u64,
    #[serde(serialize_with = "ser_rational")]
    pub psi: BigRational,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Constant term of `pencil(psi)^(p-1)` mod p.
pub fn hasse_witt(pencil: &LaurentPencil, psi: &BigRational, p: Prime) -> Result<HwInvariant, HwError> {
    let value = constant_term_power(&pencil.specialize(psi), p.get() - 1, p)?;
    Ok(HwInvariant {
        prime: p,
        value,
        psi: psi.clone(),
    })
}

/// Hasse–Witt value of a named family in the vertex-pencil convention.
pub fn hasse_witt_family(family: FamilyTag, psi: &BigRational, p: Prime) -> Result<HwInvariant, HwError> {
    if !is_smooth_member(family, psi) {
        return Err(HwError::SingularMember(format_rational(psi)));
    }
    let pencil = build_vertex_pencil(&family.representative())?;
    hasse_witt(&pencil, psi, p)
}

/// Coefficient of `(z_0 ... z_n)^(p-1)` in `F^(p-1)` mod p for a homogeneous form.
pub fn katz_coefficient(form: &HomogeneousForm, psi: &BigRational, p: Prime) -> Result<u64, HwError> {
    let e = p.get() - 1;
    let exps: Vec<Vec<i64>> = form
        .monomials
        .iter()
        .map(|m| m.exponents.iter().map(|&x| x as i64 - 1).collect())
        .collect();
    let coeffs: Vec<BigRational> = form
        .monomials
        .iter()
        .map(|m| if m.has_psi { &m.coeff * psi } else { m.coeff.clone() })
        .collect();
    let cs = reduce_coeffs(coeffs.iter(), p)?;
    let table = FactorialTable::new(p);
    let mut total = 0;
    ExponentSolver::new(&exps).for_each_solution(e, |a| {
        let mut term = table.multinomial(a);
        for (&c, &ai) in cs.iter().zip(a) {
            term = p.mul(term, p.pow(c, ai));
        }
        total = p.add(total, term);
    });
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyLemmaReport {
    pub delta: HwInvariant,
    pub gamma: HwInvariant,
    pub equal: bool,
}

/// Hasse–Witt values of the vertex pencils of a kernel pair whose duals are
/// kernel paired under the induced facet bijection.
pub fn key_lemma_check(
    delta: &LatticePolytope,
    gamma: &LatticePolytope,
    psi: &BigRational,
    p: Prime,
) -> Result<KeyLemmaReport, HwError> {
    if psi.is_zero() {
        return Err(HwError::SingularMember(format_rational(psi)));
    }
    if double_kernel_pair(delta, gamma)?.is_none() {
        return Err(HwError::NotKernelPair);
    }
    let a = hasse_witt(&build_vertex_pencil(delta)?, psi, p)?;
    let b = hasse_witt(&build_vertex_pencil(gamma)?, psi, p)?;
    Ok(KeyLemmaReport {
        equal: a.value == b.value,
        delta: a,
        gamma: b,
    })
}

/// `b_0 .. b_n_max`: constant terms of the vertex part of the pencil, exactly.
pub fn period_coefficients(delta: &LatticePolytope, n_max: usize) -> Result<Vec<BigUint>, HwError> {
    let pencil = build_vertex_pencil(delta)?;
    let exps: Vec<Vec<i64>> = pencil.terms.iter().filter(|t| !t.has_psi).map(|t| t.exponent.clone()).collect();
    let mut fact = vec![BigUint::one()];
    for i in 1..=n_max {
        let next = &fact[i - 1] * BigUint::from(i);
        fact.push(next);
    }
    let solver = ExponentSolver::new(&exps);
    Ok((0..=n_max)
        .map(|n| {
            let mut b = BigUint::zero();
            solver.for_each_solution(n as u64, |a| {
                let den = a.iter().fold(BigUint::one(), |acc, &ai| acc * &fact[ai as usize]);
                b += &fact[n] / den;
            });
            b
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    pub prime: Prime,
    #[serde(serialize_with = "ser_rational")]
    pub psi: BigRational,
    pub hw: u64,
    pub binomial_sum: u64,
    pub hypergeometric: Option<u64>,
    pub holds: bool,
}

/// `HW(psi) = sum_n binom(p-1, n) b_n psi^(p-1-n)` and, when data is given,
/// `HW(psi) = truncated pFq` mod p.
pub fn truncation_relation_check(
    delta: &LatticePolytope,
    data: Option<&HypergeometricData>,
    psi: &BigRational,
    p: Prime,
) -> Result<TruncationReport, HwError> {
    if psi.is_zero() {
        return Err(HwError::SingularMember(format_rational(psi)));
    }
    let pencil = build_vertex_pencil(delta)?;
    let hw = hasse_witt(&pencil, psi, p)?.value;
    let e = (p.get() - 1) as usize;
    let b = period_coefficients(delta, e)?;
    let x = p
        .reduce(psi)
        .ok_or_else(|| HwError::BadDenominator(format_rational(psi)))?;
    let table = FactorialTable::new(p);
    let mut binomial_sum = 0;
    for (n, bn) in b.iter().enumerate() {
        let bn = p.reduce_int(&bn.clone().into());
        let term = p.mul(table.binomial(e, n), p.mul(bn, p.pow(x, (e - n) as u64)));
        binomial_sum = p.add(binomial_sum, term);
    }
    let hypergeometric = data.map(|d| truncated_pfq(d, psi, p)).transpose()?.map(|t| t.value);
    let holds = hw == binomial_sum && hypergeometric.is_none_or(|h| h == hw);
    Ok(TruncationReport {
        prime: p,
        psi: psi.clone(),
        hw,
        binomial_sum,
        hypergeometric,
        holds,
    })
}

/// [`truncation_relation_check`] for a named family and its stored data.
pub fn family_truncation_check(family: FamilyTag, psi: &BigRational, p: Prime) -> Result<TruncationReport, HwError> {
    if !is_smooth_member(family, psi) {
        return Err(HwError::SingularMember(format_rational(psi)));
    }
    truncation_relation_check(&family.representative(), Some(&family.hypergeometric()), psi, p)
}

/// Degree in `psi` of a polynomial given lowest coefficient first.
pub fn degree(poly: &[u64]) -> usize {
    poly.iter().rposition(|&c| c != 0).unwrap_or(0)
}

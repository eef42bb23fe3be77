//! Truncated generalized hypergeometric sums mod p, their exact series over Q,
//! Clausen comparisons and quadratic-residue classification.
//!
//! A `pFq` here is `sum_n prod (a_i)_n / (prod (b_j)_n * n!) * z^n`; the
//! implicit `n!` is the customary lower parameter 1 that is not listed.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{format_rational, parse_rational, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergeometricError {
    #[error("the denominator of {0} is divisible by p")]
    BadDenominator(String),
    #[error("psi = {0} is not invertible mod p but the argument has a negative power of psi")]
    PsiNotInvertible(String),
    #[error("lower parameter {0} is a nonpositive integer")]
    NonpositiveLowerParameter(String),
    #[error("term index {n} is beyond the truncation n <= p - 1 = {max}")]
    BeyondTruncation { n: u64, max: u64 },
    #[error("cannot parse hypergeometric parameters: {0}")]
    Parse(String),
}

/// `c * psi^e`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Argument {
    pub c: BigRational,
    pub e: i32,
}

impl Argument {
    pub fn new(c: BigRational, e: i32) -> Self {
        Argument { c, e }
    }

    pub fn from_ints(num: i64, den: i64, e: i32) -> Self {
        Argument::new(BigRational::new(num.into(), den.into()), e)
    }

    /// `c / psi^e`, i.e. `(1/c) psi^e` read as a function of `1/psi`.
    pub fn inverted(&self) -> Self {
        Argument::new(self.c.recip(), -self.e)
    }

    pub fn eval(&self, psi: &BigRational) -> Option<BigRational> {
        if psi.is_zero() && self.e < 0 {
            return None;
        }
        let mut x = self.c.clone();
        let base = if self.e < 0 { psi.recip() } else { psi.clone() };
        for _ in 0..self.e.unsigned_abs() {
            x *= &base;
        }
        Some(x)
    }

    /// The argument reduced mod p.
    pub fn eval_mod(&self, psi: &BigRational, p: Prime) -> Result<u64, HypergeometricError> {
        let c = p
            .reduce(&self.c)
            .ok_or_else(|| HypergeometricError::BadDenominator(format_rational(&self.c)))?;
        let x = p
            .reduce(psi)
            .ok_or_else(|| HypergeometricError::BadDenominator(format_rational(psi)))?;
        let xe = p
            .pow_signed(x, self.e as i64)
            .ok_or_else(|| HypergeometricError::PsiNotInvertible(format_rational(psi)))?;
        Ok(p.mul(c, xe))
    }

    /// Parse `"c,e"`, e.g. `"256,-4"` or `"1/16,2"`.
    pub fn parse(s: &str) -> Result<Self, HypergeometricError> {
        let err = || HypergeometricError::Parse(format!("argument `{s}` is not of the form `c,e`"));
        let (c, e) = s.split_once(',').ok_or_else(err)?;
        let c = parse_rational(c).ok_or_else(err)?;
        let e: i32 = e.trim().parse().map_err(|_| err())?;
        Ok(Argument::new(c, e))
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = format_rational(&self.c);
        match self.e {
            0 => write!(f, "{c}"),
            1 if c == "1" => f.write_str("psi"),
            e if e > 1 && c == "1" => write!(f, "psi^{e}"),
            1 => write!(f, "{c}*psi"),
            e if e > 1 => write!(f, "{c}*psi^{e}"),
            -1 => write!(f, "{c}/psi"),
            e => write!(f, "{c}/psi^{}", -e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypergeometricData {
    pub numerators: Vec<BigRational>,
    pub denominators: Vec<BigRational>,
    pub argument: Argument,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl HypergeometricData {
    pub fn new(
        numerators: Vec<BigRational>,
        denominators: Vec<BigRational>,
        argument: Argument,
    ) -> Result<Self, HypergeometricError> {
        if let Some(b) = denominators.iter().find(|b| b.is_integer() && *b <= &BigRational::zero()) {
            return Err(HypergeometricError::NonpositiveLowerParameter(format_rational(b)));
        }
        Ok(HypergeometricData {
            numerators,
            denominators,
            argument,
        })
    }

    /// From `(num, den)` pairs; panics on an invalid lower parameter.
    pub fn from_pairs(numerators: &[(i64, i64)], denominators: &[(i64, i64)], argument: Argument) -> Self {
        HypergeometricData::new(
            numerators.iter().map(|&(a, b)| q(a, b)).collect(),
            denominators.iter().map(|&(a, b)| q(a, b)).collect(),
            argument,
        )
        .expect("valid hypergeometric parameters")
    }

    /// Parse `"1/2,1/4,3/4;1,1"` together with an argument.
    pub fn parse(params: &str, argument: Argument) -> Result<Self, HypergeometricError> {
        let (top, bottom) = params.split_once(';').unwrap_or((params, ""));
        let list = |s: &str| -> Result<Vec<BigRational>, HypergeometricError> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| parse_rational(t).ok_or_else(|| HypergeometricError::Parse(format!("`{t}` is not a rational"))))
                .collect()
        };
        HypergeometricData::new(list(top)?, list(bottom)?, argument)
    }

    /// `(p, q)` in `pFq`, counting only the listed lower parameters.
    pub fn shape(&self) -> (usize, usize) {
        (self.numerators.len(), self.denominators.len())
    }

    pub fn with_argument(&self, argument: Argument) -> Self {
        HypergeometricData {
            argument,
            ..self.clone()
        }
    }

    /// Parameters as `"a1,a2;b1"` (sorted, for stable comparison and output).
    pub fn parameter_string(&self) -> String {
        let join = |v: &[BigRational]| {
            let mut v = v.to_vec();
            v.sort();
            v.iter().map(format_rational).collect::<Vec<_>>().join(",")
        };
        format!("{};{}", join(&self.numerators), join(&self.denominators))
    }

    /// Equality of parameter multisets and argument.
    pub fn same_as(&self, other: &HypergeometricData) -> bool {
        self.parameter_string() == other.parameter_string() && self.argument == other.argument
    }

    /// Coefficient of `z^n` over Q.
    pub fn coefficient(&self, n: u64) -> BigRational {
        let mut c = BigRational::one();
        for a in &self.numerators {
            c *= pochhammer(a, n);
        }
        for b in &self.denominators {
            c /= pochhammer(b, n);
        }
        c / pochhammer(&BigRational::one(), n)
    }

    /// Coefficients of `z^0 .. z^n_max` over Q.
    pub fn series(&self, n_max: u64) -> Vec<BigRational> {
        (0..=n_max).map(|n| self.coefficient(n)).collect()
    }
}

impl fmt::Display for HypergeometricData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>().join(",");
        write!(
            f,
            "{}F{}({};{} | {})",
            self.numerators.len(),
            self.denominators.len(),
            list(&self.numerators),
            list(&self.denominators),
            self.argument
        )
    }
}

impl Serialize for HypergeometricData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let strs = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
        let mut st = s.serialize_struct("HypergeometricData", 4)?;
        st.serialize_field("numerators", &strs(&self.numerators))?;
        st.serialize_field("denominators", &strs(&self.denominators))?;
        st.serialize_field("argument_c", &format_rational(&self.argument.c))?;
        st.serialize_field("argument_e", &self.argument.e)?;
        st.end()
    }
}

/// `(a)_n` over Q.
pub fn pochhammer(a: &BigRational, n: u64) -> BigRational {
    let mut out = BigRational::one();
    let mut x = a.clone();
    for _ in 0..n {
        out *= &x;
        x += BigRational::one();
    }
    out
}

/// `(r/s)_n mod p = prod_{j<n} (r + j s) * s^(-n)`.
pub fn pochhammer_mod_p(a: &BigRational, n: u64, p: Prime) -> Result<u64, HypergeometricError> {
    let s = p.reduce_int(a.denom());
    let s_inv = p
        .inv(s)
        .ok_or_else(|| HypergeometricError::BadDenominator(format_rational(a)))?;
    let r = p.reduce_int(a.numer());
    let mut acc = 1 % p.get();
    let mut factor = r;
    for _ in 0..n {
        acc = p.mul(acc, factor);
        factor = p.add(factor, s);
    }
    Ok(p.mul(acc, p.pow(s_inv, n)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedValue {
    pub prime: Prime,
    pub value: u64,
    pub terms_used: u64,
}

/// Coefficient of `z^n` mod p for `n <= p - 1`.
///
/// When a lower Pochhammer symbol vanishes mod p the coefficient is computed
/// exactly over Q and then reduced, which is the value of the rational series
/// coefficient whenever it is p-integral.
pub fn term_mod_p(data: &HypergeometricData, n: u64, p: Prime) -> Result<u64, HypergeometricError> {
    if n >= p.get() {
        return Err(HypergeometricError::BeyondTruncation { n, max: p.get() - 1 });
    }
    let mut num = 1 % p.get();
    for a in &data.numerators {
        num = p.mul(num, pochhammer_mod_p(a, n, p)?);
    }
    let mut den = 1 % p.get();
    for b in &data.denominators {
        den = p.mul(den, pochhammer_mod_p(b, n, p)?);
    }
    den = p.mul(den, pochhammer_mod_p(&BigRational::one(), n, p)?);
    match p.inv(den) {
        Some(inv) => Ok(p.mul(num, inv)),
        None => {
            let c = data.coefficient(n);
            p.reduce(&c)
                .ok_or_else(|| HypergeometricError::BadDenominator(format!("series coefficient {}", format_rational(&c))))
        }
    }
}

/// `sum_{n=0}^{p-1} coeff_n z^n mod p` with `z = c psi^e`.
pub fn truncated_pfq(data: &HypergeometricData, psi: &BigRational, p: Prime) -> Result<TruncatedValue, HypergeometricError> {
    let z = data.argument.eval_mod(psi, p)?;
    truncated_at(data, z, p)
}

/// Truncated sum at an argument already reduced mod p.
pub fn truncated_at(data: &HypergeometricData, z: u64, p: Prime) -> Result<TruncatedValue, HypergeometricError> {
    let mut value = 0;
    let mut zn = 1 % p.get();
    for n in 0..p.get() {
        if zn != 0 {
            value = p.add(value, p.mul(term_mod_p(data, n, p)?, zn));
        }
        zn = p.mul(zn, z);
    }
    Ok(TruncatedValue {
        prime: p,
        value,
        terms_used: p.get(),
    })
}

/// A `2F1` whose square is a `3F2` by Clausen's formula:
/// `2F1(a, b; a+b+1/2 | z)^2 = 3F2(2a, 2b, a+b; 2a+2b, a+b+1/2 | z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClausenPair {
    pub f21: HypergeometricData,
    pub f32: HypergeometricData,
}

impl ClausenPair {
    /// Build both sides from `a`, `b`; the `2F1` lower parameter is `a + b + 1/2`.
    pub fn from_2f1(a: BigRational, b: BigRational, argument: Argument) -> Result<Self, HypergeometricError> {
        let half = q(1, 2);
        let two = q(2, 1);
        let c = &a + &b + &half;
        let f21 = HypergeometricData::new(vec![a.clone(), b.clone()], vec![c.clone()], argument.clone())?;
        let mut upper = vec![&two * &a, &two * &b, &a + &b];
        upper.sort();
        let mut lower = vec![&two * &a + &two * &b, c];
        lower.sort();
        let f32 = HypergeometricData::new(upper, lower, argument)?;
        Ok(ClausenPair { f21, f32 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClausenReport {
    pub prime: Prime,
    pub f21: u64,
    pub f21_squared: u64,
    pub f32: u64,
    pub holds: bool,
}

/// Compare `(truncated 2F1)^2` with truncated `3F2` at `psi`.
pub fn clausen_compare(pair: &ClausenPair, psi: &BigRational, p: Prime) -> Result<ClausenReport, HypergeometricError> {
    let f21 = truncated_pfq(&pair.f21, psi, p)?.value;
    let f32 = truncated_pfq(&pair.f32, psi, p)?.value;
    let sq = p.mul(f21, f21);
    Ok(ClausenReport {
        prime: p,
        f21,
        f21_squared: sq,
        f32,
        holds: sq == f32,
    })
}

/// First `n_max + 1` coefficients of `2F1^2 - 3F2` over Q (all zero when Clausen holds).
pub fn clausen_series_defect(pair: &ClausenPair, n_max: u64) -> Vec<BigRational> {
    let a = pair.f21.series(n_max);
    let b = pair.f32.series(n_max);
    (0..=n_max as usize)
        .map(|n| {
            let sq: BigRational = (0..=n).map(|k| &a[k] * &a[n - k]).sum();
            sq - &b[n]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Residuosity {
    Zero,
    Residue,
    NonResidue,
}

impl fmt::Display for Residuosity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Residuosity::Zero => "zero",
            Residuosity::Residue => "residue",
            Residuosity::NonResidue => "nonresidue",
        })
    }
}

/// Euler's criterion; `p` must be odd.
pub fn quadratic_residue_check(value: u64, p: Prime) -> Residuosity {
    let v = value % p.get();
    if v == 0 {
        Residuosity::Zero
    } else if p.pow(v, (p.get() - 1) / 2) == 1 {
        Residuosity::Residue
    } else {
        Residuosity::NonResidue
    }
}

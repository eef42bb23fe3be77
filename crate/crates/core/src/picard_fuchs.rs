//! From a Picard–Fuchs equation to hypergeometric parameters: companion
//! matrix, diagonal gauge shear, `z = psi^k`, rescaling, residues at 0 and
//! infinity, their eigenvalues, and the read-off of `pFq` parameters.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{format_rational, QPoly, RatFunc};
use crate::family::FamilyTag;
use crate::hypergeometric::{Argument, HypergeometricData, HypergeometricError};

pub type QMatrix = Vec<Vec<BigRational>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PfError {
    #[error("the leading coefficient of the equation is zero")]
    ZeroLeadingCoefficient,
    #[error("expected a {expected} system")]
    WrongForm { expected: SystemForm },
    #[error("matrix entries are not functions of t^{k}")]
    NotAPowerFunction { k: usize },
    #[error("cannot rescale by zero")]
    ZeroScale,
    #[error("the system has a pole at 0")]
    PoleAtZero,
    #[error("the system has a pole at infinity")]
    PoleAtInfinity,
    #[error("characteristic polynomial {0} has an irrational root")]
    IrrationalEigenvalue(String),
    #[error("0 is not an exponent at 0")]
    NoZeroExponent,
    #[error("exponents at infinity {0:?} are not all equal")]
    NotMUMAtInfinity(Vec<String>),
    #[error("singular point {0} is not a simple rational pole")]
    UnsupportedPole(String),
    #[error(transparent)]
    Hypergeometric(#[from] HypergeometricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemForm {
    /// `dy/dt = M y`
    Raw,
    /// `dy/dt = (1/t) M y`
    Scaled,
}

impl fmt::Display for SystemForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemForm::Raw => "raw",
            SystemForm::Scaled => "scaled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuchsianSystem {
    matrix: Vec<Vec<RatFunc>>,
    form: SystemForm,
    var: String,
}

impl FuchsianSystem {
    pub fn new(matrix: Vec<Vec<RatFunc>>, form: SystemForm, var: &str) -> Self {
        let n = matrix.len();
        assert!(matrix.iter().all(|r| r.len() == n), "square matrix");
        FuchsianSystem {
            matrix,
            form,
            var: var.to_string(),
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<RatFunc>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &RatFunc {
        &self.matrix[i][j]
    }

    pub fn form(&self) -> SystemForm {
        self.form
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    fn require(&self, form: SystemForm) -> Result<(), PfError> {
        if self.form == form {
            Ok(())
        } else {
            Err(PfError::WrongForm { expected: form })
        }
    }

    fn map(&self, var: &str, f: impl Fn(&RatFunc) -> RatFunc) -> Self {
        FuchsianSystem::new(
            self.matrix.iter().map(|r| r.iter().map(&f).collect()).collect(),
            self.form,
            var,
        )
    }

    /// Entries as strings in the system's variable.
    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|e| e.display_in(&self.var)).collect())
            .collect()
    }

    /// Conjugate by `diag(t^0, .., t^(n-1))` and multiply by `t`:
    /// `M' = t D A D^-1 + diag(0, 1, .., n-1)`, so that `dY/dt = (1/t) M' Y`
    /// for `Y = D y`.
    pub fn gauge_shear(&self) -> Result<FuchsianSystem, PfError> {
        self.require(SystemForm::Raw)?;
        let n = self.size();
        let t = QPoly::t();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // t * t^i * A_ij * t^-j
                        let a = &self.matrix[i][j];
                        let shift = 1 + i as i64 - j as i64;
                        let mut e = if shift >= 0 {
                            a.mul_poly(&t.pow(shift as u32))
                        } else {
                            RatFunc::new(a.num().clone(), a.den() * &t.pow((-shift) as u32))
                        };
                        if i == j {
                            e = &e + &RatFunc::from_int(i as i64);
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        Ok(FuchsianSystem::new(matrix, SystemForm::Scaled, &self.var))
    }

    /// Change variable to `z = t^k`: `dz/z = k dt/t`, so `M(t) = k N(t^k)`.
    pub fn substitute_power(&self, k: usize, var: &str) -> Result<FuchsianSystem, PfError> {
        self.require(SystemForm::Scaled)?;
        if k == 0 {
            return Err(PfError::NotAPowerFunction { k });
        }
        let inv_k = BigRational::new(BigInt::one(), BigInt::from(k));
        let mut matrix = Vec::with_capacity(self.size());
        for row in &self.matrix {
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                let d = e.deflate(k).ok_or(PfError::NotAPowerFunction { k })?;
                out.push(d.scale(&inv_k));
            }
            matrix.push(out);
        }
        Ok(FuchsianSystem::new(matrix, SystemForm::Scaled, var))
    }

    /// Substitute `t = c s`; the scaled form is invariant under `dt/t = ds/s`.
    pub fn rescale(&self, c: &BigRational, var: &str) -> Result<FuchsianSystem, PfError> {
        self.require(SystemForm::Scaled)?;
        if c.is_zero() {
            return Err(PfError::ZeroScale);
        }
        Ok(self.map(var, |e| e.scale_var(c)))
    }

    /// The system in `zeta = 1/t`: `-M(1/zeta)`, scaled.
    pub fn zeta_system(&self, var: &str) -> Result<FuchsianSystem, PfError> {
        self.require(SystemForm::Scaled)?;
        Ok(self.map(var, |e| -&e.invert_var()))
    }

    pub fn residue_at_zero(&self) -> Result<QMatrix, PfError> {
        self.require(SystemForm::Scaled)?;
        self.matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.eval(&BigRational::zero()).ok_or(PfError::PoleAtZero))
                    .collect()
            })
            .collect()
    }

    pub fn residue_at_infinity(&self) -> Result<QMatrix, PfError> {
        self.zeta_system("zeta")?.residue_at_zero().map_err(|e| match e {
            PfError::PoleAtZero => PfError::PoleAtInfinity,
            other => other,
        })
    }

    /// Traces of the residues at the finite nonzero singular points, which
    /// must be simple rational poles of the trace.
    pub fn finite_residue_traces(&self) -> Result<Vec<(BigRational, BigRational)>, PfError> {
        self.require(SystemForm::Scaled)?;
        // residue of tr(M)(t)/t at a nonzero pole a
        let tr = (0..self.size()).fold(RatFunc::zero(), |acc, i| &acc + &self.matrix[i][i]);
        let den = tr.den().clone();
        let (roots, rest) = rational_roots(&den);
        if rest.degree().unwrap_or(0) > 0 {
            return Err(PfError::UnsupportedPole(rest.display_in(&self.var)));
        }
        let dden = den.derivative();
        let mut out = Vec::new();
        let mut seen: Vec<BigRational> = Vec::new();
        for a in roots {
            if a.is_zero() {
                return Err(PfError::PoleAtZero);
            }
            if seen.contains(&a) {
                return Err(PfError::UnsupportedPole(format_rational(&a)));
            }
            let r = tr.num().eval(&a) / (dden.eval(&a) * &a);
            seen.push(a.clone());
            out.push((a, r));
        }
        Ok(out)
    }
}

impl fmt::Display for FuchsianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form == SystemForm::Scaled {
            write!(f, "(1/{})*", self.var)?;
        }
        let rows: Vec<String> = self.entry_strings().iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Companion matrix of `sum_j coeffs[j] y^(j) = 0`; the last entry is the
/// leading coefficient.
pub fn companion_matrix(coeffs: &[RatFunc], var: &str) -> Result<FuchsianSystem, PfError> {
    let (lead, rest) = coeffs.split_last().ok_or(PfError::ZeroLeadingCoefficient)?;
    if lead.is_zero() {
        return Err(PfError::ZeroLeadingCoefficient);
    }
    let n = rest.len();
    let mut m = vec![vec![RatFunc::zero(); n]; n];
    for i in 0..n.saturating_sub(1) {
        m[i][i + 1] = RatFunc::one();
    }
    if n > 0 {
        for (j, c) in rest.iter().enumerate() {
            m[n - 1][j] = -&(c / lead);
        }
    }
    Ok(FuchsianSystem::new(m, SystemForm::Raw, var))
}

pub fn trace(a: &QMatrix) -> BigRational {
    (0..a.len()).map(|i| a[i][i].clone()).sum()
}

fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

/// `det(t I - A)` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &QMatrix) -> QPoly {
    let n = a.len();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m: QMatrix = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c[n + 1 - k];
        }
        m = mat_mul(a, &m);
        c[n - k] = -trace(&m) / BigRational::from_integer(BigInt::from(k));
    }
    QPoly::new(c)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out
}

/// Rational roots with multiplicity and the cofactor left after removing them.
pub fn rational_roots(p: &QPoly) -> (Vec<BigRational>, QPoly) {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    if rest.is_zero() {
        return (roots, rest);
    }
    while rest.degree().unwrap_or(0) > 0 && rest.coeff(0).is_zero() {
        roots.push(BigRational::zero());
        rest = rest.div_rem(&QPoly::t()).0;
    }
    if rest.degree().unwrap_or(0) == 0 {
        return (roots, rest);
    }
    let lcm = rest.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = rest.coeffs().iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let lead = ints.last().expect("nonzero").clone();
    for r in divisors(&ints[0]) {
        for s in divisors(&lead) {
            for sign in [1, -1] {
                let x = BigRational::new(BigInt::from(sign) * &r, s.clone());
                loop {
                    if rest.degree().unwrap_or(0) == 0 || !rest.eval(&x).is_zero() {
                        break;
                    }
                    let linear = QPoly::new(vec![-x.clone(), BigRational::one()]);
                    rest = rest.div_rem(&linear).0;
                    roots.push(x.clone());
                }
            }
        }
    }
    roots.sort();
    (roots, rest)
}

/// Eigenvalues of a rational matrix, sorted, with multiplicity.
pub fn rational_eigenvalues(a: &QMatrix) -> Result<Vec<BigRational>, PfError> {
    let chi = characteristic_polynomial(a);
    let (roots, rest) = rational_roots(&chi);
    if rest.degree().unwrap_or(0) > 0 {
        return Err(PfError::IrrationalEigenvalue(chi.display_in("t")));
    }
    Ok(roots)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentData {
    pub at_zero: Vec<BigRational>,
    pub at_infinity: Vec<BigRational>,
}

impl ExponentData {
    pub fn new(mut at_zero: Vec<BigRational>, mut at_infinity: Vec<BigRational>) -> Self {
        at_zero.sort();
        at_infinity.sort();
        ExponentData { at_zero, at_infinity }
    }

    /// Local exponents of a `pFq` with the given parameters:
    /// `{0} u {1 - b}` at 0 and `{a}` at infinity.
    pub fn of_hypergeometric(data: &HypergeometricData) -> Self {
        let one = BigRational::one();
        let at_zero = std::iter::once(BigRational::zero())
            .chain(data.denominators.iter().map(|b| &one - b))
            .collect();
        ExponentData::new(at_zero, data.numerators.clone())
    }
}

impl Serialize for ExponentData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExponentData", 2)?;
        st.serialize_field("at_zero", &strings(&self.at_zero))?;
        st.serialize_field("at_infinity", &strings(&self.at_infinity))?;
        st.end()
    }
}

fn strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn matrix_strings(a: &QMatrix) -> Vec<Vec<String>> {
    a.iter().map(|r| strings(r)).collect()
}

/// Numerators from the exponents at infinity, lower parameters `1 - e` over
/// the exponents at 0 with one copy of 0 removed.
pub fn extract_parameters(e: &ExponentData, argument: Argument) -> Result<HypergeometricData, PfError> {
    let mut at_zero = e.at_zero.clone();
    let pos = at_zero.iter().position(Zero::is_zero).ok_or(PfError::NoZeroExponent)?;
    at_zero.remove(pos);
    let one = BigRational::one();
    let denominators = at_zero.iter().map(|x| &one - x).collect();
    Ok(HypergeometricData::new(e.at_infinity.clone(), denominators, argument)?)
}

/// Read the system at infinity: with all exponents there equal to `mu`,
/// `t^mu y` has maximally unipotent monodromy, giving numerators `e + mu`,
/// lower parameters 1 and argument `c / psi^k`.
pub fn mum_normalize(e: &ExponentData, c: &BigRational, k: usize) -> Result<HypergeometricData, PfError> {
    let mu = e
        .at_infinity
        .first()
        .filter(|mu| e.at_infinity.iter().all(|x| x == *mu))
        .ok_or_else(|| PfError::NotMUMAtInfinity(strings(&e.at_infinity)))?;
    let numerators = e.at_zero.iter().map(|x| x + mu).collect();
    let denominators = vec![BigRational::one(); e.at_zero.len().saturating_sub(1)];
    Ok(HypergeometricData::new(numerators, denominators, Argument::new(c.clone(), -(k as i32)))?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfReport {
    pub family: FamilyTag,
    pub substitution: (usize, BigRational),
    pub companion: FuchsianSystem,
    pub sheared: FuchsianSystem,
    pub substituted: FuchsianSystem,
    pub rescaled: FuchsianSystem,
    /// The rescaled system in `zeta = 1/lambda`.
    pub zeta: FuchsianSystem,
    pub residue_at_zero: QMatrix,
    pub residue_at_infinity: QMatrix,
    pub exponents: ExponentData,
    /// Parameters read directly from the exponents, argument `psi^k / c`.
    pub extracted: HypergeometricData,
    pub result: HypergeometricData,
    pub mum_normalized: bool,
    pub matches_family: bool,
}

impl Serialize for PfReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let sys = |m: &FuchsianSystem| {
            serde_json::json!({
                "variable": m.var(),
                "form": m.form(),
                "matrix": m.entry_strings(),
            })
        };
        let mut st = s.serialize_struct("PfReport", 17)?;
        st.serialize_field("family", self.family.name())?;
        st.serialize_field("k", &self.substitution.0)?;
        st.serialize_field("c", &format_rational(&self.substitution.1))?;
        st.serialize_field("companion", &sys(&self.companion))?;
        st.serialize_field("sheared", &sys(&self.sheared))?;
        st.serialize_field("substituted", &sys(&self.substituted))?;
        st.serialize_field("rescaled", &sys(&self.rescaled))?;
        st.serialize_field("zeta", &sys(&self.zeta))?;
        st.serialize_field("residue_at_zero", &matrix_strings(&self.residue_at_zero))?;
        st.serialize_field("residue_at_infinity", &matrix_strings(&self.residue_at_infinity))?;
        st.serialize_field("exponents", &self.exponents)?;
        st.serialize_field("extracted", &self.extracted)?;
        st.serialize_field("extracted_display", &self.extracted.to_string())?;
        st.serialize_field("result", &self.result)?;
        st.serialize_field("result_display", &self.result.to_string())?;
        st.serialize_field("mum_normalized", &self.mum_normalized)?;
        st.serialize_field("matches_family", &self.matches_family)?;
        st.end()
    }
}

/// Run the whole pipeline on the family's stored equation.
///
/// When the parameters read at 0 already have all lower parameters 1 the
/// system is MUM at 0 and they are kept, with argument `psi^k / c`;
/// otherwise the exponents are renormalized at infinity.
pub fn analyze_family(family: FamilyTag) -> Result<PfReport, PfError> {
    let mut ode = family.pf_equation();
    ode.push(RatFunc::one());
    let (k, c) = family.substitution();
    let companion = companion_matrix(&ode, "psi")?;
    let sheared = companion.gauge_shear()?;
    let substituted = sheared.substitute_power(k, "z")?;
    let rescaled = substituted.rescale(&c, "lambda")?;
    let zeta = rescaled.zeta_system("zeta")?;
    let residue_at_zero = rescaled.residue_at_zero()?;
    let residue_at_infinity = rescaled.residue_at_infinity()?;
    let exponents = ExponentData::new(
        rational_eigenvalues(&residue_at_zero)?,
        rational_eigenvalues(&residue_at_infinity)?,
    );
    let extracted = extract_parameters(&exponents, Argument::new(c.recip(), k as i32))?;
    let mum_at_zero = extracted.denominators.iter().all(One::is_one);
    let result = if mum_at_zero {
        extracted.clone()
    } else {
        mum_normalize(&exponents, &c, k)?
    };
    let matches_family = result.same_as(&family.hypergeometric());
    Ok(PfReport {
        family,
        substitution: (k, c),
        companion,
        sheared,
        substituted,
        rescaled,
        zeta,
        residue_at_zero,
        residue_at_infinity,
        exponents,
        extracted,
        result,
        mum_normalized: !mum_at_zero,
        matches_family,
    })
}

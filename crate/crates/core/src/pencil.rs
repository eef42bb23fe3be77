//! Vertex pencils as Laurent polynomials and as polynomials in generalized
//! homogeneous coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{format_rational, Prime};
use crate::family::FamilyTag;
use crate::lattice_polytope::{LatticePoint, LatticePolytope, PolytopeError};
use crate::point_count::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PencilError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("monomial {0} is not a lattice point of the dual polytope")]
    UnsupportedMonomial(LatticePoint),
    #[error("exponent {0} has the wrong length")]
    DimensionMismatch(LatticePoint),
}

/// A Laurent polynomial over Q with combined, nonzero terms in exponent order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPolynomial {
    n: usize,
    terms: BTreeMap<Vec<i64>, BigRational>,
}

impl LaurentPolynomial {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<i64>, BigRational)>) -> Self {
        let mut f = LaurentPolynomial {
            n,
            terms: BTreeMap::new(),
        };
        for (e, c) in terms {
            f.add_term(e, c);
        }
        f
    }

    fn add_term(&mut self, e: Vec<i64>, c: BigRational) {
        assert_eq!(e.len(), self.n, "exponent length");
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn one(n: usize) -> Self {
        LaurentPolynomial::new(n, [(vec![0; n], BigRational::one())])
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&vec![0; self.n]).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn mul(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::new(self.n, []);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Full expansion of `f^e`; only practical for small cases.
    pub fn pow(&self, e: u32) -> LaurentPolynomial {
        (0..e).fold(LaurentPolynomial::one(self.n), |acc, _| acc.mul(self))
    }

    /// Value at a point of the torus `(F_p^*)^n`; `None` if a coefficient is not p-integral.
    pub fn eval_mod(&self, x: &[u64], p: Prime) -> Option<u64> {
        let mut total = 0;
        for (e, c) in &self.terms {
            let mut v = p.reduce(c)?;
            for (xi, &ei) in x.iter().zip(e) {
                v = p.mul(v, p.pow_signed(*xi, ei)?);
            }
            total = p.add(total, v);
        }
        Some(total)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names = var_names(self.n);
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", monomial_text(c, e, &names))?;
        }
        Ok(())
    }
}

fn var_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

fn monomial_text(c: &BigRational, e: &[i64], names: &[String]) -> String {
    let vars: Vec<String> = e
        .iter()
        .zip(names)
        .filter(|(&k, _)| k != 0)
        .map(|(&k, v)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
        .collect();
    if vars.is_empty() {
        return format_rational(c);
    }
    let body = vars.join("*");
    if c.is_one() {
        body
    } else {
        format!("{}*{body}", format_rational(c))
    }
}

/// One term of a pencil: `coeff * x^exponent`, times `psi` when `has_psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentTerm {
    pub exponent: Vec<i64>,
    pub coeff: BigRational,
    pub has_psi: bool,
}

impl Serialize for LaurentTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LaurentTerm", 3)?;
        st.serialize_field("exponent", &self.exponent)?;
        st.serialize_field("coeff", &format_rational(&self.coeff))?;
        st.serialize_field("has_psi", &self.has_psi)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaurentPencil {
    pub n: usize,
    pub terms: Vec<LaurentTerm>,
    pub psi_term_index: usize,
}

impl LaurentPencil {
    pub fn specialize(&self, psi: &BigRational) -> LaurentPolynomial {
        LaurentPolynomial::new(
            self.n,
            self.terms.iter().map(|t| {
                let c = if t.has_psi { &t.coeff * psi } else { t.coeff.clone() };
                (t.exponent.clone(), c)
            }),
        )
    }

    /// The pencil without its `psi` term.
    pub fn vertex_part(&self) -> LaurentPolynomial {
        LaurentPolynomial::new(
            self.n,
            self.terms
                .iter()
                .filter(|t| !t.has_psi)
                .map(|t| (t.exponent.clone(), t.coeff.clone())),
        )
    }

    pub fn exponents(&self) -> Vec<Vec<i64>> {
        self.terms.iter().map(|t| t.exponent.clone()).collect()
    }
}

impl fmt::Display for LaurentPencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = var_names(self.n);
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.has_psi {
                if t.exponent.iter().all(|&e| e == 0) {
                    if t.coeff.is_one() {
                        f.write_str("psi")?;
                    } else {
                        write!(f, "{}*psi", format_rational(&t.coeff))?;
                    }
                } else {
                    write!(f, "psi*{}", monomial_text(&t.coeff, &t.exponent, &names))?;
                }
            } else {
                f.write_str(&monomial_text(&t.coeff, &t.exponent, &names))?;
            }
        }
        Ok(())
    }
}

/// Sum of the dual polytope's vertex monomials plus `psi`.
pub fn build_vertex_pencil(delta: &LatticePolytope) -> Result<LaurentPencil, PencilError> {
    let dual = delta.polar_dual()?;
    let n = delta.dim();
    let mut terms: Vec<LaurentTerm> = dual
        .vertices()
        .iter()
        .map(|m| LaurentTerm {
            exponent: m.coords().to_vec(),
            coeff: BigRational::one(),
            has_psi: false,
        })
        .collect();
    terms.push(LaurentTerm {
        exponent: vec![0; n],
        coeff: BigRational::one(),
        has_psi: true,
    });
    Ok(LaurentPencil {
        n,
        psi_term_index: terms.len() - 1,
        terms,
    })
}

/// Which points of Delta get a homogeneous coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableSet {
    /// Every non-origin lattice point.
    AllPoints,
    /// Vertices only, in vertex order.
    Vertices,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneousMonomial {
    pub exponents: Vec<u32>,
    #[serde(serialize_with = "ser_rational")]
    pub coeff: BigRational,
    pub has_psi: bool,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneousForm {
    pub variables: Vec<LatticePoint>,
    pub monomials: Vec<HomogeneousMonomial>,
}

impl HomogeneousForm {
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn specialize(&self, psi: &BigRational) -> Polynomial {
        Polynomial::new(
            self.nvars(),
            self.monomials.iter().map(|m| {
                let c = if m.has_psi { &m.coeff * psi } else { m.coeff.clone() };
                (m.exponents.clone(), c)
            }),
        )
    }
}

/// The polynomial in generalized homogeneous coordinates: the monomial `x^m`
/// becomes `prod_j z_j^(<v_j, m> + 1)` over the chosen points `v_j` of Delta.
pub fn homogeneous_form(
    delta: &LatticePolytope,
    terms: &[LaurentTerm],
    variables: VariableSet,
) -> Result<HomogeneousForm, PencilError> {
    let dual = delta.polar_dual()?;
    let vars: Vec<LatticePoint> = match variables {
        VariableSet::Vertices => delta.vertices().to_vec(),
        VariableSet::AllPoints => delta.lattice_points().into_iter().filter(|v| !v.is_origin()).collect(),
    };
    let mut monomials = Vec::with_capacity(terms.len());
    for t in terms {
        let m = LatticePoint(t.exponent.clone());
        if m.dim() != delta.dim() {
            return Err(PencilError::DimensionMismatch(m));
        }
        if !dual.contains(&t.exponent) {
            return Err(PencilError::UnsupportedMonomial(m));
        }
        let exponents = vars
            .iter()
            .map(|v| u32::try_from(v.pairing(&m) + 1).expect("reflexivity makes exponents nonnegative"))
            .collect();
        monomials.push(HomogeneousMonomial {
            exponents,
            coeff: t.coeff.clone(),
            has_psi: t.has_psi,
        });
    }
    Ok(HomogeneousForm {
        variables: vars,
        monomials,
    })
}

/// Smoothness over Q in the vertex-pencil convention: singular iff `psi = 0`
/// or the family's hypergeometric argument equals 1.
pub fn is_smooth_member(family: FamilyTag, psi: &BigRational) -> bool {
    is_smooth_for(&family.hypergeometric().argument, psi)
}

/// The same test in the family's printed coefficient convention.
pub fn is_smooth_printed(family: FamilyTag, psi: &BigRational) -> bool {
    is_smooth_for(&family.printed().hypergeometric.argument, psi)
}

fn is_smooth_for(argument: &crate::hypergeometric::Argument, psi: &BigRational) -> bool {
    if psi.is_zero() {
        return false;
    }
    argument.eval(psi).is_some_and(|z| !z.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn poly(rows: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::from_rows(rows).unwrap()
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn p3() -> LatticePolytope {
        poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]])
    }

    #[test]
    fn quartic_vertex_pencil() {
        let pencil = build_vertex_pencil(&p3()).unwrap();
        let mut exps = pencil.exponents();
        exps.sort();
        // The dual vertices are the corner monomials of the degree-4 simplex;
        // `x + y + z + 1/(xyz)` is the pencil of the dual polytope instead.
        assert_eq!(pencil.terms.len(), 5);
        assert!(pencil.terms[pencil.psi_term_index].has_psi);
        assert_eq!(exps[0], vec![-1, -1, -1]);
        let at0 = pencil.specialize(&BigRational::zero());
        assert_eq!(at0.len(), 4);
        assert_eq!(pencil.specialize(&q("3/2")).constant_term(), q("3/2"));
    }

    #[test]
    fn pencil_of_the_dual_simplex() {
        let dual = p3().polar_dual().unwrap();
        let pencil = build_vertex_pencil(&dual).unwrap();
        assert_eq!(pencil.to_string(), "x^-1*y^-1*z^-1 + z + y + x + psi");
    }

    #[test]
    fn cross_polytope_pencil() {
        let cross = poly(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]);
        let pencil = build_vertex_pencil(&cross).unwrap();
        let mut exps = pencil.exponents();
        exps.pop();
        assert_eq!(exps, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
    }

    #[test]
    fn weighted_simplex_pencil() {
        let p = poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-3, -1, -1]]);
        let pencil = build_vertex_pencil(&p).unwrap();
        let exps = pencil.exponents();
        assert_eq!(
            exps,
            vec![vec![-1, -1, -1], vec![-1, -1, 5], vec![-1, 5, -1], vec![1, -1, -1], vec![0, 0, 0]]
        );
    }

    #[test]
    fn homogeneous_fermat_quartic() {
        let pencil = build_vertex_pencil(&p3()).unwrap();
        let form = homogeneous_form(&p3(), &pencil.terms, VariableSet::Vertices).unwrap();
        let mut exps: Vec<Vec<u32>> = form.monomials.iter().map(|m| m.exponents.clone()).collect();
        exps.sort();
        assert_eq!(
            exps,
            vec![vec![0, 0, 0, 4], vec![0, 0, 4, 0], vec![0, 4, 0, 0], vec![1, 1, 1, 1], vec![4, 0, 0, 0]]
        );
    }

    #[test]
    fn homogeneous_sextic() {
        let p = poly(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-3, -1, -1]]);
        let pencil = build_vertex_pencil(&p).unwrap();
        let form = homogeneous_form(&p, &pencil.terms, VariableSet::Vertices).unwrap();
        let mut exps: Vec<Vec<u32>> = form.monomials.iter().map(|m| m.exponents.clone()).collect();
        exps.sort();
        assert_eq!(
            exps,
            vec![vec![0, 0, 0, 6], vec![0, 0, 6, 0], vec![0, 6, 0, 0], vec![1, 1, 1, 1], vec![2, 0, 0, 0]]
        );
    }

    #[test]
    fn origin_monomial_is_the_product() {
        let term = LaurentTerm {
            exponent: vec![0, 0, 0],
            coeff: BigRational::one(),
            has_psi: false,
        };
        let form = homogeneous_form(&p3(), &[term], VariableSet::AllPoints).unwrap();
        assert_eq!(form.monomials[0].exponents, vec![1; 4]);
    }

    #[test]
    fn rejects_monomials_outside_the_dual() {
        let term = LaurentTerm {
            exponent: vec![5, 0, 0],
            coeff: BigRational::one(),
            has_psi: false,
        };
        assert_eq!(
            homogeneous_form(&p3(), &[term], VariableSet::Vertices),
            Err(PencilError::UnsupportedMonomial(LatticePoint(vec![5, 0, 0])))
        );
    }

    #[test]
    fn smooth_members() {
        assert!(!is_smooth_member(FamilyTag::EllipticP1xP1, &q("4")));
        assert!(!is_smooth_member(FamilyTag::EllipticP1xP1, &q("-4")));
        assert!(!is_smooth_member(FamilyTag::GroupII, &q("4")));
        assert!(is_smooth_member(FamilyTag::Quartic, &q("1")));
        assert!(!is_smooth_printed(FamilyTag::Quartic, &q("1")));
        assert!(!is_smooth_member(FamilyTag::Sextic, &q("0")));
    }

    #[test]
    fn expansion_and_torus_evaluation() {
        let f = LaurentPolynomial::new(1, [(vec![1], q("1")), (vec![-1], q("1"))]);
        assert_eq!(f.pow(2).constant_term(), q("2"));
        let p = Prime::new(7).unwrap();
        // x + 1/x at x = 3: 3 + 5 = 8 = 1 mod 7
        assert_eq!(f.eval_mod(&[3], p), Some(1));
    }
}

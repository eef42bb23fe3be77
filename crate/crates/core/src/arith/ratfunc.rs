//! Univariate rational functions over Q, kept in lowest terms.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use super::qpoly::QPoly;

/// `num/den` with `gcd(num, den) = 1` and `den` monic. Zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    /// Panics if `den` is zero.
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading().expect("nonzero").recip();
        RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: QPoly::zero(),
            den: QPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(QPoly::one())
    }

    pub fn from_poly(p: QPoly) -> Self {
        RatFunc {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc::from_poly(QPoly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        RatFunc::from_poly(QPoly::from_ints(&[c]))
    }

    pub fn t() -> Self {
        RatFunc::from_poly(QPoly::t())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value as a constant, if this function is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(BigRational::zero()),
            (Some(0), Some(0)) => Some(self.num.coeff(0) / self.den.coeff(0)),
            _ => None,
        }
    }

    pub fn recip(&self) -> Self {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Limit as t -> infinity; `None` if the function grows without bound.
    pub fn at_infinity(&self) -> Option<BigRational> {
        let nd = match self.num.degree() {
            None => return Some(BigRational::zero()),
            Some(d) => d,
        };
        let dd = self.den.degree().expect("nonzero denominator");
        match nd.cmp(&dd) {
            std::cmp::Ordering::Less => Some(BigRational::zero()),
            std::cmp::Ordering::Equal => Some(self.num.coeff(nd) / self.den.coeff(dd)),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// `f(c t)`
    pub fn scale_var(&self, c: &BigRational) -> Self {
        RatFunc::new(self.num.scale_var(c), self.den.scale_var(c))
    }

    /// `f(1/t)`
    pub fn invert_var(&self) -> Self {
        let d = self
            .num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0));
        RatFunc::new(self.num.reversed(d), self.den.reversed(d))
    }

    /// `f(t^k)`
    pub fn inflate(&self, k: usize) -> Self {
        RatFunc::new(self.num.inflate(k), self.den.inflate(k))
    }

    /// `g` with `f(t) = g(t^k)`, if the reduced form only involves powers of `t^k`.
    pub fn deflate(&self, k: usize) -> Option<Self> {
        Some(RatFunc::new(self.num.deflate(k)?, self.den.deflate(k)?))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatFunc::new(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &QPoly) -> Self {
        RatFunc::new(&self.num * p, self.den.clone())
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    /// Order of vanishing at `t = 0` (negative for a pole); `None` for zero.
    pub fn order_at_zero(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().expect("nonzero") as i64;
        Some(vn - vd)
    }

    pub fn display_in(&self, var: &str) -> String {
        let wrap = |p: &QPoly| {
            let s = p.display_in(var);
            let bare = s.chars().all(|c| c.is_ascii_alphanumeric() || c == '^' || c == '/' || c == '*')
                || (s.starts_with('-') && !s[1..].contains([' ', '+']));
            if bare {
                s
            } else {
                format!("({s})")
            }
        };
        if self.den == QPoly::one() {
            return self.num.display_in(var);
        }
        // A constant denominator reads better as a rational factor.
        if self.den.degree() == Some(0) {
            let c = self.den.coeff(0).recip();
            return self.num.scale(&c).display_in(var);
        }
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by the zero rational function");
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl From<QPoly> for RatFunc {
    fn from(p: QPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

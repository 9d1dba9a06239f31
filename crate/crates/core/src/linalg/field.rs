//! Exact scalar fields: the Gaussian rationals Q(i) and quadratic extensions Q(i)(√d).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Operations shared by every exact scalar field used in this crate.
pub trait Field: Clone + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_gauss(g: &Gauss) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv().expect("division by zero"))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_gauss(&Gauss::from_int(n))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact square root of a nonnegative rational, if it is rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gauss {
    pub re: Rational,
    pub im: Rational,
}

impl Gauss {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gauss {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Gauss::real(rat_int(n))
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Gauss::new(rat_int(re), rat_int(im))
    }

    pub fn i() -> Self {
        Gauss::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Gauss::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`
    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact square root inside Q(i), when one exists.
    pub fn sqrt(&self) -> Option<Gauss> {
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rational_sqrt(&-self.re.clone()).map(|r| Gauss::new(Rational::zero(), r))
            } else {
                rational_sqrt(&self.re).map(Gauss::real)
            };
        }
        // (x + iy)^2 = re + i im  =>  x^2 = (re + |z|)/2, y = im / 2x
        let modulus = rational_sqrt(&self.norm())?;
        let half = rat(1, 2);
        let x = rational_sqrt(&((&self.re + &modulus) * &half))?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / (&x * rat_int(2));
        Some(Gauss::new(x, y))
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -self.im.clone())
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl Field for Gauss {
    fn zero() -> Self {
        Gauss::new(Rational::zero(), Rational::zero())
    }
    fn one() -> Self {
        Gauss::new(Rational::one(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Gauss::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Gauss::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Gauss::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
    fn neg(&self) -> Self {
        Gauss::new(-self.re.clone(), -self.im.clone())
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Gauss::new(&self.re / &n, -(&self.im / &n)))
    }
    fn from_gauss(g: &Gauss) -> Self {
        g.clone()
    }
}

/// An element `a + b·√d` of the quadratic extension Q(i)(√d).
///
/// The radicand travels with the elements that need it; `b ≠ 0` implies `d`
/// is present. Mixing elements with different radicands is a logic error.
#[derive(Clone, Debug)]
pub struct Quad {
    pub a: Gauss,
    pub b: Gauss,
    pub d: Option<Arc<Gauss>>,
}

impl Quad {
    pub fn new(a: Gauss, b: Gauss, d: Arc<Gauss>) -> Self {
        Quad { a, b, d: Some(d) }
    }

    /// The element `√d` itself.
    pub fn root(d: Arc<Gauss>) -> Self {
        Quad::new(Gauss::zero(), Gauss::one(), d)
    }

    pub fn radicand(&self) -> Option<&Gauss> {
        self.d.as_deref()
    }

    /// The value as a Gaussian rational, when the √d part vanishes.
    pub fn lower(&self) -> Option<Gauss> {
        self.b.is_zero().then(|| self.a.clone())
    }

    fn merged_radicand(&self, rhs: &Self) -> Option<Arc<Gauss>> {
        match (&self.d, &rhs.d) {
            (Some(x), Some(y)) => {
                debug_assert!(x == y, "mixed radicands {x} and {y}");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }
}

impl PartialEq for Quad {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl Eq for Quad {}

impl Hash for Quad {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.d, self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (Some(d), false) => write!(f, "({})+({})*sqrt({})", self.a, self.b, d),
            (None, false) => unreachable!("nonzero root part without radicand"),
        }
    }
}

impl Field for Quad {
    fn zero() -> Self {
        Quad {
            a: Gauss::zero(),
            b: Gauss::zero(),
            d: None,
        }
    }
    fn one() -> Self {
        Quad {
            a: Gauss::one(),
            b: Gauss::zero(),
            d: None,
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Quad {
            a: self.a.add(&rhs.a),
            b: self.b.add(&rhs.b),
            d: self.merged_radicand(rhs),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Quad {
            a: self.a.sub(&rhs.a),
            b: self.b.sub(&rhs.b),
            d: self.merged_radicand(rhs),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let d = self.merged_radicand(rhs);
        let mut a = self.a.mul(&rhs.a);
        if !self.b.is_zero() && !rhs.b.is_zero() {
            let radicand = d.as_ref().expect("root part without radicand");
            a = a.add(&self.b.mul(&rhs.b).mul(radicand));
        }
        let b = self.a.mul(&rhs.b).add(&self.b.mul(&rhs.a));
        Quad { a, b, d }
    }
    fn neg(&self) -> Self {
        Quad {
            a: self.a.neg(),
            b: self.b.neg(),
            d: self.d.clone(),
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.b.is_zero() {
            return self.a.inv().map(|a| Quad {
                a,
                b: Gauss::zero(),
                d: self.d.clone(),
            });
        }
        let d = self.d.as_ref().expect("root part without radicand");
        // (a + b√d)^{-1} = (a - b√d) / (a² - b²d); the norm is nonzero for a non-square d
        let norm = self.a.mul(&self.a).sub(&self.b.mul(&self.b).mul(d));
        let ninv = norm.inv()?;
        Some(Quad {
            a: self.a.mul(&ninv),
            b: self.b.neg().mul(&ninv),
            d: self.d.clone(),
        })
    }
    fn from_gauss(g: &Gauss) -> Self {
        Quad {
            a: g.clone(),
            b: Gauss::zero(),
            d: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_arithmetic() {
        let z = Gauss::from_ints(1, 2);
        let w = Gauss::from_ints(3, -1);
        assert_eq!(z.mul(&w), Gauss::from_ints(5, 5));
        assert_eq!(z.mul(&z.inv().unwrap()), Gauss::one());
        assert!(Gauss::zero().inv().is_none());
        assert_eq!(Gauss::i().mul(&Gauss::i()), Gauss::from_int(-1));
    }

    #[test]
    fn gauss_sqrt() {
        assert_eq!(Gauss::from_int(-4).sqrt(), Some(Gauss::from_ints(0, 2)));
        assert_eq!(Gauss::real(rat(9, 16)).sqrt(), Some(Gauss::real(rat(3, 4))));
        // (2+i)^2 = 3+4i
        let r = Gauss::from_ints(3, 4).sqrt().unwrap();
        assert_eq!(r.mul(&r), Gauss::from_ints(3, 4));
        // 2i = (1+i)^2
        let r = Gauss::from_ints(0, 2).sqrt().unwrap();
        assert_eq!(r.mul(&r), Gauss::from_ints(0, 2));
        assert!(Gauss::from_int(2).sqrt().is_none());
        assert!(Gauss::from_ints(1, 1).sqrt().is_none());
    }

    #[test]
    fn quad_arithmetic() {
        let d = Arc::new(Gauss::from_int(2));
        let r = Quad::root(d.clone());
        assert_eq!(r.mul(&r), Quad::from_i64(2));
        let x = Quad::new(Gauss::from_int(1), Gauss::from_ints(0, 1), d);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).is_one());
        assert_eq!(x.mul(&y).lower(), Some(Gauss::one()));
        assert!(Quad::from_i64(3).sub(&Quad::from_i64(3)).is_zero());
    }
}

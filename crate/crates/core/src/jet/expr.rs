use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::{Jet2, JetError};

/// A closed scalar-field expression over the two chart parameters `(u, v)`.
///
/// Expressions are immutable trees with shared subterms; cloning is cheap.
/// They are evaluated either to plain values or to [`Jet2`]s, and each
/// primitive checks its own domain so that a failure names the offending
/// operation instead of surfacing as a stray NaN.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

#[derive(Debug)]
enum Node {
    Const(f64),
    U,
    V,
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Powi(Expr, i32),
    Powf(Expr, f64),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Ln(Expr),
    Sqrt(Expr),
    Atan2(Expr, Expr),
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::U => write!(f, "u"),
            Node::V => write!(f, "v"),
            Node::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Sub(a, b) => write!(f, "({a:?} - {b:?})"),
            Node::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            Node::Div(a, b) => write!(f, "({a:?} / {b:?})"),
            Node::Neg(a) => write!(f, "-{a:?}"),
            Node::Powi(a, n) => write!(f, "{a:?}^{n}"),
            Node::Powf(a, p) => write!(f, "{a:?}^{p}"),
            Node::Sin(a) => write!(f, "sin({a:?})"),
            Node::Cos(a) => write!(f, "cos({a:?})"),
            Node::Exp(a) => write!(f, "exp({a:?})"),
            Node::Ln(a) => write!(f, "ln({a:?})"),
            Node::Sqrt(a) => write!(f, "sqrt({a:?})"),
            Node::Atan2(y, x) => write!(f, "atan2({y:?}, {x:?})"),
        }
    }
}

/// Arithmetic shared by `f64` and `Jet2` so one tree walk serves both.
trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lift(c: f64) -> Self;
    fn coord_u(u: f64) -> Self;
    fn coord_v(v: f64) -> Self;
    fn val(&self) -> f64;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan2(self, x: Self) -> Self;
}

impl Scalar for f64 {
    fn lift(c: f64) -> Self {
        c
    }
    fn coord_u(u: f64) -> Self {
        u
    }
    fn coord_v(v: f64) -> Self {
        v
    }
    fn val(&self) -> f64 {
        *self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

impl Scalar for Jet2 {
    fn lift(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn coord_u(u: f64) -> Self {
        Jet2::var_u(u)
    }
    fn coord_v(v: f64) -> Self {
        Jet2::var_v(v)
    }
    fn val(&self) -> f64 {
        self.value
    }
    fn powi(self, n: i32) -> Self {
        Jet2::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        Jet2::powf(self, p)
    }
    fn sin(self) -> Self {
        Jet2::sin(self)
    }
    fn cos(self) -> Self {
        Jet2::cos(self)
    }
    fn exp(self) -> Self {
        Jet2::exp(self)
    }
    fn ln(self) -> Self {
        Jet2::ln(self)
    }
    fn sqrt(self) -> Self {
        Jet2::sqrt(self)
    }
    fn atan2(self, x: Self) -> Self {
        Jet2::atan2(self, x)
    }
}

fn domain(primitive: &'static str, value: f64) -> JetError {
    JetError::Domain { primitive, value }
}

impl Expr {
    fn node(n: Node) -> Self {
        Expr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    /// The first chart coordinate.
    pub fn u() -> Self {
        Self::node(Node::U)
    }

    /// The second chart coordinate.
    pub fn v() -> Self {
        Self::node(Node::V)
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::node(Node::Powi(self.clone(), n))
    }

    /// Real power with a constant exponent. The base must be positive unless
    /// the exponent is a non-negative integer.
    pub fn powf(&self, p: f64) -> Self {
        Self::node(Node::Powf(self.clone(), p))
    }

    pub fn sin(&self) -> Self {
        Self::node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::node(Node::Cos(self.clone()))
    }

    pub fn exp(&self) -> Self {
        Self::node(Node::Exp(self.clone()))
    }

    pub fn ln(&self) -> Self {
        Self::node(Node::Ln(self.clone()))
    }

    pub fn sqrt(&self) -> Self {
        Self::node(Node::Sqrt(self.clone()))
    }

    pub fn atan2(y: &Expr, x: &Expr) -> Self {
        Self::node(Node::Atan2(y.clone(), x.clone()))
    }

    /// `Some(c)` when the expression is a bare constant.
    pub fn as_constant(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Value of the field at `p`.
    pub fn eval(&self, p: (f64, f64)) -> Result<f64, JetError> {
        self.walk::<f64>(p)
    }

    /// Value, gradient and Hessian of the field at `p`.
    pub fn eval_jet2(&self, p: (f64, f64)) -> Result<Jet2, JetError> {
        let j = self.walk::<Jet2>(p)?;
        if !j.is_finite() {
            return Err(JetError::NonFinite { u: p.0, v: p.1 });
        }
        Ok(j)
    }

    fn walk<T: Scalar>(&self, p: (f64, f64)) -> Result<T, JetError> {
        Ok(match &*self.0 {
            Node::Const(c) => T::lift(*c),
            Node::U => T::coord_u(p.0),
            Node::V => T::coord_v(p.1),
            Node::Add(a, b) => a.walk::<T>(p)? + b.walk::<T>(p)?,
            Node::Sub(a, b) => a.walk::<T>(p)? - b.walk::<T>(p)?,
            Node::Mul(a, b) => a.walk::<T>(p)? * b.walk::<T>(p)?,
            Node::Div(a, b) => {
                let num = a.walk::<T>(p)?;
                let den = b.walk::<T>(p)?;
                if den.val() == 0.0 {
                    return Err(domain("div", den.val()));
                }
                num / den
            }
            Node::Neg(a) => -a.walk::<T>(p)?,
            Node::Powi(a, n) => {
                let x = a.walk::<T>(p)?;
                if *n < 0 && x.val() == 0.0 {
                    return Err(domain("powi", x.val()));
                }
                x.powi(*n)
            }
            Node::Powf(a, e) => {
                let x = a.walk::<T>(p)?;
                let integral = e.fract() == 0.0 && *e >= 0.0;
                if !integral && x.val() <= 0.0 {
                    return Err(domain("powf", x.val()));
                }
                if integral && *e <= i32::MAX as f64 {
                    x.powi(*e as i32)
                } else {
                    x.powf(*e)
                }
            }
            Node::Sin(a) => a.walk::<T>(p)?.sin(),
            Node::Cos(a) => a.walk::<T>(p)?.cos(),
            Node::Exp(a) => a.walk::<T>(p)?.exp(),
            Node::Ln(a) => {
                let x = a.walk::<T>(p)?;
                if x.val() <= 0.0 {
                    return Err(domain("ln", x.val()));
                }
                x.ln()
            }
            Node::Sqrt(a) => {
                let x = a.walk::<T>(p)?;
                // the derivative diverges at zero, so zero is excluded too
                if x.val() <= 0.0 {
                    return Err(domain("sqrt", x.val()));
                }
                x.sqrt()
            }
            Node::Atan2(y, x) => {
                let yv = y.walk::<T>(p)?;
                let xv = x.walk::<T>(p)?;
                if yv.val() == 0.0 && xv.val() == 0.0 {
                    return Err(domain("atan2", 0.0));
                }
                yv.atan2(xv)
            }
        })
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::node(Node::$variant(self, rhs))
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::node(Node::$variant(self.clone(), rhs.clone()))
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::node(Node::$variant(self, Expr::constant(rhs)))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::node(Node::$variant(Expr::constant(self), rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::node(Node::Neg(self))
    }
}

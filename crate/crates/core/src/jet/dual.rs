use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value, gradient and Hessian of a scalar field at a point of a
/// two-parameter domain `(u, v)`.
///
/// Only the mixed partial `d_uv` is stored; the Hessian is symmetric by
/// construction. Arithmetic on `Jet2` propagates the chain and product rules
/// through second order, so any composition of the supported primitives
/// yields exact-to-roundoff first and second partials.
///
/// The elementary functions here are unchecked: feeding a value outside a
/// primitive's domain produces non-finite entries. Checked evaluation lives
/// in [`Expr`](super::Expr).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub d_u: f64,
    pub d_v: f64,
    pub d_uu: f64,
    pub d_uv: f64,
    pub d_vv: f64,
}

impl Jet2 {
    pub const fn new(value: f64, d_u: f64, d_v: f64, d_uu: f64, d_uv: f64, d_vv: f64) -> Self {
        Self { value, d_u, d_v, d_uu, d_uv, d_vv }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Seed for the first coordinate: `∂u/∂u = 1`.
    pub const fn var_u(u: f64) -> Self {
        Self::new(u, 1.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Seed for the second coordinate: `∂v/∂v = 1`.
    pub const fn var_v(v: f64) -> Self {
        Self::new(v, 0.0, 1.0, 0.0, 0.0, 0.0)
    }

    pub fn gradient(&self) -> [f64; 2] {
        [self.d_u, self.d_v]
    }

    pub fn hessian(&self) -> [[f64; 2]; 2] {
        [[self.d_uu, self.d_uv], [self.d_uv, self.d_vv]]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|x| x.is_finite())
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.value, self.d_u, self.d_v, self.d_uu, self.d_uv, self.d_vv]
    }

    /// Entrywise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &Jet2) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(
            self.value * s,
            self.d_u * s,
            self.d_v * s,
            self.d_uu * s,
            self.d_uv * s,
            self.d_vv * s,
        )
    }

    /// Compose with a scalar function `g` given `g(value)`, `g'(value)` and
    /// `g''(value)`.
    pub fn chain(self, g0: f64, g1: f64, g2: f64) -> Self {
        Self {
            value: g0,
            d_u: g1 * self.d_u,
            d_v: g1 * self.d_v,
            d_uu: g2 * self.d_u * self.d_u + g1 * self.d_uu,
            d_uv: g2 * self.d_u * self.d_v + g1 * self.d_uv,
            d_vv: g2 * self.d_v * self.d_v + g1 * self.d_vv,
        }
    }

    pub fn recip(self) -> Self {
        let x = self.value;
        let inv = 1.0 / x;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.value;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn powi(self, n: i32) -> Self {
        let x = self.value;
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let nf = f64::from(n);
                let g2 = if n == 2 { 2.0 } else { nf * (nf - 1.0) * x.powi(n - 2) };
                self.chain(x.powi(n), nf * x.powi(n - 1), g2)
            }
        }
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.value;
        if p == 0.0 {
            return Self::constant(1.0);
        }
        if p == 1.0 {
            return self;
        }
        let g2 = if p == 2.0 { 2.0 } else { p * (p - 1.0) * x.powf(p - 2.0) };
        self.chain(x.powf(p), p * x.powf(p - 1.0), g2)
    }

    /// Two-argument arctangent `atan2(self, x)` on the standard branch.
    /// Singular at `self = x = 0`.
    pub fn atan2(self, x: Jet2) -> Self {
        let y = self;
        let s = x.value * x.value + y.value * y.value;
        // numerator of the first derivative: x y' - y x'
        let n_u = x.value * y.d_u - y.value * x.d_u;
        let n_v = x.value * y.d_v - y.value * x.d_v;
        let s_u = 2.0 * (x.value * x.d_u + y.value * y.d_u);
        let s_v = 2.0 * (x.value * x.d_v + y.value * y.d_v);
        let n_uu = x.value * y.d_uu - y.value * x.d_uu;
        let n_vv = x.value * y.d_vv - y.value * x.d_vv;
        let n_uv = x.d_v * y.d_u + x.value * y.d_uv - y.d_v * x.d_u - y.value * x.d_uv;
        let s2 = s * s;
        Self {
            value: y.value.atan2(x.value),
            d_u: n_u / s,
            d_v: n_v / s,
            d_uu: (n_uu * s - n_u * s_u) / s2,
            d_uv: (n_uv * s - n_u * s_v) / s2,
            d_vv: (n_vv * s - n_v * s_v) / s2,
        }
    }
}

impl From<f64> for Jet2 {
    fn from(value: f64) -> Self {
        Self::constant(value)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value + o.value,
            self.d_u + o.d_u,
            self.d_v + o.d_v,
            self.d_uu + o.d_uu,
            self.d_uv + o.d_uv,
            self.d_vv + o.d_vv,
        )
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value - o.value,
            self.d_u - o.d_u,
            self.d_v - o.d_v,
            self.d_uu - o.d_uu,
            self.d_uv - o.d_uv,
            self.d_vv - o.d_vv,
        )
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value * o.value,
            d_u: self.d_u * o.value + self.value * o.d_u,
            d_v: self.d_v * o.value + self.value * o.d_v,
            d_uu: self.d_uu * o.value + 2.0 * self.d_u * o.d_u + self.value * o.d_uu,
            d_uv: self.d_uv * o.value
                + self.d_u * o.d_v
                + self.d_v * o.d_u
                + self.value * o.d_uv,
            d_vv: self.d_vv * o.value + 2.0 * self.d_v * o.d_v + self.value * o.d_vv,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, s: f64) -> Jet2 {
        self.scale(s)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, s: f64) -> Jet2 {
        Jet2 { value: self.value + s, ..self }
    }
}

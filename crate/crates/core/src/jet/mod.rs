//! Second-order forward-mode differentiation of scalar fields on a
//! two-parameter domain.
//!
//! A field is described by an [`Expr`] tree; [`eval_jet2`] pushes a
//! [`Jet2`] through it and returns the value, gradient and Hessian at a point.
//! [`finite_difference_jet2`] recomputes the same six numbers from point
//! values alone and is kept as an independent check.

mod dual;
mod expr;
mod fd;

pub use dual::Jet2;
pub use expr::Expr;
pub use fd::finite_difference_jet2;

use thiserror::Error;

/// Default central-difference step for O(1)-scaled inputs.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("domain error in `{primitive}` at argument {value}")]
    Domain { primitive: &'static str, value: f64 },
    #[error("non-finite derivative at ({u}, {v})")]
    NonFinite { u: f64, v: f64 },
    #[error("finite-difference stencil of step {h} leaves the domain at ({u}, {v})")]
    StencilOutsideDomain { u: f64, v: f64, h: f64 },
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Closed parameter rectangle `[u_min, u_max] × [v_min, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Rect {
    pub const fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Self {
        Self { u_min, u_max, v_min, v_max }
    }

    pub fn is_valid(&self) -> bool {
        [self.u_min, self.u_max, self.v_min, self.v_max].iter().all(|x| x.is_finite())
            && self.u_min < self.u_max
            && self.v_min < self.v_max
    }

    pub fn u_span(&self) -> f64 {
        self.u_max - self.u_min
    }

    pub fn v_span(&self) -> f64 {
        self.v_max - self.v_min
    }

    /// Membership with a relative slack of `1e-12` of each span, so grid
    /// nodes computed by accumulation still count as inside.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let su = 1e-12 * self.u_span().abs().max(self.u_min.abs());
        let sv = 1e-12 * self.v_span().abs().max(self.v_min.abs());
        p.0 >= self.u_min - su && p.0 <= self.u_max + su && p.1 >= self.v_min - sv && p.1 <= self.v_max + sv
    }
}

/// Value, gradient and Hessian of `f` at `p`.
pub fn eval_jet2(f: &Expr, p: (f64, f64)) -> Result<Jet2, JetError> {
    f.eval_jet2(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2cos2t() -> Expr {
        Expr::u().powi(2) * (2.0 * Expr::v()).cos()
    }

    #[test]
    fn polar_quadratic_jet_at_unit_point() {
        let j = eval_jet2(&r2cos2t(), (1.0, 0.0)).unwrap();
        let expected = [1.0, 2.0, 0.0, 2.0, 0.0, -4.0];
        for (a, b) in j.as_array().iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-14, "{:?}", j);
        }
    }

    #[test]
    fn polar_quadratic_matches_finite_differences() {
        let f = r2cos2t();
        let j = eval_jet2(&f, (1.0, 0.0)).unwrap();
        let fd = finite_difference_jet2(&f, (1.0, 0.0), 1e-4, None).unwrap();
        assert!(j.max_abs_diff(&fd) < 1e-6, "{j:?} vs {fd:?}");
    }

    #[test]
    fn constant_and_coordinate_fields() {
        let c = eval_jet2(&Expr::constant(7.0), (0.3, -2.0)).unwrap();
        assert_eq!(c.as_array(), [7.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let u = eval_jet2(&Expr::u(), (1.5, 2.5)).unwrap();
        assert_eq!(u.as_array(), [1.5, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn finite_differences_of_zero_are_exactly_zero() {
        let fd = finite_difference_jet2(&Expr::constant(0.0), (0.5, 0.5), 1e-4, None).unwrap();
        assert_eq!(fd.as_array(), [0.0; 6]);
    }

    #[test]
    fn mixed_partial_of_product() {
        let f = Expr::u() * Expr::v();
        let fd = finite_difference_jet2(&f, (2.0, 3.0), 1e-3, None).unwrap();
        assert!((fd.d_uv - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stencil_leaving_domain_is_rejected() {
        let d = Rect::new(0.0, 1.0, 0.0, 1.0);
        let err = finite_difference_jet2(&Expr::u(), (1e-5, 0.5), 1e-4, Some(&d)).unwrap_err();
        assert!(matches!(err, JetError::StencilOutsideDomain { .. }));
        assert!(matches!(
            finite_difference_jet2(&Expr::u(), (0.5, 0.5), 0.0, Some(&d)),
            Err(JetError::InvalidStep(_))
        ));
    }
}

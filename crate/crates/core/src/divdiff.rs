//! First-order divided differences of a two-variable function in either
//! argument.

use crate::function::Function2D;
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// `Δ₁φ(x₁, x₂, y) = (φ(x₁, y) − φ(x₂, y)) / (x₁ − x₂)`
    First,
    /// `Δ₂φ(x, y₁, y₂) = (φ(x, y₁) − φ(x, y₂)) / (y₁ − y₂)`
    Second,
}

/// Divided difference of `source` along `axis`, as a function of three reals
/// in natural argument order.
#[derive(Clone, Debug)]
pub struct DividedDifferenceKernel {
    source: Function2D,
    axis: Axis,
}

impl DividedDifferenceKernel {
    pub fn new(source: Function2D, axis: Axis) -> Self {
        DividedDifferenceKernel { source, axis }
    }

    pub fn source(&self) -> &Function2D {
        &self.source
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    #[inline]
    pub fn eval(&self, p: f64, q: f64, r: f64) -> C64 {
        divided_diff(self, p, q, r)
    }
}

/// Separation below which the quotient is replaced by the partial derivative
/// at the midpoint.
#[inline]
pub fn diagonal_threshold(p: f64, q: f64) -> f64 {
    f64::EPSILON.sqrt() * (1.0 + p.abs() + q.abs())
}

/// For [`Axis::First`] the arguments are `(x₁, x₂, y)`; for [`Axis::Second`]
/// they are `(x, y₁, y₂)`. Symmetric in the two differenced arguments.
pub fn divided_diff(kernel: &DividedDifferenceKernel, p: f64, q: f64, r: f64) -> C64 {
    let phi = &kernel.source;
    match kernel.axis {
        Axis::First => {
            let (a, b, y) = (p, q, r);
            if (a - b).abs() > diagonal_threshold(a, b) {
                (phi.eval(a, y) - phi.eval(b, y)) / (a - b)
            } else {
                phi.d_dx(0.5 * (a + b), y)
            }
        }
        Axis::Second => {
            let (x, a, b) = (p, q, r);
            if (a - b).abs() > diagonal_threshold(a, b) {
                (phi.eval(x, a) - phi.eval(x, b)) / (a - b)
            } else {
                phi.d_dy(x, 0.5 * (a + b))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::random::{seeded, uniform};

    fn kernel(src: &str, axis: Axis) -> DividedDifferenceKernel {
        DividedDifferenceKernel::new(Function2D::parse(src).unwrap(), axis)
    }

    #[test]
    fn worked_values() {
        let k = kernel("x^2*y", Axis::First);
        assert_eq!(divided_diff(&k, 1.0, 2.0, 3.0), C64::new(9.0, 0.0));
        assert_eq!(divided_diff(&k, 1.0, 1.0, 3.0), C64::new(6.0, 0.0));

        let k = kernel("x*sin(y)", Axis::Second);
        let v = divided_diff(&k, 2.0, 0.0, PI / 2.0);
        assert!((v.re - 4.0 / PI).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn coincident_arguments_give_partials() {
        let f = Function2D::parse("exp(x)*cos(y) + x^3*y^2").unwrap();
        let k1 = DividedDifferenceKernel::new(f.clone(), Axis::First);
        let k2 = DividedDifferenceKernel::new(f.clone(), Axis::Second);
        let mut rng = seeded(12);
        for _ in 0..50 {
            let (p, r) = (uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0));
            assert_eq!(k1.eval(p, p, r), f.d_dx(p, r));
            assert_eq!(k2.eval(r, p, p), f.d_dy(r, p));
        }
    }

    #[test]
    fn symmetric_in_differenced_arguments() {
        let f = Function2D::parse("sin(x*y) + x^4 - y").unwrap();
        let k1 = DividedDifferenceKernel::new(f.clone(), Axis::First);
        let k2 = DividedDifferenceKernel::new(f, Axis::Second);
        let mut rng = seeded(13);
        for _ in 0..200 {
            let p = uniform(&mut rng, -3.0, 3.0);
            let q = if rng_coin(&mut rng) { p + 1e-10 } else { uniform(&mut rng, -3.0, 3.0) };
            let r = uniform(&mut rng, -3.0, 3.0);
            assert_eq!(k1.eval(p, q, r), k1.eval(q, p, r));
            assert_eq!(k2.eval(r, p, q), k2.eval(r, q, p));
        }
    }

    fn rng_coin(rng: &mut crate::random::TrialRng) -> bool {
        uniform(rng, 0.0, 1.0) < 0.3
    }

    #[test]
    fn continuous_across_the_diagonal() {
        for src in ["x^2*y", "sin(x)*cos(y)", "exp(x/2)*y^3", "x^4 - x*y"] {
            let k = kernel(src, Axis::First);
            let mut constant: f64 = 0.0;
            for (p, r) in [(0.3, -0.7), (1.2, 0.4), (-0.9, 1.5)] {
                let on = k.eval(p, p, r);
                for eps in [1e-3, 1e-5] {
                    let off = k.eval(p, p + eps, r);
                    constant = constant.max((off - on).norm() / eps);
                }
            }
            assert!(constant.is_finite() && constant < 50.0, "{src}: C = {constant}");
        }
    }
}

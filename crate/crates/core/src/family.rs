//! The fixed test family used by every seeded trial.
//!
//! Bivariate members are real polynomials of degree at most four in each
//! variable and products/sums of `sin` and `cos`. Trials draw a member by
//! index from the trial RNG, so a seed fully determines the function.
//! Univariate members (for separable `u(x)v(y)` trials) are polynomials of
//! degree at most four with seeded coefficients in `[−1, 1]`, `sin(kx)` and
//! `cos(kx)` with seeded `k ∈ [0.5, 2]`.

use crate::function::{cos_atoms, sin_atoms, FourierMeasure, Function2D};
use crate::linalg::C64;
use crate::random::{index, uniform, TrialRng};

/// Every family member declares this radius; trial spectra lie in `[−1, 1]`.
pub const FAMILY_RADIUS: f64 = 2.0;

pub const POLYNOMIALS: &[&str] = &[
    "x",
    "y",
    "x*y",
    "x^2 + y^2",
    "x^2*y + y^2",
    "x^3 - 2*x*y^2",
    "x^2*y^2 - x + 1",
    "3*x^4 - x^2*y^3 + 2*y",
    "x^4*y^4",
    "x^4 + x*y^4 - y^3",
];

pub const TRIGONOMETRIC: &[&str] = &[
    "sin(x)",
    "cos(y)",
    "sin(x)*cos(y)",
    "cos(x)*sin(y)",
    "sin(x)*sin(y)",
    "cos(x)*cos(y)",
    "sin(x) + cos(y)",
    "cos(2*x)*sin(y) - sin(x)*cos(2*y)",
];

fn build(sources: &[&str]) -> Vec<Function2D> {
    sources
        .iter()
        .map(|s| {
            Function2D::parse(s)
                .expect("family members are well formed")
                .with_radius(FAMILY_RADIUS)
        })
        .collect()
}

pub fn polynomial_family() -> Vec<Function2D> {
    build(POLYNOMIALS)
}

pub fn trigonometric_family() -> Vec<Function2D> {
    build(TRIGONOMETRIC)
}

/// Polynomials followed by trigonometric members.
pub fn test_family() -> Vec<Function2D> {
    let mut all = polynomial_family();
    all.extend(trigonometric_family());
    all
}

/// Functions with Fourier support in the closed unit ball, for the sinc
/// expansion: `sin(x/2)cos(y/2)`, `cos(0.7x)sin(0.6y)` and `sin(0.9x)`.
pub fn band_limited_family() -> Vec<Function2D> {
    let one = [(0.0, C64::new(1.0, 0.0))];
    [
        FourierMeasure::product(&sin_atoms(0.5), &cos_atoms(0.5)),
        FourierMeasure::product(&cos_atoms(0.7), &sin_atoms(0.6)),
        FourierMeasure::product(&sin_atoms(0.9), &one),
    ]
    .into_iter()
    .map(|m| m.expect("atoms are finite").to_function())
    .collect()
}

/// Family lookup by position or by exact source text.
pub fn member(key: &str) -> Option<Function2D> {
    let all: Vec<&str> = POLYNOMIALS.iter().chain(TRIGONOMETRIC).copied().collect();
    let src = match key.parse::<usize>() {
        Ok(i) => *all.get(i)?,
        Err(_) => *all.iter().find(|s| **s == key)?,
    };
    Some(build(&[src]).remove(0))
}

pub fn draw(rng: &mut TrialRng, family: &[Function2D]) -> Function2D {
    family[index(rng, family.len())].clone()
}

/// A scalar function of one variable with its derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum Univariate {
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    Sin(f64),
    Cos(f64),
}

impl Univariate {
    pub fn draw(rng: &mut TrialRng) -> Self {
        match index(rng, 3) {
            0 => {
                let degree = index(rng, 5);
                Univariate::Polynomial((0..=degree).map(|_| uniform(rng, -1.0, 1.0)).collect())
            }
            1 => Univariate::Sin(uniform(rng, 0.5, 2.0)),
            _ => Univariate::Cos(uniform(rng, 0.5, 2.0)),
        }
    }

    /// `(u(t), u'(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            Univariate::Polynomial(c) => {
                let mut value = 0.0;
                let mut slope = 0.0;
                for &a in c.iter().rev() {
                    slope = slope * t + value;
                    value = value * t + a;
                }
                (value, slope)
            }
            Univariate::Sin(k) => ((k * t).sin(), k * (k * t).cos()),
            Univariate::Cos(k) => ((k * t).cos(), -k * (k * t).sin()),
        }
    }

    pub fn descriptor(&self, var: &str) -> String {
        match self {
            Univariate::Polynomial(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .enumerate()
                    .map(|(p, a)| match p {
                        0 => format!("{a:?}"),
                        1 => format!("{a:?}*{var}"),
                        _ => format!("{a:?}*{var}^{p}"),
                    })
                    .collect();
                format!("({})", terms.join(" + "))
            }
            Univariate::Sin(k) => format!("sin({k:?}*{var})"),
            Univariate::Cos(k) => format!("cos({k:?}*{var})"),
        }
    }
}

/// `u(x) v(y)` as a [`Function2D`].
pub fn separable(u: &Univariate, v: &Univariate) -> Function2D {
    let descriptor = format!("{}*{}", u.descriptor("x"), v.descriptor("y"));
    let (u, v) = (u.clone(), v.clone());
    Function2D::separable(descriptor, move |t| u.eval(t), move |t| v.eval(t))
        .with_radius(FAMILY_RADIUS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    #[test]
    fn members_parse_and_respect_degree() {
        assert_eq!(test_family().len(), POLYNOMIALS.len() + TRIGONOMETRIC.len());
        for f in polynomial_family() {
            // degree ≤ 4 per variable: the fifth partial vanishes.
            let mut e = crate::expr::parse(&f.descriptor()).unwrap();
            for _ in 0..5 {
                e = e.derivative(crate::expr::Var::X);
            }
            assert_eq!(e.eval(0.3, -0.7), 0.0, "{}", f.descriptor());
        }
        assert_eq!(member("2").unwrap().descriptor(), member("x*y").unwrap().descriptor());
        assert!(member("nope").is_none());
        assert!(member("999").is_none());
    }

    #[test]
    fn univariate_derivatives() {
        let mut rng = seeded(5);
        for _ in 0..50 {
            let u = Univariate::draw(&mut rng);
            let t = uniform(&mut rng, -1.0, 1.0);
            let h = 1e-6;
            let fd = (u.eval(t + h).0 - u.eval(t - h).0) / (2.0 * h);
            assert!((fd - u.eval(t).1).abs() < 1e-7, "{u:?}");
        }
        let p = Univariate::Polynomial(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), (17.0, 14.0));
        let f = separable(&p, &Univariate::Cos(1.0));
        assert_eq!(f.eval(2.0, 0.0).re, 17.0);
    }
}

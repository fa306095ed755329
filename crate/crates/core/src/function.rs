//! Scalar fields on the plane with exact first partials.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{self, Expr, Var};
use crate::linalg::C64;

/// A complex-valued function of `(x, y)` with exact partial derivatives.
pub trait Field2D: Send + Sync {
    fn eval(&self, x: f64, y: f64) -> C64;
    fn d_dx(&self, x: f64, y: f64) -> C64;
    fn d_dy(&self, x: f64, y: f64) -> C64;
    fn descriptor(&self) -> String;
}

/// Frequency-support declaration used by the sinc expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandLimit {
    /// Nothing is claimed about the Fourier transform.
    Unknown,
    /// Fourier transform supported in the closed unit ball.
    UnitBall,
    /// Affine in the first variable. The transform is a distribution carried by
    /// the origin, so the expansion applies formally.
    LinearEdge,
}

#[derive(Clone)]
pub struct Function2D {
    field: Arc<dyn Field2D>,
    radius: Option<f64>,
    band: BandLimit,
}

impl fmt::Debug for Function2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function2D")
            .field("descriptor", &self.descriptor())
            .field("radius", &self.radius)
            .field("band", &self.band)
            .finish()
    }
}

impl Function2D {
    pub fn new(field: impl Field2D + 'static) -> Self {
        Function2D {
            field: Arc::new(field),
            radius: None,
            band: BandLimit::Unknown,
        }
    }

    /// Parses `src` and differentiates it symbolically.
    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::from_expr(expr::parse(src)?))
    }

    pub fn from_expr(value: Expr) -> Self {
        Self::new(ExprField::new(value))
    }

    /// Builds a function from closures for the value and both partials.
    pub fn from_closures<F, Fx, Fy>(descriptor: impl Into<String>, f: F, fx: Fx, fy: Fy) -> Self
    where
        F: Fn(f64, f64) -> C64 + Send + Sync + 'static,
        Fx: Fn(f64, f64) -> C64 + Send + Sync + 'static,
        Fy: Fn(f64, f64) -> C64 + Send + Sync + 'static,
    {
        Self::new(ClosureField {
            descriptor: descriptor.into(),
            f: Box::new(f),
            fx: Box::new(fx),
            fy: Box::new(fy),
        })
    }

    /// `Σ cᵢ φᵢ`.
    pub fn linear_combination(terms: &[(C64, Function2D)]) -> Self {
        Self::new(Combination(terms.to_vec()))
    }

    /// `u(x) v(y)` for closures with known derivatives.
    pub fn separable(
        descriptor: impl Into<String>,
        u: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
        v: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        let u = Arc::new(u);
        let v = Arc::new(v);
        let (u1, v1, u2, v2) = (u.clone(), v.clone(), u.clone(), v.clone());
        Self::from_closures(
            descriptor,
            move |x, y| C64::new(u(x).0 * v(y).0, 0.0),
            move |x, y| C64::new(u1(x).1 * v1(y).0, 0.0),
            move |x, y| C64::new(u2(x).0 * v2(y).1, 0.0),
        )
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn with_band_limit(mut self, band: BandLimit) -> Self {
        self.band = band;
        self
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn band_limit(&self) -> BandLimit {
        self.band
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.field.eval(x, y)
    }

    #[inline]
    pub fn d_dx(&self, x: f64, y: f64) -> C64 {
        self.field.d_dx(x, y)
    }

    #[inline]
    pub fn d_dy(&self, x: f64, y: f64) -> C64 {
        self.field.d_dy(x, y)
    }

    pub fn descriptor(&self) -> String {
        self.field.descriptor()
    }

    /// Evaluates and rejects NaN or infinite values.
    pub fn eval_finite(&self, x: f64, y: f64) -> Result<C64> {
        let z = self.eval(x, y);
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(Error::NonFiniteValue {
                descriptor: self.descriptor(),
                x,
                y,
            })
        }
    }
}

struct ExprField {
    value: Expr,
    dx: Expr,
    dy: Expr,
    text: String,
}

impl ExprField {
    fn new(value: Expr) -> Self {
        ExprField {
            dx: value.derivative(Var::X),
            dy: value.derivative(Var::Y),
            text: value.to_string(),
            value,
        }
    }
}

impl Field2D for ExprField {
    fn eval(&self, x: f64, y: f64) -> C64 {
        C64::new(self.value.eval(x, y), 0.0)
    }
    fn d_dx(&self, x: f64, y: f64) -> C64 {
        C64::new(self.dx.eval(x, y), 0.0)
    }
    fn d_dy(&self, x: f64, y: f64) -> C64 {
        C64::new(self.dy.eval(x, y), 0.0)
    }
    fn descriptor(&self) -> String {
        self.text.clone()
    }
}

type Scalar2 = Box<dyn Fn(f64, f64) -> C64 + Send + Sync>;

struct ClosureField {
    descriptor: String,
    f: Scalar2,
    fx: Scalar2,
    fy: Scalar2,
}

impl Field2D for ClosureField {
    fn eval(&self, x: f64, y: f64) -> C64 {
        (self.f)(x, y)
    }
    fn d_dx(&self, x: f64, y: f64) -> C64 {
        (self.fx)(x, y)
    }
    fn d_dy(&self, x: f64, y: f64) -> C64 {
        (self.fy)(x, y)
    }
    fn descriptor(&self) -> String {
        self.descriptor.clone()
    }
}

struct Combination(Vec<(C64, Function2D)>);

impl Field2D for Combination {
    fn eval(&self, x: f64, y: f64) -> C64 {
        self.0.iter().map(|(c, f)| c * f.eval(x, y)).sum()
    }
    fn d_dx(&self, x: f64, y: f64) -> C64 {
        self.0.iter().map(|(c, f)| c * f.d_dx(x, y)).sum()
    }
    fn d_dy(&self, x: f64, y: f64) -> C64 {
        self.0.iter().map(|(c, f)| c * f.d_dy(x, y)).sum()
    }
    fn descriptor(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(c, f)| format!("({c})*({})", f.descriptor()))
            .collect();
        parts.join(" + ")
    }
}

/// A point mass of a discrete measure on frequency space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierAtom {
    pub s: f64,
    pub t: f64,
    pub weight: C64,
}

/// Finite atomic measure `ω`; its Fourier transform is
/// `φ(x, y) = Σ w · exp(i(s x + t y))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierMeasure {
    atoms: Vec<FourierAtom>,
}

impl FourierMeasure {
    pub fn new(atoms: Vec<FourierAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("fourier measure needs at least one atom".into()));
        }
        for a in &atoms {
            let finite = a.s.is_finite() && a.t.is_finite();
            if !finite || !a.weight.re.is_finite() || !a.weight.im.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite atom {a:?}")));
            }
        }
        Ok(FourierMeasure { atoms })
    }

    pub fn atoms(&self) -> &[FourierAtom] {
        &self.atoms
    }

    /// `∫ (1+|s|)(1+|t|) d|ω|`.
    pub fn weighted_mass(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight.norm() * (1.0 + a.s.abs()) * (1.0 + a.t.abs()))
            .sum()
    }

    /// Product measure for `u(x) v(y)` where `u` and `v` are given by their
    /// one-dimensional atoms `(frequency, weight)`.
    pub fn product(u: &[(f64, C64)], v: &[(f64, C64)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(u.len() * v.len());
        for &(s, wu) in u {
            for &(t, wv) in v {
                atoms.push(FourierAtom {
                    s,
                    t,
                    weight: wu * wv,
                });
            }
        }
        Self::new(atoms)
    }

    /// Wraps the measure's Fourier transform as a [`Function2D`]. It is flagged
    /// band-limited when every atom lies in the closed unit ball.
    pub fn to_function(&self) -> Function2D {
        let inside = self.atoms.iter().all(|a| a.s.hypot(a.t) <= 1.0);
        let band = if inside {
            BandLimit::UnitBall
        } else {
            BandLimit::Unknown
        };
        Function2D::new(self.clone()).with_band_limit(band)
    }
}

impl FourierMeasure {
    fn sum(&self, x: f64, y: f64, factor: impl Fn(&FourierAtom) -> C64) -> C64 {
        self.atoms
            .iter()
            .map(|a| factor(a) * a.weight * C64::cis(a.s * x + a.t * y))
            .sum()
    }
}

impl Field2D for FourierMeasure {
    fn eval(&self, x: f64, y: f64) -> C64 {
        self.sum(x, y, |_| C64::new(1.0, 0.0))
    }
    fn d_dx(&self, x: f64, y: f64) -> C64 {
        self.sum(x, y, |a| C64::new(0.0, a.s))
    }
    fn d_dy(&self, x: f64, y: f64) -> C64 {
        self.sum(x, y, |a| C64::new(0.0, a.t))
    }
    fn descriptor(&self) -> String {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| format!("({})*e^i({}x+{}y)", a.weight, a.s, a.t))
            .collect();
        parts.join(" + ")
    }
}

/// One-dimensional atoms of `cos(k·)`.
pub fn cos_atoms(k: f64) -> Vec<(f64, C64)> {
    vec![(k, C64::new(0.5, 0.0)), (-k, C64::new(0.5, 0.0))]
}

/// One-dimensional atoms of `sin(k·)`.
pub fn sin_atoms(k: f64) -> Vec<(f64, C64)> {
    vec![(k, C64::new(0.0, -0.5)), (-k, C64::new(0.0, 0.5))]
}

//! Real roots of cubic polynomials.
//!
//! The design polynomial is a cubic in `u = e²`. Two interchangeable solvers
//! are provided: closed-form (trigonometric / Cardano) and the eigenvalues of
//! the 3×3 companion matrix. Both return unpolished candidates; [`polish`]
//! refines a candidate with Newton steps.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Matrix3;

use crate::registry::{Registry, Strategy};

/// Coefficients `[c0, c1, c2, c3]` of `c0 + c1 x + c2 x² + c3 x³`.
pub type Cubic = [f64; 4];

pub trait CubicSolver: Strategy {
    /// Real roots in ascending order, with multiplicity where the method
    /// resolves it.
    fn real_roots(&self, coeffs: &Cubic) -> Vec<f64>;
}

pub fn eval(coeffs: &Cubic, x: f64) -> f64 {
    ((coeffs[3] * x + coeffs[2]) * x + coeffs[1]) * x + coeffs[0]
}

pub fn derivative(coeffs: &Cubic, x: f64) -> f64 {
    (3.0 * coeffs[3] * x + 2.0 * coeffs[2]) * x + coeffs[1]
}

/// Newton refinement that never accepts a step increasing `|p(x)|`.
pub fn polish(coeffs: &Cubic, mut x: f64) -> f64 {
    let mut fx = eval(coeffs, x);
    for _ in 0..8 {
        let dfx = derivative(coeffs, x);
        if fx == 0.0 || dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        let fnext = eval(coeffs, next);
        if !(fnext.abs() < fx.abs()) {
            break;
        }
        x = next;
        fx = fnext;
    }
    x
}

/// Real roots of `c0 + c1 x + c2 x²`, ascending.
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        return if c1 == 0.0 { vec![] } else { vec![-c0 / c1] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return vec![];
    }
    // avoids cancellation in -b ± sqrt(disc)
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    let mut roots = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / c2, c0 / q]
    };
    roots.sort_by(f64::total_cmp);
    roots
}

/// Closed-form roots: trigonometric form with three real roots, Cardano
/// otherwise.
#[derive(Debug, Default, Clone, Copy)]
pub struct Trigonometric;

impl Strategy for Trigonometric {
    fn name(&self) -> &'static str {
        "trigonometric"
    }

    fn description(&self) -> &'static str {
        "closed-form roots (trigonometric for three real roots, Cardano otherwise)"
    }
}

impl CubicSolver for Trigonometric {
    fn real_roots(&self, coeffs: &Cubic) -> Vec<f64> {
        let [c0, c1, c2, c3] = *coeffs;
        if c3 == 0.0 {
            return quadratic_roots(c0, c1, c2);
        }
        let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);
        // x = t - a/3 gives t³ + p t + q = 0
        let shift = a / 3.0;
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
        let mut roots = if p == 0.0 && q == 0.0 {
            vec![0.0; 3]
        } else if disc < 0.0 {
            // p < 0 here
            let r = 2.0 * (-p / 3.0).sqrt();
            let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
            let phi = arg.acos() / 3.0;
            (0..3)
                .map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos())
                .collect()
        } else if disc == 0.0 {
            vec![3.0 * q / p, -1.5 * q / p, -1.5 * q / p]
        } else {
            let s = disc.sqrt();
            vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
        };
        for t in &mut roots {
            *t -= shift;
        }
        roots.sort_by(f64::total_cmp);
        roots
    }
}

/// Eigenvalues of the companion matrix of the monic cubic.
#[derive(Debug, Default, Clone, Copy)]
pub struct Companion;

impl Strategy for Companion {
    fn name(&self) -> &'static str {
        "companion"
    }

    fn description(&self) -> &'static str {
        "eigenvalues of the 3x3 companion matrix"
    }
}

impl CubicSolver for Companion {
    fn real_roots(&self, coeffs: &Cubic) -> Vec<f64> {
        let [c0, c1, c2, c3] = *coeffs;
        if c3 == 0.0 {
            return quadratic_roots(c0, c1, c2);
        }
        let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);
        #[rustfmt::skip]
        let companion = Matrix3::new(
            0.0, 0.0, -c,
            1.0, 0.0, -b,
            0.0, 1.0, -a,
        );
        let scale = 1.0 + a.abs().max(b.abs().sqrt()).max(c.abs().cbrt());
        let mut roots: Vec<f64> = companion
            .complex_eigenvalues()
            .iter()
            // a close pair of real roots can come back as a conjugate pair
            // with a tiny imaginary part
            .filter(|z| z.im.abs() <= 1e-7 * scale)
            .map(|z| z.re)
            .collect();
        roots.sort_by(f64::total_cmp);
        roots
    }
}

/// Registry of the built-in cubic solvers; the default is `trigonometric`.
pub fn builtin_solvers() -> Registry<dyn CubicSolver> {
    let mut reg: Registry<dyn CubicSolver> = Registry::new("cubic solver");
    reg.register(Arc::new(Trigonometric))
        .register(Arc::new(Companion));
    reg.set_default("trigonometric")
        .expect("trigonometric is registered");
    reg
}

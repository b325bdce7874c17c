//! Inverse eigenvalue problem for the reduced switch Hamiltonian.
//!
//! With `c = 1` and `b = √M`, the reduced Hamiltonian has spectrum
//! `{0, e, ηe, −ηe}` exactly when `e` is a root of the design polynomial
//! `g_M(e; η) = x₀ + x₂e² + x₄e⁴ + x₆e⁶` and `(a, d)` solve
//! `a + d = −e`, `ad = M + 2 + (1 − η²)e²`, `d(ae − 2) = Me`.
//! For even `η` every eigenphase at `τ = π/e` is `+1` except the
//! antisymmetric source/target mode, which picks up `−1`; that sign flip is
//! what carries the excitation from source to target.

pub mod cubic;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::model::{reduced_matrix, ReducedParams, StarSpec};
use crate::registry::Registry;
use cubic::{CubicSolver, Trigonometric};

/// Relative tolerance on the `Λ₀ = 0` condition when assigning `(a, d)`.
pub const ASSIGNMENT_TOL: f64 = 1e-9;

/// Source node of a freshly designed switch.
pub const DESIGN_SOURCE: usize = 1;
/// Target node of a freshly designed switch.
pub const DESIGN_TARGET: usize = 2;

/// Which positive root of the design polynomial to build the switch from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootChoice {
    /// Smallest `e`, i.e. the slowest transfer.
    #[default]
    Smallest,
    /// Largest `e`, i.e. the shortest transfer time.
    Largest,
    /// The `k`-th root in ascending order, counted from 0.
    Index(usize),
}

impl RootChoice {
    pub fn select(self, roots: &[f64]) -> Result<f64> {
        let picked = match self {
            RootChoice::Smallest => roots.first(),
            RootChoice::Largest => roots.last(),
            RootChoice::Index(k) => roots.get(k),
        };
        picked.copied().ok_or_else(|| {
            Error::validation(format!(
                "root choice {self} not available among {} roots",
                roots.len()
            ))
        })
    }
}

impl fmt::Display for RootChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootChoice::Smallest => f.write_str("smallest"),
            RootChoice::Largest => f.write_str("largest"),
            RootChoice::Index(k) => write!(f, "index:{k}"),
        }
    }
}

impl FromStr for RootChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smallest" => Ok(RootChoice::Smallest),
            "largest" => Ok(RootChoice::Largest),
            _ => s
                .strip_prefix("index:")
                .and_then(|k| k.parse().ok())
                .map(RootChoice::Index)
                .ok_or_else(|| {
                    Error::validation(format!(
                        "root choice `{s}` is not one of smallest, largest, index:<k>"
                    ))
                }),
        }
    }
}

/// What to design: bystander count, even tuning parameter and root policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignInput {
    pub m: usize,
    pub eta: u64,
    pub root_choice: RootChoice,
}

impl DesignInput {
    pub fn new(m: usize, eta: u64) -> Self {
        Self {
            m,
            eta,
            root_choice: RootChoice::Smallest,
        }
    }

    pub fn with_root(mut self, root_choice: RootChoice) -> Self {
        self.root_choice = root_choice;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::validation(
                "at least one bystander is required (M >= 1)",
            ));
        }
        if self.eta < 2 || !self.eta.is_multiple_of(2) {
            return Err(Error::validation(format!(
                "eta must be a positive even integer, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

/// The design polynomial in `e²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GPolynomial {
    pub x0: f64,
    pub x2: f64,
    pub x4: f64,
    pub x6: f64,
}

impl GPolynomial {
    pub fn eval(&self, e: f64) -> f64 {
        self.eval_sq(e * e)
    }

    /// Evaluates at `u = e²`.
    pub fn eval_sq(&self, u: f64) -> f64 {
        cubic::eval(&self.as_cubic(), u)
    }

    /// Coefficients as a cubic in `u = e²`, ascending.
    pub fn as_cubic(&self) -> cubic::Cubic {
        [self.x0, self.x2, self.x4, self.x6]
    }
}

pub fn g_polynomial(m: usize, eta: f64) -> GPolynomial {
    let k = 1.0 - eta * eta;
    GPolynomial {
        x0: m as f64 + 2.0,
        x2: 3.0 - eta * eta,
        x4: 1.5 * k,
        x6: 0.25 * k * k,
    }
}

/// Normalized characteristic-polynomial coefficients `(Λ₀, Λ₁, Λ₂)` of the
/// reduced Hamiltonian with the `e` eigenvalue factored out.
pub fn lambda_coefficients(a: f64, b: f64, c: f64, d: f64, e: f64) -> Result<(f64, f64, f64)> {
    if e == 0.0 {
        return Err(Error::Domain(
            "Λ coefficients are undefined at e = 0".into(),
        ));
    }
    let (b2, c2) = (b * b, c * c);
    let l0 = (a * d * e - b2 * e - 2.0 * c2 * d) / (e * e * e);
    let l1 = (b2 + 2.0 * c2 - a * d - (a + d) * e) / (e * e);
    let l2 = (a + d + e) / e;
    Ok((l0, l1, l2))
}

/// Location and depth of the minimum of `g_M` over positive `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub m: usize,
    pub eta: f64,
    /// `e_*²`; `None` when `η ≤ 1` and no interior minimum exists.
    pub e_star_sq: Option<f64>,
    pub e_star: Option<f64>,
    /// `g_M(e_*)`, or `g_M(0) = M + 2` when `η ≤ 1`.
    pub g_min: f64,
    pub feasible: bool,
    /// Large-η estimate of the η needed for `M` bystanders; informational.
    pub asymptotic_threshold: f64,
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "feasibility for M = {}, eta = {}", self.m, self.eta)?;
        match (self.e_star_sq, self.e_star) {
            (Some(u), Some(e)) => writeln!(f, "  e_*^2      = {u:e}\n  e_*        = {e:e}")?,
            _ => writeln!(f, "  e_*        = undefined (eta <= 1)")?,
        }
        writeln!(f, "  g_min      = {:e}", self.g_min)?;
        writeln!(
            f,
            "  feasible   = {}",
            if self.feasible { "yes" } else { "no" }
        )?;
        write!(
            f,
            "  asymptotic eta estimate = {:.3} (9/(4*sqrt(3)) * M)",
            self.asymptotic_threshold
        )
    }
}

pub fn feasibility(m: usize, eta: f64) -> FeasibilityReport {
    let asymptotic_threshold = 9.0 / (4.0 * 3f64.sqrt()) * m as f64;
    let g = g_polynomial(m, eta);
    if !(eta > 1.0) {
        return FeasibilityReport {
            m,
            eta,
            e_star_sq: None,
            e_star: None,
            g_min: g.x0,
            feasible: false,
            asymptotic_threshold,
        };
    }
    let u = (6.0 + 2.0 * 3f64.sqrt() * eta) / (3.0 * (eta * eta - 1.0));
    let g_min = g.eval_sq(u);
    FeasibilityReport {
        m,
        eta,
        e_star_sq: Some(u),
        e_star: Some(u.sqrt()),
        g_min,
        feasible: g_min < 0.0,
        asymptotic_threshold,
    }
}

/// Smallest even `η ≥ 2` for which `M` bystanders admit a design.
pub fn min_feasible_even_eta(m: usize) -> u64 {
    (1u64..)
        .map(|n| 2 * n)
        .find(|&eta| feasibility(m, eta as f64).feasible)
        .expect("g_min diverges to -inf as eta grows")
}

/// Recovers `(a, d)` from a root `e` in units `c = 1`, `b² = M`.
pub fn back_solve(e: f64, m: usize, eta: f64) -> Result<(f64, f64)> {
    if e == 0.0 {
        return Err(Error::Domain("back-solve needs e != 0".into()));
    }
    let mf = m as f64;
    let sum = -e;
    let product = mf + 2.0 + (1.0 - eta * eta) * e * e;
    let discriminant = sum * sum - 4.0 * product;
    if discriminant < 0.0 {
        return Err(Error::NoRealDesign { e, discriminant });
    }
    // roots of t² − (a+d)t + ad; the smaller one comes from the product to
    // avoid cancellation
    let big = 0.5 * (sum + sum.signum() * discriminant.sqrt());
    let small = if big == 0.0 { 0.0 } else { product / big };
    let (hi, lo) = (big, small);
    // Λ₀ = 0 ⇔ ade − Me − 2d = 0; compared relative to the size of its terms
    let residual = |a: f64, d: f64| {
        let terms = [a * d * e, -mf * e, -2.0 * d];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let sum: f64 = terms.iter().sum();
        if scale == 0.0 {
            0.0
        } else {
            sum.abs() / scale
        }
    };
    let candidates = [(hi, lo), (lo, hi)];
    let (best, best_residual) = candidates
        .iter()
        .map(|&(a, d)| ((a, d), residual(a, d)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("two candidates");
    if best_residual > ASSIGNMENT_TOL {
        return Err(Error::Domain(format!(
            "neither (a, d) assignment satisfies Λ₀ = 0 for e = {e} (relative residual {best_residual:e})"
        )));
    }
    Ok(best)
}

/// A solved switch, realized on a star with source 1 and target 2.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSolution {
    pub params: ReducedParams,
    pub eta: u64,
    pub root_choice: RootChoice,
    /// All positive roots of `g_M(e; η)`, ascending.
    pub roots: Vec<f64>,
    /// `τ = π/e`.
    pub transfer_time: f64,
    /// `[0, e, ηe, −ηe]`.
    pub target_spectrum: [f64; 4],
    /// `|g_M(e; η)|`.
    pub root_residual: f64,
    /// Largest of `|Λ₀|`, `|Λ₁ − η²|`, `|Λ₂|`.
    pub lambda_residual: f64,
    /// Largest deviation between the realized 4×4 spectrum and the target.
    pub spectrum_residual: f64,
    pub realized: StarSpec,
}

impl DesignSolution {
    pub fn source(&self) -> usize {
        DESIGN_SOURCE
    }

    pub fn target(&self) -> usize {
        DESIGN_TARGET
    }

    pub fn sorted_target_spectrum(&self) -> [f64; 4] {
        let mut s = self.target_spectrum;
        s.sort_by(f64::total_cmp);
        s
    }
}

/// Ascending eigenvalues of the reduced Hamiltonian.
pub fn reduced_spectrum(params: &ReducedParams) -> [f64; 4] {
    let eig = SymmetricEigen::new(reduced_matrix(params));
    let mut values: [f64; 4] = eig.eigenvalues.into();
    values.sort_by(f64::total_cmp);
    values
}

/// Designs switches with a chosen cubic solver.
#[derive(Clone)]
pub struct Designer {
    solver: Arc<dyn CubicSolver>,
}

impl Default for Designer {
    fn default() -> Self {
        Self {
            solver: Arc::new(Trigonometric),
        }
    }
}

impl fmt::Debug for Designer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Designer")
            .field("solver", &self.solver.name())
            .finish()
    }
}

impl Designer {
    pub fn new(solver: Arc<dyn CubicSolver>) -> Self {
        Self { solver }
    }

    /// Looks the solver up by name in the built-in registry.
    pub fn with_solver_name(name: &str) -> Result<Self> {
        Ok(Self::new(cubic::builtin_solvers().get(name)?))
    }

    pub fn solvers() -> Registry<dyn CubicSolver> {
        cubic::builtin_solvers()
    }

    pub fn solver_name(&self) -> &'static str {
        self.solver.name()
    }

    /// All positive roots `e` of `g_M(e; η) = 0`, ascending.
    pub fn solve_e(&self, m: usize, eta: f64) -> Result<Vec<f64>> {
        if m == 0 {
            return Err(Error::validation(
                "at least one bystander is required (M >= 1)",
            ));
        }
        let report = feasibility(m, eta);
        let g = g_polynomial(m, eta);
        let coeffs = g.as_cubic();
        let mut roots: Vec<f64> = self
            .solver
            .real_roots(&coeffs)
            .into_iter()
            .map(|u| cubic::polish(&coeffs, u))
            .filter(|&u| u > 0.0)
            .map(f64::sqrt)
            .filter(|&e| g.eval(e).abs() < 1e-10 * g.x0)
            .collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
        if roots.is_empty() {
            return Err(Error::Infeasible(report));
        }
        Ok(roots)
    }

    pub fn design(&self, input: &DesignInput) -> Result<DesignSolution> {
        input.validate()?;
        let m = input.m;
        let eta = input.eta as f64;
        let report = feasibility(m, eta);
        if !report.feasible {
            return Err(Error::Infeasible(report));
        }
        let roots = self.solve_e(m, eta)?;
        let e = input.root_choice.select(&roots)?;
        let (a, d) = back_solve(e, m, eta)?;
        let params = ReducedParams {
            a,
            b: (m as f64).sqrt(),
            c: 1.0,
            d,
            e,
            m,
        };

        let (l0, l1, l2) = lambda_coefficients(a, params.b, params.c, d, e)?;
        let lambda_residual = l0.abs().max((l1 - eta * eta).abs()).max(l2.abs());
        let target_spectrum = [0.0, e, eta * e, -eta * e];
        let mut sorted_target = target_spectrum;
        sorted_target.sort_by(f64::total_cmp);
        let spectrum_residual = reduced_spectrum(&params)
            .iter()
            .zip(&sorted_target)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);

        let mut potentials = vec![d; m + 3];
        potentials[0] = a;
        potentials[DESIGN_SOURCE] = e;
        potentials[DESIGN_TARGET] = e;
        let realized = StarSpec::new(params.c, potentials)?;

        Ok(DesignSolution {
            params,
            eta: input.eta,
            root_choice: input.root_choice,
            transfer_time: PI / e,
            target_spectrum,
            root_residual: g_polynomial(m, eta).eval(e).abs(),
            lambda_residual,
            spectrum_residual,
            realized,
            roots,
        })
    }
}

/// Positive roots of the design polynomial using the default solver.
pub fn solve_e(m: usize, eta: f64) -> Result<Vec<f64>> {
    Designer::default().solve_e(m, eta)
}

/// Designs a switch using the default solver.
pub fn design(input: &DesignInput) -> Result<DesignSolution> {
    Designer::default().design(input)
}

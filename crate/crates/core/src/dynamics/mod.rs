//! Exact unitary evolution `U(t) = exp(−iHt)` of real symmetric Hamiltonians.
//!
//! Every evolution goes through an orthogonal eigendecomposition
//! `H = V diag(E) Vᵀ`, so `U(t) = V diag(exp(−iEₖt)) Vᵀ` is unitary up to
//! rounding for any `t` and one decomposition serves a whole time grid.

pub mod arrowhead;
pub mod models;

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::designer::{reduced_spectrum, DesignSolution};
use crate::error::{Error, Result};
use crate::model::{
    build_arrowhead, build_reduced, reduced_matrix, ComplexAmplitude, StarSpec, REDUCED_SOURCE,
    REDUCED_TARGET,
};
pub use arrowhead::ArrowheadEvolution;

/// Symmetry tolerance for Hamiltonians handed to [`EvolutionCache::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default tolerance of [`verify_design`].
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

/// Slack above 1 allowed for fidelities computed in floating point.
pub const FIDELITY_SLACK: f64 = 1e-12;

/// Eigendecomposition of a real symmetric Hamiltonian, reusable across times.
#[derive(Debug, Clone)]
pub struct EvolutionCache {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    fingerprint: u64,
}

fn fingerprint(h: &DMatrix<f64>) -> u64 {
    let mut hasher = DefaultHasher::new();
    h.nrows().hash(&mut hasher);
    for v in h.iter() {
        v.to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

impl EvolutionCache {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::validation(format!(
                "Hamiltonian is {}x{}, not square",
                h.nrows(),
                h.ncols()
            )));
        }
        let asym = (h - h.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::validation(format!(
                "Hamiltonian is not symmetric (max |H - Hᵀ| = {asym:e})"
            )));
        }
        let eig = SymmetricEigen::new(h.clone());
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            fingerprint: fingerprint(h),
        })
    }

    pub fn from_matrix4(h: &Matrix4<f64>) -> Self {
        let dense = DMatrix::from_iterator(4, 4, h.iter().copied());
        Self::new(&dense).expect("reduced matrix is symmetric by construction")
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Hash of the exact bits of the decomposed matrix.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn matches(&self, h: &DMatrix<f64>) -> bool {
        fingerprint(h) == self.fingerprint
    }

    /// `‖V diag(E) Vᵀ − H‖_max`.
    pub fn reconstruction_residual(&self, h: &DMatrix<f64>) -> f64 {
        let v = &self.eigenvectors;
        let rebuilt = v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose();
        (rebuilt - h).amax()
    }

    /// `‖VᵀV − I‖_max`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dimension();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::identity(n, n)).amax()
    }

    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.dimension();
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t))
            .collect();
        let v = &self.eigenvectors;
        DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| phases[k] * (v[(i, k)] * v[(j, k)])).sum()
        })
    }

    pub fn amplitude(&self, src: usize, dst: usize, t: f64) -> ComplexAmplitude {
        self.channel(src, dst).amplitude(t)
    }

    /// Spectral weights `⟨dst|eₖ⟩⟨eₖ|src⟩` paired with `Eₖ`.
    pub fn channel(&self, src: usize, dst: usize) -> TransferChannel {
        let v = &self.eigenvectors;
        TransferChannel::new(
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &e)| (e, v[(dst, k)] * v[(src, k)]))
                .collect(),
        )
    }

    pub fn fidelity_trace(&self, times: &[f64], src: usize, dst: usize) -> Result<FidelityTrace> {
        self.channel(src, dst).fidelity_trace(times)
    }
}

/// A transition amplitude in spectral form, `Σₖ wₖ exp(−iEₖt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferChannel {
    terms: Vec<(f64, f64)>,
}

impl TransferChannel {
    /// `terms` are `(energy, weight)` pairs.
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn amplitude(&self, t: f64) -> ComplexAmplitude {
        self.terms
            .iter()
            .map(|&(e, w)| Complex64::from_polar(w, -e * t))
            .sum()
    }

    pub fn fidelity(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }

    pub fn fidelity_trace(&self, times: &[f64]) -> Result<FidelityTrace> {
        check_grid(times)?;
        let values = times.iter().map(|&t| self.fidelity(t)).collect();
        FidelityTrace::new(times.to_vec(), values)
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::validation("time grid is empty"));
    }
    if let Some(i) = times.iter().position(|t| !t.is_finite()) {
        return Err(Error::validation(format!("time {i} is not finite")));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::validation(format!(
            "time grid is not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Transfer fidelity `F(t) = |⟨dst|U(t)|src⟩|²` sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl FidelityTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&times)?;
        if times.len() != values.len() {
            return Err(Error::validation(format!(
                "{} times but {} fidelity values",
                times.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(0.0..=1.0 + FIDELITY_SLACK).contains(v))
        {
            return Err(Error::validation(format!(
                "fidelity {} at index {i} is outside [0, 1]",
                values[i]
            )));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index and value of the largest fidelity (first one on ties).
    pub fn peak(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// `points` equally spaced times from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::validation("a time grid needs at least one point"));
    }
    if points == 1 {
        return Ok(vec![0.0]);
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::validation(format!(
            "t_max must be finite and positive, got {t_max}"
        )));
    }
    let h = t_max / (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 * h).collect())
}

/// Like [`uniform_grid`], but the spacing is nudged so that `anchor` is
/// a grid point whenever `0 < anchor ≤ t_max`.
pub fn anchored_grid(t_max: f64, points: usize, anchor: f64) -> Result<Vec<f64>> {
    let grid = uniform_grid(t_max, points)?;
    if points < 2 || !(anchor > 0.0 && anchor <= t_max) {
        return Ok(grid);
    }
    let h = t_max / (points - 1) as f64;
    let steps = (anchor / h).round().max(1.0);
    let h = anchor / steps;
    let mut grid: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
    grid[steps as usize] = anchor;
    Ok(grid)
}

pub fn propagate(h: &DMatrix<f64>, t: f64) -> Result<DMatrix<Complex64>> {
    Ok(EvolutionCache::new(h)?.propagator(t))
}

pub fn transition_amplitude(
    h: &DMatrix<f64>,
    t: f64,
    src: usize,
    dst: usize,
) -> Result<ComplexAmplitude> {
    check_index(h, src)?;
    check_index(h, dst)?;
    Ok(EvolutionCache::new(h)?.amplitude(src, dst, t))
}

pub fn fidelity_trace(
    h: &DMatrix<f64>,
    times: &[f64],
    src: usize,
    dst: usize,
) -> Result<FidelityTrace> {
    check_index(h, src)?;
    check_index(h, dst)?;
    check_grid(times)?;
    EvolutionCache::new(h)?.fidelity_trace(times, src, dst)
}

fn check_index(h: &DMatrix<f64>, i: usize) -> Result<()> {
    if i >= h.nrows() {
        return Err(Error::validation(format!(
            "basis index {i} out of range for dimension {}",
            h.nrows()
        )));
    }
    Ok(())
}

/// Outcome of checking a design against perfect transfer at `τ = π/e`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Max deviation of the realized reduced spectrum from `{0, e, ±ηe}`.
    pub spectrum_deviation: f64,
    /// Max deviation of the reduced parameters read off the realized star
    /// from the designed ones.
    pub params_deviation: f64,
    /// The smaller of the reduced and full fidelities at `τ`.
    pub fidelity_at_tau: f64,
    pub fidelity_reduced: f64,
    pub fidelity_full: f64,
    /// `⟨target|U(τ)|source⟩` from the reduced model.
    pub amplitude_at_tau: ComplexAmplitude,
    /// `|⟨target|U(τ)|source⟩ − 1|`.
    pub phase_deviation: f64,
    /// Max `|exp(−iEₖτ) − (±1)|` over the reduced eigenvalues.
    pub eigenphase_deviation: f64,
    /// `|amplitude(full) − amplitude(reduced)|` at `τ`.
    pub reduction_deviation: f64,
    /// Source/target exchange parities of the eigenvectors are `+1` except
    /// for the `e` mode, which is `−1`.
    pub parity_check: bool,
    pub passed: bool,
    pub tolerance: f64,
    /// Why the reduced model could not be built, if it could not.
    pub failure: Option<String>,
}

impl VerificationReport {
    fn failed(tolerance: f64, why: String) -> Self {
        Self {
            spectrum_deviation: f64::INFINITY,
            params_deviation: f64::INFINITY,
            fidelity_at_tau: 0.0,
            fidelity_reduced: 0.0,
            fidelity_full: 0.0,
            amplitude_at_tau: Complex64::new(0.0, 0.0),
            phase_deviation: f64::INFINITY,
            eigenphase_deviation: f64::INFINITY,
            reduction_deviation: f64::INFINITY,
            parity_check: false,
            passed: false,
            tolerance,
            failure: Some(why),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        let tol = self.tolerance;
        writeln!(
            f,
            "verification {} (tolerance {tol:e})",
            if self.passed { "PASSED" } else { "FAILED" }
        )?;
        if let Some(why) = &self.failure {
            writeln!(f, "  error: {why}")?;
        }
        writeln!(
            f,
            "  spectrum deviation   {:<24e} {}",
            self.spectrum_deviation,
            mark(self.spectrum_deviation <= tol)
        )?;
        writeln!(
            f,
            "  parameter deviation  {:<24e} {}",
            self.params_deviation,
            mark(self.params_deviation <= tol)
        )?;
        writeln!(
            f,
            "  fidelity at tau      {:<24} {}",
            self.fidelity_at_tau,
            mark(self.fidelity_at_tau >= 1.0 - tol)
        )?;
        writeln!(f, "    reduced model      {}", self.fidelity_reduced)?;
        writeln!(f, "    full arrowhead     {}", self.fidelity_full)?;
        writeln!(
            f,
            "  amplitude at tau     {:+e} {:+e}i {}",
            self.amplitude_at_tau.re,
            self.amplitude_at_tau.im,
            mark(self.phase_deviation <= tol)
        )?;
        writeln!(
            f,
            "  eigenphase deviation {:<24e} {}",
            self.eigenphase_deviation,
            mark(self.eigenphase_deviation <= tol)
        )?;
        writeln!(
            f,
            "  reduction deviation  {:<24e} {}",
            self.reduction_deviation,
            mark(self.reduction_deviation <= tol)
        )?;
        write!(
            f,
            "  exchange parities    {:<24} {}",
            if self.parity_check {
                "match"
            } else {
                "mismatch"
            },
            mark(self.parity_check)
        )
    }
}

/// Checks the designed transfer on the realized star, source 1 to target 2.
pub fn verify_design(sol: &DesignSolution, tol: f64) -> VerificationReport {
    verify_transfer(sol, &sol.realized, sol.source(), sol.target(), tol)
}

/// Checks that `spec` transfers `source` to `target` perfectly at the
/// design's `τ`, using the design's `η` and `e` for the expected spectrum.
pub fn verify_transfer(
    sol: &DesignSolution,
    spec: &StarSpec,
    source: usize,
    target: usize,
    tol: f64,
) -> VerificationReport {
    let reduced = match build_reduced(spec, source, target) {
        Ok(p) => p,
        Err(err) => return VerificationReport::failed(tol, err.to_string()),
    };
    let designed = sol.params;
    let params_deviation = [
        reduced.a - designed.a,
        reduced.b - designed.b,
        reduced.c - designed.c,
        reduced.d - designed.d,
        reduced.e - designed.e,
    ]
    .iter()
    .fold(0.0f64, |acc, x| acc.max(x.abs()))
    .max(if reduced.m == designed.m {
        0.0
    } else {
        f64::INFINITY
    });

    let sorted_target = sol.sorted_target_spectrum();
    let spectrum_deviation = reduced_spectrum(&reduced)
        .iter()
        .zip(&sorted_target)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let tau = sol.transfer_time;
    let cache = EvolutionCache::from_matrix4(&reduced_matrix(&reduced));
    let amp_reduced = cache.amplitude(REDUCED_SOURCE, REDUCED_TARGET, tau);
    let full = ArrowheadEvolution::new(&build_arrowhead(spec));
    let amp_full = full.channel(source, target).amplitude(tau);
    let fidelity_reduced = amp_reduced.norm_sqr();
    let fidelity_full = amp_full.norm_sqr();

    // Expected eigenphase at τ: −1 on the e mode, +1 on the others.
    let expected_phase = |energy: f64| {
        let nearest = sol
            .target_spectrum
            .iter()
            .copied()
            .min_by(|x, y| (x - energy).abs().total_cmp(&(y - energy).abs()))
            .expect("four target eigenvalues");
        if nearest == sol.params.e {
            -1.0
        } else {
            1.0
        }
    };
    let eigenphase_deviation = cache
        .eigenvalues()
        .iter()
        .map(|&energy| (Complex64::from_polar(1.0, -energy * tau) - expected_phase(energy)).norm())
        .fold(0.0, f64::max);

    let parity_check = parities_match(&cache, &expected_phase);

    let fidelity_at_tau = fidelity_reduced.min(fidelity_full);
    let phase_deviation = (amp_reduced - 1.0).norm();
    let reduction_deviation = (amp_full - amp_reduced).norm();
    let passed = spectrum_deviation <= tol
        && params_deviation <= tol
        && fidelity_at_tau >= 1.0 - tol
        && phase_deviation <= tol
        && eigenphase_deviation <= tol
        && reduction_deviation <= tol
        && parity_check;

    VerificationReport {
        spectrum_deviation,
        params_deviation,
        fidelity_at_tau,
        fidelity_reduced,
        fidelity_full,
        amplitude_at_tau: amp_reduced,
        phase_deviation,
        eigenphase_deviation,
        reduction_deviation,
        parity_check,
        passed,
        tolerance: tol,
        failure: None,
    }
}

/// Compares the exchange parities of each eigenspace of the reduced
/// Hamiltonian with the expected ones.
///
/// Eigenvalues closer than a small threshold are treated as one eigenspace and
/// its parities are the eigenvalues of `P` restricted to it, since individual
/// eigenvectors of a degenerate space are arbitrary.
fn parities_match(cache: &EvolutionCache, expected: &dyn Fn(f64) -> f64) -> bool {
    const CLUSTER_TOL: f64 = 1e-8;
    let values = cache.eigenvalues();
    let vectors = cache.eigenvectors();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match clusters.last_mut() {
            Some(c) if (values[k] - values[c[c.len() - 1]]).abs() <= CLUSTER_TOL => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let swap = |k: usize| match k {
        REDUCED_SOURCE => REDUCED_TARGET,
        REDUCED_TARGET => REDUCED_SOURCE,
        _ => k,
    };
    clusters.iter().all(|cluster| {
        let n = cluster.len();
        // Q = Vcᵀ P Vc
        let q = DMatrix::from_fn(n, n, |i, j| {
            (0..vectors.nrows())
                .map(|r| vectors[(r, cluster[i])] * vectors[(swap(r), cluster[j])])
                .sum::<f64>()
        });
        let mut found: Vec<f64> = SymmetricEigen::new(q).eigenvalues.iter().copied().collect();
        let mut wanted: Vec<f64> = cluster.iter().map(|&k| expected(values[k])).collect();
        found.sort_by(f64::total_cmp);
        wanted.sort_by(f64::total_cmp);
        found.iter().zip(&wanted).all(|(f, w)| (f - w).abs() < 1e-6)
    })
}

/// `π/e` for a nonzero `e`.
pub fn transfer_time(e: f64) -> Result<f64> {
    if e == 0.0 {
        return Err(Error::Domain(
            "transfer time π/e is undefined for e = 0".into(),
        ));
    }
    Ok(PI / e)
}

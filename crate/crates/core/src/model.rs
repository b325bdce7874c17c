//! Star-network Hamiltonians in the full spin space, the single-excitation
//! subspace and the reduced four-dimensional space.
//!
//! Node 0 is the hub, nodes `1..=N` are the edge spins. In the single-excitation
//! subspace the basis state `|k⟩` has node `k` flipped and all other spins down.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::dynamics;
use crate::error::{Error, Result};

/// A transition amplitude `⟨dst|U(t)|src⟩`.
pub type ComplexAmplitude = Complex64;

/// Absolute tolerance on the potential equalities required by [`build_reduced`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Largest edge count accepted by [`build_full_spin_hamiltonian`].
pub const MAX_FULL_SPIN_EDGES: usize = 10;

/// Reduced basis index of the hub excitation.
pub const REDUCED_HUB: usize = 0;
/// Reduced basis index of the symmetric bystander combination.
pub const REDUCED_BYSTANDERS: usize = 1;
/// Reduced basis index of the source node.
pub const REDUCED_SOURCE: usize = 2;
/// Reduced basis index of the target node.
pub const REDUCED_TARGET: usize = 3;

/// An (N+1)-spin star: uniform hub coupling and one local potential per node.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSpec {
    coupling: f64,
    potentials: Vec<f64>,
}

impl StarSpec {
    /// `potentials[0]` is the hub; the edge count is `potentials.len() - 1`.
    pub fn new(coupling: f64, potentials: Vec<f64>) -> Result<Self> {
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::validation(format!(
                "coupling must be finite and positive, got {coupling}"
            )));
        }
        if potentials.len() < 4 {
            return Err(Error::validation(format!(
                "a star needs at least 3 edge nodes, got {} potentials",
                potentials.len()
            )));
        }
        if let Some(j) = potentials.iter().position(|p| !p.is_finite()) {
            return Err(Error::validation(format!("potential {j} is not finite")));
        }
        Ok(Self {
            coupling,
            potentials,
        })
    }

    /// Like [`StarSpec::new`] but also checks the declared edge count.
    pub fn with_edge_count(edge_count: usize, coupling: f64, potentials: Vec<f64>) -> Result<Self> {
        if potentials.len() != edge_count + 1 {
            return Err(Error::validation(format!(
                "expected {} potentials for {edge_count} edge nodes, got {}",
                edge_count + 1,
                potentials.len()
            )));
        }
        Self::new(coupling, potentials)
    }

    /// Edge count `N`.
    pub fn edge_count(&self) -> usize {
        self.potentials.len() - 1
    }

    /// Bystander count `M = N - 2` for any source/target pair.
    pub fn bystander_count(&self) -> usize {
        self.edge_count() - 2
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn potential(&self, node: usize) -> f64 {
        self.potentials[node]
    }

    pub fn hub_potential(&self) -> f64 {
        self.potentials[0]
    }

    pub(crate) fn potentials_mut(&mut self) -> &mut [f64] {
        &mut self.potentials
    }

    /// Checks that `node` is an edge node of this star.
    pub fn check_edge(&self, node: usize, what: &str) -> Result<()> {
        if node == 0 || node > self.edge_count() {
            return Err(Error::validation(format!(
                "{what} node {node} is not an edge node (expected 1..={})",
                self.edge_count()
            )));
        }
        Ok(())
    }
}

/// Real symmetric matrix that is nonzero only on the diagonal, the first row
/// and the first column.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowheadMatrix {
    pub hub_value: f64,
    pub arm_couplings: Vec<f64>,
    pub arm_values: Vec<f64>,
}

impl ArrowheadMatrix {
    pub fn new(hub_value: f64, arm_couplings: Vec<f64>, arm_values: Vec<f64>) -> Result<Self> {
        if arm_couplings.len() != arm_values.len() {
            return Err(Error::validation(format!(
                "arrowhead has {} couplings but {} arm values",
                arm_couplings.len(),
                arm_values.len()
            )));
        }
        Ok(Self {
            hub_value,
            arm_couplings,
            arm_values,
        })
    }

    pub fn dimension(&self) -> usize {
        self.arm_values.len() + 1
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        match (row, col) {
            (0, 0) => self.hub_value,
            (0, k) | (k, 0) => self.arm_couplings[k - 1],
            (i, j) if i == j => self.arm_values[i - 1],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }
}

/// The single-excitation Hamiltonian of `spec` in the basis `|0⟩, |1⟩, …, |N⟩`.
pub fn build_arrowhead(spec: &StarSpec) -> ArrowheadMatrix {
    let n = spec.edge_count();
    ArrowheadMatrix {
        hub_value: spec.hub_potential(),
        arm_couplings: vec![spec.coupling(); n],
        arm_values: spec.potentials()[1..].to_vec(),
    }
}

/// Matrix elements of the reduced Hamiltonian.
///
/// `a` is the hub potential, `b = √M·ω₀` the coupling of the hub to the
/// symmetric bystander mode, `c = ω₀`, `d` the bystander potential and `e` the
/// potential shared by source and target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub m: usize,
}

impl ReducedParams {
    /// Relative violation of `b² = M c²`.
    pub fn coupling_mismatch(&self) -> f64 {
        let lhs = self.b * self.b;
        let rhs = self.m as f64 * self.c * self.c;
        let scale = lhs.abs().max(rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs).abs() / scale
        }
    }
}

/// Collapses the bystanders of `spec` into one normalized symmetric mode.
///
/// Requires the source and target potentials to agree and all bystanders to
/// share one potential, each to within [`SYMMETRY_TOL`].
pub fn build_reduced(spec: &StarSpec, source: usize, target: usize) -> Result<ReducedParams> {
    spec.check_edge(source, "source")?;
    spec.check_edge(target, "target")?;
    if source == target {
        return Err(Error::validation(format!(
            "source and target are both node {source}"
        )));
    }
    let e = spec.potential(source);
    let lt = spec.potential(target);
    if (e - lt).abs() > SYMMETRY_TOL {
        return Err(Error::Symmetry(format!(
            "source potential {e} differs from target potential {lt}"
        )));
    }
    let mut bystanders = (1..=spec.edge_count()).filter(|&k| k != source && k != target);
    // N >= 3 so there is always at least one bystander
    let first = bystanders.next().expect("star has a bystander");
    let d = spec.potential(first);
    for k in bystanders {
        let lk = spec.potential(k);
        if (lk - d).abs() > SYMMETRY_TOL {
            return Err(Error::Symmetry(format!(
                "bystander {k} has potential {lk}, bystander {first} has {d}"
            )));
        }
    }
    let m = spec.bystander_count();
    Ok(ReducedParams {
        a: spec.hub_potential(),
        b: (m as f64).sqrt() * spec.coupling(),
        c: spec.coupling(),
        d,
        e,
        m,
    })
}

/// The 4×4 Hamiltonian in the order (hub, bystander mode, source, target).
pub fn reduced_matrix(p: &ReducedParams) -> Matrix4<f64> {
    Matrix4::new(
        p.a, p.b, p.c, p.c, //
        p.b, p.d, 0.0, 0.0, //
        p.c, 0.0, p.e, 0.0, //
        p.c, 0.0, 0.0, p.e,
    )
}

/// The XY star Hamiltonian on all `2^(N+1)` spin configurations.
///
/// Bit `j` of a basis index is the state of node `j`; a set bit is the
/// σᶻ = +1 (excited) state, so the all-down state has index 0 and energy 0.
pub fn build_full_spin_hamiltonian(spec: &StarSpec) -> Result<DMatrix<f64>> {
    let n = spec.edge_count();
    if n > MAX_FULL_SPIN_EDGES {
        return Err(Error::ResourceLimit(format!(
            "full spin space of {n} edge nodes has dimension 2^{}; limit is {MAX_FULL_SPIN_EDGES} edges",
            n + 1
        )));
    }
    let dim = 1usize << (n + 1);
    let mut h = DMatrix::zeros(dim, dim);
    let w = spec.coupling();
    for state in 0..dim {
        // (λ/2)(σᶻ + 1) is λ on an excited spin and 0 otherwise
        h[(state, state)] = (0..=n)
            .filter(|&j| state & (1 << j) != 0)
            .map(|j| spec.potential(j))
            .sum();
        // (ω/2)(σˣσˣ + σʸσʸ) = ω(σ⁺σ⁻ + σ⁻σ⁺) swaps antiparallel hub/edge pairs
        let hub_up = state & 1 != 0;
        for j in 1..=n {
            let edge_up = state & (1 << j) != 0;
            if hub_up != edge_up {
                let flipped = state ^ 1 ^ (1 << j);
                h[(flipped, state)] = w;
            }
        }
    }
    Ok(h)
}

/// Index of the single-excitation state `|node⟩` in the full spin basis.
pub fn single_excitation_index(node: usize) -> usize {
    1 << node
}

/// Max-norm of `[H, Σⱼ σⱼᶻ]` for a Hamiltonian on `dim = 2^sites` states.
pub fn total_sz_commutator_norm(h: &DMatrix<f64>) -> f64 {
    let sz = |state: usize| 2.0 * state.count_ones() as f64 - h.nrows().trailing_zeros() as f64;
    let mut worst = 0.0f64;
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            let v = h[(i, j)];
            if v != 0.0 {
                worst = worst.max((v * (sz(j) - sz(i))).abs());
            }
        }
    }
    worst
}

/// Permutation matrix exchanging basis states `i` and `j`.
pub fn exchange_operator(dimension: usize, i: usize, j: usize) -> Result<DMatrix<f64>> {
    check_exchange_indices(dimension, i, j)?;
    let mut p = DMatrix::identity(dimension, dimension);
    p.swap_rows(i, j);
    Ok(p)
}

fn check_exchange_indices(dimension: usize, i: usize, j: usize) -> Result<()> {
    if i >= dimension || j >= dimension {
        return Err(Error::validation(format!(
            "exchange indices ({i}, {j}) out of range for dimension {dimension}"
        )));
    }
    if i == j {
        return Err(Error::validation(format!(
            "exchange needs two distinct indices, got {i} twice"
        )));
    }
    Ok(())
}

/// Whether `P H P = H` within `tol` in max-norm for the exchange of `i` and `j`.
///
/// Out-of-range or equal indices, and non-square matrices, give `false`.
pub fn is_exchange_symmetric(h: &DMatrix<f64>, i: usize, j: usize, tol: f64) -> bool {
    if !h.is_square() || check_exchange_indices(h.nrows(), i, j).is_err() {
        return false;
    }
    let swap = |k: usize| {
        if k == i {
            j
        } else if k == j {
            i
        } else {
            k
        }
    };
    // (PHP)[r, c] = H[σ(r), σ(c)]
    (0..h.ncols()).all(|c| (0..h.nrows()).all(|r| (h[(swap(r), swap(c))] - h[(r, c)]).abs() <= tol))
}

/// `⟨target|U(t)|source⟩` computed from the reduced 4×4 dynamics.
pub fn lift_reduced_amplitude(
    spec: &StarSpec,
    source: usize,
    target: usize,
    t: f64,
) -> Result<ComplexAmplitude> {
    let params = build_reduced(spec, source, target)?;
    let cache = dynamics::EvolutionCache::from_matrix4(&reduced_matrix(&params));
    Ok(cache.amplitude(REDUCED_SOURCE, REDUCED_TARGET, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector4;

    fn spec(potentials: &[f64]) -> StarSpec {
        StarSpec::new(1.0, potentials.to_vec()).unwrap()
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(StarSpec::new(1.0, vec![0.0; 3]).is_err());
        assert!(StarSpec::new(0.0, vec![0.0; 4]).is_err());
        assert!(StarSpec::new(-1.0, vec![0.0; 4]).is_err());
        assert!(StarSpec::new(1.0, vec![0.0, 1.0, f64::NAN, 0.0]).is_err());
        assert!(StarSpec::with_edge_count(4, 1.0, vec![0.0; 4]).is_err());
        assert!(StarSpec::with_edge_count(3, 1.0, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn uniform_arrowhead() {
        let h = build_arrowhead(&spec(&[0.0; 4])).to_dense();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 1.0, 1.0, //
                1.0, 0.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0,
            ],
        );
        assert_eq!(h, expected);
    }

    #[test]
    fn weak_coupling_arrowhead_is_diagonal() {
        let s = StarSpec::new(1e-30, vec![5.0, 1.0, 2.0, 3.0]).unwrap();
        let h = build_arrowhead(&s).to_dense();
        assert_eq!(h.diagonal().as_slice(), &[5.0, 1.0, 2.0, 3.0]);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(h[(i, j)].abs() <= 1e-30);
                }
            }
        }
    }

    #[test]
    fn reduce_reads_off_parameters() {
        let s = spec(&[0.0, 0.5, 0.5, -0.5, -0.5]);
        let p = build_reduced(&s, 1, 2).unwrap();
        assert_eq!(
            p,
            ReducedParams {
                a: 0.0,
                b: 2f64.sqrt(),
                c: 1.0,
                d: -0.5,
                e: 0.5,
                m: 2
            }
        );
        assert!(p.coupling_mismatch() < 1e-12);

        let q = build_reduced(&s, 3, 4).unwrap();
        assert_eq!((q.d, q.e, q.m), (0.5, -0.5, 2));
    }

    #[test]
    fn reduce_rejects_broken_symmetry() {
        let s = spec(&[0.0, 0.5, 0.4, -0.5, -0.5]);
        assert!(matches!(build_reduced(&s, 1, 2), Err(Error::Symmetry(_))));
        let s = spec(&[0.0, 0.5, 0.5, -0.5, -0.4]);
        assert!(matches!(build_reduced(&s, 1, 2), Err(Error::Symmetry(_))));
        let s = spec(&[0.0, 0.5, 0.5, -0.5, -0.5]);
        assert!(matches!(build_reduced(&s, 1, 1), Err(Error::Validation(_))));
        assert!(matches!(build_reduced(&s, 0, 1), Err(Error::Validation(_))));
        assert!(matches!(build_reduced(&s, 1, 5), Err(Error::Validation(_))));
    }

    #[test]
    fn decoupled_reduced_matrix_is_diagonal() {
        let p = ReducedParams {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 2.0,
            e: 3.0,
            m: 1,
        };
        assert_eq!(
            reduced_matrix(&p),
            Matrix4::from_diagonal(&Vector4::new(1.0, 2.0, 3.0, 3.0))
        );
    }

    #[test]
    fn antisymmetric_pair_is_eigenvector() {
        let p = ReducedParams {
            a: 0.3,
            b: 1.7,
            c: -0.4,
            d: 2.2,
            e: -1.1,
            m: 3,
        };
        let h = reduced_matrix(&p);
        let v = Vector4::new(0.0, 0.0, 1.0, -1.0);
        assert!((h * v - p.e * v).amax() < 1e-12);
        assert!((h.trace() - (p.a + p.d + 2.0 * p.e)).abs() < 1e-12);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn exchange_operator_is_an_involution() {
        let p = exchange_operator(4, 2, 3).unwrap();
        let v = nalgebra::DVector::from_vec(vec![0.0, 0.0, 1.0, -1.0]);
        assert_eq!((&p * &v).as_slice(), &[0.0, 0.0, -1.0, 1.0]);
        assert_eq!(&p * &p, DMatrix::identity(4, 4));
        assert!(exchange_operator(4, 2, 2).is_err());
        assert!(exchange_operator(4, 1, 4).is_err());
    }

    #[test]
    fn exchange_symmetry_detection() {
        let sym = build_arrowhead(&spec(&[0.1, 0.5, 0.5, -0.2, 0.7])).to_dense();
        let p = exchange_operator(5, 1, 2).unwrap();
        assert_eq!(&p * &sym * &p, sym);
        assert!(is_exchange_symmetric(&sym, 1, 2, 0.0));

        let broken = build_arrowhead(&spec(&[0.1, 0.5, 0.4, -0.2, 0.7])).to_dense();
        assert!(!is_exchange_symmetric(&broken, 1, 2, 1e-12));

        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 2.0, 3.0]));
        assert!(is_exchange_symmetric(&diag, 1, 2, 0.0));
        assert!(!is_exchange_symmetric(&diag, 0, 1, 0.5));
    }

    #[test]
    fn full_spin_vacuum_is_stationary() {
        let s = spec(&[0.3, -1.2, 0.8, 2.5]);
        let h = build_full_spin_hamiltonian(&s).unwrap();
        assert_eq!(h.nrows(), 16);
        assert!(h.column(0).iter().all(|&v| v == 0.0));
        assert!(h.row(0).iter().all(|&v| v == 0.0));
        assert_eq!(h, h.transpose());
        assert!(total_sz_commutator_norm(&h) < 1e-12);
    }

    #[test]
    fn full_spin_restricts_to_arrowhead() {
        let s = spec(&[0.3, -1.2, 0.8, 2.5, 0.0]);
        let h = build_full_spin_hamiltonian(&s).unwrap();
        let arrow = build_arrowhead(&s);
        for i in 0..=4 {
            for j in 0..=4 {
                let full = h[(single_excitation_index(i), single_excitation_index(j))];
                assert_eq!(full, arrow.get(i, j));
            }
        }
    }

    #[test]
    fn full_spin_size_limit() {
        let s = spec(&[0.0; 12]);
        assert!(matches!(
            build_full_spin_hamiltonian(&s),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn lift_at_time_zero() {
        let s = spec(&[0.0, 0.5, 0.5, -0.5, -0.5]);
        let amp = lift_reduced_amplitude(&s, 1, 2, 0.0).unwrap();
        assert!(amp.norm() < 1e-15);
    }
}

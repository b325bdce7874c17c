//! Interchangeable ways of computing the source-to-target amplitude of a star.
//!
//! | name        | space                           | limit            |
//! |-------------|---------------------------------|------------------|
//! | `reduced`   | 4×4 (hub, bystander mode, s, t) | symmetric specs  |
//! | `arrowhead` | (N+1) single-excitation, sparse | N ≤ 100 000      |
//! | `dense`     | (N+1) single-excitation, dense  | N ≤ 2 000        |
//! | `spin`      | full 2^(N+1) spin space         | N ≤ 10           |
//!
//! The `arrowhead` model stores O(N) numbers: about 24 bytes per edge node
//! plus the core spectrum, so a 100 000-edge star needs a few megabytes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{
    build_arrowhead, build_full_spin_hamiltonian, build_reduced, reduced_matrix,
    single_excitation_index, StarSpec, REDUCED_SOURCE, REDUCED_TARGET,
};
use crate::registry::{Registry, Strategy};

use super::{ArrowheadEvolution, EvolutionCache, TransferChannel};

pub const MAX_ARROWHEAD_EDGES: usize = 100_000;
pub const MAX_DENSE_EDGES: usize = 2_000;

pub trait TransferModel: Strategy {
    /// Largest edge count the model accepts.
    fn max_edges(&self) -> usize;

    /// Spectral form of `⟨target|U(t)|source⟩` for `spec`.
    fn channel(&self, spec: &StarSpec, source: usize, target: usize) -> Result<TransferChannel>;

    fn prepare(&self, spec: &StarSpec, source: usize, target: usize) -> Result<TransferChannel> {
        spec.check_edge(source, "source")?;
        spec.check_edge(target, "target")?;
        if spec.edge_count() > self.max_edges() {
            return Err(Error::ResourceLimit(format!(
                "model `{}` handles at most {} edge nodes, star has {}",
                self.name(),
                self.max_edges(),
                spec.edge_count()
            )));
        }
        self.channel(spec, source, target)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ReducedModel;

impl Strategy for ReducedModel {
    fn name(&self) -> &'static str {
        "reduced"
    }

    fn description(&self) -> &'static str {
        "4x4 model with the bystanders merged into one symmetric mode"
    }
}

impl TransferModel for ReducedModel {
    fn max_edges(&self) -> usize {
        usize::MAX
    }

    fn channel(&self, spec: &StarSpec, source: usize, target: usize) -> Result<TransferChannel> {
        let params = build_reduced(spec, source, target)?;
        Ok(EvolutionCache::from_matrix4(&reduced_matrix(&params))
            .channel(REDUCED_SOURCE, REDUCED_TARGET))
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ArrowheadModel;

impl Strategy for ArrowheadModel {
    fn name(&self) -> &'static str {
        "arrowhead"
    }

    fn description(&self) -> &'static str {
        "single-excitation arrowhead, deflated secular-equation spectrum"
    }
}

impl TransferModel for ArrowheadModel {
    fn max_edges(&self) -> usize {
        MAX_ARROWHEAD_EDGES
    }

    fn channel(&self, spec: &StarSpec, source: usize, target: usize) -> Result<TransferChannel> {
        Ok(ArrowheadEvolution::new(&build_arrowhead(spec)).channel(source, target))
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DenseModel;

impl Strategy for DenseModel {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn description(&self) -> &'static str {
        "single-excitation arrowhead, dense symmetric eigensolver"
    }
}

impl TransferModel for DenseModel {
    fn max_edges(&self) -> usize {
        MAX_DENSE_EDGES
    }

    fn channel(&self, spec: &StarSpec, source: usize, target: usize) -> Result<TransferChannel> {
        Ok(EvolutionCache::new(&build_arrowhead(spec).to_dense())?.channel(source, target))
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SpinModel;

impl Strategy for SpinModel {
    fn name(&self) -> &'static str {
        "spin"
    }

    fn description(&self) -> &'static str {
        "full many-spin Hilbert space (brute force)"
    }
}

impl TransferModel for SpinModel {
    fn max_edges(&self) -> usize {
        crate::model::MAX_FULL_SPIN_EDGES
    }

    fn channel(&self, spec: &StarSpec, source: usize, target: usize) -> Result<TransferChannel> {
        let h = build_full_spin_hamiltonian(spec)?;
        Ok(EvolutionCache::new(&h)?.channel(
            single_excitation_index(source),
            single_excitation_index(target),
        ))
    }
}

/// Built-in transfer models; the default is `reduced`.
pub fn builtin_models() -> Registry<dyn TransferModel> {
    let mut reg: Registry<dyn TransferModel> = Registry::new("transfer model");
    reg.register(Arc::new(ReducedModel))
        .register(Arc::new(ArrowheadModel))
        .register(Arc::new(DenseModel))
        .register(Arc::new(SpinModel));
    reg.set_default("reduced").expect("reduced is registered");
    reg
}

//! Routing one design between different edge nodes.
//!
//! All arms of the star carry the same coupling, so a design that sends node 1
//! to node 2 sends any source to any target once the potentials are permuted to
//! match. Routes are changed by swapping two potentials while no excitation is
//! in flight (at `t = 0` or `t = τ`).

use crate::designer::DesignSolution;
use crate::dynamics::{verify_transfer, VerificationReport};
use crate::error::{Error, Result};
use crate::model::StarSpec;

/// A design together with the route it is currently wired for.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingState {
    pub base: DesignSolution,
    pub source: usize,
    pub target: usize,
    pub realized_spec: StarSpec,
}

impl RoutingState {
    /// The design as solved, routed from node 1 to node 2.
    pub fn from_design(base: DesignSolution) -> Self {
        Self {
            source: base.source(),
            target: base.target(),
            realized_spec: base.realized.clone(),
            base,
        }
    }

    /// Rewires the transfer to end at `new_target` by swapping its potential
    /// with the current target's.
    pub fn retarget(&self, new_target: usize) -> Result<Self> {
        self.realized_spec.check_edge(new_target, "new target")?;
        if new_target == self.source {
            return Err(Error::validation(format!(
                "new target {new_target} is the source"
            )));
        }
        let mut next = self.clone();
        next.realized_spec
            .potentials_mut()
            .swap(self.target, new_target);
        next.target = new_target;
        Ok(next)
    }

    /// Rewires the transfer to start at `new_source`, swapping potentials with
    /// the current source.
    pub fn retarget_source(&self, new_source: usize) -> Result<Self> {
        self.realized_spec.check_edge(new_source, "new source")?;
        if new_source == self.target {
            return Err(Error::validation(format!(
                "new source {new_source} is the target"
            )));
        }
        let mut next = self.clone();
        next.realized_spec
            .potentials_mut()
            .swap(self.source, new_source);
        next.source = new_source;
        Ok(next)
    }

    pub fn verify(&self, tol: f64) -> VerificationReport {
        verify_transfer(
            &self.base,
            &self.realized_spec,
            self.source,
            self.target,
            tol,
        )
    }
}

/// Adds `delta` to every local potential, hub included.
///
/// This multiplies the evolution by a global phase and leaves every transfer
/// fidelity unchanged.
pub fn apply_offset(spec: &StarSpec, delta: f64) -> Result<StarSpec> {
    if !delta.is_finite() {
        return Err(Error::validation(format!("offset {delta} is not finite")));
    }
    let potentials = spec.potentials().iter().map(|p| p + delta).collect();
    StarSpec::new(spec.coupling(), potentials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designer::{design, DesignInput};

    fn routed() -> RoutingState {
        RoutingState::from_design(design(&DesignInput::new(2, 4)).unwrap())
    }

    #[test]
    fn retarget_swaps_two_potentials() {
        let state = routed();
        let p = state.base.params;
        assert_eq!(state.realized_spec.potentials(), &[p.a, p.e, p.e, p.d, p.d]);
        let moved = state.retarget(3).unwrap();
        assert_eq!(moved.realized_spec.potentials(), &[p.a, p.e, p.d, p.e, p.d]);
        assert_eq!((moved.source, moved.target), (1, 3));
        assert_eq!(
            moved.realized_spec.coupling(),
            state.realized_spec.coupling()
        );
    }

    #[test]
    fn retarget_to_current_target_is_a_no_op() {
        let state = routed();
        assert_eq!(state.retarget(2).unwrap(), state);
    }

    #[test]
    fn retarget_errors() {
        let state = routed();
        assert!(matches!(state.retarget(1), Err(Error::Validation(_))));
        assert!(matches!(state.retarget(0), Err(Error::Validation(_))));
        assert!(matches!(state.retarget(5), Err(Error::Validation(_))));
        assert!(matches!(
            state.retarget_source(2),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn retarget_source() {
        let state = routed();
        let p = state.base.params;
        let moved = state.retarget_source(4).unwrap();
        assert_eq!(moved.realized_spec.potentials(), &[p.a, p.d, p.e, p.d, p.e]);
        assert!(moved.verify(1e-9).passed);
    }

    #[test]
    fn offset() {
        let spec = StarSpec::new(1.0, vec![0.0, 0.5, 0.5, -0.5, -0.5]).unwrap();
        assert_eq!(apply_offset(&spec, 0.0).unwrap(), spec);
        let shifted = apply_offset(&spec, 0.5).unwrap();
        assert_eq!(shifted.potentials(), &[0.5, 1.0, 1.0, 0.0, 0.0]);
        assert!(apply_offset(&spec, f64::INFINITY).is_err());
    }

    #[test]
    fn offset_moves_bystanders_to_zero() {
        let state = routed();
        let p = state.base.params;
        let shifted = apply_offset(&state.realized_spec, -p.d).unwrap();
        assert_eq!(
            shifted.potentials(),
            &[p.a - p.d, p.e - p.d, p.e - p.d, 0.0, 0.0]
        );
    }
}

//! Spectral evolution of arrowhead matrices without forming them.
//!
//! Edge nodes sharing a diagonal value are grouped. Within a group only the
//! direction of the coupling vector talks to the hub; its orthogonal complement
//! is an eigenspace at the group value. The remaining core is an arrowhead with
//! one arm per group whose eigenvalues strictly interlace the group values and
//! are found by bisection on the secular equation
//! `α − λ + Σ ζⱼ²/(λ − vⱼ) = 0`. Work and memory are linear in the number of
//! edges when the number of distinct values is small, which is the case for
//! every designed switch.

use crate::model::ArrowheadMatrix;

use super::TransferChannel;

#[derive(Debug, Clone)]
struct ArmGroup {
    value: f64,
    /// Euclidean norm of the arm couplings in the group.
    norm: f64,
}

/// One eigenpair of the core, stored relative to a nearby pole so that
/// `λ − vⱼ` is accurate when `λ` sits close to `vⱼ`.
#[derive(Debug, Clone)]
struct CoreMode {
    origin: f64,
    offset: f64,
    hub_component: f64,
}

impl CoreMode {
    fn energy(&self) -> f64 {
        self.origin + self.offset
    }

    fn gap(&self, value: f64) -> f64 {
        self.offset - (value - self.origin)
    }
}

#[derive(Debug, Clone)]
pub struct ArrowheadEvolution {
    hub: f64,
    arms: Vec<f64>,
    node_group: Vec<usize>,
    groups: Vec<ArmGroup>,
    /// Groups with nonzero coupling, ascending by value.
    coupled: Vec<usize>,
    modes: Vec<CoreMode>,
}

impl ArrowheadEvolution {
    pub fn new(h: &ArrowheadMatrix) -> Self {
        let n = h.arm_values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| h.arm_values[i].total_cmp(&h.arm_values[j]));

        let mut groups: Vec<ArmGroup> = Vec::new();
        let mut node_group = vec![0; n];
        for &i in &order {
            let v = h.arm_values[i];
            if groups.last().is_none_or(|g| g.value != v) {
                groups.push(ArmGroup {
                    value: v,
                    norm: 0.0,
                });
            }
            let g = groups.len() - 1;
            node_group[i] = g;
            groups[g].norm = groups[g].norm.hypot(h.arm_couplings[i]);
        }
        let coupled: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].norm > 0.0)
            .collect();

        let mut evo = Self {
            hub: h.hub_value,
            arms: h.arm_couplings.clone(),
            node_group,
            groups,
            coupled,
            modes: Vec::new(),
        };
        evo.modes = evo.solve_core();
        evo
    }

    pub fn dimension(&self) -> usize {
        self.arms.len() + 1
    }

    /// All eigenvalues with multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.modes.iter().map(CoreMode::energy).collect();
        let mut sizes = vec![0usize; self.groups.len()];
        for &g in &self.node_group {
            sizes[g] += 1;
        }
        for (g, group) in self.groups.iter().enumerate() {
            let deflated = if group.norm > 0.0 {
                sizes[g] - 1
            } else {
                sizes[g]
            };
            values.extend(std::iter::repeat_n(group.value, deflated));
        }
        values.sort_by(f64::total_cmp);
        values
    }

    fn secular(&self, origin: f64, offset: f64) -> f64 {
        let mut f = (self.hub - origin) - offset;
        for &g in &self.coupled {
            let group = &self.groups[g];
            f += group.norm * group.norm / (offset - (group.value - origin));
        }
        f
    }

    /// Finds the root of the decreasing secular function on `(lo, hi)`,
    /// measured from `origin`.
    fn bisect(&self, origin: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..5000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.secular(origin, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn solve_core(&self) -> Vec<CoreMode> {
        let values: Vec<f64> = self.coupled.iter().map(|&g| self.groups[g].value).collect();
        let norms: Vec<f64> = self.coupled.iter().map(|&g| self.groups[g].norm).collect();
        if values.is_empty() {
            return vec![CoreMode {
                origin: self.hub,
                offset: 0.0,
                hub_component: 1.0,
            }];
        }

        // Gershgorin bounds on the whole spectrum
        let total: f64 = norms.iter().sum();
        let lower = values
            .iter()
            .zip(&norms)
            .map(|(v, z)| v - z)
            .fold(self.hub - total, f64::min);
        let upper = values
            .iter()
            .zip(&norms)
            .map(|(v, z)| v + z)
            .fold(self.hub + total, f64::max);
        let lower = lower - lower.abs().max(1.0);
        let upper = upper + upper.abs().max(1.0);

        let k = values.len();
        let mut placed: Vec<(f64, f64)> = Vec::with_capacity(k + 1);
        // below the smallest pole
        placed.push((values[0], self.bisect(values[0], lower - values[0], 0.0)));
        for w in values.windows(2) {
            let (left, right) = (w[0], w[1]);
            let mid = 0.5 * (left + right);
            let (origin, lo, hi) = if self.secular(0.0, mid) > 0.0 {
                (right, mid - right, 0.0)
            } else {
                (left, 0.0, mid - left)
            };
            placed.push((origin, self.bisect(origin, lo, hi)));
        }
        // above the largest pole
        let top = values[k - 1];
        placed.push((top, self.bisect(top, 0.0, upper - top)));

        placed
            .into_iter()
            .map(|(origin, offset)| {
                let mut mode = CoreMode {
                    origin,
                    offset,
                    hub_component: 1.0,
                };
                let tail: f64 = values
                    .iter()
                    .zip(&norms)
                    .map(|(&v, &z)| (z / mode.gap(v)).powi(2))
                    .sum();
                mode.hub_component = 1.0 / (1.0 + tail).sqrt();
                mode
            })
            .collect()
    }

    /// Component of `node` along core mode `mode`.
    fn core_component(&self, mode: &CoreMode, node: usize) -> f64 {
        if node == 0 {
            return mode.hub_component;
        }
        let group = &self.groups[self.node_group[node - 1]];
        if group.norm == 0.0 {
            return 0.0;
        }
        let gap = mode.gap(group.value);
        if gap == 0.0 {
            // a vanishing arm pushed the root onto the pole; the mode is the
            // group direction itself
            return self.arms[node - 1] / group.norm;
        }
        self.arms[node - 1] / gap * mode.hub_component
    }

    /// Spectral weights of `⟨dst|U(t)|src⟩`.
    ///
    /// Panics if a node index is out of range.
    pub fn channel(&self, src: usize, dst: usize) -> TransferChannel {
        assert!(
            src < self.dimension() && dst < self.dimension(),
            "node out of range"
        );
        let mut terms: Vec<(f64, f64)> = self
            .modes
            .iter()
            .map(|m| {
                (
                    m.energy(),
                    self.core_component(m, src) * self.core_component(m, dst),
                )
            })
            .collect();
        if src > 0 && dst > 0 && self.node_group[src - 1] == self.node_group[dst - 1] {
            let group = &self.groups[self.node_group[src - 1]];
            let identity = if src == dst { 1.0 } else { 0.0 };
            let weight = if group.norm > 0.0 {
                identity - (self.arms[src - 1] / group.norm) * (self.arms[dst - 1] / group.norm)
            } else {
                identity
            };
            if weight != 0.0 {
                terms.push((group.value, weight));
            }
        }
        TransferChannel::new(terms)
    }
}

//! Runtime selection of interchangeable algorithm variants by name.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An algorithm variant that can be registered and looked up by name.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str {
        ""
    }
}

/// Name-keyed collection of strategies sharing a trait.
///
/// Iteration order is by name, so listings are deterministic.
pub struct Registry<T: ?Sized + Strategy> {
    kind: &'static str,
    default: Option<&'static str>,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized + Strategy> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            default: None,
            entries: BTreeMap::new(),
        }
    }

    /// Adds a strategy, replacing any previous entry of the same name.
    pub fn register(&mut self, strategy: Arc<T>) -> &mut Self {
        self.entries.insert(strategy.name(), strategy);
        self
    }

    pub fn set_default(&mut self, name: &'static str) -> Result<&mut Self> {
        self.get(name)?;
        self.default = Some(name);
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    /// The default strategy, or the first registered one when none was set.
    pub fn default_strategy(&self) -> Option<Arc<T>> {
        match self.default {
            Some(name) => self.entries.get(name).cloned(),
            None => self.entries.values().next().cloned(),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<T>> {
        self.entries.values()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

impl<T: ?Sized + Strategy> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("default", &self.default)
            .field("entries", &self.names())
            .finish()
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Best energy ever observed per instance id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    best: BTreeMap<String, f64>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.best.get(id).copied()
    }

    /// `E_0 ← min(E_0, e_opt)`; returns whether the entry was created or lowered.
    pub fn update(&mut self, id: &str, e_opt: f64) -> bool {
        if e_opt.is_nan() {
            return false;
        }
        match self.best.get_mut(id) {
            Some(e0) if e_opt < *e0 => {
                *e0 = e_opt;
                true
            }
            Some(_) => false,
            None => {
                self.best.insert(id.to_string(), e_opt);
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.best.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.best.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

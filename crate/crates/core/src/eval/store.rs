use std::collections::BTreeMap;

use crate::syntax::{to_source, Expr};

/// Mutable reference cells. Identifiers are handed out in increasing order
/// and never reused within a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Store {
    cells: BTreeMap<usize, Expr>,
    next: usize,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_id(&self) -> usize {
        self.next
    }

    pub fn alloc(&mut self, value: Expr) -> usize {
        let id = self.next;
        self.next += 1;
        self.cells.insert(id, value);
        id
    }

    pub fn get(&self, id: usize) -> Option<&Expr> {
        self.cells.get(&id)
    }

    /// Overwrites an allocated cell; returns false for unknown identifiers.
    pub fn set(&mut self, id: usize, value: Expr) -> bool {
        match self.cells.get_mut(&id) {
            Some(slot) => {
                *slot = value;
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.cells.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Expr)> {
        self.cells.iter().map(|(k, v)| (*k, v))
    }

    /// `"id = value"` lines in identifier order.
    pub fn display(&self) -> Vec<String> {
        self.iter()
            .map(|(id, v)| format!("{id} = {}", to_source(v)))
            .collect()
    }
}

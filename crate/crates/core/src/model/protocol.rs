use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deterministic sender: total map from input index to message index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Protocol {
    assignment: Vec<usize>,
    num_messages: usize,
}

impl Protocol {
    pub fn new(assignment: Vec<usize>, num_messages: usize) -> Result<Self> {
        if num_messages == 0 {
            return Err(Error::InvalidProtocol("message space is empty".into()));
        }
        if let Some((i, m)) = assignment
            .iter()
            .enumerate()
            .find(|(_, &m)| m >= num_messages)
        {
            return Err(Error::InvalidProtocol(format!(
                "input {i} maps to message {m} but K = {num_messages}"
            )));
        }
        Ok(Self {
            assignment,
            num_messages,
        })
    }

    /// Input i maps to message i.
    pub fn identity(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            num_messages: n.max(1),
        }
    }

    /// Every input maps to message 0.
    pub fn constant(n: usize, num_messages: usize) -> Self {
        Self {
            assignment: vec![0; n],
            num_messages: num_messages.max(1),
        }
    }

    /// Protocol number `index` in base-K enumeration order (input 0 is the
    /// least significant digit).
    pub fn from_index(mut index: u64, n: usize, num_messages: usize) -> Self {
        let k = num_messages as u64;
        let assignment = (0..n)
            .map(|_| {
                let m = (index % k) as usize;
                index /= k;
                m
            })
            .collect();
        Self {
            assignment,
            num_messages,
        }
    }

    /// Builds a protocol from a list of classes (class c -> message c).
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (m, class) in classes.iter().enumerate() {
            for &i in class {
                if i >= n {
                    return Err(Error::InvalidProtocol(format!("input {i} out of range")));
                }
                if assignment[i] != usize::MAX {
                    return Err(Error::InvalidProtocol(format!("input {i} assigned twice")));
                }
                assignment[i] = m;
            }
        }
        if let Some(i) = assignment.iter().position(|&m| m == usize::MAX) {
            return Err(Error::InvalidProtocol(format!("input {i} is unassigned")));
        }
        Self::new(assignment, classes.len())
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_messages(&self) -> usize {
        self.num_messages
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn message_of(&self, input: usize) -> usize {
        self.assignment[input]
    }

    /// Inputs grouped by message; unused messages yield empty classes.
    pub fn equivalence_classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_messages];
        for (i, &m) in self.assignment.iter().enumerate() {
            classes[m].push(i);
        }
        classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_messages];
        for &m in &self.assignment {
            sizes[m] += 1;
        }
        sizes
    }

    pub fn unique_messages(&self) -> usize {
        self.class_sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Relabels messages in order of first use, so protocols equal up to
    /// message relabeling share a canonical form.
    pub fn canonical(&self) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.num_messages];
        let mut next = 0;
        self.assignment
            .iter()
            .map(|&m| {
                if map[m] == usize::MAX {
                    map[m] = next;
                    next += 1;
                }
                map[m]
            })
            .collect()
    }

    /// Checks that the protocol covers exactly `n` inputs.
    pub fn check_inputs(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::InvalidProtocol(format!(
                "protocol covers {} inputs but the space has {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equivalence_class_examples() {
        let p = Protocol::identity(3);
        assert_eq!(p.equivalence_classes(), vec![vec![0], vec![1], vec![2]]);
        let p = Protocol::constant(4, 2);
        assert_eq!(p.equivalence_classes(), vec![vec![0, 1, 2, 3], vec![]]);
        let p = Protocol::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(p.class_sizes(), vec![2, 2]);
    }

    #[test]
    fn rejects_out_of_range_messages() {
        assert!(Protocol::new(vec![0, 2], 2).is_err());
        assert!(Protocol::from_classes(3, &[vec![0, 1]]).is_err());
        assert!(Protocol::from_classes(2, &[vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn canonical_form_ignores_relabeling() {
        let a = Protocol::new(vec![1, 1, 0, 2], 3).unwrap();
        let b = Protocol::new(vec![2, 2, 1, 0], 3).unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), vec![0, 0, 1, 2]);
    }

    #[test]
    fn index_enumeration_is_bijective() {
        let all: std::collections::HashSet<_> =
            (0..16).map(|i| Protocol::from_index(i, 4, 2)).collect();
        assert_eq!(all.len(), 16);
    }
}

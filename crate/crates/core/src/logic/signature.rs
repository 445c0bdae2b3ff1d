use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A purely relational signature with constant symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Signature {
    pub relations: Vec<RelationSymbol>,
    #[serde(default)]
    pub constants: Vec<String>,
}

impl Signature {
    pub fn new(relations: Vec<(String, usize)>, constants: Vec<String>) -> Result<Self> {
        let sig = Signature {
            relations: relations
                .into_iter()
                .map(|(name, arity)| RelationSymbol { name, arity })
                .collect(),
            constants,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// `{<}`, the signature of the dense linear order.
    pub fn order() -> Self {
        Signature {
            relations: vec![RelationSymbol {
                name: "<".into(),
                arity: 2,
            }],
            constants: Vec::new(),
        }
    }

    /// `{<0, …, <(n-1)}`.
    pub fn multi_order(n: usize) -> Self {
        Signature {
            relations: (0..n)
                .map(|i| RelationSymbol {
                    name: format!("<{i}"),
                    arity: 2,
                })
                .collect(),
            constants: Vec::new(),
        }
    }

    /// A single binary relation named `name`.
    pub fn binary(name: &str) -> Self {
        Signature {
            relations: vec![RelationSymbol {
                name: name.into(),
                arity: 2,
            }],
            constants: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for r in &self.relations {
            if r.arity == 0 {
                return Err(Error::InvalidSignature(format!(
                    "relation `{}` has arity 0",
                    r.name
                )));
            }
            if r.name.is_empty() || !seen.insert(r.name.as_str()) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate or empty name `{}`",
                    r.name
                )));
            }
        }
        for c in &self.constants {
            if c.is_empty() || !seen.insert(c.as_str()) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate or empty name `{c}`"
                )));
            }
        }
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<(usize, usize)> {
        self.relations
            .iter()
            .position(|r| r.name == name)
            .map(|i| (i, self.relations[i].arity))
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nullary() {
        assert!(Signature::new(vec![("R".into(), 2), ("R".into(), 1)], vec![]).is_err());
        assert!(Signature::new(vec![("R".into(), 0)], vec![]).is_err());
        assert!(Signature::new(vec![("R".into(), 2)], vec!["R".into()]).is_err());
        let sig = Signature::new(vec![("R".into(), 2)], vec!["c".into()]).unwrap();
        assert_eq!(sig.relation("R"), Some((0, 2)));
        assert!(sig.has_constant("c"));
    }
}

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::signature::Signature;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_UNIVERSE: usize = 64;

/// Largest relation table (in tuples) a structure may allocate.
const MAX_TABLE: usize = 1 << 26;

/// The on-disk JSON form of a finite structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub signature: Signature,
    pub universe: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    /// Must be set for an empty universe to be accepted.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty: bool,
}

/// A finite relational structure. Elements are addressed by their index in
/// `universe`; relation tables are bitsets over mixed-radix tuple codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    signature: Signature,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    tables: Vec<FixedBitSet>,
    constants: Vec<usize>,
}

impl FiniteStructure {
    /// Builds a structure from element names and tuples of element indices.
    pub fn new(
        signature: Signature,
        universe: Vec<String>,
        relations: Vec<Vec<Vec<usize>>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        Self::with_cap(signature, universe, relations, constants, DEFAULT_MAX_UNIVERSE)
    }

    pub fn with_cap(
        signature: Signature,
        universe: Vec<String>,
        relations: Vec<Vec<Vec<usize>>>,
        constants: Vec<usize>,
        max_universe: usize,
    ) -> Result<Self> {
        signature.validate()?;
        let n = universe.len();
        if n > max_universe {
            return Err(Error::CapExceeded {
                size: n as u128,
                cap: max_universe as u128,
            });
        }
        let mut index = HashMap::new();
        for (i, e) in universe.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidStructure(format!("element `{e}` listed twice")));
            }
        }
        if relations.len() != signature.relations.len() {
            return Err(Error::InvalidStructure(
                "one table per relation symbol is required".into(),
            ));
        }
        if constants.len() != signature.constants.len() {
            return Err(Error::InvalidStructure("every constant must be interpreted".into()));
        }
        if let Some(c) = constants.iter().find(|c| **c >= n) {
            return Err(Error::InvalidStructure(format!("constant value {c} out of range")));
        }
        let mut tables = Vec::with_capacity(relations.len());
        for (sym, tuples) in signature.relations.iter().zip(relations) {
            let size = table_size(n, sym.arity)?;
            let mut table = FixedBitSet::with_capacity(size);
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(Error::ArityMismatch {
                        name: sym.name.clone(),
                        expected: sym.arity,
                        found: t.len(),
                    });
                }
                if t.iter().any(|e| *e >= n) {
                    return Err(Error::InvalidStructure(format!(
                        "tuple of `{}` leaves the universe",
                        sym.name
                    )));
                }
                table.insert(encode(n, &t));
            }
            tables.push(table);
        }
        Ok(FiniteStructure {
            signature,
            universe,
            index,
            tables,
            constants,
        })
    }

    pub fn from_file(file: StructureFile, max_universe: usize) -> Result<Self> {
        if file.universe.is_empty() && !file.empty {
            return Err(Error::InvalidStructure(
                "empty universe (set \"empty\": true to allow it)".into(),
            ));
        }
        let index: HashMap<&str, usize> = file
            .universe
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i))
            .collect();
        let lookup = |e: &String| index.get(e.as_str()).copied().ok_or_else(|| Error::UnknownElement(e.clone()));
        if let Some(name) = file.relations.keys().find(|r| file.signature.relation(r).is_none()) {
            return Err(Error::UnknownRelation(name.clone()));
        }
        let mut relations = Vec::new();
        for sym in &file.signature.relations {
            let tuples = file.relations.get(&sym.name).cloned().unwrap_or_default();
            relations.push(
                tuples
                    .iter()
                    .map(|t| t.iter().map(lookup).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        if let Some(name) = file.constants.keys().find(|c| !file.signature.has_constant(c)) {
            return Err(Error::UnknownConstant(name.clone()));
        }
        let mut constants = Vec::new();
        for c in &file.signature.constants {
            let e = file
                .constants
                .get(c)
                .ok_or_else(|| Error::InvalidStructure(format!("constant `{c}` is not interpreted")))?;
            constants.push(lookup(e)?);
        }
        Self::with_cap(file.signature, file.universe, relations, constants, max_universe)
    }

    pub fn from_json(text: &str, max_universe: usize) -> Result<Self> {
        let file: StructureFile = serde_json::from_str(text)?;
        Self::from_file(file, max_universe)
    }

    pub fn to_file(&self) -> StructureFile {
        let n = self.size();
        let mut relations = BTreeMap::new();
        for (sym, table) in self.signature.relations.iter().zip(&self.tables) {
            let tuples = table
                .ones()
                .map(|code| {
                    decode(n, sym.arity, code)
                        .into_iter()
                        .map(|e| self.universe[e].clone())
                        .collect()
                })
                .collect();
            relations.insert(sym.name.clone(), tuples);
        }
        let constants = self
            .signature
            .constants
            .iter()
            .zip(&self.constants)
            .map(|(c, e)| (c.clone(), self.universe[*e].clone()))
            .collect();
        StructureFile {
            signature: self.signature.clone(),
            universe: self.universe.clone(),
            relations,
            constants,
            empty: self.universe.is_empty(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("structure files serialize")
    }

    /// The chain 0 < 1 < … < k-1 in the signature {<}.
    pub fn chain(k: usize) -> Self {
        let mut lt = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                lt.push(vec![a, b]);
            }
        }
        FiniteStructure::with_cap(Signature::order(), names(k), vec![lt], vec![], usize::MAX)
            .expect("chains are well formed")
    }

    /// k elements and no relations: only equality is available.
    pub fn pure_equality(k: usize) -> Self {
        FiniteStructure::with_cap(Signature::default(), names(k), vec![], vec![], usize::MAX)
            .expect("pure sets are well formed")
    }

    /// The grid side^n with `<i` comparing the i-th coordinates strictly.
    pub fn coordinate_grid(side: usize, n: usize) -> Result<Self> {
        let size = side.checked_pow(n as u32).ok_or(Error::CapExceeded {
            size: u128::MAX,
            cap: DEFAULT_MAX_UNIVERSE as u128,
        })?;
        let points: Vec<Vec<usize>> = (0..size).map(|c| decode(side, n, c)).collect();
        let universe = points
            .iter()
            .map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_"))
            .collect();
        let relations = (0..n)
            .map(|i| {
                let mut tuples = Vec::new();
                for (a, p) in points.iter().enumerate() {
                    for (b, q) in points.iter().enumerate() {
                        if p[i] < q[i] {
                            tuples.push(vec![a, b]);
                        }
                    }
                }
                tuples
            })
            .collect();
        FiniteStructure::new(Signature::multi_order(n), universe, relations, vec![])
    }

    /// A structure over `{R}` with `R` binary, given by its adjacency bits
    /// (bit `a*k + b` set iff `R(a,b)`).
    pub fn binary_from_bits(k: usize, bits: u64) -> Self {
        let mut tuples = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if bits >> (a * k + b) & 1 == 1 {
                    tuples.push(vec![a, b]);
                }
            }
        }
        FiniteStructure::with_cap(Signature::binary("R"), names(k), vec![tuples], vec![], usize::MAX)
            .expect("binary structures are well formed")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn element(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn constant(&self, name: &str) -> Result<usize> {
        self.signature
            .constants
            .iter()
            .position(|c| c == name)
            .map(|i| self.constants[i])
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    pub fn table(&self, rel: usize) -> &FixedBitSet {
        &self.tables[rel]
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.tables[rel].contains(encode(self.size(), tuple))
    }

    /// Tuples of relation `rel`, in code order.
    pub fn tuples(&self, rel: usize) -> Vec<Vec<usize>> {
        let arity = self.signature.relations[rel].arity;
        self.tables[rel]
            .ones()
            .map(|c| decode(self.size(), arity, c))
            .collect()
    }

    /// The isomorphic copy in which element `i` is renamed to `perm[i]`
    /// (element names travel with the elements).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidStructure("not a permutation".into()));
        }
        let mut universe = vec![String::new(); n];
        for (i, p) in perm.iter().enumerate() {
            universe[*p] = self.universe[i].clone();
        }
        let relations = (0..self.tables.len())
            .map(|r| {
                self.tuples(r)
                    .into_iter()
                    .map(|t| t.into_iter().map(|e| perm[e]).collect())
                    .collect()
            })
            .collect();
        let constants = self.constants.iter().map(|c| perm[*c]).collect();
        FiniteStructure::with_cap(self.signature.clone(), universe, relations, constants, usize::MAX)
    }

    /// The substructure induced on `keep` (which must contain the constants).
    pub fn induced(&self, keep: &[usize]) -> Result<Self> {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let constants = self
            .constants
            .iter()
            .map(|c| {
                pos.get(c)
                    .copied()
                    .ok_or_else(|| Error::InvalidStructure("substructure drops a constant".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let universe = keep.iter().map(|e| self.universe[*e].clone()).collect();
        let relations = (0..self.tables.len())
            .map(|r| {
                self.tuples(r)
                    .into_iter()
                    .filter_map(|t| t.iter().map(|e| pos.get(e).copied()).collect::<Option<Vec<_>>>())
                    .collect()
            })
            .collect();
        FiniteStructure::with_cap(self.signature.clone(), universe, relations, constants, usize::MAX)
    }
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn table_size(n: usize, arity: usize) -> Result<usize> {
    n.checked_pow(arity as u32)
        .filter(|s| *s <= MAX_TABLE)
        .ok_or(Error::CapExceeded {
            size: (n as u128).saturating_pow(arity as u32),
            cap: MAX_TABLE as u128,
        })
}

/// Mixed-radix code of a tuple, first coordinate most significant.
pub(crate) fn encode(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, e| acc * n + e)
}

pub(crate) fn decode(n: usize, arity: usize, mut code: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = code % n.max(1);
        code /= n.max(1);
    }
    out
}

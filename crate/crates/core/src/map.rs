//! Continuous maps between finite T0-spaces, i.e. order-preserving maps.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::Poset;

#[derive(Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    dom: Arc<Poset>,
    cod: Arc<Poset>,
    values: Vec<usize>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", self.dom.name(x), self.cod.name(y)))
            .collect();
        f.debug_tuple("MonotoneMap").field(&pairs).finish()
    }
}

impl MonotoneMap {
    /// Checks arity, range and order preservation.
    pub fn new(dom: Arc<Poset>, cod: Arc<Poset>, values: Vec<usize>) -> Result<Self> {
        if values.len() != dom.len() {
            return Err(Error::ArityMismatch {
                expected: dom.len(),
                got: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= cod.len()) {
            return Err(Error::UnknownElement(format!("#{bad}")));
        }
        // Checking covers suffices: the order is their transitive closure.
        for &(lo, hi) in dom.covers() {
            if !cod.leq(values[lo], values[hi]) {
                return Err(Error::NotMonotone {
                    lo: dom.name(lo).to_string(),
                    hi: dom.name(hi).to_string(),
                    lo_image: cod.name(values[lo]).to_string(),
                    hi_image: cod.name(values[hi]).to_string(),
                });
            }
        }
        Ok(MonotoneMap { dom, cod, values })
    }

    /// Builds a map from `(domain name, codomain name)` pairs covering the domain.
    pub fn from_names<S: AsRef<str>>(dom: Arc<Poset>, cod: Arc<Poset>, pairs: &[(S, S)]) -> Result<Self> {
        let mut values = vec![usize::MAX; dom.len()];
        for (x, y) in pairs {
            let x = dom.index_of(x.as_ref())?;
            values[x] = cod.index_of(y.as_ref())?;
        }
        if let Some(x) = values.iter().position(|&v| v == usize::MAX) {
            return Err(Error::Unassigned(dom.name(x).to_string()));
        }
        Self::new(dom, cod, values)
    }

    pub(crate) fn new_unchecked(dom: Arc<Poset>, cod: Arc<Poset>, values: Vec<usize>) -> Self {
        debug_assert!(MonotoneMap::new(dom.clone(), cod.clone(), values.clone()).is_ok());
        MonotoneMap { dom, cod, values }
    }

    pub fn identity(p: Arc<Poset>) -> Self {
        let values = (0..p.len()).collect();
        MonotoneMap {
            dom: p.clone(),
            cod: p,
            values,
        }
    }

    /// The constant map `C_b`.
    pub fn constant(dom: Arc<Poset>, cod: Arc<Poset>, b: usize) -> Self {
        assert!(b < cod.len(), "constant value out of range");
        let values = vec![b; dom.len()];
        MonotoneMap { dom, cod, values }
    }

    pub fn dom(&self) -> &Arc<Poset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<Poset> {
        &self.cod
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn apply_name(&self, x: &str) -> Result<&str> {
        let i = self.dom.index_of(x)?;
        Ok(self.cod.name(self.values[i]))
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &MonotoneMap) -> Result<MonotoneMap> {
        if **first.cod() != *self.dom {
            return Err(Error::DomainMismatch);
        }
        let values = first.values.iter().map(|&y| self.values[y]).collect();
        Ok(MonotoneMap {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            values,
        })
    }

    /// The same assignment between the opposite posets.
    pub fn opposite(&self) -> MonotoneMap {
        MonotoneMap {
            dom: Arc::new(self.dom.opposite()),
            cod: Arc::new(self.cod.opposite()),
            values: self.values.clone(),
        }
    }

    /// The same assignment between the reversed posets, names unchanged.
    pub fn reversed(&self) -> MonotoneMap {
        MonotoneMap {
            dom: Arc::new(self.dom.reversed()),
            cod: Arc::new(self.cod.reversed()),
            values: self.values.clone(),
        }
    }

    pub fn is_endomap(&self) -> bool {
        *self.dom == *self.cod
    }

    /// Pointwise order `self <= other`. Both maps must share domain and codomain.
    pub fn pointwise_leq(&self, other: &MonotoneMap) -> bool {
        self.values.iter().zip(&other.values).all(|(&a, &b)| self.cod.leq(a, b))
    }

    /// Pointwise comparison against the identity: `self <= Id`.
    pub fn below_identity(&self) -> bool {
        self.is_endomap() && self.values.iter().enumerate().all(|(x, &y)| self.dom.leq(y, x))
    }

    pub fn above_identity(&self) -> bool {
        self.is_endomap() && self.values.iter().enumerate().all(|(x, &y)| self.dom.leq(x, y))
    }

    pub fn is_identity(&self) -> bool {
        self.is_endomap() && self.values.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_endomap() && self.values.iter().all(|&y| self.values[y] == y)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.values.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    /// Bijective with monotone inverse.
    pub fn is_isomorphism(&self) -> bool {
        self.dom.len() == self.cod.len()
            && self.is_injective()
            && (0..self.dom.len()).all(|x| {
                (0..self.dom.len()).all(|y| self.dom.leq(x, y) == self.cod.leq(self.values[x], self.values[y]))
            })
    }

    /// Image as a set of codomain indices.
    pub fn image(&self) -> crate::poset::ElemSet {
        let mut s = self.cod.empty_set();
        for &y in &self.values {
            s.insert(y);
        }
        s
    }

    /// `f^{-1}(set)`.
    pub fn preimage(&self, set: &crate::poset::ElemSet) -> crate::poset::ElemSet {
        let mut s = self.dom.empty_set();
        for (x, &y) in self.values.iter().enumerate() {
            if set.contains(y) {
                s.insert(x);
            }
        }
        s
    }
}

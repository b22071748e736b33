//! k-fold tensor powers of an algebra with componentwise multiplication,
//! used to evaluate coproducts and the Hopf axiom identities (arities 1-3).

use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{same_algebra, terms_add_into, Algebra, Monomial, NCElement, Terms};
use crate::error::CkError;
use crate::ring::Coefficient;

pub type TensorKey = SmallVec<[Monomial; 3]>;
pub type TensorTerms = BTreeMap<TensorKey, Coefficient>;

/// Element of the `arity`-fold tensor power of `alg`.
#[derive(Clone)]
pub struct TensorElement {
    alg: Arc<Algebra>,
    arity: usize,
    terms: TensorTerms,
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorElement[{}^{}]({})", self.alg.id, self.arity, self)
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let slots: Vec<String> = key.iter().map(|m| self.alg.display_mono(m)).collect();
            let cs = c.canonical_text();
            if c.is_one() {
                write!(f, "{}", slots.join(" (x) "))?;
            } else {
                write!(f, "({}) {}", cs, slots.join(" (x) "))?;
            }
        }
        Ok(())
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.terms == other.terms
            && same_algebra(&self.alg, &other.alg)
    }
}

impl TensorElement {
    pub fn zero(alg: &Arc<Algebra>, arity: usize) -> Self {
        assert!(arity >= 1);
        TensorElement { alg: alg.clone(), arity, terms: TensorTerms::new() }
    }

    pub fn one(alg: &Arc<Algebra>, arity: usize) -> Self {
        let mut t = Self::zero(alg, arity);
        let key: TensorKey = (0..arity).map(|_| alg.unit_mono()).collect();
        t.terms.insert(key, Coefficient::one(&alg.ring));
        t
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &TensorTerms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: TensorKey, c: Coefficient) {
        assert_eq!(key.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c).expect("same ring");
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Pure tensor of elements, one per slot.
    pub fn from_factors(factors: &[NCElement]) -> Result<Self, CkError> {
        assert!(!factors.is_empty());
        let alg = factors[0].algebra().clone();
        for f in factors {
            if !same_algebra(f.algebra(), &alg) {
                return Err(CkError::AlgebraMismatch("tensor factors".into()));
            }
        }
        let mut out = Self::zero(&alg, factors.len());
        let mut keys: Vec<(TensorKey, Coefficient)> =
            vec![(TensorKey::new(), Coefficient::one(&alg.ring))];
        for f in factors {
            let mut next = Vec::new();
            for (key, c) in &keys {
                for (m, cm) in f.terms() {
                    let mut k2 = key.clone();
                    k2.push(m.clone());
                    next.push((k2, c.mul(cm)?));
                }
            }
            keys = next;
        }
        for (k, c) in keys {
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TensorElement {
            alg: self.alg.clone(),
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero(&self.alg, self.arity);
        for (k, cc) in &self.terms {
            out.add_term(k.clone(), cc.mul(c).expect("same ring"));
        }
        out
    }

    /// Componentwise product `(a (x) b)(c (x) d) = ac (x) bd`, normalized.
    pub fn mul(&self, other: &Self) -> Result<Self, CkError> {
        if self.arity != other.arity {
            return Err(CkError::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        if !same_algebra(&self.alg, &other.alg) {
            return Err(CkError::AlgebraMismatch("tensor factors".into()));
        }
        let mut out = Self::zero(&self.alg, self.arity);
        let mut budget = self.alg.step_budget;
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let c = c1.mul(c2)?;
                // per-slot normalized products, then distribute
                let mut slots: Vec<Terms> = Vec::with_capacity(self.arity);
                for (m1, m2) in k1.iter().zip(k2.iter()) {
                    let mut t1 = Terms::new();
                    t1.insert(m1.clone(), Coefficient::one(&self.alg.ring));
                    let mut t2 = Terms::new();
                    t2.insert(m2.clone(), Coefficient::one(&self.alg.ring));
                    slots.push(self.alg.terms_times_terms(&t1, &t2, &mut budget)?);
                }
                let mut partial: Vec<(TensorKey, Coefficient)> =
                    vec![(TensorKey::new(), c)];
                for slot in &slots {
                    let mut next = Vec::new();
                    for (key, cc) in &partial {
                        for (m, cm) in slot {
                            let mut k = key.clone();
                            k.push(m.clone());
                            next.push((k, cc.mul(cm)?));
                        }
                    }
                    partial = next;
                }
                for (k, cc) in partial {
                    out.add_term(k, cc);
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, CkError> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    /// Swap two slots (the plain transposition map).
    pub fn transpose(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(&self.alg, self.arity);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2.swap(i, j);
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Multiply all slots together into a single element of the algebra.
    pub fn collapse(&self) -> Result<NCElement, CkError> {
        let mut out = Terms::new();
        let mut budget = self.alg.step_budget;
        for (k, c) in &self.terms {
            let mut acc = Terms::new();
            acc.insert(self.alg.unit_mono(), c.clone());
            for m in k {
                let mut t = Terms::new();
                t.insert(m.clone(), Coefficient::one(&self.alg.ring));
                acc = self.alg.terms_times_terms(&acc, &t, &mut budget)?;
            }
            for (m, c) in acc {
                terms_add_into(&mut out, m, c);
            }
        }
        Ok(NCElement::from_terms(&self.alg, out))
    }

    pub fn canonical_text(&self) -> String {
        format!("{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GenDef;
    use crate::ring::SymbolTable;

    fn commutative_pair() -> Arc<Algebra> {
        let ring = SymbolTable::ck(2);
        let gens = vec![
            GenDef { name: "u".into(), invertible: false, weight: 1 },
            GenDef { name: "v".into(), invertible: false, weight: 1 },
        ];
        let alg = Algebra::new("pair", ring, gens);
        alg.validate().unwrap();
        Arc::new(alg)
    }

    #[test]
    fn componentwise_product() {
        let alg = commutative_pair();
        let u = NCElement::gen(&alg, "u");
        let v = NCElement::gen(&alg, "v");
        let one = NCElement::one(&alg);
        // (1 (x) v) * (v (x) 1) = v (x) v
        let a = TensorElement::from_factors(&[one.clone(), v.clone()]).unwrap();
        let b = TensorElement::from_factors(&[v.clone(), one.clone()]).unwrap();
        let want = TensorElement::from_factors(&[v.clone(), v.clone()]).unwrap();
        assert_eq!(a.mul(&b).unwrap(), want);
        let _ = u;
    }

    #[test]
    fn transpose_swaps_slots() {
        let alg = commutative_pair();
        let u = NCElement::gen(&alg, "u");
        let v = NCElement::gen(&alg, "v");
        let a = TensorElement::from_factors(&[u.clone(), v.clone()]).unwrap();
        let b = TensorElement::from_factors(&[v, u]).unwrap();
        assert_eq!(a.transpose(0, 1), b);
    }
}

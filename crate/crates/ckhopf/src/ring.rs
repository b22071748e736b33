//! Exact arithmetic in the commutative coefficient ring: rational linear
//! combinations of Laurent monomials in the invertible symbols (`lambda`, `c`)
//! times ordinary monomials in the non-invertible constants `k1..kN`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::CkError;

/// Exponent vector over the symbols of a [`SymbolTable`].
pub type SymExps = SmallVec<[i16; 8]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDef {
    pub name: String,
    pub invertible: bool,
}

/// Ordered list of named ring symbols. Invertible symbols admit negative
/// exponents (Laurent), the others only non-negative powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<SymbolDef>,
}

impl SymbolTable {
    pub fn new(symbols: Vec<SymbolDef>) -> Result<Self, CkError> {
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(CkError::Ring(format!("duplicate symbol `{}`", s.name)));
            }
        }
        Ok(SymbolTable { symbols })
    }

    /// Standard table for the Cayley-Klein constructions at dimension `n`:
    /// `lambda` and `c` invertible, `k1..kn` non-invertible.
    pub fn ck(n: usize) -> Arc<Self> {
        let mut symbols = vec![
            SymbolDef { name: "lambda".into(), invertible: true },
            SymbolDef { name: "c".into(), invertible: true },
        ];
        for a in 1..=n {
            symbols.push(SymbolDef { name: format!("k{a}"), invertible: false });
        }
        Arc::new(SymbolTable { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[SymbolDef] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.symbols[idx].name
    }

    pub fn invertible(&self, idx: usize) -> bool {
        self.symbols[idx].invertible
    }
}

fn tables_match(a: &Arc<SymbolTable>, b: &Arc<SymbolTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Element of the coefficient ring, in normal form: a map from exponent
/// vectors to non-zero rationals.
///
/// Invariants: no stored rational is zero; negative exponents occur only on
/// invertible symbols.
#[derive(Debug, Clone)]
pub struct Coefficient {
    table: Arc<SymbolTable>,
    terms: BTreeMap<SymExps, BigRational>,
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        tables_match(&self.table, &other.table) && self.terms == other.terms
    }
}
impl Eq for Coefficient {}

impl Coefficient {
    pub fn zero(table: &Arc<SymbolTable>) -> Self {
        Coefficient { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn one(table: &Arc<SymbolTable>) -> Self {
        Self::from_rational(table, BigRational::one())
    }

    pub fn from_rational(table: &Arc<SymbolTable>, q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(SymExps::from_elem(0, table.len()), q);
        }
        Coefficient { table: table.clone(), terms }
    }

    pub fn from_int(table: &Arc<SymbolTable>, n: i64) -> Self {
        Self::from_rational(table, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(table: &Arc<SymbolTable>, num: i64, den: i64) -> Self {
        Self::from_rational(table, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The symbol `name` raised to `exp`, times `q`.
    pub fn sym_pow(table: &Arc<SymbolTable>, name: &str, exp: i16, q: BigRational) -> Self {
        let idx = table
            .index_of(name)
            .unwrap_or_else(|| panic!("unknown symbol `{name}`"));
        assert!(
            exp >= 0 || table.invertible(idx),
            "negative exponent on non-invertible symbol `{name}`"
        );
        let mut e = SymExps::from_elem(0, table.len());
        e[idx] = exp;
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(e, q);
        }
        Coefficient { table: table.clone(), terms }
    }

    pub fn symbol(table: &Arc<SymbolTable>, name: &str) -> Self {
        Self::sym_pow(table, name, 1, BigRational::one())
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(e, q)| e.iter().all(|&x| x == 0) && q.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymExps, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn check_same(&self, other: &Self) -> Result<(), CkError> {
        if tables_match(&self.table, &other.table) {
            Ok(())
        } else {
            Err(CkError::Ring("symbol-table mismatch".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CkError> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (e, q) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += q;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Ok(Coefficient { table: self.table.clone(), terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CkError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Coefficient {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(e, q)| (e.clone(), -q)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CkError> {
        self.check_same(other)?;
        let mut terms: BTreeMap<SymExps, BigRational> = BTreeMap::new();
        for (e1, q1) in &self.terms {
            for (e2, q2) in &other.terms {
                let e: SymExps = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                let q = q1 * q2;
                let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
                *entry += q;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        Ok(Coefficient { table: self.table.clone(), terms })
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.table);
        }
        Coefficient {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Result<Self, CkError> {
        let mut acc = Self::one(&self.table);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Substitute symbols per `bindings` and renormalize. Binding an
    /// invertible symbol to zero (or to a non-invertible value) is rejected.
    pub fn specialize(&self, bindings: &BTreeMap<String, Coefficient>) -> Result<Self, CkError> {
        let mut binds: Vec<Option<&Coefficient>> = vec![None; self.table.len()];
        for (name, value) in bindings {
            let idx = self
                .table
                .index_of(name)
                .ok_or_else(|| CkError::Ring(format!("unknown symbol `{name}`")))?;
            value.check_same(self)?;
            if self.table.invertible(idx) {
                if value.is_zero() {
                    return Err(CkError::Ring(format!(
                        "cannot bind invertible symbol `{name}` to 0"
                    )));
                }
                if !value.is_invertible_monomial() {
                    return Err(CkError::Ring(format!(
                        "invertible symbol `{name}` must be bound to an invertible monomial"
                    )));
                }
            }
            binds[idx] = Some(value);
        }
        let mut out = Self::zero(&self.table);
        for (e, q) in &self.terms {
            let mut term = Self::from_rational(&self.table, q.clone());
            for (idx, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                match binds[idx] {
                    None => {
                        let s =
                            Self::sym_pow(&self.table, self.table.name(idx), exp, BigRational::one());
                        term = term.mul(&s)?;
                    }
                    Some(v) => {
                        if exp >= 0 {
                            term = term.mul(&v.pow(exp as u32)?)?;
                        } else {
                            let inv = v.invert_monomial()?;
                            term = term.mul(&inv.pow((-exp) as u32)?)?;
                        }
                    }
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// True when this is a single term `q * prod(invertible^e)` with `q != 0`.
    pub fn is_invertible_monomial(&self) -> bool {
        if self.terms.len() != 1 {
            return false;
        }
        let (e, _) = self.terms.iter().next().unwrap();
        e.iter()
            .enumerate()
            .all(|(i, &x)| x == 0 || self.table.invertible(i))
    }

    fn invert_monomial(&self) -> Result<Self, CkError> {
        if !self.is_invertible_monomial() {
            return Err(CkError::Ring("not an invertible monomial".into()));
        }
        let (e, q) = self.terms.iter().next().unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(e.iter().map(|&x| -x).collect::<SymExps>(), q.recip());
        Ok(Coefficient { table: self.table.clone(), terms })
    }

    /// Decompose by the exponent of one symbol: the coefficient of
    /// `sym^d`, as an element with that symbol stripped to exponent 0.
    pub fn coeff_of_sym_pow(&self, name: &str, d: i16) -> Self {
        let idx = self.table.index_of(name).expect("unknown symbol");
        let mut terms = BTreeMap::new();
        for (e, q) in &self.terms {
            if e[idx] == d {
                let mut e2 = e.clone();
                e2[idx] = 0;
                terms.insert(e2, q.clone());
            }
        }
        Coefficient { table: self.table.clone(), terms }
    }

    /// Range of exponents of `name` over all terms, `None` if zero.
    pub fn sym_exp_range(&self, name: &str) -> Option<(i16, i16)> {
        let idx = self.table.index_of(name).expect("unknown symbol");
        let mut range: Option<(i16, i16)> = None;
        for e in self.terms.keys() {
            let x = e[idx];
            range = Some(match range {
                None => (x, x),
                Some((lo, hi)) => (lo.min(x), hi.max(x)),
            });
        }
        range
    }

    /// Canonical text form: terms in sorted exponent-vector order.
    pub fn canonical_text(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, q) in &self.terms {
            let neg = q.is_negative();
            let absq = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !absq.is_one() || e.iter().all(|&x| x == 0) {
                parts.push(absq.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                if x == 1 {
                    parts.push(self.table.name(i).to_string());
                } else if x != 0 {
                    parts.push(format!("{}^{}", self.table.name(i), x));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table() -> Arc<SymbolTable> {
        SymbolTable::ck(3)
    }

    fn lam(t: &Arc<SymbolTable>, e: i16) -> Coefficient {
        Coefficient::sym_pow(t, "lambda", e, BigRational::one())
    }

    fn k(t: &Arc<SymbolTable>, a: usize) -> Coefficient {
        Coefficient::symbol(t, &format!("k{a}"))
    }

    #[test]
    fn additive_inverse_cancels() {
        let t = table();
        let l = lam(&t, 1);
        assert!(l.add(&l.neg()).unwrap().is_zero());
    }

    #[test]
    fn like_terms_collect() {
        let t = table();
        let x = k(&t, 2).mul(&lam(&t, -1)).unwrap();
        let two_x = x.add(&x).unwrap();
        assert_eq!(two_x, x.scale(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn unlike_terms_kept() {
        let t = table();
        let a = lam(&t, 1).scale(&BigRational::new(1.into(), 2.into()));
        let b = lam(&t, 1)
            .mul(&k(&t, 2))
            .unwrap()
            .scale(&BigRational::new(1.into(), 3.into()));
        let s = a.add(&b).unwrap();
        assert_eq!(s.num_terms(), 2);
        assert_eq!(s.canonical_text(), "1/2*lambda + 1/3*lambda*k2");
    }

    #[test]
    fn laurent_inverse_collapses() {
        let t = table();
        assert!(lam(&t, 1).mul(&lam(&t, -1)).unwrap().is_one());
    }

    #[test]
    fn ring_identity_difference_of_squares() {
        let t = table();
        let one = Coefficient::one(&t);
        let a = one.sub(&k(&t, 2)).unwrap();
        let b = one.add(&k(&t, 2)).unwrap();
        let expect = one.sub(&k(&t, 2).mul(&k(&t, 2)).unwrap()).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expect);
    }

    #[test]
    fn specialize_kills_bound_zero() {
        let t = table();
        let x = lam(&t, 1)
            .scale(&BigRational::new(1.into(), 2.into()))
            .mul(&k(&t, 2))
            .unwrap();
        let mut b = BTreeMap::new();
        b.insert("k2".to_string(), Coefficient::zero(&t));
        assert!(x.specialize(&b).unwrap().is_zero());
    }

    #[test]
    fn specialize_to_inverse_speed_squared() {
        let t = table();
        let x = k(&t, 2).mul(&lam(&t, 1)).unwrap();
        let mut b = BTreeMap::new();
        b.insert(
            "k2".to_string(),
            Coefficient::sym_pow(&t, "c", -2, -BigRational::one()),
        );
        let got = x.specialize(&b).unwrap();
        let want = lam(&t, 1)
            .mul(&Coefficient::sym_pow(&t, "c", -2, -BigRational::one()))
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn specialize_numeric_sum() {
        let t = table();
        let x = k(&t, 2).mul(&k(&t, 3)).unwrap().add(&k(&t, 3)).unwrap();
        let mut b = BTreeMap::new();
        b.insert("k2".to_string(), Coefficient::one(&t));
        b.insert("k3".to_string(), Coefficient::one(&t));
        assert_eq!(x.specialize(&b).unwrap(), Coefficient::from_int(&t, 2));
    }

    #[test]
    fn binding_invertible_to_zero_rejected() {
        let t = table();
        let mut b = BTreeMap::new();
        b.insert("lambda".to_string(), Coefficient::zero(&t));
        assert!(lam(&t, 1).specialize(&b).is_err());
    }

    fn arb_coeff() -> impl Strategy<Value = Coefficient> {
        let t = table();
        proptest::collection::vec(
            (
                proptest::collection::vec(-3i16..4, 5),
                -6i64..7,
                1i64..5,
            ),
            0..5,
        )
        .prop_map(move |terms| {
            let mut acc = Coefficient::zero(&t);
            for (exps, num, den) in terms {
                // slot 0 = lambda, 1 = c (invertible); k's clamped to >= 0
                let mut term = Coefficient::from_rational(
                    &t,
                    BigRational::new(num.into(), den.into()),
                );
                for (i, &e) in exps.iter().enumerate() {
                    let e = if i < 2 { e } else { e.abs() };
                    if e != 0 {
                        term = term
                            .mul(&Coefficient::sym_pow(&t, t.name(i), e, BigRational::one()))
                            .unwrap();
                    }
                }
                acc = acc.add(&term).unwrap();
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn mul_commutes(a in arb_coeff(), b in arb_coeff()) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        }

        #[test]
        fn mul_associates(a in arb_coeff(), b in arb_coeff(), c in arb_coeff()) {
            let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
            let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mul_distributes(a in arb_coeff(), b in arb_coeff(), c in arb_coeff()) {
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn no_zero_terms_stored(a in arb_coeff(), b in arb_coeff()) {
            let s = a.add(&b).unwrap();
            prop_assert!(s.terms().all(|(_, q)| !q.is_zero()));
        }

        #[test]
        fn specialize_is_ring_hom(a in arb_coeff(), b in arb_coeff(), v in -1i64..2) {
            let t = a.table().clone();
            let mut binds = BTreeMap::new();
            binds.insert("k2".to_string(), Coefficient::from_int(&t, v));
            let lhs = a.mul(&b).unwrap().specialize(&binds).unwrap();
            let rhs = a.specialize(&binds).unwrap().mul(&b.specialize(&binds).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

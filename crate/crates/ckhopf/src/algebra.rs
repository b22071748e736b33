//! Noncommutative associative algebras with unit over the coefficient ring:
//! ordered generators, presentation relations as a swap-rule table, and
//! normal-form rewriting onto PBW-style monomials.
//!
//! A normal monomial is an exponent vector over the ordered generator list,
//! read as the ascending product `g1^e1 g2^e2 ...`. Invertible generators
//! (group-likes such as `E = exp(lambda*P_N/2)`) take signed exponents and
//! must precede all non-invertible generators in the order.

use rand::Rng;
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::CkError;
use crate::report::{Report, Status};
use crate::ring::{Coefficient, SymbolTable};

pub type GenId = u16;
pub type Exps = SmallVec<[i16; 12]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenDef {
    pub name: String,
    pub invertible: bool,
    /// Weight used by the degree-lexicographic termination order.
    pub weight: u32,
}

/// Normal-form monomial: exponent vector plus cached termination weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    weight: u32,
    exps: Exps,
}

impl Monomial {
    pub fn new(gens: &[GenDef], exps: Exps) -> Self {
        debug_assert_eq!(exps.len(), gens.len());
        let mut weight = 0u32;
        for (g, &e) in gens.iter().zip(exps.iter()) {
            debug_assert!(e >= 0 || g.invertible, "negative exponent on {}", g.name);
            if e > 0 {
                weight += g.weight * e as u32;
            }
        }
        Monomial { weight, exps }
    }

    pub fn unit(gens: &[GenDef]) -> Self {
        Monomial::new(gens, SmallVec::from_elem(0, gens.len()))
    }

    pub fn exps(&self) -> &[i16] {
        &self.exps
    }

    pub fn exp(&self, g: GenId) -> i16 {
        self.exps[g as usize]
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Unweighted total degree over non-invertible generators.
    pub fn degree(&self, gens: &[GenDef]) -> u32 {
        self.exps
            .iter()
            .zip(gens.iter())
            .filter(|(_, g)| !g.invertible)
            .map(|(&e, _)| e as u32)
            .sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Pure power of invertible generators only (scalar-like content).
    pub fn is_invertible_only(&self, gens: &[GenDef]) -> bool {
        self.exps
            .iter()
            .zip(gens.iter())
            .all(|(&e, g)| e == 0 || g.invertible)
    }
}

// Termination order: weighted degree first, then at the first differing
// slot (scanning from the lowest generator) the *larger* exponent is the
// *smaller* monomial, so that words beginning with smaller letters rank lower.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight.cmp(&other.weight).then_with(|| {
            for (a, b) in self.exps.iter().zip(other.exps.iter()) {
                if a != b {
                    return b.cmp(a);
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Raw terms map, shared between elements and relation tables.
pub type Terms = BTreeMap<Monomial, Coefficient>;

pub fn terms_add_into(dst: &mut Terms, m: Monomial, c: Coefficient) {
    if c.is_zero() {
        return;
    }
    match dst.entry(m) {
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

fn terms_add_scaled(dst: &mut Terms, src: &Terms, scale: &Coefficient) {
    for (m, c) in src {
        terms_add_into(dst, m.clone(), c.mul(scale).expect("same ring"));
    }
}

/// One rewrite rule `x*y -> y*x + image` for `x > y` in the generator order.
#[derive(Debug, Clone, PartialEq)]
pub struct CommRule {
    pub hi: GenId,
    pub lo: GenId,
    pub image: Terms,
}

/// Presentation of an associative algebra: generators plus relation table.
///
/// `comm[(x,y)]` (x > y) stores the commutator `[g_x, g_y]` as terms; missing
/// entries mean the pair commutes. `econj[(x,g)]` stores the per-unit-power
/// conjugation correction for `x * g^k = g^k * (x + k * corr)` with `g`
/// invertible. `power[g] = (p, image)` reduces `g^p -> image`.
#[derive(Debug, Clone)]
pub struct Algebra {
    pub id: String,
    pub ring: Arc<SymbolTable>,
    pub gens: Vec<GenDef>,
    pub comm: BTreeMap<(GenId, GenId), Terms>,
    pub econj: BTreeMap<(GenId, GenId), Terms>,
    pub power: BTreeMap<GenId, (u16, Terms)>,
    pub step_budget: u64,
}

impl PartialEq for Algebra {
    /// Structural equality of presentations; the id label is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.gens == other.gens
            && self.comm == other.comm
            && self.econj == other.econj
            && self.power == other.power
    }
}

pub const DEFAULT_STEP_BUDGET: u64 = 400_000_000;

impl Algebra {
    pub fn new(
        id: impl Into<String>,
        ring: Arc<SymbolTable>,
        gens: Vec<GenDef>,
    ) -> Self {
        Algebra {
            id: id.into(),
            ring,
            gens,
            comm: BTreeMap::new(),
            econj: BTreeMap::new(),
            power: BTreeMap::new(),
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn gen_id(&self, name: &str) -> GenId {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .unwrap_or_else(|| panic!("unknown generator `{name}` in {}", self.id)) as GenId
    }

    pub fn gen_name(&self, g: GenId) -> &str {
        &self.gens[g as usize].name
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn set_comm(&mut self, hi: GenId, lo: GenId, image: Terms) {
        assert!(hi > lo, "comm rule must be keyed (hi, lo)");
        if !image.is_empty() {
            self.comm.insert((hi, lo), image);
        }
    }

    pub fn set_econj(&mut self, x: GenId, g: GenId, corr: Terms) {
        assert!(self.gens[g as usize].invertible && x > g);
        if !corr.is_empty() {
            self.econj.insert((x, g), corr);
        }
    }

    pub fn set_power(&mut self, g: GenId, p: u16, image: Terms) {
        assert!(!self.gens[g as usize].invertible && p >= 2);
        self.power.insert(g, (p, image));
    }

    /// Check the structural invariants of the relation table, in particular
    /// that every rewrite image is strictly smaller than its left-hand side
    /// in the weighted degree-lexicographic order (the termination witness).
    pub fn validate(&self) -> Result<(), CkError> {
        let n = self.gens.len();
        let mut seen_noninv = false;
        for g in &self.gens {
            if g.invertible {
                if seen_noninv {
                    return Err(CkError::Algebra(format!(
                        "invertible generator `{}` must precede non-invertible ones",
                        g.name
                    )));
                }
            } else {
                seen_noninv = true;
            }
        }
        let word = |x: GenId, y: GenId| {
            let mut e = Exps::from_elem(0, n);
            e[x as usize] += 1;
            e[y as usize] += 1;
            Monomial::new(&self.gens, e)
        };
        for (&(hi, lo), image) in &self.comm {
            if hi <= lo || hi as usize >= n {
                return Err(CkError::Algebra("bad comm key".into()));
            }
            let lhs = word(hi, lo);
            for m in image.keys() {
                if *m >= lhs {
                    return Err(CkError::Algebra(format!(
                        "rule [{},{}] image not deglex-decreasing: {} !< {}",
                        self.gen_name(hi),
                        self.gen_name(lo),
                        self.display_mono(m),
                        self.display_mono(&lhs),
                    )));
                }
            }
        }
        for (&(x, g), corr) in &self.econj {
            if !self.gens[g as usize].invertible || x <= g {
                return Err(CkError::Algebra("bad econj key".into()));
            }
            let mut e = Exps::from_elem(0, n);
            e[x as usize] = 1;
            let lhs = Monomial::new(&self.gens, e);
            for m in corr.keys() {
                if *m >= lhs {
                    return Err(CkError::Algebra(format!(
                        "econj corr for {} not deglex-decreasing",
                        self.gen_name(x)
                    )));
                }
            }
        }
        for (&g, (p, image)) in &self.power {
            let mut e = Exps::from_elem(0, n);
            e[g as usize] = *p as i16;
            let lhs = Monomial::new(&self.gens, e);
            for m in image.keys() {
                if *m >= lhs {
                    return Err(CkError::Algebra(format!(
                        "power rule for {} not deglex-decreasing",
                        self.gen_name(g)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn unit_mono(&self) -> Monomial {
        Monomial::unit(&self.gens)
    }

    pub fn mono_from_pairs(&self, pairs: &[(GenId, i16)]) -> Monomial {
        let mut e = Exps::from_elem(0, self.gens.len());
        for &(g, k) in pairs {
            e[g as usize] += k;
        }
        Monomial::new(&self.gens, e)
    }

    // ---- strategy A: left fold, letters inserted from the right ----

    fn tick(&self, budget: &mut u64) -> Result<(), CkError> {
        if *budget == 0 {
            return Err(CkError::StepBudget);
        }
        *budget -= 1;
        Ok(())
    }

    /// `m * g` for a non-invertible generator `g`.
    fn insert_gen(&self, m: &Monomial, x: GenId, budget: &mut u64) -> Result<Terms, CkError> {
        self.tick(budget)?;
        let n = self.gens.len();
        let top = ((x as usize + 1)..n).rev().find(|&i| m.exps[i] != 0);
        match top {
            None => {
                let mut e = m.exps.clone();
                e[x as usize] += 1;
                if let Some((p, image)) = self.power.get(&x) {
                    if e[x as usize] >= *p as i16 {
                        e[x as usize] -= *p as i16;
                        let base = Monomial::new(&self.gens, e);
                        let image = image.clone();
                        return self.mono_times_terms(&base, &image, budget);
                    }
                }
                let mut out = Terms::new();
                out.insert(Monomial::new(&self.gens, e), Coefficient::one(&self.ring));
                Ok(out)
            }
            Some(i) => {
                // m = m1 * g_i ; m*x = (m1*x)*g_i + m1*[g_i, x]
                let mut e = m.exps.clone();
                e[i] -= 1;
                let m1 = Monomial::new(&self.gens, e);
                let part1 = self.insert_gen(&m1, x, budget)?;
                let mut out = Terms::new();
                for (mm, cc) in &part1 {
                    let appended = self.insert_gen(mm, i as GenId, budget)?;
                    terms_add_scaled(&mut out, &appended, cc);
                }
                if let Some(image) = self.comm.get(&(i as GenId, x)) {
                    let part2 = self.mono_times_terms(&m1, image, budget)?;
                    terms_add_scaled(&mut out, &part2, &Coefficient::one(&self.ring));
                }
                Ok(out)
            }
        }
    }

    /// `m * g^k` for an invertible generator `g`.
    fn insert_inv(
        &self,
        m: &Monomial,
        g: GenId,
        k: i16,
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        self.tick(budget)?;
        if k == 0 {
            let mut out = Terms::new();
            out.insert(m.clone(), Coefficient::one(&self.ring));
            return Ok(out);
        }
        let n = self.gens.len();
        let top = ((g as usize + 1)..n)
            .rev()
            .find(|&i| m.exps[i] != 0 && !self.gens[i].invertible);
        match top {
            None => {
                let mut e = m.exps.clone();
                e[g as usize] += k;
                let mut out = Terms::new();
                out.insert(Monomial::new(&self.gens, e), Coefficient::one(&self.ring));
                Ok(out)
            }
            Some(i) => {
                // m = m1 * g_i ; g_i * g^k = g^k * g_i + k * g^k * corr
                let mut e = m.exps.clone();
                e[i] -= 1;
                let m1 = Monomial::new(&self.gens, e);
                let moved = self.insert_inv(&m1, g, k, budget)?;
                let mut out = Terms::new();
                for (mm, cc) in &moved {
                    let appended = self.insert_gen(mm, i as GenId, budget)?;
                    terms_add_scaled(&mut out, &appended, cc);
                }
                if let Some(corr) = self.econj.get(&(i as GenId, g)) {
                    let scale = Coefficient::from_int(&self.ring, k as i64);
                    let part2 = self.terms_times_terms(&moved, corr, budget)?;
                    terms_add_scaled(&mut out, &part2, &scale);
                }
                Ok(out)
            }
        }
    }

    /// `m * t` where `t` is a sum of normal monomials.
    fn mono_times_terms(
        &self,
        m: &Monomial,
        t: &Terms,
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        let mut out = Terms::new();
        for (mt, ct) in t {
            let prod = self.mono_times_mono(m, mt, budget)?;
            terms_add_scaled(&mut out, &prod, ct);
        }
        Ok(out)
    }

    /// `m * mt`, multiplying letter by letter in ascending order of `mt`.
    fn mono_times_mono(
        &self,
        m: &Monomial,
        mt: &Monomial,
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        let mut acc = Terms::new();
        acc.insert(m.clone(), Coefficient::one(&self.ring));
        for (i, &e) in mt.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if self.gens[i].invertible {
                let mut next = Terms::new();
                for (mm, cc) in &acc {
                    let r = self.insert_inv(mm, i as GenId, e, budget)?;
                    terms_add_scaled(&mut next, &r, cc);
                }
                acc = next;
            } else {
                for _ in 0..e {
                    let mut next = Terms::new();
                    for (mm, cc) in &acc {
                        let r = self.insert_gen(mm, i as GenId, budget)?;
                        terms_add_scaled(&mut next, &r, cc);
                    }
                    acc = next;
                }
            }
        }
        Ok(acc)
    }

    pub fn terms_times_terms(
        &self,
        a: &Terms,
        b: &Terms,
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        let mut out = Terms::new();
        for (ma, ca) in a {
            let prod = self.mono_times_terms(ma, b, budget)?;
            terms_add_scaled(&mut out, &prod, ca);
        }
        Ok(out)
    }

    // ---- strategy B: right fold, letters prepended from the left ----

    /// `x * m` for a non-invertible generator `x`.
    fn prepend_gen(&self, x: GenId, m: &Monomial, budget: &mut u64) -> Result<Terms, CkError> {
        self.tick(budget)?;
        let low = (0..(x as usize)).find(|&i| m.exps[i] != 0);
        match low {
            None => {
                let mut e = m.exps.clone();
                e[x as usize] += 1;
                if let Some((p, image)) = self.power.get(&x) {
                    if e[x as usize] >= *p as i16 {
                        e[x as usize] -= *p as i16;
                        let base = Monomial::new(&self.gens, e);
                        let image = image.clone();
                        return self.terms_times_mono_left(&image, &base, budget);
                    }
                }
                let mut out = Terms::new();
                out.insert(Monomial::new(&self.gens, e), Coefficient::one(&self.ring));
                Ok(out)
            }
            Some(i) => {
                let gi = i as GenId;
                if self.gens[i].invertible {
                    // m = g^k * m1 ; x * g^k = g^k * x + k * g^k * corr
                    let k = m.exps[i];
                    let mut e = m.exps.clone();
                    e[i] = 0;
                    let m1 = Monomial::new(&self.gens, e);
                    let xm1 = self.prepend_gen(x, &m1, budget)?;
                    let mut out = Terms::new();
                    for (mm, cc) in &xm1 {
                        let r = self.prepend_inv(gi, k, mm, budget)?;
                        terms_add_scaled(&mut out, &r, cc);
                    }
                    if let Some(corr) = self.econj.get(&(x, gi)) {
                        let inner = self.terms_times_mono_left(corr, &m1, budget)?;
                        let mut moved = Terms::new();
                        for (mm, cc) in &inner {
                            let r = self.prepend_inv(gi, k, mm, budget)?;
                            terms_add_scaled(&mut moved, &r, cc);
                        }
                        let scale = Coefficient::from_int(&self.ring, k as i64);
                        terms_add_scaled(&mut out, &moved, &scale);
                    }
                    Ok(out)
                } else {
                    // m = g_i * m1 ; x * g_i = g_i * x + [x, g_i]
                    let mut e = m.exps.clone();
                    e[i] -= 1;
                    let m1 = Monomial::new(&self.gens, e);
                    let xm1 = self.prepend_gen(x, &m1, budget)?;
                    let mut out = Terms::new();
                    for (mm, cc) in &xm1 {
                        let r = self.prepend_gen(gi, mm, budget)?;
                        terms_add_scaled(&mut out, &r, cc);
                    }
                    if let Some(image) = self.comm.get(&(x, gi)) {
                        let part2 = self.terms_times_mono_left(image, &m1, budget)?;
                        terms_add_scaled(&mut out, &part2, &Coefficient::one(&self.ring));
                    }
                    Ok(out)
                }
            }
        }
    }

    /// `g^k * m` for an invertible generator `g`: anything below `g` is
    /// invertible too and commutes, so the exponent merges directly.
    fn prepend_inv(
        &self,
        g: GenId,
        k: i16,
        m: &Monomial,
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        self.tick(budget)?;
        let mut e = m.exps.clone();
        e[g as usize] += k;
        let mut out = Terms::new();
        out.insert(Monomial::new(&self.gens, e), Coefficient::one(&self.ring));
        Ok(out)
    }

    /// `t * m` computed by prepending the letters of each monomial of `t`
    /// onto `m` from the right end of the word (strategy-B primitive).
    fn terms_times_mono_left(
        &self,
        t: &Terms,
        m: &Monomial,
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        let mut out = Terms::new();
        for (mt, ct) in t {
            let mut acc = Terms::new();
            acc.insert(m.clone(), Coefficient::one(&self.ring));
            for (i, &e) in mt.exps.iter().enumerate().rev() {
                if e == 0 {
                    continue;
                }
                if self.gens[i].invertible {
                    let mut next = Terms::new();
                    for (mm, cc) in &acc {
                        let r = self.prepend_inv(i as GenId, e, mm, budget)?;
                        terms_add_scaled(&mut next, &r, cc);
                    }
                    acc = next;
                } else {
                    for _ in 0..e {
                        let mut next = Terms::new();
                        for (mm, cc) in &acc {
                            let r = self.prepend_gen(i as GenId, mm, budget)?;
                            terms_add_scaled(&mut next, &r, cc);
                        }
                        acc = next;
                    }
                }
            }
            terms_add_scaled(&mut out, &acc, ct);
        }
        Ok(out)
    }

    /// Normalize a raw word (sequence of generator powers) with strategy A
    /// (left fold / rightmost letters rewritten last).
    pub fn normalize_word(
        &self,
        word: &[(GenId, i16)],
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        let mut acc = Terms::new();
        acc.insert(self.unit_mono(), Coefficient::one(&self.ring));
        for &(g, k) in word {
            let mut next = Terms::new();
            if self.gens[g as usize].invertible {
                for (mm, cc) in &acc {
                    let r = self.insert_inv(mm, g, k, budget)?;
                    terms_add_scaled(&mut next, &r, cc);
                }
            } else {
                if k < 0 {
                    return Err(CkError::Algebra(format!(
                        "negative power of non-invertible `{}`",
                        self.gen_name(g)
                    )));
                }
                next = acc.clone();
                for _ in 0..k {
                    let mut step = Terms::new();
                    for (mm, cc) in &next {
                        let r = self.insert_gen(mm, g, budget)?;
                        terms_add_scaled(&mut step, &r, cc);
                    }
                    next = step;
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Normalize with the independent strategy B (right fold / leftmost
    /// letters rewritten last).
    pub fn normalize_word_alt(
        &self,
        word: &[(GenId, i16)],
        budget: &mut u64,
    ) -> Result<Terms, CkError> {
        let mut acc = Terms::new();
        acc.insert(self.unit_mono(), Coefficient::one(&self.ring));
        for &(g, k) in word.iter().rev() {
            let mut next = Terms::new();
            if self.gens[g as usize].invertible {
                for (mm, cc) in &acc {
                    let r = self.prepend_inv(g, k, mm, budget)?;
                    terms_add_scaled(&mut next, &r, cc);
                }
            } else {
                if k < 0 {
                    return Err(CkError::Algebra(format!(
                        "negative power of non-invertible `{}`",
                        self.gen_name(g)
                    )));
                }
                next = acc.clone();
                for _ in 0..k {
                    let mut step = Terms::new();
                    for (mm, cc) in &next {
                        let r = self.prepend_gen(g, mm, budget)?;
                        terms_add_scaled(&mut step, &r, cc);
                    }
                    next = step;
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn display_mono(&self, m: &Monomial) -> String {
        if m.is_unit() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            if e == 1 {
                parts.push(self.gens[i].name.clone());
            } else if e != 0 {
                parts.push(format!("{}^{}", self.gens[i].name, e));
            }
        }
        parts.join(" ")
    }

    pub fn display_terms(&self, t: &Terms) -> String {
        if t.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in t.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let cs = c.canonical_text();
            if m.is_unit() {
                out.push_str(&cs);
            } else if c.is_one() {
                out.push_str(&self.display_mono(m));
            } else if c.num_terms() > 1 || cs.starts_with('-') {
                out.push_str(&format!("({}) {}", cs, self.display_mono(m)));
            } else {
                out.push_str(&format!("{} {}", cs, self.display_mono(m)));
            }
        }
        out
    }
}

/// Element of an algebra: finite linear combination of normal monomials.
#[derive(Clone)]
pub struct NCElement {
    alg: Arc<Algebra>,
    terms: Terms,
}

impl fmt::Debug for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCElement[{}]({})", self.alg.id, self)
    }
}

impl fmt::Display for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alg.display_terms(&self.terms))
    }
}

impl PartialEq for NCElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_algebra(&self.alg, &other.alg)
    }
}

pub fn same_algebra(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || a.id == b.id
}

impl NCElement {
    pub fn zero(alg: &Arc<Algebra>) -> Self {
        NCElement { alg: alg.clone(), terms: Terms::new() }
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        let mut terms = Terms::new();
        terms.insert(alg.unit_mono(), Coefficient::one(&alg.ring));
        NCElement { alg: alg.clone(), terms }
    }

    pub fn from_terms(alg: &Arc<Algebra>, terms: Terms) -> Self {
        NCElement { alg: alg.clone(), terms }
    }

    pub fn gen(alg: &Arc<Algebra>, name: &str) -> Self {
        Self::gen_pow(alg, name, 1)
    }

    pub fn gen_pow(alg: &Arc<Algebra>, name: &str, k: i16) -> Self {
        let g = alg.gen_id(name);
        let mut terms = Terms::new();
        terms.insert(
            alg.mono_from_pairs(&[(g, k)]),
            Coefficient::one(&alg.ring),
        );
        NCElement { alg: alg.clone(), terms }
    }

    pub fn scalar(alg: &Arc<Algebra>, c: Coefficient) -> Self {
        let mut terms = Terms::new();
        if !c.is_zero() {
            terms.insert(alg.unit_mono(), c);
        }
        NCElement { alg: alg.clone(), terms }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn into_terms(self) -> Terms {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<(), CkError> {
        if same_algebra(&self.alg, &other.alg) {
            Ok(())
        } else {
            Err(CkError::AlgebraMismatch(format!(
                "{} vs {}",
                self.alg.id, other.alg.id
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(same_algebra(&self.alg, &other.alg));
        let mut terms = self.terms.clone();
        terms_add_scaled(&mut terms, &other.terms, &Coefficient::one(&self.alg.ring));
        NCElement { alg: self.alg.clone(), terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        NCElement {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut terms = Terms::new();
        for (m, cc) in &self.terms {
            terms_add_into(&mut terms, m.clone(), cc.mul(c).expect("same ring"));
        }
        NCElement { alg: self.alg.clone(), terms }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CkError> {
        self.check_same(other)?;
        let mut budget = self.alg.step_budget;
        let terms = self
            .alg
            .terms_times_terms(&self.terms, &other.terms, &mut budget)?;
        Ok(NCElement { alg: self.alg.clone(), terms })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, CkError> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    pub fn pow(&self, n: u32) -> Result<Self, CkError> {
        let mut acc = Self::one(&self.alg);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn specialize(
        &self,
        bindings: &BTreeMap<String, Coefficient>,
        target: &Arc<Algebra>,
    ) -> Result<Self, CkError> {
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            terms_add_into(&mut terms, m.clone(), c.specialize(bindings)?);
        }
        Ok(NCElement { alg: target.clone(), terms })
    }

    pub fn canonical_text(&self) -> String {
        format!("{self}")
    }
}

/// Normalize a raw linear combination of generator words.
pub fn normalize(
    alg: &Arc<Algebra>,
    raw: &[(Vec<(GenId, i16)>, Coefficient)],
) -> Result<NCElement, CkError> {
    let mut out = Terms::new();
    let mut budget = alg.step_budget;
    for (word, coeff) in raw {
        let t = alg.normalize_word(word, &mut budget)?;
        terms_add_scaled(&mut out, &t, coeff);
    }
    Ok(NCElement::from_terms(alg, out))
}

/// Sample random words and normalize them under the two independent
/// reduction strategies; any disagreement is reported with the witness word.
pub fn check_confluence_sample(
    alg: &Arc<Algebra>,
    samples: usize,
    max_len: usize,
    rng: &mut impl Rng,
) -> Report {
    let mut report = Report::new("confluence", &alg.id);
    let n = alg.num_gens();
    let mut mismatches = 0usize;
    for s in 0..samples {
        let len = rng.gen_range(1..=max_len);
        let word: Vec<(GenId, i16)> = (0..len)
            .map(|_| {
                let g = rng.gen_range(0..n) as GenId;
                let k = if alg.gens[g as usize].invertible {
                    if rng.gen_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                } else {
                    1
                };
                (g, k)
            })
            .collect();
        let mut b1 = alg.step_budget;
        let mut b2 = alg.step_budget;
        let r1 = alg.normalize_word(&word, &mut b1);
        let r2 = alg.normalize_word_alt(&word, &mut b2);
        match (r1, r2) {
            (Ok(t1), Ok(t2)) => {
                if t1 != t2 {
                    mismatches += 1;
                    let w: Vec<String> = word
                        .iter()
                        .map(|&(g, k)| {
                            if k == 1 {
                                alg.gen_name(g).to_string()
                            } else {
                                format!("{}^{}", alg.gen_name(g), k)
                            }
                        })
                        .collect();
                    let diff = NCElement::from_terms(alg, t1)
                        .sub(&NCElement::from_terms(alg, t2));
                    report.push(
                        format!("sample {s}: {}", w.join(" ")),
                        Status::Fail,
                        diff.canonical_text(),
                    );
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                mismatches += 1;
                report.push(format!("sample {s}"), Status::Fail, e.to_string());
            }
        }
    }
    if mismatches == 0 {
        report.push(
            format!("{samples} words, max length {max_len}: strategies agree"),
            Status::Pass,
            String::new(),
        );
    }
    report
}

/// For presentations whose relations are Lie-type (linear rewrite images and
/// no auxiliary rules), check the Jacobi identity on all generator triples.
pub fn check_jacobi(alg: &Arc<Algebra>) -> Result<Report, CkError> {
    let mut report = Report::new("jacobi", &alg.id);
    if !alg.econj.is_empty() || !alg.power.is_empty() {
        return Err(CkError::Algebra(
            "jacobi check requires a plain Lie-type presentation".into(),
        ));
    }
    for image in alg.comm.values() {
        for m in image.keys() {
            if m.degree(&alg.gens) > 1 || !m.exps().iter().zip(alg.gens.iter()).all(|(&e, g)| e == 0 || !g.invertible) {
                return Err(CkError::Algebra(
                    "jacobi check requires linear rewrite images".into(),
                ));
            }
        }
    }
    let n = alg.num_gens();
    for x in 0..n {
        for y in (x + 1)..n {
            for z in (y + 1)..n {
                let gx = NCElement::gen(alg, &alg.gens[x].name.clone());
                let gy = NCElement::gen(alg, &alg.gens[y].name.clone());
                let gz = NCElement::gen(alg, &alg.gens[z].name.clone());
                let j = gx
                    .commutator(&gy)?
                    .commutator(&gz)?
                    .add(&gy.commutator(&gz)?.commutator(&gx)?)
                    .add(&gz.commutator(&gx)?.commutator(&gy)?);
                let item = format!(
                    "[[{x},{y}],{z}]+cyclic",
                    x = alg.gens[x].name,
                    y = alg.gens[y].name,
                    z = alg.gens[z].name
                );
                if j.is_zero() {
                    report.push(item, Status::Pass, String::new());
                } else {
                    report.push(item, Status::Fail, j.canonical_text());
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toy Heisenberg-like presentation: [y, x] = z with z central.
    fn heisenberg() -> Arc<Algebra> {
        let ring = SymbolTable::ck(2);
        let gens = vec![
            GenDef { name: "x".into(), invertible: false, weight: 1 },
            GenDef { name: "y".into(), invertible: false, weight: 1 },
            GenDef { name: "z".into(), invertible: false, weight: 1 },
        ];
        let mut alg = Algebra::new("heis", ring.clone(), gens);
        let z = {
            let mut t = Terms::new();
            t.insert(
                alg.mono_from_pairs(&[(2, 1)]),
                Coefficient::one(&ring),
            );
            t
        };
        alg.set_comm(1, 0, z);
        alg.validate().unwrap();
        Arc::new(alg)
    }

    #[test]
    fn unit_is_neutral() {
        let alg = heisenberg();
        let x = NCElement::gen(&alg, "x");
        assert_eq!(NCElement::one(&alg).mul(&x).unwrap(), x);
        assert_eq!(x.mul(&NCElement::one(&alg)).unwrap(), x);
    }

    #[test]
    fn heisenberg_normal_form() {
        let alg = heisenberg();
        let x = NCElement::gen(&alg, "x");
        let y = NCElement::gen(&alg, "y");
        // y x = x y + z
        let yx = y.mul(&x).unwrap();
        let expect = x
            .mul(&y)
            .unwrap()
            .add(&NCElement::gen(&alg, "z"));
        assert_eq!(yx, expect);
    }

    #[test]
    fn strategies_agree_on_heisenberg() {
        let alg = heisenberg();
        let word = vec![(1, 1), (0, 1), (1, 1), (0, 2)];
        let mut b1 = alg.step_budget;
        let mut b2 = alg.step_budget;
        assert_eq!(
            alg.normalize_word(&word, &mut b1).unwrap(),
            alg.normalize_word_alt(&word, &mut b2).unwrap()
        );
    }

    #[test]
    fn jacobi_passes_on_heisenberg() {
        let alg = heisenberg();
        let report = check_jacobi(&alg).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn budget_guard_fires() {
        let ring = SymbolTable::ck(2);
        let gens = vec![
            GenDef { name: "x".into(), invertible: false, weight: 1 },
            GenDef { name: "y".into(), invertible: false, weight: 1 },
        ];
        let mut alg = Algebra::new("tiny", ring.clone(), gens);
        let x = {
            let mut t = Terms::new();
            t.insert(alg.mono_from_pairs(&[(0, 1)]), Coefficient::one(&ring));
            t
        };
        alg.set_comm(1, 0, x);
        alg.step_budget = 3;
        let alg = Arc::new(alg);
        let word = vec![(1i16 as GenId, 1i16), (1, 1), (0, 1), (0, 1)];
        let mut b = alg.step_budget;
        assert!(matches!(
            alg.normalize_word(&word, &mut b),
            Err(CkError::StepBudget)
        ));
    }
}

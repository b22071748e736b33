//! Coalgebra data (coproduct, counit, antipode on generators) attached to an
//! algebra presentation, multiplicative/anti-multiplicative extension to all
//! elements, and the Hopf axiom checkers.

use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{same_algebra, Algebra, GenId, Monomial, NCElement, Terms};
use crate::error::CkError;
use crate::report::{Report, Status};
use crate::ring::Coefficient;
use crate::tensor::{TensorElement, TensorKey};

/// Generators plus coproduct/counit/antipode images for each of them.
///
/// Images of invertible generators must be group-like (single monomials), so
/// that negative powers extend consistently.
#[derive(Debug, Clone)]
pub struct HopfPresentation {
    pub algebra: Arc<Algebra>,
    pub coproduct: Vec<TensorElement>,
    pub counit: Vec<Coefficient>,
    pub antipode: Vec<NCElement>,
}

impl PartialEq for HopfPresentation {
    fn eq(&self, other: &Self) -> bool {
        *self.algebra == *other.algebra
            && self.coproduct == other.coproduct
            && self.counit == other.counit
            && self.antipode == other.antipode
    }
}

fn mono_elem(alg: &Arc<Algebra>, m: &Monomial) -> NCElement {
    let mut t = Terms::new();
    t.insert(m.clone(), Coefficient::one(&alg.ring));
    NCElement::from_terms(alg, t)
}

impl HopfPresentation {
    pub fn new(
        algebra: Arc<Algebra>,
        coproduct: Vec<TensorElement>,
        counit: Vec<Coefficient>,
        antipode: Vec<NCElement>,
    ) -> Result<Self, CkError> {
        let n = algebra.num_gens();
        if coproduct.len() != n || counit.len() != n || antipode.len() != n {
            return Err(CkError::Algebra(
                "every generator needs coproduct, counit and antipode images".into(),
            ));
        }
        for (i, g) in algebra.gens.iter().enumerate() {
            if g.invertible
                && (coproduct[i].terms().len() != 1 || antipode[i].terms().len() != 1)
            {
                return Err(CkError::Algebra(format!(
                    "invertible generator `{}` must have group-like images",
                    g.name
                )));
            }
        }
        Ok(HopfPresentation { algebra, coproduct, counit, antipode })
    }

    fn coproduct_mono(&self, m: &Monomial) -> Result<TensorElement, CkError> {
        let mut acc = TensorElement::one(&self.algebra, 2);
        for (i, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if self.algebra.gens[i].invertible {
                // group-like: raise the single tensor monomial to the signed power
                let (key, c) = self.coproduct[i].terms().iter().next().unwrap();
                let mut pk = TensorKey::new();
                for km in key.iter() {
                    let exps = km.exps().iter().map(|&x| x * e).collect();
                    pk.push(Monomial::new(&self.algebra.gens, exps));
                }
                let mut p = TensorElement::zero(&self.algebra, 2);
                p.add_term(pk, c.pow(e.unsigned_abs() as u32)?);
                acc = acc.mul(&p)?;
            } else {
                for _ in 0..e {
                    acc = acc.mul(&self.coproduct[i])?;
                }
            }
        }
        Ok(acc)
    }

    /// Multiplicative extension of the generator coproducts.
    pub fn coproduct_of(&self, x: &NCElement) -> Result<TensorElement, CkError> {
        if !same_algebra(x.algebra(), &self.algebra) {
            return Err(CkError::AlgebraMismatch("coproduct".into()));
        }
        let mut out = TensorElement::zero(&self.algebra, 2);
        for (m, c) in x.terms() {
            out = out.add(&self.coproduct_mono(m)?.scale(c));
        }
        Ok(out)
    }

    /// The counit extended as a character.
    pub fn counit_of(&self, x: &NCElement) -> Result<Coefficient, CkError> {
        let mut out = Coefficient::zero(&self.algebra.ring);
        for (m, c) in x.terms() {
            let mut v = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 || v.is_zero() {
                    continue;
                }
                if e > 0 {
                    v = v.mul(&self.counit[i].pow(e as u32)?)?;
                } else if self.counit[i].is_one() {
                    // group-like with counit 1: negative powers contribute 1
                } else {
                    v = Coefficient::zero(&self.algebra.ring);
                }
            }
            out = out.add(&v)?;
        }
        Ok(out)
    }

    /// Anti-multiplicative extension of the generator antipodes.
    pub fn antipode_of(&self, x: &NCElement) -> Result<NCElement, CkError> {
        let mut out = NCElement::zero(&self.algebra);
        for (m, c) in x.terms() {
            let mut acc = NCElement::one(&self.algebra);
            for (i, &e) in m.exps().iter().enumerate().rev() {
                if e == 0 {
                    continue;
                }
                if self.algebra.gens[i].invertible {
                    let (im, ic) = self.antipode[i].terms().iter().next().unwrap();
                    let exps = im.exps().iter().map(|&x| x * e).collect();
                    let mut t = Terms::new();
                    t.insert(
                        Monomial::new(&self.algebra.gens, exps),
                        ic.pow(e.unsigned_abs() as u32)?,
                    );
                    acc = acc.mul(&NCElement::from_terms(&self.algebra, t))?;
                } else {
                    for _ in 0..e {
                        acc = acc.mul(&self.antipode[i])?;
                    }
                }
            }
            out = out.add(&acc.scale(c));
        }
        Ok(out)
    }

    /// Counit applied to one slot of an arity-2 tensor, collapsing arity.
    pub fn counit_slot(&self, t: &TensorElement, slot: usize) -> Result<NCElement, CkError> {
        assert_eq!(t.arity(), 2);
        let mut out = NCElement::zero(&self.algebra);
        for (key, c) in t.terms() {
            let eps = self.counit_of(&mono_elem(&self.algebra, &key[slot]))?;
            let mut tt = Terms::new();
            tt.insert(key[1 - slot].clone(), c.mul(&eps)?);
            out = out.add(&NCElement::from_terms(&self.algebra, tt));
        }
        Ok(out)
    }

    /// Coproduct applied to one slot of an arity-2 tensor, producing arity 3.
    pub fn coproduct_slot(
        &self,
        t: &TensorElement,
        slot: usize,
    ) -> Result<TensorElement, CkError> {
        assert_eq!(t.arity(), 2);
        let mut out = TensorElement::zero(&self.algebra, 3);
        for (key, c) in t.terms() {
            let inner = self.coproduct_mono(&key[slot])?;
            for (ik, ic) in inner.terms() {
                let mut k = TensorKey::new();
                if slot == 0 {
                    k.push(ik[0].clone());
                    k.push(ik[1].clone());
                    k.push(key[1].clone());
                } else {
                    k.push(key[0].clone());
                    k.push(ik[0].clone());
                    k.push(ik[1].clone());
                }
                out.add_term(k, c.mul(ic)?);
            }
        }
        Ok(out)
    }

    /// Antipode applied to one slot of an arity-2 tensor.
    pub fn antipode_slot(
        &self,
        t: &TensorElement,
        slot: usize,
    ) -> Result<TensorElement, CkError> {
        assert_eq!(t.arity(), 2);
        let mut out = TensorElement::zero(&self.algebra, 2);
        for (key, c) in t.terms() {
            let s = self.antipode_of(&mono_elem(&self.algebra, &key[slot]))?;
            for (sm, sc) in s.terms() {
                let mut k = TensorKey::new();
                if slot == 0 {
                    k.push(sm.clone());
                    k.push(key[1].clone());
                } else {
                    k.push(key[0].clone());
                    k.push(sm.clone());
                }
                out.add_term(k, c.mul(sc)?);
            }
        }
        Ok(out)
    }

    fn gen_elem(&self, g: GenId) -> NCElement {
        NCElement::gen(&self.algebra, &self.algebra.gens[g as usize].name)
    }

    /// For every relation of the table, the three coalgebra maps must send
    /// both sides to equal values. The products of the generator images are
    /// computed directly (in the tensor square for the coproduct, in reverse
    /// order for the antipode), so the check is not short-circuited by the
    /// rewriting engine applying the very rule under test.
    pub fn check_relation_compatibility(&self) -> Result<Report, CkError> {
        let mut report = Report::new("hopf-relations", &self.algebra.id);
        let alg = &self.algebra;
        // (name, x, y, image): relation  x*y = y*x + image
        let mut rules: Vec<(String, NCElement, NCElement, NCElement)> = Vec::new();
        for (&(hi, lo), image) in &alg.comm {
            rules.push((
                format!("[{},{}]", alg.gen_name(hi), alg.gen_name(lo)),
                self.gen_elem(hi),
                self.gen_elem(lo),
                NCElement::from_terms(alg, image.clone()),
            ));
        }
        for (&(x, g), corr) in &alg.econj {
            // x*E = E*x + E*corr
            let ge = NCElement::gen_pow(alg, alg.gen_name(g), 1);
            let image = ge.mul(&NCElement::from_terms(alg, corr.clone()))?;
            rules.push((
                format!("[{},{}]", alg.gen_name(x), alg.gen_name(g)),
                self.gen_elem(x),
                ge,
                image,
            ));
        }
        for (name, x, y, image) in rules {
            let dx = self.coproduct_of(&x)?;
            let dy = self.coproduct_of(&y)?;
            let d = dx
                .mul(&dy)?
                .sub(&dy.mul(&dx)?)
                .sub(&self.coproduct_of(&image)?);
            report.push_residual(
                format!("coproduct respects {name}"),
                d.is_zero(),
                d.canonical_text(),
            );
            let e = self.counit_of(&image)?;
            report.push_residual(
                format!("counit respects {name}"),
                e.is_zero(),
                e.canonical_text(),
            );
            let sx = self.antipode_of(&x)?;
            let sy = self.antipode_of(&y)?;
            let s = sy
                .mul(&sx)?
                .sub(&sx.mul(&sy)?)
                .sub(&self.antipode_of(&image)?);
            report.push_residual(
                format!("antipode respects {name}"),
                s.is_zero(),
                s.canonical_text(),
            );
        }
        for (&g, (p, image)) in &alg.power {
            let name = format!("{}^{}", alg.gen_name(g), p);
            let image = NCElement::from_terms(alg, image.clone());
            let dg = self.coproduct_of(&self.gen_elem(g))?;
            let mut dp = TensorElement::one(alg, 2);
            for _ in 0..*p {
                dp = dp.mul(&dg)?;
            }
            let d = dp.sub(&self.coproduct_of(&image)?);
            report.push_residual(
                format!("coproduct respects {name}"),
                d.is_zero(),
                d.canonical_text(),
            );
            let e = self
                .counit[g as usize]
                .pow(*p as u32)?
                .sub(&self.counit_of(&image)?)?;
            report.push_residual(
                format!("counit respects {name}"),
                e.is_zero(),
                e.canonical_text(),
            );
            let sg = &self.antipode[g as usize];
            let mut sp = NCElement::one(alg);
            for _ in 0..*p {
                sp = sp.mul(sg)?;
            }
            let s = sp.sub(&self.antipode_of(&image)?);
            report.push_residual(
                format!("antipode respects {name}"),
                s.is_zero(),
                s.canonical_text(),
            );
        }
        Ok(report)
    }

    /// `(Delta (x) id) Delta = (id (x) Delta) Delta` on every generator.
    pub fn check_coassociativity(&self) -> Result<Report, CkError> {
        let mut report = Report::new("coassociativity", &self.algebra.id);
        for (i, g) in self.algebra.gens.iter().enumerate() {
            let d = &self.coproduct[i];
            let diff = self.coproduct_slot(d, 0)?.sub(&self.coproduct_slot(d, 1)?);
            report.push_residual(g.name.clone(), diff.is_zero(), diff.canonical_text());
        }
        Ok(report)
    }

    /// `(eps (x) id) Delta = id = (id (x) eps) Delta` on every generator.
    pub fn check_counit(&self) -> Result<Report, CkError> {
        let mut report = Report::new("counit", &self.algebra.id);
        for (i, g) in self.algebra.gens.iter().enumerate() {
            let d = &self.coproduct[i];
            let ge = self.gen_elem(i as GenId);
            let l = self.counit_slot(d, 0)?.sub(&ge);
            let r = self.counit_slot(d, 1)?.sub(&ge);
            report.push_residual(
                format!("(eps x id) on {}", g.name),
                l.is_zero(),
                l.canonical_text(),
            );
            report.push_residual(
                format!("(id x eps) on {}", g.name),
                r.is_zero(),
                r.canonical_text(),
            );
        }
        Ok(report)
    }

    /// `m(S (x) id) Delta = eta eps = m(id (x) S) Delta` on every generator.
    pub fn check_antipode(&self) -> Result<Report, CkError> {
        let mut report = Report::new("antipode", &self.algebra.id);
        for (i, g) in self.algebra.gens.iter().enumerate() {
            let d = &self.coproduct[i];
            let target = NCElement::scalar(&self.algebra, self.counit[i].clone());
            let l = self.antipode_slot(d, 0)?.collapse()?.sub(&target);
            let r = self.antipode_slot(d, 1)?.collapse()?.sub(&target);
            report.push_residual(
                format!("m(S x id)Delta on {}", g.name),
                l.is_zero(),
                l.canonical_text(),
            );
            report.push_residual(
                format!("m(id x S)Delta on {}", g.name),
                r.is_zero(),
                r.canonical_text(),
            );
        }
        Ok(report)
    }

    /// All four checkers.
    pub fn check_all(&self) -> Result<Report, CkError> {
        let mut report = self.check_relation_compatibility()?;
        report.merge(self.check_coassociativity()?);
        report.merge(self.check_counit()?);
        report.merge(self.check_antipode()?);
        Ok(report)
    }

    /// Deep mode: re-check morphism properties and the antipode axiom on
    /// random elements of bounded word length.
    pub fn check_deep(
        &self,
        samples: usize,
        max_len: usize,
        rng: &mut impl Rng,
    ) -> Result<Report, CkError> {
        let mut report = Report::new("hopf-deep", &self.algebra.id);
        let n = self.algebra.num_gens();
        for s in 0..samples {
            let mut random_elem = |rng: &mut dyn rand::RngCore| -> Result<NCElement, CkError> {
                let len = rng.gen_range(1..=max_len);
                let word: Vec<(GenId, i16)> = (0..len)
                    .map(|_| {
                        let g = rng.gen_range(0..n) as GenId;
                        let k = if self.algebra.gens[g as usize].invertible {
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
                crate::algebra::normalize(
                    &self.algebra,
                    &[(word, Coefficient::one(&self.algebra.ring))],
                )
            };
            let x = random_elem(rng)?;
            let y = random_elem(rng)?;
            let xy = x.mul(&y)?;
            let d = self
                .coproduct_of(&xy)?
                .sub(&self.coproduct_of(&x)?.mul(&self.coproduct_of(&y)?)?);
            report.push_residual(
                format!("Delta(xy)=Delta(x)Delta(y) sample {s}"),
                d.is_zero(),
                d.canonical_text(),
            );
            let sm = self
                .antipode_of(&xy)?
                .sub(&self.antipode_of(&y)?.mul(&self.antipode_of(&x)?)?);
            report.push_residual(
                format!("S(xy)=S(y)S(x) sample {s}"),
                sm.is_zero(),
                sm.canonical_text(),
            );
            let em = self
                .counit_of(&xy)?
                .sub(&self.counit_of(&x)?.mul(&self.counit_of(&y)?)?)?;
            report.push_residual(
                format!("eps(xy)=eps(x)eps(y) sample {s}"),
                em.is_zero(),
                em.canonical_text(),
            );
            let ax = self
                .antipode_slot(&self.coproduct_of(&x)?, 0)?
                .collapse()?
                .sub(&NCElement::scalar(&self.algebra, self.counit_of(&x)?));
            report.push_residual(
                format!("antipode axiom sample {s}"),
                ax.is_zero(),
                ax.canonical_text(),
            );
        }
        Ok(report)
    }

    pub fn specialize(
        &self,
        bindings: &BTreeMap<String, Coefficient>,
        target_algebra: &Arc<Algebra>,
    ) -> Result<Self, CkError> {
        let mut coproduct = Vec::new();
        for d in &self.coproduct {
            let mut t = TensorElement::zero(target_algebra, 2);
            for (k, c) in d.terms() {
                t.add_term(k.clone(), c.specialize(bindings)?);
            }
            coproduct.push(t);
        }
        let counit = self
            .counit
            .iter()
            .map(|c| c.specialize(bindings))
            .collect::<Result<Vec<_>, _>>()?;
        let antipode = self
            .antipode
            .iter()
            .map(|s| s.specialize(bindings, target_algebra))
            .collect::<Result<Vec<_>, _>>()?;
        HopfPresentation::new(target_algebra.clone(), coproduct, counit, antipode)
    }
}

/// Single summary status for a report.
pub fn summarize(report: &Report) -> Status {
    if report.all_pass() {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Structural equality of two Hopf presentations as data (relation tables and
/// all generator images), ignoring the identity labels of the algebras.
pub fn hopf_structurally_equal(a: &HopfPresentation, b: &HopfPresentation) -> bool {
    if *a.algebra != *b.algebra || a.counit != b.counit {
        return false;
    }
    if a.coproduct.len() != b.coproduct.len() || a.antipode.len() != b.antipode.len() {
        return false;
    }
    a.coproduct
        .iter()
        .zip(b.coproduct.iter())
        .all(|(x, y)| x.terms() == y.terms())
        && a.antipode
            .iter()
            .zip(b.antipode.iter())
            .all(|(x, y)| x.terms() == y.terms())
}

//! Exact extraction of fixed powers of the deformation parameter from
//! deformed elements: the group-like `E^k` expands as the exponential series
//! of `k lambda P_N / 2` into the classical affine algebra, coefficients stay
//! Laurent in `lambda`, and a requested `lambda`-degree is collected. Used by
//! the classical-limit check and the first-order cocommutator (r-matrix)
//! verification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::sync::Arc;

use crate::algebra::{Algebra, Monomial, NCElement, Terms};
use crate::ck::{build_affine, jname, pname, KVector};
use crate::error::CkError;
use crate::hopf::HopfPresentation;
use crate::report::Report;
use crate::ring::Coefficient;
use crate::tensor::{TensorElement, TensorKey};

fn factorial(t: u32) -> BigRational {
    let mut f = BigInt::one();
    for i in 2..=t {
        f *= i;
    }
    BigRational::from_integer(f)
}

/// Map a deformed-basis monomial into the affine algebra with `E^k` replaced
/// by its exponential series, truncated so that every `lambda`-degree up to
/// `max_deg` is exact. Returns terms whose coefficients still carry `lambda`.
fn expand_mono(
    deformed: &Arc<Algebra>,
    affine: &Arc<Algebra>,
    m: &Monomial,
    c: &Coefficient,
    max_deg: i16,
) -> Result<Terms, CkError> {
    let ring = &affine.ring;
    // lowest lambda power in the coefficient decides how far to expand
    let min_lam = c.sym_exp_range("lambda").map(|(lo, _)| lo).unwrap_or(0);
    let order = (max_deg as i32 - min_lam as i32).max(0) as u32;
    // translate the non-E part of the monomial by generator name
    let mut base: Vec<(crate::algebra::GenId, i16)> = Vec::new();
    let mut e_exp: i64 = 0;
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if deformed.gens[i].invertible {
            e_exp += e as i64;
        } else {
            base.push((affine.gen_id(&deformed.gens[i].name), e));
        }
    }
    let pn = affine.gen_id(&pname(affine_dim(affine)));
    let mut out = Terms::new();
    for t in 0..=order {
        // (e_exp * lambda / 2)^t / t!  *  P_N^t
        let scale = Coefficient::sym_pow(
            ring,
            "lambda",
            t as i16,
            BigRational::new(
                BigInt::from(e_exp).pow(t),
                BigInt::from(2u32).pow(t),
            ) / factorial(t),
        );
        let coeff = c.mul(&scale)?;
        if coeff.is_zero() {
            continue;
        }
        let mut pairs = vec![(pn, t as i16)];
        pairs.extend(base.iter().cloned());
        crate::algebra::terms_add_into(
            &mut out,
            affine.mono_from_pairs(&pairs),
            coeff,
        );
    }
    Ok(out)
}

fn affine_dim(affine: &Arc<Algebra>) -> usize {
    affine
        .gens
        .iter()
        .filter(|g| g.name.starts_with('P'))
        .count()
}

/// The exact coefficient of `lambda^deg` (with `lambda` stripped) of a
/// deformed element, expressed in the classical affine algebra.
pub fn lambda_part(
    x: &NCElement,
    affine: &Arc<Algebra>,
    deg: i16,
) -> Result<NCElement, CkError> {
    let mut out = Terms::new();
    for (m, c) in x.terms() {
        let expanded = expand_mono(x.algebra(), affine, m, c, deg)?;
        for (em, ec) in expanded {
            let part = ec.coeff_of_sym_pow("lambda", deg);
            crate::algebra::terms_add_into(&mut out, em, part);
        }
    }
    Ok(NCElement::from_terms(affine, out))
}

/// Slot-wise expansion for arity-2 tensors.
pub fn lambda_part_tensor(
    t: &TensorElement,
    affine: &Arc<Algebra>,
    deg: i16,
) -> Result<TensorElement, CkError> {
    let deformed = t.algebra();
    let mut out = TensorElement::zero(affine, t.arity());
    for (key, c) in t.terms() {
        let one = Coefficient::one(&affine.ring);
        let left = expand_mono(deformed, affine, &key[0], c, deg)?;
        let right = expand_mono(deformed, affine, &key[1], &one, deg)?;
        for (lm, lc) in &left {
            for (rm, rc) in &right {
                let prod = lc.mul(rc)?;
                let part = prod.coeff_of_sym_pow("lambda", deg);
                if !part.is_zero() {
                    out.add_term(TensorKey::from_vec(vec![lm.clone(), rm.clone()]), part);
                }
            }
        }
    }
    Ok(out)
}

/// The classical r-matrix with the overall `lambda` factor stripped:
/// `sum_s J_sN (x) P_s - P_s (x) J_sN` in the affine algebra.
pub fn r_matrix_reduced(kv: &KVector, affine: &Arc<Algebra>) -> Result<TensorElement, CkError> {
    let n = kv.n;
    let mut r = TensorElement::zero(affine, 2);
    let one = Coefficient::one(&affine.ring);
    for s in 1..n {
        let j = affine.mono_from_pairs(&[(affine.gen_id(&jname(s, n)), 1)]);
        let p = affine.mono_from_pairs(&[(affine.gen_id(&pname(s)), 1)]);
        r.add_term(TensorKey::from_vec(vec![j.clone(), p.clone()]), one.clone());
        r.add_term(TensorKey::from_vec(vec![p, j]), one.neg());
    }
    Ok(r)
}

/// The official r-matrix `lambda * sum_s J_sN wedge P_s` in the deformed basis.
pub fn r_matrix(kv: &KVector, h: &HopfPresentation) -> Result<TensorElement, CkError> {
    let n = kv.n;
    let alg = &h.algebra;
    let lam = Coefficient::symbol(&alg.ring, "lambda");
    let mut r = TensorElement::zero(alg, 2);
    for s in 1..n {
        let j = alg.mono_from_pairs(&[(alg.gen_id(&jname(s, n)), 1)]);
        let p = alg.mono_from_pairs(&[(alg.gen_id(&pname(s)), 1)]);
        r.add_term(TensorKey::from_vec(vec![j.clone(), p.clone()]), lam.clone());
        r.add_term(TensorKey::from_vec(vec![p, j]), lam.neg());
    }
    Ok(r)
}

/// Coboundary check: for every generator `X` of the deformed presentation,
/// the `lambda`-linear part of `(Delta - tau Delta)(X)` equals
/// `[X (x) 1 + 1 (x) X, r]` computed in the classical affine algebra.
pub fn check_r_matrix_cocommutator(
    kv: &KVector,
    h: &HopfPresentation,
) -> Result<Report, CkError> {
    let affine = build_affine(kv)?;
    let mut report = Report::new("r-matrix-cocommutator", &h.algebra.id);
    let r = r_matrix_reduced(kv, &affine)?;
    for g in &h.algebra.gens {
        if g.invertible {
            continue;
        }
        let x = NCElement::gen(&h.algebra, &g.name);
        let d = h.coproduct_of(&x)?;
        let cocomm = d.sub(&d.transpose(0, 1));
        let delta1 = lambda_part_tensor(&cocomm, &affine, 1)?;
        let xa = NCElement::gen(&affine, &g.name);
        let one = NCElement::one(&affine);
        let ad = TensorElement::from_factors(&[xa.clone(), one.clone()])?
            .add(&TensorElement::from_factors(&[one, xa])?)
            .commutator(&r)?;
        let diff = delta1.sub(&ad);
        report.push_residual(
            format!("delta_1({}) = ad_{}(r)", g.name, g.name),
            diff.is_zero(),
            diff.canonical_text(),
        );
    }
    Ok(report)
}

/// Classical limit: the `lambda`-degree-0 part of every deformed bracket must
/// reproduce the affine bracket exactly.
pub fn check_classical_limit(kv: &KVector, h: &HopfPresentation) -> Result<Report, CkError> {
    let affine = build_affine(kv)?;
    let mut report = Report::new("classical-limit", &h.algebra.id);
    let alg = &h.algebra;
    for x in &alg.gens {
        if x.invertible {
            continue;
        }
        for y in &alg.gens {
            if y.invertible || x.name <= y.name {
                continue;
            }
            let bx = NCElement::gen(alg, &x.name);
            let by = NCElement::gen(alg, &y.name);
            let br = bx.commutator(&by)?;
            let limit = lambda_part(&br, &affine, 0)?;
            let ax = NCElement::gen(&affine, &x.name);
            let ay = NCElement::gen(&affine, &y.name);
            let want = ax.commutator(&ay)?;
            let d = limit.sub(&want);
            report.push_residual(
                format!("lim [{}, {}]", x.name, y.name),
                d.is_zero(),
                d.canonical_text(),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ck::build_deformed_new;

    #[test]
    fn e_power_expands_to_exponential_series() {
        let kv = KVector::affine_symbolic(2);
        let h = build_deformed_new(&kv).unwrap();
        let affine = build_affine(&kv).unwrap();
        let e2 = NCElement::gen_pow(&h.algebra, "E", 2);
        // E^2 = 1 + lambda P2 + ... : degree-1 part is P2
        let part0 = lambda_part(&e2, &affine, 0).unwrap();
        let part1 = lambda_part(&e2, &affine, 1).unwrap();
        assert_eq!(part0, NCElement::one(&affine));
        assert_eq!(part1, NCElement::gen(&affine, "P2"));
    }

    #[test]
    fn deformed_bracket_has_classical_limit() {
        let kv = KVector::affine_symbolic(3);
        let h = build_deformed_new(&kv).unwrap();
        assert!(check_classical_limit(&kv, &h).unwrap().all_pass());
    }

    #[test]
    fn cocommutator_matches_r_matrix_n2() {
        let kv = KVector::affine_symbolic(2);
        let h = build_deformed_new(&kv).unwrap();
        assert!(check_r_matrix_cocommutator(&kv, &h).unwrap().all_pass());
    }
}

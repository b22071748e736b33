use ckhopf::algebra::NCElement;
use ckhopf::ck::*;
use ckhopf::ring::Coefficient;
use num_rational::BigRational;

fn main() {
    let n = 4usize;
    let kv = KVector::affine_symbolic(n);
    let ring = kv.ring.clone();
    let old = build_deformed_old(&kv).unwrap();
    let alg = &old.algebra;
    let half = |s: i64| Coefficient::from_rational(&ring, BigRational::new(s.into(), 2.into()));
    let lam2_4 = Coefficient::sym_pow(&ring, "lambda", 2, BigRational::new(1.into(), 4.into()));
    let g = |name: &str| NCElement::gen(alg, name);
    let w = |i: usize, j: usize, k: usize| -> NCElement {
        // W_ijk = kappa_ij P_i J_jk - P_j J_ik + P_k J_ij
        g(&pname(i)).mul(&g(&jname(j, k))).unwrap().scale(&kv.kappa(i, j))
            .sub(&g(&pname(j)).mul(&g(&jname(i, k))).unwrap())
            .add(&g(&pname(k)).mul(&g(&jname(i, j))).unwrap())
    };
    let cosh = NCElement::gen_pow(alg, "E", 2).scale(&half(1))
        .add(&NCElement::gen_pow(alg, "E", -2).scale(&half(1)));
    for i in 1..n {
        for j in (i + 1)..n {
            // paper display: kappa_jN { J_ij cosh + (lambda^2/4)(sum_{s<i} kappa_iN P_s W_sij
            //   - sum_{i<s<j} kappa_sN P_s W_isj + sum_{s>j} kappa_sN P_s W_ijs) }
            let mut inner = g(&jname(i, j)).mul(&cosh).unwrap();
            for s in 1..i {
                let t = g(&pname(s)).mul(&w(s, i, j)).unwrap().scale(&kv.kappa(i, n)).scale(&lam2_4);
                inner = inner.add(&t);
            }
            for s in (i + 1)..j {
                let t = g(&pname(s)).mul(&w(i, s, j)).unwrap().scale(&kv.kappa(s, n)).scale(&lam2_4);
                inner = inner.sub(&t);
            }
            for s in (j + 1)..n {
                let t = g(&pname(s)).mul(&w(i, j, s)).unwrap().scale(&kv.kappa(s, n)).scale(&lam2_4);
                inner = inner.add(&t);
            }
            let expected = inner.scale(&kv.kappa(j, n));
            let got = g(&jname(i, n)).commutator(&g(&jname(j, n))).unwrap();
            let d = got.sub(&expected);
            println!("[J{}4,J{}4]: derived == paper display: {}", i, j, d.is_zero());
            if !d.is_zero() { println!("  residual: {}", d); }
        }
    }
}

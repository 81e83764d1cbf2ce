//! Irreducible factorization of binary and ternary forms over Q.
//!
//! Ternary forms are made monic in `z` by a shear `w -> w + a z,
//! t -> t + b z` and dehomogenized at `t = 1`. The univariate image at a
//! `w` value keeping it square-free is factored first. Its factors are
//! lifted `w`-adically and recombined by exact trial division.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::gcd::{binary_to_qpoly, qpoly_to_binary, squarefree_parts, BiPoly};
use super::poly::HomogPoly;
use super::univariate::QPoly;
use super::zassenhaus::factor_squarefree_q;
use super::Rational;
use crate::error::{Error, Result};

/// Degree cap for the irreducible-factorization core.
pub const DEFAULT_FACTOR_CAP: u32 = 24;

/// `unit * ∏ factor^multiplicity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(HomogPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, nvars: usize) -> HomogPoly {
        let mut acc = HomogPoly::constant(nvars, self.unit.clone());
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m));
        }
        acc
    }

    pub fn distinct(&self) -> Vec<HomogPoly> {
        self.factors.iter().map(|(f, _)| f.clone()).collect()
    }
}

/// Serializable summary used in reports.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FactorSummary {
    pub factor: String,
    pub multiplicity: u32,
}

/// Complete factorization over Q. Factors are primitive, normalized, and
/// sorted. `cap` bounds the degree of any square-free part handed to the
/// irreducible-factorization core; monomial factors are exempt.
pub fn factor(p: &HomogPoly, cap: u32) -> Result<Factorization> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let nvars = p.nvars();
    let mut factors: Vec<(HomogPoly, u32)> = Vec::new();
    let m = p.monomial_content();
    for i in 0..nvars {
        if m.0[i] > 0 {
            factors.push((HomogPoly::var(nvars, i), m.0[i]));
        }
    }
    let core = p.div_monomial(&m);
    for (part, mult) in squarefree_parts(&core) {
        if part.degree() > cap {
            return Err(Error::BudgetExceeded(format!(
                "factorization of a square-free part of degree {} exceeds the cap {}",
                part.degree(),
                cap
            )));
        }
        for f in irreducible_factors(&part) {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| cmp_forms(&a.0, &b.0)));
    let mut prod = HomogPoly::constant(nvars, Rational::one());
    for (f, k) in &factors {
        prod = prod.mul(&f.pow(*k));
    }
    let unit = p.leading().unwrap().1 / prod.leading().unwrap().1;
    debug_assert_eq!(prod.scale(&unit), *p);
    Ok(Factorization { unit, factors })
}

/// Deterministic total order on forms, used for sorting component lists.
pub fn cmp_forms(a: &HomogPoly, b: &HomogPoly) -> std::cmp::Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| {
            let ka: Vec<_> = a.terms().rev().collect();
            let kb: Vec<_> = b.terms().rev().collect();
            for (x, y) in ka.iter().zip(kb.iter()) {
                let o = y.0.cmp(x.0).then_with(|| x.1.cmp(y.1));
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            ka.len().cmp(&kb.len())
        })
}

pub fn is_irreducible(p: &HomogPoly, cap: u32) -> Result<bool> {
    let f = factor(p, cap)?;
    Ok(f.factors.len() == 1 && f.factors[0].1 == 1)
}

/// Irreducible factors of a square-free form with no monomial factor.
fn irreducible_factors(p: &HomogPoly) -> Vec<HomogPoly> {
    if p.degree() <= 1 {
        return vec![p.normalized()];
    }
    if p.nvars() == 2 {
        let q = binary_to_qpoly(p);
        // no monomial factor, so deg_z = degree
        return factor_squarefree_q(&q)
            .into_iter()
            .map(|g| qpoly_to_binary(&g, g.deg() as u32).normalized())
            .collect();
    }
    ternary_factors(p)
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn shear(nvars: usize, a: &Rational, b: &Rational) -> Vec<HomogPoly> {
    let z = HomogPoly::var(nvars, 0);
    let w = HomogPoly::var(nvars, 1);
    let t = HomogPoly::var(nvars, 2);
    vec![z.clone(), w.add(&z.scale(a)), t.add(&z.scale(b))]
}

fn ternary_factors(p: &HomogPoly) -> Vec<HomogPoly> {
    let n = p.degree() as usize;
    // shear so that the z^n coefficient is nonzero
    let mut shift = None;
    'search: for r in 0i64..8 {
        for a in -r..=r {
            for b in [r - a.abs(), -(r - a.abs())] {
                let x = [int(1), int(a), int(b)];
                if !p.eval(&x).is_zero() {
                    shift = Some((int(a), int(b)));
                    break 'search;
                }
            }
        }
    }
    let (a, b) = shift.expect("a nonzero form is nonzero at some small integer point");
    let sheared = p.compose(&shear(3, &a, &b));
    let unshear = shear(3, &-a, &-b);

    let h = BiPoly::from_homog(&sheared);
    debug_assert_eq!(h.deg_z(), n);
    let lc = h.lc().lc();
    let h = BiPoly(h.0.iter().map(|c| c.scale(&lc.recip())).collect());

    let factors = bivariate_monic_factors(&h);
    let mut out: Vec<HomogPoly> = factors
        .into_iter()
        .map(|g| g.to_homog(g.deg_z() as u32).compose(&unshear).normalized())
        .collect();
    out.sort_by(cmp_forms);
    out
}

/// Substitute `w -> w + c` in every coefficient.
fn shift_w(h: &BiPoly, c: &Rational) -> BiPoly {
    BiPoly(h.0.iter().map(|q| q.shift(c)).collect())
}

/// Factor a square-free bivariate polynomial, monic in `z` with total degree
/// equal to its `z`-degree, into monic irreducibles over Q.
fn bivariate_monic_factors(h: &BiPoly) -> Vec<BiPoly> {
    let n = h.deg_z();
    if n <= 1 {
        return vec![h.clone()];
    }
    // specialization point keeping h(z, w0) square-free
    let mut w0 = None;
    for k in 0i64..200 {
        let c = if k % 2 == 0 { int(k / 2) } else { int(-(k + 1) / 2) };
        let uni = QPoly(h.0.iter().map(|q| q.eval(&c)).collect()).trimmed();
        if uni.is_squarefree() {
            w0 = Some(c);
            break;
        }
    }
    let w0 = w0.expect("square-free bivariate polynomial has a good specialization");
    let hs = shift_w(h, &w0);
    let base = QPoly(hs.0.iter().map(|q| q.coeff(0)).collect()).trimmed();
    let uni_factors = factor_squarefree_q(&base);
    if uni_factors.len() == 1 {
        return vec![h.clone()];
    }
    let precision = hs.deg_w() + 1;
    let lifted = wadic_lift(&hs, &uni_factors, precision);

    let mut remaining = hs.clone();
    let mut pool = lifted;
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= pool.len() {
        let mut progressed = false;
        for subset in subsets(pool.len(), s) {
            let cand = subset
                .iter()
                .fold(series_one(), |acc, &i| series_mul(&acc, &pool[i], precision));
            let g = series_to_bipoly(&cand);
            if let Some(q) = remaining.div_exact_monic(&g) {
                found.push(g);
                remaining = q;
                pool = pool
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, f)| f)
                    .collect();
                progressed = true;
                break;
            }
        }
        if !progressed {
            s += 1;
        }
    }
    if remaining.deg_z() > 0 {
        found.push(remaining);
    }
    found.into_iter().map(|g| shift_w(&g, &-w0.clone())).collect()
}

/// `w`-adic series with coefficients in `Q[z]`: index = power of `w`.
type Series = Vec<QPoly>;

fn series_one() -> Series {
    vec![QPoly::one()]
}

fn series_mul(a: &Series, b: &Series, prec: usize) -> Series {
    let mut out = vec![QPoly::zero(); prec.min(a.len() + b.len())];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < out.len() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

fn series_to_bipoly(s: &Series) -> BiPoly {
    let degz = s.iter().map(QPoly::deg).max().unwrap_or(0);
    let mut coeffs: Vec<Vec<Rational>> = vec![vec![Rational::zero(); s.len()]; degz + 1];
    for (k, q) in s.iter().enumerate() {
        for (i, c) in q.0.iter().enumerate() {
            coeffs[i][k] = c.clone();
        }
    }
    BiPoly(coeffs.into_iter().map(|v| QPoly(v).trimmed()).collect()).trimmed()
}

fn bipoly_to_series(h: &BiPoly) -> Series {
    let degw = h.deg_w();
    let mut out: Vec<Vec<Rational>> = vec![vec![Rational::zero(); h.0.len()]; degw + 1];
    for (i, q) in h.0.iter().enumerate() {
        for (k, c) in q.0.iter().enumerate() {
            out[k][i] = c.clone();
        }
    }
    out.into_iter().map(|v| QPoly(v).trimmed()).collect()
}

/// Lift `h ≡ ∏ u_i (mod w)` to `h ≡ ∏ U_i (mod w^prec)` with `U_i` monic in z.
fn wadic_lift(h: &BiPoly, u: &[QPoly], prec: usize) -> Vec<Series> {
    let r = u.len();
    let hser = bipoly_to_series(h);
    let e: Vec<QPoly> = (0..r)
        .map(|i| {
            let cof = u
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(QPoly::one(), |acc, (_, g)| acc.mul(g));
            let (g, s, _) = cof.rem(&u[i]).ext_gcd(&u[i]);
            debug_assert_eq!(g, QPoly::one());
            s
        })
        .collect();
    let mut lifted: Vec<Series> = u.iter().map(|g| vec![g.clone()]).collect();
    for k in 1..prec {
        let prod = lifted
            .iter()
            .fold(series_one(), |acc, f| series_mul(&acc, f, k + 1));
        let hk = hser.get(k).cloned().unwrap_or_default();
        let pk = prod.get(k).cloned().unwrap_or_default();
        let err = hk.sub(&pk);
        for i in 0..r {
            let delta = err.mul(&e[i]).rem(&u[i]);
            lifted[i].push(delta);
        }
    }
    lifted
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Product of the distinct irreducible factors; normalized.
pub fn square_free(p: &HomogPoly) -> Result<HomogPoly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(super::gcd::radical(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(s: &str) -> HomogPoly {
        HomogPoly::parse(s, 3).unwrap()
    }

    #[test]
    fn coordinate_triangle() {
        let f = factor(&hp("z*w*t"), DEFAULT_FACTOR_CAP).unwrap();
        assert_eq!(f.distinct(), vec![hp("z"), hp("w"), hp("t")]);
        assert!(f.factors.iter().all(|(_, m)| *m == 1));
    }

    #[test]
    fn nilpotent_map_curves_are_irreducible() {
        assert!(is_irreducible(&hp("z^2 - w*t"), DEFAULT_FACTOR_CAP).unwrap());
        assert!(is_irreducible(&hp("z^3 - w^2*t"), DEFAULT_FACTOR_CAP).unwrap());
        assert!(is_irreducible(&hp("z^4 - w^3*t"), DEFAULT_FACTOR_CAP).unwrap());
    }

    #[test]
    fn splits_nontrivial_products() {
        let parts = [hp("z^2 - w*t"), hp("z + 2*w - t"), hp("w^3 + z*t^2 - 5*z^2*w")];
        let p = parts[0].mul(&parts[1]).mul(&parts[2]).scale(&int(-6));
        let f = factor(&p, DEFAULT_FACTOR_CAP).unwrap();
        assert_eq!(f.expand(3), p);
        assert_eq!(f.factors.len(), 3);
        for q in &parts {
            assert!(f.distinct().contains(&q.normalized()));
        }
    }

    #[test]
    fn conic_splitting_into_conjugate_lines_stays_irreducible() {
        // z^2 - 2 w^2 splits only over Q(sqrt 2)
        assert!(is_irreducible(&hp("z^2 - 2*w^2"), DEFAULT_FACTOR_CAP).unwrap());
        let f = factor(&hp("z^2 - 4*w^2"), DEFAULT_FACTOR_CAP).unwrap();
        assert_eq!(f.factors.len(), 2);
    }

    #[test]
    fn multiplicities_recorded() {
        let p = hp("z^3*(w - t)^2*(z^2 - w*t)");
        let f = factor(&p, DEFAULT_FACTOR_CAP).unwrap();
        assert_eq!(f.expand(3), p);
        assert!(f.factors.contains(&(hp("z"), 3)));
        assert!(f.factors.contains(&(hp("w - t"), 2)));
    }

    #[test]
    fn binary_forms() {
        let p = HomogPoly::parse("(z^2 - 2*z*w - w^2)*(z - w)*w^2", 2).unwrap();
        let f = factor(&p, DEFAULT_FACTOR_CAP).unwrap();
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.expand(2), p);
    }

    #[test]
    fn budget_exceeded_is_explicit() {
        let p = hp("z^25 + w^25 + t^25");
        assert!(matches!(factor(&p, DEFAULT_FACTOR_CAP), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn zero_rejected() {
        assert_eq!(factor(&HomogPoly::zero(3), 24), Err(Error::ZeroPolynomial));
        assert_eq!(square_free(&HomogPoly::zero(3)), Err(Error::ZeroPolynomial));
    }
}

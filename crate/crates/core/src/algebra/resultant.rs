//! Multivariate resultants of `n` forms in `n` variables (n = 2, 3).
//!
//! Two binary forms use the Sylvester determinant. Three ternary forms use
//! Macaulay's quotient `det(M) / det(M')`, where `M` is the Macaulay matrix
//! in degree `d0 + d1 + d2 - 2` and `M'` its minor on the monomials that are
//! divisible by at least two of `z^d0, w^d1, t^d2`. Determinants are
//! fraction-free (Bareiss). When the minor is singular the forms are
//! perturbed by `ε x_i^{d_i}` and the ratio is recovered from the lowest
//! `ε`-coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{HomogPoly, Monomial};
use super::univariate::QPoly;
use super::Rational;
use crate::error::{Error, Result};

/// Determinant of an integer matrix by Bareiss elimination.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Determinant of a rational matrix (rows scaled to integers first).
pub fn rational_det(a: &[Vec<Rational>]) -> Rational {
    let mut scale = Rational::one();
    let rows: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            scale *= Rational::from_integer(l.clone());
            row.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    Rational::from_integer(bareiss_det(rows)) / scale
}

/// Sylvester resultant of two univariate polynomials given by coefficient
/// lists in *descending* order of the first variable, with formal degrees
/// `coeffs.len() - 1`.
pub fn sylvester(a: &[Rational], b: &[Rational]) -> Rational {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return Rational::one();
    }
    let mut mat = vec![vec![Rational::zero(); size]; size];
    for r in 0..n {
        for (j, c) in a.iter().enumerate() {
            mat[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in b.iter().enumerate() {
            mat[n + r][r + j] = c.clone();
        }
    }
    rational_det(&mat)
}

/// Resultant of univariate polynomials over Q with their true degrees.
pub fn univariate_resultant(a: &QPoly, b: &QPoly) -> Rational {
    let ra: Vec<Rational> = a.0.iter().rev().cloned().collect();
    let rb: Vec<Rational> = b.0.iter().rev().cloned().collect();
    sylvester(&ra, &rb)
}

fn binary_coeffs(p: &HomogPoly) -> Vec<Rational> {
    let d = p.degree();
    (0..=d).rev().map(|a| p.coeff(&Monomial([a, d - a, 0]))).collect()
}

/// Multivariate resultant normalized so that `Res(z^a, w^b) = 1` and
/// `Res(z^a, w^b, t^c) = 1`.
pub fn resultant(forms: &[HomogPoly]) -> Result<Rational> {
    let n = forms.len();
    if n != 2 && n != 3 {
        return Err(Error::Arity(format!("{n} forms")));
    }
    if forms.iter().any(|f| f.nvars() != n) {
        return Err(Error::Arity(format!("{n} forms need {n} variables")));
    }
    if forms.iter().any(HomogPoly::is_zero) {
        return Err(Error::ZeroPolynomial);
    }
    if n == 2 {
        return Ok(sylvester(&binary_coeffs(&forms[0]), &binary_coeffs(&forms[1])));
    }
    Ok(macaulay(forms))
}

struct MacaulayLayout {
    monos: Vec<Monomial>,
    /// (form index, multiplier monomial) for each row
    rows: Vec<(usize, Monomial)>,
    extraneous: Vec<usize>,
}

fn macaulay_layout(degrees: [u32; 3]) -> MacaulayLayout {
    let big = degrees.iter().sum::<u32>() - 2;
    let monos = HomogPoly::monomials_of_degree(3, big);
    let mut rows = Vec::with_capacity(monos.len());
    let mut extraneous = Vec::new();
    for (idx, m) in monos.iter().enumerate() {
        let divisible: Vec<usize> = (0..3).filter(|&i| m.0[i] >= degrees[i]).collect();
        let i = divisible[0];
        let mut mult = *m;
        mult.0[i] -= degrees[i];
        rows.push((i, mult));
        if divisible.len() >= 2 {
            extraneous.push(idx);
        }
    }
    MacaulayLayout { monos, rows, extraneous }
}

fn macaulay_matrix(forms: &[HomogPoly], layout: &MacaulayLayout) -> Vec<Vec<Rational>> {
    let index: std::collections::HashMap<Monomial, usize> =
        layout.monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let n = layout.monos.len();
    let mut mat = vec![vec![Rational::zero(); n]; n];
    for (r, (fi, mult)) in layout.rows.iter().enumerate() {
        for (m, c) in forms[*fi].terms() {
            mat[r][index[&m.mul(mult)]] = c.clone();
        }
    }
    mat
}

fn minor(mat: &[Vec<Rational>], idx: &[usize]) -> Vec<Vec<Rational>> {
    idx.iter().map(|&r| idx.iter().map(|&c| mat[r][c].clone()).collect()).collect()
}

fn macaulay(forms: &[HomogPoly]) -> Rational {
    let degrees = [forms[0].degree(), forms[1].degree(), forms[2].degree()];
    let layout = macaulay_layout(degrees);
    let mat = macaulay_matrix(forms, &layout);
    let den = rational_det(&minor(&mat, &layout.extraneous));
    if !den.is_zero() {
        return rational_det(&mat) / den;
    }
    perturbed_macaulay(forms, &layout)
}

/// `det M(ε) / det M'(ε)` at `ε = 0` for `f_i + ε x_i^{d_i}`, by
/// interpolating both determinants as polynomials in `ε`.
fn perturbed_macaulay(forms: &[HomogPoly], layout: &MacaulayLayout) -> Rational {
    let n = layout.monos.len();
    let mut xs = Vec::with_capacity(n + 1);
    let mut num_vals = Vec::with_capacity(n + 1);
    let mut den_vals = Vec::with_capacity(n + 1);
    for k in 1..=(n as i64 + 1) {
        let eps = Rational::from_integer(BigInt::from(k));
        let perturbed: Vec<HomogPoly> = forms
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut e = [0u32; 3];
                e[i] = f.degree();
                f.add(&HomogPoly::monomial(3, Monomial(e), eps.clone()))
            })
            .collect();
        let mat = macaulay_matrix(&perturbed, layout);
        num_vals.push(rational_det(&mat));
        den_vals.push(rational_det(&minor(&mat, &layout.extraneous)));
        xs.push(eps);
    }
    let num = QPoly::interpolate(&xs, &num_vals);
    let den = QPoly::interpolate(&xs, &den_vals);
    let k = den.0.iter().position(|c| !c.is_zero()).expect("perturbed minor is generically invertible");
    num.coeff(k) / den.coeff(k)
}

/// Sign-aware helper: does the resultant vanish?
pub fn have_common_zero(forms: &[HomogPoly]) -> Result<bool> {
    Ok(resultant(forms)?.is_zero())
}

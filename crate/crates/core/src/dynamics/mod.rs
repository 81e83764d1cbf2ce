//! Endomorphisms of P^1 and P^2 with their critical sets and local
//! differentials in affine charts.

mod periodic;

pub use periodic::{
    certify_superattracting, find_periodic, preimages, Classification, PeriodSummary, PeriodicPoint,
    PeriodicSearch, Scalar,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{factor, resultant, HomogPoly, Rational};
use crate::error::{Error, Result};
use crate::geometry::{AlgebraicSet, Component, ProjPoint};
use crate::numeric::{chart_index, NumPoly, C64};

/// A morphism `[f_0 : … : f_k]` of P^k with `k ∈ {1, 2}` and degree `d > 1`.
#[derive(Clone, Debug)]
pub struct Endomorphism {
    forms: Vec<HomogPoly>,
    degree: u32,
    resultant: Rational,
    numeric: Vec<NumPoly>,
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.forms == other.forms
    }
}

impl Endomorphism {
    /// Validates the forms and caches their resultant.
    pub fn new(forms: Vec<HomogPoly>) -> Result<Self> {
        let n = forms.len();
        if n != 2 && n != 3 {
            return Err(Error::Arity(format!("{n} forms; expected 2 or 3")));
        }
        if let Some(f) = forms.iter().find(|f| f.nvars() != n) {
            return Err(Error::Arity(format!("{f} is not a form in {n} variables")));
        }
        if forms.iter().any(HomogPoly::is_zero) {
            return Err(Error::ZeroPolynomial);
        }
        let d = forms[0].degree();
        if let Some(f) = forms.iter().find(|f| f.degree() != d) {
            return Err(Error::InvalidMap(format!("degree mismatch: {} vs {d}", f.degree())));
        }
        if d <= 1 {
            return Err(Error::InvalidMap(format!("degree {d} must exceed 1")));
        }
        let res = resultant(&forms)?;
        if res.is_zero() {
            return Err(Error::InvalidMap("the forms have a common zero".into()));
        }
        Ok(Self::from_parts(forms, res))
    }

    fn from_parts(forms: Vec<HomogPoly>, resultant: Rational) -> Self {
        let numeric = forms.iter().map(NumPoly::from_homog).collect();
        Endomorphism { degree: forms[0].degree(), forms, resultant, numeric }
    }

    pub fn parse(src: &[&str]) -> Result<Self> {
        let n = src.len();
        Self::new(src.iter().map(|s| HomogPoly::parse(s, n)).collect::<Result<Vec<_>>>()?)
    }

    /// Dimension `k` of the projective space.
    pub fn k(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn nvars(&self) -> usize {
        self.forms.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn forms(&self) -> &[HomogPoly] {
        &self.forms
    }

    pub fn resultant(&self) -> &Rational {
        &self.resultant
    }

    pub fn apply_exact(&self, x: &[Rational]) -> Vec<Rational> {
        self.forms.iter().map(|f| f.eval(x)).collect()
    }

    pub fn apply_complex(&self, x: &[C64]) -> Vec<C64> {
        self.numeric.iter().map(|f| f.eval(x)).collect()
    }

    /// Values and homogeneous Jacobian of the lift at `x`.
    pub fn apply_with_jacobian(&self, x: &[C64]) -> (Vec<C64>, Vec<Vec<C64>>) {
        self.numeric.iter().map(|f| f.eval_grad(x)).unzip()
    }

    /// `self ∘ inner`, with the resultant obtained from the composition law
    /// `Res(F∘G) = Res(F)^{e^k} Res(G)^{d^{k+1}}` and the common content of
    /// the composite removed.
    pub fn compose(&self, inner: &Endomorphism) -> Endomorphism {
        assert_eq!(self.nvars(), inner.nvars());
        let k = self.k() as u32;
        let d = BigInt::from(self.degree);
        let e = BigInt::from(inner.degree);
        let forms: Vec<HomogPoly> = self.forms.iter().map(|f| f.compose(&inner.forms)).collect();
        let res = big_pow(&self.resultant, &num_traits::pow(e.clone(), k as usize))
            * big_pow(&inner.resultant, &num_traits::pow(d, k as usize + 1));
        let content = common_content(&forms);
        let forms: Vec<HomogPoly> = forms.iter().map(|f| f.scale(&content.recip())).collect();
        let big_d = self.degree * inner.degree;
        let exponent = BigInt::from(k + 1) * num_traits::pow(BigInt::from(big_d), k as usize);
        let res = res / big_pow(&content, &exponent);
        Self::from_parts(forms, res)
    }

    /// `f^n`, refusing degrees above `degree_budget`.
    pub fn iterate(&self, n: u32, degree_budget: u32) -> Result<Endomorphism> {
        if n == 0 {
            return Err(Error::Precondition("iterate needs n >= 1".into()));
        }
        let total = (self.degree as u64).checked_pow(n).unwrap_or(u64::MAX);
        if total > degree_budget as u64 {
            return Err(Error::BudgetExceeded(format!("degree {}^{n} exceeds {degree_budget}", self.degree)));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// Determinant of the `(k+1)×(k+1)` matrix of partial derivatives.
    pub fn jacobian_det(&self) -> HomogPoly {
        let n = self.nvars();
        let j: Vec<Vec<HomogPoly>> =
            self.forms.iter().map(|f| (0..n).map(|i| f.derivative(i)).collect()).collect();
        let det = if n == 2 {
            sub_or_zero(&mul_or_zero(&j[0][0], &j[1][1]), &mul_or_zero(&j[0][1], &j[1][0]))
        } else {
            let minor = |r: usize, c: usize| {
                let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
                let cols: Vec<usize> = (0..3).filter(|&x| x != c).collect();
                sub_or_zero(
                    &mul_or_zero(&j[rows[0]][cols[0]], &j[rows[1]][cols[1]]),
                    &mul_or_zero(&j[rows[0]][cols[1]], &j[rows[1]][cols[0]]),
                )
            };
            let t0 = mul_or_zero(&j[0][0], &minor(0, 0));
            let t1 = mul_or_zero(&j[0][1], &minor(0, 1));
            let t2 = mul_or_zero(&j[0][2], &minor(0, 2));
            add_or_zero(&sub_or_zero(&t0, &t1), &t2)
        };
        debug_assert!(det.is_zero() || det.degree() == (n as u32) * (self.degree - 1));
        det
    }

    /// Irreducible components of `{det df = 0}`.
    pub fn critical_set(&self, cap: u32) -> Result<AlgebraicSet> {
        let det = self.jacobian_det();
        if det.is_zero() {
            return Err(Error::InvalidMap("identically vanishing Jacobian".into()));
        }
        let expected = self.nvars() as u32 * (self.degree - 1);
        assert_eq!(det.degree(), expected, "Jacobian degree must be (k+1)(d-1)");
        let fac = factor(&det, cap)?;
        Ok(AlgebraicSet::from_components(
            self.nvars(),
            fac.distinct().iter().map(Component::hypersurface).collect(),
            0.0,
        ))
    }

    /// Local differential at `p`, source chart the largest coordinate of `p`
    /// and target chart the largest coordinate of `f(p)`.
    pub fn differential_at(&self, p: &ProjPoint) -> LocalJacobian {
        let a = point_chart(p);
        let b = point_chart(&crate::geometry::point_image(self, p));
        self.differential_in_charts(p, a, b)
    }

    /// Jacobian of `u ↦ (f_i / f_b)_{i≠b}` at `p` in the chart `x_a = 1`.
    /// Requires `p_a ≠ 0` and `f_b(p) ≠ 0`.
    pub fn differential_in_charts(&self, p: &ProjPoint, a: usize, b: usize) -> LocalJacobian {
        let n = self.nvars();
        let rows: Vec<usize> = (0..n).filter(|&i| i != b).collect();
        let cols: Vec<usize> = (0..n).filter(|&j| j != a).collect();
        let matrix = match p {
            ProjPoint::Exact(_) => {
                let x = p.to_rationals().unwrap();
                let xa = x[a].clone();
                assert!(!xa.is_zero(), "source chart coordinate vanishes");
                let x: Vec<Rational> = x.iter().map(|v| v / &xa).collect();
                let fx = self.apply_exact(&x);
                assert!(!fx[b].is_zero(), "target chart coordinate vanishes");
                let grads: Vec<Vec<Rational>> =
                    self.forms.iter().map(|f| (0..n).map(|j| f.derivative(j).eval(&x)).collect()).collect();
                let fb2 = &fx[b] * &fx[b];
                JacobianMatrix::Exact(
                    rows.iter()
                        .map(|&i| {
                            cols.iter().map(|&j| (&grads[i][j] * &fx[b] - &fx[i] * &grads[b][j]) / &fb2).collect()
                        })
                        .collect(),
                )
            }
            ProjPoint::Inexact(v) => {
                let xa = v[a];
                let x: Vec<C64> = v.iter().map(|c| c / xa).collect();
                let (fx, grads) = self.apply_with_jacobian(&x);
                let fb2 = fx[b] * fx[b];
                JacobianMatrix::Inexact(
                    rows.iter()
                        .map(|&i| cols.iter().map(|&j| (grads[i][j] * fx[b] - fx[i] * grads[b][j]) / fb2).collect())
                        .collect(),
                )
            }
        };
        LocalJacobian { source_chart: a, target_chart: b, point: p.clone(), matrix }
    }
}

fn mul_or_zero(a: &HomogPoly, b: &HomogPoly) -> HomogPoly {
    if a.is_zero() || b.is_zero() {
        HomogPoly::zero(a.nvars())
    } else {
        a.mul(b)
    }
}

fn add_or_zero(a: &HomogPoly, b: &HomogPoly) -> HomogPoly {
    if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else {
        a.add(b)
    }
}

fn sub_or_zero(a: &HomogPoly, b: &HomogPoly) -> HomogPoly {
    add_or_zero(a, &b.neg())
}

fn big_pow(r: &Rational, e: &BigInt) -> Rational {
    let mut base = r.clone();
    let mut e = e.clone();
    let mut acc = Rational::one();
    let two = BigInt::from(2);
    while e.is_positive() {
        if e.is_odd() {
            acc *= &base;
        }
        base = &base * &base;
        e /= &two;
    }
    acc
}

fn common_content(forms: &[HomogPoly]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for f in forms {
        let c = f.content();
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    Rational::new(num, den)
}

/// Largest-magnitude coordinate, ties to the lowest index.
pub fn point_chart(p: &ProjPoint) -> usize {
    match p {
        ProjPoint::Exact(v) => {
            let mut best = 0;
            for i in 1..v.len() {
                if v[i].abs() > v[best].abs() {
                    best = i;
                }
            }
            best
        }
        ProjPoint::Inexact(v) => chart_index(v),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum JacobianMatrix {
    Exact(#[serde(serialize_with = "ser_rational_matrix")] Vec<Vec<Rational>>),
    Inexact(#[serde(serialize_with = "ser_complex_matrix")] Vec<Vec<C64>>),
}

fn ser_rational_matrix<S: serde::Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
    v.serialize(s)
}

fn ser_complex_matrix<S: serde::Serializer>(m: &[Vec<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<[f64; 2]>> = m.iter().map(|r| r.iter().map(|c| [c.re, c.im]).collect()).collect();
    v.serialize(s)
}

impl JacobianMatrix {
    pub fn size(&self) -> usize {
        match self {
            JacobianMatrix::Exact(m) => m.len(),
            JacobianMatrix::Inexact(m) => m.len(),
        }
    }

    pub fn to_complex(&self) -> Vec<Vec<C64>> {
        match self {
            JacobianMatrix::Exact(m) => m
                .iter()
                .map(|r| r.iter().map(|c| C64::new(crate::algebra::rat_to_f64(c), 0.0)).collect())
                .collect(),
            JacobianMatrix::Inexact(m) => m.clone(),
        }
    }

    /// `self · other`, exact when both factors are.
    pub fn mul(&self, other: &JacobianMatrix) -> JacobianMatrix {
        match (self, other) {
            (JacobianMatrix::Exact(a), JacobianMatrix::Exact(b)) => {
                let n = a.len();
                JacobianMatrix::Exact(
                    (0..n)
                        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
                        .collect(),
                )
            }
            _ => {
                let a = self.to_complex();
                let b = other.to_complex();
                let n = a.len();
                JacobianMatrix::Inexact(
                    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect(),
                )
            }
        }
    }

    pub fn is_zero_exact(&self) -> bool {
        matches!(self, JacobianMatrix::Exact(m) if m.iter().flatten().all(Zero::is_zero))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalJacobian {
    pub source_chart: usize,
    pub target_chart: usize,
    pub point: ProjPoint,
    pub matrix: JacobianMatrix,
}

//! Algebraic subsets of P^1 and P^2 with forward images of their
//! components and intersections of plane curves.
//!
//! A hypersurface component is an irreducible form. On P^2 it is a curve;
//! on P^1 it is a finite set of conjugate points (a single rational point
//! when the form is linear). Point components on P^2 are codimension-two
//! data such as the intersections making up `C_2`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::algebra::factor::cmp_forms;
use crate::algebra::gcd::{binary_to_qpoly, gcd};
use crate::algebra::linalg::nullspace;
use crate::algebra::resultant::sylvester;
use crate::algebra::univariate::QPoly;
use crate::algebra::{factor, rat_to_f64, HomogPoly, Monomial, Rational};
use crate::dynamics::Endomorphism;
use crate::error::{Error, Result};
use crate::numeric::{self, poly_roots, proj_distance, C64};

#[derive(Clone, Debug)]
pub enum ProjPoint {
    /// Primitive integer vector whose first nonzero entry is positive.
    Exact(Vec<BigInt>),
    /// Unit max-norm vector whose largest coordinate is real positive.
    Inexact(Vec<C64>),
}

impl ProjPoint {
    pub fn from_ints(v: &[i64]) -> Self {
        Self::from_rationals(&v.iter().map(|&x| Rational::from_integer(x.into())).collect::<Vec<_>>())
    }

    /// Panics on the zero vector.
    pub fn from_rationals(v: &[Rational]) -> Self {
        assert!(v.iter().any(|c| !c.is_zero()), "the zero vector is not a projective point");
        let den = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = v.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.iter().find(|c| !c.is_zero()).unwrap().is_negative() { -1 } else { 1 };
        ProjPoint::Exact(ints.into_iter().map(|c| c * sign / &g).collect())
    }

    pub fn from_complex(v: &[C64]) -> Self {
        ProjPoint::Inexact(numeric::normalize(v))
    }

    pub fn dim(&self) -> usize {
        match self {
            ProjPoint::Exact(v) => v.len(),
            ProjPoint::Inexact(v) => v.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProjPoint::Exact(_))
    }

    pub fn to_rationals(&self) -> Option<Vec<Rational>> {
        match self {
            ProjPoint::Exact(v) => Some(v.iter().map(|c| Rational::from_integer(c.clone())).collect()),
            ProjPoint::Inexact(_) => None,
        }
    }

    /// Coordinates as complex numbers, scaled to unit max-norm.
    pub fn to_complex(&self) -> Vec<C64> {
        match self {
            ProjPoint::Exact(v) => {
                let m = v.iter().map(|c| c.abs()).max().unwrap();
                let mf = Rational::from_integer(m);
                v.iter()
                    .map(|c| C64::new(rat_to_f64(&(Rational::from_integer(c.clone()) / &mf)), 0.0))
                    .collect()
            }
            ProjPoint::Inexact(v) => v.clone(),
        }
    }

    /// Exact equality for exact points, projective distance below `tol`
    /// otherwise.
    pub fn same_as(&self, other: &ProjPoint, tol: f64) -> bool {
        match (self, other) {
            (ProjPoint::Exact(a), ProjPoint::Exact(b)) => a == b,
            _ => proj_distance(&self.to_complex(), &other.to_complex()) < tol,
        }
    }

    fn sort_key_cmp(&self, other: &ProjPoint) -> Ordering {
        match (self, other) {
            (ProjPoint::Exact(a), ProjPoint::Exact(b)) => a.cmp(b),
            (ProjPoint::Exact(_), ProjPoint::Inexact(_)) => Ordering::Less,
            (ProjPoint::Inexact(_), ProjPoint::Exact(_)) => Ordering::Greater,
            (ProjPoint::Inexact(a), ProjPoint::Inexact(b)) => {
                for (x, y) in a.iter().zip(b) {
                    let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            }
        }
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ProjPoint::Exact(a), ProjPoint::Exact(b)) => a == b,
            (ProjPoint::Inexact(a), ProjPoint::Inexact(b)) => a == b,
            _ => false,
        }
    }
}

fn fmt_complex(c: &C64) -> String {
    let re = if c.re.abs() < 5e-16 { 0.0 } else { c.re };
    if c.im.abs() < 5e-16 {
        format!("{re}")
    } else if c.im < 0.0 {
        format!("{re}-{}i", -c.im)
    } else {
        format!("{re}+{}i", c.im)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self {
            ProjPoint::Exact(v) => v.iter().map(|c| c.to_string()).collect(),
            ProjPoint::Inexact(v) => v.iter().map(fmt_complex).collect(),
        };
        write!(f, "[{}]", parts.join(":"))
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    /// Irreducible normalized form: a curve on P^2, a conjugate point set on P^1.
    Hypersurface(HomogPoly),
    /// A point of P^2 (codimension two).
    Point(ProjPoint),
}

impl Component {
    /// Normalizes the form. Irreducibility is the caller's responsibility.
    pub fn hypersurface(p: &HomogPoly) -> Self {
        Component::Hypersurface(p.normalized())
    }

    pub fn nvars(&self) -> usize {
        match self {
            Component::Hypersurface(p) => p.nvars(),
            Component::Point(p) => p.dim(),
        }
    }

    pub fn codim(&self) -> usize {
        match self {
            Component::Hypersurface(_) => 1,
            Component::Point(p) => p.dim() - 1,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Component::Hypersurface(_) => true,
            Component::Point(p) => p.is_exact(),
        }
    }

    pub fn form(&self) -> Option<&HomogPoly> {
        match self {
            Component::Hypersurface(p) => Some(p),
            Component::Point(_) => None,
        }
    }

    /// Whether `p` lies on this component.
    pub fn contains_point(&self, p: &ProjPoint, tol: f64) -> bool {
        match self {
            Component::Hypersurface(c) => match p {
                ProjPoint::Exact(_) => c.eval(&p.to_rationals().unwrap()).is_zero(),
                ProjPoint::Inexact(_) => relative_residual(c, &p.to_complex()) < tol,
            },
            Component::Point(q) => q.same_as(p, tol),
        }
    }

    /// Whether the component is contained in `V(h)`.
    pub fn lies_in(&self, h: &HomogPoly, tol: f64) -> bool {
        match self {
            Component::Hypersurface(c) => c.divides(h),
            Component::Point(p) => Component::Hypersurface(h.clone()).contains_point(p, tol),
        }
    }

    pub fn same_as(&self, other: &Component, tol: f64) -> bool {
        match (self, other) {
            (Component::Hypersurface(a), Component::Hypersurface(b)) => a == b,
            (Component::Point(a), Component::Point(b)) => a.same_as(b, tol),
            _ => false,
        }
    }

    pub fn sort_cmp(&self, other: &Component) -> Ordering {
        match (self, other) {
            (Component::Hypersurface(a), Component::Hypersurface(b)) => cmp_forms(a, b),
            (Component::Hypersurface(_), Component::Point(_)) => Ordering::Less,
            (Component::Point(_), Component::Hypersurface(_)) => Ordering::Greater,
            (Component::Point(a), Component::Point(b)) => a.sort_key_cmp(b),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Hypersurface(p) if p.nvars() == 2 && p.degree() == 1 => {
                // the rational point of P^1 cut out by a linear form
                let a = p.coeff(&Monomial([1, 0, 0]));
                let b = p.coeff(&Monomial([0, 1, 0]));
                write!(f, "{}", ProjPoint::from_rationals(&[-b, a]))
            }
            Component::Hypersurface(p) => write!(f, "{p}"),
            Component::Point(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Component {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `|c(x)| / ‖c‖_1` at the unit max-norm representative of `x`.
pub fn relative_residual(c: &HomogPoly, x: &[C64]) -> f64 {
    let n = numeric::max_norm(x);
    let y: Vec<C64> = x.iter().map(|v| v / n).collect();
    c.eval_complex(&y).norm() / c.coeff_l1()
}

/// A duplicate-free, sorted list of components in one ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicSet {
    nvars: usize,
    components: Vec<Component>,
}

impl AlgebraicSet {
    pub fn empty(nvars: usize) -> Self {
        AlgebraicSet { nvars, components: Vec::new() }
    }

    /// Sorts and removes duplicates (inexact points within `tol` coincide).
    pub fn from_components(nvars: usize, comps: Vec<Component>, tol: f64) -> Self {
        let mut s = AlgebraicSet::empty(nvars);
        for c in comps {
            s.insert(c, tol);
        }
        s
    }

    /// Returns false if an equal component was already present.
    pub fn insert(&mut self, c: Component, tol: f64) -> bool {
        assert_eq!(c.nvars(), self.nvars, "ambient dimension mismatch");
        if self.components.iter().any(|x| x.same_as(&c, tol)) {
            return false;
        }
        let pos = self.components.partition_point(|x| x.sort_cmp(&c) == Ordering::Less);
        self.components.insert(pos, c);
        true
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Component> {
        self.components.iter()
    }

    pub fn contains_component(&self, c: &Component, tol: f64) -> bool {
        self.components.iter().any(|x| x.same_as(c, tol))
    }

    pub fn union(&self, other: &AlgebraicSet, tol: f64) -> AlgebraicSet {
        let mut s = self.clone();
        for c in &other.components {
            s.insert(c.clone(), tol);
        }
        s
    }

    pub fn is_exact(&self) -> bool {
        self.components.iter().all(Component::is_exact)
    }

    /// Product of the hypersurface components.
    pub fn hypersurface_product(&self) -> HomogPoly {
        self.components
            .iter()
            .filter_map(Component::form)
            .fold(HomogPoly::constant(self.nvars, Rational::one()), |acc, p| acc.mul(p))
    }
}

impl Serialize for AlgebraicSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.components.iter().map(|c| c.to_string()))
    }
}

/// Point membership: exact vanishing for exact points (`tol` must be 0),
/// relative residual below `tol` for inexact points.
pub fn contains(s: &AlgebraicSet, p: &ProjPoint, tol: f64) -> bool {
    debug_assert_eq!(s.nvars(), p.dim());
    s.iter().any(|c| c.contains_point(p, tol))
}

/// Component-wise equality under normal form. Fails on inexact data.
pub fn set_equal(a: &AlgebraicSet, b: &AlgebraicSet) -> Result<bool> {
    if !a.is_exact() || !b.is_exact() {
        return Err(Error::Inexact("set_equal".into()));
    }
    Ok(a.components == b.components)
}

/// Image of a single point.
pub fn point_image(f: &Endomorphism, p: &ProjPoint) -> ProjPoint {
    match p {
        ProjPoint::Exact(_) => ProjPoint::from_rationals(&f.apply_exact(&p.to_rationals().unwrap())),
        ProjPoint::Inexact(x) => ProjPoint::from_complex(&f.apply_complex(x)),
    }
}

/// Image of a component under `f`.
pub fn component_image(f: &Endomorphism, c: &Component, cap: u32) -> Result<Component> {
    match c {
        Component::Hypersurface(_) => curve_image(f, c, cap),
        Component::Point(p) => Ok(Component::Point(point_image(f, p))),
    }
}

fn reduce_mul(a: &HomogPoly, b: &HomogPoly, c: &HomogPoly) -> HomogPoly {
    a.mul(b).reduce(c)
}

/// Image of an irreducible hypersurface component.
///
/// The image equation is the form `G` of least degree with `c | G∘f`. Each
/// product of powers of the `f_i` is reduced modulo `c` (the remainder is a
/// normal form for the principal ideal), so the coefficients of `G` span
/// the kernel of an exact linear map.
pub fn curve_image(f: &Endomorphism, c: &Component, cap: u32) -> Result<Component> {
    let Component::Hypersurface(c) = c else {
        return Err(Error::Precondition("curve_image needs a hypersurface component".into()));
    };
    let nvars = c.nvars();
    if nvars != f.nvars() {
        return Err(Error::Arity("component and map live in different spaces".into()));
    }
    let forms = f.forms();
    let max_deg = if nvars == 3 { f.degree() * c.degree() } else { c.degree() };
    let one = HomogPoly::constant(nvars, Rational::one());
    let mut powers: Vec<Vec<HomogPoly>> = forms.iter().map(|fi| vec![one.clone(), fi.reduce(c)]).collect();
    for e in 1..=max_deg {
        for (i, fi) in forms.iter().enumerate() {
            while powers[i].len() <= e as usize {
                let next = reduce_mul(powers[i].last().unwrap(), fi, c);
                powers[i].push(next);
            }
        }
        let monos = HomogPoly::monomials_of_degree(nvars, e);
        let images: Vec<HomogPoly> = monos
            .iter()
            .map(|m| {
                let mut acc = powers[0][m.0[0] as usize].clone();
                for i in 1..nvars {
                    acc = reduce_mul(&acc, &powers[i][m.0[i] as usize], c);
                }
                acc
            })
            .collect();
        let mut row_of: HashMap<Monomial, usize> = HashMap::new();
        for img in &images {
            for (m, _) in img.terms() {
                let n = row_of.len();
                row_of.entry(*m).or_insert(n);
            }
        }
        let mut rows = vec![vec![Rational::zero(); monos.len()]; row_of.len()];
        for (j, img) in images.iter().enumerate() {
            for (m, v) in img.terms() {
                rows[row_of[m]][j] = v.clone();
            }
        }
        let kernel = nullspace(&rows, monos.len());
        if kernel.is_empty() {
            continue;
        }
        if kernel.len() > 1 {
            return Err(Error::Degenerate(format!("image of {c} is not a single hypersurface")));
        }
        let g = HomogPoly::from_terms(nvars, monos.iter().copied().zip(kernel[0].iter().cloned()))?;
        let fac = factor(&g, cap)?;
        if fac.factors.len() != 1 || fac.factors[0].1 != 1 {
            return Err(Error::Degenerate(format!("image equation {g} of {c} is reducible")));
        }
        let image = g.normalized();
        let covering = if nvars == 3 { f.degree() * c.degree() } else { c.degree() };
        assert_eq!(covering % image.degree(), 0, "image degree must divide the pushforward degree");
        return Ok(Component::Hypersurface(image));
    }
    Err(Error::Degenerate(format!("no image equation of degree at most {max_deg} for {c}")))
}

/// Evaluates `y_b f_a(x) - y_a f_b(x)` style cross products with `y` fixed.
fn cross_product(forms: &[HomogPoly], pivot: usize, other: usize, y: &[Rational]) -> HomogPoly {
    forms[pivot].scale(&y[other]).sub(&forms[other].scale(&y[pivot]))
}

/// The elimination route for curve images on P^2: the Macaulay resultant
/// in `x` of `c`, `y_1 f_0 - y_0 f_1`, `y_2 f_0 - y_0 f_2` is interpolated
/// as a form in `y`. Its irreducible factors are then filtered by
/// sampling points of `V(c)`. Used to cross-check [`curve_image`].
pub fn curve_image_by_elimination(f: &Endomorphism, c: &Component, cap: u32) -> Result<Component> {
    let Component::Hypersurface(c) = c else {
        return Err(Error::Precondition("curve_image needs a hypersurface component".into()));
    };
    if f.nvars() != 3 || c.nvars() != 3 {
        return Err(Error::Arity("elimination route is for P^2".into()));
    }
    let forms = f.forms();
    let big = 2 * f.degree() * c.degree();
    // dehomogenize y at the pivot and interpolate on the simplex grid
    for pivot in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&i| i != pivot).collect();
        let grid: Vec<(u32, u32)> =
            (0..=big).flat_map(|a| (0..=big - a).map(move |b| (a, b))).collect();
        let monos: Vec<(u32, u32)> = grid.clone();
        let mut rows = Vec::with_capacity(grid.len());
        for &(a, b) in &grid {
            let mut y = vec![Rational::zero(); 3];
            y[pivot] = Rational::one();
            y[others[0]] = Rational::from_integer(a.into());
            y[others[1]] = Rational::from_integer(b.into());
            let system =
                [c.clone(), cross_product(forms, pivot, others[0], &y), cross_product(forms, pivot, others[1], &y)];
            let val = if system.iter().any(HomogPoly::is_zero) {
                Rational::zero()
            } else {
                crate::algebra::resultant(&system)?
            };
            let mut row: Vec<Rational> = monos
                .iter()
                .map(|&(i, j)| Rational::from_integer(BigInt::from(a).pow(i) * BigInt::from(b).pow(j)))
                .collect();
            row.push(-val);
            rows.push(row);
        }
        let kernel = nullspace(&rows, monos.len() + 1);
        let sol = kernel.iter().find(|v| !v.last().unwrap().is_zero()).expect("simplex grid is unisolvent");
        let scale = sol.last().unwrap().clone();
        let terms = monos.iter().zip(sol.iter()).filter(|(_, v)| !v.is_zero()).map(|(&(i, j), v)| {
            let mut e = [0u32; 3];
            e[others[0]] = i;
            e[others[1]] = j;
            e[pivot] = big - i - j;
            (Monomial(e), v / &scale)
        });
        let r = HomogPoly::from_terms(3, terms)?;
        if r.is_zero() {
            continue;
        }
        let candidates = factor(&r, cap.max(big))?.distinct();
        let samples = sample_curve_points(c, (10 * c.degree()) as usize, 0x1ea);
        let images: Vec<Vec<C64>> = samples.iter().map(|x| f.apply_complex(x)).collect();
        let keep: Vec<HomogPoly> = candidates
            .into_iter()
            .filter(|g| images.iter().all(|y| relative_residual(g, y) < 1e-8))
            .collect();
        return match keep.as_slice() {
            [g] => Ok(Component::Hypersurface(g.normalized())),
            _ => Err(Error::Degenerate(format!("{} candidate image factors survive sampling", keep.len()))),
        };
    }
    Err(Error::Degenerate(format!("every elimination pivot vanishes identically for {c}")))
}

/// Points of a plane curve cut out by random rational lines.
pub fn sample_curve_points(c: &HomogPoly, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vec<i64> = (0..3).map(|_| rng.gen_range(-9..=9)).collect();
        let q: Vec<i64> = (0..3).map(|_| rng.gen_range(-9..=9)).collect();
        // x = p u + q s with binary variables (s, u) = (z, w)
        let line: Vec<HomogPoly> = (0..3)
            .map(|i| {
                HomogPoly::var(2, 0).scale(&Rational::from_integer(q[i].into())).add(
                    &HomogPoly::var(2, 1).scale(&Rational::from_integer(p[i].into())),
                )
            })
            .collect();
        let cross = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
        if cross == [0, 0, 0] {
            continue;
        }
        let restricted = c.compose(&line);
        if restricted.is_zero() || restricted.coeff(&Monomial([c.degree(), 0, 0])).is_zero() {
            continue;
        }
        let q1 = binary_to_qpoly(&restricted);
        let coeffs: Vec<C64> = q1.0.iter().map(|v| C64::new(rat_to_f64(v), 0.0)).collect();
        for s in poly_roots(&coeffs) {
            let x: Vec<C64> = (0..3).map(|i| s * q[i] as f64 + p[i] as f64).collect();
            if out.len() < count {
                out.push(numeric::normalize(&x));
            }
        }
    }
    out
}

/// An integer linear change of coordinates `x = M x'`.
struct Shear {
    m: [[i64; 3]; 3],
}

impl Shear {
    fn random(rng: &mut ChaCha8Rng, attempt: usize) -> Self {
        if attempt == 0 {
            return Shear { m: [[1, 0, 2], [0, 1, 3], [0, 0, 1]] };
        }
        loop {
            let mut m = [[0i64; 3]; 3];
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(-4..=4);
                }
            }
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            if det != 0 {
                return Shear { m };
            }
        }
    }

    fn forms(&self) -> Vec<HomogPoly> {
        (0..3)
            .map(|i| {
                (0..3).fold(HomogPoly::zero(3), |acc, j| {
                    let term = HomogPoly::var(3, j).scale(&Rational::from_integer(self.m[i][j].into()));
                    if acc.is_zero() {
                        term
                    } else if term.is_zero() {
                        acc
                    } else {
                        acc.add(&term)
                    }
                })
            })
            .collect()
    }

    fn apply<T: Clone + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>>(&self, x: &[T]) -> Vec<T> {
        (0..3)
            .map(|i| x[0].clone() * self.m[i][0] as f64 + x[1].clone() * self.m[i][1] as f64 + x[2].clone() * self.m[i][2] as f64)
            .collect()
    }

    fn apply_exact(&self, x: &[Rational]) -> Vec<Rational> {
        (0..3)
            .map(|i| (0..3).map(|j| &x[j] * Rational::from_integer(self.m[i][j].into())).sum())
            .collect()
    }
}

/// Coefficients in `t`, descending, of `p(z0, w0, t)` for exact `(z0, w0)`.
fn t_coeffs_exact(p: &HomogPoly, z0: &Rational, w0: &Rational) -> Vec<Rational> {
    let d = p.degree() as usize;
    let mut v = vec![Rational::zero(); d + 1];
    for (m, c) in p.terms() {
        let mut x = c.clone();
        for _ in 0..m.0[0] {
            x *= z0;
        }
        for _ in 0..m.0[1] {
            x *= w0;
        }
        v[d - m.0[2] as usize] += x;
    }
    v
}

fn t_coeffs_complex(p: &HomogPoly, z0: C64, w0: C64) -> Vec<C64> {
    let d = p.degree() as usize;
    let mut v = vec![C64::new(0.0, 0.0); d + 1];
    for (m, c) in p.terms() {
        v[m.0[2] as usize] += z0.powu(m.0[0]) * w0.powu(m.0[1]) * rat_to_f64(c);
    }
    v
}

struct GenericityFailure;

/// Intersection points of two plane curves without common components, with
/// multiplicities summing to `deg a · deg b`. Rational points are exact.
pub fn curve_intersect(a: &Component, b: &Component, tol: f64) -> Result<Vec<(ProjPoint, u32)>> {
    let (Some(a), Some(b)) = (a.form(), b.form()) else {
        return Err(Error::Precondition("curve_intersect needs two curves".into()));
    };
    if a.nvars() != 3 || b.nvars() != 3 {
        return Err(Error::Arity("curve_intersect works on P^2".into()));
    }
    if !gcd(a, b).is_constant() {
        return Err(Error::Precondition(format!("{a} and {b} share a component")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..12 {
        let shear = Shear::random(&mut rng, attempt);
        if let Ok(points) = intersect_with_shear(a, b, &shear, tol) {
            let total: u32 = points.iter().map(|(_, m)| m).sum();
            assert_eq!(total, a.degree() * b.degree(), "Bezout count");
            return Ok(points);
        }
    }
    Err(Error::SolverShortfall(format!("could not certify the intersection of {a} and {b}")))
}

fn intersect_with_shear(
    a: &HomogPoly,
    b: &HomogPoly,
    shear: &Shear,
    tol: f64,
) -> std::result::Result<Vec<(ProjPoint, u32)>, GenericityFailure> {
    let subs = shear.forms();
    let a1 = a.compose(&subs);
    let b1 = b.compose(&subs);
    let top = |p: &HomogPoly| p.coeff(&Monomial([0, 0, p.degree()]));
    if top(&a1).is_zero() || top(&b1).is_zero() {
        return Err(GenericityFailure);
    }
    let n = a.degree() * b.degree();
    // R(u) = Res_t(a1(u, 1, t), b1(u, 1, t)) has degree at most n.
    let xs: Vec<Rational> = (0..=n as i64).map(|u| Rational::from_integer(u.into())).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|u| sylvester(&t_coeffs_exact(&a1, u, &Rational::one()), &t_coeffs_exact(&b1, u, &Rational::one())))
        .collect();
    let r = QPoly::interpolate(&xs, &ys);
    if r.is_zero() {
        return Err(GenericityFailure);
    }
    let rform = crate::algebra::gcd::qpoly_to_binary(&r, n);
    let fac = factor(&rform, n.max(1)).map_err(|_| GenericityFailure)?;
    let mut out = Vec::new();
    for (phi, mult) in &fac.factors {
        let za = phi.coeff(&Monomial([1, 0, 0]));
        let wa = phi.coeff(&Monomial([0, 1, 0]));
        if phi.degree() == 1 {
            // root (z0 : w0) = (-wa : za)
            let (z0, w0) = (-wa, za);
            let ga = QPoly(t_coeffs_exact(&a1, &z0, &w0).into_iter().rev().collect()).trimmed();
            let gb = QPoly(t_coeffs_exact(&b1, &z0, &w0).into_iter().rev().collect()).trimmed();
            let g = ga.gcd(&gb);
            let rad = g.div_rem(&g.gcd(&g.derivative())).0;
            if rad.deg() != 1 {
                return Err(GenericityFailure);
            }
            let t0 = -rad.coeff(0) / rad.coeff(1);
            let x = shear.apply_exact(&[z0, w0, t0]);
            out.push((ProjPoint::from_rationals(&x), *mult));
        } else {
            let q = binary_to_qpoly(phi);
            let coeffs: Vec<C64> = q.0.iter().map(|v| C64::new(rat_to_f64(v), 0.0)).collect();
            for u in poly_roots(&coeffs) {
                let one = C64::new(1.0, 0.0);
                let ta = poly_roots(&t_coeffs_complex(&a1, u, one));
                let bc = t_coeffs_complex(&b1, u, one);
                let scale_b: f64 = bc.iter().map(|v| v.norm()).sum::<f64>();
                let eval_b = |t: C64| bc.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c);
                let close: Vec<C64> = ta
                    .iter()
                    .copied()
                    .filter(|&t| eval_b(t).norm() / (scale_b * (1.0 + t.norm()).powi(b.degree() as i32)) < 1e-6)
                    .collect();
                let distinct = numeric::cluster(&close.iter().map(|t| vec![*t, one]).collect::<Vec<_>>(), 1e-5);
                if distinct.len() != 1 {
                    return Err(GenericityFailure);
                }
                let t0 = close[distinct[0][0]];
                let x = shear.apply(&[u, one, t0]);
                let sys = numeric::homotopy::Forms(vec![
                    numeric::NumPoly::from_homog(a),
                    numeric::NumPoly::from_homog(b),
                ]);
                let x = numeric::homotopy::newton_refine(&sys, &x, 8);
                if relative_residual(a, &x) > tol || relative_residual(b, &x) > tol {
                    return Err(GenericityFailure);
                }
                out.push((ProjPoint::from_complex(&x), *mult));
            }
        }
    }
    out.sort_by(|x, y| x.0.sort_key_cmp(&y.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_FACTOR_CAP;

    fn curve(s: &str) -> Component {
        Component::hypersurface(&HomogPoly::parse(s, 3).unwrap())
    }

    fn endo(src: &[&str]) -> Endomorphism {
        let nv = src.len();
        Endomorphism::new(src.iter().map(|s| HomogPoly::parse(s, nv).unwrap()).collect()).unwrap()
    }

    #[test]
    fn exact_points_are_primitive() {
        let p = ProjPoint::from_rationals(&[Rational::new((-2).into(), 3.into()), Rational::from_integer(4.into())]);
        assert_eq!(p, ProjPoint::from_ints(&[1, -6]));
        assert_eq!(p.to_string(), "[1:-6]");
    }

    #[test]
    fn power_map_fixes_coordinate_line() {
        let f = endo(&["z^2", "w^2", "t^2"]);
        assert_eq!(curve_image(&f, &curve("z"), DEFAULT_FACTOR_CAP).unwrap(), curve("z"));
    }

    #[test]
    fn nilpotent_map_sends_line_to_conic() {
        let f = endo(&["z^2 - w*t", "w^2", "t^2"]);
        assert_eq!(curve_image(&f, &curve("z"), DEFAULT_FACTOR_CAP).unwrap(), curve("z^2 - w*t"));
        assert_eq!(curve_image(&f, &curve("z^2 - w*t"), DEFAULT_FACTOR_CAP).unwrap(), curve("z"));
    }

    #[test]
    fn elimination_route_agrees() {
        let f = endo(&["z^2 - w*t", "w^2", "t^2"]);
        for c in ["z", "w", "t", "z^2 - w*t", "z + w + t"] {
            let a = curve_image(&f, &curve(c), DEFAULT_FACTOR_CAP).unwrap();
            let b = curve_image_by_elimination(&f, &curve(c), DEFAULT_FACTOR_CAP).unwrap();
            assert_eq!(a, b, "image of {c}");
        }
    }

    #[test]
    fn g3_line_maps_to_cusp() {
        let g = endo(&["z^3 - w^2*t", "-w^3", "-t^3"]);
        assert_eq!(curve_image(&g, &curve("z"), DEFAULT_FACTOR_CAP).unwrap(), curve("z^3 - w^2*t"));
        assert_eq!(curve_image_by_elimination(&g, &curve("z"), DEFAULT_FACTOR_CAP).unwrap(), curve("z^3 - w^2*t"));
    }

    #[test]
    fn p1_point_orbits() {
        let f = endo(&["z^2 - 2*w^2", "w^2"]);
        let zero = Component::hypersurface(&HomogPoly::parse("z", 2).unwrap());
        let img = curve_image(&f, &zero, DEFAULT_FACTOR_CAP).unwrap();
        assert_eq!(img, Component::hypersurface(&HomogPoly::parse("z + 2*w", 2).unwrap()));
        assert_eq!(img.to_string(), "[2:-1]");
        let pair = Component::hypersurface(&HomogPoly::parse("z^2 - 3*w^2", 2).unwrap());
        // z ↦ z^2 - 2 sends ±√3 to 1
        assert_eq!(
            curve_image(&f, &pair, DEFAULT_FACTOR_CAP).unwrap(),
            Component::hypersurface(&HomogPoly::parse("z - w", 2).unwrap())
        );
    }

    #[test]
    fn line_intersections() {
        let zw = curve_intersect(&curve("z"), &curve("w"), 1e-10).unwrap();
        assert_eq!(zw, vec![(ProjPoint::from_ints(&[0, 0, 1]), 1)]);
        let wt = curve_intersect(&curve("w"), &curve("t"), 1e-10).unwrap();
        assert_eq!(wt, vec![(ProjPoint::from_ints(&[1, 0, 0]), 1)]);
    }

    #[test]
    fn line_meets_conic() {
        let pts = curve_intersect(&curve("z"), &curve("z^2 - w*t"), 1e-10).unwrap();
        assert_eq!(pts, vec![(ProjPoint::from_ints(&[0, 0, 1]), 1), (ProjPoint::from_ints(&[0, 1, 0]), 1)]);
        let tangent = curve_intersect(&curve("w"), &curve("z^2 - w*t"), 1e-10).unwrap();
        assert_eq!(tangent, vec![(ProjPoint::from_ints(&[0, 0, 1]), 2)]);
    }

    #[test]
    fn irrational_intersections_are_inexact() {
        let pts = curve_intersect(&curve("t"), &curve("z^2 - 2*w^2 + w*t"), 1e-10).unwrap();
        assert_eq!(pts.len(), 2);
        for (p, m) in &pts {
            assert_eq!(*m, 1);
            assert!(!p.is_exact());
            let x = p.to_complex();
            assert!((x[0].norm() - 1.0).abs() < 1e-12);
            assert!(((x[1] / x[0]).norm() - 0.5f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn contains_examples() {
        let zwt = AlgebraicSet::from_components(3, vec![curve("z"), curve("w"), curve("t")], 0.0);
        assert!(contains(&zwt, &ProjPoint::from_ints(&[0, 1, 1]), 0.0));
        assert!(!contains(&zwt, &ProjPoint::from_ints(&[1, 1, 1]), 0.0));
        let conic = AlgebraicSet::from_components(3, vec![curve("z^2 - w*t")], 0.0);
        let p = ProjPoint::from_complex(&[C64::new(0.5, 0.0), C64::new(0.25, 0.0), C64::new(1.0, 0.0)]);
        assert!(contains(&conic, &p, 1e-10));
    }

    #[test]
    fn set_equality_ignores_order_and_scale() {
        let a = AlgebraicSet::from_components(3, vec![curve("z"), curve("w")], 0.0);
        let b = AlgebraicSet::from_components(3, vec![curve("w"), curve("2*z")], 0.0);
        let c = AlgebraicSet::from_components(3, vec![curve("z"), curve("t")], 0.0);
        assert!(set_equal(&a, &b).unwrap());
        assert!(!set_equal(&a, &c).unwrap());
    }
}

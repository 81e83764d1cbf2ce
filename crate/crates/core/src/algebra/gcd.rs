//! Gcd and square-free decomposition of homogeneous forms.
//!
//! Forms are stripped of monomial content and dehomogenized (at `t` for
//! ternary forms, at `w` for binary ones); the bivariate gcd is a primitive
//! pseudo-remainder sequence in `z` over `Q[w]`.

use num_traits::{One, Zero};

use super::poly::{HomogPoly, Monomial};
use super::univariate::QPoly;
use super::Rational;

/// Polynomial in `z` whose coefficients are polynomials in `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly(pub Vec<QPoly>);

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly(Vec::new())
    }

    pub fn trimmed(mut self) -> Self {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg_z(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn deg_w(&self) -> usize {
        self.0.iter().map(QPoly::deg).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| i + c.deg())
            .max()
            .unwrap_or(0)
    }

    pub fn lc(&self) -> QPoly {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> QPoly {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let n = self.0.len().max(o.0.len());
        BiPoly((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect()).trimmed()
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        let n = self.0.len().max(o.0.len());
        BiPoly((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect()).trimmed()
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero();
        }
        let mut out = vec![QPoly::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        BiPoly(out).trimmed()
    }

    pub fn scale_w(&self, c: &QPoly) -> BiPoly {
        BiPoly(self.0.iter().map(|a| a.mul(c)).collect()).trimmed()
    }

    /// Multiply by `c * z^k`.
    pub fn shift_mul(&self, c: &QPoly, k: usize) -> BiPoly {
        let mut out = vec![QPoly::zero(); k];
        out.extend(self.0.iter().map(|a| a.mul(c)));
        BiPoly(out).trimmed()
    }

    /// Monic gcd of the coefficients in `Q[w]`.
    pub fn content(&self) -> QPoly {
        self.0.iter().fold(QPoly::zero(), |g, c| g.gcd(c))
    }

    pub fn div_w(&self, c: &QPoly) -> BiPoly {
        BiPoly(
            self.0
                .iter()
                .map(|a| {
                    let (q, r) = a.div_rem(c);
                    debug_assert!(r.is_zero());
                    q
                })
                .collect(),
        )
        .trimmed()
    }

    pub fn primitive_part(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        let p = self.div_w(&c);
        // fix the scalar so that lc(lc) = 1
        let s = p.lc().lc();
        BiPoly(p.0.iter().map(|a| a.scale(&s.recip())).collect())
    }

    /// Pseudo-remainder by `b` in `z`.
    pub fn prem(&self, b: &BiPoly) -> BiPoly {
        let mut r = self.clone();
        let lb = b.lc();
        let db = b.deg_z();
        while !r.is_zero() && r.deg_z() >= db {
            let k = r.deg_z() - db;
            let lr = r.lc();
            r = r.scale_w(&lb).sub(&b.shift_mul(&lr, k));
        }
        r
    }

    /// Division by a polynomial whose leading coefficient in `z` is a
    /// nonzero constant. Returns `None` if the remainder is nonzero.
    pub fn div_exact_monic(&self, d: &BiPoly) -> Option<BiPoly> {
        let lc = d.lc();
        assert_eq!(lc.deg(), 0, "divisor must have constant leading coefficient in z");
        let inv = lc.lc().recip();
        let mut r = self.clone();
        let dd = d.deg_z();
        if r.is_zero() {
            return Some(BiPoly::zero());
        }
        if r.deg_z() < dd {
            return None;
        }
        let mut q = vec![QPoly::zero(); r.deg_z() - dd + 1];
        while !r.is_zero() && r.deg_z() >= dd {
            let k = r.deg_z() - dd;
            let c = r.lc().scale(&inv);
            r = r.sub(&d.shift_mul(&c, k));
            q[k] = c;
            if r.0.len() > dd + k && !r.0[dd + k].is_zero() {
                return None;
            }
        }
        r.is_zero().then(|| BiPoly(q).trimmed())
    }

    pub fn from_homog(p: &HomogPoly) -> BiPoly {
        assert_eq!(p.nvars(), 3);
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for (m, c) in p.terms() {
            let a = m.0[0] as usize;
            let b = m.0[1] as usize;
            if out.len() <= a {
                out.resize(a + 1, Vec::new());
            }
            if out[a].len() <= b {
                out[a].resize(b + 1, Rational::zero());
            }
            out[a][b] += c;
        }
        BiPoly(out.into_iter().map(|v| QPoly(v).trimmed()).collect()).trimmed()
    }

    /// Homogenize with `t` to the given degree.
    pub fn to_homog(&self, degree: u32) -> HomogPoly {
        let mut terms = Vec::new();
        for (a, c) in self.0.iter().enumerate() {
            for (b, x) in c.0.iter().enumerate() {
                if !x.is_zero() {
                    let rest = degree as usize - a - b;
                    terms.push((Monomial([a as u32, b as u32, rest as u32]), x.clone()));
                }
            }
        }
        HomogPoly::from_terms(3, terms).expect("homogenized terms share a degree")
    }

    pub fn gcd(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() {
            return o.primitive_part_with_content();
        }
        if o.is_zero() {
            return self.primitive_part_with_content();
        }
        let ca = self.content();
        let cb = o.content();
        let cont = ca.gcd(&cb);
        let mut a = self.div_w(&ca);
        let mut b = o.div_w(&cb);
        if a.deg_z() < b.deg_z() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.deg_z() == 0 {
                a = BiPoly(vec![QPoly::one()]);
                break;
            }
            let r = a.prem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale_w(&cont)
    }

    fn primitive_part_with_content(&self) -> BiPoly {
        let c = self.content();
        self.primitive_part().scale_w(&c)
    }
}

/// Binary form dehomogenized at `w = 1`.
pub fn binary_to_qpoly(p: &HomogPoly) -> QPoly {
    assert_eq!(p.nvars(), 2);
    let mut v = vec![Rational::zero(); p.degree() as usize + 1];
    for (m, c) in p.terms() {
        v[m.0[0] as usize] += c;
    }
    QPoly(v).trimmed()
}

pub fn qpoly_to_binary(q: &QPoly, degree: u32) -> HomogPoly {
    let terms = q
        .0
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(a, c)| (Monomial([a as u32, degree - a as u32, 0]), c.clone()));
    HomogPoly::from_terms(2, terms).expect("homogenized terms share a degree")
}

fn mono_poly(nvars: usize, m: &Monomial) -> HomogPoly {
    HomogPoly::monomial(nvars, *m, Rational::one())
}

/// Normalized gcd of two forms (zero only if both are zero).
pub fn gcd(p: &HomogPoly, q: &HomogPoly) -> HomogPoly {
    let nvars = p.nvars();
    if p.is_zero() {
        return q.normalized();
    }
    if q.is_zero() {
        return p.normalized();
    }
    let mp = p.monomial_content();
    let mq = q.monomial_content();
    let m = mp.gcd(&mq);
    let p1 = p.div_monomial(&mp);
    let q1 = q.div_monomial(&mq);
    let g = if nvars == 2 {
        let g = binary_to_qpoly(&p1).gcd(&binary_to_qpoly(&q1));
        qpoly_to_binary(&g, g.deg() as u32)
    } else {
        let g = BiPoly::from_homog(&p1).gcd(&BiPoly::from_homog(&q1));
        g.to_homog(g.total_degree() as u32)
    };
    g.mul(&mono_poly(nvars, &m)).normalized()
}

/// Product of the distinct irreducible factors, normalized.
pub fn radical(p: &HomogPoly) -> HomogPoly {
    assert!(!p.is_zero());
    let nvars = p.nvars();
    let m = p.monomial_content();
    let core = p.div_monomial(&m);
    let mut g = core.clone();
    for i in 0..nvars {
        g = gcd(&g, &core.derivative(i));
        if g.is_constant() {
            break;
        }
    }
    let mut rad = core.div_exact(&g).expect("gcd divides");
    for i in 0..nvars {
        if m.0[i] > 0 {
            rad = rad.mul(&HomogPoly::var(nvars, i));
        }
    }
    rad.normalized()
}

/// Square-free decomposition of a form without monomial content:
/// `p = c * ∏ s_i^i` with each `s_i` square-free and pairwise coprime.
/// Returns the nonconstant `(s_i, i)`.
pub fn squarefree_parts(p: &HomogPoly) -> Vec<(HomogPoly, u32)> {
    let mut rads = Vec::new();
    let mut q = p.normalized();
    while !q.is_constant() {
        let r = radical(&q);
        q = q.div_exact(&r).expect("radical divides");
        rads.push(r);
    }
    let mut out = Vec::new();
    for i in 0..rads.len() {
        let s = if i + 1 < rads.len() {
            rads[i].div_exact(&rads[i + 1]).expect("radicals are nested")
        } else {
            rads[i].clone()
        };
        if !s.is_constant() {
            out.push((s.normalized(), i as u32 + 1));
        }
    }
    out
}

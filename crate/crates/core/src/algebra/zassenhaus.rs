//! Univariate factorization over Z: factor modulo a prime (distinct-degree
//! plus Cantor-Zassenhaus), Hensel-lift to a power of the prime exceeding a
//! coefficient bound, then recombine lifted factors by trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::univariate::{invmod, is_prime, sym_mod, zpoly_mul, zpoly_trim, FpPoly, QPoly};
use super::Rational;

/// Irreducible factors of a primitive, square-free integer polynomial of
/// positive degree. Factors are primitive with positive leading coefficient.
pub fn factor_squarefree(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let f = zpoly_trim(f.to_vec());
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f];
    }
    let lc = f[n].clone();

    // Pick the prime giving the fewest modular factors among a few candidates.
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut candidate = 1009u64;
    let mut tried = 0;
    while tried < 4 {
        candidate += 2;
        if !is_prime(candidate) {
            continue;
        }
        let p = candidate;
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = FpPoly::from_bigints(p, &f);
        if fp.gcd(&fp.derivative()).deg() != 0 {
            continue;
        }
        tried += 1;
        let facs = factor_mod_p(&fp.monic(), p ^ 0x5eed);
        if facs.len() == 1 {
            return vec![f];
        }
        if best.as_ref().map_or(true, |(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
    }
    let (p, modular) = best.unwrap();

    // Coefficient bound: any factor g of f satisfies |lc * g|_inf <= |lc| 2^n ||f||_2.
    let norm2: BigInt = f.iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound = lc.abs() * (BigInt::one() << n) * norm2;
    let target = bound * 2 + 1;
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    let mut k = 1;
    while modulus <= target {
        modulus *= &pb;
        k += 1;
    }
    let lifted = hensel_lift(&f, &modular, p, k);
    recombine(f, lifted, &modulus)
}

/// Monic irreducible factors of a monic square-free polynomial over F_p.
pub fn factor_mod_p(f: &FpPoly, seed: u64) -> Vec<FpPoly> {
    let p = f.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut i = 0u32;
    while rest.deg() >= 2 * (i as usize + 1) {
        i += 1;
        h = h.powmod_poly(p as u128, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            equal_degree_split(&g, i as usize, &mut rng, &mut out);
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
        }
    }
    if rest.deg() > 0 {
        out.push(rest.monic());
    }
    out
}

fn equal_degree_split(g: &FpPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    if g.deg() == d {
        out.push(g.monic());
        return;
    }
    let p = g.p;
    let e = (num_traits::pow(p as u128, d) - 1) / 2;
    loop {
        let a = FpPoly::new(p, (0..g.deg()).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = a.powmod_poly(e, g).sub(&FpPoly::one(p));
        let h = g.gcd(&b);
        if h.deg() > 0 && h.deg() < g.deg() {
            equal_degree_split(&h, d, rng, out);
            equal_degree_split(&g.div_rem(&h).0, d, rng, out);
            return;
        }
    }
}

/// Linear multifactor Hensel lifting: returns monic `G_i` with
/// `f ≡ lc(f) ∏ G_i (mod p^k)`.
fn hensel_lift(f: &[BigInt], modular: &[FpPoly], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let r = modular.len();
    let lc = f.last().unwrap().clone();
    let pb = BigInt::from(p);
    // Partial-fraction coefficients e_i with Σ e_i ∏_{j≠i} g_j = 1 mod p.
    let cofactors: Vec<FpPoly> = (0..r)
        .map(|i| {
            modular
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(FpPoly::one(p), |acc, (_, g)| acc.mul(g))
        })
        .collect();
    let e: Vec<FpPoly> = (0..r)
        .map(|i| {
            let (g, s, _) = cofactors[i].rem(&modular[i]).ext_gcd(&modular[i]);
            debug_assert_eq!(g.deg(), 0);
            s
        })
        .collect();
    let lc_inv = invmod(u64::try_from(lc.mod_floor(&pb)).unwrap(), p);
    let mut lifted: Vec<Vec<BigInt>> = modular.iter().map(|g| g.to_bigints()).collect();
    let mut m = pb.clone();
    for _ in 1..k {
        let mut prod = vec![lc.clone()];
        for g in &lifted {
            prod = zpoly_mul(&prod, g);
        }
        let err: Vec<BigInt> = (0..f.len())
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_default() - prod.get(i).cloned().unwrap_or_default();
                debug_assert!((&a % &m).is_zero());
                a / &m
            })
            .collect();
        let ep = FpPoly::from_bigints(p, &err).scale(lc_inv);
        for i in 0..r {
            let delta = ep.mul(&e[i]).rem(&modular[i]);
            let g = &mut lifted[i];
            for (j, c) in delta.c.iter().enumerate() {
                g[j] += &m * BigInt::from(*c);
            }
        }
        m *= &pb;
    }
    lifted
}

fn zpoly_divides_exactly(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    let fq = QPoly::from_bigints(f);
    let gq = QPoly::from_bigints(g);
    let (q, r) = fq.div_rem(&gq);
    if !r.is_zero() || !q.0.iter().all(|c| c.is_integer()) {
        return None;
    }
    Some(q.0.iter().map(Rational::to_integer).collect())
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    let mut out: Vec<BigInt> = v.into_iter().map(|c| c / &g).collect();
    if out.last().map_or(false, |c| c.is_negative()) {
        for c in out.iter_mut() {
            *c = -c.clone();
        }
    }
    zpoly_trim(out)
}

fn recombine(mut f: Vec<BigInt>, mut lifted: Vec<Vec<BigInt>>, modulus: &BigInt) -> Vec<Vec<BigInt>> {
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut progressed = false;
        for subset in combinations(lifted.len(), s) {
            let lc = f.last().unwrap().clone();
            let mut g = vec![lc];
            for &i in &subset {
                g = zpoly_mul(&g, &lifted[i]);
            }
            let g: Vec<BigInt> = g.iter().map(|c| sym_mod(c, modulus)).collect();
            let g = primitive(g);
            if g.len() < 2 {
                continue;
            }
            if let Some(q) = zpoly_divides_exactly(&f, &g) {
                found.push(g);
                f = primitive(q);
                let mut keep = Vec::new();
                for (i, h) in lifted.into_iter().enumerate() {
                    if !subset.contains(&i) {
                        keep.push(h);
                    }
                }
                lifted = keep;
                progressed = true;
                break;
            }
        }
        if !progressed {
            s += 1;
        }
    }
    if f.len() > 1 {
        found.push(primitive(f));
    }
    found
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Irreducible factorization over Q of a square-free polynomial of positive
/// degree; factors are monic.
pub fn factor_squarefree_q(f: &QPoly) -> Vec<QPoly> {
    let z = f.primitive_integer();
    factor_squarefree(&z).into_iter().map(|g| QPoly::from_bigints(&g).monic()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn product(fs: &[Vec<BigInt>]) -> Vec<BigInt> {
        fs.iter().fold(vec![BigInt::one()], |acc, g| zpoly_mul(&acc, g))
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 1).len(), 3);
    }

    #[test]
    fn splits_products_of_known_factors() {
        // (x^2 + 1)(x^2 - 2)(3x + 5)(x^4 + x + 1)
        let parts = vec![zp(&[1, 0, 1]), zp(&[-2, 0, 1]), zp(&[5, 3]), zp(&[1, 1, 0, 0, 1])];
        let f = product(&parts);
        let mut got = factor_squarefree(&f);
        got.sort();
        let mut want = parts.clone();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn swinnerton_dyer_is_irreducible() {
        // x^4 - 10x^2 + 1 splits into quadratics mod every prime.
        let f = zp(&[1, 0, -10, 0, 1]);
        assert_eq!(factor_squarefree(&f), vec![f]);
    }

    #[test]
    fn cyclotomic_split() {
        // x^12 - 1 = Φ1 Φ2 Φ3 Φ4 Φ6 Φ12
        let mut f = vec![BigInt::zero(); 13];
        f[0] = BigInt::from(-1);
        f[12] = BigInt::one();
        let got = factor_squarefree(&f);
        assert_eq!(got.len(), 6);
        assert_eq!(product(&got), f);
    }
}

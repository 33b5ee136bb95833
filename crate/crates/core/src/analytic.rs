//! Closed-form `F^max_avg` for the canonical topologies.
//!
//! Every evaluator is generic over [`Scalar`], so the same code runs in
//! double precision or in exact rational arithmetic ([`BigRational`]), e.g.
//! `chain_a(4, ratio(1, 2))` is exactly `65/96`.
//!
//! Scenario B evaluators return the average over all placements of the `M`
//! maximally entangled links.

use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::network::{Family, TopologySpec};

/// Field operations needed by the closed forms.
pub trait Scalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_count(n: u64) -> Self;
    fn powu(&self, exp: u32) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn powu(&self, exp: u32) -> Self {
        // repeated squaring; powi takes i32
        self.powi(exp as i32)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `numer / denom` as an exact rational.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"0.125"`, `"1/8"` or `"3"` into an exact rational.
pub fn parse_exact(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::param(format!("not a decimal or fraction: '{text}'"));
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
    if frac_part.chars().any(|c| !c.is_ascii_digit()) || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{}{}", if int_part.is_empty() { "0" } else { int_part }, frac_part);
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

/// Binomial coefficient; zero whenever `k < 0`, `k > n` or `n < 0`.
pub fn binomial<T: Scalar>(n: i64, k: i64) -> T {
    if n < 0 || k < 0 || k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 1..=k {
        acc = acc * T::from_count((n - k + i) as u64) / T::from_count(i as u64);
    }
    acc
}

/// Fidelity of a path containing `n` links of weight `p`: `(1 + p^n) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FTerm {
    pub n: u32,
}

impl FTerm {
    pub fn new(n: u32) -> Self {
        FTerm { n }
    }

    pub fn value<T: Scalar>(&self, p: &T) -> T {
        (T::one() + p.powu(self.n)) / T::from_count(2)
    }
}

#[inline]
fn f<T: Scalar>(n: i64, p: &T) -> T {
    debug_assert!(n >= 0);
    FTerm::new(n as u32).value(p)
}

fn count<T: Scalar>(n: i64) -> T {
    if n < 0 {
        T::zero() - T::from_count(n.unsigned_abs())
    } else {
        T::from_count(n as u64)
    }
}

fn pairs<T: Scalar>(n: usize) -> T {
    binomial(n as i64, 2)
}

fn check_p<T: Scalar>(p: &T) -> Result<()> {
    if *p < T::zero() || *p > T::one() {
        return Err(Error::param(format!("p = {} outside [0, 1]", p.to_f64())));
    }
    Ok(())
}

fn check_nodes(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::param(format!("{what} needs N >= {min}, got {n}")));
    }
    Ok(())
}

fn check_flower(n: usize, k: usize) -> Result<()> {
    check_nodes(n, 3, "flower")?;
    if k + 2 > n - 1 {
        return Err(Error::param(format!("flower k = {k} out of range 0..={} for N = {n}", n - 3)));
    }
    Ok(())
}

fn check_me(m: usize, links: usize) -> Result<()> {
    if m > links {
        return Err(Error::param(format!("M = {m} exceeds the {links} links")));
    }
    Ok(())
}

/// Star, Scenario A: `[L F1 + C(L,2) F2] / C(N,2)`.
pub fn star_a<T: Scalar>(n: usize, p: T) -> Result<T> {
    check_nodes(n, 2, "star")?;
    check_p(&p)?;
    let l = (n - 1) as i64;
    Ok((count::<T>(l) * f(1, &p) + binomial::<T>(l, 2) * f(2, &p)) / pairs(n))
}

/// Chain, Scenario A: `Σ_{l=1..L} (N - l) F_l / C(N,2)`.
pub fn chain_a<T: Scalar>(n: usize, p: T) -> Result<T> {
    check_nodes(n, 2, "chain")?;
    check_p(&p)?;
    let n_i = n as i64;
    let total = (1..n_i).fold(T::zero(), |acc, l| acc + count::<T>(n_i - l) * f(l, &p));
    Ok(total / pairs(n))
}

/// k-th intermediate flower, Scenario A: `[C(k+1,2) F2 + Σ_{l=1..L-k} (N - l) F_l] / C(N,2)`.
pub fn flower_a<T: Scalar>(n: usize, k: usize, p: T) -> Result<T> {
    check_flower(n, k)?;
    check_p(&p)?;
    let (n_i, k_i) = (n as i64, k as i64);
    let l = n_i - 1;
    let tail = (1..=l - k_i).fold(T::zero(), |acc, len| acc + count::<T>(n_i - len) * f(len, &p));
    Ok((binomial::<T>(k_i + 1, 2) * f(2, &p) + tail) / pairs(n))
}

/// Ring, Scenario A, with every distance `1..=⌊N/2⌋` weighted equally.
///
/// For odd `N` this is the mean over node pairs. For even `N` each opposite
/// pair enters once per shortest path (twice), which is the convention of the
/// published ring table; [`ring_pairs_a`] gives the plain pair average.
pub fn ring_a<T: Scalar>(n: usize, p: T) -> Result<T> {
    check_nodes(n, 3, "ring")?;
    check_p(&p)?;
    let half = (n / 2) as i64;
    let total = (1..=half).fold(T::zero(), |acc, l| acc + f(l, &p));
    Ok(total / count(half))
}

/// Ring, Scenario A, averaged over unordered node pairs (what the engine computes).
pub fn ring_pairs_a<T: Scalar>(n: usize, p: T) -> Result<T> {
    check_nodes(n, 3, "ring")?;
    check_p(&p)?;
    let n_i = n as i64;
    let half = n_i / 2;
    let mut total = T::zero();
    for l in 1..=half {
        // N pairs at each distance, except N/2 opposite pairs for even N
        let multiplicity = if n.is_multiple_of(2) && l == half { half } else { n_i };
        total = total + count::<T>(multiplicity) * f(l, &p);
    }
    Ok(total / pairs(n))
}

/// Complete graph, Scenario A: every pair is adjacent, `(1 + p) / 2`.
pub fn complete_a<T: Scalar>(p: T) -> Result<T> {
    check_p(&p)?;
    Ok(f(1, &p))
}

/// Star with `M` ME links, Scenario B:
/// `[C(M+1,2) F0 + (M+1)(L-M) F1 + C(L-M,2) F2] / C(N,2)`.
pub fn star_b<T: Scalar>(n: usize, m: usize, p: T) -> Result<T> {
    check_nodes(n, 2, "star")?;
    check_p(&p)?;
    let l = n - 1;
    check_me(m, l)?;
    Ok(star_block(l as i64, m as i64, &p) / pairs(n))
}

/// Star contribution to the pair-fidelity total for `links` spokes, `me` of them ME.
fn star_block<T: Scalar>(links: i64, me: i64, p: &T) -> T {
    binomial::<T>(me + 1, 2) * f(0, p)
        + count::<T>((me + 1) * (links - me)) * f(1, p)
        + binomial::<T>(links - me, 2) * f(2, p)
}

/// Placement-averaged pair-fidelity total of a chain with `links` links, `me` of them ME.
fn chain_block<T: Scalar>(links: i64, me: i64, p: &T) -> T {
    let prefactor = count::<T>((links + 1) * (links + 2))
        / count::<T>((links + 1 - me) * (links + 2 - me));
    let sum = (1..=links - me).fold(T::zero(), |acc, l| acc + count::<T>(links + 1 - me - l) * f(l, p));
    count::<T>(me * (links + 1)) / count::<T>(links + 2 - me) * f(0, p) + prefactor * sum
}

/// Chain with `M` ME links, Scenario B, averaged over the `C(L, M)` placements.
pub fn chain_b<T: Scalar>(n: usize, m: usize, p: T) -> Result<T> {
    check_nodes(n, 2, "chain")?;
    check_p(&p)?;
    let l = n - 1;
    check_me(m, l)?;
    Ok(chain_block(l as i64, m as i64, &p) / pairs(n))
}

/// k-th intermediate flower with `M` ME links, Scenario B, averaged over placements.
///
/// Splits the tree into the star of `ls = k + 2` spokes and the chain of
/// `lc = L - ls` stem links sharing one node, and sums over the number `ms`
/// of ME links that land on the star.
pub fn flower_b<T: Scalar>(n: usize, k: usize, m: usize, p: T) -> Result<T> {
    check_flower(n, k)?;
    check_p(&p)?;
    let l = (n - 1) as i64;
    check_me(m, l as usize)?;
    let m = m as i64;
    let ls = k as i64 + 2;
    let lc = l - ls;

    let mut total = T::zero();
    for ms in 0..=ls.min(m) {
        let mc = m - ms;
        if mc > lc {
            continue;
        }
        let placements = binomial::<T>(ls, ms) * binomial::<T>(lc, mc);
        total = total + placements * (star_block(ls, ms, &p) + chain_block(lc, mc, &p));

        // pairs with one end on the stem (i links away from the shared node)
        // and the other on the rest of the star
        let stem_p = count::<T>(ls - ms - 1) * binomial::<T>(ls - 1, ms);
        let to_plus_one = count::<T>(ls - ms) * binomial::<T>(ls - 1, ms - 1)
            + count::<T>(ms + 1) * binomial::<T>(ls - 1, ms);
        let stem_me = count::<T>(ms) * binomial::<T>(ls - 1, ms - 1);
        for i in 1..=lc {
            for len in (i - mc).max(0)..=lc - mc {
                let ways = binomial::<T>(i, len) * binomial::<T>(lc - i, lc - mc - len);
                if ways.is_zero() {
                    continue;
                }
                let term = stem_p.clone() * f(len + 2, &p)
                    + to_plus_one.clone() * f(len + 1, &p)
                    + stem_me.clone() * f(len, &p);
                total = total + term * ways;
            }
        }
    }
    Ok(total / (pairs::<T>(n) * binomial::<T>(l, m)))
}

/// `E[max((1 + p1)/2, (1 + p2 p3)/2)]` for i.i.d. uniform weights on the
/// triangle: exactly 7/9.
pub fn triangle_c_expected() -> BigRational {
    ratio(7, 9)
}

/// The triangle value obtained by averaging the weights first and maximizing
/// afterwards: 3/4.
pub fn triangle_average_then_max() -> BigRational {
    ratio(3, 4)
}

/// Scenario A closed form for a canonical family, `None` for custom graphs.
///
/// Rings use the pair-averaged form so the value is comparable with the engine.
pub fn scenario_a<T: Scalar>(spec: &TopologySpec, p: T) -> Option<Result<T>> {
    let n = spec.n;
    Some(match spec.family {
        Family::Chain => chain_a(n, p),
        Family::Star => star_a(n, p),
        Family::Flower(k) => flower_a(n, k, p),
        Family::Ring => ring_pairs_a(n, p),
        Family::Complete => {
            if n < 2 {
                Err(Error::param("complete graph needs N >= 2"))
            } else {
                complete_a(p)
            }
        }
        Family::Custom(_) => return None,
    })
}

/// Scenario B closed form for tree families; `None` where only numerics exist.
pub fn scenario_b<T: Scalar>(spec: &TopologySpec, m: usize, p: T) -> Option<Result<T>> {
    let n = spec.n;
    Some(match spec.family {
        Family::Chain => chain_b(n, m, p),
        Family::Star => star_b(n, m, p),
        Family::Flower(k) => flower_b(n, k, m, p),
        _ => return None,
    })
}

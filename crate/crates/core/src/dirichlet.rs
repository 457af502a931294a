//! Constructive Dirichlet approximation in `Q_P`.
//!
//! For `x` in `Q_P` and a level bound `N`, the pigeonhole search reduces `zeta * x`
//! into `Z_P` for every `zeta` in
//! `Z_N = { zeta in P^-1 Z : l(zeta) <= N, zeta >= 0 }`, drops each reduced
//! point into a cell of a fixed partition of `Z_P`, and stops at the first cell
//! that receives a second point. The difference of the two `zeta` values is an
//! approximant `gamma` with `l(gamma) <= N` and `d(gamma x, beta) <= M / N`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::geometry::{self, AdelicPoint};
use crate::places::{gcd_pz, PlaceSet, PzElement};

/// The exponents `n_i` with `p_i^n_i <= N < p_i^(n_i + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelBallIndex {
    level_bound: u64,
    exponents: Vec<u32>,
}

impl LevelBallIndex {
    pub fn new(places: &PlaceSet, level_bound: u64) -> Result<Self> {
        if level_bound < 1 {
            return Err(Error::InvalidLevelBound);
        }
        let exponents = places
            .primes()
            .iter()
            .map(|&p| {
                let mut e = 0u32;
                let mut acc = 1u64;
                while let Some(next) = acc.checked_mul(p).filter(|&v| v <= level_bound) {
                    acc = next;
                    e += 1;
                }
                e
            })
            .collect();
        Ok(Self {
            level_bound,
            exponents,
        })
    }

    pub fn level_bound(&self) -> u64 {
        self.level_bound
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `p_1^n_1 * ... * p_r^n_r`
    pub fn denominator(&self, places: &PlaceSet) -> BigInt {
        places
            .primes()
            .iter()
            .zip(&self.exponents)
            .map(|(&p, &e)| num_traits::pow(BigInt::from(p), e as usize))
            .product()
    }

    /// `#Z_N = N * p_1^n_1 * ... * p_r^n_r + 1`
    pub fn z_n_count(&self, places: &PlaceSet) -> BigInt {
        self.denominator(places) * self.level_bound + 1
    }
}

/// `Z_N` in ascending order: `k / (p_1^n_1 ... p_r^n_r)` for `0 <= k <= N * prod`.
pub fn enumerate_z_n(places: &PlaceSet, level_bound: u64) -> Result<Vec<PzElement>> {
    let index = LevelBallIndex::new(places, level_bound)?;
    let den = index
        .denominator(places)
        .to_u64()
        .ok_or_else(|| Error::OutOfRange("Z_N is too large to enumerate".into()))?;
    let top = den
        .checked_mul(level_bound)
        .ok_or_else(|| Error::OutOfRange("Z_N is too large to enumerate".into()))?;
    let r = places.r();
    let mut out = Vec::with_capacity(top as usize + 1);
    out.push(PzElement::zero(r));
    for k in 1..=top {
        let mut unit = k;
        let exponents = places
            .primes()
            .iter()
            .zip(index.exponents())
            .map(|(&p, &n_i)| {
                let mut v = 0i64;
                while unit % p == 0 {
                    unit /= p;
                    v += 1;
                }
                v - n_i as i64
            })
            .collect();
        let g = arith::gcd_u64(k, den);
        let value = Rational::new_raw(BigInt::from(k / g), BigInt::from(den / g));
        out.push(PzElement::from_parts(value, BigInt::from(unit), exponents));
    }
    Ok(out)
}

fn z_n_values(
    places: &PlaceSet,
    index: &LevelBallIndex,
) -> Result<impl Iterator<Item = Rational>> {
    let den = index.denominator(places);
    let top = (&den * index.level_bound())
        .to_u64()
        .ok_or_else(|| Error::OutOfRange("Z_N is too large to enumerate".into()))?;
    Ok((0..=top).map(move |k| Rational::new(BigInt::from(k), den.clone())))
}

/// The cells `[r / M^eta, (r+1) / M^eta) x (s_1 + p_1^n_1 Z_p1) x ...` covering `Z_P`.
#[derive(Debug, Clone)]
pub struct PigeonholePartition {
    pub eta: u32,
    /// `M^eta`
    pub real_cells: BigInt,
    /// `p_i^n_i`
    pub moduli: Vec<BigInt>,
    pub box_count: BigInt,
    /// `max(M^-eta, p_i^-n_i)` in the metric `d`.
    pub diameter: Rational,
}

impl PigeonholePartition {
    /// Builds the partition and checks the facts the search relies on: fewer
    /// cells than points of `Z_N`, cell diameter at most `M / N`, and
    /// `N < M p_i^n_i` for every `i`.
    pub fn new(places: &PlaceSet, index: &LevelBallIndex) -> Result<Self> {
        let m = places.max_prime();
        let j = places.primes().iter().position(|&p| p == m).unwrap();
        let eta = index.exponents()[j];
        let real_cells = num_traits::pow(BigInt::from(m), eta as usize);
        let moduli: Vec<BigInt> = places
            .primes()
            .iter()
            .zip(index.exponents())
            .map(|(&p, &e)| num_traits::pow(BigInt::from(p), e as usize))
            .collect();
        let box_count = moduli.iter().fold(real_cells.clone(), |acc, q| acc * q);
        let points = index.z_n_count(places);
        if box_count >= points {
            return Err(Error::Invariant(format!(
                "{box_count} cells for {points} points of Z_N"
            )));
        }
        let n = BigInt::from(index.level_bound());
        for q in &moduli {
            if n >= q * m {
                return Err(Error::Invariant(format!("N >= M * {q}")));
            }
        }
        let diameter = moduli
            .iter()
            .map(|q| Rational::new(BigInt::one(), q.clone()))
            .chain(std::iter::once(Rational::new(BigInt::one(), real_cells.clone())))
            .max()
            .unwrap();
        if diameter > Rational::new(BigInt::from(m), n) {
            return Err(Error::Invariant(format!(
                "cell diameter {} exceeds M/N",
                arith::format_rational(&diameter)
            )));
        }
        Ok(Self {
            eta,
            real_cells,
            moduli,
            box_count,
            diameter,
        })
    }

    /// Cell label of a point of `Z_P`.
    pub fn cell(&self, z: &AdelicPoint) -> Vec<BigInt> {
        let mut key = Vec::with_capacity(self.moduli.len() + 1);
        key.push(arith::floor(&(z.real() * Rational::from_integer(self.real_cells.clone()))));
        for (c, q) in z.coords()[1..].iter().zip(&self.moduli) {
            let inv = arith::mod_inverse(c.denom(), q).expect("coordinate is p-integral");
            key.push((c.numer() * inv).mod_floor(q));
        }
        key
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletResult {
    pub beta: PzElement,
    pub gamma: PzElement,
    /// `d(gamma x, iota(beta))`
    pub achieved_distance: Rational,
    pub level_bound: u64,
}

/// Runs the pigeonhole search, scanning `Z_N` in ascending order and returning
/// the first collision.
///
/// Uses the integer scan when every intermediate fits in `i128` and the exact
/// rational scan otherwise; both report the same collision.
pub fn dirichlet_approximate(
    x: &AdelicPoint,
    level_bound: u64,
    places: &PlaceSet,
) -> Result<DirichletResult> {
    x.check(places)?;
    let index = LevelBallIndex::new(places, level_bound)?;
    let partition = PigeonholePartition::new(places, &index)?;
    match IntegerScan::new(x, places, &index, &partition) {
        Some(scan) => {
            let (beta, gamma) = scan.run()?;
            finish(x, places, level_bound, beta, gamma)
        }
        None => exact_scan(x, places, &index, &partition),
    }
}

/// The same search carried out entirely in exact rationals.
pub fn dirichlet_approximate_exact(
    x: &AdelicPoint,
    level_bound: u64,
    places: &PlaceSet,
) -> Result<DirichletResult> {
    x.check(places)?;
    let index = LevelBallIndex::new(places, level_bound)?;
    let partition = PigeonholePartition::new(places, &index)?;
    exact_scan(x, places, &index, &partition)
}

fn exact_scan(
    x: &AdelicPoint,
    places: &PlaceSet,
    index: &LevelBallIndex,
    partition: &PigeonholePartition,
) -> Result<DirichletResult> {
    let mut seen: HashMap<Vec<BigInt>, (Rational, Rational)> = HashMap::new();
    for zeta in z_n_values(places, index)? {
        let (z, beta_zeta) = geometry::reduce_to_fundamental_domain(&x.scale(&zeta), places)?;
        let key = partition.cell(z.point());
        let beta_zeta = beta_zeta.value().clone();
        if let Some((xi, beta_xi)) = seen.get(&key) {
            let gamma = &zeta - xi;
            let beta = &beta_zeta - beta_xi;
            return finish(x, places, index.level_bound(), beta, gamma);
        }
        seen.insert(key, (zeta, beta_zeta));
    }
    Err(Error::Invariant(
        "pigeonhole search finished without a collision".into(),
    ))
}

/// One finite place of [`IntegerScan`]. With `x_p = a / (p^v w)` and
/// `s = n_i + v`, `k/D * x_p = k a / (p^s u)` where `u = (D / p^n_i) w`.
struct ScanPlace {
    a: i128,
    /// `p^s`
    s_pow: i128,
    u: i128,
    /// `a u^-1 mod p^s`, so the principal part is `(k * a_mult mod p^s) / p^s`
    a_mult: i128,
    /// `E / p^s`
    e_over: i128,
    /// `p^n_i`, the cell modulus
    modulus: i128,
    u_inv: i128,
    /// `(p_j^s_j)^-1 mod p^n_i` for every place `j`
    others_inv: Vec<i128>,
}

/// The reduction of `(k / D) x` in integer arithmetic: `beta = G/E + F` with
/// `G = sum c_i E / p_i^s_i` the sum of principal parts and `F` the floor of
/// what remains of the real coordinate.
struct IntegerScan {
    d: i128,
    top: i128,
    a_inf: i128,
    b_inf: i128,
    e: i128,
    den: i128,
    real_cells: i128,
    box_count: u64,
    places: Vec<ScanPlace>,
}

fn to_i128(b: &BigInt) -> Option<i128> {
    i128::try_from(b).ok()
}

fn inv_mod(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    arith::mod_inverse(&BigInt::from(a.rem_euclid(m)), &BigInt::from(m)).and_then(|v| to_i128(&v))
}

const MAX_SCAN_PLACES: usize = 16;

impl IntegerScan {
    const LIMIT: u128 = 1 << 120;
    const TABLE_LIMIT: u64 = 1 << 26;

    fn new(
        x: &AdelicPoint,
        places: &PlaceSet,
        index: &LevelBallIndex,
        partition: &PigeonholePartition,
    ) -> Option<Self> {
        let d = to_i128(&index.denominator(places))?;
        let top = d.checked_mul(index.level_bound() as i128)?;
        let real_cells = to_i128(&partition.real_cells)?;
        let box_count = partition.box_count.to_u64()?;
        let a_inf = to_i128(x.real().numer())?;
        let b_inf = to_i128(x.real().denom())?;
        let mut parts = Vec::new();
        let mut e: i128 = 1;
        for ((&p, &n_i), c) in places.primes().iter().zip(index.exponents()).zip(&x.coords()[1..]) {
            let p = p as i128;
            let a = to_i128(c.numer())?;
            let mut w = to_i128(c.denom())?;
            let mut s = n_i;
            while w % p == 0 {
                w /= p;
                s += 1;
            }
            let modulus = p.checked_pow(n_i)?;
            let s_pow = p.checked_pow(s)?;
            let u = (d / modulus).checked_mul(w)?;
            let a_mult = if s_pow == 1 {
                0
            } else {
                (a.rem_euclid(s_pow)).checked_mul(inv_mod(u, s_pow)?)?.rem_euclid(s_pow)
            };
            e = e.checked_mul(s_pow)?;
            parts.push(ScanPlace {
                a,
                s_pow,
                u,
                a_mult,
                e_over: 0,
                modulus,
                u_inv: inv_mod(u, modulus)?,
                others_inv: Vec::new(),
            });
        }
        if parts.len() > MAX_SCAN_PLACES {
            return None;
        }
        let pows: Vec<i128> = parts.iter().map(|pl| pl.s_pow).collect();
        for (i, pl) in parts.iter_mut().enumerate() {
            pl.e_over = e / pl.s_pow;
            pl.others_inv = pows
                .iter()
                .enumerate()
                .map(|(j, &q)| if j == i { Some(0) } else { inv_mod(q, pl.modulus) })
                .collect::<Option<_>>()?;
        }
        let den = d.checked_mul(b_inf)?.checked_mul(e)?;

        // every product formed in `step` stays below 2^120
        let fits = |v: Option<u128>| v.is_some_and(|v| v < Self::LIMIT);
        let (ut, ue, ud) = (top as u128, e as u128, d as u128);
        let r = parts.len() as u128 + 1;
        let ok = fits(ut.checked_mul(a_inf.unsigned_abs()).and_then(|v| v.checked_mul(ue)))
            && fits(ue.checked_mul(r).and_then(|v| v.checked_mul(ud)).and_then(|v| v.checked_mul(b_inf as u128)))
            && fits((den as u128).checked_mul(real_cells as u128))
            && fits((den as u128).checked_mul(ue).and_then(|v| v.checked_mul(4)))
            && parts.iter().all(|pl| {
                fits(ut.checked_mul(pl.a.unsigned_abs()).and_then(|v| v.checked_mul(pl.modulus as u128)))
                    && fits((pl.s_pow as u128).checked_mul(pl.u as u128).and_then(|v| v.checked_mul(pl.modulus as u128)))
                    && fits((pl.s_pow as u128).checked_mul(ue))
                    && fits((pl.modulus as u128).checked_mul(pl.modulus as u128).and_then(|v| v.checked_mul(r)))
            });
        ok.then_some(Self {
            d,
            top,
            a_inf,
            b_inf,
            e,
            den,
            real_cells,
            box_count,
            places: parts,
        })
    }

    /// Cell index and `beta * E` for `zeta = k / D`.
    fn step(&self, k: i128) -> (u64, i128) {
        let mut buf = [0i128; MAX_SCAN_PLACES];
        let cs = &mut buf[..self.places.len()];
        let mut g = 0i128;
        for (pl, c) in self.places.iter().zip(cs.iter_mut()) {
            *c = (k % pl.s_pow) * pl.a_mult % pl.s_pow;
            g += *c * pl.e_over;
        }
        let num = k * self.a_inf * self.e - g * self.d * self.b_inf;
        let f = Integer::div_floor(&num, &self.den);
        let rem = num - f * self.den;
        let mut idx = Integer::div_floor(&(self.real_cells * rem), &self.den);
        let mut radix = self.real_cells;
        for (i, pl) in self.places.iter().enumerate() {
            if pl.modulus == 1 {
                continue;
            }
            let t = (k * pl.a - cs[i] * pl.u) / pl.s_pow;
            let mut res = t.rem_euclid(pl.modulus) * pl.u_inv - f.rem_euclid(pl.modulus);
            for (j, (cj, inv)) in cs.iter().zip(&pl.others_inv).enumerate() {
                if j != i {
                    res -= cj.rem_euclid(pl.modulus) * inv % pl.modulus;
                }
            }
            idx += radix * res.rem_euclid(pl.modulus);
            radix *= pl.modulus;
        }
        (idx as u64, g + f * self.e)
    }

    /// Cell indices for `k = 0, 1, ...` by constant increments.
    ///
    /// From `k` to `k + 1` the real remainder grows by a fixed amount with at
    /// most one carry into `F`; the wraps of the principal parts cancel in every
    /// p-adic residue, which therefore moves by a constant minus that carry.
    fn walk(&self) -> Walk {
        let den = self.den;
        let mut step_num = self.a_inf * self.e;
        for pl in &self.places {
            step_num -= pl.a_mult * pl.e_over * self.d * self.b_inf;
        }
        let (c_f, c_r) = Integer::div_mod_floor(&step_num, &den);
        let (dq, dr) = Integer::div_mod_floor(&(self.real_cells * c_r), &den);
        let places = self
            .places
            .iter()
            .enumerate()
            .map(|(i, pl)| {
                let m = pl.modulus;
                let t = (pl.a - pl.a_mult * pl.u) / pl.s_pow;
                let mut k = t.rem_euclid(m) * pl.u_inv - c_f.rem_euclid(m);
                for (j, (q, inv)) in self.places.iter().zip(&pl.others_inv).enumerate() {
                    if j != i {
                        k -= q.a_mult.rem_euclid(m) * inv % m;
                    }
                }
                (k.rem_euclid(m) as u64, m as u64)
            })
            .collect();
        Walk {
            den,
            c_r,
            real_cells: self.real_cells as u64,
            dq: dq as u64,
            dr,
            rem: 0,
            q: 0,
            r2: 0,
            places,
            res: vec![0; self.places.len()],
        }
    }

    /// `(beta, gamma)` for the first collision in ascending `k`.
    fn run(&self) -> Result<(Rational, Rational)> {
        let hit = |k: i128, prev: i128| {
            let (_, b) = self.step(k);
            let (_, b_prev) = self.step(prev);
            (
                Rational::new(BigInt::from(b - b_prev), BigInt::from(self.e)),
                Rational::new(BigInt::from(k - prev), BigInt::from(self.d)),
            )
        };
        let mut walk = self.walk();
        if self.box_count <= Self::TABLE_LIMIT {
            let mut table = vec![0u64; self.box_count as usize];
            for k in 0..=self.top {
                let slot = &mut table[walk.index() as usize];
                if *slot != 0 {
                    return Ok(hit(k, *slot as i128 - 1));
                }
                *slot = k as u64 + 1;
                walk.advance();
            }
        } else {
            let mut seen: HashMap<u64, i128> = HashMap::new();
            for k in 0..=self.top {
                if let Some(&prev) = seen.get(&walk.index()) {
                    return Ok(hit(k, prev));
                }
                seen.insert(walk.index(), k);
                walk.advance();
            }
        }
        Err(Error::Invariant(
            "pigeonhole search finished without a collision".into(),
        ))
    }
}

/// Running state of [`IntegerScan::walk`]: `rem` is the real remainder over
/// `den`, `real_cells * rem = q den + r2`, and `res` the p-adic residues.
struct Walk {
    den: i128,
    c_r: i128,
    real_cells: u64,
    dq: u64,
    dr: i128,
    rem: i128,
    q: u64,
    r2: i128,
    /// per place: constant increment and modulus
    places: Vec<(u64, u64)>,
    res: Vec<u64>,
}

impl Walk {
    fn index(&self) -> u64 {
        let mut idx = self.q;
        let mut radix = self.real_cells;
        for (&r, &(_, m)) in self.res.iter().zip(&self.places) {
            idx += radix * r;
            radix *= m;
        }
        idx
    }

    fn advance(&mut self) {
        self.rem += self.c_r;
        self.q += self.dq;
        self.r2 += self.dr;
        if self.r2 >= self.den {
            self.r2 -= self.den;
            self.q += 1;
        }
        let carry = self.rem >= self.den;
        if carry {
            self.rem -= self.den;
            self.q -= self.real_cells;
        }
        for (r, &(inc, m)) in self.res.iter_mut().zip(&self.places) {
            *r += inc;
            if *r >= m {
                *r -= m;
            }
            if carry {
                *r = if *r == 0 { m - 1 } else { *r - 1 };
            }
        }
    }
}

fn finish(
    x: &AdelicPoint,
    places: &PlaceSet,
    level_bound: u64,
    beta: Rational,
    gamma: Rational,
) -> Result<DirichletResult> {
    let achieved_distance = geometry::approximation_distance(x, &gamma, &beta, places)?;
    let gamma = places.decompose(&gamma)?;
    let beta = places.decompose(&beta)?;
    let n = Rational::from_integer(level_bound.into());
    let bound = Rational::from_integer(places.max_prime().into()) / &n;
    if !gamma.is_positive() || places.level(&gamma) > n || achieved_distance > bound {
        return Err(Error::Invariant(format!(
            "approximant beta={beta}, gamma={gamma} breaks the Dirichlet bound"
        )));
    }
    Ok(DirichletResult {
        beta,
        gamma,
        achieved_distance,
        level_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimePair {
    pub beta: PzElement,
    pub gamma: PzElement,
    pub distance: Rational,
}

/// The first `count` distinct coprime pairs `(beta, gamma)` with
/// `d(gamma x, iota(beta)) <= M / l(gamma)`, taken from the Dirichlet
/// approximants for `N = 1, 2, ...` after dividing out `gcd(beta, gamma)`.
pub fn coprime_approximants(
    x: &AdelicPoint,
    count: usize,
    n_max: u64,
    places: &PlaceSet,
) -> Result<Vec<CoprimePair>> {
    x.check(places)?;
    if x.is_diagonal() {
        return Err(Error::DiagonalRational);
    }
    let m = Rational::from_integer(places.max_prime().into());
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut last_exponents = None;
    for n in 1..=n_max {
        if pairs.len() >= count {
            break;
        }
        // The scan and its cells depend on N only through the exponents n_i,
        // and a collision always comes before the cap N * D, so an unchanged
        // exponent vector repeats the previous approximant.
        let exponents = LevelBallIndex::new(places, n)?.exponents().to_vec();
        if last_exponents.as_ref() == Some(&exponents) {
            continue;
        }
        last_exponents = Some(exponents);
        let res = dirichlet_approximate(x, n, places)?;
        let g = Rational::from_integer(gcd_pz(&res.beta, &res.gamma)?);
        let beta = res.beta.value() / &g;
        let gamma = res.gamma.value() / &g;
        if !seen.insert((beta.clone(), gamma.clone())) {
            continue;
        }
        let distance = geometry::approximation_distance(x, &gamma, &beta, places)?;
        let gamma = places.decompose(&gamma)?;
        let beta = places.decompose(&beta)?;
        if distance.is_zero() || distance > &m / places.level(&gamma) {
            return Err(Error::Invariant(format!(
                "pair ({beta}, {gamma}) breaks the corollary bound"
            )));
        }
        debug_assert!(gcd_pz(&beta, &gamma)?.is_one());
        pairs.push(CoprimePair {
            beta,
            gamma,
            distance,
        });
    }
    if pairs.len() < count {
        return Err(Error::Exhausted {
            n_max,
            found: pairs
                .into_iter()
                .map(|p| (p.beta, p.gamma, p.distance))
                .collect(),
        });
    }
    Ok(pairs)
}

//! Exact ℚ-linear algebra on logarithms of rational ratios, and brute-force
//! checkers for the quantitative Diophantine lower-bound conditions.
//!
//! For rational `r = Π p^{e_p}` the vector of prime exponents represents
//! `log r` exactly, so rank and span questions about `{log r_i}` reduce to
//! exact integer linear algebra. The condition checkers scan integer
//! coefficient vectors exhaustively and bound each margin `|Σ n_i γ_i|` with
//! outward-rounded enclosures: a reported violation uses the enclosure's
//! upper endpoint, a reported pass its lower endpoint, and a straddle at the
//! precision cap is reported as undecided, never as a decision.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{IFSystem, Word};
use crate::num::{default_precision, Enclosure, Rational, Scalar};

// ---------------------------------------------------------------------------
// factorization

/// Deterministic Miller-Rabin for u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Pollard's rho (Brent variant) with fixed deterministic restarts.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n) && !n.is_multiple_of(2));
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    // unreachable for composite u64 inputs in practice
    panic!("pollard rho failed on {n}");
}

fn factor_u64(mut n: u64, out: &mut BTreeMap<u64, i64>, sign: i64) {
    while n.is_multiple_of(2) {
        *out.entry(2).or_insert(0) += sign;
        n /= 2;
    }
    let mut p = 3u64;
    while p <= 65536 && p * p <= n {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += sign;
            n /= p;
        }
        p += 2;
    }
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        *out.entry(n).or_insert(0) += sign;
        return;
    }
    let d = pollard_rho(n);
    factor_u64(d, out, sign);
    factor_u64(n / d, out, sign);
}

fn factor_biguint(n: &BigUint, out: &mut BTreeMap<u64, i64>, sign: i64) -> Result<()> {
    if let Some(small) = n.to_u64() {
        factor_u64(small, out, sign);
        return Ok(());
    }
    // strip small primes, then require the remainder to fit u64
    let mut rest = n.clone();
    let mut p = 2u64;
    while p <= 65536 {
        let pb = BigUint::from(p);
        while (&rest % &pb).is_zero() {
            *out.entry(p).or_insert(0) += sign;
            rest /= &pb;
        }
        p = if p == 2 { 3 } else { p + 2 };
        if let Some(small) = rest.to_u64() {
            factor_u64(small, out, sign);
            return Ok(());
        }
    }
    Err(Error::FactorBound(n.to_string()))
}

/// Prime exponent vector of a positive rational: `r = Π p^{e_p}`, so
/// `log r = Σ e_p log p` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogVector {
    pub exponents: BTreeMap<u64, i64>,
}

impl LogVector {
    pub fn of_rational(r: &Rational) -> Result<LogVector> {
        if !r.is_positive() {
            return Err(Error::Domain(format!("log vector of non-positive rational {r}")));
        }
        let mut exponents = BTreeMap::new();
        factor_biguint(r.numer().magnitude(), &mut exponents, 1)?;
        factor_biguint(r.denom().magnitude(), &mut exponents, -1)?;
        exponents.retain(|_, e| *e != 0);
        Ok(LogVector { exponents })
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Integer combination Σ n_i·v_i over a shared prime support.
    pub fn combine(vectors: &[LogVector], coeffs: &[i64]) -> LogVector {
        let mut exponents: BTreeMap<u64, i64> = BTreeMap::new();
        for (v, &c) in vectors.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (&p, &e) in &v.exponents {
                *exponents.entry(p).or_insert(0) += c * e;
            }
        }
        exponents.retain(|_, e| *e != 0);
        LogVector { exponents }
    }
}

// ---------------------------------------------------------------------------
// exact linear algebra

/// Rank of an integer matrix by fraction-free elimination.
fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < ncols {
        let pivot = (rank..rows.len()).find(|&i| !rows[i][col].is_zero());
        let Some(p) = pivot else {
            col += 1;
            continue;
        };
        rows.swap(rank, p);
        let (pivot_row, rest) = {
            let (head, tail) = rows.split_at_mut(rank + 1);
            (head[rank].clone(), tail)
        };
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            let b = pivot_row[col].clone();
            for j in col..ncols {
                row[j] = &row[j] * &b - &pivot_row[j] * &a;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Solve `A x = b` exactly over ℚ (A given by columns). Returns one solution
/// (free variables set to zero) or `None` when inconsistent.
#[allow(clippy::needless_range_loop)]
fn solve_rational(columns: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let nrows = b.len();
    let ncols = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == nrows));
    // augmented row-major matrix
    let mut m: Vec<Vec<Rational>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().ok()?;
        for j in c..=ncols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=ncols {
                    m[i][j] = &m[i][j] - &(&f * &m[r][j]);
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    // inconsistency: zero row with nonzero rhs
    for row in m.iter().skip(r) {
        if row[..ncols].iter().all(|x| x.is_zero()) && !row[ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row_idx, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[row_idx][ncols].clone();
    }
    Some(x)
}

/// Rank over ℚ of `{log r}` for rationals in `(0,1)`: the rank of the
/// integer prime-exponent matrix.
pub fn log_rank(ratios: &[Rational]) -> Result<usize> {
    let vectors = ratios
        .iter()
        .map(|r| {
            if !(r.is_positive() && *r < Rational::one()) {
                return Err(Error::Domain(format!("ratio {r} outside (0,1)")));
            }
            LogVector::of_rational(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let primes: Vec<u64> = {
        let mut set = std::collections::BTreeSet::new();
        for v in &vectors {
            set.extend(v.exponents.keys().copied());
        }
        set.into_iter().collect()
    };
    let rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| {
            primes
                .iter()
                .map(|p| BigInt::from(v.exponents.get(p).copied().unwrap_or(0)))
                .collect()
        })
        .collect();
    Ok(integer_rank(rows))
}

/// Is `log r` a rational combination of `{log b}`? On success returns the
/// witness coefficients, which reproduce `r`'s exponent vector exactly.
pub fn in_log_span(r: &Rational, basis: &[Rational]) -> Result<Option<Vec<Rational>>> {
    for x in std::iter::once(r).chain(basis.iter()) {
        if !(x.is_positive() && *x < Rational::one()) {
            return Err(Error::Domain(format!("ratio {x} outside (0,1)")));
        }
    }
    let target = LogVector::of_rational(r)?;
    let basis_vecs =
        basis.iter().map(LogVector::of_rational).collect::<Result<Vec<_>>>()?;
    let primes: Vec<u64> = {
        let mut set = std::collections::BTreeSet::new();
        set.extend(target.exponents.keys().copied());
        for v in &basis_vecs {
            set.extend(v.exponents.keys().copied());
        }
        set.into_iter().collect()
    };
    let columns: Vec<Vec<Rational>> = basis_vecs
        .iter()
        .map(|v| {
            primes
                .iter()
                .map(|p| Rational::from_int(v.exponents.get(p).copied().unwrap_or(0)))
                .collect()
        })
        .collect();
    let b: Vec<Rational> = primes
        .iter()
        .map(|p| Rational::from_int(target.exponents.get(p).copied().unwrap_or(0)))
        .collect();
    Ok(solve_rational(&columns, &b))
}

// ---------------------------------------------------------------------------
// Diophantine conditions

/// One input `γ_i` for the condition checkers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Gamma {
    /// `γ = log r` for a positive rational `r` (handled exactly where
    /// possible: the combination Σ n_i log r_i vanishes iff Π r_i^{n_i} = 1).
    LogOfRational(Rational),
    /// `γ` itself an exact rational.
    Exact(Rational),
    /// `γ` known only as an enclosure.
    Approx(Enclosure),
}

impl Gamma {
    fn enclosure(&self, prec: u32) -> Result<Enclosure> {
        match self {
            Gamma::LogOfRational(r) => {
                if !r.is_positive() {
                    return Err(Error::Domain(format!("log of non-positive {r}")));
                }
                Enclosure::from_rational(r, prec).ln()
            }
            Gamma::Exact(q) => Ok(Enclosure::from_rational(q, prec)),
            Gamma::Approx(e) => Ok(e.with_prec(prec.max(e.prec()))),
        }
    }

    fn log_vector(&self) -> Option<Result<LogVector>> {
        match self {
            Gamma::LogOfRational(r) => Some(LogVector::of_rational(r)),
            _ => None,
        }
    }
}

/// Coefficient regime of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffMode {
    /// `-N ≤ n_i ≤ N`, bound must hold for all `N ≥ 2`.
    MixedSign,
    /// `0 ≤ n_i ≤ N`, bound must hold for the reported "good" `N`.
    NonNegative,
}

/// Margin of one coefficient vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Margin {
    /// Exactly zero, detected by exact arithmetic.
    ExactZero,
    /// Exact rational absolute value.
    Exact(Rational),
    /// Rigorous bracket.
    Bracket(Enclosure),
}

impl Margin {
    pub fn lower(&self) -> Rational {
        match self {
            Margin::ExactZero => Rational::zero(),
            Margin::Exact(q) => q.clone(),
            Margin::Bracket(e) => e.lo_rational().max(Rational::zero()),
        }
    }

    pub fn upper(&self) -> Rational {
        match self {
            Margin::ExactZero => Rational::zero(),
            Margin::Exact(q) => q.clone(),
            Margin::Bracket(e) => e.hi_rational(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Margin::ExactZero => 0.0,
            Margin::Exact(q) => q.to_f64(),
            Margin::Bracket(e) => e.mid_f64(),
        }
    }
}

/// Outcome of the bound `min margin > N^{-c}` at one horizon `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NStatus {
    /// Certainly `> N^{-c}` (uses the margin's lower endpoint).
    Pass,
    /// Certainly `≤ N^{-c}` (uses the margin's upper endpoint).
    Violation,
    /// Bracket straddles the threshold at the precision cap.
    Undecided,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NRow {
    pub n: u32,
    pub min_margin: Margin,
    pub argmin: Vec<i64>,
    pub status: NStatus,
}

/// Report of one exhaustive condition scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DioReport {
    pub mode: CoeffMode,
    pub exponent_c: Rational,
    pub n_max: u32,
    pub precision: u32,
    pub rows: Vec<NRow>,
    /// Horizons whose minimum margin is certainly ≤ N^{-c}.
    pub violations: Vec<u32>,
    /// Horizons where the bound certainly holds ("good" N for the
    /// nonnegative regime).
    pub good_n: Vec<u32>,
    pub undecided: Vec<u32>,
}

impl DioReport {
    pub fn all_good(&self) -> bool {
        self.violations.is_empty() && self.undecided.is_empty()
    }

    /// CSV rows `(N, margin * N^c)` for plotting.
    pub fn csv(&self) -> String {
        let mut out = String::from("n,min_margin,scaled_margin,status\n");
        let c = self.exponent_c.to_f64();
        for row in &self.rows {
            let m = row.min_margin.to_f64();
            let scaled = m * (row.n as f64).powf(c);
            out.push_str(&format!(
                "{},{},{},{:?}\n",
                row.n,
                m,
                scaled,
                row.status
            ));
        }
        out
    }
}

/// Condition with mixed-sign coefficients (`-N ≤ n_i ≤ N`, all `N ≥ 2`):
/// scans every coefficient vector exhaustively up to `n_max`.
pub fn check_condition_big_d(gammas: &[Gamma], c: &Rational, n_max: u32) -> Result<DioReport> {
    scan(gammas, c, n_max, CoeffMode::MixedSign, default_precision())
}

/// Condition with nonnegative coefficients (`0 ≤ n_i ≤ N`): reports the set
/// of `N ≤ n_max` at which the bound holds for every vector.
pub fn check_condition_small_d(gammas: &[Gamma], c: &Rational, n_max: u32) -> Result<DioReport> {
    scan(gammas, c, n_max, CoeffMode::NonNegative, default_precision())
}

/// Mixed-sign scan at an explicit working precision (soundness audits
/// re-run reports at doubled precision: a pass may tighten, never flip).
pub fn check_condition_big_d_at(
    gammas: &[Gamma],
    c: &Rational,
    n_max: u32,
    prec: u32,
) -> Result<DioReport> {
    scan(gammas, c, n_max, CoeffMode::MixedSign, prec)
}

/// Nonnegative scan at an explicit working precision.
pub fn check_condition_small_d_at(
    gammas: &[Gamma],
    c: &Rational,
    n_max: u32,
    prec: u32,
) -> Result<DioReport> {
    scan(gammas, c, n_max, CoeffMode::NonNegative, prec)
}

/// Smallest precision at which every margin decision stabilizes, capped.
const PREC_CAP: u32 = 4096;

struct VectorMargin {
    coeffs: Vec<i64>,
    margin: Margin,
}

fn scan(
    gammas: &[Gamma],
    c: &Rational,
    n_max: u32,
    mode: CoeffMode,
    prec: u32,
) -> Result<DioReport> {
    if gammas.is_empty() {
        return Err(Error::Invalid("empty gamma list".into()));
    }
    if !c.is_positive() {
        return Err(Error::Invalid("exponent c must be positive".into()));
    }
    if n_max < 2 {
        return Err(Error::Invalid("n_max must be at least 2".into()));
    }
    let k = gammas.len();
    if (n_max as f64 + 1.0).powi(k as i32) > 5e8 {
        return Err(Error::Budget(format!(
            "scan of {k} coefficients up to {n_max} exceeds the exhaustive budget"
        )));
    }

    // exact split: rational parts and log-vectors where available
    let exact_rational: Vec<Option<Rational>> = gammas
        .iter()
        .map(|g| match g {
            Gamma::Exact(q) => Some(q.clone()),
            _ => None,
        })
        .collect();
    let log_vectors: Vec<Option<LogVector>> =
        gammas.iter().map(|g| g.log_vector().transpose()).collect::<Result<Vec<_>>>()?;
    let all_structured = gammas.iter().all(|g| !matches!(g, Gamma::Approx(_)));

    let enclosures: Vec<Enclosure> =
        gammas.iter().map(|g| g.enclosure(prec)).collect::<Result<Vec<_>>>()?;

    // margins of every vector grouped by born level M = max |n_i| (max n_i in
    // the nonnegative regime), canonicalized under sign symmetry
    let levels: Vec<Vec<VectorMargin>> = (1..=n_max)
        .into_par_iter()
        .map(|m| {
            let mut out = Vec::new();
            enumerate_level(k, m as i64, mode, &mut |coeffs| {
                let margin = vector_margin(
                    coeffs,
                    &exact_rational,
                    &log_vectors,
                    all_structured,
                    &enclosures,
                    gammas,
                    prec,
                );
                out.push(VectorMargin { coeffs: coeffs.to_vec(), margin });
            });
            out
        })
        .collect();

    // prefix minima over born levels, deterministic order; horizons start at
    // N = 2 in both regimes (the mixed-sign condition is defined from 2, and
    // N = 1 makes the nonnegative threshold trivially unbeatable)
    let mut rows = Vec::new();
    let mut best: Option<(Margin, Vec<i64>)> = None;
    let n_start = 2;
    let mut violations = Vec::new();
    let mut good = Vec::new();
    let mut undecided = Vec::new();
    for n in 1..=n_max {
        for vm in &levels[(n - 1) as usize] {
            let replace = match &best {
                None => true,
                Some((cur, cur_vec)) => {
                    let lo_new = vm.margin.lower();
                    let lo_cur = cur.lower();
                    lo_new < lo_cur
                        || (lo_new == lo_cur
                            && (vm.margin.upper(), &vm.coeffs) < (cur.upper(), cur_vec))
                }
            };
            if replace {
                best = Some((vm.margin.clone(), vm.coeffs.clone()));
            }
        }
        if n < n_start {
            continue;
        }
        let (margin, argmin) = best.clone().expect("level 1 is nonempty");
        let status = threshold_status(&margin, n, c);
        match status {
            NStatus::Pass => good.push(n),
            NStatus::Violation => violations.push(n),
            NStatus::Undecided => undecided.push(n),
        }
        rows.push(NRow { n, min_margin: margin, argmin, status });
    }

    Ok(DioReport {
        mode,
        exponent_c: c.clone(),
        n_max,
        precision: prec,
        rows,
        violations,
        good_n: good,
        undecided,
    })
}

/// Enumerate canonical coefficient vectors whose born level (∞-norm, or max
/// coefficient in the nonnegative regime) is exactly `m`.
fn enumerate_level(k: usize, m: i64, mode: CoeffMode, f: &mut impl FnMut(&[i64])) {
    let mut coeffs = vec![0i64; k];
    fn rec(
        coeffs: &mut Vec<i64>,
        idx: usize,
        m: i64,
        mode: CoeffMode,
        hit_level: bool,
        f: &mut impl FnMut(&[i64]),
    ) {
        let k = coeffs.len();
        if idx == k {
            if hit_level {
                f(coeffs);
            }
            return;
        }
        let range: Box<dyn Iterator<Item = i64>> = match mode {
            CoeffMode::MixedSign => Box::new(-m..=m),
            CoeffMode::NonNegative => Box::new(0..=m),
        };
        for v in range {
            coeffs[idx] = v;
            rec(coeffs, idx + 1, m, mode, hit_level || v.abs() == m, f);
        }
        coeffs[idx] = 0;
    }
    // canonical sign for the mixed regime: first nonzero coefficient positive
    let mut emit = |c: &[i64]| {
        if mode == CoeffMode::MixedSign {
            match c.iter().find(|&&x| x != 0) {
                Some(&first) if first < 0 => return,
                None => return,
                _ => {}
            }
        } else if c.iter().all(|&x| x == 0) {
            return;
        }
        f(c);
    };
    rec(&mut coeffs, 0, m, mode, false, &mut emit);
}

fn vector_margin(
    coeffs: &[i64],
    exact_rational: &[Option<Rational>],
    log_vectors: &[Option<LogVector>],
    all_structured: bool,
    enclosures: &[Enclosure],
    gammas: &[Gamma],
    prec: u32,
) -> Margin {
    if all_structured {
        // Σ over exact rationals plus Σ over log-rationals: the combination is
        // exactly zero iff the rational part vanishes and the log part has a
        // trivial exponent vector.
        let mut rat = Rational::zero();
        let mut vecs = Vec::new();
        let mut vec_coeffs = Vec::new();
        for (i, &n) in coeffs.iter().enumerate() {
            if n == 0 {
                continue;
            }
            if let Some(q) = &exact_rational[i] {
                rat = &rat + &(&Rational::from_int(n) * q);
            } else if let Some(v) = &log_vectors[i] {
                vecs.push(v.clone());
                vec_coeffs.push(n);
            }
        }
        let combined = LogVector::combine(&vecs, &vec_coeffs);
        if combined.is_zero() {
            if rat.is_zero() {
                return Margin::ExactZero;
            }
            return Margin::Exact(rat.abs());
        }
    }
    // enclosure evaluation with on-demand refinement
    let mut p = prec;
    loop {
        let encs: Vec<Enclosure> = if p == prec {
            enclosures.to_vec()
        } else {
            match gammas.iter().map(|g| g.enclosure(p)).collect::<Result<Vec<_>>>() {
                Ok(v) => v,
                Err(_) => return Margin::Bracket(sum_enclosure(coeffs, enclosures, prec).abs()),
            }
        };
        let total = sum_enclosure(coeffs, &encs, p);
        let m = total.abs();
        if !m.contains_zero() || p >= PREC_CAP {
            return Margin::Bracket(m);
        }
        p *= 2;
    }
}

fn sum_enclosure(coeffs: &[i64], encs: &[Enclosure], prec: u32) -> Enclosure {
    let mut total = Enclosure::from_int(0, prec);
    for (e, &n) in encs.iter().zip(coeffs) {
        if n == 0 {
            continue;
        }
        total = total.add(&e.mul(&Enclosure::from_int(n, prec)));
    }
    total
}

/// Compare a margin against `N^{-c}` with `c = p/q`: margin > N^{-c} iff
/// margin^q · N^p > 1, decided with exact integer powers.
fn threshold_status(margin: &Margin, n: u32, c: &Rational) -> NStatus {
    let p = c.numer().to_u32().unwrap_or(u32::MAX);
    let q = c.denom().to_u32().unwrap_or(u32::MAX);
    if p == u32::MAX || q == u32::MAX {
        return NStatus::Undecided;
    }
    let n_pow = Rational::from_bigint(BigInt::from(n).pow(p));
    match margin {
        Margin::ExactZero => NStatus::Violation,
        Margin::Exact(m) => {
            let lhs = &m.pow(q as i32).expect("positive power") * &n_pow;
            if lhs > Rational::one() {
                NStatus::Pass
            } else {
                NStatus::Violation
            }
        }
        Margin::Bracket(e) => {
            let lo = e.lo_rational().max(Rational::zero());
            let hi = e.hi_rational();
            let lo_scaled = &lo.pow(q as i32).unwrap_or_else(|_| Rational::zero()) * &n_pow;
            if lo_scaled > Rational::one() {
                return NStatus::Pass;
            }
            let hi_scaled = &hi.pow(q as i32).expect("positive power") * &n_pow;
            if hi_scaled <= Rational::one() {
                return NStatus::Violation;
            }
            NStatus::Undecided
        }
    }
}

// ---------------------------------------------------------------------------
// sub-system construction

/// One constructed pair of words with equal scaling constants and distinct
/// fixed points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubIfsPair {
    pub index: usize,
    pub u: Word,
    pub v: Word,
    /// The unchosen candidate pair, kept when no β-list decided selection.
    pub alternate: Option<(Word, Word)>,
    pub norm: Rational,
    pub count_vector: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubIfs {
    pub pairs: Vec<SubIfsPair>,
    /// Repetition count actually used (raised from the requested one until
    /// the count vectors reached full rank).
    pub used_n: u32,
}

/// Construct, for each map index `i`, a pair of words
/// `u = (pq) i^N r [r]` and `v = (qp) i^N r [r]` such that the count vectors
/// `n(u^{(i)})` are ℚ-linearly independent, `‖φ_u‖ = ‖φ_v‖` exactly, and the
/// two compositions have distinct fixed points. When a rational β-list is
/// supplied, the `r`-vs-`rr` suffix is chosen so `log ‖φ_u‖` stays outside
/// `span_ℚ{log β_j}`; otherwise both candidates are returned.
pub fn build_sub_ifs(
    sys: &IFSystem<Rational>,
    r_index: usize,
    n_repeat: u32,
    betas: Option<&[Rational]>,
) -> Result<SubIfs> {
    let m_count = sys.len();
    if r_index >= m_count {
        return Err(Error::BadIndex { index: r_index, len: m_count });
    }
    if let Some(bs) = betas {
        let alpha_r = sys
            .map(r_index)?
            .norm()
            .as_exact_rational()
            .ok_or_else(|| Error::Invalid("rational ratios required".into()))?;
        if in_log_span(&alpha_r, bs)?.is_some() {
            return Err(Error::Domain(format!(
                "log of ratio {alpha_r} lies in the rational span of the β-list"
            )));
        }
    }
    // p, q: first two indices with distinct fixed points
    let mut pq = None;
    'outer: for p in 0..m_count {
        for q in (p + 1)..m_count {
            let fp = sys.map(p)?.fixed_point()?;
            let fq = sys.map(q)?.fixed_point()?;
            if fp != fq {
                pq = Some((p as u8, q as u8));
                break 'outer;
            }
        }
    }
    let (p, q) = pq.ok_or_else(|| Error::Domain("all maps share one fixed point".into()))?;

    for n_try in n_repeat..=n_repeat + 64 {
        let mut pairs = Vec::with_capacity(m_count);
        for i in 0..m_count {
            let mut base = vec![p, q];
            base.extend(std::iter::repeat_n(i as u8, n_try as usize));
            base.push(r_index as u8);
            let u1 = Word(base.clone());
            let mut twice = base.clone();
            twice.push(r_index as u8);
            let u2 = Word(twice);

            let (u, alternate) = match betas {
                Some(bs) => {
                    let norm1 = sys.compose_word(&u1)?.norm();
                    let pick_u1 = in_log_span(&norm1, bs)?.is_none();
                    if pick_u1 {
                        (u1.clone(), None)
                    } else {
                        let norm2 = sys.compose_word(&u2)?.norm();
                        if in_log_span(&norm2, bs)?.is_none() {
                            (u2.clone(), None)
                        } else {
                            return Err(Error::Domain(
                                "both candidate norms lie in the β-span; the span \
                                 precondition fails"
                                    .into(),
                            ));
                        }
                    }
                }
                None => (u1.clone(), Some(u2.clone())),
            };

            let v = swap_prefix(&u, p, q);
            let alternate = alternate.map(|alt| {
                let alt_v = swap_prefix(&alt, p, q);
                (alt, alt_v)
            });
            let norm = sys.compose_word(&u)?.norm();
            let norm_v = sys.compose_word(&v)?.norm();
            if norm != norm_v {
                return Err(Error::Invalid("norms of u and v differ".into()));
            }
            let fu = sys.compose_word(&u)?.fixed_point()?;
            let fv = sys.compose_word(&v)?.fixed_point()?;
            if fu == fv {
                return Err(Error::Domain("constructed words share a fixed point".into()));
            }
            pairs.push(SubIfsPair {
                index: i,
                u: u.clone(),
                v,
                alternate,
                norm,
                count_vector: u.count_vector(m_count),
            });
        }
        // independence of the count vectors, exact integer rank
        let rows: Vec<Vec<BigInt>> = pairs
            .iter()
            .map(|pr| pr.count_vector.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        if integer_rank(rows) == m_count {
            return Ok(SubIfs { pairs, used_n: n_try });
        }
    }
    Err(Error::Domain(format!(
        "count vectors stayed rank-deficient up to repetition {}; increase N",
        n_repeat + 64
    )))
}

fn swap_prefix(w: &Word, p: u8, q: u8) -> Word {
    let mut v = w.0.clone();
    debug_assert!(v.len() >= 2 && v[0] == p && v[1] == q);
    v[0] = q;
    v[1] = p;
    Word(v)
}

//! Multi-rotation orbits and box-dimension estimators.
//!
//! A Λ-multi-rotation is a sequence `θ_{n+1} = θ_n + λ (mod 1)` with each
//! increment drawn from the finite set `Λ = {log β_j / log α}`. Orbits are
//! accumulated without reduction (the raw sum is exact for rational Λ and an
//! enclosure otherwise), so mod-1 distances carry no drift: the integer part
//! is only removed at observation time.
//!
//! Covering counts here use the mesh convention: `cov(E, r)` is the minimal
//! number of closed intervals of length `r` needed to cover `E`, computed by
//! a greedy sweep (optimal in one dimension).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{in_log_span, DioReport};
use crate::error::{Error, Result};
use crate::num::{default_precision, Enclosure, Rational};

/// One element of Λ: exact when `log β / log α` is rational, an enclosure
/// otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LambdaValue {
    Exact(Rational),
    Approx(Enclosure),
}

impl LambdaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LambdaValue::Exact(q) => q.to_f64(),
            LambdaValue::Approx(e) => e.mid_f64(),
        }
    }

    pub fn rational_upper(&self) -> Rational {
        match self {
            LambdaValue::Exact(q) => q.clone(),
            LambdaValue::Approx(e) => e.hi_rational(),
        }
    }

    fn to_enclosure(&self, prec: u32) -> Enclosure {
        match self {
            LambdaValue::Exact(q) => Enclosure::from_rational(q, prec),
            LambdaValue::Approx(e) => e.clone(),
        }
    }
}

/// The increment set Λ together with a rational upper bound for
/// `σ = max{1, λ_1, …, λ_L}` (the constant entering the separation bound).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaSet {
    pub values: Vec<LambdaValue>,
    pub sigma_upper: Rational,
}

impl LambdaSet {
    pub fn new(values: Vec<LambdaValue>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("empty increment set".into()));
        }
        let mut sigma = Rational::one();
        for v in &values {
            let up = v.rational_upper();
            if up <= Rational::zero() {
                return Err(Error::Domain("increments must be positive".into()));
            }
            sigma = sigma.max(up);
        }
        Ok(LambdaSet { values, sigma_upper: sigma })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Λ = {log β_j / log α}`, exact where a rational log-relation certifies
/// it, enclosure-valued otherwise.
pub fn lambda_of(alpha: &Rational, betas: &[Rational]) -> Result<LambdaSet> {
    if !(alpha.is_positive() && *alpha < Rational::one()) {
        return Err(Error::Domain(format!("ratio {alpha} outside (0,1)")));
    }
    let prec = default_precision();
    let log_alpha = Enclosure::from_rational(alpha, prec).ln()?;
    let mut values = Vec::with_capacity(betas.len());
    for beta in betas {
        if !(beta.is_positive() && *beta < Rational::one()) {
            return Err(Error::Domain(format!("ratio {beta} outside (0,1)")));
        }
        if let Some(coeffs) = in_log_span(beta, std::slice::from_ref(alpha))? {
            values.push(LambdaValue::Exact(coeffs[0].clone()));
        } else {
            let log_beta = Enclosure::from_rational(beta, prec).ln()?;
            values.push(LambdaValue::Approx(log_beta.div(&log_alpha)?));
        }
    }
    LambdaSet::new(values)
}

/// Raw (unreduced) orbit value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum OrbitValue {
    Exact(Rational),
    Approx(Enclosure),
}

impl OrbitValue {
    /// Fractional part in `[0,1)` (midpoint for enclosures; estimation only).
    pub fn frac_f64(&self) -> f64 {
        match self {
            OrbitValue::Exact(q) => q.fract().to_f64(),
            OrbitValue::Approx(e) => {
                let m = e.mid_f64();
                m - m.floor()
            }
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            OrbitValue::Exact(q) => Some(q),
            OrbitValue::Approx(_) => None,
        }
    }
}

/// How increments are selected along an orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ChoiceSeq {
    /// The same Λ-index at every step.
    Constant(usize),
    /// A repeating pattern of Λ-indices.
    Periodic(Vec<usize>),
    /// Reproducible pseudorandom indices with the recorded seed.
    Seeded(u64),
}

impl ChoiceSeq {
    fn materialize(&self, len: usize, lambda_len: usize) -> Result<Vec<usize>> {
        match self {
            ChoiceSeq::Constant(i) => {
                if *i >= lambda_len {
                    return Err(Error::BadIndex { index: *i, len: lambda_len });
                }
                Ok(vec![*i; len])
            }
            ChoiceSeq::Periodic(pattern) => {
                if pattern.is_empty() {
                    return Err(Error::Invalid("empty periodic pattern".into()));
                }
                for &i in pattern {
                    if i >= lambda_len {
                        return Err(Error::BadIndex { index: i, len: lambda_len });
                    }
                }
                Ok((0..len).map(|k| pattern[k % pattern.len()]).collect())
            }
            ChoiceSeq::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..len).map(|_| rng.random_range(0..lambda_len)).collect())
            }
        }
    }
}

/// A finite Λ-multi-rotation: raw sums, chosen increments and the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiRotation {
    pub origin: Rational,
    pub choices: Vec<usize>,
    /// `raw[n] = θ0 + Σ_{k<n} Λ[choices[k]]`, length `N+1` (includes n = 0).
    pub raw: Vec<OrbitValue>,
}

impl MultiRotation {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn theta_f64(&self, n: usize) -> f64 {
        self.raw[n].frac_f64()
    }

    pub fn thetas_f64(&self) -> Vec<f64> {
        self.raw.iter().map(|v| v.frac_f64()).collect()
    }

    /// Re-check the increment invariant against the generating set.
    pub fn validate(&self, lambda: &LambdaSet) -> bool {
        if self.raw.len() != self.choices.len() + 1 {
            return false;
        }
        let prec = default_precision();
        for (n, &c) in self.choices.iter().enumerate() {
            if c >= lambda.len() {
                return false;
            }
            match (&self.raw[n], &self.raw[n + 1], &lambda.values[c]) {
                (OrbitValue::Exact(a), OrbitValue::Exact(b), LambdaValue::Exact(l)) => {
                    if &(b - a) != l {
                        return false;
                    }
                }
                (a, b, l) => {
                    let ea = match a {
                        OrbitValue::Exact(q) => Enclosure::from_rational(q, prec),
                        OrbitValue::Approx(e) => e.clone(),
                    };
                    let eb = match b {
                        OrbitValue::Exact(q) => Enclosure::from_rational(q, prec),
                        OrbitValue::Approx(e) => e.clone(),
                    };
                    let inc = eb.sub(&ea);
                    let le = l.to_enclosure(prec);
                    if inc.disjoint(&le) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Rigorous mod-1 distance between two orbit points as an enclosure
    /// (width zero in the exact lane).
    pub fn mod1_distance(&self, i: usize, j: usize) -> Enclosure {
        let prec = default_precision();
        match (&self.raw[i], &self.raw[j]) {
            (OrbitValue::Exact(a), OrbitValue::Exact(b)) => {
                let d = (a - b).fract().abs();
                let dist = d.clone().min(&Rational::one() - &d);
                Enclosure::from_rational(&dist, prec)
            }
            (a, b) => {
                let ea = match a {
                    OrbitValue::Exact(q) => Enclosure::from_rational(q, prec),
                    OrbitValue::Approx(e) => e.clone(),
                };
                let eb = match b {
                    OrbitValue::Exact(q) => Enclosure::from_rational(q, prec),
                    OrbitValue::Approx(e) => e.clone(),
                };
                let diff = ea.sub(&eb);
                // distance to the nearest integers around the midpoint; the
                // minimum over adjacent candidates bounds the mod-1 distance
                let mid = diff.mid_f64().round() as i64;
                let mut best: Option<Enclosure> = None;
                for m in [mid - 1, mid, mid + 1] {
                    let cand = diff.sub(&Enclosure::from_int(m, prec)).abs();
                    best = Some(match best {
                        None => cand,
                        Some(cur) => {
                            if cand.lo_rational() < cur.lo_rational() {
                                cand
                            } else {
                                cur
                            }
                        }
                    });
                }
                best.unwrap()
            }
        }
    }
}

/// Generate a Λ-multi-rotation of length `n_steps` (plus the origin).
/// Accumulation is exact in the rational lane; the enclosure lane keeps raw
/// sums so width grows only additively with the step count.
pub fn generate_multirotation(
    lambda: &LambdaSet,
    theta0: &Rational,
    choices: &ChoiceSeq,
    n_steps: usize,
) -> Result<MultiRotation> {
    let idx = choices.materialize(n_steps, lambda.len())?;
    let all_exact = lambda.values.iter().all(|v| matches!(v, LambdaValue::Exact(_)));
    let prec = default_precision();
    let mut raw = Vec::with_capacity(n_steps + 1);
    if all_exact {
        let mut acc = theta0.clone();
        raw.push(OrbitValue::Exact(acc.clone()));
        for &c in &idx {
            let LambdaValue::Exact(l) = &lambda.values[c] else { unreachable!() };
            acc = &acc + l;
            raw.push(OrbitValue::Exact(acc.clone()));
        }
    } else {
        let mut acc = Enclosure::from_rational(theta0, prec);
        raw.push(OrbitValue::Approx(acc.clone()));
        for &c in &idx {
            acc = acc.add(&lambda.values[c].to_enclosure(prec));
            raw.push(OrbitValue::Approx(acc.clone()));
        }
    }
    Ok(MultiRotation { origin: theta0.clone(), choices: idx, raw })
}

// ---------------------------------------------------------------------------
// covering counts and box dimension

/// Exact greedy covering count of a rational point set by closed intervals
/// of length `mesh`.
pub fn covering_count(points: &[Rational], mesh: &Rational) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    if !mesh.is_positive() {
        return Err(Error::Invalid("mesh must be positive".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    let mut count = 1usize;
    let mut cover_end = &sorted[0] + mesh;
    for p in &sorted[1..] {
        if *p > cover_end {
            count += 1;
            cover_end = p + mesh;
        }
    }
    Ok(count)
}

/// Greedy covering count for float data (estimation lanes).
pub fn covering_count_f64(points: &[f64], mesh: f64) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    if mesh.is_nan() || mesh <= 0.0 {
        return Err(Error::Invalid("mesh must be positive".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut count = 1usize;
    let mut cover_end = sorted[0] + mesh;
    for &p in &sorted[1..] {
        if p > cover_end {
            count += 1;
            cover_end = p + mesh;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxDimEstimate {
    /// `(mesh, covering count)` per scale, largest mesh first.
    pub counts: Vec<(f64, usize)>,
    /// Least-squares slope of `log cov` against `log(1/mesh)`.
    pub slope: f64,
}

fn fit_slope(counts: &[(f64, usize)]) -> f64 {
    let xs: Vec<f64> = counts.iter().map(|(r, _)| (1.0 / r).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, c)| (*c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Box-dimension estimate from exact covering counts at rational scales.
pub fn box_dim_estimate(points: &[Rational], scales: &[Rational]) -> Result<BoxDimEstimate> {
    if scales.len() < 2 {
        return Err(Error::Invalid("need at least two scales".into()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.cmp_rat(a));
    scales.dedup();
    let mut counts = Vec::with_capacity(scales.len());
    for r in &scales {
        counts.push((r.to_f64(), covering_count(points, r)?));
    }
    Ok(BoxDimEstimate { slope: fit_slope(&counts), counts })
}

/// Box-dimension estimate for float data.
pub fn box_dim_estimate_f64(points: &[f64], scales: &[f64]) -> Result<BoxDimEstimate> {
    if scales.len() < 2 {
        return Err(Error::Invalid("need at least two scales".into()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.partial_cmp(a).unwrap());
    scales.dedup();
    let mut counts = Vec::with_capacity(scales.len());
    for &r in &scales {
        counts.push((r, covering_count_f64(points, r)?));
    }
    Ok(BoxDimEstimate { slope: fit_slope(&counts), counts })
}

// ---------------------------------------------------------------------------
// index sets and density

/// Finite sorted subset of `{1, …, N}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexSet {
    members: Vec<u32>,
    horizon: u32,
}

impl IndexSet {
    pub fn new(mut members: Vec<u32>, horizon: u32) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Invalid("horizon must be positive".into()));
        }
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&m| m == 0 || m > horizon) {
            return Err(Error::Invalid("members must lie in [1, horizon]".into()));
        }
        Ok(IndexSet { members, horizon })
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Finite-horizon density surrogates: the min and max of the running
    /// ratio `|U ∩ [1,n]|/n` over the checkpoint window `√N ≤ n ≤ N`
    /// (small-`n` noise is excluded). These bracket finite-horizon behavior
    /// only; no claim is made about the limit.
    pub fn density_bounds(&self) -> (Rational, Rational) {
        let start = (self.horizon as f64).sqrt().floor() as u32;
        let start = start.max(1);
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        let mut count = 0usize;
        let mut next = 0usize;
        for n in 1..=self.horizon {
            if next < self.members.len() && self.members[next] == n {
                count += 1;
                next += 1;
            }
            if n < start {
                continue;
            }
            let ratio = Rational::new(count as i64, n as i64);
            lower = Some(match lower {
                None => ratio.clone(),
                Some(cur) => cur.min(ratio.clone()),
            });
            upper = Some(match upper {
                None => ratio,
                Some(cur) => cur.max(ratio),
            });
        }
        (lower.unwrap(), upper.unwrap())
    }

    /// Running ratio exactly at the horizon.
    pub fn horizon_ratio(&self) -> Rational {
        Rational::new(self.members.len() as i64, self.horizon as i64)
    }
}

// ---------------------------------------------------------------------------
// separation probe

/// Report of the quantitative separation consequence: when the nonnegative
/// coefficient condition holds with exponent `c` at horizon `N`, the first
/// `N` orbit points are pairwise `(σN)^{-c}`-separated mod 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationCheck {
    pub exponent_c: Rational,
    pub horizon: u32,
    pub sigma_upper: Rational,
    /// Pairs whose distance is certainly below the bound.
    pub failures: Vec<(usize, usize)>,
    /// Pairs undecidable at the working precision.
    pub undecided: Vec<(usize, usize)>,
    /// Smallest pairwise distance lower bound observed.
    pub min_distance_lower: Rational,
    /// Covering count of the first-`N` block at half the separation mesh;
    /// equals `N` when the separation holds.
    pub cov_at_half_mesh: usize,
}

impl SeparationCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.undecided.is_empty()
    }
}

/// Exhaustively check pairwise mod-1 separation `≥ (σN)^{-c}` among
/// `θ_1, …, θ_N`.
pub fn check_separation(
    orbit: &MultiRotation,
    lambda: &LambdaSet,
    c: &Rational,
    horizon: u32,
) -> Result<SeparationCheck> {
    use num_traits::ToPrimitive;
    let n = horizon as usize;
    if orbit.len() < n + 1 {
        return Err(Error::Invalid(format!("orbit has {} points, need {}", orbit.len(), n + 1)));
    }
    let p = c.numer().to_u32().ok_or_else(|| Error::Invalid("exponent too large".into()))?;
    let q = c.denom().to_u32().ok_or_else(|| Error::Invalid("exponent too large".into()))?;
    // threshold t = (σN)^{-c}: dist ≥ t iff dist^q (σN)^p ≥ 1
    let sigma_n = &lambda.sigma_upper * &Rational::from_int(horizon as i64);
    let sigma_n_pow = sigma_n.pow(p as i32)?;
    let mut failures = Vec::new();
    let mut undecided = Vec::new();
    let mut min_lower: Option<Rational> = None;
    for i in 1..=n {
        for j in (i + 1)..=n {
            let dist = self_distance(orbit, i, j);
            let lo = dist.lo_rational().max(Rational::zero());
            let hi = dist.hi_rational();
            min_lower = Some(match min_lower {
                None => lo.clone(),
                Some(cur) => cur.min(lo.clone()),
            });
            let lo_ok = &lo.pow(q as i32)? * &sigma_n_pow >= Rational::one();
            if lo_ok {
                continue;
            }
            let hi_ok = &hi.pow(q as i32).unwrap_or_else(|_| Rational::zero()) * &sigma_n_pow
                >= Rational::one();
            if hi_ok {
                undecided.push((i, j));
            } else {
                failures.push((i, j));
            }
        }
    }
    // with pairwise separation ≥ t, intervals of length t/2 isolate points
    let approx_t = sigma_n.to_f64().powf(-c.to_f64());
    let pts: Vec<f64> = (1..=n).map(|i| orbit.theta_f64(i)).collect();
    let cov = covering_count_f64(&pts, approx_t / 2.0)?;
    Ok(SeparationCheck {
        exponent_c: c.clone(),
        horizon,
        sigma_upper: lambda.sigma_upper.clone(),
        failures,
        undecided,
        min_distance_lower: min_lower.unwrap_or_else(Rational::zero),
        cov_at_half_mesh: cov,
    })
}

fn self_distance(orbit: &MultiRotation, i: usize, j: usize) -> Enclosure {
    orbit.mod1_distance(i, j)
}

/// Probe report tying a restricted orbit's box dimension to an optional
/// certified separation consequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RProbeReport {
    pub restricted_dim: BoxDimEstimate,
    pub restricted_size: usize,
    pub separation: Option<SeparationCheck>,
}

/// Estimate the box dimension of `{θ_i : i ∈ U}` and, when a scan report
/// certifying the nonnegative-coefficient condition is supplied, verify the
/// quantitative pairwise-separation consequence at that report's horizon.
pub fn probe_r_conditions(
    lambda: &LambdaSet,
    orbit: &MultiRotation,
    u: &IndexSet,
    scales: &[f64],
    d_certificate: Option<&DioReport>,
) -> Result<RProbeReport> {
    if u.horizon() as usize >= orbit.len() {
        return Err(Error::Invalid("index-set horizon exceeds orbit length".into()));
    }
    let pts: Vec<f64> = u.members().iter().map(|&i| orbit.theta_f64(i as usize)).collect();
    let restricted_dim = box_dim_estimate_f64(&pts, scales)?;
    let separation = match d_certificate {
        Some(report) => {
            let horizon = u.horizon().min(report.n_max);
            if !report.good_n.contains(&horizon) {
                None
            } else {
                Some(check_separation(orbit, lambda, &report.exponent_c, horizon)?)
            }
        }
        None => None,
    };
    Ok(RProbeReport { restricted_dim, restricted_size: pts.len(), separation })
}

/// Non-rigorous upper estimate for the infimum of orbit box dimensions: the
/// minimum slope over a deterministic sample of orbits (constant, short
/// periodic, and seeded pseudorandom choice sequences).
pub fn delta_upper_estimate(
    lambda: &LambdaSet,
    n_steps: usize,
    scales: &[f64],
    seeds: &[u64],
) -> Result<(f64, Vec<(String, f64)>)> {
    let mut rows = Vec::new();
    for i in 0..lambda.len() {
        let orbit =
            generate_multirotation(lambda, &Rational::zero(), &ChoiceSeq::Constant(i), n_steps)?;
        let est = box_dim_estimate_f64(&orbit.thetas_f64(), scales)?;
        rows.push((format!("constant:{i}"), est.slope));
    }
    if lambda.len() >= 2 {
        let pattern: Vec<usize> = (0..lambda.len()).collect();
        let orbit = generate_multirotation(
            lambda,
            &Rational::zero(),
            &ChoiceSeq::Periodic(pattern.clone()),
            n_steps,
        )?;
        let est = box_dim_estimate_f64(&orbit.thetas_f64(), scales)?;
        rows.push((format!("periodic:{pattern:?}"), est.slope));
    }
    for &seed in seeds {
        let orbit =
            generate_multirotation(lambda, &Rational::zero(), &ChoiceSeq::Seeded(seed), n_steps)?;
        let est = box_dim_estimate_f64(&orbit.thetas_f64(), scales)?;
        rows.push((format!("seeded:{seed}"), est.slope));
    }
    let min = rows.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    Ok((min, rows))
}

//! Dyadic cells, magnification of atomic measures, the single Markov step
//! of the zoom-in chain, linear projections, and covering-profile
//! estimators.
//!
//! All measures are finitely supported with exact rational atoms and
//! weights, so restriction, renormalization and homothety pushforwards are
//! exact operations. Covering profiles use the ball-radius convention
//! (`cov(S, δ)` counts closed balls of radius `δ`, i.e. intervals of length
//! `2δ`); in two dimensions the grid count is within a factor 4 of the
//! optimal ball cover.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Rational;

/// Point in `ℝ^d` with exact rational coordinates (`d` ∈ {1, 2}).
pub type Point = Vec<Rational>;

/// Half-open dyadic cell `Π [k_i/2^n, (k_i+1)/2^n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCell {
    pub level: u32,
    pub coords: Vec<i64>,
}

impl DyadicCell {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The unique level-`n` cell containing `x` (exact floor computation).
    pub fn of_point(x: &[Rational], level: u32) -> DyadicCell {
        use num_traits::ToPrimitive;
        let scale = Rational::from_bigint(num_bigint::BigInt::from(1) << level as usize);
        let coords = x
            .iter()
            .map(|xi| {
                (xi * &scale)
                    .floor_int()
                    .to_i64()
                    .expect("cell coordinate exceeds i64")
            })
            .collect();
        DyadicCell { level, coords }
    }

    pub fn side(&self) -> Rational {
        Rational::one() / Rational::from_bigint(num_bigint::BigInt::from(1) << self.level as usize)
    }

    pub fn lower_corner(&self) -> Point {
        let side = self.side();
        self.coords.iter().map(|&k| &Rational::from_int(k) * &side).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if x.len() != self.coords.len() {
            return false;
        }
        let side = self.side();
        self.coords.iter().zip(x).all(|(&k, xi)| {
            let lo = &Rational::from_int(k) * &side;
            let hi = &lo + &side;
            &lo <= xi && xi < &hi
        })
    }

    /// Orientation-preserving homothety mapping this cell onto `[0,1)^d`.
    pub fn magnifier(&self) -> impl Fn(&[Rational]) -> Point + '_ {
        let side = self.side();
        let corner = self.lower_corner();
        move |x: &[Rational]| {
            x.iter().zip(&corner).map(|(xi, ci)| &(xi - ci) / &side).collect()
        }
    }
}

/// Finitely supported probability measure with exact rational weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<(Point, Rational)>,
}

impl AtomicMeasure {
    /// Build from raw atoms: merges duplicate points, requires positive
    /// weights summing to one.
    pub fn new(raw: Vec<(Point, Rational)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Invalid("measure needs at least one atom".into()));
        }
        let dim = raw[0].0.len();
        if dim == 0 || dim > 2 {
            return Err(Error::Invalid("supported dimensions are 1 and 2".into()));
        }
        let mut atoms: Vec<(Point, Rational)> = Vec::new();
        let mut sorted = raw;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for (p, w) in sorted {
            if p.len() != dim {
                return Err(Error::Invalid("mixed atom dimensions".into()));
            }
            if !w.is_positive() {
                return Err(Error::Invalid("atom weights must be positive".into()));
            }
            match atoms.last_mut() {
                Some((q, wq)) if *q == p => {
                    *wq = &*wq + &w;
                }
                _ => atoms.push((p, w)),
            }
        }
        let total: Rational =
            atoms.iter().fold(Rational::zero(), |acc, (_, w)| &acc + w);
        if total != Rational::one() {
            return Err(Error::Invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(AtomicMeasure { atoms })
    }

    /// Uniform measure on the given points.
    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Invalid("empty support".into()));
        }
        let w = Rational::new(1, n as i64);
        AtomicMeasure::new(points.into_iter().map(|p| (p, w.clone())).collect())
    }

    pub fn dirac(point: Point) -> Self {
        AtomicMeasure { atoms: vec![(point, Rational::one())] }
    }

    pub fn atoms(&self) -> &[(Point, Rational)] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.len()
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().fold(Rational::zero(), |acc, (_, w)| &acc + w)
    }

    pub fn mass_in(&self, cell: &DyadicCell) -> Rational {
        self.atoms
            .iter()
            .filter(|(p, _)| cell.contains(p))
            .fold(Rational::zero(), |acc, (_, w)| &acc + w)
    }

    /// Conditional measure on `cell`, magnified onto the unit cube:
    /// restrict, renormalize, push forward through the cell's homothety.
    pub fn magnify(&self, cell: &DyadicCell) -> Result<AtomicMeasure> {
        let mass = self.mass_in(cell);
        if mass.is_zero() {
            return Err(Error::Domain("cell carries no mass".into()));
        }
        let h = cell.magnifier();
        let atoms: Vec<(Point, Rational)> = self
            .atoms
            .iter()
            .filter(|(p, _)| cell.contains(p))
            .map(|(p, w)| (h(p), w / &mass))
            .collect();
        AtomicMeasure::new(atoms)
    }

    /// All cells of the given level carrying mass, in canonical coordinate
    /// order, with their masses.
    pub fn occupied_cells(&self, level: u32) -> Vec<(DyadicCell, Rational)> {
        let mut cells: Vec<(DyadicCell, Rational)> = Vec::new();
        for (p, w) in &self.atoms {
            let cell = DyadicCell::of_point(p, level);
            match cells.iter_mut().find(|(c, _)| *c == cell) {
                Some((_, acc)) => *acc = &*acc + w,
                None => cells.push((cell, w.clone())),
            }
        }
        cells.sort_by(|a, b| a.0.coords.cmp(&b.0.coords));
        cells
    }

    /// One Markov step of the zoom-in chain: sample a level-`n` cell with
    /// probability equal to its mass (using the caller's seeded source) and
    /// return the magnified conditional measure.
    pub fn cp_step<R: Rng>(
        &self,
        level: u32,
        rng: &mut R,
    ) -> Result<(DyadicCell, AtomicMeasure)> {
        let cells = self.occupied_cells(level);
        // exact uniform draw: a 64-bit numerator over 2^64
        let raw: u64 = rng.random();
        let u = Rational::new_bigint(
            num_bigint::BigInt::from(raw),
            num_bigint::BigInt::from(1u8) << 64,
        );
        let mut acc = Rational::zero();
        for (cell, mass) in &cells {
            acc = &acc + mass;
            if u < acc {
                return Ok((cell.clone(), self.magnify(cell)?));
            }
        }
        // numerical guard: total mass is exactly one, so we only land here
        // when u equals the full cumulative sum; take the last cell
        let (cell, _) = cells.last().expect("measure has atoms");
        Ok((cell.clone(), self.magnify(cell)?))
    }

    /// Exact pushforward through `π_σ(u, v) = σu + v` (2-d to 1-d).
    pub fn project(&self, sigma: &Rational) -> Result<AtomicMeasure> {
        if self.dim() != 2 {
            return Err(Error::Invalid("projection expects a planar measure".into()));
        }
        let atoms: Vec<(Point, Rational)> = self
            .atoms
            .iter()
            .map(|(p, w)| (vec![&(sigma * &p[0]) + &p[1]], w.clone()))
            .collect();
        AtomicMeasure::new(atoms)
    }
}

/// Diagnostic distance between two atomic measures on the line: the exact
/// integral of |F_μ − F_ν| (a bounded-Lipschitz-type discrepancy; for
/// probability measures on `[0,1]` this is the transport distance). Used
/// for diagnostics only — no claim is made that it matches any particular
/// metric on the space of measures.
pub fn discrepancy_1d(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<Rational> {
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(Error::Invalid("discrepancy expects measures on the line".into()));
    }
    // merge atom positions; between consecutive positions the CDF difference
    // is constant
    let mut events: Vec<(Rational, Rational, Rational)> = Vec::new();
    for (p, w) in mu.atoms() {
        events.push((p[0].clone(), w.clone(), Rational::zero()));
    }
    for (p, w) in nu.atoms() {
        events.push((p[0].clone(), Rational::zero(), w.clone()));
    }
    events.sort_by(|a, b| a.0.cmp_rat(&b.0));
    let mut total = Rational::zero();
    let mut diff = Rational::zero();
    let mut prev: Option<Rational> = None;
    for (x, dmu, dnu) in events {
        if let Some(p) = &prev {
            if x > *p {
                total = &total + &(&diff.abs() * &(&x - p));
            }
        }
        diff = &diff + &(&dmu - &dnu);
        prev = Some(x);
    }
    Ok(total)
}

/// Exact pushforward of a planar point set through `π_σ`.
pub fn project_points(sigma: &Rational, points: &[Point]) -> Result<Vec<Rational>> {
    points
        .iter()
        .map(|p| {
            if p.len() != 2 {
                return Err(Error::Invalid("projection expects planar points".into()));
            }
            Ok(&(sigma * &p[0]) + &p[1])
        })
        .collect()
}

// ---------------------------------------------------------------------------
// covering profiles

/// Exact covering count of `E ∩ B_R(x)` by closed balls of radius `R·r`
/// (1-d: greedy optimal; 2-d: occupied-grid count, within factor 4 of the
/// optimal ball cover).
pub fn covering_profile(
    points: &[Point],
    center: &[Rational],
    outer_radius: &Rational,
    ratio: &Rational,
) -> Result<usize> {
    if !(outer_radius.is_positive() && ratio.is_positive() && *ratio < Rational::one()) {
        return Err(Error::Invalid("need R > 0 and r in (0,1)".into()));
    }
    if points.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    let dim = center.len();
    let small = outer_radius * ratio;
    let restricted: Vec<&Point> = points
        .iter()
        .filter(|p| {
            p.len() == dim
                && p.iter()
                    .zip(center)
                    .all(|(pi, ci)| (pi - ci).abs() <= *outer_radius)
        })
        .collect();
    if restricted.is_empty() {
        return Ok(0);
    }
    match dim {
        1 => {
            let coords: Vec<Rational> = restricted.iter().map(|p| p[0].clone()).collect();
            let mesh = &Rational::from_int(2) * &small; // ball of radius δ = interval of length 2δ
            crate::orbits::covering_count(&coords, &mesh)
        }
        2 => {
            // occupied cells of the grid with side 2δ
            let mesh = &Rational::from_int(2) * &small;
            let mut cells: Vec<(num_bigint::BigInt, num_bigint::BigInt)> = restricted
                .iter()
                .map(|p| ((&p[0] / &mesh).floor_int(), (&p[1] / &mesh).floor_int()))
                .collect();
            cells.sort();
            cells.dedup();
            Ok(cells.len())
        }
        _ => Err(Error::Invalid("supported dimensions are 1 and 2".into())),
    }
}

/// Localized covering-exponent estimate: the maximum over sampled dyadic
/// centers and outer radii of the least-squares slope of
/// `log cov(B_R(x) ∩ E, R·r)` against `log(1/r)`. A finite-scale surrogate,
/// not a certified quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssouadEstimate {
    pub estimate: f64,
    /// Center and outer radius attaining the maximum.
    pub argmax_center: Point,
    pub argmax_radius: Rational,
    pub samples: usize,
}

pub fn assouad_estimate(
    points: &[Point],
    outer_levels: std::ops::Range<u32>,
    ratios: &[Rational],
) -> Result<AssouadEstimate> {
    if points.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    if ratios.len() < 2 {
        return Err(Error::Invalid("need at least two ratios".into()));
    }
    let mut best: Option<(f64, Point, Rational)> = None;
    let mut samples = 0usize;
    for level in outer_levels {
        let radius = Rational::one()
            / Rational::from_bigint(num_bigint::BigInt::from(1) << level as usize);
        // centers on the dyadic skeleton: lower corners of occupied cells
        let mut centers: Vec<Point> = points
            .iter()
            .map(|p| DyadicCell::of_point(p, level).lower_corner())
            .collect();
        centers.sort();
        centers.dedup();
        for center in centers {
            samples += 1;
            let mut rows = Vec::with_capacity(ratios.len());
            let mut usable = true;
            for r in ratios {
                let cov = covering_profile(points, &center, &radius, r)?;
                if cov == 0 {
                    usable = false;
                    break;
                }
                rows.push((r.to_f64(), cov));
            }
            if !usable {
                continue;
            }
            let slope = fit_profile_slope(&rows);
            if best.as_ref().map(|(b, _, _)| slope > *b).unwrap_or(true) {
                best = Some((slope, center, radius.clone()));
            }
        }
    }
    let (estimate, argmax_center, argmax_radius) =
        best.ok_or_else(|| Error::Domain("no usable localization".into()))?;
    Ok(AssouadEstimate { estimate, argmax_center, argmax_radius, samples })
}

fn fit_profile_slope(rows: &[(f64, usize)]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|(r, _)| (1.0 / r).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, c)| (*c as f64).ln()).collect();
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

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pt1(q: Rational) -> Point {
        vec![q]
    }

    #[test]
    fn cell_of_examples() {
        let c = DyadicCell::of_point(&[r(3, 10)], 2);
        assert_eq!(c.coords, vec![1]); // [1/4, 1/2)
        let c = DyadicCell::of_point(&[r(0, 1)], 5);
        assert_eq!(c.coords, vec![0]);
        let c = DyadicCell::of_point(&[r(3, 10), r(7, 10)], 1);
        assert_eq!(c.coords, vec![0, 1]); // [0,1/2) × [1/2,1)
    }

    #[test]
    fn magnify_examples() {
        let mu = AtomicMeasure::uniform(vec![
            pt1(r(1, 10)),
            pt1(r(3, 10)),
            pt1(r(7, 10)),
        ])
        .unwrap();
        let d = DyadicCell { level: 1, coords: vec![0] }; // [0, 1/2)
        let nu = mu.magnify(&d).unwrap();
        assert_eq!(nu.atoms().len(), 2);
        assert_eq!(nu.atoms()[0].0[0], r(1, 5));
        assert_eq!(nu.atoms()[1].0[0], r(3, 5));
        assert_eq!(nu.atoms()[0].1, r(1, 2));
        assert_eq!(nu.total_mass(), Rational::one());

        // the unit cell is the identity on measures supported there
        let d0 = DyadicCell { level: 0, coords: vec![0] };
        assert_eq!(mu.magnify(&d0).unwrap(), mu);

        // a single atom magnifies to a Dirac mass
        let d = DyadicCell { level: 1, coords: vec![1] };
        let nu = mu.magnify(&d).unwrap();
        assert_eq!(nu.atoms().len(), 1);
        assert_eq!(nu.atoms()[0].1, Rational::one());
    }

    #[test]
    fn magnify_mass_errors() {
        let mu = AtomicMeasure::dirac(pt1(r(1, 10)));
        let empty_cell = DyadicCell { level: 2, coords: vec![3] };
        assert!(mu.magnify(&empty_cell).is_err());
    }

    #[test]
    fn magnify_cocycle_on_nested_cells() {
        // magnify(magnify(μ, D1), H_{D1}(D2)) == magnify(μ, D2) for D2 ⊆ D1
        let mu = AtomicMeasure::uniform(vec![
            pt1(r(1, 16)),
            pt1(r(3, 16)),
            pt1(r(5, 16)),
            pt1(r(11, 16)),
        ])
        .unwrap();
        let d1 = DyadicCell { level: 1, coords: vec![0] }; // [0,1/2)
        let d2 = DyadicCell { level: 2, coords: vec![0] }; // [0,1/4) ⊆ D1
        let lhs = mu.magnify(&d1).unwrap().magnify(&DyadicCell { level: 1, coords: vec![0] });
        let rhs = mu.magnify(&d2);
        assert_eq!(lhs.unwrap(), rhs.unwrap());
    }

    #[test]
    fn cp_step_single_cell_is_deterministic() {
        let mu = AtomicMeasure::uniform(vec![pt1(r(1, 10)), pt1(r(2, 10))]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let (cell, _) = mu.cp_step(1, &mut rng).unwrap();
            assert_eq!(cell.coords, vec![0]);
        }
    }

    #[test]
    fn cp_step_frequencies_match_masses() {
        // μ = ½δ_{0.1} + ½δ_{0.9}: each half-cell drawn with probability 1/2
        let mu = AtomicMeasure::uniform(vec![pt1(r(1, 10)), pt1(r(9, 10))]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 10_000;
        let mut left = 0u32;
        for _ in 0..draws {
            let (cell, _) = mu.cp_step(1, &mut rng).unwrap();
            if cell.coords == vec![0] {
                left += 1;
            }
        }
        // binomial(10^4, 1/2): |count − 5000| ≤ 4σ = 200
        assert!((left as i64 - 5000).abs() <= 200, "left count {left}");
    }

    #[test]
    fn project_examples() {
        let mu = AtomicMeasure::uniform(vec![
            vec![r(1, 1), r(1, 1)],
            vec![r(0, 1), r(1, 2)],
        ])
        .unwrap();
        // σ = 0: second-coordinate projection
        let p0 = mu.project(&r(0, 1)).unwrap();
        assert_eq!(p0.atoms()[0].0[0], r(1, 2));
        assert_eq!(p0.atoms()[1].0[0], r(1, 1));
        // σ = 1: (1,1) ↦ 2
        let p1 = mu.project(&r(1, 1)).unwrap();
        assert_eq!(p1.atoms()[1].0[0], r(2, 1));

        // product structure: δ_a × ν projects to ν translated by σa
        let nu = AtomicMeasure::uniform(vec![
            vec![r(1, 4), r(1, 8)],
            vec![r(1, 4), r(5, 8)],
        ])
        .unwrap();
        let proj = nu.project(&r(2, 1)).unwrap();
        assert_eq!(proj.atoms()[0].0[0], &r(1, 2) + &r(1, 8));
        assert_eq!(proj.atoms()[1].0[0], &r(1, 2) + &r(5, 8));
    }

    #[test]
    fn covering_profile_grid() {
        let grid: Vec<Point> = (0..256).map(|k| pt1(r(k, 256))).collect();
        let cov = covering_profile(&grid, &[r(1, 2)], &r(1, 2), &r(1, 16)).unwrap();
        assert_eq!(cov, 16);

        let single = vec![pt1(r(1, 3))];
        assert_eq!(covering_profile(&single, &[r(1, 3)], &r(1, 4), &r(1, 8)).unwrap(), 1);
    }

    #[test]
    fn covering_profile_cantor_self_similarity() {
        // depth-m middle-thirds endpoints: B_{3^{-j}}(0) ∩ E re-scales, and
        // cov at radius 3^{-i-j} is 2^i
        let m = 8;
        let mut points = Vec::new();
        for w in 0..(1u32 << m) {
            let mut lo = Rational::zero();
            let mut scale = Rational::one();
            for bit in (0..m).rev() {
                scale = &scale * &r(1, 3);
                if (w >> bit) & 1 == 1 {
                    lo = &lo + &(&scale * &r(2, 1));
                }
            }
            points.push(pt1(lo.clone()));
            points.push(pt1(&lo + &scale));
        }
        for j in 1..=3u32 {
            for i in 2..=4u32 {
                let outer = r(1, 3i64.pow(j));
                let ratio = r(1, 3i64.pow(i));
                let cov = covering_profile(&points, &[r(0, 1)], &outer, &ratio).unwrap();
                assert_eq!(cov, 1usize << i, "j={j} i={i}");
            }
        }
    }

    #[test]
    fn assouad_estimate_of_grid_is_about_one() {
        let grid: Vec<Point> = (0..512).map(|k| pt1(r(k, 512))).collect();
        let ratios: Vec<Rational> = (2..=5).map(|i| r(1, 1 << i)).collect();
        let est = assouad_estimate(&grid, 0..3, &ratios).unwrap();
        assert!(est.estimate > 0.9 && est.estimate < 1.1, "estimate {}", est.estimate);
    }

    #[test]
    fn assouad_estimate_of_cantor_endpoints() {
        // depth-10 middle-thirds cylinder endpoints; for strongly separated
        // self-similar sets the localized exponent matches the global one
        let m = 10;
        let mut points = Vec::new();
        for w in 0..(1u32 << m) {
            let mut lo = Rational::zero();
            let mut scale = Rational::one();
            for bit in (0..m).rev() {
                scale = &scale * &r(1, 3);
                if (w >> bit) & 1 == 1 {
                    lo = &lo + &(&scale * &r(2, 1));
                }
            }
            points.push(pt1(lo.clone()));
            points.push(pt1(&lo + &scale));
        }
        let ratios: Vec<Rational> = (2..=5u32).map(|i| r(1, 3i64.pow(i))).collect();
        let est = assouad_estimate(&points, 0..3, &ratios).unwrap();
        assert!(
            est.estimate > 0.55 && est.estimate < 0.72,
            "estimate {} outside [0.55, 0.72]",
            est.estimate
        );

        // monotone in localization: adding a dense segment can only raise
        // the estimate
        let mut with_grid = points.clone();
        for k in 0..256 {
            with_grid.push(pt1(&r(2, 1) + &r(k, 256)));
        }
        let est2 = assouad_estimate(&with_grid, 0..3, &ratios).unwrap();
        assert!(est2.estimate >= est.estimate - 1e-9);
    }

    #[test]
    fn discrepancy_examples() {
        let a = AtomicMeasure::dirac(pt1(r(0, 1)));
        let b = AtomicMeasure::dirac(pt1(r(1, 2)));
        // transporting a unit mass by 1/2
        assert_eq!(discrepancy_1d(&a, &b).unwrap(), r(1, 2));
        assert_eq!(discrepancy_1d(&a, &a).unwrap(), Rational::zero());
        let c = AtomicMeasure::uniform(vec![pt1(r(0, 1)), pt1(r(1, 1))]).unwrap();
        assert_eq!(discrepancy_1d(&a, &c).unwrap(), r(1, 2));
    }

    #[test]
    fn cp_step_of_cylinder_point_measure_stays_in_family() {
        // uniform measure on the depth-m cylinder points φ_w(0) of the
        // middle-thirds system; one zoom-in step on the left dyadic half
        // lands on the (2/3)-scaled copy of the depth-(m-1) family
        let m = 6;
        let mut sigma = vec![Rational::zero()];
        for _ in 0..m {
            let mut next = Vec::new();
            for s in &sigma {
                next.push(s * &r(1, 3));
                next.push(&(s * &r(1, 3)) + &r(2, 3));
            }
            sigma = next;
        }
        let mu = AtomicMeasure::uniform(sigma.iter().map(|s| pt1(s.clone())).collect()).unwrap();
        let left = DyadicCell { level: 1, coords: vec![0] };
        let nu = mu.magnify(&left).unwrap();
        // expected: 2·φ₁(σ') = (2/3)·σ' over depth-(m-1) points σ'
        let mut expected = vec![Rational::zero()];
        for _ in 0..(m - 1) {
            let mut next = Vec::new();
            for s in &expected {
                next.push(s * &r(1, 3));
                next.push(&(s * &r(1, 3)) + &r(2, 3));
            }
            expected = next;
        }
        let expected = AtomicMeasure::uniform(
            expected.iter().map(|s| pt1(&r(2, 3) * s)).collect(),
        )
        .unwrap();
        assert_eq!(nu, expected);
        assert_eq!(discrepancy_1d(&nu, &expected).unwrap(), Rational::zero());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let bad = AtomicMeasure::new(vec![(pt1(r(1, 2)), r(1, 3))]);
        assert!(bad.is_err());
        let merged = AtomicMeasure::new(vec![
            (pt1(r(1, 2)), r(1, 2)),
            (pt1(r(1, 2)), r(1, 2)),
        ])
        .unwrap();
        assert_eq!(merged.atoms().len(), 1);
        assert_eq!(merged.atoms()[0].1, Rational::one());
    }
}

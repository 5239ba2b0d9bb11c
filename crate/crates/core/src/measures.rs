//! Discrete probability measures on `R^{1,n}`, couplings with marginal
//! checks, and deterministic samplers for the bundled scenario densities.
//!
//! Serialized schema: `{dimension, points: [[t, x...]], weights: [...]}`.

use crate::geometry::{classify, CausalClass, GeometryError, SpacetimePoint};
use crate::Real;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Weights must sum to 1 within this tolerance.
pub const WEIGHT_SUM_TOL: Real = 1e-12;
/// Marginal sums of a coupling must match the measures within this tolerance.
pub const MARGINAL_TOL: Real = 1e-10;
/// Points closer than this (Euclidean) are merged by `pushforward`.
pub const MERGE_TOL: Real = 1e-9;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("geometry error: {0}")]
    Geometry(#[from] GeometryError),
    #[error("lengths differ: {0} points vs {1} weights")]
    LengthMismatch(usize, usize),
    #[error("weights must be positive, got {0}")]
    NonPositiveWeight(Real),
    #[error("weights sum to {0}, expected 1")]
    BadWeightSum(Real),
    #[error("points {0} and {1} coincide within the merge tolerance")]
    DuplicatePoint(usize, usize),
    #[error("all points must share one dimension")]
    MixedDimensions,
    #[error("coupling entry ({0},{1}) out of range")]
    EntryOutOfRange(usize, usize),
    #[error("coupling masses must be positive")]
    NonPositiveMass,
    #[error("marginal mismatch at index {index}: {got} vs {want}")]
    MarginalMismatch { index: usize, got: Real, want: Real },
    #[error("sample count must be >= 1")]
    EmptySample,
}

/// Weighted point cloud with positive weights summing to one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct DiscreteMeasure {
    points: Vec<SpacetimePoint>,
    weights: Vec<Real>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    dimension: usize,
    points: Vec<Vec<Real>>,
    weights: Vec<Real>,
}

impl From<DiscreteMeasure> for MeasureRepr {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureRepr {
            dimension: m.dim(),
            points: m
                .points
                .iter()
                .map(|p| {
                    let mut row = Vec::with_capacity(1 + p.dim());
                    row.push(p.t);
                    row.extend_from_slice(&p.x);
                    row
                })
                .collect(),
            weights: m.weights,
        }
    }
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = MeasureError;
    fn try_from(r: MeasureRepr) -> Result<Self, MeasureError> {
        let points = r
            .points
            .into_iter()
            .map(|row| {
                if row.len() != r.dimension + 1 || r.dimension == 0 {
                    Err(MeasureError::MixedDimensions)
                } else {
                    Ok(SpacetimePoint::new(row[0], row[1..].to_vec()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        DiscreteMeasure::new(points, r.weights)
    }
}

impl DiscreteMeasure {
    pub fn new(points: Vec<SpacetimePoint>, weights: Vec<Real>) -> Result<Self, MeasureError> {
        if points.len() != weights.len() {
            return Err(MeasureError::LengthMismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Err(MeasureError::EmptySample);
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(MeasureError::MixedDimensions);
        }
        for &w in &weights {
            if !(w.is_finite() && w > 0.0) {
                return Err(MeasureError::NonPositiveWeight(w));
            }
        }
        let sum: Real = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(MeasureError::BadWeightSum(sum));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i].euclid_dist(&points[j]) <= MERGE_TOL {
                    return Err(MeasureError::DuplicatePoint(i, j));
                }
            }
        }
        Ok(DiscreteMeasure { points, weights })
    }

    /// Single unit atom.
    pub fn dirac(point: SpacetimePoint) -> Self {
        DiscreteMeasure {
            points: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[SpacetimePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &SpacetimePoint {
        &self.points[i]
    }

    pub fn weight(&self, i: usize) -> Real {
        self.weights[i]
    }

    /// Image measure under a pointwise map; coincident images are merged and
    /// their weights added. Total mass is preserved exactly up to f64 sums.
    pub fn pushforward<F>(&self, map: F) -> DiscreteMeasure
    where
        F: Fn(&SpacetimePoint) -> SpacetimePoint,
    {
        let mut points: Vec<SpacetimePoint> = Vec::with_capacity(self.len());
        let mut weights: Vec<Real> = Vec::with_capacity(self.len());
        for (p, &w) in self.points.iter().zip(&self.weights) {
            let q = map(p);
            match points.iter().position(|r| r.euclid_dist(&q) <= MERGE_TOL) {
                Some(k) => weights[k] += w,
                None => {
                    points.push(q);
                    weights.push(w);
                }
            }
        }
        DiscreteMeasure { points, weights }
    }
}

/// Sparse transport plan on the support product of two measures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Coupling {
    pub source: DiscreteMeasure,
    pub target: DiscreteMeasure,
    /// `(i, j, mass)` with positive mass.
    pub entries: Vec<(usize, usize, Real)>,
}

impl Coupling {
    pub fn new(
        source: DiscreteMeasure,
        target: DiscreteMeasure,
        entries: Vec<(usize, usize, Real)>,
    ) -> Result<Self, MeasureError> {
        let c = Coupling {
            source,
            target,
            entries,
        };
        c.check_marginals()?;
        Ok(c)
    }

    /// Independent product coupling.
    pub fn product(source: DiscreteMeasure, target: DiscreteMeasure) -> Self {
        let mut entries = Vec::with_capacity(source.len() * target.len());
        for i in 0..source.len() {
            for j in 0..target.len() {
                entries.push((i, j, source.weight(i) * target.weight(j)));
            }
        }
        Coupling {
            source,
            target,
            entries,
        }
    }

    /// Row and column sums as measures.
    pub fn marginals(&self) -> (DiscreteMeasure, DiscreteMeasure) {
        let mut row = vec![0.0; self.source.len()];
        let mut col = vec![0.0; self.target.len()];
        for &(i, j, m) in &self.entries {
            row[i] += m;
            col[j] += m;
        }
        (
            DiscreteMeasure {
                points: self.source.points.clone(),
                weights: row,
            },
            DiscreteMeasure {
                points: self.target.points.clone(),
                weights: col,
            },
        )
    }

    /// Marginal constraint check, `MARGINAL_TOL` on every row/column sum.
    pub fn check_marginals(&self) -> Result<(), MeasureError> {
        let mut row = vec![0.0; self.source.len()];
        let mut col = vec![0.0; self.target.len()];
        for &(i, j, m) in &self.entries {
            if i >= self.source.len() || j >= self.target.len() {
                return Err(MeasureError::EntryOutOfRange(i, j));
            }
            if !(m.is_finite() && m > 0.0) {
                return Err(MeasureError::NonPositiveMass);
            }
            row[i] += m;
            col[j] += m;
        }
        for (idx, (&got, &want)) in row.iter().zip(self.source.weights()).enumerate() {
            if (got - want).abs() > MARGINAL_TOL {
                return Err(MeasureError::MarginalMismatch {
                    index: idx,
                    got,
                    want,
                });
            }
        }
        for (idx, (&got, &want)) in col.iter().zip(self.target.weights()).enumerate() {
            if (got - want).abs() > MARGINAL_TOL {
                return Err(MeasureError::MarginalMismatch {
                    index: idx,
                    got,
                    want,
                });
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> Real {
        self.entries.iter().map(|e| e.2).sum()
    }

    /// Causal classes of all entry pairs.
    pub fn entry_classes(&self) -> Vec<CausalClass> {
        self.entries
            .iter()
            .map(|&(i, j, _)| classify(self.source.point(i), self.target.point(j)).unwrap())
            .collect()
    }

    /// Every entry pair lies in `J^+` (coincident included).
    pub fn is_causal(&self) -> bool {
        self.entry_classes().iter().all(|c| c.is_causal_future())
    }

    /// Every entry pair lies in `I^+`.
    pub fn is_strictly_timelike(&self) -> bool {
        self.entry_classes()
            .iter()
            .all(|c| c.is_strictly_timelike_future())
    }
}

/// Sampleable densities used by the scenario reproductions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ScenarioDensity {
    /// Mixture of Dirac atoms with prescribed weights.
    DiracMixture { atoms: Vec<(SpacetimePoint, Real)> },
    /// Uniform measure on the straight segment from `a` to `b`.
    Segment { a: SpacetimePoint, b: SpacetimePoint },
    /// Uniform measure on a Euclidean ball.
    UniformBall { center: SpacetimePoint, radius: Real },
    /// Rotated 1+1 rectangle with rounded corners and a smooth density that
    /// piles mass into a slab at the `upper_right` end. `upper_left` and
    /// `upper_right` span the top edge; the body extends `thickness` below it
    /// (rotated frame). The density is a product of one-dimensional smooth
    /// bump profiles; `right_boost` multiplies the profile on the rightmost
    /// `right_fraction` of the length so that the slab carries more than half
    /// of the total mass.
    RoundedRectangle {
        upper_left: SpacetimePoint,
        upper_right: SpacetimePoint,
        thickness: Real,
        corner_radius: Real,
        right_fraction: Real,
        right_boost: Real,
    },
}

/// Geometry helper for the rounded rectangle: intrinsic frame and membership.
pub struct RectFrame {
    origin: SpacetimePoint,
    /// Unit vector along the top edge, (t, x) components.
    eu: (Real, Real),
    /// Unit vector into the body (away from the top edge).
    ev: (Real, Real),
    pub length: Real,
    pub width: Real,
    pub corner_radius: Real,
}

impl RectFrame {
    pub fn new(
        upper_left: &SpacetimePoint,
        upper_right: &SpacetimePoint,
        thickness: Real,
        corner_radius: Real,
    ) -> Self {
        assert_eq!(upper_left.dim(), 1, "rounded rectangle is 1+1 dimensional");
        let dt = upper_right.t - upper_left.t;
        let dx = upper_right.x[0] - upper_left.x[0];
        let len = (dt * dt + dx * dx).sqrt();
        let eu = (dt / len, dx / len);
        // rotate eu by -90 degrees in the (x, t) plane so that ev points from
        // the top edge into the body
        let ev_candidates = [(-eu.1, eu.0), (eu.1, -eu.0)];
        // pick the candidate pointing toward the past side of the top edge
        let ev = if ev_candidates[0].0 <= ev_candidates[1].0 {
            ev_candidates[0]
        } else {
            ev_candidates[1]
        };
        RectFrame {
            origin: upper_left.clone(),
            eu,
            ev,
            length: len,
            width: thickness,
            corner_radius,
        }
    }

    /// Map intrinsic coordinates (u along the top edge, v = depth) to spacetime.
    pub fn embed(&self, u: Real, v: Real) -> SpacetimePoint {
        SpacetimePoint::tx(
            self.origin.t + u * self.eu.0 + v * self.ev.0,
            self.origin.x[0] + u * self.eu.1 + v * self.ev.1,
        )
    }

    /// Intrinsic coordinates of a point.
    pub fn intrinsic(&self, p: &SpacetimePoint) -> (Real, Real) {
        let dt = p.t - self.origin.t;
        let dx = p.x[0] - self.origin.x[0];
        (dt * self.eu.0 + dx * self.eu.1, dt * self.ev.0 + dx * self.ev.1)
    }

    /// Inside the rectangle with quarter-circle rounded corners.
    pub fn contains(&self, u: Real, v: Real) -> bool {
        if !(0.0..=self.length).contains(&u) || !(0.0..=self.width).contains(&v) {
            return false;
        }
        let r = self.corner_radius;
        let du = (r - u).max(0.0).max(u - (self.length - r)).max(0.0);
        let dv = (r - v).max(0.0).max(v - (self.width - r)).max(0.0);
        du * du + dv * dv <= r * r
    }
}

/// Smooth bump profile on [0,1]: `tau^2 (1-tau)^4`, peaked toward 0.
fn bump(tau: Real) -> Real {
    if !(0.0..=1.0).contains(&tau) {
        return 0.0;
    }
    let one = 1.0 - tau;
    tau * tau * one * one * one * one
}

/// Smoothstep ramp on [0,1].
fn smoothstep(tau: Real) -> Real {
    let t = tau.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Grid dimensions used by rectangle grid sampling: roughly square cells
/// tiling `length x width` with about `n` of them.
pub fn rect_grid_dims(length: Real, width: Real, n: usize) -> (usize, usize) {
    let nu = ((n as Real * length / width).sqrt()).round().max(1.0) as usize;
    let nv = (n + nu - 1) / nu;
    (nu, nv.max(1))
}

/// Unnormalized rectangle density in intrinsic coordinates: a bump in the
/// depth direction peaked near the top edge, boosted on the right slab.
pub fn rectangle_density(
    frame: &RectFrame,
    right_fraction: Real,
    right_boost: Real,
    u: Real,
    v: Real,
) -> Real {
    if !frame.contains(u, v) {
        return 0.0;
    }
    let cut = frame.length * (1.0 - right_fraction);
    let ramp = 0.05 * frame.length;
    let profile_u = 1.0 + right_boost * smoothstep((u - cut) / ramp);
    profile_u * bump(v / frame.width)
}

/// Draw `n` support points from a density. Grid mode lays quasi-uniform cell
/// midpoints (deterministic); random mode draws seeded iid samples. For Dirac
/// mixtures the atoms are returned exactly with their prescribed weights.
/// Grid sampling of a weighted density returns weights proportional to the
/// density at the midpoints; all other modes return equal weights.
pub fn sample(
    density: &ScenarioDensity,
    n: usize,
    seed: u64,
    grid_mode: bool,
) -> Result<DiscreteMeasure, MeasureError> {
    if n == 0 {
        return Err(MeasureError::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match density {
        ScenarioDensity::DiracMixture { atoms } => DiscreteMeasure::new(
            atoms.iter().map(|(p, _)| p.clone()).collect(),
            atoms.iter().map(|&(_, w)| w).collect(),
        ),
        ScenarioDensity::Segment { a, b } => {
            let step = |s: Real| {
                let v = a.to(b).scaled(s);
                a.translate(&v)
            };
            let points: Vec<_> = if grid_mode {
                (0..n).map(|i| step((i as Real + 0.5) / n as Real)).collect()
            } else {
                (0..n).map(|_| step(rng.gen::<Real>())).collect()
            };
            DiscreteMeasure::new(points, vec![1.0 / n as Real; n])
        }
        ScenarioDensity::UniformBall { center, radius } => {
            let dim = center.dim() + 1;
            let mut points = Vec::with_capacity(n);
            while points.len() < n {
                let coords: Vec<Real> =
                    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if coords.iter().map(|c| c * c).sum::<Real>() <= 1.0 {
                    let mut q = center.clone();
                    q.t += radius * coords[0];
                    for (k, c) in coords[1..].iter().enumerate() {
                        q.x[k] += radius * c;
                    }
                    if points
                        .iter()
                        .all(|p: &SpacetimePoint| p.euclid_dist(&q) > MERGE_TOL)
                    {
                        points.push(q);
                    }
                }
            }
            DiscreteMeasure::new(points, vec![1.0 / n as Real; n])
        }
        ScenarioDensity::RoundedRectangle {
            upper_left,
            upper_right,
            thickness,
            corner_radius,
            right_fraction,
            right_boost,
        } => {
            let frame = RectFrame::new(upper_left, upper_right, *thickness, *corner_radius);
            let g = |u: Real, v: Real| {
                rectangle_density(&frame, *right_fraction, *right_boost, u, v)
            };
            if grid_mode {
                let (nu, nv) = rect_grid_dims(frame.length, frame.width, n);
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for i in 0..nu {
                    for j in 0..nv {
                        let u = (i as Real + 0.5) * frame.length / nu as Real;
                        let v = (j as Real + 0.5) * frame.width / nv as Real;
                        let w = g(u, v);
                        if w > 0.0 {
                            points.push(frame.embed(u, v));
                            weights.push(w);
                        }
                    }
                }
                let total: Real = weights.iter().sum();
                for w in &mut weights {
                    *w /= total;
                }
                DiscreteMeasure::new(points, weights)
            } else {
                let g_max = 1.0 + right_boost;
                let mut points = Vec::with_capacity(n);
                while points.len() < n {
                    let u = rng.gen_range(0.0..frame.length);
                    let v = rng.gen_range(0.0..frame.width);
                    if rng.gen_range(0.0..g_max) < g(u, v) {
                        let q = frame.embed(u, v);
                        if points
                            .iter()
                            .all(|p: &SpacetimePoint| p.euclid_dist(&q) > MERGE_TOL)
                        {
                            points.push(q);
                        }
                    }
                }
                DiscreteMeasure::new(points, vec![1.0 / n as Real; n])
            }
        }
    }
}

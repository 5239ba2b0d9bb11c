//! Lax-Oleinik semigroups on finite carriers, dynamical couplings along
//! affine geodesics, displacement interpolation, calibrated pairs, and the
//! backward-forward regularization that trades a kinked potential for a
//! `C^{1,1}`-regular pair between intermediate measures.
//!
//! Forward evolution takes pointwise infima with `-inf + inf := +inf`;
//! backward evolution takes suprema with `±inf ∓ inf := -inf`. On finite
//! carriers the one-sided semigroup laws hold exactly, with equality when
//! the carrier contains the geodesic waypoints of the minimizers.

use crate::ext::{ExtendedCost, NEG_INF, POS_INF};
use crate::geometry::{cost, cost_t, geodesic_point, CostParams, SpacetimePoint};
use crate::measures::{Coupling, DiscreteMeasure, MeasureError, MERGE_TOL};
use crate::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeakKamError {
    #[error("interpolation times must satisfy 0 <= s < t <= 1, got s={0}, t={1}")]
    BadTimes(Real, Real),
    #[error("tau={0} outside (0, min(t-s, 1-t)]")]
    TauOutOfRange(Real),
    #[error("coupling entry ({0},{1}) is not causal")]
    NonCausalEntry(usize, usize),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Extended-real function on a finite carrier, tagged with its time label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueField {
    pub points: Vec<SpacetimePoint>,
    pub values: Vec<ExtendedCost>,
    pub time: Real,
}

impl ValueField {
    pub fn new(points: Vec<SpacetimePoint>, values: Vec<ExtendedCost>, time: Real) -> Self {
        assert_eq!(points.len(), values.len());
        ValueField {
            points,
            values,
            time,
        }
    }

    /// Field that is 0 at `x0` and `+inf` elsewhere (single source).
    pub fn single_source(x0: SpacetimePoint) -> Self {
        ValueField {
            points: vec![x0],
            values: vec![ExtendedCost::finite(0.0)],
            time: 0.0,
        }
    }

    pub fn value_at(&self, p: &SpacetimePoint) -> Option<ExtendedCost> {
        self.points
            .iter()
            .position(|q| q == p)
            .map(|k| self.values[k])
    }

    pub fn scaled(&self, factor: Real) -> ValueField {
        ValueField {
            points: self.points.clone(),
            values: self.values.iter().map(|v| v.scale(factor)).collect(),
            time: self.time,
        }
    }
}

/// Forward semigroup `T_t u(y) = inf_x (u(x) + c_t(x,y))` over the carrier.
pub fn lax_forward(
    u: &ValueField,
    t: Real,
    targets: &[SpacetimePoint],
    params: &CostParams,
) -> ValueField {
    let values = targets
        .iter()
        .map(|y| forward_value(u, t, y, params))
        .collect();
    ValueField {
        points: targets.to_vec(),
        values,
        time: u.time + t,
    }
}

fn forward_value(u: &ValueField, t: Real, y: &SpacetimePoint, params: &CostParams) -> ExtendedCost {
    u.points
        .iter()
        .zip(&u.values)
        .fold(POS_INF, |acc, (x, &v)| {
            acc.min(v.add_inf(cost_t(t, x, y, params)))
        })
}

/// Backward semigroup `T̂_s u(x) = sup_y (u(y) - c_s(x,y))` over the carrier.
pub fn lax_backward(
    u: &ValueField,
    s: Real,
    sources: &[SpacetimePoint],
    params: &CostParams,
) -> ValueField {
    let values = sources
        .iter()
        .map(|x| backward_value(u, s, x, params))
        .collect();
    ValueField {
        points: sources.to_vec(),
        values,
        time: u.time - s,
    }
}

fn backward_value(
    u: &ValueField,
    s: Real,
    x: &SpacetimePoint,
    params: &CostParams,
) -> ExtendedCost {
    u.points
        .iter()
        .zip(&u.values)
        .fold(NEG_INF, |acc, (y, &v)| {
            acc.max(v.sub_sup(cost_t(s, x, y, params)))
        })
}

/// Optimal coupling carried along its affine geodesics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynamicalCoupling {
    pub coupling: Coupling,
}

impl DynamicalCoupling {
    /// Wrap a coupling; every entry pair must be causal so that the geodesics
    /// exist.
    pub fn new(coupling: Coupling) -> Result<Self, WeakKamError> {
        for (&(i, j, _), class) in coupling.entries.iter().zip(coupling.entry_classes()) {
            if !class.is_causal_future() {
                return Err(WeakKamError::NonCausalEntry(i, j));
            }
        }
        Ok(DynamicalCoupling { coupling })
    }

    /// Evaluation of entry `e`'s geodesic at parameter `s` (affine; `s` may
    /// exceed `[0,1]` to extend the geodesic).
    pub fn entry_point(&self, e: usize, s: Real) -> SpacetimePoint {
        let (i, j, _) = self.coupling.entries[e];
        geodesic_point(self.coupling.source.point(i), self.coupling.target.point(j), s)
            .expect("entries are causal")
    }

    /// Mass of entry `e`.
    pub fn entry_mass(&self, e: usize) -> Real {
        self.coupling.entries[e].2
    }

    pub fn len(&self) -> usize {
        self.coupling.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coupling.entries.is_empty()
    }

    /// Cost of the induced coupling between times `s < t`, evaluated with the
    /// minimal time-`(t-s)` action (affine in `t - s` with slope equal to the
    /// full transport cost).
    pub fn interpolation_cost(&self, s: Real, t: Real, params: &CostParams) -> Real {
        (0..self.len())
            .map(|e| {
                let a = self.entry_point(e, s);
                let b = self.entry_point(e, t);
                self.entry_mass(e) * cost_t(t - s, &a, &b, params).value()
            })
            .sum()
    }
}

/// Evaluation-map pushforwards `mu_s`, `mu_t` and the induced coupling
/// between them. Coincident interpolation points are merged.
pub fn displacement_interpolate(
    dyn_coupling: &DynamicalCoupling,
    s: Real,
    t: Real,
) -> Result<(DiscreteMeasure, DiscreteMeasure, Coupling), WeakKamError> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s >= t {
        return Err(WeakKamError::BadTimes(s, t));
    }
    let k = dyn_coupling.len();
    let mut pts_s: Vec<SpacetimePoint> = Vec::new();
    let mut w_s: Vec<Real> = Vec::new();
    let mut idx_s = Vec::with_capacity(k);
    let mut pts_t: Vec<SpacetimePoint> = Vec::new();
    let mut w_t: Vec<Real> = Vec::new();
    let mut idx_t = Vec::with_capacity(k);
    for e in 0..k {
        let mass = dyn_coupling.entry_mass(e);
        let a = dyn_coupling.entry_point(e, s);
        match pts_s.iter().position(|p| p.euclid_dist(&a) <= MERGE_TOL) {
            Some(i) => {
                w_s[i] += mass;
                idx_s.push(i);
            }
            None => {
                pts_s.push(a);
                w_s.push(mass);
                idx_s.push(pts_s.len() - 1);
            }
        }
        let b = dyn_coupling.entry_point(e, t);
        match pts_t.iter().position(|p| p.euclid_dist(&b) <= MERGE_TOL) {
            Some(j) => {
                w_t[j] += mass;
                idx_t.push(j);
            }
            None => {
                pts_t.push(b);
                w_t.push(mass);
                idx_t.push(pts_t.len() - 1);
            }
        }
    }
    let mu_s = DiscreteMeasure::new(pts_s, w_s)?;
    let mu_t = DiscreteMeasure::new(pts_t, w_t)?;
    let mut entries: Vec<(usize, usize, Real)> = Vec::new();
    for e in 0..k {
        let key = (idx_s[e], idx_t[e]);
        match entries.iter().position(|&(i, j, _)| (i, j) == key) {
            Some(pos) => entries[pos].2 += dyn_coupling.entry_mass(e),
            None => entries.push((key.0, key.1, dyn_coupling.entry_mass(e))),
        }
    }
    let pi = Coupling::new(mu_s.clone(), mu_t.clone(), entries)?;
    Ok((mu_s, mu_t, pi))
}

/// A pair of fields expected to satisfy `psi(y) - phi(x) <= c(x,y)` on all
/// cross pairs and equality on a coupling's support.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibratedPair {
    pub phi: ValueField,
    pub psi: ValueField,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// Max of `psi(y) - phi(x) - c(x,y)` over cross pairs (0 when none
    /// positive).
    pub max_subsolution_violation: Real,
    /// Max of `|psi(y) - phi(x) - c(x,y)|` over the checked support pairs.
    pub max_calibration_residual: Real,
    pub checked_pairs: usize,
}

/// Subsolution and calibration residuals of a pair against support pairs
/// `(x, y, mass)` (masses are ignored; only the support matters).
pub fn calibration_check(
    pair: &CalibratedPair,
    support: &[(SpacetimePoint, SpacetimePoint)],
    params: &CostParams,
) -> CalibrationReport {
    let mut violation = 0.0;
    for (x, &phi_x) in pair.phi.points.iter().zip(&pair.phi.values) {
        for (y, &psi_y) in pair.psi.points.iter().zip(&pair.psi.values) {
            let lhs = psi_y.sub_sup(phi_x);
            let c = cost(x, y, params);
            if lhs.value() > c.value() {
                let excess = if lhs.is_finite() && c.is_finite() {
                    lhs.value() - c.value()
                } else {
                    Real::INFINITY
                };
                violation = Real::max(violation, excess);
            }
        }
    }
    let mut residual = 0.0;
    for (x, y) in support {
        let phi_x = pair.phi.value_at(x);
        let psi_y = pair.psi.value_at(y);
        let r = match (phi_x, psi_y) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => {
                (b.value() - a.value() - cost(x, y, params).value()).abs()
            }
            _ => Real::INFINITY,
        };
        residual = Real::max(residual, r);
    }
    CalibrationReport {
        max_subsolution_violation: violation,
        max_calibration_residual: residual,
        checked_pairs: pair.phi.points.len() * pair.psi.points.len(),
    }
}

/// Residual of the semigroup calibration identity
/// `T_t u(g(t)) = T_s u(g(s)) + c_{t-s}(g(s), g(t))` along the stored
/// geodesics, maximized over entries and consecutive sample times.
pub fn geodesic_calibration_residual(
    u: &ValueField,
    dyn_coupling: &DynamicalCoupling,
    times: &[Real],
    params: &CostParams,
) -> Real {
    let mut worst: Real = 0.0;
    for e in 0..dyn_coupling.len() {
        for w in times.windows(2) {
            let (s, t) = (w[0], w[1]);
            let a = dyn_coupling.entry_point(e, s);
            let b = dyn_coupling.entry_point(e, t);
            let ts = forward_value(u, s, &a, params);
            let tt = forward_value(u, t, &b, params);
            let step = cost_t(t - s, &a, &b, params);
            let r = match (ts.as_finite(), tt.as_finite(), step.as_finite()) {
                (Some(vs), Some(vt), Some(c)) => (vt - vs - c).abs(),
                _ => Real::INFINITY,
            };
            worst = worst.max(r);
        }
    }
    worst
}

/// Backward value `sup_z (inner(z) - c_tau(x, z))` where `inner` is evaluated
/// exactly on demand: coarse seeds followed by a shrinking local pattern
/// search. The result never exceeds the continuum supremum and is exact when
/// a seed attains it.
fn refined_backward_value(
    inner: &impl Fn(&SpacetimePoint) -> ExtendedCost,
    tau: Real,
    x: &SpacetimePoint,
    seeds: &[SpacetimePoint],
    seed_step: Real,
    params: &CostParams,
) -> ExtendedCost {
    let objective = |z: &SpacetimePoint| inner(z).sub_sup(cost_t(tau, x, z, params));
    let mut best_pt: Option<SpacetimePoint> = None;
    let mut best = NEG_INF;
    for z in seeds {
        let v = objective(z);
        if v.value() > best.value() {
            best = v;
            best_pt = Some(z.clone());
        }
    }
    let Some(mut center) = best_pt else {
        return NEG_INF;
    };
    if !best.is_finite() {
        return best;
    }
    let mut step = seed_step;
    while step > 1e-9 {
        let mut improved = false;
        for (dt, dx) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
        ] {
            let cand = SpacetimePoint::tx(center.t + step * dt, center.x[0] + step * dx);
            let v = objective(&cand);
            if v.value() > best.value() {
                best = v;
                center = cand;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Backward-forward regularization of a potential between interpolation
/// times: the pair `(t-s)^{-(1-p)} (T̂_tau T_{s+tau} phi, T̂_tau T_{t+tau} phi)`
/// evaluated on the given carriers. The inner forward evolution is exact
/// (finite infimum over `phi`'s carrier); the outer supremum is seeded with
/// the entry geodesics' waypoints plus `extra_mid` and refined locally, so it
/// is exact on the interpolation support. The output forms a calibrated pair
/// with the induced coupling between `mu_s` and `mu_t`.
#[allow(clippy::too_many_arguments)]
pub fn regularized_pair(
    phi: &ValueField,
    dyn_coupling: &DynamicalCoupling,
    s: Real,
    t: Real,
    tau: Real,
    carrier_s: &[SpacetimePoint],
    carrier_t: &[SpacetimePoint],
    extra_mid: &[SpacetimePoint],
    params: &CostParams,
) -> Result<CalibratedPair, WeakKamError> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s >= t {
        return Err(WeakKamError::BadTimes(s, t));
    }
    if !(tau > 0.0 && tau <= (t - s).min(1.0 - t)) {
        return Err(WeakKamError::TauOutOfRange(tau));
    }
    let scale = (t - s).powf(params.p - 1.0);
    let side = |level: Real, carrier: &[SpacetimePoint]| -> ValueField {
        let inner = |z: &SpacetimePoint| forward_value(phi, level + tau, z, params);
        let mut seeds: Vec<SpacetimePoint> = (0..dyn_coupling.len())
            .map(|e| dyn_coupling.entry_point(e, level + tau))
            .collect();
        seeds.extend_from_slice(extra_mid);
        let seed_step = 0.05;
        let values = carrier
            .iter()
            .map(|x| refined_backward_value(&inner, tau, x, &seeds, seed_step, params))
            .collect();
        ValueField {
            points: carrier.to_vec(),
            values,
            time: level,
        }
    };
    let phi_s = side(s, carrier_s).scaled(scale);
    let psi_t = side(t, carrier_t).scaled(scale);
    Ok(CalibratedPair {
        phi: phi_s,
        psi: psi_t,
    })
}

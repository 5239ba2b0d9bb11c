//! Flat Minkowski spacetime `R^{1,n}` with signature `(-,+,...,+)`: causal
//! classification, the Lorentzian distance, affine geodesics, the time-`t`
//! action `c_t = -t^{1-p} d^p`, and the Lagrangian / Hamiltonian pair linked
//! by the Legendre transform `v -> p |v|^{p-2} v^♭`.
//!
//! All operations are pure functions of immutable inputs. Everything here is
//! closed-form; the flat model is what makes `d` and `J^+` computable exactly.

use crate::ext::{ExtendedCost, POS_INF};
use crate::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default width of the null band in `classify`: pairs with
/// `| |dt| - |dx| | <= eps * (1 + |dt|)` count as null. The counterexample
/// geometries place mass exactly on the cone, so the band must not be zero.
pub const EPS_NULL: Real = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("pair is not causally related")]
    NotCausal,
    #[error("vector is not strictly timelike")]
    NotStrictlyTimelike,
    #[error("covector lies outside the interior of the dual cone")]
    OutsideDualCone,
    #[error("exponent p must lie strictly in (0,1), got {0}")]
    InvalidExponent(Real),
    #[error("coordinates must be finite")]
    NonFiniteCoordinate,
}

/// Event in `R^{1,n}`: one time coordinate and `n >= 1` spatial coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: Real,
    pub x: Vec<Real>,
}

impl SpacetimePoint {
    pub fn new(t: Real, x: Vec<Real>) -> Self {
        assert!(!x.is_empty(), "spatial dimension must be >= 1");
        assert!(t.is_finite() && x.iter().all(|c| c.is_finite()));
        SpacetimePoint { t, x }
    }

    /// Point in 1+1 dimensions.
    pub fn tx(t: Real, x: Real) -> Self {
        SpacetimePoint::new(t, vec![x])
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Displacement `other - self` as a tangent vector based at `self`.
    pub fn to(&self, other: &SpacetimePoint) -> TangentVector {
        assert_eq!(self.dim(), other.dim());
        TangentVector {
            base: self.clone(),
            dt: other.t - self.t,
            dx: other
                .x
                .iter()
                .zip(&self.x)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self + v` (the base point of `v` is ignored).
    pub fn translate(&self, v: &TangentVector) -> SpacetimePoint {
        assert_eq!(self.dim(), v.dx.len());
        SpacetimePoint {
            t: self.t + v.dt,
            x: self.x.iter().zip(&v.dx).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn euclid_dist(&self, other: &SpacetimePoint) -> Real {
        assert_eq!(self.dim(), other.dim());
        let mut s = (self.t - other.t) * (self.t - other.t);
        for (a, b) in self.x.iter().zip(&other.x) {
            s += (a - b) * (a - b);
        }
        s.sqrt()
    }
}

/// Tangent vector at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: SpacetimePoint,
    pub dt: Real,
    pub dx: Vec<Real>,
}

impl TangentVector {
    pub fn at_origin(dt: Real, dx: Vec<Real>) -> Self {
        let n = dx.len();
        TangentVector {
            base: SpacetimePoint::new(0.0, vec![0.0; n]),
            dt,
            dx,
        }
    }

    pub fn spatial_norm(&self) -> Real {
        self.dx.iter().map(|c| c * c).sum::<Real>().sqrt()
    }

    /// Future-directed causal: `dt >= |dx|` and `dt >= 0` (zero included).
    pub fn is_causal(&self) -> bool {
        self.dt >= 0.0 && self.dt >= self.spatial_norm()
    }

    /// Future-directed strictly timelike: `dt > |dx|`.
    pub fn is_strictly_timelike(&self) -> bool {
        self.dt > self.spatial_norm()
    }

    /// Lorentzian norm `|v|_g = sqrt(dt^2 - |dx|^2)` for causal vectors.
    pub fn g_norm(&self) -> Real {
        let r = self.spatial_norm();
        (self.dt * self.dt - r * r).max(0.0).sqrt()
    }

    pub fn scaled(&self, lambda: Real) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            dt: lambda * self.dt,
            dx: self.dx.iter().map(|c| lambda * c).collect(),
        }
    }
}

/// Covector at `base`, components `(pt, px)` in the coordinate cobasis.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector {
    pub base: SpacetimePoint,
    pub pt: Real,
    pub px: Vec<Real>,
}

impl Covector {
    pub fn spatial_norm(&self) -> Real {
        self.px.iter().map(|c| c * c).sum::<Real>().sqrt()
    }

    /// Interior of the dual cone of future causal vectors: `-pt > |px|`.
    pub fn in_dual_interior(&self) -> bool {
        -self.pt > self.spatial_norm()
    }

    /// Dual norm `sqrt(pt^2 - |px|^2)` (meaningful inside the dual cone).
    pub fn g_norm(&self) -> Real {
        let r = self.spatial_norm();
        (self.pt * self.pt - r * r).max(0.0).sqrt()
    }

    /// Pairing `<q, v>`.
    pub fn apply(&self, v: &TangentVector) -> Real {
        assert_eq!(self.px.len(), v.dx.len());
        self.pt * v.dt + self.px.iter().zip(&v.dx).map(|(a, b)| a * b).sum::<Real>()
    }

    /// Index raising with the inverse metric: `(pt, px)^♯ = (-pt, px)`.
    pub fn sharp(&self) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            dt: -self.pt,
            dx: self.px.clone(),
        }
    }
}

/// Causal classification of an ordered pair `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    StrictlyTimelikeFuture,
    NullFuture,
    Spacelike,
    NullPast,
    StrictlyTimelikePast,
    Coincident,
}

impl CausalClass {
    /// `y ∈ J^+(x)`: future-causal, with the zero vector counted causal.
    pub fn is_causal_future(self) -> bool {
        matches!(
            self,
            CausalClass::StrictlyTimelikeFuture | CausalClass::NullFuture | CausalClass::Coincident
        )
    }

    /// `y ∈ I^+(x)`.
    pub fn is_strictly_timelike_future(self) -> bool {
        self == CausalClass::StrictlyTimelikeFuture
    }

    /// Classification of the swapped pair.
    pub fn reversed(self) -> CausalClass {
        match self {
            CausalClass::StrictlyTimelikeFuture => CausalClass::StrictlyTimelikePast,
            CausalClass::StrictlyTimelikePast => CausalClass::StrictlyTimelikeFuture,
            CausalClass::NullFuture => CausalClass::NullPast,
            CausalClass::NullPast => CausalClass::NullFuture,
            other => other,
        }
    }
}

/// Cost exponent, `0 < p < 1` strictly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub p: Real,
}

impl CostParams {
    pub fn new(p: Real) -> Result<Self, GeometryError> {
        if !(p.is_finite() && p > 0.0 && p < 1.0) {
            return Err(GeometryError::InvalidExponent(p));
        }
        Ok(CostParams { p })
    }
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams { p: 0.5 }
    }
}

fn deltas(x: &SpacetimePoint, y: &SpacetimePoint) -> Result<(Real, Real), GeometryError> {
    if x.dim() != y.dim() {
        return Err(GeometryError::DimensionMismatch(x.dim(), y.dim()));
    }
    let dt = y.t - x.t;
    let r2: Real = y
        .x
        .iter()
        .zip(&x.x)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((dt, r2.sqrt()))
}

/// Classify `y` relative to `x` with null band `eps_null * (1 + |dt|)`.
pub fn classify_with_tolerance(
    x: &SpacetimePoint,
    y: &SpacetimePoint,
    eps_null: Real,
) -> Result<CausalClass, GeometryError> {
    let (dt, r) = deltas(x, y)?;
    if dt == 0.0 && r == 0.0 {
        return Ok(CausalClass::Coincident);
    }
    let ad = dt.abs();
    if ad > 0.0 && (ad - r).abs() <= eps_null * (1.0 + ad) {
        return Ok(if dt > 0.0 {
            CausalClass::NullFuture
        } else {
            CausalClass::NullPast
        });
    }
    Ok(if ad > r {
        if dt > 0.0 {
            CausalClass::StrictlyTimelikeFuture
        } else {
            CausalClass::StrictlyTimelikePast
        }
    } else {
        CausalClass::Spacelike
    })
}

/// Classify `y` relative to `x` with the default null tolerance.
pub fn classify(x: &SpacetimePoint, y: &SpacetimePoint) -> Result<CausalClass, GeometryError> {
    classify_with_tolerance(x, y, EPS_NULL)
}

/// Lorentzian distance: `sqrt(dt^2 - |dx|^2)` when `y ∈ J^+(x)`, else 0.
/// Total function; non-causal and past pairs return 0.
pub fn lorentz_distance(x: &SpacetimePoint, y: &SpacetimePoint) -> Real {
    let class = classify(x, y).expect("dimension mismatch");
    if !class.is_causal_future() {
        return 0.0;
    }
    let (dt, r) = deltas(x, y).unwrap();
    (dt * dt - r * r).max(0.0).sqrt()
}

/// Causal cost `c(x,y) = -d^p(x,y)` on `J^+`, `+inf` otherwise.
pub fn cost(x: &SpacetimePoint, y: &SpacetimePoint, params: &CostParams) -> ExtendedCost {
    let class = classify(x, y).expect("dimension mismatch");
    if !class.is_causal_future() {
        return POS_INF;
    }
    ExtendedCost::finite(-lorentz_distance(x, y).powf(params.p))
}

/// Minimal time-`t` action:
/// `0` if `t = 0` and `x = y`; `-t^{1-p} d^p` if `t > 0` and `y ∈ J^+(x)`;
/// `+inf` otherwise.
pub fn cost_t(
    t: Real,
    x: &SpacetimePoint,
    y: &SpacetimePoint,
    params: &CostParams,
) -> ExtendedCost {
    assert!(t >= 0.0, "time parameter must be nonnegative");
    let class = classify(x, y).expect("dimension mismatch");
    if t == 0.0 {
        return if class == CausalClass::Coincident {
            ExtendedCost::finite(0.0)
        } else {
            POS_INF
        };
    }
    if !class.is_causal_future() {
        return POS_INF;
    }
    ExtendedCost::finite(-t.powf(1.0 - params.p) * lorentz_distance(x, y).powf(params.p))
}

/// Point `x + s (y - x)` on the affine maximizing geodesic from `x` to `y`.
/// Requires `y ∈ J^+(x)`; the parameter is not restricted to `[0,1]`, which
/// lets callers extend geodesics past their endpoints.
pub fn geodesic_point(
    x: &SpacetimePoint,
    y: &SpacetimePoint,
    s: Real,
) -> Result<SpacetimePoint, GeometryError> {
    let class = classify(x, y)?;
    if !class.is_causal_future() {
        return Err(GeometryError::NotCausal);
    }
    Ok(x.translate(&x.to(y).scaled(s)))
}

/// Lagrangian `L(v) = -|v|_g^p` on the causal cone, `+inf` otherwise.
pub fn lagrangian(v: &TangentVector, params: &CostParams) -> ExtendedCost {
    if !v.is_causal() {
        return POS_INF;
    }
    ExtendedCost::finite(-v.g_norm().powf(params.p))
}

/// Fibre derivative of the Lagrangian: `v -> p |v|_g^{p-2} v^♭` with
/// `♭ = diag(-1, 1, ..., 1)`. Defined on strictly timelike vectors; maps into
/// the interior of the dual cone.
pub fn legendre(v: &TangentVector, params: &CostParams) -> Result<Covector, GeometryError> {
    if !v.is_strictly_timelike() {
        return Err(GeometryError::NotStrictlyTimelike);
    }
    let g = v.g_norm();
    let factor = params.p * g.powf(params.p - 2.0);
    Ok(Covector {
        base: v.base.clone(),
        pt: -factor * v.dt,
        px: v.dx.iter().map(|c| factor * c).collect(),
    })
}

/// Inverse of [`legendre`] on the interior of the dual cone:
/// `|v|_g = (|q|_g / p)^{1/(p-1)}`, then `v = q^♯ / (p |v|_g^{p-2})`.
pub fn legendre_inverse(q: &Covector, params: &CostParams) -> Result<TangentVector, GeometryError> {
    if !q.in_dual_interior() {
        return Err(GeometryError::OutsideDualCone);
    }
    let g_v = (q.g_norm() / params.p).powf(1.0 / (params.p - 1.0));
    let factor = params.p * g_v.powf(params.p - 2.0);
    let sharp = q.sharp();
    Ok(TangentVector {
        base: q.base.clone(),
        dt: sharp.dt / factor,
        dx: sharp.dx.iter().map(|c| c / factor).collect(),
    })
}

/// Hamiltonian `H(q) = (1-p) |v|_g^p` where `v` is the Legendre preimage of
/// `q`; equals `<q, v> - L(v)` on the interior of the dual cone.
pub fn hamiltonian(q: &Covector, params: &CostParams) -> Result<Real, GeometryError> {
    if !q.in_dual_interior() {
        return Err(GeometryError::OutsideDualCone);
    }
    let g_v = (q.g_norm() / params.p).powf(1.0 / (params.p - 1.0));
    Ok((1.0 - params.p) * g_v.powf(params.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p_half() -> CostParams {
        CostParams::new(0.5).unwrap()
    }

    #[test]
    fn classify_examples() {
        let o = SpacetimePoint::tx(0.0, 0.0);
        assert_eq!(
            classify(&o, &SpacetimePoint::tx(2.0, 1.0)).unwrap(),
            CausalClass::StrictlyTimelikeFuture
        );
        // spatial -1, temporal 1: exactly on the forward cone
        assert_eq!(
            classify(&o, &SpacetimePoint::tx(1.0, -1.0)).unwrap(),
            CausalClass::NullFuture
        );
        assert_eq!(classify(&o, &o).unwrap(), CausalClass::Coincident);
        assert_eq!(
            classify(&o, &SpacetimePoint::tx(0.0, 1.0)).unwrap(),
            CausalClass::Spacelike
        );
        assert_eq!(
            classify(&o, &SpacetimePoint::tx(-2.0, 1.0)).unwrap(),
            CausalClass::StrictlyTimelikePast
        );
        assert!(matches!(
            classify(&o, &SpacetimePoint::new(1.0, vec![0.0, 0.0])),
            Err(GeometryError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn distance_examples() {
        let o = SpacetimePoint::tx(0.0, 0.0);
        // spatial 3, temporal 4
        let y = SpacetimePoint::tx(4.0, 3.0);
        assert!((lorentz_distance(&o, &y) - 7f64.sqrt()).abs() < 1e-15);
        // spacelike
        assert_eq!(lorentz_distance(&o, &SpacetimePoint::tx(1.0, 2.0)), 0.0);
        // pure time translation
        for t in [0.5, 1.0, 3.25] {
            assert_eq!(lorentz_distance(&o, &SpacetimePoint::tx(t, 0.0)), t);
        }
        // past pair
        assert_eq!(lorentz_distance(&y, &o), 0.0);
    }

    #[test]
    fn cost_examples() {
        let p = p_half();
        let o = SpacetimePoint::tx(0.0, 0.0);
        assert_eq!(
            cost(&o, &SpacetimePoint::tx(1.0, 0.0), &p),
            ExtendedCost::finite(-1.0)
        );
        // null pair costs -0^p = 0
        let null = cost(&o, &SpacetimePoint::tx(1.0, -1.0), &p);
        assert_eq!(null.value(), 0.0);
        assert!(cost(&o, &SpacetimePoint::tx(0.0, 1.0), &p).is_pos_inf());
    }

    #[test]
    fn cost_t_examples() {
        let p = p_half();
        let o = SpacetimePoint::tx(0.0, 0.0);
        let y = SpacetimePoint::tx(2.0, 0.0);
        let c4 = cost_t(4.0, &o, &y, &p).value();
        assert!((c4 - (-(8f64.sqrt()))).abs() < 1e-14);
        assert_eq!(cost_t(0.0, &o, &o, &p), ExtendedCost::finite(0.0));
        assert!(cost_t(0.0, &o, &y, &p).is_pos_inf());
        // c_1 agrees with the plain cost
        assert_eq!(cost_t(1.0, &o, &y, &p), cost(&o, &y, &p));
    }

    #[test]
    fn geodesic_examples() {
        let x = SpacetimePoint::tx(0.0, 0.0);
        let y = SpacetimePoint::tx(2.0, 0.0);
        assert_eq!(
            geodesic_point(&x, &y, 0.5).unwrap(),
            SpacetimePoint::tx(1.0, 0.0)
        );
        assert_eq!(geodesic_point(&x, &y, 0.0).unwrap(), x);
        assert_eq!(geodesic_point(&x, &y, 1.0).unwrap(), y);
        assert!(geodesic_point(&x, &SpacetimePoint::tx(0.0, 1.0), 0.5).is_err());
    }

    #[test]
    fn geodesic_time_additivity() {
        // c_s(x, g(s)) + c_{1-s}(g(s), y) = c_1(x, y) on random timelike pairs
        let p = p_half();
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..200 {
            let x = SpacetimePoint::tx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let dx: Real = rng.gen_range(-1.0..1.0);
            let dt: Real = dx.abs() + rng.gen_range(0.01..2.0);
            let y = SpacetimePoint::tx(x.t + dt, x.x[0] + dx);
            let s: Real = rng.gen_range(0.05..0.95);
            let z = geodesic_point(&x, &y, s).unwrap();
            let lhs = cost_t(s, &x, &z, &p).value() + cost_t(1.0 - s, &z, &y, &p).value();
            let rhs = cost_t(1.0, &x, &y, &p).value();
            assert!((lhs - rhs).abs() < 1e-12, "additivity violated: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn lagrangian_examples() {
        let p = p_half();
        assert_eq!(
            lagrangian(&TangentVector::at_origin(1.0, vec![0.0]), &p),
            ExtendedCost::finite(-1.0)
        );
        assert_eq!(
            lagrangian(&TangentVector::at_origin(1.0, vec![1.0]), &p).value(),
            0.0
        );
        assert!(lagrangian(&TangentVector::at_origin(-1.0, vec![0.0]), &p).is_pos_inf());
    }

    #[test]
    fn legendre_examples() {
        let p = p_half();
        let v = TangentVector::at_origin(1.0, vec![0.0]);
        let q = legendre(&v, &p).unwrap();
        assert!((q.pt - (-0.5)).abs() < 1e-15 && q.px[0].abs() < 1e-15);
        assert!(q.in_dual_interior());

        // homogeneity: legendre(lambda v) = lambda^{p-1} legendre(v)
        let w = TangentVector::at_origin(2.0, vec![0.7]);
        for lambda in [0.3, 1.7, 9.0] {
            let a = legendre(&w.scaled(lambda), &p).unwrap();
            let b = legendre(&w, &p).unwrap();
            let scale = lambda.powf(p.p - 1.0);
            assert!((a.pt - scale * b.pt).abs() < 1e-12);
            assert!((a.px[0] - scale * b.px[0]).abs() < 1e-12);
        }

        assert!(legendre(&TangentVector::at_origin(1.0, vec![1.0]), &p).is_err());
    }

    #[test]
    fn legendre_inverse_examples() {
        let p = p_half();
        let q = Covector {
            base: SpacetimePoint::tx(0.0, 0.0),
            pt: -0.5,
            px: vec![0.0],
        };
        let v = legendre_inverse(&q, &p).unwrap();
        assert!((v.dt - 1.0).abs() < 1e-14 && v.dx[0].abs() < 1e-14);

        // near the cone boundary: large |v| but no overflow
        let q_near = Covector {
            base: SpacetimePoint::tx(0.0, 0.0),
            pt: -1.0,
            px: vec![1.0 - 1e-9],
        };
        let v_near = legendre_inverse(&q_near, &p).unwrap();
        assert!(v_near.dt.is_finite() && v_near.dt > 0.0);
        let back = legendre(&v_near, &p).unwrap();
        assert!((back.pt - q_near.pt).abs() < 1e-6 * q_near.pt.abs());

        assert!(legendre_inverse(
            &Covector {
                base: SpacetimePoint::tx(0.0, 0.0),
                pt: 0.5,
                px: vec![0.0]
            },
            &p
        )
        .is_err());
    }

    #[test]
    fn legendre_round_trip_random() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..500 {
            let p = CostParams::new(rng.gen_range(0.1..0.9)).unwrap();
            let dx: Real = rng.gen_range(-2.0..2.0);
            let dt: Real = dx.abs() + rng.gen_range(1e-3..3.0);
            let v = TangentVector::at_origin(dt, vec![dx]);
            let q = legendre(&v, &p).unwrap();
            assert!(q.in_dual_interior());
            let w = legendre_inverse(&q, &p).unwrap();
            assert!((w.dt - v.dt).abs() < 1e-10 * (1.0 + v.dt.abs()));
            assert!((w.dx[0] - v.dx[0]).abs() < 1e-10 * (1.0 + v.dx[0].abs()));
            // and the other composition
            let q2 = legendre(&w, &p).unwrap();
            assert!((q2.pt - q.pt).abs() < 1e-10 * (1.0 + q.pt.abs()));
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let p = p_half();
        let q1 = legendre(&TangentVector::at_origin(1.0, vec![0.0]), &p).unwrap();
        assert!((hamiltonian(&q1, &p).unwrap() - 0.5).abs() < 1e-14);

        let q2 = legendre(&TangentVector::at_origin(2.0, vec![0.0]), &p).unwrap();
        assert!((hamiltonian(&q2, &p).unwrap() - 0.5 * 2f64.sqrt()).abs() < 1e-14);

        // Legendre identity H(Lv) + L(v) = <Lv, v>
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let pp = CostParams::new(rng.gen_range(0.15..0.85)).unwrap();
            let dx: Real = rng.gen_range(-1.5..1.5);
            let dt: Real = dx.abs() + rng.gen_range(0.05..2.0);
            let v = TangentVector::at_origin(dt, vec![dx]);
            let q = legendre(&v, &pp).unwrap();
            let lhs = hamiltonian(&q, &pp).unwrap() + lagrangian(&v, &pp).value();
            let rhs = q.apply(&v);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }
}

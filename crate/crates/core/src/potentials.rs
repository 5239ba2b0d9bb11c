//! Computable potential theory for the causal cost: the chain construction of
//! weak Kantorovich potentials anchored at a support pair, c-transforms and
//! c-subdifferentials, explicit c-convex evaluators for the counterexample
//! geometries, Monge-map recovery through the Legendre transform, and grid
//! regularity diagnostics.

use crate::ext::{ExtendedCost, NEG_INF, POS_INF};
use crate::geometry::{
    cost, legendre_inverse, lorentz_distance, CostParams, Covector, GeometryError, SpacetimePoint,
};
use crate::grid::{second_difference_constants, GridError, GridField};
use crate::transport::CostMatrix;
use crate::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default membership tolerance for c-subdifferential slacks.
pub const SUBDIFF_TOL: Real = 1e-7;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("support pair ({0},{1}) has infinite cost")]
    InfinitePair(usize, usize),
    #[error("support is not c-cyclically monotone: positive chain cycle")]
    NotMonotone,
    #[error("anchor index {0} out of range ({1} pairs)")]
    AnchorOutOfRange(usize, usize),
    #[error("potential is not finite at the base point")]
    NonFiniteBase,
    #[error("gradient covector lies outside the dual cone interior")]
    GradientOutsideCone,
    #[error("point ({0},{1}) is on the grid boundary or has non-finite neighbors")]
    NoGradient(usize, usize),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How a potential field was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// Chain construction anchored at the given support-pair index.
    ChainBuilt { anchor: usize },
    /// Pointwise c-transform of another field.
    CTransform,
    /// Closed-form evaluator.
    Explicit,
    /// Semigroup evolution.
    LaxOleinik,
}

/// Extended-real function on a finite point set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialField {
    #[serde(rename = "points")]
    pub domain: Vec<SpacetimePoint>,
    pub values: Vec<ExtendedCost>,
    pub provenance: Provenance,
}

impl PotentialField {
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Value at the domain point exactly equal to `p`, if present.
    pub fn value_at(&self, p: &SpacetimePoint) -> Option<ExtendedCost> {
        self.domain
            .iter()
            .position(|q| q == p)
            .map(|k| self.values[k])
    }
}

/// Chain potential on a c-cyclically monotone support.
///
/// For each query point `x` this is the exact supremum, over finite chains
/// inside `support` starting at the anchor pair, of the accumulated cost
/// differences, computed as a longest path in the chain graph (node = pair,
/// edge `a -> b` of weight `c(x_a,y_a) - c(x_b,y_a)`, terminal edge to `x` of
/// weight `c(x_k,y_k) - c(x,y_k)`). Unreachable queries get `-inf`; the
/// anchor's own source point gets exactly 0. A positive cycle (the support
/// not being monotone) is detected and rejected.
pub fn rockafellar_potential(
    support: &[(usize, usize)],
    matrix: &CostMatrix,
    anchor: usize,
    queries: &[SpacetimePoint],
) -> Result<PotentialField, PotentialError> {
    if anchor >= support.len() {
        return Err(PotentialError::AnchorOutOfRange(anchor, support.len()));
    }
    let own: Vec<Real> = support
        .iter()
        .map(|&(i, j)| {
            matrix
                .value(i, j)
                .as_finite()
                .ok_or(PotentialError::InfinitePair(i, j))
        })
        .collect::<Result<_, _>>()?;

    // longest path from the anchor over the chain graph
    let k = support.len();
    let mut edges: Vec<(usize, usize, Real)> = Vec::new();
    for (a, &(_, ja)) in support.iter().enumerate() {
        for (b, &(ib, _)) in support.iter().enumerate() {
            if a == b {
                continue;
            }
            if let Some(link) = matrix.value(ib, ja).as_finite() {
                edges.push((a, b, own[a] - link));
            }
        }
    }
    let mut dist = vec![Real::NEG_INFINITY; k];
    dist[anchor] = 0.0;
    for round in 0..=k {
        let mut updated = false;
        for &(a, b, w) in &edges {
            if dist[a].is_finite() && dist[a] + w > dist[b] + 1e-15 {
                dist[b] = dist[a] + w;
                updated = true;
            }
        }
        if !updated {
            break;
        }
        if round == k {
            return Err(PotentialError::NotMonotone);
        }
    }

    let values = queries
        .iter()
        .map(|q| {
            let mut best = NEG_INF;
            for (a, &(_, ja)) in support.iter().enumerate() {
                if !dist[a].is_finite() {
                    continue;
                }
                if let Some(tail) = cost(q, matrix.col_points.get(ja).unwrap(), &matrix.params)
                    .as_finite()
                {
                    best = best.max(ExtendedCost::finite(dist[a] + own[a] - tail));
                }
            }
            best
        })
        .collect();
    Ok(PotentialField {
        domain: queries.to_vec(),
        values,
        provenance: Provenance::ChainBuilt { anchor },
    })
}

/// Pointwise c-transform `psi(y) = inf_x (phi(x) + c(x,y))` with the infimum
/// convention `-inf + inf := +inf`; `+inf` when no finite combination exists.
pub fn c_transform(
    phi: &PotentialField,
    targets: &[SpacetimePoint],
    params: &CostParams,
) -> PotentialField {
    let values = targets
        .iter()
        .map(|y| {
            phi.domain
                .iter()
                .zip(&phi.values)
                .fold(POS_INF, |acc, (x, &v)| {
                    acc.min(v.add_inf(cost(x, y, params)))
                })
        })
        .collect();
    PotentialField {
        domain: targets.to_vec(),
        values,
        provenance: Provenance::CTransform,
    }
}

/// c-convex envelope `phi(x) = sup_y (psi(y) - c(x,y))` of a field of target
/// values, with the supremum convention `±inf ∓ inf := -inf`.
pub fn c_envelope(
    psi: &PotentialField,
    queries: &[SpacetimePoint],
    params: &CostParams,
) -> PotentialField {
    let values = queries
        .iter()
        .map(|x| {
            psi.domain
                .iter()
                .zip(&psi.values)
                .fold(NEG_INF, |acc, (y, &v)| {
                    acc.max(v.sub_sup(cost(x, y, params)))
                })
        })
        .collect();
    PotentialField {
        domain: queries.to_vec(),
        values,
        provenance: Provenance::Explicit,
    }
}

/// c-subdifferential membership at a base point: candidates `(y, psi(y))`
/// with finite `psi(y)`, finite `c(x,y)`, and slack
/// `phi(x) + c(x,y) - psi(y)` within `tol` in absolute value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubdifferentialSet {
    pub base: SpacetimePoint,
    /// `(y, slack)` for each member.
    pub pairs: Vec<(SpacetimePoint, Real)>,
}

pub fn c_subdifferential(
    x: &SpacetimePoint,
    phi_x: ExtendedCost,
    candidates: &[(SpacetimePoint, ExtendedCost)],
    params: &CostParams,
    tol: Real,
) -> Result<SubdifferentialSet, PotentialError> {
    let phi_x = phi_x.as_finite().ok_or(PotentialError::NonFiniteBase)?;
    let mut pairs = Vec::new();
    for (y, psi_y) in candidates {
        let (Some(psi_y), Some(c)) = (psi_y.as_finite(), cost(x, y, params).as_finite()) else {
            continue;
        };
        let slack = phi_x + c - psi_y;
        if slack.abs() <= tol {
            pairs.push((y.clone(), slack));
        }
    }
    Ok(SubdifferentialSet {
        base: x.clone(),
        pairs,
    })
}

/// Closed-form c-convex evaluators.
#[derive(Clone, Debug)]
pub enum CConvexSpec {
    /// `phi(x) = max_k (psi_k - c(x, y_k))` over finitely many atoms.
    Atoms(Vec<(SpacetimePoint, Real)>),
    /// `psi` supported on the hyperbola `{(y1, 1/y1) : y1 > 0}` (coordinates
    /// (spatial, temporal)) with `psi = -y1^{-p}`; the envelope is evaluated
    /// by a scan plus golden-section refinement over `y1`.
    Hyperbola,
}

#[derive(Clone, Debug)]
pub struct CConvexField {
    pub spec: CConvexSpec,
    pub params: CostParams,
}

impl CConvexField {
    pub fn atoms(atoms: Vec<(SpacetimePoint, Real)>, params: CostParams) -> Self {
        CConvexField {
            spec: CConvexSpec::Atoms(atoms),
            params,
        }
    }

    pub fn hyperbola(params: CostParams) -> Self {
        CConvexField {
            spec: CConvexSpec::Hyperbola,
            params,
        }
    }

    pub fn eval(&self, x: &SpacetimePoint) -> ExtendedCost {
        match &self.spec {
            CConvexSpec::Atoms(atoms) => atoms.iter().fold(NEG_INF, |acc, (y, psi)| {
                acc.max(ExtendedCost::finite(*psi).sub_sup(cost(x, y, &self.params)))
            }),
            CConvexSpec::Hyperbola => self.eval_hyperbola(x),
        }
    }

    /// Objective `psi(y) - c(x,y)` along the hyperbola at parameter `y1`.
    fn hyperbola_objective(&self, x: &SpacetimePoint, y1: Real) -> Real {
        let y = SpacetimePoint::tx(1.0 / y1, y1);
        match cost(x, &y, &self.params).as_finite() {
            Some(c) => -y1.powf(-self.params.p) - c,
            None => Real::NEG_INFINITY,
        }
    }

    fn eval_hyperbola(&self, x: &SpacetimePoint) -> ExtendedCost {
        assert_eq!(x.dim(), 1, "the hyperbola family lives in 1+1 dimensions");
        // coarse log-spaced scan, then golden-section refinement around the
        // best bracket to a 1e-10 parameter width
        let scan: Vec<Real> = (0..=2400)
            .map(|k| 10f64.powf(-4.0 + 6.0 * k as Real / 2400.0))
            .collect();
        let mut best_k = None;
        let mut best_v = Real::NEG_INFINITY;
        for (k, &y1) in scan.iter().enumerate() {
            let v = self.hyperbola_objective(x, y1);
            if v > best_v {
                best_v = v;
                best_k = Some(k);
            }
        }
        let Some(k) = best_k else {
            return NEG_INF;
        };
        if !best_v.is_finite() {
            return NEG_INF;
        }
        let mut lo = scan[k.saturating_sub(1)];
        let mut hi = scan[(k + 1).min(scan.len() - 1)];
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut a = hi - phi * (hi - lo);
        let mut b = lo + phi * (hi - lo);
        let mut fa = self.hyperbola_objective(x, a);
        let mut fb = self.hyperbola_objective(x, b);
        while hi - lo > 1e-10 {
            if fa < fb {
                lo = a;
                a = b;
                fa = fb;
                b = lo + phi * (hi - lo);
                fb = self.hyperbola_objective(x, b);
            } else {
                hi = b;
                b = a;
                fb = fa;
                a = hi - phi * (hi - lo);
                fa = self.hyperbola_objective(x, a);
            }
        }
        ExtendedCost::finite(best_v.max(fa).max(fb))
    }
}

/// Monge map at an interior grid point: central-difference gradient of the
/// potential, read as a covector, inverted through the Legendre transform.
/// With `grad phi(x) + grad_x c(x, T(x)) = 0` and
/// `grad_x c(x,y) = -dL/dv(x, y-x)`, the displacement is the Legendre
/// preimage of the gradient: `T(x) = x + legendre_inverse(grad phi(x))`.
pub fn monge_map(
    field: &GridField,
    i: usize,
    j: usize,
    params: &CostParams,
) -> Result<SpacetimePoint, PotentialError> {
    let g = &field.grid;
    if i == 0 || j == 0 || i + 1 >= g.nt || j + 1 >= g.nx {
        return Err(PotentialError::NoGradient(i, j));
    }
    let vals = [
        field.value(i + 1, j),
        field.value(i - 1, j),
        field.value(i, j + 1),
        field.value(i, j - 1),
    ];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(PotentialError::NoGradient(i, j));
    }
    let dphi_dt = (vals[0].value() - vals[1].value()) / (2.0 * g.h);
    let dphi_dx = (vals[2].value() - vals[3].value()) / (2.0 * g.h);
    let base = g.point(i, j);
    let q = Covector {
        base: base.clone(),
        pt: dphi_dt,
        px: vec![dphi_dx],
    };
    if !q.in_dual_interior() {
        return Err(PotentialError::GradientOutsideCone);
    }
    let v = legendre_inverse(&q, params)?;
    Ok(base.translate(&v))
}

/// Best semiconvexity constant seen by second differences on a fully finite
/// patch (grows without bound under refinement at kinks or jumps).
pub fn semiconvexity_diagnostic(field: &GridField) -> Result<Real, PotentialError> {
    Ok(second_difference_constants(field)?.semiconvexity)
}

/// Margin `phi(x) - sup{psi(y) - c(x,y) : y in candidates, d(x,y) <= delta}`.
/// A positive margin witnesses that near-cone targets are strictly
/// suboptimal at `x`; the supremum over an empty set is `-inf` (margin
/// `+inf`).
pub fn lightcone_margin(
    x: &SpacetimePoint,
    phi_x: ExtendedCost,
    candidates: &[(SpacetimePoint, ExtendedCost)],
    delta: Real,
    params: &CostParams,
) -> Result<ExtendedCost, PotentialError> {
    let phi_x = phi_x.as_finite().ok_or(PotentialError::NonFiniteBase)?;
    let mut sup = NEG_INF;
    for (y, psi_y) in candidates {
        if lorentz_distance(x, y) <= delta {
            sup = sup.max(psi_y.sub_sup(cost(x, y, params)));
        }
    }
    Ok(ExtendedCost::finite(phi_x).sub_sup(sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use crate::measures::DiscreteMeasure;
    use crate::transport::{build_cost_matrix, solve_primal};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p_half() -> CostParams {
        CostParams::new(0.5).unwrap()
    }

    #[test]
    fn single_pair_chain_is_zero_at_anchor() {
        let p = p_half();
        let mu = DiscreteMeasure::dirac(SpacetimePoint::tx(0.0, 0.0));
        let nu = DiscreteMeasure::dirac(SpacetimePoint::tx(1.0, 0.0));
        let m = build_cost_matrix(&mu, &nu, &p);
        let phi = rockafellar_potential(
            &[(0, 0)],
            &m,
            0,
            &[SpacetimePoint::tx(0.0, 0.0), SpacetimePoint::tx(0.0, 5.0)],
        )
        .unwrap();
        assert_eq!(phi.values[0], ExtendedCost::finite(0.0));
        // a spacelike query is unreachable
        assert!(phi.values[1].is_neg_inf());
    }

    #[test]
    fn chain_potential_is_a_pi_solution_on_solved_instances() {
        let p = p_half();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..10 {
            let n = 6;
            let mu_pts: Vec<_> = (0..n)
                .map(|_| SpacetimePoint::tx(rng.gen_range(-0.2..0.2), rng.gen_range(-1.0..1.0)))
                .collect();
            let nu_pts: Vec<_> = (0..n)
                .map(|_| SpacetimePoint::tx(rng.gen_range(4.0..5.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let w = vec![1.0 / n as Real; n];
            let mu = DiscreteMeasure::new(mu_pts, w.clone()).unwrap();
            let nu = DiscreteMeasure::new(nu_pts, w).unwrap();
            let m = build_cost_matrix(&mu, &nu, &p);
            let r = solve_primal(&m, &mu, &nu).unwrap();
            let support: Vec<_> = r
                .coupling
                .as_ref()
                .unwrap()
                .entries
                .iter()
                .map(|&(i, j, _)| (i, j))
                .collect();
            let phi = rockafellar_potential(&support, &m, 0, mu.points()).unwrap();
            let psi = c_transform(&phi, nu.points(), &p);

            // psi(y) - phi(x) = c(x,y) exactly on the support
            for &(i, j) in &support {
                let lhs = psi.values[j].value() - phi.values[i].value();
                let c = m.value(i, j).value();
                assert!(
                    (lhs - c).abs() <= 1e-8 * support.len() as Real,
                    "support residual {}",
                    (lhs - c).abs()
                );
            }
            // subsolution inequality everywhere
            for i in 0..mu.len() {
                for j in 0..nu.len() {
                    if let Some(c) = m.value(i, j).as_finite() {
                        if phi.values[i].is_finite() && psi.values[j].is_finite() {
                            assert!(psi.values[j].value() - phi.values[i].value() <= c + 1e-8);
                        }
                    }
                }
            }
            // every coupling entry is in the c-subdifferential
            let cands: Vec<_> = nu
                .points()
                .iter()
                .cloned()
                .zip(psi.values.iter().copied())
                .collect();
            for &(i, j) in &support {
                let set =
                    c_subdifferential(mu.point(i), phi.values[i], &cands, &p, SUBDIFF_TOL)
                        .unwrap();
                assert!(
                    set.pairs.iter().any(|(y, _)| y == nu.point(j)),
                    "entry ({i},{j}) missing from subdifferential"
                );
            }
        }
    }

    #[test]
    fn non_monotone_support_is_rejected() {
        let p = p_half();
        // the exchange counterexample support: {(x0,y1),(x1,y0)}
        let mu = DiscreteMeasure::new(
            vec![SpacetimePoint::tx(0.0, 0.0), SpacetimePoint::tx(-3.0, 3.0)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let nu = DiscreteMeasure::new(
            vec![SpacetimePoint::tx(4.0, 3.0), SpacetimePoint::tx(1.0, -1.0)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let m = build_cost_matrix(&mu, &nu, &p);
        let err = rockafellar_potential(&[(0, 0), (1, 1)], &m, 0, mu.points());
        assert!(matches!(err, Err(PotentialError::NotMonotone)));
    }

    #[test]
    fn c_transform_conventions() {
        let p = p_half();
        let x0 = SpacetimePoint::tx(0.0, 0.0);
        let phi = PotentialField {
            domain: vec![x0.clone()],
            values: vec![ExtendedCost::finite(0.0)],
            provenance: Provenance::Explicit,
        };
        // target in the future: psi = c(x0, y)
        let y = SpacetimePoint::tx(2.0, 1.0);
        let psi = c_transform(&phi, &[y.clone()], &p);
        assert_eq!(psi.values[0], cost(&x0, &y, &p));
        // spacelike target: +inf by convention
        let s = SpacetimePoint::tx(0.0, 3.0);
        let psi2 = c_transform(&phi, &[s], &p);
        assert!(psi2.values[0].is_pos_inf());
    }

    #[test]
    fn envelope_dominates_and_fixes_chain_fields() {
        let p = p_half();
        let mut rng = StdRng::seed_from_u64(57);
        let n = 5;
        let mu_pts: Vec<_> = (0..n)
            .map(|_| SpacetimePoint::tx(rng.gen_range(-0.2..0.2), rng.gen_range(-1.0..1.0)))
            .collect();
        let nu_pts: Vec<_> = (0..n)
            .map(|_| SpacetimePoint::tx(rng.gen_range(4.0..5.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let w = vec![1.0 / n as Real; n];
        let mu = DiscreteMeasure::new(mu_pts, w.clone()).unwrap();
        let nu = DiscreteMeasure::new(nu_pts, w).unwrap();
        let m = build_cost_matrix(&mu, &nu, &p);
        let r = solve_primal(&m, &mu, &nu).unwrap();
        let support: Vec<_> = r
            .coupling
            .unwrap()
            .entries
            .iter()
            .map(|&(i, j, _)| (i, j))
            .collect();
        let phi = rockafellar_potential(&support, &m, 0, mu.points()).unwrap();
        let psi = c_transform(&phi, nu.points(), &p);
        let phi_back = c_envelope(&psi, mu.points(), &p);
        for i in 0..mu.len() {
            // envelope of the transform dominates the original field
            assert!(phi_back.values[i].value() >= phi.values[i].value() - 1e-9);
        }
        // equality where the chain field is active (sources in the support)
        for &(i, _) in &support {
            assert!(
                (phi_back.values[i].value() - phi.values[i].value()).abs() < 1e-8,
                "fixed point fails at source {i}"
            );
        }
    }

    #[test]
    fn dirac_target_subdifferential() {
        let p = p_half();
        let y_star = SpacetimePoint::tx(3.0, 0.0);
        let field = CConvexField::atoms(vec![(y_star.clone(), 0.0)], p);
        let x = SpacetimePoint::tx(0.0, 0.5);
        let phi_x = field.eval(&x);
        let set = c_subdifferential(
            &x,
            phi_x,
            &[(y_star.clone(), ExtendedCost::finite(0.0))],
            &p,
            SUBDIFF_TOL,
        )
        .unwrap();
        assert_eq!(set.pairs.len(), 1);
        assert!(set.pairs[0].1.abs() < 1e-12);
    }

    #[test]
    fn hyperbola_field_matches_the_zero_slack_family() {
        let p = p_half();
        let field = CConvexField::hyperbola(p);
        for &x1 in &[1.0, 0.5, 0.1, 0.05, 0.02] {
            let x = SpacetimePoint::tx(0.0, x1);
            let v = field.eval(&x).value();
            assert!(v.abs() < 1e-6, "phi(({x1},0)) = {v}, expected 0");
            // the designated hyperbola point has zero slack
            let y = SpacetimePoint::tx(1.0 / x1, x1);
            let psi_y = ExtendedCost::finite(-x1.powf(-p.p));
            let set = c_subdifferential(&x, field.eval(&x), &[(y, psi_y)], &p, 1e-6).unwrap();
            assert_eq!(set.pairs.len(), 1);
        }
        // the envelope bound phi(x) <= |x_2|^p
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..60 {
            let x = SpacetimePoint::tx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let v = field.eval(&x);
            if v.is_finite() {
                assert!(v.value() <= x.t.abs().powf(p.p) + 1e-8);
            }
        }
    }

    #[test]
    fn monge_map_recovers_dirac_target() {
        let p = p_half();
        let y_star = SpacetimePoint::tx(3.0, 0.0);
        // phi(x) = -c(x, y*) = d(x, y*)^p on a grid in the past of y*
        let h = 1e-3;
        let grid = UniformGrid::covering(-0.01, 0.01, -0.01, 0.01, h);
        let field = GridField::from_fn(grid, |x| {
            ExtendedCost::finite(lorentz_distance(x, &y_star).powf(p.p))
        });
        let t = monge_map(&field, 10, 10, &p).unwrap();
        assert!(t.euclid_dist(&y_star) < 1e-6, "T(x) off by {}", t.euclid_dist(&y_star));

        // near-boundary and spacelike-gradient errors
        assert!(matches!(
            monge_map(&field, 0, 5, &p),
            Err(PotentialError::NoGradient(0, 5))
        ));
        let flat = GridField::from_fn(
            UniformGrid::covering(0.0, 0.1, 0.0, 0.1, 0.05),
            |x| ExtendedCost::finite(x.x[0]),
        );
        assert!(matches!(
            monge_map(&flat, 1, 1, &p),
            Err(PotentialError::GradientOutsideCone)
        ));
    }

    #[test]
    fn lightcone_margin_cases() {
        let p = p_half();
        let x = SpacetimePoint::tx(0.0, 0.0);
        let y_far = SpacetimePoint::tx(4.0, 0.0);
        let cands = vec![(y_far.clone(), ExtendedCost::finite(-1.0))];
        // candidate beyond delta: empty sup, margin +inf
        let m = lightcone_margin(&x, ExtendedCost::finite(0.0), &cands, 0.5, &p).unwrap();
        assert!(m.is_pos_inf());
        // candidate within delta
        let m2 = lightcone_margin(&x, ExtendedCost::finite(0.0), &cands, 5.0, &p).unwrap();
        let expect = 0.0 - (-1.0 - cost(&x, &y_far, &p).value());
        assert!((m2.value() - expect).abs() < 1e-12);
        // non-finite base errors
        assert!(lightcone_margin(&x, POS_INF, &cands, 1.0, &p).is_err());
    }
}

//! An optimal coupling that touches the null cone: mass on a rotated
//! rectangle whose top edge lies on the past null boundary of the near
//! target `y0`, transported to `nu = (delta_{y0} + delta_{y1})/2`. The right
//! slab of the rectangle carries more than half of the mass, so the far
//! target `y1` cannot absorb it all and the solver must send upper-edge
//! points near `x0` to `y0` at vanishing Lorentzian distance. Swapping the
//! assignments of `x0` and a point near the far corner `x1` produces an
//! explicit cyclical-monotonicity violation.

use super::ScenarioConfig;
use crate::geometry::{cost, lorentz_distance, SpacetimePoint};
use crate::measures::{rect_grid_dims, sample, DiscreteMeasure, RectFrame, ScenarioDensity};
use crate::report::{ScenarioOutput, ScenarioReport};
use crate::svg::SvgCanvas;
use crate::transport::{
    build_cost_matrix, check_cyclical_monotonicity, dual_gap, solve_primal,
    strictly_timelike_feasible, SolveStatus,
};
use crate::Real;

pub struct LightconeGeometry {
    pub x0: SpacetimePoint,
    pub x1: SpacetimePoint,
    pub y0: SpacetimePoint,
    pub y1: SpacetimePoint,
    pub density: ScenarioDensity,
    pub frame: RectFrame,
}

/// The scenario geometry in (spatial, temporal) coordinates:
/// `x0 = (0,0)`, `x1 = (3,-3)`, `y0 = (-1,1)`, `y1 = (3,4)`, the rectangle's
/// top edge running from `(-eps, eps)` to `x1` along the null line `t = -x`.
pub fn lightcone_geometry(eps: Real, thickness: Real, corner_radius: Real) -> LightconeGeometry {
    let upper_left = SpacetimePoint::tx(eps, -eps);
    let upper_right = SpacetimePoint::tx(-3.0, 3.0);
    let frame = RectFrame::new(&upper_left, &upper_right, thickness, corner_radius);
    LightconeGeometry {
        x0: SpacetimePoint::tx(0.0, 0.0),
        x1: upper_right.clone(),
        y0: SpacetimePoint::tx(1.0, -1.0),
        y1: SpacetimePoint::tx(4.0, 3.0),
        density: ScenarioDensity::RoundedRectangle {
            upper_left,
            upper_right,
            thickness,
            corner_radius,
            right_fraction: 0.15,
            right_boost: 6.0,
        },
        frame,
    }
}

pub fn run_example_lightcone_coupling(config: &ScenarioConfig) -> ScenarioOutput {
    let params = config.params();
    let n = config.n.unwrap_or(400);
    let eps = 0.05;
    let geo = lightcone_geometry(eps, 1.0, 0.1);

    let mu = sample(&geo.density, n, config.seed, true).expect("rectangle sampling");
    let nu = DiscreteMeasure::new(
        vec![geo.y0.clone(), geo.y1.clone()],
        vec![0.5, 0.5],
    )
    .unwrap();

    let (nu_cells, _) = rect_grid_dims(geo.frame.length, geo.frame.width, n);
    let gap = geo.frame.length / nu_cells as Real;
    let eps_cone = 2.0 * gap.powf(params.p);

    let mut report = ScenarioReport::new(
        "lightcone-coupling",
        serde_json::json!({
            "p": config.p, "n": n, "support": mu.len(), "seed": config.seed,
            "eps": eps, "thickness": 1.0, "corner_radius": 0.1,
            "sampling_gap": gap, "eps_cone": eps_cone,
        }),
    );

    // mass condition: the right slab holds more than half of the mass
    let cut = geo.frame.length * (1.0 - 0.15);
    let slab_mass: Real = mu
        .points()
        .iter()
        .zip(mu.weights())
        .filter(|(p, _)| geo.frame.intrinsic(p).0 >= cut)
        .map(|(_, &w)| w)
        .sum();
    report.check_ge(
        "right-slab-mass",
        "mass of the right slab of the rectangle",
        slab_mass,
        0.5 + 0.005,
    );

    // a strictly timelike coupling exists (upper strip to y1, rest to y0)
    report.check_that(
        "strictly-timelike-feasible",
        "some coupling supported inside the open cone exists",
        strictly_timelike_feasible(&mu, &nu).is_feasible(),
    );

    let start = std::time::Instant::now();
    let matrix = build_cost_matrix(&mu, &nu, &params);
    let result = solve_primal(&matrix, &mu, &nu).expect("balanced masses");
    let solve_secs = start.elapsed().as_secs_f64();
    report.check_that(
        "solver-status-optimal",
        "the primal solve returns an optimal plan",
        result.status == SolveStatus::Optimal,
    );
    let gap_value = dual_gap(
        result.dual_rows.as_ref().unwrap(),
        result.dual_cols.as_ref().unwrap(),
        &matrix,
        &mu,
        &nu,
        &result,
    )
    .expect("solver duals are feasible");
    report.check_le("dual-gap", "solver duality gap", gap_value.abs(), config.tol_gap);

    // the optimal support is c-cyclically monotone
    let coupling = result.coupling.as_ref().unwrap();
    let support: Vec<_> = coupling.entries.iter().map(|&(i, j, _)| (i, j)).collect();
    let mono = check_cyclical_monotonicity(&support, &matrix).expect("finite support");
    report.check_that(
        "optimal-support-monotone",
        "no negative exchange cycle on the optimal support",
        !mono.has_cycle(),
    );

    // transport touches the null cone near x0: some entry into y0 whose
    // source sits within eps_cone of the cone and near the x0 corner
    let y0_col = 0usize;
    let mut cone_touch: Option<(Real, Real)> = None; // (d to cone, dist to x0)
    for &(i, j, _) in &coupling.entries {
        if j != y0_col {
            continue;
        }
        let x = mu.point(i);
        let d = lorentz_distance(x, &geo.y0);
        let to_x0 = x.euclid_dist(&geo.x0);
        if d <= eps_cone && to_x0 <= 0.75 {
            let better = match cone_touch {
                Some((dc, _)) => d < dc,
                None => true,
            };
            if better {
                cone_touch = Some((d, to_x0));
            }
        }
    }
    report.push(
        "cone-touching-entry",
        "an optimal entry (x, y0) with d(x,y0) <= eps_cone and x near x0",
        serde_json::json!(cone_touch),
        serde_json::json!({"d_max": eps_cone, "x0_radius": 0.75}),
        cone_touch.is_some(),
    );

    // the hypothetical exchange {(x0,y1), (x',y0)} with x' near x1 violates
    // cyclical monotonicity with the computed distances
    let c_x0_y1 = cost(&geo.x0, &geo.y1, &params).value();
    report.check_le(
        "arc-cost-x0-y1",
        "|c(x0,y1) + 7^{p/2}| for the computed null-adjacent arc",
        (c_x0_y1 + 7f64.powf(params.p / 2.0)).abs(),
        1e-12,
    );
    let exchange_mu =
        DiscreteMeasure::new(vec![geo.x0.clone(), geo.x1.clone()], vec![0.5, 0.5]).unwrap();
    let exchange_matrix = build_cost_matrix(&exchange_mu, &nu, &params);
    // support (x0 -> y1), (x1 -> y0): columns are ordered (y0, y1)
    let cert = check_cyclical_monotonicity(&[(0, 1), (1, 0)], &exchange_matrix)
        .expect("finite exchange pairs");
    report.check_that(
        "exchange-negative-cycle",
        "the hypothetical exchange {(x0,y1),(x1,y0)} forms a negative cycle",
        cert.has_cycle(),
    );
    // expected violation with computed distances: 7^p - 7^{p/2}
    let violation = match &cert {
        crate::transport::Certificate::MonotonicityCycle { violation, .. } => *violation,
        _ => 0.0,
    };
    report.check_le(
        "exchange-violation",
        "|violation - (7^p - 7^{p/2})| of the exchange 2-cycle",
        (violation - (7f64.powf(params.p) - 7f64.powf(params.p / 2.0))).abs(),
        1e-12,
    );
    // some right-slab atom must be routed to y0 (the far target cannot
    // absorb more than half of the mass); record the best support-side
    // violation achievable with a sampled x' near x1
    let mut slab_to_y0 = false;
    let mut support_violation = Real::NEG_INFINITY;
    for &(i, j, _) in &coupling.entries {
        let x = mu.point(i);
        if j == y0_col && geo.frame.intrinsic(x).0 >= cut {
            slab_to_y0 = true;
        }
        if j == y0_col && x.euclid_dist(&geo.x1) <= 1.0 {
            if let (Some(cx_y0), Some(cx_y1)) = (
                cost(x, &geo.y0, &params).as_finite(),
                cost(x, &geo.y1, &params).as_finite(),
            ) {
                let v =
                    (c_x0_y1 + cx_y0) - (cx_y1 + cost(&geo.x0, &geo.y0, &params).value());
                support_violation = support_violation.max(v);
            }
        }
    }
    report.check_that(
        "slab-atom-to-near-target",
        "some right-slab support atom is transported to y0",
        slab_to_y0,
    );
    report.push(
        "support-exchange-violation",
        "best monotonicity violation using a support atom near x1 as x' (positive once the sampling gap resolves the corner)",
        serde_json::json!(support_violation),
        serde_json::json!("recorded"),
        true,
    );
    // informational: the two readings of c(x1,y1); only computed distances
    // feed the assertions above
    report.push(
        "arc-cost-x1-y1",
        "computed c(x1,y1) = -d^p with d(x1,y1) = 7; alternative printed reading -4^p",
        serde_json::json!({
            "computed": cost(&geo.x1, &geo.y1, &params).value(),
            "alternative": -(4f64.powf(params.p)),
        }),
        serde_json::json!("recorded"),
        true,
    );
    report.check_le(
        "runtime-seconds",
        "primal solve wall time",
        solve_secs,
        30.0,
    );

    let mut output = ScenarioOutput::new(report);
    let mut csv = String::from("t,x,weight,target\n");
    let mut target_of = vec![usize::MAX; mu.len()];
    for &(i, j, _) in &coupling.entries {
        target_of[i] = j; // forest plan: at most one split point, fine for plots
    }
    for (k, (pt, w)) in mu.points().iter().zip(mu.weights()).enumerate() {
        csv.push_str(&format!("{},{},{},{}\n", pt.t, pt.x[0], w, target_of[k]));
    }
    output.tables.push(("coupling.csv".into(), csv));
    if config.plots {
        let mut canvas = SvgCanvas::new(-1.5, 4.5, -4.5, 4.5, 480.0, 720.0);
        canvas.line((-1.5, 1.5), (4.5, -4.5), "gray", 0.5);
        for (k, pt) in mu.points().iter().enumerate() {
            let color = if target_of[k] == 0 { "steelblue" } else { "indianred" };
            canvas.circle(pt.x[0], pt.t, 1.2, color);
        }
        canvas.circle(geo.y0.x[0], geo.y0.t, 3.0, "black");
        canvas.text(geo.y0.x[0] + 0.1, geo.y0.t, "y0");
        canvas.circle(geo.y1.x[0], geo.y1.t, 3.0, "black");
        canvas.text(geo.y1.x[0] + 0.1, geo.y1.t, "y1");
        canvas.circle(geo.x0.x[0], geo.x0.t, 2.0, "black");
        canvas.text(geo.x0.x[0] + 0.1, geo.x0.t, "x0");
        output.figures.push(("coupling.svg".into(), canvas.finish()));
    }
    output
}

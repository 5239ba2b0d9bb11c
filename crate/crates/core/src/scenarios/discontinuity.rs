//! A c-convex function that is discontinuous in the interior of its domain:
//! `phi(x) = max{-c(x, y1), a - c(x, y0)}` with `a << 0`. The field vanishes
//! at the cone point `x0` on the past null boundary of `y1`, jumps to
//! `a + d(x0,y0)^p` across that boundary, stays smooth (bounded
//! second-difference constants) away from the two null lines, and blows up
//! under refinement on a patch across `x0`.

use super::ScenarioConfig;
use crate::ext::ExtendedCost;
use crate::geometry::{cost, lorentz_distance, CostParams, SpacetimePoint};
use crate::grid::{GridField, UniformGrid};
use crate::potentials::{semiconvexity_diagnostic, CConvexField};
use crate::report::{ScenarioOutput, ScenarioReport};
use crate::svg::SvgCanvas;
use crate::Real;

const A: Real = -10.0;

struct Geometry {
    y1: SpacetimePoint,
    y0: SpacetimePoint,
    x0: SpacetimePoint,
}

fn geometry() -> Geometry {
    Geometry {
        // (spatial, temporal) = (2, 2), (-2, 2), (-1, -1)
        y1: SpacetimePoint::tx(2.0, 2.0),
        y0: SpacetimePoint::tx(2.0, -2.0),
        x0: SpacetimePoint::tx(-1.0, -1.0),
    }
}

fn field(params: CostParams, a: Real) -> CConvexField {
    let g = geometry();
    CConvexField::atoms(vec![(g.y1, 0.0), (g.y0, a)], params)
}

fn grid_eval(f: &CConvexField, grid: UniformGrid) -> GridField {
    GridField::from_fn(grid, |p| f.eval(p))
}

pub fn run_example_discontinuity(config: &ScenarioConfig) -> ScenarioOutput {
    let params = config.params();
    let g = geometry();
    let phi = field(params, A);

    let mut report = ScenarioReport::new(
        "discontinuity",
        serde_json::json!({"p": config.p, "a": A}),
    );

    // value at the cone point is exactly 0: the y1 branch dominates there
    let phi_x0 = phi.eval(&g.x0);
    report.check_le(
        "value-at-cone-point",
        "|phi(x0)|: the y1 branch gives -c(x0,y1) = 0 on the null boundary",
        phi_x0.value().abs(),
        1e-12,
    );

    // one-sided limit across the boundary equals a + d(x0,y0)^p
    let d00 = lorentz_distance(&g.x0, &g.y0);
    let limit = A - cost(&g.x0, &g.y0, &params).value();
    let closed_form = A + 8f64.powf(params.p / 2.0);
    report.check_le(
        "one-sided-limit",
        "|lim phi - (a + 8^{p/2})| approaching x0 from below the y1 boundary",
        (limit - closed_form).abs(),
        1e-10,
    );
    report.check_le(
        "one-sided-limit-sampled",
        "|phi(x0 + delta into the a-branch) - limit| at delta = 1e-6",
        {
            let probe = SpacetimePoint::tx(g.x0.t + 1e-6, g.x0.x[0]);
            (phi.eval(&probe).value() - limit).abs()
        },
        1e-4,
    );
    report.check_le(
        "distance-x0-y0",
        "|d(x0,y0) - sqrt(8)|",
        (d00 - 8f64.sqrt()).abs(),
        1e-12,
    );

    // discontinuity gap |a| - d(x0,y0)^p across exponents
    for p_var in [0.3, 0.5, 0.7] {
        let pv = CostParams::new(p_var).unwrap();
        let phiv = field(pv, A);
        let gap = phiv.eval(&g.x0).value() - (A - cost(&g.x0, &g.y0, &pv).value());
        let expect = A.abs() - d00.powf(p_var);
        report.check_le(
            &format!("gap-p-{p_var}"),
            "measured jump vs |a| - d(x0,y0)^p",
            (gap - expect).abs(),
            1e-10,
        );
    }

    // bounded second differences on a patch avoiding both null lines
    // (inside the past of y0, outside the past of y1)
    let mut smooth_max: Real = 0.0;
    for h in [0.04, 0.02, 0.01] {
        let grid = UniformGrid::covering(-0.36, -0.04, -1.36, -1.04, h);
        let gf = grid_eval(&phi, grid);
        let k = semiconvexity_diagnostic(&gf).expect("patch is finite");
        smooth_max = smooth_max.max(k);
    }
    report.check_le(
        "smooth-patch-bounded",
        "max semiconvexity constant on the smooth patch over h in {0.04,0.02,0.01}",
        smooth_max,
        10.0,
    );

    // blow-up on a patch straddling x0: at least doubling per halving
    let ks: Vec<Real> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| {
            let grid = UniformGrid::covering(g.x0.t - 0.16, g.x0.t + 0.16, g.x0.x[0] - 0.16, g.x0.x[0] + 0.16, h);
            semiconvexity_diagnostic(&grid_eval(&phi, grid)).expect("patch is finite")
        })
        .collect();
    report.check_ge(
        "jump-patch-ratio-1",
        "semiconvexity constant growth, h = 0.04 -> 0.02",
        ks[1] / ks[0],
        2.0,
    );
    report.check_ge(
        "jump-patch-ratio-2",
        "semiconvexity constant growth, h = 0.02 -> 0.01",
        ks[2] / ks[1],
        2.0,
    );

    // negative control a = 0: the value assertion must fail there
    let phi0 = field(params, 0.0).eval(&g.x0).value();
    report.check_that(
        "negative-control",
        "with a = 0 the a-branch wins at x0 and phi(x0) != 0",
        phi0.abs() > 1.0,
    );

    let mut output = ScenarioOutput::new(report);
    // value profile across the boundary for plotting
    let mut csv = String::from("s,phi\n");
    let mut pts = Vec::new();
    for k in -200..=200 {
        let s = k as Real * 0.005;
        // cut through x0 in the time direction
        let p = SpacetimePoint::tx(g.x0.t + s, g.x0.x[0]);
        let v = phi.eval(&p);
        csv.push_str(&format!("{s},{v}\n"));
        if let Some(v) = v.as_finite() {
            pts.push((s, v));
        }
    }
    output.tables.push(("value-cut.csv".into(), csv));
    if config.plots {
        let mut canvas = SvgCanvas::new(-1.0, 1.0, -11.0, 1.0, 480.0, 360.0);
        canvas.polyline(&pts, "black", 1.0);
        canvas.circle(0.0, 0.0, 3.0, "red");
        canvas.text(0.05, 0.4, "x0");
        output.figures.push(("value-cut.svg".into(), canvas.finish()));
    }
    output
}

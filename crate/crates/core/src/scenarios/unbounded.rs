//! A c-convex function whose c-subdifferential is unbounded over a compact
//! base set: targets on the hyperbola `(y1, 1/y1)` with values `-y1^{-p}`.
//! Every base point `(x1, 0)` with small `x1 > 0` picks up the subgradient
//! target `(x1, 1/x1)`, whose norm `sqrt(x1^2 + x1^{-2})` diverges, while the
//! field itself stays below `|x2|^p`.

use super::ScenarioConfig;
use crate::ext::ExtendedCost;
use crate::geometry::SpacetimePoint;
use crate::potentials::{c_subdifferential, CConvexField};
use crate::report::{ScenarioOutput, ScenarioReport};
use crate::Real;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BASE_XS: [Real; 5] = [1.0, 0.5, 0.1, 0.05, 0.02];

pub fn run_example_unbounded_subdiff(config: &ScenarioConfig) -> ScenarioOutput {
    let params = config.params();
    let phi = CConvexField::hyperbola(params);
    let mut report = ScenarioReport::new(
        "unbounded-subdiff",
        serde_json::json!({"p": config.p, "seed": config.seed, "base_points": BASE_XS}),
    );

    for &x1 in &BASE_XS {
        let x = SpacetimePoint::tx(0.0, x1);
        let y = SpacetimePoint::tx(1.0 / x1, x1);
        let psi_y = ExtendedCost::finite(-x1.powf(-params.p));
        let phi_x = phi.eval(&x);
        let set = c_subdifferential(&x, phi_x, &[(y.clone(), psi_y)], &params, 1e-6)
            .expect("phi is finite at (x1, 0)");
        let slack = set.pairs.first().map(|(_, s)| s.abs());
        report.push(
            &format!("subdiff-slack-x1-{x1}"),
            "|phi(x) + c(x,y) - psi(y)| for the hyperbola target above (x1,0)",
            serde_json::json!(slack),
            serde_json::json!({"max": 1e-6}),
            slack.is_some_and(|s| s <= 1e-6),
        );
    }
    // norm of the subgradient target is sqrt(x1^2 + 1/x1^2), strictly
    // increasing as x1 decreases
    let norms: Vec<Real> = BASE_XS
        .iter()
        .map(|&x1| (x1 * x1 + 1.0 / (x1 * x1)).sqrt())
        .collect();
    // BASE_XS is ordered downward, so strict growth means divergence
    let strictly_growing = norms.windows(2).all(|w| w[1] > w[0]);
    report.check_that(
        "subdiff-norms-diverge",
        "target norms sqrt(x1^2 + 1/x1^2) strictly increase as x1 decreases",
        strictly_growing,
    );

    // the envelope bound phi(x) <= |x2|^p on sampled points
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst: Real = Real::NEG_INFINITY;
    for _ in 0..100 {
        let x = SpacetimePoint::tx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let v = phi.eval(&x);
        if let Some(v) = v.as_finite() {
            worst = worst.max(v - x.t.abs().powf(params.p));
        }
    }
    report.check_le(
        "envelope-bound",
        "max of phi(x) - |x2|^p over 100 sampled points",
        worst,
        1e-8,
    );

    let mut output = ScenarioOutput::new(report);
    let mut csv = String::from("x1,norm,phi\n");
    for (x1, norm) in BASE_XS.iter().zip(&norms) {
        let v = phi.eval(&SpacetimePoint::tx(0.0, *x1));
        csv.push_str(&format!("{x1},{norm},{v}\n"));
    }
    output.tables.push(("subdiff-norms.csv".into(), csv));
    output
}

//! Uniform rectangular grids in 1+1 dimensions, grid-sampled fields, and the
//! second-difference regularity diagnostics used to measure semiconvexity
//! and semiconcavity constants.

use crate::ext::ExtendedCost;
use crate::geometry::SpacetimePoint;
use crate::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid must have at least 3 points per axis for interior stencils")]
    TooSmall,
    #[error("non-finite value inside the patch at index {0}")]
    NonFiniteValue(usize),
    #[error("value count {0} does not match grid size {1}")]
    SizeMismatch(usize, usize),
}

/// Uniform grid `t0 + i h, x0 + j h` with `0 <= i < nt`, `0 <= j < nx`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniformGrid {
    pub t0: Real,
    pub x0: Real,
    pub h: Real,
    pub nt: usize,
    pub nx: usize,
}

impl UniformGrid {
    /// Grid covering `[t0, t1] x [x0, x1]` with step `h` (inclusive bounds,
    /// endpoint rounded in).
    pub fn covering(t0: Real, t1: Real, x0: Real, x1: Real, h: Real) -> Self {
        assert!(h > 0.0 && t1 > t0 && x1 > x0);
        let nt = ((t1 - t0) / h).round() as usize + 1;
        let nx = ((x1 - x0) / h).round() as usize + 1;
        UniformGrid { t0, x0, h, nt, nx }
    }

    pub fn len(&self) -> usize {
        self.nt * self.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nx + j
    }

    pub fn point(&self, i: usize, j: usize) -> SpacetimePoint {
        SpacetimePoint::tx(self.t0 + i as Real * self.h, self.x0 + j as Real * self.h)
    }

    pub fn points(&self) -> Vec<SpacetimePoint> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nt {
            for j in 0..self.nx {
                out.push(self.point(i, j));
            }
        }
        out
    }
}

/// Extended-real field sampled on a uniform grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridField {
    pub grid: UniformGrid,
    pub values: Vec<ExtendedCost>,
}

impl GridField {
    pub fn new(grid: UniformGrid, values: Vec<ExtendedCost>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::SizeMismatch(values.len(), grid.len()));
        }
        Ok(GridField { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(&SpacetimePoint) -> ExtendedCost) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nt {
            for j in 0..grid.nx {
                values.push(f(&grid.point(i, j)));
            }
        }
        GridField { grid, values }
    }

    pub fn value(&self, i: usize, j: usize) -> ExtendedCost {
        self.values[self.grid.index(i, j)]
    }

    /// CSV rows `t,x,value` (values printed as `inf`/`-inf` when infinite).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,value\n");
        for i in 0..self.grid.nt {
            for j in 0..self.grid.nx {
                let p = self.grid.point(i, j);
                out.push_str(&format!("{},{},{}\n", p.t, p.x[0], self.value(i, j)));
            }
        }
        out
    }
}

/// Second-difference constants over interior points and axis/diagonal
/// directions `e`: quotients `(f(x+he) + f(x-he) - 2 f(x)) / |he|^2`.
///
/// `semiconvexity = max(0, -min quotient)` and
/// `semiconcavity = max(0, +max quotient)`; both bounded under refinement is
/// the grid-level reading of `C^{1,1}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SecondDifferenceConstants {
    pub semiconvexity: Real,
    pub semiconcavity: Real,
    /// Interior stencils actually evaluated (masking can skip some).
    pub stencils: usize,
}

const DIRECTIONS: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

fn second_differences(
    field: &GridField,
    mask_infinite: bool,
) -> Result<SecondDifferenceConstants, GridError> {
    let g = &field.grid;
    if g.nt < 3 || g.nx < 3 {
        return Err(GridError::TooSmall);
    }
    let mut min_q = Real::INFINITY;
    let mut max_q = Real::NEG_INFINITY;
    let mut stencils = 0usize;
    for i in 1..g.nt - 1 {
        for j in 1..g.nx - 1 {
            let center = field.value(i, j);
            if !center.is_finite() {
                if mask_infinite {
                    continue;
                }
                return Err(GridError::NonFiniteValue(g.index(i, j)));
            }
            for &(di, dj) in &DIRECTIONS {
                let ip = (i as isize + di) as usize;
                let jp = (j as isize + dj) as usize;
                let im = (i as isize - di) as usize;
                let jm = (j as isize - dj) as usize;
                let plus = field.value(ip, jp);
                let minus = field.value(im, jm);
                if !plus.is_finite() || !minus.is_finite() {
                    if mask_infinite {
                        continue;
                    }
                    return Err(GridError::NonFiniteValue(g.index(ip, jp)));
                }
                let he2 = (g.h * g.h) * ((di * di + dj * dj) as Real);
                let q = (plus.value() + minus.value() - 2.0 * center.value()) / he2;
                min_q = min_q.min(q);
                max_q = max_q.max(q);
                stencils += 1;
            }
        }
    }
    if stencils == 0 {
        return Err(GridError::TooSmall);
    }
    Ok(SecondDifferenceConstants {
        semiconvexity: (-min_q).max(0.0),
        semiconcavity: max_q.max(0.0),
        stencils,
    })
}

/// Second differences on a fully finite patch; any `±inf` inside is an error.
pub fn second_difference_constants(
    field: &GridField,
) -> Result<SecondDifferenceConstants, GridError> {
    second_differences(field, false)
}

/// Second differences with infinite plateaus masked out of the stencils
/// (used when evolved fields are undefined outside causal reach).
pub fn second_difference_constants_masked(
    field: &GridField,
) -> Result<SecondDifferenceConstants, GridError> {
    second_differences(field, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(h: Real, f: impl Fn(Real, Real) -> Real) -> GridField {
        let grid = UniformGrid::covering(-0.5, 0.5, -0.5, 0.5, h);
        GridField::from_fn(grid, |p| ExtendedCost::finite(f(p.t, p.x[0])))
    }

    #[test]
    fn convex_quadratic_has_zero_semiconvexity_constant() {
        let field = sample(0.05, |t, x| t * t + x * x);
        let k = second_difference_constants(&field).unwrap();
        assert!(k.semiconvexity < 1e-9, "got {}", k.semiconvexity);
        assert!((k.semiconcavity - 2.0).abs() < 1e-9);
    }

    #[test]
    fn kink_blows_up_like_one_over_h() {
        // a stencil at or next to the kink sees between -1/h and -2/h,
        // depending on whether the kink lies on a grid point
        for h in [0.04, 0.02, 0.01] {
            let field = sample(h, |t, _| -(t.abs()));
            let k = second_difference_constants(&field).unwrap();
            assert!(
                k.semiconvexity >= 1.0 / h - 1e-6 && k.semiconvexity <= 2.0 / h + 1e-6,
                "h={h}: {}",
                k.semiconvexity
            );
        }
    }

    #[test]
    fn masking_skips_infinite_plateaus() {
        let grid = UniformGrid::covering(0.0, 1.0, 0.0, 1.0, 0.25);
        let field = GridField::from_fn(grid, |p| {
            if p.t < 0.2 {
                ExtendedCost::pos_inf()
            } else {
                ExtendedCost::finite(p.t * p.t)
            }
        });
        assert!(second_difference_constants(&field).is_err());
        let k = second_difference_constants_masked(&field).unwrap();
        assert!(k.stencils > 0);
    }
}

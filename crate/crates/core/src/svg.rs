//! Dependency-light SVG emission: polylines, scatter marks, and grid
//! heatmaps, enough to mirror the scenario geometries in a report folder.

use crate::grid::GridField;
use crate::Real;

pub struct SvgCanvas {
    width: Real,
    height: Real,
    // data -> viewport affine
    sx: Real,
    sy: Real,
    ox: Real,
    oy: Real,
    body: String,
}

impl SvgCanvas {
    /// Canvas mapping the data rectangle `[x0,x1] x [y0,y1]` onto a viewport
    /// of the given pixel size (y axis pointing up).
    pub fn new(x0: Real, x1: Real, y0: Real, y1: Real, width: Real, height: Real) -> Self {
        let sx = width / (x1 - x0);
        let sy = height / (y1 - y0);
        SvgCanvas {
            width,
            height,
            sx,
            sy,
            ox: x0,
            oy: y1,
            body: String::new(),
        }
    }

    fn map(&self, x: Real, y: Real) -> (Real, Real) {
        ((x - self.ox) * self.sx, (self.oy - y) * self.sy)
    }

    pub fn polyline(&mut self, pts: &[(Real, Real)], stroke: &str, width: Real) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (px, py) = self.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>\n",
            coords.join(" ")
        ));
    }

    pub fn circle(&mut self, x: Real, y: Real, r: Real, fill: &str) {
        let (px, py) = self.map(x, y);
        self.body.push_str(&format!(
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r}\" fill=\"{fill}\"/>\n"
        ));
    }

    pub fn line(&mut self, a: (Real, Real), b: (Real, Real), stroke: &str, width: Real) {
        self.polyline(&[a, b], stroke, width);
    }

    pub fn text(&mut self, x: Real, y: Real, label: &str) {
        let (px, py) = self.map(x, y);
        self.body.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{py:.2}\" font-size=\"11\" font-family=\"monospace\">{label}</text>\n"
        ));
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.body
        )
    }
}

/// Heatmap of a grid field (x horizontal, t vertical, infinite cells grey).
pub fn heatmap(field: &GridField) -> String {
    let g = &field.grid;
    let finite: Vec<Real> = field
        .values
        .iter()
        .filter_map(|v| v.as_finite())
        .collect();
    let (lo, hi) = finite.iter().fold((Real::INFINITY, Real::NEG_INFINITY), |(a, b), &v| {
        (a.min(v), b.max(v))
    });
    let span = (hi - lo).max(1e-30);
    let cell = 6.0;
    let mut body = String::new();
    for i in 0..g.nt {
        for j in 0..g.nx {
            let v = field.value(i, j);
            let color = match v.as_finite() {
                None => "rgb(180,180,180)".to_string(),
                Some(v) => {
                    let u = ((v - lo) / span).clamp(0.0, 1.0);
                    let r = (255.0 * u) as u8;
                    let b = (255.0 * (1.0 - u)) as u8;
                    format!("rgb({r},60,{b})")
                }
            };
            let x = j as Real * cell;
            let y = (g.nt - 1 - i) as Real * cell;
            body.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{color}\"/>\n"
            ));
        }
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n{}</svg>\n",
        g.nx as Real * cell,
        g.nt as Real * cell,
        body
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtendedCost;
    use crate::grid::UniformGrid;

    #[test]
    fn canvas_produces_wellformed_svg() {
        let mut c = SvgCanvas::new(-1.0, 1.0, -1.0, 1.0, 200.0, 200.0);
        c.polyline(&[(-1.0, -1.0), (1.0, 1.0)], "black", 1.0);
        c.circle(0.0, 0.0, 2.0, "red");
        c.text(0.1, 0.1, "x0");
        let s = c.finish();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("polyline") && s.contains("circle") && s.contains("text"));
    }

    #[test]
    fn heatmap_handles_infinite_cells() {
        let field = crate::grid::GridField::from_fn(
            UniformGrid::covering(0.0, 1.0, 0.0, 1.0, 0.5),
            |p| {
                if p.t > 0.7 {
                    ExtendedCost::pos_inf()
                } else {
                    ExtendedCost::finite(p.x[0])
                }
            },
        );
        let s = heatmap(&field);
        assert!(s.contains("rgb(180,180,180)"));
    }
}

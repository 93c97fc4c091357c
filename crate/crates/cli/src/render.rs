//! SVG rendering of configurations and fronts.

use std::fmt::Write;

use gradperc::front::FrontResult;
use gradperc::{Configuration, DualEdge, SiteCoord};

const SQRT3: f64 = 1.732_050_807_568_877_2;
const OCCUPIED: &str = "#2b5c8a";
const VACANT: &str = "#f2efe6";

/// Cartesian centre of a site, with `y` pointing up.
pub fn center(z: SiteCoord) -> (f64, f64) {
    (z.i as f64 + z.j as f64 / 2.0, z.j as f64 * SQRT3 / 2.0)
}

/// The segment of the hexagonal dual lattice separating the two cells.
pub fn dual_segment(e: &DualEdge) -> [(f64, f64); 2] {
    let (ax, ay) = center(e.lo());
    let (bx, by) = center(e.hi());
    let (mx, my) = ((ax + bx) / 2.0, (ay + by) / 2.0);
    // Unit normal to ab, scaled to half a hexagon side.
    let (dx, dy) = (bx - ax, by - ay);
    let half = 0.5 / SQRT3;
    [(mx - dy * half, my + dx * half), (mx + dy * half, my - dx * half)]
}

pub struct RenderOptions {
    /// Draw guide lines at heights `±band` (in rows) when set.
    pub band: Option<f64>,
}

pub fn render_svg(c: &Configuration, front: Option<&FrontResult>, opts: &RenderOptions) -> String {
    let r = *c.region();
    let radius = 1.0 / SQRT3;
    let corners: Vec<(f64, f64)> = (0..6)
        .map(|k| {
            let a = std::f64::consts::PI / 6.0 + k as f64 * std::f64::consts::PI / 3.0;
            (radius * a.cos(), radius * a.sin())
        })
        .collect();
    let xs = [
        center(SiteCoord::new(r.a1, r.b1)).0,
        center(SiteCoord::new(r.a1, r.b2)).0,
    ];
    let min_x = xs[0].min(xs[1]) - 1.0;
    let max_x = center(SiteCoord::new(r.a2, r.b2))
        .0
        .max(center(SiteCoord::new(r.a2, r.b1)).0)
        + 1.0;
    let min_y = center(SiteCoord::new(r.a1, r.b1)).1 - 1.0;
    let max_y = center(SiteCoord::new(r.a1, r.b2)).1 + 1.0;
    let (w, h) = (max_x - min_x, max_y - min_y);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{min_x:.3} {:.3} {w:.3} {h:.3}" width="{:.0}" height="{:.0}">"#,
        -max_y,
        (w * 8.0).max(64.0),
        (h * 8.0).max(64.0)
    );
    // One path per colour keeps the file small.
    for (occupied, fill) in [(true, OCCUPIED), (false, VACANT)] {
        let mut d = String::new();
        for z in r.sites().filter(|&z| c.is_occupied(z) == occupied) {
            let (cx, cy) = center(z);
            for (k, (dx, dy)) in corners.iter().enumerate() {
                let cmd = if k == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.3} {:.3}", cx + dx, -(cy + dy));
            }
            d.push('Z');
        }
        if !d.is_empty() {
            let _ = writeln!(
                s,
                r#"<path class="{}" fill="{fill}" stroke="none" d="{d}"/>"#,
                if occupied { "occupied" } else { "vacant" }
            );
        }
    }
    if let Some(band) = opts.band {
        for y in [band, -band] {
            let yy = -(y * SQRT3 / 2.0);
            let _ = writeln!(
                s,
                r##"<line class="band" x1="{min_x:.3}" y1="{yy:.3}" x2="{max_x:.3}" y2="{yy:.3}" stroke="#c0392b" stroke-width="0.15" stroke-dasharray="0.6 0.4"/>"##
            );
        }
    }
    if let Some(f) = front.filter(|f| !f.edges.is_empty()) {
        if f.unique {
            // The front is the exploration path: draw it as one polyline.
            let mut pts = String::new();
            for e in f.rho_upper.dual_edges() {
                let [a, b] = dual_segment(&e);
                let (x, y) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
                let _ = write!(pts, "{x:.3},{:.3} ", -y);
            }
            let _ = writeln!(
                s,
                r##"<polyline class="front" fill="none" stroke="#e67e22" stroke-width="0.2" points="{}"/>"##,
                pts.trim_end()
            );
        } else {
            let mut d = String::new();
            for e in &f.edges {
                let [a, b] = dual_segment(e);
                let _ = write!(d, "M{:.3} {:.3}L{:.3} {:.3}", a.0, -a.1, b.0, -b.1);
            }
            let _ = writeln!(
                s,
                r##"<path class="front" fill="none" stroke="#e67e22" stroke-width="0.2" d="{d}"/>"##
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

//! SVG 1.1 plot of the front-axle path in the plane.
//!
//! The plane is drawn y-up (SVG's y axis is flipped), inside a viewBox fitted
//! to the path with 5% padding. Heading ticks point along `(cos φ, sin φ)`.

use std::fmt::Write as _;

use carbundle::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Rendered width in pixels; height follows the aspect ratio.
    pub width_px: f64,
    /// Draw a heading tick at every n-th sample (0 disables ticks).
    pub tick_every: usize,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width_px: 800.0,
            tick_every: 0,
        }
    }
}

impl SvgOptions {
    /// Roughly twenty ticks along the trajectory.
    pub fn auto_ticks(len: usize) -> Self {
        Self {
            tick_every: (len / 20).max(1),
            ..Self::default()
        }
    }
}

const PADDING: f64 = 0.05;

struct Frame {
    min_x: f64,
    min_y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        // a point or a straight segment still needs a visible box
        let span = (x1 - x0).max(y1 - y0);
        let floor = if span > 0.0 { span * 1e-3 } else { 1.0 };
        let (w, h) = ((x1 - x0).max(floor), (y1 - y0).max(floor));
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let (w, h) = (w * (1.0 + 2.0 * PADDING), h * (1.0 + 2.0 * PADDING));
        Self {
            min_x: cx - 0.5 * w,
            min_y: cy - 0.5 * h,
            width: w,
            height: h,
        }
    }

    fn scale(&self) -> f64 {
        self.width.max(self.height)
    }
}

fn num(v: f64) -> String {
    // "-0.000000" and friends would make otherwise identical files differ
    let s = format!("{v:.6}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0".to_owned()
    } else {
        s
    }
}

pub fn render(trajectory: &Trajectory, options: &SvgOptions) -> String {
    let samples = trajectory.samples();
    let frame = Frame::fit(samples.iter().map(|s| (s.config.pose.x, s.config.pose.y)));
    let scale = frame.scale();
    let stroke = scale * 3e-3;
    let marker = scale * 1e-2;
    let tick = scale * 3e-2;
    let height_px = options.width_px * frame.height / frame.width;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(options.width_px),
        num(height_px),
        num(frame.min_x),
        num(-(frame.min_y + frame.height)),
        num(frame.width),
        num(frame.height)
    );
    let _ = writeln!(svg, r#"<g transform="scale(1,-1)">"#);

    let mut points = String::new();
    for (i, s) in samples.iter().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{},{}", num(s.config.pose.x), num(s.config.pose.y));
    }
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" stroke-width="{}" points="{points}"/>"#,
        num(stroke)
    );

    if options.tick_every > 0 {
        let _ = writeln!(
            svg,
            r#"<g stroke="steelblue" stroke-width="{}">"#,
            num(stroke)
        );
        for s in samples.iter().step_by(options.tick_every) {
            let p = &s.config.pose;
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                num(p.x),
                num(p.y),
                num(p.x + tick * p.phi.cos()),
                num(p.y + tick * p.phi.sin())
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    let start = &trajectory.start().config.pose;
    let end = &trajectory.end().config.pose;
    let _ = writeln!(
        svg,
        r#"<circle cx="{}" cy="{}" r="{}" fill="green"/>"#,
        num(start.x),
        num(start.y),
        num(marker)
    );
    let _ = writeln!(
        svg,
        r#"<circle cx="{}" cy="{}" r="{}" fill="red"/>"#,
        num(end.x),
        num(end.y),
        num(marker)
    );
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    svg
}

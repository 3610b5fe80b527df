//! Self-contained SVG rendering: heatmaps for scans and line plots for traces.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 90.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;
const LINE_COLORS: [&str; 6] = ["#1f4e9c", "#c0392b", "#27ae60", "#8e44ad", "#d68910", "#2c3e50"];

// Anchors of a perceptually ordered dark-blue → yellow map.
const COLORMAP: [(f64, [u8; 3]); 6] = [
    (0.0, [68, 1, 84]),
    (0.2, [65, 68, 135]),
    (0.4, [42, 120, 142]),
    (0.6, [34, 168, 132]),
    (0.8, [122, 209, 81]),
    (1.0, [253, 231, 37]),
];

pub fn colormap(v: f64) -> [u8; 3] {
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    for w in COLORMAP.windows(2) {
        let ((a, ca), (b, cb)) = (w[0], w[1]);
        if v <= b {
            let f = (v - a) / (b - a);
            let mix = |i: usize| (ca[i] as f64 + f * (cb[i] as f64 - ca[i] as f64)).round() as u8;
            return [mix(0), mix(1), mix(2)];
        }
    }
    COLORMAP[COLORMAP.len() - 1].1
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Cell edges for possibly non-uniform centres.
fn edges(centres: &[f64]) -> Vec<f64> {
    match centres.len() {
        0 => vec![],
        1 => vec![centres[0] - 0.5, centres[0] + 0.5],
        n => {
            let mut e = Vec::with_capacity(n + 1);
            e.push(centres[0] - 0.5 * (centres[1] - centres[0]));
            for w in centres.windows(2) {
                e.push(0.5 * (w[0] + w[1]));
            }
            e.push(centres[n - 1] + 0.5 * (centres[n - 1] - centres[n - 2]));
            e
        }
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    fn axes(&self, svg: &mut String, xlabel: &str, ylabel: &str, title: &str) {
        let (l, r, t, b) = (MARGIN_L, WIDTH - MARGIN_R, MARGIN_T, HEIGHT - MARGIN_B);
        let _ = writeln!(svg, r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#, px(l), px(t), px(r - l), px(b - t));
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x0 + f * (self.x1 - self.x0);
            let yv = self.y0 + f * (self.y1 - self.y0);
            let (x, y) = (self.sx(xv), self.sy(yv));
            let _ = writeln!(svg, r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>"#, px(x), px(b), px(b + 5.0));
            let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, px(x), px(b + 19.0), num(xv));
            let _ = writeln!(svg, r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>"#, px(l - 5.0), px(y), px(l));
            let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end" font-size="12">{}</text>"#, px(l - 8.0), px(y + 4.0), num(yv));
        }
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#, px(0.5 * (l + r)), px(HEIGHT - 12.0), escape(xlabel));
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{0}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {0})">{1}</text>"#,
            px(0.5 * (t + b)),
            escape(ylabel)
        );
        let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, px(0.5 * (l + r)), escape(title));
    }
}

fn open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Heatmap of `values[i][j]` with `x[j]` horizontal and `y[i]` vertical, colour range [0, 1].
pub fn heatmap(x: &[f64], y: &[f64], values: &[Vec<f64>], xlabel: &str, ylabel: &str, title: &str) -> String {
    let (ex, ey) = (edges(x), edges(y));
    let frame = Frame { x0: ex[0], x1: ex[ex.len() - 1], y0: ey[0], y1: ey[ey.len() - 1] };
    let mut svg = open();
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let (xa, xb) = (frame.sx(ex[j]), frame.sx(ex[j + 1]));
            let (ya, yb) = (frame.sy(ey[i + 1]), frame.sy(ey[i]));
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                px(xa),
                px(ya),
                px(xb - xa + 0.3),
                px(yb - ya + 0.3),
                hex(colormap(v))
            );
        }
    }
    frame.axes(&mut svg, xlabel, ylabel, title);
    // colour bar
    let (bx, top, bottom) = (WIDTH - MARGIN_R + 20.0, MARGIN_T, HEIGHT - MARGIN_B);
    let steps = 50;
    for k in 0..steps {
        let v = (k as f64 + 0.5) / steps as f64;
        let h = (bottom - top) / steps as f64;
        let yk = bottom - (k + 1) as f64 * h;
        let _ = writeln!(svg, r#"<rect x="{}" y="{}" width="16" height="{}" fill="{}"/>"#, px(bx), px(yk), px(h + 0.3), hex(colormap(v)));
    }
    for (v, y) in [(0.0, bottom), (0.5, 0.5 * (top + bottom)), (1.0, top)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12">{}</text>"#, px(bx + 20.0), px(y + 4.0), num(v));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Line plot of one or more named series over a shared abscissa.
pub fn line_plot(x: &[f64], series: &[(&str, &[f64])], xlabel: &str, ylabel: &str, title: &str) -> String {
    let finite = |v: &&f64| v.is_finite();
    let (mut x0, mut x1) = (x.first().copied().unwrap_or(0.0), x.last().copied().unwrap_or(1.0));
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let ys = series.iter().flat_map(|s| s.1.iter()).filter(finite);
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    y0 = y0.min(0.0);
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let frame = Frame { x0, x1, y0, y1 };
    let mut svg = open();
    frame.axes(&mut svg, xlabel, ylabel, title);
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = LINE_COLORS[k % LINE_COLORS.len()];
        let mut points = String::new();
        for (&xv, &yv) in x.iter().zip(ys.iter()) {
            if yv.is_finite() {
                let _ = write!(points, "{},{} ", px(frame.sx(xv)), px(frame.sy(yv)));
            }
        }
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, points.trim_end());
        let ly = MARGIN_T + 16.0 * (k as f64 + 1.0);
        let lx = WIDTH - MARGIN_R + 8.0;
        let _ = writeln!(svg, r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{color}" stroke-width="2"/>"#, px(lx), px(ly), px(lx + 14.0));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, px(lx + 18.0), px(ly + 4.0), escape(name));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints_and_clamping() {
        assert_eq!(colormap(0.0), [68, 1, 84]);
        assert_eq!(colormap(1.0), [253, 231, 37]);
        assert_eq!(colormap(2.0), colormap(1.0));
        assert_eq!(colormap(f64::NAN), colormap(0.0));
    }

    #[test]
    fn heatmap_has_one_cell_per_value() {
        let svg = heatmap(&[1.0, 2.0, 3.0], &[0.0, 1.0], &[vec![0.0, 0.5, 1.0], vec![0.2, 0.4, 0.6]], "Δ2", "Δ1", "t");
        // 6 cells + background + frame + 50 colour-bar slices
        assert_eq!(svg.matches("<rect").count(), 6 + 2 + 50);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg, heatmap(&[1.0, 2.0, 3.0], &[0.0, 1.0], &[vec![0.0, 0.5, 1.0], vec![0.2, 0.4, 0.6]], "Δ2", "Δ1", "t"));
    }

    #[test]
    fn line_plot_escapes_labels_and_handles_flat_data() {
        let y = [0.0; 4];
        let svg = line_plot(&[0.0, 1.0, 2.0, 3.0], &[("a<b", &y)], "t", "P", "flat");
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}

//! Minimal self-contained SVG line/scatter plots (no external renderer).

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub draw_line: bool,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 840.0;
const H: f64 = 520.0;
const ML: f64 = 78.0;
const MR: f64 = 24.0;
const MT: f64 = 42.0;
const MB: f64 = 58.0;

impl Plot {
    pub fn line(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_x: false,
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn add_series(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series { label: label.to_string(), points, draw_line: true });
    }

    pub fn add_scatter(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series { label: label.to_string(), points, draw_line: false });
    }

    fn tf(&self, v: f64, log: bool) -> f64 {
        if log {
            v.max(1e-300).log10()
        } else {
            v
        }
    }

    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() && (!self.log_y || y > 0.0) && (!self.log_x || x > 0.0) {
                    xs.push(self.tf(x, self.log_x));
                    ys.push(self.tf(y, self.log_y));
                }
            }
        }
        let (x0, x1) = bounds(&xs);
        let (y0, y1) = bounds(&ys);
        let px = |x: f64| ML + (self.tf(x, self.log_x) - x0) / (x1 - x0) * (W - ML - MR);
        let py = |y: f64| H - MB - (self.tf(y, self.log_y) - y0) / (y1 - y0) * (H - MT - MB);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            W / 2.0,
            esc(&self.title)
        ));
        // frame
        out.push_str(&format!(
            "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
            W - ML - MR,
            H - MT - MB
        ));
        // ticks
        for i in 0..=5 {
            let fx = x0 + (x1 - x0) * i as f64 / 5.0;
            let fy = y0 + (y1 - y0) * i as f64 / 5.0;
            let sx = ML + (W - ML - MR) * i as f64 / 5.0;
            let sy = H - MB - (H - MT - MB) * i as f64 / 5.0;
            let xv = if self.log_x { 10f64.powf(fx) } else { fx };
            let yv = if self.log_y { 10f64.powf(fy) } else { fy };
            out.push_str(&format!(
                "<line x1=\"{sx}\" y1=\"{}\" x2=\"{sx}\" y2=\"{}\" stroke=\"#999\"/>\n",
                H - MB,
                H - MB + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{sx}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                H - MB + 18.0,
                fmt_tick(xv)
            ));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{sy}\" x2=\"{ML}\" y2=\"{sy}\" stroke=\"#999\"/>\n",
                ML - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                ML - 8.0,
                sy + 4.0,
                fmt_tick(yv)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            (ML + W - MR) / 2.0,
            H - 16.0,
            esc(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"20\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
            (MT + H - MB) / 2.0,
            (MT + H - MB) / 2.0,
            esc(&self.y_label)
        ));
        for (si, s) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|(x, y)| {
                    x.is_finite()
                        && y.is_finite()
                        && (!self.log_y || *y > 0.0)
                        && (!self.log_x || *x > 0.0)
                })
                .map(|&(x, y)| (px(x), py(y)))
                .collect();
            if s.draw_line && pts.len() > 1 {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                    path.join(" ")
                ));
            }
            for (x, y) in &pts {
                out.push_str(&format!("<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.4\" fill=\"{color}\"/>\n"));
            }
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
                ML + 10.0,
                MT + 16.0 + 16.0 * si as f64,
                esc(&s.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    if vals.is_empty() {
        return (0.0, 1.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        (lo - 0.5, lo + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 10000.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

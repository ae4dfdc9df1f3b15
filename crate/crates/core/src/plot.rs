//! Self-contained SVG line charts with a logarithmic t axis.

use std::fmt::Write as _;

use crate::harness::AggregateCurve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const COLORS: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MeanRegret,
    OptimalPullRate,
}

impl Metric {
    fn value(&self, p: &crate::harness::CurvePoint) -> f64 {
        match self {
            Metric::MeanRegret => p.mean_regret,
            Metric::OptimalPullRate => p.optimal_pull_rate,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Metric::MeanRegret => "mean regret",
            Metric::OptimalPullRate => "optimal pull rate",
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Round tick step for a span, 1, 2 or 5 times a power of ten.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let unit = raw / mag;
    let m = if unit <= 1.0 {
        1.0
    } else if unit <= 2.0 {
        2.0
    } else if unit <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

/// One chart of `metric` against `t` for every curve.
pub fn render(curves: &[AggregateCurve], metric: Metric, title: &str) -> String {
    let pts = curves.iter().flat_map(|c| c.points.iter());
    let t_max = pts.clone().map(|p| p.t).max().unwrap_or(10).max(10) as f64;
    let (mut y_lo, mut y_hi) = match metric {
        Metric::OptimalPullRate => (0.0, 1.0),
        Metric::MeanRegret => (0.0, pts.map(|p| metric.value(p)).fold(0.0, f64::max)),
    };
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    let step = nice_step(y_hi - y_lo, 5.0);
    y_lo = (y_lo / step).floor() * step;
    y_hi = (y_hi / step).ceil() * step;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let lx_max = t_max.log10();
    let sx = |t: f64| LEFT + pw * t.max(1.0).log10() / lx_max;
    let sy = |y: f64| TOP + ph * (1.0 - (y - y_lo) / (y_hi - y_lo));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );

    let decades = lx_max.ceil() as i32;
    for d in 0..=decades {
        let t = 10f64.powi(d);
        if t > t_max * 1.0001 {
            break;
        }
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#,
            TOP + ph + 18.0
        );
    }
    let mut y = y_lo;
    while y <= y_hi + step * 1e-9 {
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py + 4.0,
            fmt_tick(y)
        );
        y += step;
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t (log scale)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        metric.label()
    );

    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut path = String::new();
        for p in &c.points {
            let _ = write!(path, "{:.2},{:.2} ", sx(p.t as f64), sy(metric.value(p)));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            path.trim_end()
        );
        let ly = TOP + 14.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2.5"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            escape(&c.policy)
        );
    }
    s.push_str("</svg>\n");
    s
}

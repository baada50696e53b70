//! Self-contained SVG charts: inline styles, no external assets, no
//! timestamps. Output is byte-identical across runs of the same generator
//! version.

use crate::policy::Probability;

use super::histogram::{BeforeAfter, RegionHistogram};
use super::sweep::SweepGrid;

/// Version marker embedded in every file; the only part of the output that
/// changes between generator versions.
pub const GENERATOR_COMMENT: &str = concat!("<!-- generator: recourse ", env!("CARGO_PKG_VERSION"), " -->");

const REJECT_COLOR: &str = "#d62728";
const RECOURSE_COLOR: &str = "#ff7f0e";
const INFLATED_COLOR: &str = "#ffd43b";
const ACCEPT_COLOR: &str = "#2ca02c";
const BASE_COLOR: &str = "#4c72b0";

struct Canvas {
    buf: String,
}

impl Canvas {
    fn new(width: f64, height: f64) -> Canvas {
        let mut buf = String::new();
        buf.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
             viewBox=\"0 0 {width} {height}\">\n"
        ));
        buf.push_str(GENERATOR_COMMENT);
        buf.push('\n');
        buf.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
        ));
        Canvas { buf }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        self.buf.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>\n"
        ));
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64) {
        self.buf.push_str(&format!(
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
             stroke=\"#333333\" stroke-width=\"1\"/>\n"
        ));
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, size: u32, content: &str) {
        self.buf.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" \
             font-family=\"sans-serif\" font-size=\"{size}\" fill=\"#222222\">{content}</text>\n"
        ));
    }

    fn text_rotated(&mut self, x: f64, y: f64, size: u32, content: &str) {
        self.buf.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" font-size=\"{size}\" fill=\"#222222\" \
             transform=\"rotate(-90 {x:.2} {y:.2})\">{content}</text>\n"
        ));
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Two-stop color ramp from light yellow to dark green.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 0.0), lerp(255.0, 104.0), lerp(204.0, 55.0))
}

/// Heatmap of a parameter sweep: u on the horizontal axis, m on the vertical
/// axis (increasing upward), plus a value ramp legend.
pub fn heatmap_svg(grid: &SweepGrid, title: &str) -> String {
    let (width, height) = (780.0, 640.0);
    let (left, top, plot_w, plot_h) = (70.0, 50.0, 600.0, 520.0);
    let mut canvas = Canvas::new(width, height);
    canvas.text(left + plot_w / 2.0, 28.0, "middle", 16, title);

    let lo = grid
        .cells
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = grid
        .cells
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let nu = grid.u_values.len() as f64;
    let nm = grid.m_values.len() as f64;
    let cell_w = plot_w / nu;
    let cell_h = plot_h / nm;
    for (i, _) in grid.u_values.iter().enumerate() {
        for (j, _) in grid.m_values.iter().enumerate() {
            let value = grid.cells[i][j];
            let x = left + i as f64 * cell_w;
            // m grows upward.
            let y = top + plot_h - (j as f64 + 1.0) * cell_h;
            canvas.rect(x, y, cell_w + 0.5, cell_h + 0.5, &ramp((value - lo) / span));
        }
    }

    // Axes and ticks.
    canvas.line(left, top + plot_h, left + plot_w, top + plot_h);
    canvas.line(left, top, left, top + plot_h);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let u = grid.u_values[0] + (grid.u_values[grid.u_values.len() - 1] - grid.u_values[0]) * f;
        let m = grid.m_values[0] + (grid.m_values[grid.m_values.len() - 1] - grid.m_values[0]) * f;
        let x = left + plot_w * f;
        let y = top + plot_h * (1.0 - f);
        canvas.line(x, top + plot_h, x, top + plot_h + 5.0);
        canvas.text(x, top + plot_h + 20.0, "middle", 12, &tick_label(u));
        canvas.line(left - 5.0, y, left, y);
        canvas.text(left - 9.0, y + 4.0, "end", 12, &tick_label(m));
    }
    canvas.text(left + plot_w / 2.0, top + plot_h + 42.0, "middle", 14, "u");
    canvas.text_rotated(22.0, top + plot_h / 2.0, 14, "m");

    // Value ramp legend.
    let bar_x = left + plot_w + 30.0;
    let steps = 40;
    for k in 0..steps {
        let f = k as f64 / (steps - 1) as f64;
        let y = top + plot_h * (1.0 - f) - plot_h / steps as f64;
        canvas.rect(bar_x, y, 18.0, plot_h / steps as f64 + 0.5, &ramp(f));
    }
    canvas.text(bar_x + 24.0, top + plot_h + 4.0, "start", 12, &tick_label(lo));
    canvas.text(bar_x + 24.0, top + 8.0, "start", 12, &tick_label(hi));
    canvas.text_rotated(width - 12.0, top + plot_h / 2.0, 13, grid.mode.value_label());

    canvas.finish()
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, p: f64) -> f64 {
        self.left + p * self.width
    }

    fn bar(&self, canvas: &mut Canvas, lo: f64, hi: f64, from: usize, to: usize, fill: &str) {
        if to == from {
            return;
        }
        let x = self.x(lo);
        let w = (hi - lo) * self.width - 0.6;
        let y0 = self.top + self.height * (1.0 - to as f64 / self.y_max);
        let y1 = self.top + self.height * (1.0 - from as f64 / self.y_max);
        canvas.rect(x + 0.3, y0, w.max(0.4), y1 - y0, fill);
    }

    fn axes(&self, canvas: &mut Canvas) {
        canvas.line(
            self.left,
            self.top + self.height,
            self.left + self.width,
            self.top + self.height,
        );
        canvas.line(self.left, self.top, self.left, self.top + self.height);
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let x = self.x(f);
            canvas.line(x, self.top + self.height, x, self.top + self.height + 5.0);
            canvas.text(x, self.top + self.height + 19.0, "middle", 12, &tick_label(f));
        }
        let ticks = 4;
        for k in 0..=ticks {
            let count = (self.y_max * k as f64 / ticks as f64).round();
            let y = self.top + self.height * (1.0 - count / self.y_max);
            canvas.line(self.left - 5.0, y, self.left, y);
            canvas.text(self.left - 9.0, y + 4.0, "end", 12, &format!("{count:.0}"));
        }
    }
}

fn legend(canvas: &mut Canvas, x: f64, y: f64, entries: &[(&str, &str)]) {
    let mut cursor = x;
    for (color, label) in entries {
        canvas.rect(cursor, y - 10.0, 12.0, 12.0, color);
        canvas.text(cursor + 17.0, y, "start", 12, label);
        cursor += 17.0 + 8.0 * label.len() as f64 + 24.0;
    }
}

/// Histogram of probabilities with bars split red / orange / green by the
/// action each applicant receives.
pub fn region_histogram_svg(hist: &RegionHistogram, title: &str) -> String {
    let (width, height) = (800.0, 480.0);
    let frame = Frame {
        left: 60.0,
        top: 56.0,
        width: 700.0,
        height: 360.0,
        y_max: hist
            .bins
            .iter()
            .map(|b| b.total())
            .max()
            .unwrap_or(0)
            .max(1) as f64,
    };
    let mut canvas = Canvas::new(width, height);
    canvas.text(width / 2.0, 24.0, "middle", 16, title);
    legend(
        &mut canvas,
        frame.left,
        44.0,
        &[
            (REJECT_COLOR, "reject"),
            (RECOURSE_COLOR, "recourse"),
            (ACCEPT_COLOR, "accept"),
        ],
    );
    for (i, bin) in hist.bins.iter().enumerate() {
        let (lo, hi) = (hist.edges[i], hist.edges[i + 1]);
        let mut level = 0;
        for (count, color) in [
            (bin.reject, REJECT_COLOR),
            (bin.recourse, RECOURSE_COLOR),
            (bin.accept, ACCEPT_COLOR),
        ] {
            frame.bar(&mut canvas, lo, hi, level, level + count, color);
            level += count;
        }
    }
    frame.axes(&mut canvas);
    canvas.text(
        frame.left + frame.width / 2.0,
        height - 10.0,
        "middle",
        14,
        "predicted probability of profitability",
    );
    canvas.text_rotated(18.0, frame.top + frame.height / 2.0, 14, "applicants");
    canvas.finish()
}

/// Plain single-color histogram of predicted probabilities.
pub fn probability_histogram_svg(probs: &[Probability], bins: usize, title: &str) -> String {
    let mut counts = vec![0usize; bins.max(1)];
    for p in probs {
        let bin = ((p.value() * counts.len() as f64) as usize).min(counts.len() - 1);
        counts[bin] += 1;
    }
    let (width, height) = (800.0, 480.0);
    let frame = Frame {
        left: 60.0,
        top: 50.0,
        width: 700.0,
        height: 370.0,
        y_max: counts.iter().copied().max().unwrap_or(0).max(1) as f64,
    };
    let mut canvas = Canvas::new(width, height);
    canvas.text(width / 2.0, 26.0, "middle", 16, title);
    for (i, &count) in counts.iter().enumerate() {
        let lo = i as f64 / counts.len() as f64;
        let hi = (i + 1) as f64 / counts.len() as f64;
        frame.bar(&mut canvas, lo, hi, 0, count, BASE_COLOR);
    }
    frame.axes(&mut canvas);
    canvas.text(
        frame.left + frame.width / 2.0,
        height - 10.0,
        "middle",
        14,
        "predicted probability of profitability",
    );
    canvas.text_rotated(18.0, frame.top + frame.height / 2.0, 14, "applicants");
    canvas.finish()
}

/// Two stacked panels: the accept-only baseline on top, the recourse policy
/// below. The gold segment marks applicants who lost an acceptance to a
/// recourse offer.
pub fn before_after_svg(cmp: &BeforeAfter, title: &str) -> String {
    let (width, height) = (800.0, 740.0);
    let y_max = cmp
        .bins
        .iter()
        .map(|b| (b.before_reject + b.before_accept).max(
            b.after_reject + b.after_recourse_from_reject + b.after_recourse_from_accept
                + b.after_accept,
        ))
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let top_frame = Frame {
        left: 60.0,
        top: 70.0,
        width: 700.0,
        height: 250.0,
        y_max,
    };
    let bottom_frame = Frame {
        left: 60.0,
        top: 410.0,
        width: 700.0,
        height: 250.0,
        y_max,
    };
    let mut canvas = Canvas::new(width, height);
    canvas.text(width / 2.0, 24.0, "middle", 16, title);
    legend(
        &mut canvas,
        top_frame.left,
        44.0,
        &[
            (REJECT_COLOR, "reject"),
            (RECOURSE_COLOR, "recourse"),
            (INFLATED_COLOR, "recourse (was accept)"),
            (ACCEPT_COLOR, "accept"),
        ],
    );
    canvas.text(top_frame.left, 62.0, "start", 13, "without the recourse action");
    canvas.text(bottom_frame.left, 402.0, "start", 13, "with the recourse action");

    for (i, bin) in cmp.bins.iter().enumerate() {
        let (lo, hi) = (cmp.edges[i], cmp.edges[i + 1]);
        let mut level = 0;
        for (count, color) in [
            (bin.before_reject, REJECT_COLOR),
            (bin.before_accept, ACCEPT_COLOR),
        ] {
            top_frame.bar(&mut canvas, lo, hi, level, level + count, color);
            level += count;
        }
        let mut level = 0;
        for (count, color) in [
            (bin.after_reject, REJECT_COLOR),
            (bin.after_recourse_from_reject, RECOURSE_COLOR),
            (bin.after_recourse_from_accept, INFLATED_COLOR),
            (bin.after_accept, ACCEPT_COLOR),
        ] {
            bottom_frame.bar(&mut canvas, lo, hi, level, level + count, color);
            level += count;
        }
    }
    top_frame.axes(&mut canvas);
    bottom_frame.axes(&mut canvas);
    canvas.text(
        bottom_frame.left + bottom_frame.width / 2.0,
        height - 10.0,
        "middle",
        14,
        "predicted probability of profitability",
    );
    canvas.finish()
}

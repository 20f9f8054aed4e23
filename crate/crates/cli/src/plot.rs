//! Plot-ready artifacts: per-group score histograms, metric curves and a
//! self-contained SVG rendering of both.

use std::fmt::Write as _;

use fairmax_core::EpochRecord;

pub const HISTOGRAM_BINS: usize = 50;

/// Bin counts of `scores` over `[0, 1]` split by sensitive group, as
/// `(z=0 counts, z=1 counts)`. A score of exactly 1 lands in the last bin.
pub fn group_histogram(scores: &[f64], sensitive: &[u8]) -> (Vec<u64>, Vec<u64>) {
    let mut h0 = vec![0u64; HISTOGRAM_BINS];
    let mut h1 = vec![0u64; HISTOGRAM_BINS];
    for (&s, &z) in scores.iter().zip(sensitive) {
        let bin = ((s.clamp(0.0, 1.0) * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        if z == 1 {
            h1[bin] += 1;
        } else {
            h0[bin] += 1;
        }
    }
    (h0, h1)
}

pub fn histogram_csv(h0: &[u64], h1: &[u64]) -> String {
    let mut out = String::from("bin,lower,upper,z0,z1\n");
    let width = 1.0 / HISTOGRAM_BINS as f64;
    for (i, (a, b)) in h0.iter().zip(h1).enumerate() {
        let _ = writeln!(out, "{i},{},{},{a},{b}", i as f64 * width, (i + 1) as f64 * width);
    }
    out
}

pub const METRICS_HEADER: &str = "epoch,train_accuracy,test_accuracy,statistical_rate_train,statistical_rate_test,adversary_auc";

pub fn metrics_csv(trace: &[EpochRecord]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.epoch,
            r.train_accuracy,
            r.test_accuracy,
            r.statistical_rate_train,
            r.statistical_rate_test,
            r.adversary_auc
        );
    }
    out
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 40.0;
const Z0_COLOR: &str = "#d95f02";
const Z1_COLOR: &str = "#1b64c8";

fn axes(out: &mut String, x0: f64, title: &str) {
    let _ = writeln!(
        out,
        r##"<rect x="{x0}" y="{MARGIN}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{title}</text>"#,
        x0 + PANEL_W / 2.0,
        MARGIN - 12.0
    );
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str, dashed: bool) {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { r#" stroke-dasharray="5,3""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
        pts.join(" ")
    );
}

/// Two panels: the group score histograms (normalised per group) and
/// accuracy, statistical rate and adversary AUC over epochs.
/// Label, stroke colour, dashed, value.
type Series = (&'static str, &'static str, bool, fn(&EpochRecord) -> f64);

pub fn render_svg(h0: &[u64], h1: &[u64], trace: &[EpochRecord], title: &str) -> String {
    let width = 2.0 * PANEL_W + 3.0 * MARGIN;
    let height = PANEL_H + 2.5 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<title>{title}</title>"#);

    axes(&mut out, MARGIN, "score distribution by group");
    let total = |h: &[u64]| h.iter().sum::<u64>().max(1) as f64;
    let (t0, t1) = (total(h0), total(h1));
    let peak = h0
        .iter()
        .map(|&c| c as f64 / t0)
        .chain(h1.iter().map(|&c| c as f64 / t1))
        .fold(0.0, f64::max)
        .max(1e-12);
    let bar_w = PANEL_W / h0.len() as f64;
    for (h, t, color) in [(h0, t0, Z0_COLOR), (h1, t1, Z1_COLOR)] {
        for (i, &c) in h.iter().enumerate() {
            let bar_h = PANEL_H * (c as f64 / t) / peak;
            if bar_h > 0.0 {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{bar_w:.2}" height="{bar_h:.2}" fill="{color}" fill-opacity="0.45"/>"#,
                    MARGIN + i as f64 * bar_w,
                    MARGIN + PANEL_H - bar_h
                );
            }
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11" fill="{Z0_COLOR}">z = 0</text><text x="{}" y="{}" font-size="11" fill="{Z1_COLOR}">z = 1</text>"#,
        MARGIN + 8.0,
        MARGIN + 16.0,
        MARGIN + 60.0,
        MARGIN + 16.0
    );

    let x0 = 2.0 * MARGIN + PANEL_W;
    axes(&mut out, x0, "metrics by epoch");
    if !trace.is_empty() {
        let last = trace.len().max(2) as f64 - 1.0;
        let x = |i: usize| x0 + PANEL_W * i as f64 / last;
        let y = |v: f64| MARGIN + PANEL_H * (1.0 - v.clamp(0.0, 1.0));
        let series: [Series; 4] = [
            ("test accuracy", "#222", false, |r| r.test_accuracy),
            ("p% test / 100", "#1b9e77", false, |r| r.statistical_rate_test / 100.0),
            ("adversary AUC", "#7570b3", false, |r| r.adversary_auc),
            ("80% rule", "#999", true, |_| 0.8),
        ];
        for (k, (label, color, dashed, f)) in series.iter().enumerate() {
            let points: Vec<(f64, f64)> = trace.iter().enumerate().map(|(i, r)| (x(i), y(f(r)))).collect();
            polyline(&mut out, &points, color, *dashed);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="11" fill="{color}">{label}</text>"#,
                x0 + 8.0,
                MARGIN + PANEL_H - 8.0 - 14.0 * k as f64
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

//! Self-contained SVG heatmap of a cross matrix.

use std::fmt::Write;

use crate::format::fixed3;
use crate::report::CrossReport;

const CELL: f64 = 64.0;
const EMPTY_FILL: &str = "#bdbdbd";
// Light to dark blue.
const LOW: (f64, f64, f64) = (247.0, 251.0, 255.0);
const HIGH: (f64, f64, f64) = (8.0, 48.0, 107.0);

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Colour for `t` in [0, 1] and whether text on it should be white.
fn shade(t: f64) -> (String, bool) {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    let colour = format!(
        "#{:02x}{:02x}{:02x}",
        mix(LOW.0, HIGH.0),
        mix(LOW.1, HIGH.1),
        mix(LOW.2, HIGH.2)
    );
    (colour, t > 0.55)
}

fn annotate(value: f64, kind: &str) -> String {
    match kind {
        "mean" => fixed3(value),
        _ if value.fract() == 0.0 => format!("{value:.0}"),
        _ => format!("{value:.1}"),
    }
}

/// Heatmap with positive-example cells as rows and negative-example cells as
/// columns. Mean matrices use a fixed [0, 1] scale, headroom matrices scale to
/// their largest cell. Empty crosses are gray.
pub fn heatmap(report: &CrossReport) -> String {
    let k = report.categories.len();
    let label_width = report
        .categories
        .iter()
        .map(|c| c.chars().count())
        .max()
        .unwrap_or(1)
        .max(8) as f64
        * 7.0
        + 40.0;
    let top = 70.0;
    let (width, height) = (label_width + CELL * k as f64 + 110.0, top + CELL * k as f64 + 60.0);
    let max = match report.kind {
        "mean" => 1.0,
        _ => report
            .cells
            .iter()
            .flatten()
            .filter_map(|c| c.0)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE),
    };
    let title = match report.kind {
        "mean" => "Mean pair attribution",
        _ => "Incorrectly ordered pairs",
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="20" font-size="14" font-weight="bold">{} by {}</text>"#,
        label_width,
        title,
        escape(&report.feature)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="40" text-anchor="middle">Negative slice</text>"#,
        label_width + CELL * k as f64 / 2.0
    )
    .unwrap();
    let mid = top + CELL * k as f64 / 2.0;
    writeln!(
        s,
        r#"<text x="14" y="{mid}" text-anchor="middle" transform="rotate(-90 14 {mid})">Positive slice</text>"#
    )
    .unwrap();
    for (j, name) in report.categories.iter().enumerate() {
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            label_width + CELL * (j as f64 + 0.5),
            top - 8.0,
            escape(name)
        )
        .unwrap();
    }
    for (i, name) in report.categories.iter().enumerate() {
        let y = top + CELL * i as f64;
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            label_width - 8.0,
            y + CELL / 2.0 + 4.0,
            escape(name)
        )
        .unwrap();
        for j in 0..k {
            let x = label_width + CELL * j as f64;
            match report.cells[i][j].0 {
                Some(v) => {
                    let (fill, light_text) = shade(v / max);
                    writeln!(
                        s,
                        r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="white"/>"#
                    )
                    .unwrap();
                    writeln!(
                        s,
                        r#"<text x="{}" y="{}" text-anchor="middle" fill="{}">{}</text>"#,
                        x + CELL / 2.0,
                        y + CELL / 2.0 + 4.0,
                        if light_text { "white" } else { "black" },
                        annotate(v, report.kind)
                    )
                    .unwrap();
                }
                None => writeln!(
                    s,
                    r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{EMPTY_FILL}" stroke="white"/>"#
                )
                .unwrap(),
            }
        }
    }
    // Colour bar.
    let bar_x = label_width + CELL * k as f64 + 30.0;
    let bar_h = CELL * k as f64;
    writeln!(s, r#"<defs><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0">"#).unwrap();
    for (offset, t) in [(0, 0.0), (100, 1.0)] {
        writeln!(s, r#"<stop offset="{offset}%" stop-color="{}"/>"#, shade(t).0).unwrap();
    }
    writeln!(s, "</linearGradient></defs>").unwrap();
    writeln!(
        s,
        r##"<rect x="{bar_x}" y="{top}" width="16" height="{bar_h}" fill="url(#scale)" stroke="#888"/>"##
    )
    .unwrap();
    for (y, v) in [(top + 4.0, max), (top + bar_h, 0.0)] {
        writeln!(
            s,
            r#"<text x="{}" y="{y}">{}</text>"#,
            bar_x + 22.0,
            annotate(v, report.kind)
        )
        .unwrap();
    }
    s += "</svg>\n";
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::OptF64;

    fn report(kind: &'static str) -> CrossReport {
        CrossReport {
            command: "cross",
            model: "m".into(),
            feature: "Slice <x>".into(),
            kind,
            categories: vec!["A".into(), "B".into()],
            cells: vec![
                vec![OptF64(Some(1.0)), OptF64(None)],
                vec![OptF64(Some(0.5)), OptF64(Some(0.0))],
            ],
            pair_counts: vec![vec![1, 0], vec![2, 1]],
            total_pairs: 4,
            auc: 0.5,
        }
    }

    #[test]
    fn cells_annotated_and_empty_gray() {
        let svg = heatmap(&report("mean"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(">1.000<") && svg.contains(">0.500<"));
        assert!(svg.contains(EMPTY_FILL));
        assert!(svg.contains("Slice &lt;x&gt;"));
        assert_eq!(svg.matches("<rect x=").count(), 4 + 1);
    }

    #[test]
    fn scale_endpoints() {
        assert_eq!(shade(0.0).0, "#f7fbff");
        assert_eq!(shade(1.0).0, "#08306b");
        let headroom = heatmap(&report("headroom"));
        assert!(headroom.contains(">0.5<"));
    }
}

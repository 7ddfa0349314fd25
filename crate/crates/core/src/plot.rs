//! Deterministic SVG panels for a run directory.
//!
//! Trajectories from the upper slit are solid blue, those from the lower slit
//! dashed red. The horizontal axis is always `Y'`, the direction of propagation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{Branch, Pointer};
use crate::output::{read_run, LoadedRun};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 48.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub slit: Branch,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn label(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(panel: &Panel) -> String {
    let (x0, x1) = bounds(panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = bounds(panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let step = nice_step(x1 - x0);
    let mut t = (x0 / step).ceil() * step;
    while t <= x1 {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0,
            MARGIN_TOP + plot_h + 18.0,
            label(t)
        );
        t += step;
    }
    let step = nice_step(y1 - y0);
    let mut t = (y0 / step).ceil() * step;
    while t <= y1 {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            label(t)
        );
        t += step;
    }
    if y0 < 0.0 && y1 > 0.0 {
        let y = py(0.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#999999" stroke-width="0.5"/>"##,
            MARGIN_LEFT + plot_w
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&panel.y_label)
    );

    for s in &panel.series {
        let style = match s.slit {
            Branch::Upper => r##"stroke="#1f4fbf""##,
            Branch::Lower => r##"stroke="#c0392b" stroke-dasharray="6 4""##,
        };
        let mut pts = String::new();
        for &(x, y) in s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = write!(pts, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke-width="1.2" {style} points="{}"/>"#,
            pts.trim_end()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// The panels of a run: the test particle, then one panel per pointer
/// (`N = 1` or two pointers) or a single `Σ̂'` panel.
pub fn run_panels(run: &LoadedRun) -> Result<Vec<(String, Panel)>> {
    if run.trajectories.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: run has no trajectories",
            run.dir.display()
        )));
    }
    let name = &run.manifest.name;
    let series = |f: &dyn Fn(&crate::output::LoadedTrajectory) -> Vec<f64>| {
        run.trajectories
            .iter()
            .map(|t| Series {
                slit: t.slit,
                points: t.y.iter().copied().zip(f(t)).collect(),
            })
            .collect::<Vec<_>>()
    };
    let mut panels = vec![(
        "test_particle.svg".to_string(),
        Panel {
            title: format!("{name}: test particle"),
            x_label: "Y'".into(),
            y_label: "X'".into(),
            series: series(&|t| t.x.clone()),
        },
    )];

    let params = &run.manifest.params;
    let n = params.n_particles();
    let has = |t: &crate::output::LoadedTrajectory, col: &str| t.pointers.iter().any(|(h, _)| h == col);
    let column = |col: String| {
        move |t: &crate::output::LoadedTrajectory| {
            t.pointers
                .iter()
                .find(|(h, _)| *h == col)
                .map(|(_, v)| v.clone())
                .unwrap_or_default()
        }
    };
    let two_pointer = matches!(params.pointer, Pointer::Table { .. }) && n == 2;
    if n == 0 {
        return Ok(panels);
    }
    if two_pointer || (n == 1 && has(&run.trajectories[0], "Z_1")) {
        for i in 1..=n {
            let file = if n == 1 {
                "pointer.svg".to_string()
            } else {
                format!("pointer_{i}.svg")
            };
            let title = if two_pointer {
                let which = if i == 1 { "upper" } else { "lower" };
                format!("{name}: pointer of the {which} slit")
            } else {
                format!("{name}: pointer")
            };
            panels.push((
                file,
                Panel {
                    title,
                    x_label: "Y'".into(),
                    y_label: format!("Z'{i}"),
                    series: series(&column(format!("Z_{i}"))),
                },
            ));
        }
    } else {
        let root_n = (n as f64).sqrt();
        let sigma = |t: &crate::output::LoadedTrajectory| {
            if let Some((_, v)) = t.pointers.iter().find(|(h, _)| h == "Sigma_hat") {
                return v.clone();
            }
            (0..t.t_prime.len())
                .map(|k| t.pointers.iter().map(|(_, v)| v[k]).sum::<f64>() / root_n)
                .collect()
        };
        let label = if n == 1 { "Z'".to_string() } else { "Σ̂'".to_string() };
        panels.push((
            "sigma_hat.svg".into(),
            Panel {
                title: format!("{name}: pointer ({label}, N = {n})"),
                x_label: "Y'".into(),
                y_label: label,
                series: series(&sigma),
            },
        ));
    }
    Ok(panels)
}

/// Reads the run in `run_dir` and writes its panels to `out_dir`.
pub fn plot_run(run_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let run = read_run(run_dir)?;
    let panels = run_panels(&run)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::with_capacity(panels.len());
    for (file, panel) in panels {
        let path = out_dir.join(file);
        fs::write(&path, render_svg(&panel)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel() -> Panel {
        Panel {
            title: "a < b".into(),
            x_label: "Y'".into(),
            y_label: "X'".into(),
            series: vec![
                Series {
                    slit: Branch::Upper,
                    points: vec![(0.0, 3.0), (1.0, 1.0), (2.0, -1.0)],
                },
                Series {
                    slit: Branch::Lower,
                    points: vec![(0.0, -3.0), (1.0, -1.0), (2.0, 1.0)],
                },
            ],
        }
    }

    #[test]
    fn svg_is_deterministic_and_styled() {
        let a = render_svg(&panel());
        assert_eq!(a, render_svg(&panel()));
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);
        assert_eq!(a.matches("stroke-dasharray").count(), 1);
        assert!(a.contains("a &lt; b"));
    }

    #[test]
    fn ticks_are_round_numbers() {
        assert_eq!(nice_step(6.6), 1.0);
        assert_eq!(nice_step(0.7), 0.1);
        assert_eq!(nice_step(13.0), 2.0);
        assert_eq!(label(-0.0001), "0");
        assert_eq!(label(2.5), "2.5");
    }

    #[test]
    fn flat_series_still_render() {
        let p = Panel {
            series: vec![Series {
                slit: Branch::Upper,
                points: vec![(0.0, 0.0), (1.0, 0.0)],
            }],
            ..panel()
        };
        let svg = render_svg(&p);
        assert!(!svg.contains("NaN"));
    }
}

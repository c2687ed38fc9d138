//! Static SVG charts for synthesis results and proof reports.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::io::{KIND_PROOF, KIND_SYNTHESIS};

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 110.0;

/// Values are plotted on a log10 axis; zeros sit at this floor.
const LOG_FLOOR: f64 = -17.0;

fn log10_clamped(v: f64) -> f64 {
    if v > 0.0 {
        v.log10().max(LOG_FLOOR)
    } else {
        LOG_FLOOR
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    lo: f64,
    hi: f64,
    svg: String,
}

impl Frame {
    fn new(title: &str, ylabel: &str, values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
        let hi = if hi <= lo { lo + 1.0 } else { hi };
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (TOP + H - BOTTOM) / 2.0,
            escape(ylabel)
        );
        let mut f = Self { lo, hi, svg };
        let (x0, x1) = (LEFT, W - RIGHT);
        let _ = writeln!(
            f.svg,
            r#"<line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{}" stroke="black"/>"#,
            H - BOTTOM
        );
        let _ = writeln!(
            f.svg,
            r#"<line x1="{x0}" y1="{0}" x2="{x1}" y2="{0}" stroke="black"/>"#,
            H - BOTTOM
        );
        let step = ((hi - lo) / 8.0).ceil().max(1.0);
        let mut tick = lo;
        while tick <= hi + 1e-9 {
            let y = f.y(tick);
            let _ = writeln!(
                f.svg,
                r##"<line x1="{x0}" y1="{y:.1}" x2="{x1}" y2="{y:.1}" stroke="#ddd"/>"##
            );
            let _ = writeln!(
                f.svg,
                r#"<text x="{}" y="{:.1}" text-anchor="end">1e{tick}</text>"#,
                x0 - 6.0,
                y + 4.0
            );
            tick += step;
        }
        f
    }

    fn y(&self, v: f64) -> f64 {
        let frac = (v - self.lo) / (self.hi - self.lo);
        (H - BOTTOM) - frac * (H - BOTTOM - TOP)
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// Final error of each restart against its index.
pub fn restart_scatter(target: &str, errors: &[f64], best: Option<usize>) -> Result<String> {
    if errors.is_empty() {
        return Err(Error::Dataset("no restart errors to plot".into()));
    }
    let logs: Vec<f64> = errors.iter().map(|&e| log10_clamped(e)).collect();
    let mut f = Frame::new(&format!("{target}: gate error per restart"), "gate error", &logs);
    let span = W - LEFT - RIGHT;
    let dx = span / errors.len() as f64;
    for (i, &v) in logs.iter().enumerate() {
        let x = LEFT + dx * (i as f64 + 0.5);
        let fill = if Some(i) == best { "crimson" } else { "steelblue" };
        let _ = writeln!(f.svg, r#"<circle cx="{x:.1}" cy="{:.1}" r="4" fill="{fill}"/>"#, f.y(v));
    }
    let _ = writeln!(
        f.svg,
        r#"<text x="{}" y="{}" text-anchor="middle">restart index (0..{})</text>"#,
        LEFT + span / 2.0,
        H - BOTTOM + 28.0,
        errors.len() - 1
    );
    Ok(f.finish())
}

/// One bar per identity, height log10 of the residual.
pub fn residual_bars(residuals: &[(String, f64)]) -> Result<String> {
    if residuals.is_empty() {
        return Err(Error::Dataset("no residuals to plot".into()));
    }
    let logs: Vec<f64> = residuals.iter().map(|(_, r)| log10_clamped(*r)).collect();
    let mut f = Frame::new("identity residuals", "max-abs residual", &logs);
    let span = W - LEFT - RIGHT;
    let dx = span / residuals.len() as f64;
    let base = f.y(f.lo);
    for (i, ((name, _), &v)) in residuals.iter().zip(&logs).enumerate() {
        let x = LEFT + dx * i as f64;
        let top = f.y(v);
        let _ = writeln!(
            f.svg,
            r#"<rect class="bar" x="{:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="steelblue"><title>{}</title></rect>"#,
            x + dx * 0.1,
            dx * 0.8,
            (base - top).max(0.5),
            escape(name)
        );
        let lx = x + dx / 2.0;
        let ly = H - BOTTOM + 8.0;
        let _ = writeln!(
            f.svg,
            r#"<text transform="translate({lx:.1} {ly}) rotate(60)" font-size="8">{}</text>"#,
            escape(name)
        );
    }
    Ok(f.finish())
}

/// Render a result or report JSON document, dispatching on its `kind`.
pub fn render(json: &str) -> Result<String> {
    if json.trim().is_empty() {
        return Err(Error::Dataset("input file is empty".into()));
    }
    let v: Value = serde_json::from_str(json)?;
    match v.get("kind").and_then(Value::as_str) {
        Some(KIND_SYNTHESIS) => {
            let errors: Vec<f64> = v
                .get("restart_errors")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Dataset("synthesis result lacks `restart_errors`".into()))?
                .iter()
                .map(|e| {
                    e.as_f64()
                        .ok_or_else(|| Error::Dataset("non-numeric restart error".into()))
                })
                .collect::<Result<_>>()?;
            let target = v.get("target").and_then(Value::as_str).unwrap_or("gate");
            let best = v.get("best_restart").and_then(Value::as_u64).map(|b| b as usize);
            restart_scatter(target, &errors, best)
        }
        Some(KIND_PROOF) => {
            let map = v
                .get("residuals")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Dataset("proof report lacks `residuals`".into()))?;
            let residuals = map
                .iter()
                .map(|(k, r)| {
                    r.as_f64()
                        .map(|r| (k.clone(), r))
                        .ok_or_else(|| Error::Dataset(format!("residual `{k}` is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            residual_bars(&residuals)
        }
        Some(other) => Err(Error::Dataset(format!("unknown document kind `{other}`"))),
        None => Err(Error::Dataset("document has no `kind` field".into())),
    }
}

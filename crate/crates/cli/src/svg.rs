//! Poincaré-disc pictures of walk trajectories.
//!
//! The viewport is `[-1.05, 1.05]^2` in disc coordinates with the imaginary
//! axis pointing up. The unit circle and the vertical diameter are always
//! drawn; each trajectory contributes a polyline and an endpoint dot.

use std::fmt::Write as _;

use renorm_core::formats::format_f64;
use renorm_core::hyperwalk::Trajectory;

use crate::error::CliError;

const HALF_EXTENT: f64 = 1.05;

fn point(z: renorm_core::Complex64) -> String {
    // SVG's y axis points down
    format!("{},{}", format_f64(z.re + 0.0), format_f64(-z.im + 0.0))
}

/// Stroke colour for trajectory `i` of `count`, blue for the most negative
/// `t` through red for the most positive.
fn colour(i: usize, count: usize) -> String {
    let hue = if count <= 1 { 0 } else { 240 - 240 * i / (count - 1) };
    format!("hsl({hue},70%,40%)")
}

pub fn emit_svg(trajectories: &[Trajectory], title: &str) -> Result<String, CliError> {
    if trajectories.is_empty() {
        return Err(CliError::Core(renorm_core::Error::EmptyOutput));
    }
    let side = 2.0 * HALF_EXTENT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
        -HALF_EXTENT, -HALF_EXTENT, side, side
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    out.push_str(
        "<desc>Reconstruction: images of the base point under the partial renormalized \
         products, drawn in the Poincare disc; the dashed line is the vertical diameter.</desc>\n",
    );
    out.push_str(r#"<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.006"/>"#);
    out.push('\n');
    out.push_str(
        r#"<line class="geodesic" x1="0" y1="-1" x2="0" y2="1" stroke="gray" stroke-width="0.004" stroke-dasharray="0.02 0.02"/>"#,
    );
    out.push('\n');

    out.push_str("<g class=\"paths\" fill=\"none\" stroke-width=\"0.004\">\n");
    for (i, tr) in trajectories.iter().enumerate() {
        let pts: Vec<String> = tr.path.iter().map(|(_, p)| point(p.z())).collect();
        let _ = writeln!(
            out,
            r#"<polyline data-t="{}" stroke="{}" points="{}"/>"#,
            format_f64(tr.t),
            colour(i, trajectories.len()),
            pts.join(" ")
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"endpoints\">\n");
    for (i, tr) in trajectories.iter().enumerate() {
        let z = tr.endpoint.z();
        let _ = writeln!(
            out,
            r#"<circle data-t="{}" cx="{}" cy="{}" r="0.015" fill="{}"/>"#,
            format_f64(tr.t),
            format_f64(z.re + 0.0),
            format_f64(-z.im + 0.0),
            colour(i, trajectories.len())
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

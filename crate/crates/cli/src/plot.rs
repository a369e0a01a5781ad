//! SVG rendering of 2D trajectories: grid, cities, one arrow per move.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use serde_json::Value;

use racetrack::{Configuration, Error, Trajectory};

use crate::read_instance;

const CELL: f64 = 24.0;
const PAD: f64 = 1.5;

struct Scene {
    trajectory: Trajectory,
    cities: Vec<Vec<i64>>,
}

fn load(input: &Path, instance: Option<&Path>) -> anyhow::Result<Scene> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    let (traj, mut cities) = match &value {
        Value::Array(_) => (value.clone(), Vec::new()),
        Value::Object(map) => {
            let traj = map.get("trajectory").cloned().unwrap_or(Value::Array(Vec::new()));
            // a result nests the instance; a bare instance carries the points itself
            let cities = map
                .get("instance")
                .and_then(|i| i.get("points"))
                .or_else(|| map.get("points"))
                .map(|p| serde_json::from_value(p.clone()))
                .transpose()?
                .unwrap_or_default();
            (traj, cities)
        }
        _ => anyhow::bail!("{} is neither a trajectory nor a result", input.display()),
    };
    let trajectory: Trajectory = serde_json::from_value(traj).context("reading the trajectory")?;
    if let Some(path) = instance {
        cities = read_instance(path)?.points;
    }
    let dims = trajectory
        .configs
        .iter()
        .map(Configuration::dim)
        .chain(cities.iter().map(Vec::len));
    for d in dims {
        if d != 2 {
            return Err(Error::InvalidInput(format!("plots are two-dimensional, got dimension {d}")).into());
        }
    }
    Ok(Scene { trajectory, cities })
}

/// Renders the scene; y grows upwards.
fn render(scene: &Scene) -> String {
    let mut xs: Vec<i64> = scene.cities.iter().map(|c| c[0]).collect();
    let mut ys: Vec<i64> = scene.cities.iter().map(|c| c[1]).collect();
    for c in &scene.trajectory.configs {
        let tail = c.tail();
        xs.extend([c.p[0], tail[0]]);
        ys.extend([c.p[1], tail[1]]);
    }
    if xs.is_empty() {
        xs.push(0);
        ys.push(0);
    }
    let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let width = (x1 - x0) as f64 * CELL + 2.0 * PAD * CELL;
    let height = (y1 - y0) as f64 * CELL + 2.0 * PAD * CELL;
    let sx = |x: i64| (x - x0) as f64 * CELL + PAD * CELL;
    let sy = |y: i64| (y1 - y) as f64 * CELL + PAD * CELL;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    svg.push_str(concat!(
        r##"<defs><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse">"##,
        r##"<path d="M 0 0 L 10 5 L 0 10 z" fill="#1f4e9c"/></marker></defs>"##,
        "\n"
    ));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r##"<g stroke="#dddddd" stroke-width="1">"##);
    for x in x0..=x1 {
        let _ = writeln!(svg, r#"<line x1="{0:.1}" y1="0" x2="{0:.1}" y2="{height:.0}"/>"#, sx(x));
    }
    for y in y0..=y1 {
        let _ = writeln!(svg, r#"<line x1="0" y1="{0:.1}" x2="{width:.0}" y2="{0:.1}"/>"#, sy(y));
    }
    svg.push_str("</g>\n");
    let _ = writeln!(svg, r##"<g class="cities" fill="#c0392b">"##);
    for c in &scene.cities {
        let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="{:.1}"/>"#, sx(c[0]), sy(c[1]), CELL * 0.3);
    }
    svg.push_str("</g>\n");
    let _ = writeln!(svg, r##"<g class="moves" stroke="#1f4e9c" stroke-width="2" fill="#1f4e9c">"##);
    for c in &scene.trajectory.configs {
        let tail = c.tail();
        if c.v.iter().all(|&v| v == 0) {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3"/>"#, sx(c.p[0]), sy(c.p[1]));
        } else {
            let _ = writeln!(
                svg,
                r#"<line class="move" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" marker-end="url(#head)"/>"#,
                sx(tail[0]),
                sy(tail[1]),
                sx(c.p[0]),
                sy(c.p[1])
            );
        }
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

pub fn run(input: &Path, out: &Path, instance: Option<&Path>) -> anyhow::Result<()> {
    let scene = load(input, instance)?;
    fs::write(out, render(&scene)).with_context(|| format!("writing {}", out.display()))
}

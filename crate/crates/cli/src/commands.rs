//! Subcommand implementations. Each returns the text to emit and an exit code.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qcarpet::carpet::{cstar_carpet, four_fold_carpet, rect_carpet, ring_carpet, sierpinski, Carpet};
use qcarpet::extension::{
    ba_extend, carpet_periodic_extension, default_depth, extend_to_plane, hole_orbits, periodic_annulus_extension,
    reflection_tower_extend, Conjugate, HoleTwist, Twist,
};
use qcarpet::geometry::{Rect, Region};
use qcarpet::maps::{periodicity_residual, CircleMap, CircleOrientation, PlaneMap, PlaneTransform, Similarity};
use qcarpet::modulus::{modulus, FamilyKind, PathFamily};
use qcarpet::rigidity::{
    carpet_rigidity_pipeline, cstar_pipeline, square_carpet_pipeline, PipelineOptions, Verdict,
};
use qcarpet::sampling::{annulus_points, box_points};
use qcarpet::Point;
use rayon::prelude::*;
use serde::Serialize;

use crate::formats::{
    read_carpet, read_circle_map, read_plane_map, to_json, write_circle_map, CarpetJson, DensityJson, ModulusJson,
    PlaneMapJson, ReportJson, TowerManifestJson,
};
use crate::svg;

/// Rigidity exit codes; errors exit with 2 from `main`.
pub const EXIT_OK: u8 = 0;
pub const EXIT_WITNESS: u8 = 1;

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rect(v: &[f64]) -> Result<Rect> {
    if v.len() != 4 {
        bail!("K needs four values s,w,t,h");
    }
    Ok(Rect::new(v[0], v[1], v[2], v[3]))
}

pub enum GenKind<'a> {
    Sierpinski,
    FourFold,
    Rect { a: f64 },
    Ring { a: f64, k: &'a [f64] },
    Cstar { r: f64, k: &'a [f64], divisions: usize, symmetry: usize },
}

pub fn gen(kind: GenKind, depth: usize) -> Result<String> {
    let carpet = match kind {
        GenKind::Sierpinski => sierpinski(depth)?,
        GenKind::FourFold => four_fold_carpet()?,
        GenKind::Rect { a } => rect_carpet(a, depth)?,
        GenKind::Ring { a, k } => ring_carpet(a, parse_rect(k)?, depth)?,
        GenKind::Cstar { r, k, divisions, symmetry } => cstar_carpet(r, parse_rect(k)?, depth, divisions, symmetry)?,
    };
    to_json(&CarpetJson::from_carpet(&carpet)?)
}

pub enum ModulusInput<'a> {
    Carpet(&'a Path),
    Rect(f64),
    Annulus(f64),
}

/// Modulus of a product family; `grid` cells per unit length on each axis.
pub fn modulus_cmd(family: &str, input: ModulusInput, grid: usize, svg_out: Option<&Path>, timestamp: bool) -> Result<String> {
    let region = match input {
        ModulusInput::Carpet(p) => *read_carpet(p)?.region(),
        ModulusInput::Rect(a) => Region::Rectangle { a },
        ModulusInput::Annulus(r) => Region::LogCylinder { r, hole: None },
    };
    let kind = match family {
        "vertical" => FamilyKind::Vertical,
        "horizontal" => FamilyKind::Horizontal,
        "radial" => FamilyKind::Radial,
        "circular" => FamilyKind::Circular,
        other => bail!("unknown family {other}"),
    };
    let nx = ((region.width() * grid as f64).round() as usize).max(1);
    let ny = ((region.height() * grid as f64).round() as usize).max(1);
    let res = modulus(&PathFamily::product(&region, kind, nx, ny)?)?;
    let json = ModulusJson::new(family, &region, &res);
    if let Some(p) = svg_out {
        let title = format!("{family} family, modulus {:.6}", res.value);
        emit(&svg::heatmap(&json.density, &title, timestamp), Some(p))?;
    }
    to_json(&json)
}

/// Samples `f` on `nx × ny` nodes in parallel; rows are filled independently, so
/// the result does not depend on the thread count.
fn par_sample<T: PlaneTransform + Sync + ?Sized>(
    f: &T,
    origin: Point,
    delta: f64,
    nx: usize,
    ny: usize,
    mask: impl Fn(Point) -> bool + Sync,
) -> Result<PlaneMap> {
    let values: Vec<Point> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let f = &f;
            let mask = &mask;
            (0..nx).map(move |i| {
                let z = Point::new(origin.x + delta * i as f64, origin.y + delta * j as f64);
                match mask(z).then(|| f.apply(z)) {
                    Some(Ok(w)) if w.is_finite() => w,
                    _ => Point::new(f64::NAN, f64::NAN),
                }
            })
        })
        .collect();
    Ok(PlaneMap::new(origin, delta, nx, ny, values)?)
}

fn window(f: &(impl PlaneTransform + Sync), lo: f64, hi: f64, n: usize, mask: impl Fn(Point) -> bool + Sync) -> Result<PlaneMap> {
    let n = n.max(2);
    par_sample(f, Point::new(lo, lo), (hi - lo) / (n - 1) as f64, n, n, mask)
}

fn boundary_residual(f: &impl PlaneTransform, map: &CircleMap) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..1024 {
        let t = TAU * i as f64 / 1024.0;
        worst = worst.max(f.apply(Point::polar(1.0, t))?.dist(Point::polar(1.0, map.eval(t))));
    }
    Ok(worst)
}

#[derive(Serialize)]
struct ExtendManifest {
    mode: String,
    k: Option<usize>,
    r: Option<f64>,
    grid: usize,
    boundary_residual: Option<f64>,
    periodicity_residual: Option<f64>,
    probes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tower: Option<TowerManifestJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    periods: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diameter: Option<f64>,
}

pub struct ExtendArgs<'a> {
    pub mode: &'a str,
    pub map: Option<&'a Path>,
    pub carpet: Option<&'a Path>,
    pub k: Option<usize>,
    pub r: f64,
    pub depth: Option<usize>,
    pub twist: f64,
    pub grid: usize,
}

const PROBES: usize = 10_000;

/// Returns the sampled plane map JSON and the residual manifest JSON.
pub fn extend(a: &ExtendArgs) -> Result<(String, String)> {
    let need_map = || -> Result<CircleMap> {
        read_circle_map(a.map.context("--map is required for this mode")?)
    };
    let need_k = || a.k.context("--k is required for this mode");
    let mut manifest = ExtendManifest {
        mode: a.mode.to_string(),
        k: a.k,
        r: None,
        grid: a.grid,
        boundary_residual: None,
        periodicity_residual: None,
        probes: PROBES,
        depth: None,
        tower: None,
        periods: None,
        permutation: None,
        diameter: None,
    };
    let map = match a.mode {
        "ba" => {
            let f = need_map()?;
            let ext = ba_extend(&f)?;
            manifest.boundary_residual = Some(boundary_residual(&ext, &f)?);
            window(&ext, -1.0, 1.0, a.grid, |z| z.norm() <= 1.0)?
        }
        "periodic-annulus" => {
            let (f, k) = (need_map()?, need_k()?);
            let ext = periodic_annulus_extension(&f, a.r, k)?;
            manifest.r = Some(a.r);
            manifest.boundary_residual = Some(boundary_residual(&ext, &f)?);
            manifest.periodicity_residual = Some(periodicity_residual(&ext, k, annulus_points(PROBES, a.r, 1.0))?);
            let r = a.r;
            window(&ext, -1.0, 1.0, a.grid, move |z| (r..=1.0).contains(&z.norm()))?
        }
        "tower" => {
            let (f, k) = (need_map()?, need_k()?);
            let ext = periodic_annulus_extension(&f, a.r, k)?;
            let depth = a.depth.unwrap_or_else(|| default_depth(a.r, 4.0 / a.grid.max(2) as f64));
            let tower = reflection_tower_extend(&ext, a.r, depth)?;
            manifest.r = Some(a.r);
            manifest.depth = Some(depth);
            manifest.tower = Some(TowerManifestJson::from(&tower.manifest(k, 500)?));
            let plane = extend_to_plane(&tower)?;
            manifest.boundary_residual = Some(boundary_residual(&plane, &f)?);
            manifest.periodicity_residual =
                Some(periodicity_residual(&plane, k, box_points(PROBES, -2.0, 2.0, -2.0, 2.0))?);
            window(&plane, -2.0, 2.0, a.grid, |_| true)?
        }
        "carpet" => {
            let carpet = read_carpet(a.carpet.context("--carpet is required for mode carpet")?)?;
            let k = a.k.unwrap_or(4);
            let f = twisted_rotation(&carpet, k, a.twist)?;
            let dec = hole_orbits(&carpet, &f, k)?;
            manifest.periods = Some(dec.periods());
            manifest.permutation = Some(dec.permutation().to_vec());
            let ext = carpet_periodic_extension(&carpet, f, k)?;
            let (x0, x1, y0, y1) = carpet.region().bounds();
            manifest.k = Some(k);
            manifest.diameter = Some(carpet.diameter());
            manifest.periodicity_residual = Some(periodicity_residual(&ext, k, box_points(PROBES, x0, x1, y0, y1))?);
            let n = a.grid.max(2);
            let delta = (x1 - x0).max(y1 - y0) / (n - 1) as f64;
            let nx = ((x1 - x0) / delta).round() as usize + 1;
            let ny = ((y1 - y0) / delta).round() as usize + 1;
            par_sample(&ext, Point::new(x0, y0), delta, nx, ny, |_| true)?
        }
        other => bail!("unknown mode {other}"),
    };
    Ok((to_json(&PlaneMapJson::from(&map))?, to_json(&manifest)?))
}

/// Rotation by `2π/k` about the region's center, conjugated by a twist of every hole.
fn twisted_rotation(carpet: &Carpet, k: usize, eps: f64) -> Result<Conjugate<Similarity, HoleTwist>> {
    if carpet.region().is_log_cylinder() {
        bail!("mode carpet needs a planar carpet");
    }
    if k == 0 {
        bail!("k must be positive");
    }
    let (x0, x1, y0, y1) = carpet.region().bounds();
    let centre = Point::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let twists = carpet
        .peripheral_rects()
        .into_iter()
        .enumerate()
        .map(|(i, rect)| Twist {
            rect,
            eps: eps * (1.0 + 0.5 * (i % 3) as f64),
            phase: 0.7 * i as f64,
        })
        .collect();
    let margin = (0.5 * carpet.min_gap() / carpet.min_side()).min(0.2);
    Ok(Conjugate {
        inner: Similarity::rotation_about(centre, TAU / k as f64),
        conj: HoleTwist::new(twists, margin)?,
    })
}

pub fn rigidity(
    carpet_path: &Path,
    map_path: &Path,
    pipeline: &str,
    k: usize,
    opts: &PipelineOptions,
) -> Result<(String, u8)> {
    let carpet = read_carpet(carpet_path)?;
    let f = read_plane_map(map_path)?;
    let pipeline = match pipeline {
        "auto" => match carpet.region() {
            Region::LogCylinder { .. } => "cstar",
            Region::RectangleRing { .. } => "square",
            Region::Rectangle { .. } => "carpet",
        },
        p => p,
    };
    let json = match pipeline {
        "carpet" => ReportJson::new(pipeline, &carpet_rigidity_pipeline(&carpet, &f, k, opts)?, None),
        "square" => {
            let o = square_carpet_pipeline(&carpet, &f, opts)?;
            ReportJson::new(pipeline, &o.report, Some(&o))
        }
        "cstar" => {
            let o = cstar_pipeline(&carpet, &f, opts)?;
            ReportJson::new(pipeline, &o.report, Some(&o))
        }
        other => bail!("unknown pipeline {other}"),
    };
    let code = if json.verdict == Verdict::Identity.as_str() || json.order.is_some() {
        EXIT_OK
    } else {
        EXIT_WITNESS
    };
    Ok((to_json(&json)?, code))
}

/// Sampled circle maps for use as `--map` inputs.
pub fn circle_map(kind: &str, k: usize, samples: usize) -> Result<String> {
    let n = samples.max(8);
    let map = match kind {
        "identity" => CircleMap::identity(n),
        "rotation" => CircleMap::rotation(TAU / k.max(1) as f64, n),
        "conjugated" => {
            let conj = CircleMap::from_fn(n, |t| t + 0.25 * t.sin(), CircleOrientation::Preserve)?;
            CircleMap::rotation(TAU / k.max(1) as f64, n).conjugate_by(&conj)
        }
        "wobble" => CircleMap::from_fn(n, |t| t + 0.3 * t.sin(), CircleOrientation::Preserve)?,
        other => bail!("unknown circle map kind {other}"),
    };
    let mut buf = Vec::new();
    write_circle_map(&map, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

pub struct PlaneMapArgs<'a> {
    pub kind: &'a str,
    pub window: &'a [f64],
    pub nodes: usize,
    pub angle: f64,
    pub center: &'a [f64],
    pub amplitude: f64,
}

/// Sampled plane maps for use as rigidity inputs; the window is `x0,x1,y0,y1`
/// and `nodes` counts nodes along the longer side.
pub fn plane_map(a: &PlaneMapArgs) -> Result<String> {
    let [x0, x1, y0, y1] = <[f64; 4]>::try_from(a.window).ok().context("--window needs x0,x1,y0,y1")?;
    let [cx, cy] = <[f64; 2]>::try_from(a.center).ok().context("--center needs x,y")?;
    if !(x1 > x0 && y1 > y0) {
        bail!("empty window");
    }
    let n = a.nodes.max(2);
    let delta = (x1 - x0).max(y1 - y0) / (n - 1) as f64;
    let nx = ((x1 - x0) / delta).round() as usize + 1;
    let ny = ((y1 - y0) / delta).round() as usize + 1;
    let origin = Point::new(x0, y0);
    let amp = a.amplitude;
    let map = match a.kind {
        "identity" => PlaneMap::identity(origin, delta, nx, ny)?,
        "rotation" => {
            let rot = Similarity::rotation_about(Point::new(cx, cy), a.angle);
            par_sample(&rot, origin, delta, nx, ny, |_| true)?
        }
        "noise" => {
            let f = qcarpet::maps::FnTransform(move |z: Point| {
                Ok(z + Point::new(amp * (40.0 * z.x + 13.0 * z.y).sin(), amp * (29.0 * z.x - 17.0 * z.y).cos()))
            });
            par_sample(&f, origin, delta, nx, ny, |_| true)?
        }
        // Slides the side y = y0 along itself with the corners fixed.
        "slide" => {
            let w = x1 - x0;
            let f = qcarpet::maps::FnTransform(move |z: Point| {
                let s = (z.x - x0) / w;
                Ok(Point::new(z.x + amp * w * (PI * s).sin() * (1.0 - (z.y - y0) / (y1 - y0)), z.y))
            });
            par_sample(&f, origin, delta, nx, ny, |_| true)?
        }
        "quarter-turn" => {
            let rot = Similarity::rotation_about(Point::new(cx, cy), FRAC_PI_2);
            par_sample(&rot, origin, delta, nx, ny, |_| true)?
        }
        other => bail!("unknown plane map kind {other}"),
    };
    to_json(&PlaneMapJson::from(&map))
}

/// SVG for any result file, chosen by its fields.
pub fn plot(input: &Path, timestamp: bool) -> Result<String> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    let obj = value.as_object().context("expected a JSON object")?;
    if obj.contains_key("holes") {
        let c: CarpetJson = serde_json::from_value(value)?;
        Ok(svg::carpet(&c, timestamp))
    } else if let Some(d) = obj.get("density") {
        let d: DensityJson = serde_json::from_value(d.clone())?;
        let title = match (obj.get("family"), obj.get("value")) {
            (Some(f), Some(v)) => format!("{} family, modulus {v}", f.as_str().unwrap_or("?")),
            _ => String::from("density"),
        };
        Ok(svg::heatmap(&d, &title, timestamp))
    } else if obj.contains_key("rings") {
        let m: TowerManifestJson = serde_json::from_value(value)?;
        Ok(svg::manifest_chart(&m, timestamp))
    } else if let Some(t) = obj.get("tower") {
        let m: TowerManifestJson = serde_json::from_value(t.clone())?;
        Ok(svg::manifest_chart(&m, timestamp))
    } else if obj.contains_key("delta") && obj.contains_key("values") {
        let m: PlaneMapJson = serde_json::from_value(value)?;
        Ok(svg::plane_map(&m, timestamp))
    } else {
        bail!("{}: not a carpet, modulus, density, manifest or plane map file", input.display())
    }
}

//! JSON and CSV file formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qcarpet::carpet::Carpet;
use qcarpet::extension::TowerManifest;
use qcarpet::geometry::{Rect, Region};
use qcarpet::maps::{CircleMap, PlaneMap};
use qcarpet::modulus::{BoundReport, Density, ModulusResult};
use qcarpet::rigidity::{Direction, OrbitReport, RigidityReport, Verdict};
use qcarpet::Point;
use serde::{Deserialize, Serialize};

/// `[s, w, t, h]`: left edge, width, bottom edge, height.
pub type RectJson = [f64; 4];

fn rect_json(r: &Rect) -> RectJson {
    [r.s, r.w, r.t, r.h]
}

fn rect_from(v: RectJson) -> Rect {
    Rect::new(v[0], v[1], v[2], v[3])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RegionJson {
    #[serde(rename = "rect")]
    Rect { a: f64 },
    #[serde(rename = "rect-ring")]
    RectRing {
        a: f64,
        #[serde(rename = "K")]
        k: RectJson,
    },
    #[serde(rename = "cstar")]
    Cstar {
        r: f64,
        #[serde(rename = "K")]
        k: Option<RectJson>,
    },
}

impl From<&Region> for RegionJson {
    fn from(region: &Region) -> Self {
        match region {
            Region::Rectangle { a } => RegionJson::Rect { a: *a },
            Region::RectangleRing { a, hole } => RegionJson::RectRing { a: *a, k: rect_json(hole) },
            Region::LogCylinder { r, hole } => RegionJson::Cstar {
                r: *r,
                k: hole.as_ref().map(rect_json),
            },
        }
    }
}

impl RegionJson {
    pub fn to_region(&self) -> Region {
        match self {
            RegionJson::Rect { a } => Region::Rectangle { a: *a },
            RegionJson::RectRing { a, k } => Region::RectangleRing { a: *a, hole: rect_from(*k) },
            RegionJson::Cstar { r, k } => Region::LogCylinder {
                r: *r,
                hole: k.map(rect_from),
            },
        }
    }
}

/// Carpet file: square holes as `[cx, cy, side]` in `(cy, cx)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarpetJson {
    pub region: RegionJson,
    #[serde(rename = "K")]
    pub k: Option<RectJson>,
    /// Rotated copies of `K` in symmetric C* carpets.
    #[serde(default)]
    pub k_copies: Vec<RectJson>,
    pub holes: Vec<[f64; 3]>,
    pub depth: usize,
}

impl CarpetJson {
    pub fn from_carpet(carpet: &Carpet) -> Result<Self> {
        let holes = carpet
            .holes()
            .iter()
            .map(|r| {
                if r.w != r.h {
                    bail!("hole {r:?} is not a square");
                }
                let c = r.center();
                Ok([c.x, c.y, r.w])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CarpetJson {
            region: RegionJson::from(carpet.region()),
            k: carpet.k().as_ref().map(rect_json),
            k_copies: carpet.k_copies().iter().map(rect_json).collect(),
            holes,
            depth: carpet.depth(),
        })
    }

    pub fn to_carpet(&self) -> Result<Carpet> {
        let region = self.region.to_region();
        if self.k != region.hole().as_ref().map(rect_json) {
            bail!("\"K\" does not match the region's hole");
        }
        let holes = self
            .holes
            .iter()
            .map(|&[cx, cy, side]| Rect::square(Point::new(cx, cy), side))
            .collect();
        let copies = self.k_copies.iter().map(|&v| rect_from(v)).collect();
        Ok(Carpet::new(region, copies, holes, self.depth)?)
    }
}

pub fn read_carpet(path: &Path) -> Result<Carpet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: CarpetJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    json.to_carpet()
}

/// Grid placement of a [`PlaneMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub origin: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

/// Plane map file: row-major node values, `null` where undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneMapJson {
    pub region: GridJson,
    pub delta: f64,
    pub values: Vec<Option<[f64; 2]>>,
}

impl From<&PlaneMap> for PlaneMapJson {
    fn from(map: &PlaneMap) -> Self {
        let (nx, ny) = map.shape();
        let o = map.origin();
        PlaneMapJson {
            region: GridJson { origin: [o.x, o.y], nx, ny },
            delta: map.delta(),
            values: map
                .values()
                .iter()
                .map(|p| p.is_finite().then_some([p.x, p.y]))
                .collect(),
        }
    }
}

impl PlaneMapJson {
    pub fn to_map(&self) -> Result<PlaneMap> {
        let values = self
            .values
            .iter()
            .map(|v| v.map_or(Point::new(f64::NAN, f64::NAN), |[x, y]| Point::new(x, y)))
            .collect();
        let g = &self.region;
        Ok(PlaneMap::new(Point::new(g.origin[0], g.origin[1]), self.delta, g.nx, g.ny, values)?)
    }
}

pub fn read_plane_map(path: &Path) -> Result<PlaneMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: PlaneMapJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    json.to_map()
}

#[derive(Debug, Serialize, Deserialize)]
struct CircleRow {
    angle: f64,
    image: f64,
}

/// Circle map CSV with header `angle,image`, both in radians.
pub fn read_circle_map(path: &Path) -> Result<CircleMap> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    if reader.headers()?.iter().collect::<Vec<_>>() != ["angle", "image"] {
        bail!("{}: header must be \"angle,image\"", path.display());
    }
    let mut angles = Vec::new();
    let mut images = Vec::new();
    for row in reader.deserialize() {
        let row: CircleRow = row.with_context(|| format!("parsing {}", path.display()))?;
        angles.push(row.angle);
        images.push(row.image);
    }
    Ok(CircleMap::from_samples(&angles, &images)?)
}

pub fn write_circle_map(map: &CircleMap, out: &mut dyn Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for (&angle, image) in map.knots().iter().zip(map.images()) {
        writer.serialize(CircleRow { angle, image })?;
    }
    writer.flush()?;
    Ok(())
}

/// Cell densities in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl From<&Density> for DensityJson {
    fn from(d: &Density) -> Self {
        let g = d.grid;
        DensityJson {
            x0: g.x0,
            y0: g.y0,
            dx: g.dx,
            dy: g.dy,
            nx: g.nx,
            ny: g.ny,
            values: d.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusJson {
    pub family: String,
    pub region: RegionJson,
    pub value: f64,
    pub gap: f64,
    pub min_path_integral: f64,
    pub iterations: usize,
    pub converged: bool,
    pub density: DensityJson,
}

impl ModulusJson {
    pub fn new(family: &str, region: &Region, res: &ModulusResult) -> Self {
        ModulusJson {
            family: family.to_string(),
            region: RegionJson::from(region),
            value: res.value,
            gap: res.gap,
            min_path_integral: res.min_path_integral,
            iterations: res.iterations,
            converged: res.converged,
            density: DensityJson::from(&res.density),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingJson {
    pub rho: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerManifestJson {
    pub rings: Vec<RingJson>,
    pub monotone: bool,
}

impl From<&TowerManifest> for TowerManifestJson {
    fn from(m: &TowerManifest) -> Self {
        TowerManifestJson {
            rings: m
                .rings
                .iter()
                .map(|r| RingJson {
                    rho: r.rho,
                    residual: r.residual,
                })
                .collect(),
            monotone: m.monotone,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub x: f64,
    pub orbit: Vec<f64>,
    pub drift: f64,
    pub drift_length: Option<f64>,
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundJson {
    pub along: f64,
    pub image_side: f64,
    pub energy: f64,
    pub credited_energy: f64,
    pub base_area: f64,
    pub defect: f64,
    pub min_path_ratio: f64,
    pub admissible: bool,
    pub lower_bound_ok: bool,
    pub raw_lower_bound_ok: bool,
    pub implied_bound_ok: bool,
}

impl From<&BoundReport> for BoundJson {
    fn from(b: &BoundReport) -> Self {
        BoundJson {
            along: b.along,
            image_side: b.image_side,
            energy: b.energy,
            credited_energy: b.credited_energy,
            base_area: b.base_area,
            defect: b.defect,
            min_path_ratio: b.min_path_ratio,
            admissible: b.admissible,
            lower_bound_ok: b.lower_bound_ok,
            raw_lower_bound_ok: b.raw_lower_bound_ok,
            implied_bound_ok: b.implied_bound_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub k_orbit: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    pub bound: BoundJson,
    pub contradiction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub pipeline: String,
    pub verdict: String,
    pub order: Option<usize>,
    pub residual: f64,
    pub witness: Option<WitnessJson>,
    pub orbit_period: Option<usize>,
    pub hypothesis_checks: Vec<CheckJson>,
    pub defect: f64,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitJson>,
}

impl ReportJson {
    pub fn new(pipeline: &str, r: &RigidityReport, orbit: Option<&OrbitReport>) -> Self {
        let order = match r.verdict {
            Verdict::Periodic { order } => Some(order),
            _ => None,
        };
        ReportJson {
            pipeline: pipeline.to_string(),
            verdict: r.verdict.as_str().to_string(),
            order,
            residual: r.residual,
            witness: r.witness.as_ref().map(|w| WitnessJson {
                x: w.x,
                orbit: w.orbit.clone(),
                drift: w.drift,
                drift_length: r.witness_drift,
                direction: match w.direction {
                    Direction::Increasing => "increasing",
                    Direction::Decreasing => "decreasing",
                }
                .to_string(),
            }),
            orbit_period: r.orbit_period,
            hypothesis_checks: r
                .hypothesis_checks
                .iter()
                .map(|h| CheckJson {
                    name: h.name.to_string(),
                    pass: h.pass,
                    detail: h.detail.clone(),
                })
                .collect(),
            defect: r.defect,
            notes: r.notes.clone(),
            orbit: orbit.map(|o| OrbitJson {
                k_orbit: o.k_orbit.clone(),
                cycles: o.cycles.clone(),
                bound: BoundJson::from(&o.bound),
                contradiction: o.contradiction,
            }),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| anyhow!(e))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcarpet::carpet::{cstar_carpet, ring_carpet, sierpinski};
    use qcarpet::maps::CircleOrientation;

    fn round_trip(c: &Carpet) {
        let json = CarpetJson::from_carpet(c).unwrap();
        let text = to_json(&json).unwrap();
        let back: CarpetJson = serde_json::from_str(&text).unwrap();
        let c2 = back.to_carpet().unwrap();
        assert_eq!(c2.region(), c.region());
        assert_eq!(c2.k_copies(), c.k_copies());
        // Centres are stored, corners are derived: equal up to an ulp of the coordinate.
        assert_eq!(c2.holes().len(), c.holes().len());
        for (a, b) in c.holes().iter().zip(c2.holes()) {
            assert!((a.s - b.s).abs() <= 1e-15 * (1.0 + a.s.abs()) && (a.t - b.t).abs() <= 1e-15 * (1.0 + a.t.abs()));
            assert_eq!(a.w, b.w);
        }
        let again = to_json(&CarpetJson::from_carpet(&c2).unwrap()).unwrap();
        let third = to_json(&CarpetJson::from_carpet(&CarpetJson::from_carpet(&c2).unwrap().to_carpet().unwrap()).unwrap()).unwrap();
        assert_eq!(again, third);
    }

    #[test]
    fn carpets_round_trip() {
        round_trip(&sierpinski(3).unwrap());
        round_trip(&ring_carpet(2.0, Rect::new(0.8, 0.4, 0.4, 0.2), 2).unwrap());
        let b = std::f64::consts::TAU / 12.0;
        round_trip(&cstar_carpet((6.0 * b).exp(), Rect::new(2.0 * b, b, b, 2.0 * b), 1, 12, 3).unwrap());
    }

    #[test]
    fn circle_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let f = CircleMap::from_fn(64, |t| t + 2.0 + 0.3 * t.sin(), CircleOrientation::Preserve).unwrap();
        let mut buf = Vec::new();
        write_circle_map(&f, &mut buf).unwrap();
        fs::write(&path, &buf).unwrap();
        let g = read_circle_map(&path).unwrap();
        assert!(f.distance(&g) < 1e-12);
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(1) {
            let image: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((0.0..std::f64::consts::TAU).contains(&image));
        }

        fs::write(&path, "theta,value\n0,0\n").unwrap();
        assert!(read_circle_map(&path).is_err());
    }

    #[test]
    fn plane_map_nulls_survive() {
        let mut values = vec![Point::new(1.0, 2.0); 9];
        values[4] = Point::new(f64::NAN, f64::NAN);
        let map = PlaneMap::new(Point::new(0.0, 0.0), 0.5, 3, 3, values).unwrap();
        let json = PlaneMapJson::from(&map);
        assert_eq!(json.values[4], None);
        let back = json.to_map().unwrap();
        assert_eq!(back.value(1, 1), None);
        assert_eq!(back.value(0, 0), Some(Point::new(1.0, 2.0)));
    }
}

//! Structured 3D grid, stencil neighborhoods and per-cell workloads.
//!
//! Cells are numbered row-major with x fastest: `id = x + nx * (y + ny * z)`.
//! That numbering is part of every text format emitted by this crate.

use crate::error::{Error, Result};
use crate::scalar::Weight;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Linear cell index.
pub type CellId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "0" => Ok(Axis::X),
            "y" | "1" => Ok(Axis::Y),
            "z" | "2" => Ok(Axis::Z),
            other => Err(Error::config("axis", format!("unknown axis '{other}'"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Which cells exchange halo data with a cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stencil {
    /// The six face neighbors.
    #[default]
    Face6,
    /// Face, edge and corner neighbors.
    Full26,
}

impl Stencil {
    pub fn max_degree(self) -> usize {
        match self {
            Stencil::Face6 => 6,
            Stencil::Full26 => 26,
        }
    }

    fn offsets(self) -> &'static [[isize; 3]] {
        match self {
            Stencil::Face6 => &FACE6,
            Stencil::Full26 => &FULL26,
        }
    }
}

const FACE6: [[isize; 3]; 6] = [
    [0, 0, -1],
    [0, -1, 0],
    [-1, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
];

const FULL26: [[isize; 3]; 26] = {
    let mut out = [[0isize; 3]; 26];
    let mut n = 0;
    let mut dz = -1;
    while dz <= 1 {
        let mut dy = -1;
        while dy <= 1 {
            let mut dx = -1;
            while dx <= 1 {
                if dx != 0 || dy != 0 || dz != 0 {
                    out[n] = [dx, dy, dz];
                    n += 1;
                }
                dx += 1;
            }
            dy += 1;
        }
        dz += 1;
    }
    out
};

impl FromStr for Stencil {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "face6" => Ok(Stencil::Face6),
            "full26" => Ok(Stencil::Full26),
            other => Err(Error::config(
                "stencil",
                format!("expected face6 or full26, got '{other}'"),
            )),
        }
    }
}

impl fmt::Display for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stencil::Face6 => "face6",
            Stencil::Full26 => "full26",
        })
    }
}

/// Dimensions, stencil and boundary handling of a Cartesian grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub stencil: Stencil,
    pub periodic: [bool; 3],
}

impl GridSpec {
    /// Non-periodic grid with the face stencil.
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n == 0 {
                return Err(Error::config(name, "grid extents must be at least 1"));
            }
        }
        nx.checked_mul(ny)
            .and_then(|c| c.checked_mul(nz))
            .ok_or_else(|| Error::config("grid", "cell count overflows"))?;
        Ok(GridSpec {
            nx,
            ny,
            nz,
            stencil: Stencil::Face6,
            periodic: [false; 3],
        })
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn with_periodic(mut self, periodic: [bool; 3]) -> Self {
        self.periodic = periodic;
        self
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn extent(&self, axis: Axis) -> usize {
        self.dims()[axis.index()]
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn linearize(&self, coords: [usize; 3]) -> Result<CellId> {
        let dims = self.dims();
        if coords.iter().zip(dims).any(|(&c, n)| c >= n) {
            return Err(Error::InputDomain(format!(
                "coordinate {coords:?} outside grid {}x{}x{}",
                self.nx, self.ny, self.nz
            )));
        }
        Ok(self.linearize_unchecked(coords))
    }

    #[inline]
    pub(crate) fn linearize_unchecked(&self, [x, y, z]: [usize; 3]) -> CellId {
        x + self.nx * (y + self.ny * z)
    }

    pub fn delinearize(&self, cell: CellId) -> Result<[usize; 3]> {
        self.check_cell(cell)?;
        Ok(self.delinearize_unchecked(cell))
    }

    #[inline]
    pub(crate) fn delinearize_unchecked(&self, cell: CellId) -> [usize; 3] {
        let x = cell % self.nx;
        let yz = cell / self.nx;
        [x, yz % self.ny, yz / self.ny]
    }

    pub fn check_cell(&self, cell: CellId) -> Result<()> {
        if cell >= self.cell_count() {
            return Err(Error::InputDomain(format!(
                "cell {cell} outside grid of {} cells",
                self.cell_count()
            )));
        }
        Ok(())
    }

    /// Distinct stencil neighbors of `cell` in ascending id order.
    pub fn neighbors(&self, cell: CellId) -> Result<Vec<CellId>> {
        self.check_cell(cell)?;
        let mut out = Vec::with_capacity(self.stencil.max_degree());
        self.neighbors_into(cell, &mut out);
        Ok(out)
    }

    /// Same as [`GridSpec::neighbors`] for an in-range cell, reusing `out`.
    pub fn neighbors_into(&self, cell: CellId, out: &mut Vec<CellId>) {
        out.clear();
        let coords = self.delinearize_unchecked(cell);
        let dims = self.dims();
        'offsets: for off in self.stencil.offsets() {
            let mut nc = [0usize; 3];
            for a in 0..3 {
                let c = coords[a] as isize + off[a];
                let n = dims[a] as isize;
                nc[a] = if (0..n).contains(&c) {
                    c as usize
                } else if self.periodic[a] {
                    c.rem_euclid(n) as usize
                } else {
                    continue 'offsets;
                };
            }
            let id = self.linearize_unchecked(nc);
            if id != cell {
                out.push(id);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Parses `NXxNYxNZ`, e.g. `32x32x16`.
pub fn parse_dims(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(Error::config(
            "grid",
            format!("expected NXxNYxNZ, got '{s}'"),
        ));
    }
    let mut dims = [0usize; 3];
    for (d, p) in dims.iter_mut().zip(parts) {
        *d = p
            .trim()
            .parse()
            .map_err(|_| Error::config("grid", format!("bad extent '{p}' in '{s}'")))?;
    }
    Ok(dims)
}

/// Per-cell compute load and halo payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellWeights<W> {
    compute: Vec<W>,
    comm: Vec<W>,
}

impl<W: Weight> CellWeights<W> {
    pub fn new(compute: Vec<W>, comm: Vec<W>) -> Result<Self> {
        if compute.len() != comm.len() {
            return Err(Error::SizeMismatch {
                expected: compute.len(),
                actual: comm.len(),
            });
        }
        if let Some(i) = compute.iter().chain(&comm).position(|w| !(*w >= W::zero())) {
            let i = i % compute.len().max(1);
            return Err(Error::config(
                "weights",
                format!("negative weight at cell {i}"),
            ));
        }
        let total: W = compute.iter().copied().sum();
        if !(total > W::zero()) {
            return Err(Error::config(
                "weights",
                "total compute weight must be positive",
            ));
        }
        Ok(CellWeights { compute, comm })
    }

    /// Compute weights with halo payload equal to the compute weight.
    pub fn proportional(compute: Vec<W>) -> Result<Self> {
        let comm = compute.clone();
        Self::new(compute, comm)
    }

    pub fn uniform(cells: usize, w: W) -> Result<Self> {
        Self::new(vec![w; cells], vec![w; cells])
    }

    pub fn len(&self) -> usize {
        self.compute.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compute.is_empty()
    }

    pub fn compute(&self) -> &[W] {
        &self.compute
    }

    pub fn comm(&self) -> &[W] {
        &self.comm
    }

    pub fn total_compute(&self) -> W {
        self.compute.iter().copied().sum()
    }

    pub fn check_spec(&self, spec: &GridSpec) -> Result<()> {
        if self.len() != spec.cell_count() {
            return Err(Error::SizeMismatch {
                expected: spec.cell_count(),
                actual: self.len(),
            });
        }
        Ok(())
    }

    /// Multiplies every halo payload by `s`.
    pub fn scale_comm(&self, s: W) -> Self {
        CellWeights {
            compute: self.compute.clone(),
            comm: self.comm.iter().map(|&c| c * s).collect(),
        }
    }
}

/// Parametric workload shapes evaluated on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WorkloadScenario {
    Uniform {
        w: f64,
    },
    /// `floor + peak * exp(-d^2 / (2 sigma^2))`, `d` measured in cell units.
    GaussianBlob {
        center: [f64; 3],
        sigma: f64,
        peak: f64,
        floor: f64,
    },
    /// Cells behind the front (coordinate < `floor(extent * t / period)`)
    /// carry `w_hot`, the rest `w_cold`.
    ShockFront {
        axis: Axis,
        w_hot: f64,
        w_cold: f64,
        period: usize,
    },
}

impl WorkloadScenario {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive, got {v}")))
            }
        };
        match *self {
            WorkloadScenario::Uniform { w } => positive("scenario.w", w),
            WorkloadScenario::GaussianBlob {
                center,
                sigma,
                peak,
                floor,
            } => {
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::config("scenario.center", "must be finite"));
                }
                positive("scenario.sigma", sigma)?;
                positive("scenario.peak", peak)?;
                positive("scenario.floor", floor)
            }
            WorkloadScenario::ShockFront {
                w_hot,
                w_cold,
                period,
                ..
            } => {
                positive("scenario.w_hot", w_hot)?;
                positive("scenario.w_cold", w_cold)?;
                if period == 0 {
                    return Err(Error::config("scenario.period", "must be at least 1"));
                }
                Ok(())
            }
        }
    }

    /// Whether the workload changes with the time step.
    pub fn is_dynamic(&self) -> bool {
        matches!(self, WorkloadScenario::ShockFront { .. })
    }

    /// Per-cell values at `step`.
    pub fn evaluate<W: Weight>(&self, spec: &GridSpec, step: usize) -> Result<Vec<W>> {
        self.validate()?;
        let n = spec.cell_count();
        match *self {
            WorkloadScenario::Uniform { w } => Ok(vec![W::from_f64_lossy(w); n]),
            WorkloadScenario::GaussianBlob {
                center,
                sigma,
                peak,
                floor,
            } => Ok((0..n)
                .map(|cell| {
                    let c = spec.delinearize_unchecked(cell);
                    let d2: f64 = (0..3).map(|a| (c[a] as f64 - center[a]).powi(2)).sum();
                    W::from_f64_lossy(floor + peak * (-d2 / (2.0 * sigma * sigma)).exp())
                })
                .collect()),
            WorkloadScenario::ShockFront {
                axis,
                w_hot,
                w_cold,
                period,
            } => {
                if step > period {
                    return Err(Error::config(
                        "step",
                        format!("step {step} outside shock period 0..={period}"),
                    ));
                }
                let front = spec.extent(axis) * step / period;
                let (hot, cold) = (W::from_f64_lossy(w_hot), W::from_f64_lossy(w_cold));
                Ok((0..n)
                    .map(|cell| {
                        if spec.delinearize_unchecked(cell)[axis.index()] < front {
                            hot
                        } else {
                            cold
                        }
                    })
                    .collect())
            }
        }
    }
}

impl FromStr for WorkloadScenario {
    type Err = Error;

    /// `uniform:W`, `gaussian:CX,CY,CZ,SIGMA,PEAK,FLOOR` or
    /// `shock:AXIS,W_HOT,W_COLD,PERIOD`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::config("scenario", msg);
        let (kind, args) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let args: Vec<&str> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(str::trim).collect()
        };
        let num = |i: usize| -> Result<f64> {
            args[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("bad number '{}' in '{s}'", args[i])))
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!(
                    "'{kind}' takes {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        let scenario = match kind.to_ascii_lowercase().as_str() {
            "uniform" => {
                if args.is_empty() {
                    WorkloadScenario::Uniform { w: 1.0 }
                } else {
                    arity(1)?;
                    WorkloadScenario::Uniform { w: num(0)? }
                }
            }
            "gaussian" => {
                arity(6)?;
                WorkloadScenario::GaussianBlob {
                    center: [num(0)?, num(1)?, num(2)?],
                    sigma: num(3)?,
                    peak: num(4)?,
                    floor: num(5)?,
                }
            }
            "shock" => {
                arity(4)?;
                WorkloadScenario::ShockFront {
                    axis: args[0].parse()?,
                    w_hot: num(1)?,
                    w_cold: num(2)?,
                    period: args[3]
                        .parse()
                        .map_err(|_| bad(format!("bad period '{}'", args[3])))?,
                }
            }
            other => return Err(bad(format!("unknown scenario '{other}'"))),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl fmt::Display for WorkloadScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkloadScenario::Uniform { w } => write!(f, "uniform:{w}"),
            WorkloadScenario::GaussianBlob {
                center,
                sigma,
                peak,
                floor,
            } => write!(
                f,
                "gaussian:{},{},{},{sigma},{peak},{floor}",
                center[0], center[1], center[2]
            ),
            WorkloadScenario::ShockFront {
                axis,
                w_hot,
                w_cold,
                period,
            } => write!(f, "shock:{axis},{w_hot},{w_cold},{period}"),
        }
    }
}

/// Weights for `scenario` at `step`, with halo payload equal to compute.
pub fn generate_weights<W: Weight>(
    scenario: &WorkloadScenario,
    spec: &GridSpec,
    step: usize,
) -> Result<CellWeights<W>> {
    CellWeights::proportional(scenario.evaluate(spec, step)?)
}

/// Weights whose halo payload follows its own scenario.
pub fn generate_weights_with_comm<W: Weight>(
    compute: &WorkloadScenario,
    comm: &WorkloadScenario,
    spec: &GridSpec,
    step: usize,
) -> Result<CellWeights<W>> {
    CellWeights::new(compute.evaluate(spec, step)?, comm.evaluate(spec, step)?)
}

/// Text snapshot: `nx ny nz stencil [periodic=xyz]`, then `id compute comm`
/// per cell.
pub fn write_snapshot<W: Weight>(spec: &GridSpec, weights: &CellWeights<W>) -> Result<String> {
    use std::fmt::Write;
    weights.check_spec(spec)?;
    let mut out = format!("{} {} {} {}", spec.nx, spec.ny, spec.nz, spec.stencil);
    if spec.periodic.iter().any(|&p| p) {
        out.push_str(" periodic=");
        for (axis, _) in Axis::ALL.iter().zip(spec.periodic).filter(|(_, p)| *p) {
            out.push_str(&axis.to_string());
        }
    }
    out.push('\n');
    for (i, (c, m)) in weights.compute().iter().zip(weights.comm()).enumerate() {
        writeln!(out, "{i} {c} {m}").expect("write to string");
    }
    Ok(out)
}

pub fn read_snapshot<W: Weight>(text: &str) -> Result<(GridSpec, CellWeights<W>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 4 && tok.len() != 5 {
        return Err(Error::parse(hline + 1, "header must be 'nx ny nz stencil'"));
    }
    let dim = |i: usize| -> Result<usize> {
        tok[i]
            .parse()
            .map_err(|_| Error::parse(hline + 1, format!("bad extent '{}'", tok[i])))
    };
    let mut spec = GridSpec::new(dim(0)?, dim(1)?, dim(2)?)?.with_stencil(tok[3].parse()?);
    if let Some(p) = tok.get(4) {
        let axes = p
            .strip_prefix("periodic=")
            .ok_or_else(|| Error::parse(hline + 1, format!("unexpected token '{p}'")))?;
        let mut periodic = [false; 3];
        for ch in axes.chars() {
            periodic[ch.to_string().parse::<Axis>()?.index()] = true;
        }
        spec = spec.with_periodic(periodic);
    }
    let n = spec.cell_count();
    let mut compute = Vec::with_capacity(n);
    let mut comm = Vec::with_capacity(n);
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(ln + 1, "expected 'id compute comm'"));
        }
        let id: usize = f[0]
            .parse()
            .map_err(|_| Error::parse(ln + 1, format!("bad cell id '{}'", f[0])))?;
        if id != compute.len() {
            return Err(Error::parse(
                ln + 1,
                format!("cell ids must be consecutive, expected {}", compute.len()),
            ));
        }
        let w = |s: &str| {
            s.parse::<W>()
                .map_err(|_| Error::parse(ln + 1, format!("bad weight '{s}'")))
        };
        compute.push(w(f[1])?);
        comm.push(w(f[2])?);
    }
    let weights = CellWeights::new(compute, comm)?;
    weights.check_spec(&spec)?;
    Ok((spec, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn spec(nx: usize, ny: usize, nz: usize) -> GridSpec {
        GridSpec::new(nx, ny, nz).unwrap()
    }

    #[test]
    fn linearize_examples() {
        assert_eq!(spec(2, 2, 1).linearize([0, 0, 0]).unwrap(), 0);
        assert_eq!(spec(2, 2, 1).linearize([1, 1, 0]).unwrap(), 3);
        assert_eq!(spec(2, 2, 2).linearize([1, 0, 1]).unwrap(), 5);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let s = spec(2, 2, 1);
        assert!(matches!(s.linearize([2, 0, 0]), Err(Error::InputDomain(_))));
        assert!(matches!(s.linearize([0, 0, 1]), Err(Error::InputDomain(_))));
        assert!(matches!(s.delinearize(4), Err(Error::InputDomain(_))));
        assert!(matches!(s.neighbors(4), Err(Error::InputDomain(_))));
    }

    #[test]
    fn zero_extent_rejected() {
        assert!(matches!(GridSpec::new(0, 1, 1), Err(Error::Config { .. })));
    }

    #[test]
    fn bijection_exhaustive_small_grids() {
        for nx in 1..=8 {
            for ny in [1, 3, 8] {
                for nz in [1, 2, 8] {
                    let s = spec(nx, ny, nz);
                    for id in 0..s.cell_count() {
                        let c = s.delinearize(id).unwrap();
                        assert_eq!(s.linearize(c).unwrap(), id);
                    }
                }
            }
        }
    }

    #[test]
    fn neighbor_examples() {
        assert_eq!(spec(2, 2, 1).neighbors(0).unwrap(), vec![1, 2]);
        assert_eq!(spec(3, 1, 1).neighbors(1).unwrap(), vec![0, 2]);
        let periodic = spec(3, 1, 1).with_periodic([true, false, false]);
        assert_eq!(periodic.neighbors(0).unwrap(), vec![1, 2]);
    }

    #[test]
    fn periodic_extent_one_and_two_stay_distinct() {
        let s = spec(1, 2, 1).with_periodic([true, true, true]);
        assert_eq!(s.neighbors(0).unwrap(), vec![1]);
        let s = spec(1, 1, 1)
            .with_periodic([true; 3])
            .with_stencil(Stencil::Full26);
        assert!(s.neighbors(0).unwrap().is_empty());
    }

    #[test]
    fn interior_degrees() {
        let s = spec(3, 3, 3);
        let center = s.linearize([1, 1, 1]).unwrap();
        assert_eq!(s.neighbors(center).unwrap().len(), 6);
        let s = s.with_stencil(Stencil::Full26);
        assert_eq!(s.neighbors(center).unwrap().len(), 26);
    }

    #[test]
    fn neighbors_symmetric_irreflexive() {
        for stencil in [Stencil::Face6, Stencil::Full26] {
            for periodic in [[false; 3], [true, false, true], [true; 3]] {
                let s = spec(4, 3, 2).with_stencil(stencil).with_periodic(periodic);
                for i in 0..s.cell_count() {
                    let nb = s.neighbors(i).unwrap();
                    assert!(!nb.contains(&i));
                    assert!(nb.len() <= stencil.max_degree());
                    for &j in &nb {
                        assert!(s.neighbors(j).unwrap().contains(&i));
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_weights() {
        let s = spec(3, 2, 2);
        let w: CellWeights<f64> =
            generate_weights(&WorkloadScenario::Uniform { w: 1.0 }, &s, 7).unwrap();
        assert!(w.compute().iter().all(|&c| c == 1.0));
        assert_eq!(w.compute(), w.comm());
    }

    #[test]
    fn shock_front_example() {
        let sc = WorkloadScenario::ShockFront {
            axis: Axis::X,
            w_hot: 4.0,
            w_cold: 1.0,
            period: 4,
        };
        let w: CellWeights<Ratio<i64>> = generate_weights(&sc, &spec(4, 1, 1), 2).unwrap();
        let expect: Vec<Ratio<i64>> = [4, 4, 1, 1]
            .iter()
            .map(|&v| Ratio::from_integer(v))
            .collect();
        assert_eq!(w.compute(), &expect[..]);
        assert!(matches!(
            generate_weights::<f64>(&sc, &spec(4, 1, 1), 5),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn gaussian_blob_example() {
        let sc = WorkloadScenario::GaussianBlob {
            center: [1.0, 0.0, 0.0],
            sigma: 1.0,
            peak: 9.0,
            floor: 1.0,
        };
        let w: CellWeights<f64> = generate_weights(&sc, &spec(3, 1, 1), 0).unwrap();
        let side = 1.0 + 9.0 * (-0.5f64).exp();
        let expect = [side, 10.0, side];
        for (a, b) in w.compute().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_scenarios_rejected() {
        for s in [
            "uniform:0",
            "gaussian:0,0,0,0,1,1",
            "shock:x,1,1,0",
            "shock:q,1,1,2",
            "wave:1",
        ] {
            assert!(
                matches!(s.parse::<WorkloadScenario>(), Err(Error::Config { .. })),
                "{s}"
            );
        }
        let bad = WorkloadScenario::Uniform { w: -1.0 };
        assert!(generate_weights::<f64>(&bad, &spec(1, 1, 1), 0).is_err());
    }

    #[test]
    fn scenario_text_round_trip() {
        for s in ["uniform:2", "gaussian:1,2,3,1.5,9,1", "shock:y,4,1,8"] {
            let sc: WorkloadScenario = s.parse().unwrap();
            assert_eq!(sc.to_string().parse::<WorkloadScenario>().unwrap(), sc);
        }
    }

    #[test]
    fn generate_is_pure() {
        let sc: WorkloadScenario = "gaussian:2,1,0,1.3,5,0.5".parse().unwrap();
        let s = spec(5, 4, 3);
        let a: CellWeights<f64> = generate_weights(&sc, &s, 0).unwrap();
        let b: CellWeights<f64> = generate_weights(&sc, &s, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn independent_comm_scenario() {
        let s = spec(4, 1, 1);
        let w: CellWeights<f64> = generate_weights_with_comm(
            &"uniform:3".parse().unwrap(),
            &"uniform:0.5".parse().unwrap(),
            &s,
            0,
        )
        .unwrap();
        assert_eq!(w.compute(), &[3.0; 4]);
        assert_eq!(w.comm(), &[0.5; 4]);
    }

    #[test]
    fn weights_validation() {
        assert!(CellWeights::<f64>::new(vec![1.0], vec![]).is_err());
        assert!(CellWeights::<f64>::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(CellWeights::<f64>::new(vec![1.0, -1.0], vec![1.0, 1.0]).is_err());
        assert!(CellWeights::<f64>::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn snapshot_round_trip() {
        let s = spec(3, 2, 1)
            .with_stencil(Stencil::Full26)
            .with_periodic([true, false, true]);
        let w: CellWeights<Ratio<i64>> = CellWeights::new(
            (1..=6).map(|v| Ratio::new(v, 3)).collect(),
            (1..=6).map(Ratio::from_integer).collect(),
        )
        .unwrap();
        let text = write_snapshot(&s, &w).unwrap();
        assert!(text.starts_with("3 2 1 full26 periodic=xz\n0 1/3 1\n"));
        let (s2, w2) = read_snapshot::<Ratio<i64>>(&text).unwrap();
        assert_eq!(s2, s);
        assert_eq!(w2, w);
    }

    #[test]
    fn snapshot_header_plain() {
        let s = spec(2, 1, 1);
        let w = CellWeights::uniform(2, 1.0f64).unwrap();
        assert_eq!(
            write_snapshot(&s, &w).unwrap(),
            "2 1 1 face6\n0 1 1\n1 1 1\n"
        );
        assert!(read_snapshot::<f64>("2 1 1 face6\n0 1 1\n").is_err());
        assert!(read_snapshot::<f64>("2 1 1 face6\n0 1 1\n2 1 1\n").is_err());
    }

    #[test]
    fn parse_dims_forms() {
        assert_eq!(parse_dims("32x32x16").unwrap(), [32, 32, 16]);
        assert!(parse_dims("32x32").is_err());
        assert!(parse_dims("4xax2").is_err());
    }
}

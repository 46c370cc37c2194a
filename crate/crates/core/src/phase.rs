//! Phase maps over the (lead, cost) plane.
//!
//! Cells are classified at their centers. Rows are indexed by the lead and
//! columns by the cost; storage and CSV output are row-major.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{classify_world, World};
use crate::error::{ModelError, Result};
use crate::game::{
    check_race_safety, check_sigma, check_winner_advantage, GameParams, DEFAULT_RACE_SAFETY,
};
use crate::scalar::Scalar;
use crate::thresholds::{threshold_curve, ThresholdCurveSample, ThresholdKind};

/// Environment variable capping sweep parallelism; unset or 0 leaves the
/// choice to the thread pool.
pub const THREADS_ENV: &str = "RACEWORLDS_THREADS";

pub const DEFAULT_DELTA_STEPS: usize = 201;
pub const DEFAULT_COST_STEPS: usize = 301;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec<T> {
    pub delta_min: T,
    pub delta_max: T,
    pub delta_steps: usize,
    pub c_min: T,
    pub c_max: T,
    pub c_steps: usize,
    pub winner_advantage: T,
    pub sigma: T,
    pub s_race: T,
}

impl<T: Scalar> Default for SweepSpec<T> {
    fn default() -> Self {
        SweepSpec {
            delta_min: T::zero(),
            delta_max: T::one(),
            delta_steps: DEFAULT_DELTA_STEPS,
            c_min: T::zero(),
            c_max: T::lit(15.0),
            c_steps: DEFAULT_COST_STEPS,
            winner_advantage: T::one(),
            sigma: T::lit(0.1),
            s_race: T::lit(DEFAULT_RACE_SAFETY),
        }
    }
}

impl<T: Scalar> SweepSpec<T> {
    /// Default axes and grid with the given winner's advantage and uncertainty.
    pub fn regime(winner_advantage: T, sigma: T) -> Self {
        SweepSpec {
            winner_advantage,
            sigma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta_min, self.delta_max, self.c_min, self.c_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(ModelError::Sweep("axis bounds must be finite".into()));
        }
        if self.delta_min < T::zero() || !(self.delta_min < self.delta_max) {
            return Err(ModelError::Sweep(format!(
                "need 0 <= delta_min < delta_max, got [{}, {}]",
                self.delta_min, self.delta_max
            )));
        }
        if self.c_min < T::zero() || !(self.c_min < self.c_max) {
            return Err(ModelError::Sweep(format!(
                "need 0 <= c_min < c_max, got [{}, {}]",
                self.c_min, self.c_max
            )));
        }
        if self.delta_steps < 2 || self.c_steps < 2 {
            return Err(ModelError::Sweep(format!(
                "need at least 2 steps per axis, got {}x{}",
                self.delta_steps, self.c_steps
            )));
        }
        check_winner_advantage(self.winner_advantage)?;
        check_sigma(self.sigma)?;
        check_race_safety(self.s_race)
    }

    fn center(min: T, max: T, steps: usize, i: usize) -> T {
        let half = T::lit(0.5);
        let idx = T::from_usize(i).expect("index fits");
        let n = T::from_usize(steps).expect("step count fits");
        min + (idx + half) * (max - min) / n
    }

    pub fn delta_at(&self, i: usize) -> T {
        Self::center(self.delta_min, self.delta_max, self.delta_steps, i)
    }

    pub fn cost_at(&self, j: usize) -> T {
        Self::center(self.c_min, self.c_max, self.c_steps, j)
    }

    pub fn delta_grid(&self) -> Vec<T> {
        (0..self.delta_steps).map(|i| self.delta_at(i)).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.delta_steps * self.c_steps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid<T> {
    spec: SweepSpec<T>,
    cells: Vec<World>,
    curves: Vec<Vec<ThresholdCurveSample<T>>>,
}

impl<T: Scalar> PhaseGrid<T> {
    /// Grid with caller-provided labels, row-major by lead. Curves are still
    /// sampled from the spec.
    pub fn from_cells(spec: SweepSpec<T>, cells: Vec<World>) -> Result<Self> {
        spec.validate()?;
        if cells.len() != spec.cell_count() {
            return Err(ModelError::Sweep(format!(
                "expected {} cells, got {}",
                spec.cell_count(),
                cells.len()
            )));
        }
        let curves = sample_curves(&spec)?;
        Ok(PhaseGrid {
            spec,
            cells,
            curves,
        })
    }

    pub fn spec(&self) -> &SweepSpec<T> {
        &self.spec
    }

    pub fn cells(&self) -> &[World] {
        &self.cells
    }

    /// Label at lead index `i`, cost index `j`.
    pub fn cell(&self, i: usize, j: usize) -> World {
        self.cells[i * self.spec.c_steps + j]
    }

    /// Label of the cell whose area contains `(delta, cost)`, if inside the grid.
    pub fn cell_containing(&self, delta: T, cost: T) -> Option<World> {
        let locate = |v: T, min: T, max: T, steps: usize| {
            if v < min || v > max {
                return None;
            }
            let n = T::from_usize(steps)?;
            let k = ((v - min) / (max - min) * n).floor().to_usize()?;
            Some(k.min(steps - 1))
        };
        let s = &self.spec;
        let i = locate(delta, s.delta_min, s.delta_max, s.delta_steps)?;
        let j = locate(cost, s.c_min, s.c_max, s.c_steps)?;
        Some(self.cell(i, j))
    }

    pub fn curve(&self, kind: ThresholdKind) -> &[ThresholdCurveSample<T>] {
        let idx = ThresholdKind::ALL
            .iter()
            .position(|k| *k == kind)
            .expect("known kind");
        &self.curves[idx]
    }
}

fn sample_curves<T: Scalar>(spec: &SweepSpec<T>) -> Result<Vec<Vec<ThresholdCurveSample<T>>>> {
    let grid = spec.delta_grid();
    ThresholdKind::ALL
        .iter()
        .map(|&kind| threshold_curve(kind, &grid, spec.winner_advantage, spec.sigma, spec.s_race))
        .collect()
}

/// Thread cap from [`THREADS_ENV`]; `None` when unset, zero or unparsable.
pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Classifies every cell center of the spec, honoring [`THREADS_ENV`].
pub fn sweep<T: Scalar>(spec: &SweepSpec<T>) -> Result<PhaseGrid<T>> {
    sweep_with_threads(spec, thread_cap_from_env())
}

/// Rows are classified in parallel; the result is independent of the thread
/// count.
pub fn sweep_with_threads<T: Scalar>(
    spec: &SweepSpec<T>,
    threads: Option<usize>,
) -> Result<PhaseGrid<T>> {
    spec.validate()?;
    let row = |i: usize| -> Result<Vec<World>> {
        let base = GameParams::new(
            spec.delta_at(i),
            spec.winner_advantage,
            spec.c_min,
            spec.sigma,
            spec.s_race,
        )?;
        (0..spec.c_steps)
            .map(|j| Ok(classify_world(&base.with_cost(spec.cost_at(j))?)))
            .collect()
    };
    let classify_all =
        || -> Result<Vec<Vec<World>>> { (0..spec.delta_steps).into_par_iter().map(row).collect() };
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ModelError::Sweep(format!("thread pool: {e}")))?
            .install(classify_all)?,
        None => classify_all()?,
    };
    let cells = rows.into_iter().flatten().collect();
    Ok(PhaseGrid {
        spec: *spec,
        cells,
        curves: sample_curves(spec)?,
    })
}

/// Fraction of grid cells carrying each label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionAreas {
    fractions: [f64; World::ALL.len()],
}

impl RegionAreas {
    pub fn fraction(&self, world: World) -> f64 {
        self.fractions[world_index(world)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (World, f64)> + '_ {
        World::ALL.into_iter().map(|w| (w, self.fraction(w)))
    }

    pub fn total(&self) -> f64 {
        self.fractions.iter().sum()
    }
}

impl Serialize for RegionAreas {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_map(self.iter().map(|(w, f)| (w.name(), f)))
    }
}

fn world_index(world: World) -> usize {
    World::ALL
        .iter()
        .position(|w| *w == world)
        .expect("listed world")
}

pub fn region_areas<T: Scalar>(grid: &PhaseGrid<T>) -> RegionAreas {
    let mut counts = [0usize; World::ALL.len()];
    for w in &grid.cells {
        counts[world_index(*w)] += 1;
    }
    let total = grid.cells.len() as f64;
    RegionAreas {
        fractions: counts.map(|c| c as f64 / total),
    }
}

/// Decimal with 9 significant digits, printed as the shortest string that
/// round-trips the rounded value.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Writes `delta,cost,world` rows in row-major order.
pub fn emit_csv<T: Scalar, W: Write>(grid: &PhaseGrid<T>, mut sink: W) -> io::Result<()> {
    let spec = &grid.spec;
    let mut out = String::with_capacity(32 * (grid.cells.len() + 1));
    out.push_str("delta,cost,world\n");
    for i in 0..spec.delta_steps {
        let delta = format_sig9(spec.delta_at(i).as_f64());
        for j in 0..spec.c_steps {
            out.push_str(&delta);
            out.push(',');
            out.push_str(&format_sig9(spec.cost_at(j).as_f64()));
            out.push(',');
            out.push_str(grid.cell(i, j).name());
            out.push('\n');
        }
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()
}

/// Light fills of the four worlds; degenerate labels are gray.
pub fn world_fill(world: World) -> &'static str {
    match world {
        World::SafeHarmony => "#ccffcc",
        World::Trust => "#ffffcc",
        World::Subversion => "#ffe6cc",
        World::Preemption => "#ffcccc",
        World::ReverseSubversion | World::AntiCoordination | World::NoPureEquilibrium => "#d9d9d9",
    }
}

fn curve_style(kind: ThresholdKind) -> (&'static str, &'static str) {
    match kind {
        ThresholdKind::LaggardCooperation => ("#ff0000", ""),
        ThresholdKind::FrontrunnerUnilateralBreak => ("#0000ff", ""),
        ThresholdKind::LaggardUnilateralBreak => ("#ff8000", " stroke-dasharray=\"6 3\""),
        ThresholdKind::FrontrunnerCooperation => ("#009900", " stroke-dasharray=\"1.5 2.5\""),
    }
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// Standalone SVG: one rectangle per cell, the four threshold curves, axes
/// and a legend. Coordinates are printed with three decimals.
pub fn render_svg<T: Scalar, W: Write>(grid: &PhaseGrid<T>, mut sink: W) -> io::Result<()> {
    use std::fmt::Write as _;

    let spec = &grid.spec;
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let (d0, d1) = (spec.delta_min.as_f64(), spec.delta_max.as_f64());
    let (c0, c1) = (spec.c_min.as_f64(), spec.c_max.as_f64());
    let x_of = |d: f64| MARGIN_LEFT + (d - d0) / (d1 - d0) * plot_w;
    let y_of = |c: f64| MARGIN_TOP + (c1 - c) / (c1 - c0) * plot_h;
    let cw = plot_w / spec.delta_steps as f64;
    let ch = plot_h / spec.c_steps as f64;

    let mut s = String::with_capacity(96 * grid.cells.len() + 4096);
    // fmt::Write into a String cannot fail
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(s, "<g shape-rendering=\"crispEdges\" stroke=\"none\">");
    for i in 0..spec.delta_steps {
        let x = MARGIN_LEFT + i as f64 * cw;
        for j in 0..spec.c_steps {
            let y = MARGIN_TOP + (spec.c_steps - 1 - j) as f64 * ch;
            let _ = writeln!(
                s,
                "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{cw:.3}\" height=\"{ch:.3}\" fill=\"{}\"/>",
                world_fill(grid.cell(i, j))
            );
        }
    }
    let _ = writeln!(s, "</g>");

    for kind in ThresholdKind::ALL {
        let (color, dash) = curve_style(kind);
        let points: Vec<String> = grid
            .curve(kind)
            .iter()
            .map(|p| {
                let c = p.c_star.as_f64().clamp(c0, c1);
                format!("{:.3},{:.3}", x_of(p.delta.as_f64()), y_of(c))
            })
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>",
            points.join(" ")
        );
    }

    // axes
    let (xl, xr, yt, yb) = (x_of(d0), x_of(d1), y_of(c1), y_of(c0));
    let _ = writeln!(
        s,
        "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"1\" points=\"{xl:.3},{yt:.3} {xl:.3},{yb:.3} {xr:.3},{yb:.3}\"/>"
    );
    for k in 0..=5 {
        let d = d0 + (d1 - d0) * k as f64 / 5.0;
        let x = x_of(d);
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"1\" points=\"{x:.3},{yb:.3} {x:.3},{:.3}\"/>",
            yb + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            yb + 18.0,
            format_sig9(d)
        );
    }
    for k in 0..=3 {
        let c = c0 + (c1 - c0) * k as f64 / 3.0;
        let y = y_of(c);
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"1\" points=\"{:.3},{y:.3} {xl:.3},{y:.3}\"/>",
            xl - 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            xl - 8.0,
            y + 4.0,
            format_sig9(c)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">Relative Capability Lead (\u{394})</text>",
        (xl + xr) / 2.0,
        SVG_HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{0:.3}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.3})\">Catastrophic Cost (C)</text>",
        (yt + yb) / 2.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.3}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">W={}, \u{3c3}={}, s={}</text>",
        (xl + xr) / 2.0,
        format_sig9(spec.winner_advantage.as_f64()),
        format_sig9(spec.sigma.as_f64()),
        format_sig9(spec.s_race.as_f64())
    );

    // legend
    let lx = xr + 15.0;
    let mut ly = yt + 5.0;
    for world in World::CANONICAL {
        let _ = writeln!(
            s,
            "<rect x=\"{lx:.3}\" y=\"{ly:.3}\" width=\"12\" height=\"12\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"0.5\"/>",
            world_fill(world)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            lx + 18.0,
            ly + 10.0,
            world.name()
        );
        ly += 18.0;
    }
    ly += 8.0;
    for kind in [
        ThresholdKind::LaggardCooperation,
        ThresholdKind::FrontrunnerUnilateralBreak,
        ThresholdKind::LaggardUnilateralBreak,
        ThresholdKind::FrontrunnerCooperation,
    ] {
        let (color, dash) = curve_style(kind);
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{lx:.3},{:.3} {:.3},{:.3}\"/>",
            ly + 6.0,
            lx + 14.0,
            ly + 6.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            lx + 18.0,
            ly + 10.0,
            kind.code()
        );
        ly += 18.0;
    }
    let _ = writeln!(s, "</svg>");
    sink.write_all(s.as_bytes())?;
    sink.flush()
}

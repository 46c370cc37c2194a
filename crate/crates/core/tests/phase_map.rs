use std::collections::BTreeSet;

use raceworlds::phase::{sweep_with_threads, world_fill};
use raceworlds::{
    classify_world, emit_csv, region_areas, render_svg, sweep, Params, Sweep, ThresholdKind, World,
};

fn fig1() -> Sweep {
    Sweep::regime(1.0, 0.1)
}

fn fills(svg: &str) -> BTreeSet<&'static str> {
    World::ALL
        .into_iter()
        .map(world_fill)
        // cell rects carry no stroke; legend swatches do
        .filter(|c| svg.contains(&format!("fill=\"{c}\"/>")))
        .collect()
}

#[test]
fn figure_points_land_in_their_worlds() {
    let grid = sweep(&fig1()).unwrap();
    let expect = [
        (0.05, 4.0, World::Trust),
        (0.12, 1.0, World::Preemption),
        (0.6, 2.0, World::Subversion),
        (0.5, 10.0, World::SafeHarmony),
    ];
    for (d, c, world) in expect {
        assert_eq!(grid.cell_containing(d, c), Some(world), "({d}, {c})");
    }
}

#[test]
fn every_cell_matches_direct_classification() {
    let spec = Sweep {
        delta_steps: 37,
        c_steps: 41,
        ..fig1()
    };
    let grid = sweep(&spec).unwrap();
    for i in 0..spec.delta_steps {
        for j in 0..spec.c_steps {
            let p = Params::new(spec.delta_at(i), 1.0, spec.cost_at(j), 0.1, 0.85).unwrap();
            assert_eq!(grid.cell(i, j), classify_world(&p));
        }
    }
}

#[test]
fn figure_one_has_all_four_worlds() {
    let areas = region_areas(&sweep(&fig1()).unwrap());
    for world in World::CANONICAL {
        assert!(areas.fraction(world) > 0.0, "{world:?}");
    }
    assert!((areas.total() - 1.0).abs() < 1e-12);
    assert!((areas.fraction(World::SafeHarmony) - 0.714831).abs() < 1e-6);
}

#[test]
fn zero_winner_advantage_is_uniform() {
    let grid = sweep(&Sweep::regime(0.0, 0.1)).unwrap();
    assert!(grid.cells().iter().all(|&w| w == World::SafeHarmony));
    let mut svg = Vec::new();
    render_svg(&grid, &mut svg).unwrap();
    assert_eq!(fills(&String::from_utf8(svg).unwrap()).len(), 1);
}

#[test]
fn regime_shifts_move_the_regions() {
    let base = region_areas(&sweep(&fig1()).unwrap());
    let noisy = region_areas(&sweep(&Sweep::regime(1.0, 0.2)).unwrap());
    let shared = region_areas(&sweep(&Sweep::regime(0.7, 0.1)).unwrap());
    assert!(noisy.fraction(World::Preemption) < base.fraction(World::Preemption));
    assert!(shared.fraction(World::SafeHarmony) > base.fraction(World::SafeHarmony));
}

#[test]
fn curves_bound_the_regions() {
    let grid = sweep(&fig1()).unwrap();
    let spec = *grid.spec();
    let lc = grid.curve(ThresholdKind::LaggardCooperation);
    let fub = grid.curve(ThresholdKind::FrontrunnerUnilateralBreak);
    assert_eq!(lc.len(), spec.delta_steps);
    for i in 0..spec.delta_steps {
        assert_eq!(lc[i].delta, spec.delta_at(i));
        for j in 0..spec.c_steps {
            let c = spec.cost_at(j);
            if c < fub[i].c_star.min(lc[i].c_star) {
                assert_eq!(grid.cell(i, j), World::Preemption);
            }
            if c >= lc[i].c_star.max(fub[i].c_star) {
                assert_ne!(grid.cell(i, j), World::Preemption);
            }
        }
    }
}

#[test]
fn artifacts_are_byte_identical_across_thread_counts() {
    let spec = fig1();
    let render = |threads| {
        let grid = sweep_with_threads(&spec, threads).unwrap();
        let (mut csv, mut svg) = (Vec::new(), Vec::new());
        emit_csv(&grid, &mut csv).unwrap();
        render_svg(&grid, &mut svg).unwrap();
        (csv, svg)
    };
    let single = render(Some(1));
    assert_eq!(single, render(Some(3)));
    assert_eq!(single, render(None));

    let csv = String::from_utf8(single.0).unwrap();
    assert_eq!(csv.lines().next(), Some("delta,cost,world"));
    assert_eq!(csv.lines().count(), 1 + spec.cell_count());
    let svg = String::from_utf8(single.1).unwrap();
    assert_eq!(fills(&svg).len(), 4);
    for stroke in ["#ff0000", "#0000ff", "#ff8000", "#009900"] {
        assert_eq!(
            svg.matches(&format!("stroke=\"{stroke}\"")).count(),
            2,
            "{stroke}"
        );
    }
}

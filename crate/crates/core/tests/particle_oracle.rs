use mcvd_core::geometry::Far;
use mcvd_core::particle::{
    binomial_band, empirical_hitting, error_map, simulate, CellStatus, SimConfig, Stepping,
};
use mcvd_core::{Scenario, SeriesConfig};

const A: f64 = 5.0;
const D: f64 = 100.0;

/// One receiver at distance `r` with the other 10⁶·a away behind the origin.
fn lone(r: f64) -> Scenario {
    Scenario::default().with_positions([r, 0.0, 0.0], [-1e6 * A, 0.0, 0.0])
}

fn single_sphere(r: f64, t: f64) -> f64 {
    A / r * libm::erfc((r - A) / (4.0 * D * t).sqrt())
}

fn far1_curve(s: &Scenario, cfg: &SimConfig, grid: &[f64]) -> Vec<f64> {
    empirical_hitting(&simulate(s, cfg).unwrap(), grid).far1
}

#[test]
fn single_sphere_matches_closed_form() {
    let grid = [2.0, 5.0, 10.0, 20.0];
    let n = 100_000;
    let emp = far1_curve(&lone(30.0), &SimConfig::new(n, 20.0, 11), &grid);
    for (t, e) in grid.iter().zip(emp) {
        let p = single_sphere(30.0, *t);
        // Discrete-time checking misses a few crossings; 0.003 covers dt = 1e-4.
        assert!((e - p).abs() <= binomial_band(p, n) + 0.003, "t={t}: {e} vs {p}");
    }
}

#[test]
fn discretisation_bias_shrinks_with_dt() {
    let n = 100_000;
    let p = single_sphere(30.0, 10.0);
    let mut coarse = SimConfig::new(n, 10.0, 5);
    coarse.dt = 1e-3;
    let fine = SimConfig::new(n, 10.0, 5);
    let e_coarse = far1_curve(&lone(30.0), &coarse, &[10.0])[0];
    let e_fine = far1_curve(&lone(30.0), &fine, &[10.0])[0];
    assert!(e_coarse < p, "coarse steps miss crossings: {e_coarse} vs {p}");
    assert!((e_fine - p).abs() < (e_coarse - p).abs(), "{e_fine} {e_coarse} {p}");
}

#[test]
fn fused_steps_agree_with_every_step() {
    let s = Scenario::default();
    let n = 4000;
    let mut every = SimConfig::new(n, 10.0, 21);
    every.dt = 1e-3;
    every.stepping = Stepping::Every;
    let fused = SimConfig { seed: 22, stepping: Stepping::Adaptive, ..every };
    let grid = [2.0, 5.0, 10.0];
    let a = empirical_hitting(&simulate(&s, &every).unwrap(), &grid);
    let b = empirical_hitting(&simulate(&s, &fused).unwrap(), &grid);
    for far in Far::BOTH {
        for (x, y) in a.curve(far).iter().zip(b.curve(far)) {
            let pooled = (x + y) / 2.0;
            let se = (2.0 * pooled * (1.0 - pooled) / n as f64).sqrt();
            assert!((x - y).abs() <= 4.0 * se, "{far}: {x} vs {y}");
        }
    }
}

#[test]
fn same_seed_same_records() {
    let s = Scenario::default();
    let cfg = SimConfig::new(500, 5.0, 3);
    assert_eq!(simulate(&s, &cfg).unwrap(), simulate(&s, &cfg).unwrap());
    let other = SimConfig { seed: 4, ..cfg };
    assert_ne!(simulate(&s, &cfg).unwrap(), simulate(&s, &other).unwrap());
}

#[test]
fn error_map_cells() {
    let template = Scenario::default().with_positions([30.0, 0.0, 0.0], [0.0; 3]);
    let positions = [
        [30.0, 20.0, 0.0],  // valid region
        [0.0, -30.0, 0.0],  // valid region
        [1e6 * A, 0.0, 0.0], // effectively alone
        [30.0, 8.0, 0.0],   // overlaps FAR1
    ];
    let sim = SimConfig::new(20_000, 10.0, 8);
    let cells = error_map(&template, &positions, 10.0, &sim, SeriesConfig::default(), None).unwrap();
    assert_eq!(cells[3].status, CellStatus::Skipped);
    for cell in &cells[..3] {
        let CellStatus::Computed { abs_error, approx_valid, analytic, .. } = cell.status else {
            panic!("cell {:?} skipped", cell.pos2);
        };
        assert!(approx_valid);
        assert!(abs_error <= binomial_band(analytic, 20_000) + 0.003, "{cell:?}");
    }
    let CellStatus::Computed { analytic, .. } = cells[2].status else { unreachable!() };
    assert!((analytic - single_sphere(30.0, 10.0)).abs() < 1e-12);
}

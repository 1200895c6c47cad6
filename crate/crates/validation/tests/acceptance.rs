//! Acceptance criteria, run by a plain `main` so every verdict is printed:
//! one `PASS`/`FAIL` line per criterion followed by indented details. Exits
//! nonzero if any criterion fails. Positional arguments filter by name.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use mcvd_core::channel::SplitComparison;
use mcvd_core::detection::{auc_closed_form, auc_complement, auc_empirical, auc_numeric};
use mcvd_core::geometry::{Far, FarGeometry};
use mcvd_core::link::{
    class_moments, hypothesis_stats, joint_stats, simulate_joint_link, simulate_link, HypothesisStats,
    JointSample, LinkSample, Receiver,
};
use mcvd_core::particle::{empirical_hitting, simulate_on, SimConfig};
use mcvd_core::{Channel, Error, Scenario, SeriesConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const A: f64 = 5.0;
const D: f64 = 100.0;

struct Verdict {
    id: u32,
    title: &'static str,
    details: Vec<String>,
    ok: bool,
}

impl Verdict {
    fn new(id: u32, title: &'static str) -> Self {
        Verdict { id, title, details: Vec::new(), ok: true }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.ok = false;
        }
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, detail: String) {
        self.details.push(format!("     {detail}"));
    }

    fn print(&self) {
        println!(
            "{} criterion {}: {}",
            if self.ok { "PASS" } else { "FAIL" },
            self.id,
            self.title
        );
        for d in &self.details {
            println!("    {d}");
        }
    }
}

fn channel(pos1: [f64; 3], pos2: [f64; 3]) -> Channel {
    let geom = FarGeometry::from_positions(pos1, pos2, A).unwrap();
    Channel::new(geom, D, SeriesConfig::default()).unwrap()
}

fn criterion_01_two_receiver_particle_agreement() -> Verdict {
    let mut v = Verdict::new(1, "two-receiver hitting probability vs particle simulation");
    let scenario = Scenario::default().with_positions([30.0, 0.0, 0.0], [30.0, 15.0, 0.0]);
    let ch = Channel::from_scenario(&scenario, SeriesConfig::default()).unwrap();
    let mut cfg = SimConfig::new(100_000, 20.0, 1);
    cfg.dt = 1e-4;
    let start = Instant::now();
    let records = simulate_on(&scenario, &cfg, None).unwrap();
    let grid = [5.0, 10.0, 15.0, 20.0];
    let curves = empirical_hitting(&records, &grid);
    v.note(format!("1e5 particles, dt=1e-4, {:.1} s", start.elapsed().as_secs_f64()));

    for far in Far::BOTH {
        let mut last_gap = 0.0;
        for (i, &t) in grid.iter().enumerate() {
            let p2 = ch.p2_hit(far, t);
            let p1 = ch.p1_hit(far, t);
            let err = (p2 - curves.curve(far)[i]).abs();
            v.check(err <= 0.01, format!("{far} t={t}: |analytic - empirical| = {err:.5} (<= 0.01)"));
            let gap = p1 - p2;
            v.check(
                gap > 0.0 && gap > last_gap,
                format!("{far} t={t}: p1 - p2 = {gap:.5}, widening"),
            );
            last_gap = gap;
        }
    }
    v
}

fn criterion_02_far_apart_decoupling() -> Verdict {
    let mut v = Verdict::new(2, "far-apart receivers decouple");
    let x1 = [-30.0, -10.0, 0.0];
    let ch = channel(x1, [100.0, 40.0, 0.0]);
    for far in Far::BOTH {
        let gap = (ch.p2_hit(far, 20.0) - ch.p1_hit(far, 20.0)).abs();
        v.check(gap <= 0.005, format!("{far} t=20: |p2 - p1| = {gap:.2e} (<= 0.005)"));
    }

    let r = 1e6 * A;
    let ch = channel(x1, [x1[0] + r, x1[1], x1[2]]);
    let worst = [1.0, 5.0, 10.0, 20.0]
        .iter()
        .flat_map(|&t| Far::BOTH.map(|f| (ch.p2_hit(f, t) - ch.p1_hit(f, t)).abs()))
        .fold(0.0, f64::max);
    v.check(worst <= 1e-10, format!("R = 1e6 a, t <= 20: max |p2 - p1| = {worst:.2e} (<= 1e-10)"));
    v
}

fn criterion_03_equidistant_symmetry() -> Verdict {
    let mut v = Verdict::new(3, "equidistant receivers are symmetric");
    let r = 20.0;
    let bound = 2.0 * (A / r).asin().to_degrees();
    let mut skipped = 0;
    let mut worst_far = 0.0_f64;
    let mut worst_total = 0.0_f64;
    for deg in 20..=180 {
        let half = (deg as f64 / 2.0).to_radians();
        let (c, s) = (r * half.cos(), r * half.sin());
        let geom = FarGeometry::from_positions([c, s, 0.0], [c, -s, 0.0], A).unwrap();
        match Channel::new(geom, D, SeriesConfig::default()) {
            Err(Error::Geometry(_)) => {
                skipped += 1;
                v.check((deg as f64) < bound, format!("phi={deg} deg rejected as overlapping"));
            }
            Err(e) => panic!("unexpected error at {deg}: {e}"),
            Ok(ch) => {
                for t in [0.5, 2.0, 10.0, 100.0] {
                    let p1 = ch.p2_hit(Far::First, t);
                    let p2 = ch.p2_hit(Far::Second, t);
                    worst_far = worst_far.max((p1 - p2).abs());
                    worst_total = worst_total.max((ch.p_total(t) - 2.0 * p1).abs());
                }
            }
        }
    }
    v.note(format!("angles below {bound:.2} deg overlap; {skipped} skipped"));
    v.check(worst_far == 0.0, format!("max |p2_far1 - p2_far2| = {worst_far:e}"));
    v.check(worst_total == 0.0, format!("max |p_total - 2 p2_far1| = {worst_total:e}"));
    v
}

/// Uniform random geometry with r1, r2, R all at least 3a.
fn random_valid_geometry(rng: &mut ChaCha8Rng) -> FarGeometry {
    loop {
        let r1 = rng.random_range(3.0 * A..60.0);
        let r2 = rng.random_range(3.0 * A..60.0);
        let phi = rng.random_range(0.0..PI);
        let g = FarGeometry::from_positions([r1, 0.0, 0.0], [r2 * phi.cos(), r2 * phi.sin(), 0.0], A).unwrap();
        if g.approx_valid && g.distance >= 3.0 * A {
            return g;
        }
    }
}

fn criterion_04_eventual_limits() -> Verdict {
    let mut v = Verdict::new(4, "eventual hitting probability and reduction identity");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = 1e6;
    let (mut worst_gap, mut worst_tail, mut worst_identity) = (0.0_f64, f64::INFINITY, 0.0_f64);
    for _ in 0..100 {
        let g = random_valid_geometry(&mut rng);
        let ch = Channel::new(g, D, SeriesConfig::default()).unwrap();
        for far in Far::BOTH {
            worst_gap = worst_gap.max((ch.p2_hit(far, t) - ch.p2_eventual(far)).abs());
            let r = g.radial(far);
            // Leading term of p1(inf) - p1(t) for large t.
            worst_tail = worst_tail.min(A / r * (r - A) / (PI * D * t).sqrt());
            let identity = ch.reduction_eventual(far) - (ch.p1_eventual(far) - ch.p2_eventual(far));
            worst_identity = worst_identity.max(identity.abs());
        }
    }
    v.check(
        worst_gap <= 1e-4,
        format!("t=1e6: max |p2_hit - p2_eventual| = {worst_gap:.3e} (<= 1e-4)"),
    );
    v.note(format!(
        "smallest single-receiver tail (a/r)(r-a)/sqrt(pi D t) in the sample = {worst_tail:.3e}"
    ));
    v.check(worst_identity <= 1e-12, format!("max reduction identity residual = {worst_identity:.2e} (<= 1e-12)"));
    v
}

fn criterion_05_tap_conservation() -> Verdict {
    let mut v = Verdict::new(5, "tap conservation");
    let ch = channel([30.0, 0.0, 0.0], [30.0, 15.0, 0.0]);
    for far in Far::BOTH {
        let taps = ch.taps(far, 1.0, 10_000);
        let sums = taps.partial_sums();
        let worst = sums
            .iter()
            .enumerate()
            .map(|(n, s)| (s - ch.p2_hit(far, (n + 1) as f64)).abs())
            .fold(0.0, f64::max);
        v.check(worst <= 1e-12, format!("{far}: max |partial sum - p2_hit(n Ts)| = {worst:.2e} (<= 1e-12)"));
        let total = sums[sums.len() - 1];
        let short = ch.p2_eventual(far) - total;
        v.check(
            short.abs() <= 1e-4,
            format!("{far}: p2_eventual - sum(taps, L=1e4) = {short:.3e} (<= 1e-4)"),
        );
        let r = ch.geometry().radial(far);
        v.note(format!(
            "{far}: single-receiver tail at t=1e4 is {:.3e}",
            A / r * (r - A) / (PI * D * 1e4).sqrt()
        ));
    }
    v
}

fn criterion_06_split_receiver_gain() -> Verdict {
    let mut v = Verdict::new(6, "gain of two half-volume receivers");
    let (x1, x2) = ([25.0, 0.0, 0.0], [-25.0, 0.0, 0.0]);
    let cmp = SplitComparison::new(x1, x2, A, D, SeriesConfig::default()).unwrap();
    let (mut below, mut above_after_below, mut worst) = (false, false, 0.0_f64);
    for k in 0..=250 {
        let t = 0.1 * 10f64.powf(k as f64 * 5.0 / 250.0);
        let p = cmp.at(t);
        if let Some(g) = p.gain {
            worst = worst.max(g);
            if g < 1.0 {
                below = true;
            } else if below && g > 1.0 {
                above_after_below = true;
            }
        }
    }
    v.check(worst < SQRT_2, format!("max gain on [0.1, 1e4] = {worst:.5} (< sqrt 2)"));
    v.check(below && above_after_below, "gain crosses from below 1 to above 1".into());

    // Opposite placement: the far point of the other receiver is r + (r - b) away.
    let b = A / SQRT_2;
    let r_ij = 25.0 + (25.0 - b);
    let expected = 2.0 * r_ij / (SQRT_2 * r_ij + A);
    let g = cmp.at(1e6).gain.unwrap();
    v.check(
        (g - expected).abs() <= 1e-3,
        format!("gain(1e6) = {g:.5}, 2R/(sqrt2 R + a) = {expected:.5} (|diff| <= 1e-3)"),
    );
    v
}

fn fig4a(n: u64) -> Scenario {
    Scenario {
        pos1: [20.0, 5.0, 0.0],
        pos2: [-25.0, -10.0, 0.0],
        slot_duration: 5.0,
        slots: 10,
        molecules_per_bit: n,
        bit_prior: 0.5,
        noise_mean: 5.0,
        noise_var: 5.0,
        ..Scenario::default()
    }
}

fn criterion_07_hypothesis_statistics() -> Verdict {
    let mut v = Verdict::new(7, "hypothesis statistics vs link Monte-Carlo");
    let scenario = fig4a(1000);
    let ch = Channel::from_scenario(&scenario, SeriesConfig::default()).unwrap();
    for (k, far) in Far::BOTH.into_iter().enumerate() {
        let taps = ch.taps(far, scenario.slot_duration, scenario.slots);
        let stats = hypothesis_stats(&taps, &scenario, scenario.slots).unwrap();
        let samples = simulate_link(&taps, &scenario, scenario.slots, 1_000_000, 70 + k as u64).unwrap();
        for (bit, mu, var) in [(0u8, stats.mu0, stats.var0), (1, stats.mu1, stats.var1)] {
            let m = class_moments(&samples, bit).unwrap();
            let zm = (m.mean - mu) / m.se_mean;
            let zv = (m.var - var) / m.se_var;
            v.check(
                zm.abs() <= 3.0,
                format!("{far} b={bit}: mean {:.4} vs {mu:.4}, {zm:+.2} SE", m.mean),
            );
            v.check(
                zv.abs() <= 3.0,
                format!("{far} b={bit}: variance {:.4} vs {var:.4}, {zv:+.2} SE", m.var),
            );
        }
    }
    v
}

/// First `per_class` samples of each class.
fn balanced(samples: impl Iterator<Item = LinkSample>, per_class: usize) -> Vec<LinkSample> {
    let mut counts = [0usize; 2];
    let mut out = Vec::with_capacity(2 * per_class);
    for s in samples {
        let c = &mut counts[s.true_bit as usize];
        if *c < per_class {
            *c += 1;
            out.push(s);
        }
    }
    assert_eq!(counts, [per_class; 2], "not enough trials for {per_class} per class");
    out
}

fn receiver_label(rx: Receiver) -> String {
    match rx {
        Receiver::Single(f) => f.to_string(),
        Receiver::Joint => "joint".into(),
    }
}

fn criterion_08_auc_agreement() -> Verdict {
    let mut v = Verdict::new(8, "AUC closed form, quadrature and Monte-Carlo agree");
    let grid = [100, 200, 400, 600, 800, 1000, 1500, 2000];
    let receivers = [Receiver::Joint, Receiver::Single(Far::First), Receiver::Single(Far::Second)];
    let mut previous: Option<[f64; 3]> = None;
    let (mut worst_closed, mut worst_mc) = (0.0_f64, 0.0_f64);
    for (k, &n) in grid.iter().enumerate() {
        let scenario = fig4a(n);
        let ch = Channel::from_scenario(&scenario, SeriesConfig::default()).unwrap();
        let t1 = ch.taps(Far::First, scenario.slot_duration, scenario.slots);
        let t2 = ch.taps(Far::Second, scenario.slot_duration, scenario.slots);
        let s1 = hypothesis_stats(&t1, &scenario, scenario.slots).unwrap();
        let s2 = hypothesis_stats(&t2, &scenario, scenario.slots).unwrap();
        let sj = joint_stats(&s1, &s2).unwrap();
        let joint: Vec<JointSample> =
            simulate_joint_link(&t1, &t2, &scenario, scenario.slots, 220_000, 800 + k as u64, None).unwrap();

        let mut aucs = [0.0; 3];
        for (i, (rx, stats)) in receivers.iter().zip([sj, s1, s2]).enumerate() {
            let numeric = auc_numeric(&stats).unwrap();
            let closed = auc_closed_form(&stats).unwrap();
            let emp = auc_empirical(&balanced(joint.iter().map(|s| s.receiver(*rx)), 100_000)).unwrap();
            let (dc, dm) = ((closed - numeric).abs(), (numeric - emp).abs());
            worst_closed = worst_closed.max(dc);
            worst_mc = worst_mc.max(dm);
            v.check(dc <= 0.01 && dm <= 0.01, format!(
                "N={n} {}: numeric {numeric:.6} closed {closed:.6} mc {emp:.6}",
                receiver_label(*rx)
            ));
            aucs[i] = numeric;
        }
        v.check(
            aucs[0] >= aucs[1] && aucs[1] >= aucs[2],
            format!("N={n}: joint >= FAR1 >= FAR2"),
        );
        if let Some(prev) = previous {
            let up = prev.iter().zip(&aucs).all(|(p, c)| c >= p);
            v.check(up, format!("N={n}: every AUC nondecreasing from previous N"));
        }
        previous = Some(aucs);
    }
    v.note(format!("max |closed - numeric| = {worst_closed:.2e}, max |numeric - mc| = {worst_mc:.2e}"));
    v
}

fn fig4b_stats(r: f64) -> (HypothesisStats, HypothesisStats) {
    let scenario = Scenario {
        pos1: [-10.0, 0.0, 0.0],
        pos2: [-10.0 + r, 0.0, 0.0],
        slot_duration: 1.0,
        slots: 10,
        molecules_per_bit: 1000,
        ..Scenario::default()
    };
    let ch = Channel::from_scenario(&scenario, SeriesConfig::default()).unwrap();
    let stats = |far| {
        let taps = ch.taps(far, scenario.slot_duration, scenario.slots);
        hypothesis_stats(&taps, &scenario, scenario.slots).unwrap()
    };
    (stats(Far::First), stats(Far::Second))
}

fn criterion_09_auc_versus_distance() -> Verdict {
    let mut v = Verdict::new(9, "AUC versus receiver spacing");
    let grid = [18.0, 19.0, 20.0, 22.0, 25.0, 30.0, 35.0, 40.0, 50.0, 60.0];
    // Close receivers push 1 - AUC below f64 resolution around 1, so the
    // strict decrease is checked on the complement.
    let (mut last_auc, mut last_miss) = (f64::INFINITY, 0.0);
    for r in grid {
        let (s1, s2) = fig4b_stats(r);
        let (a1, a2) = (auc_numeric(&s1).unwrap(), auc_numeric(&s2).unwrap());
        let (m1, m2) = (auc_complement(&s1).unwrap(), auc_complement(&s2).unwrap());
        v.check(
            a2 <= last_auc && m2 > last_miss,
            format!("R={r}: AUC1 {a1:.6} (1-AUC1 {m1:.3e}), AUC2 {a2:.6} (1-AUC2 {m2:.3e})"),
        );
        (last_auc, last_miss) = (a2, m2);
    }
    let (s1, s2) = fig4b_stats(20.0);
    let numeric = (auc_numeric(&s1).unwrap(), auc_numeric(&s2).unwrap());
    let closed = (auc_closed_form(&s1).unwrap(), auc_closed_form(&s2).unwrap());
    let miss = (auc_complement(&s1).unwrap(), auc_complement(&s2).unwrap());
    v.check(
        numeric.0 == numeric.1 && closed.0 == closed.1 && miss.0 == miss.1,
        format!("equidistant R=20: AUC1 == AUC2 (1-AUC {:.3e})", miss.0),
    );
    v
}

fn criterion_10_property_suites() -> Verdict {
    let mut v = Verdict::new(10, "monotonicity, truncation stability, seed determinism");
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let doubled = SeriesConfig { max_terms: 400, ..SeriesConfig::default() };
    let base = SeriesConfig::default();
    let bound = base.term_floor * base.max_terms as f64;
    let (mut violations, mut worst_trunc) = (0usize, 0.0_f64);
    for _ in 0..1000 {
        // Any overlap-free placement, not only the valid region.
        let g = loop {
            let r1 = rng.random_range(1.05 * A..80.0);
            let r2 = rng.random_range(1.05 * A..80.0);
            let phi = rng.random_range(0.0..PI);
            let g = FarGeometry::from_positions([r1, 0.0, 0.0], [r2 * phi.cos(), r2 * phi.sin(), 0.0], A).unwrap();
            if g.overlap_free {
                break g;
            }
        };
        let ch = Channel::new(g, D, base).unwrap();
        let ch2 = Channel::new(g, D, doubled).unwrap();
        let mut ts: Vec<f64> = (0..10).map(|_| 10f64.powf(rng.random_range(-2.0..4.0))).collect();
        ts.sort_by(f64::total_cmp);
        for far in Far::BOTH {
            let ps: Vec<f64> = ts.iter().map(|&t| ch.p2_hit(far, t)).collect();
            violations += ps.windows(2).filter(|w| w[1] < w[0]).count();
            for &t in &ts {
                worst_trunc = worst_trunc.max((ch.p2_hit(far, t) - ch2.p2_hit(far, t)).abs());
            }
        }
    }
    v.check(violations == 0, format!("1000 geometries x 10 times: {violations} decreases of p2_hit"));
    v.check(
        worst_trunc <= bound,
        format!("doubling max_terms: max change {worst_trunc:.2e} (<= {bound:.0e})"),
    );

    let scenario = Scenario::default();
    let cfg = SimConfig::new(4000, 20.0, 99);
    let runs: Vec<_> = [1, 4, 16].map(|w| simulate_on(&scenario, &cfg, Some(w)).unwrap()).into();
    let same = runs.iter().all(|r| r.len() == runs[0].len()
        && r.iter().zip(&runs[0]).all(|(x, y)| x.outcome == y.outcome
            && x.hit_time.map(f64::to_bits) == y.hit_time.map(f64::to_bits)));
    v.check(same, "particle records bit-identical with 1, 4 and 16 workers".into());
    v
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("criterion_01_two_receiver_particle_agreement", criterion_01_two_receiver_particle_agreement),
        ("criterion_02_far_apart_decoupling", criterion_02_far_apart_decoupling),
        ("criterion_03_equidistant_symmetry", criterion_03_equidistant_symmetry),
        ("criterion_04_eventual_limits", criterion_04_eventual_limits),
        ("criterion_05_tap_conservation", criterion_05_tap_conservation),
        ("criterion_06_split_receiver_gain", criterion_06_split_receiver_gain),
        ("criterion_07_hypothesis_statistics", criterion_07_hypothesis_statistics),
        ("criterion_08_auc_agreement", criterion_08_auc_agreement),
        ("criterion_09_auc_versus_distance", criterion_09_auc_versus_distance),
        ("criterion_10_property_suites", criterion_10_property_suites),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let verdict = run();
        verdict.print();
        println!("    ({:.1} s)", start.elapsed().as_secs_f64());
        ran += 1;
        if !verdict.ok {
            failed.push(verdict.id);
        }
    }
    println!("\nacceptance: {} of {ran} criteria passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}

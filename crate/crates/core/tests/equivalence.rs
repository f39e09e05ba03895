use std::collections::BTreeSet;

use railpath::model::Window;
use railpath::oracle::oracle_frontier;
use railpath::paths::verify_path;
use railpath::pipeline;
use railpath::synth::{generate, GenConfig};
use railpath::TimePoint;

fn grid_config(seed: u64) -> GenConfig {
    GenConfig {
        seed,
        stations: 3 + (seed % 4) as usize,
        trains: 1 + (seed % 4) as usize,
        window: Window::new(TimePoint(6 * 3600), TimePoint(10 * 3600)),
        grid: Some(60),
        bypass: seed % 5 == 0,
        varied_margins: seed % 3 == 0,
        constraints: seed % 4 == 1,
        ..GenConfig::default()
    }
}

#[test]
fn dp_matches_oracle_on_small_grid_instances() {
    let g = 60;
    for seed in 0..500 {
        let inst = generate(&grid_config(seed)).unwrap();
        let window = Window::new(TimePoint(6 * 3600), TimePoint(10 * 3600));
        let request = inst.request(window).unwrap();
        let report =
            pipeline::insert(&inst.network, &inst.timetable, &inst.params, &request, false).unwrap();
        assert!(report.verified(), "seed {seed}: {:?}", report.violations);
        let prepared = pipeline::prepare(&inst.network, &inst.timetable, &inst.params, &request).unwrap();
        let oracle: BTreeSet<_> =
            oracle_frontier(&inst.network, &inst.timetable, &inst.params, &request, &prepared.route_graph, g)
                .unwrap()
                .into_iter()
                .collect();
        let dp: BTreeSet<_> = report
            .frontier
            .iter()
            .flat_map(|p| p.expand().collect::<Vec<_>>())
            .filter(|(d, _)| (d.secs() - window.start.secs()) % g == 0)
            .collect();
        assert_eq!(dp, oracle, "seed {seed}: {} trains", inst.timetable.trains().len());
        for p in &report.paths {
            assert!(verify_path(p, &inst.network, &inst.timetable, &inst.params).is_empty());
        }
    }
}

/// Off-grid instances: at one-second steps the search sees every instant,
/// so the frontiers must still coincide.
#[test]
fn dp_matches_one_second_oracle_off_grid() {
    for seed in 0..40 {
        let cfg = GenConfig {
            seed: 900 + seed,
            stations: 2 + (seed % 3) as usize,
            trains: 1 + (seed % 3) as usize,
            window: Window::new(TimePoint(6 * 3600), TimePoint(8 * 3600)),
            varied_margins: seed % 2 == 0,
            ..GenConfig::default()
        };
        let inst = generate(&cfg).unwrap();
        let request = inst.request(Window::new(TimePoint(6 * 3600), TimePoint(7 * 3600 + 1800))).unwrap();
        let report =
            pipeline::insert(&inst.network, &inst.timetable, &inst.params, &request, false).unwrap();
        assert!(report.verified(), "seed {seed}: {:?}", report.violations);
        let prepared = pipeline::prepare(&inst.network, &inst.timetable, &inst.params, &request).unwrap();
        let oracle: BTreeSet<_> =
            oracle_frontier(&inst.network, &inst.timetable, &inst.params, &request, &prepared.route_graph, 1)
                .unwrap()
                .into_iter()
                .collect();
        let dp: BTreeSet<_> = report.frontier.iter().flat_map(|p| p.expand().collect::<Vec<_>>()).collect();
        assert_eq!(dp, oracle, "seed {seed}");
    }
}

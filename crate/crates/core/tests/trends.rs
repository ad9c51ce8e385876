//! Qualitative trends of the sweep presets at small trial counts.

use hetnet::presets::{self, Scale, SweepSpec};
use hetnet::Scenario;

fn base() -> Scenario {
    Scenario {
        slot_budget: 3000,
        ..Scenario::default()
    }
}

#[test]
fn gain_shrinks_as_cellular_gets_faster() {
    let spec = SweepSpec::new("rate-sweep", "rate_ratio", 0.1, 1.7, 0.4, Scale::Linear)
        .with_trials(6)
        .with_seed(3);
    let rows = presets::preset_rate_sweep(&spec, &base()).unwrap();
    let gains: Vec<f64> = rows.iter().map(|r| r.rel_tput_combined / r.rel_tput_cellular).collect();
    for w in gains.windows(2) {
        assert!(w[1] <= w[0] * 1.05, "{gains:?}");
    }
    for r in &rows {
        assert!(r.rel_tput_combined + 1e-9 >= r.rel_tput_cellular, "{r:?}");
    }
}

#[test]
fn single_user_load_matches_rate_sweep() {
    let ratio = 0.3;
    let mut cfg = base();
    cfg.topology.cell_rate = ratio * cfg.wifi_rate;
    let load = SweepSpec::new("load-sweep", "users_per_cell", 1.0, 1.0, 1.0, Scale::Linear)
        .with_trials(4)
        .with_seed(9);
    let rate = SweepSpec::new("rate-sweep", "rate_ratio", ratio, ratio, 0.1, Scale::Linear)
        .with_trials(4)
        .with_seed(9);
    let l = presets::preset_load_sweep(&load, &cfg).unwrap()[0];
    let r = presets::preset_rate_sweep(&rate, &base()).unwrap()[0];
    assert!((l.rel_tput_cellular - r.rel_tput_cellular).abs() < 1e-9, "{l:?} {r:?}");
    assert!((l.rel_tput_combined - r.rel_tput_combined).abs() < 1e-9, "{l:?} {r:?}");
}

#[test]
fn combined_throughput_levels_off_under_load() {
    let mut cfg = base();
    cfg.topology.cell_rate = 0.5 * cfg.wifi_rate;
    let spec = SweepSpec::new("load-sweep", "users_per_cell", 8.0, 64.0, 8.0, Scale::Log)
        .with_trials(6)
        .with_seed(5);
    let rows = presets::preset_load_sweep(&spec, &cfg).unwrap();
    let cell: Vec<f64> = rows.iter().map(|r| r.rel_tput_cellular).collect();
    let comb: Vec<f64> = rows.iter().map(|r| r.rel_tput_combined).collect();
    for w in cell.windows(2) {
        assert!(w[1] < w[0], "{cell:?}");
    }
    // cellular keeps halving while the combined rate stays near the ad-hoc floor
    let n = rows.len();
    assert!(cell[n - 1] < 0.6 * cell[n - 2], "{cell:?}");
    assert!(comb[n - 1] > 0.85 * comb[n - 2], "{comb:?}");
}

#[test]
fn processing_delay_costs_throughput_on_the_chain() {
    let spec = SweepSpec::new("topo1", "rate_ratio", 0.1, 0.1, 0.1, Scale::Linear).with_trials(2);
    let fast = presets::preset_topo1(&spec, &base()).unwrap()[0];
    let slow_cfg = Scenario {
        processing_delay: 3,
        ..base()
    };
    let slow = presets::preset_topo1(&spec, &slow_cfg).unwrap()[0];
    assert!(slow.rel_tput_combined < fast.rel_tput_combined, "{slow:?} {fast:?}");
    assert!(slow.rel_tput_combined >= slow.rel_tput_wimax - 1e-9);
}

#[test]
fn denser_networks_need_a_smaller_backbone_fraction() {
    // fraction needed for the first backbone node to appear in every cell
    // halves when the density doubles, so the knee moves left
    let spec = SweepSpec::new("infra-sweep", "k_over_n", 0.0005, 0.004, 2.0, Scale::Log)
        .with_trials(4)
        .with_seed(2);
    let knee = |nodes: usize| {
        let cfg = Scenario {
            node_count: nodes,
            ..base()
        };
        let rows = presets::preset_infra_sweep(&spec, &cfg).unwrap();
        let top = rows.last().unwrap().rel_tput;
        let floor = rows[0].rel_tput;
        rows.iter()
            .find(|r| r.rel_tput - floor >= 0.5 * (top - floor))
            .unwrap()
            .k_over_n
    };
    let sparse = knee(2625);
    let dense = knee(5250);
    assert!(dense < sparse, "dense {dense} sparse {sparse}");
}

use std::time::{Duration, Instant};

use phasetopo::config::{self, Overrides, ResolvedConfig};
use phasetopo::pipeline;
use phasetopo::presets::PRESETS;
use phasetopo_core::analysis::DynamicsLabel;
use phasetopo_core::complex::{build_graph, ThresholdRule};
use phasetopo_core::quantum::OverlapMode;

fn preset(name: &str) -> ResolvedConfig {
    config::parse(&format!("[system]\npreset = \"{name}\"\n"), &Overrides::default()).unwrap()
}

#[test]
fn catalog_lists_the_pendulum() {
    assert!(PRESETS.iter().any(|p| p.name == "pendulum-linearized"));
    assert_eq!(PRESETS.len(), 6);
}

#[test]
fn every_preset_validates() {
    for p in PRESETS {
        let cfg = preset(p.name);
        assert_eq!(cfg.name, p.name);
        assert_eq!(cfg.mode, OverlapMode::Exact);
        assert!(cfg.sample_indices.len() <= cfg.grid.steps() + 1);
    }
}

#[test]
fn presets_run_quickly_and_get_their_labels() {
    let expected = [
        ("pendulum-linearized", DynamicsLabel::PeriodicCandidate),
        ("harmonic-oscillator", DynamicsLabel::PeriodicCandidate),
        ("coupled-springs", DynamicsLabel::PeriodicCandidate),
        ("decaying-spiral", DynamicsLabel::Trivial),
        ("two-tori", DynamicsLabel::QuasiPeriodicCandidate),
        ("logistic-forced", DynamicsLabel::PeriodicCandidate),
    ];
    assert_eq!(expected.len(), PRESETS.len());
    for (name, label) in expected {
        let start = Instant::now();
        let out = pipeline::run(&preset(name)).unwrap();
        let took = start.elapsed();
        assert_eq!(out.signature.label, label, "{name}");
        assert!(took < Duration::from_secs(60), "{name} took {took:?}");
        assert!(out.sweep.counts_monotone(), "{name}");
    }
}

#[test]
fn pendulum_loop_is_stable_across_the_grid() {
    let out = pipeline::run(&preset("pendulum-linearized")).unwrap();
    for p in &out.sweep.points {
        assert_eq!(&p.report.betti()[..3], &[1, 1, 0], "eps = {}", p.eps);
    }
}

#[test]
fn million_shot_swap_test_reproduces_exact_edges() {
    for p in PRESETS {
        let mut cfg = preset(p.name);
        let samples = pipeline::sample(&cfg, &pipeline::solve(&cfg).unwrap()).unwrap();
        let exact = pipeline::overlaps(&cfg, &samples).unwrap();
        cfg.mode = OverlapMode::SwapTest;
        cfg.shots = 1_000_000;
        let swap = pipeline::overlaps(&cfg, &samples).unwrap();
        for &eps in &cfg.eps_grid {
            let rule = ThresholdRule::new(cfg.sweep.metric, eps).unwrap();
            assert_eq!(
                build_graph(&exact, &rule).unwrap(),
                build_graph(&swap, &rule).unwrap(),
                "{} at eps = {eps}",
                p.name
            );
        }
    }
}

use pickdrop::generator::{generate, GeneratorSpec, Kind, Placement};
use pickdrop::heavy_hitter::{find_heavy, find_heavy_report, HeavyHitterConfig};
use pickdrop::pick_drop::{run, PickDropConfig};
use pickdrop::rng::{derive_seed, rng_from_seed};
use pickdrop::stream_model::{ElementId, ExactStats, MatrixOverlay, StreamView};
use rand::Rng;

fn detections(stream: &StreamView, cfg: impl Fn(u64) -> HeavyHitterConfig, trials: u64) -> u64 {
    (0..trials)
        .filter(|&i| find_heavy(stream.items().iter().copied(), &cfg(i)).unwrap().element == ElementId(1))
        .count() as u64
}

#[test]
fn doubling_detects_within_twice_known_length() {
    let (n, m, f) = (4096, 4195, 100);
    for placement in [Placement::UniformRows, Placement::BurstyPrefix, Placement::Random] {
        let stream = generate(&GeneratorSpec::planted(n, m, f, placement).seed(11)).unwrap();
        assert!(ExactStats::from_stream(&stream).is_heavy(ElementId(1), 3).unwrap());
        let known = detections(&stream, |i| HeavyHitterConfig::new(n, 3, 0.25).known_length(m).seed(i), 100);
        let doubling = detections(&stream, |i| HeavyHitterConfig::new(n, 3, 0.25).doubling().seed(1000 + i), 100);
        assert!(2 * doubling >= known && 2 * known >= doubling, "{placement:?}: known {known}, doubling {doubling}");
    }
}

#[test]
fn finder_never_overestimates() {
    let mut rng = rng_from_seed(5);
    for i in 0..10_000u64 {
        let n = 1u64 << rng.random_range(2..=7);
        let m = rng.random_range(1..=6 * n);
        let spec = if i % 2 == 0 {
            GeneratorSpec::new(Kind::Zipf { s: rng.random_range(0.3..2.5) }, n, m)
        } else {
            let f = rng.random_range(1..=m);
            let placement = [Placement::UniformRows, Placement::BurstyPrefix, Placement::Random][rng.random_range(0..3)];
            GeneratorSpec::planted(n, m, f, placement)
        };
        let stream = generate(&spec.seed(i)).unwrap();
        let stats = ExactStats::from_stream(&stream);
        let base = HeavyHitterConfig::new(n, 3, rng.random_range(0.05..0.9)).seed(i).reps_constant(0.5);
        let cfg = if i % 3 == 0 { base.doubling() } else { base.known_length(m) };
        let report = find_heavy_report(stream.items().iter().copied(), &cfg).unwrap();
        for e in report.candidates.estimates() {
            assert!(e.count <= stats.frequency(e.element), "case {i}: {e:?}");
        }
        assert!(report.estimate.count <= stats.frequency(report.estimate.element));
    }
}

#[test]
fn single_run_never_overestimates() {
    let mut rng = rng_from_seed(6);
    for i in 0..10_000u64 {
        let r = rng.random_range(1..=8usize);
        let t = rng.random_range(1..=12usize);
        let alphabet = rng.random_range(1..=8u32);
        let rows: Vec<Vec<u32>> = (0..r).map(|_| (0..t).map(|_| rng.random_range(1..=alphabet)).collect()).collect();
        let ov = MatrixOverlay::from_rows(&rows).unwrap();
        let stats = ExactStats::from_overlay(&ov);
        let cfg = PickDropConfig {
            rows: r as u64,
            cols: t as u64,
            lambda: rng.random_range(1..=5),
            seed: derive_seed(6, &[i]),
        };
        let e = run(&ov, &cfg).unwrap();
        assert!(e.count >= 1 && e.count <= stats.frequency(e.element), "case {i}: {e:?} on {rows:?}");
    }
}

#[test]
fn generated_streams_match_their_sidecar() {
    use pickdrop::generator::Sidecar;
    for (i, spec) in [
        GeneratorSpec::planted(64, 500, 40, Placement::Random),
        GeneratorSpec::new(Kind::Zipf { s: 1.1 }, 100, 1000),
        GeneratorSpec::new(Kind::PromiseCase2, 256, 0),
    ]
    .into_iter()
    .enumerate()
    {
        let stream = generate(&spec.seed(i as u64)).unwrap();
        let stats = ExactStats::from_stream(&stream);
        let sidecar = Sidecar::from_stats(&stats);
        let json = serde_json::to_string(&sidecar).unwrap();
        let back: Sidecar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sidecar);
        assert_eq!(back.length, stream.len() as u64);
        for k in 1..=3 {
            assert_eq!(back.moment(k), Some(stats.moment(k).unwrap()));
        }
        for (&id, &f) in stats.frequencies() {
            assert_eq!(back.frequency(id), f);
        }
    }
}

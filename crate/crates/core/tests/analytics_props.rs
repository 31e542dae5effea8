mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use xl_core::analytics::{gap_percent, parse_runs, round3, summarize, write_runs};
use xl_core::rng::Xoshiro256StarStar;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summaries_match_direct_computation(seed in any::<u64>(), n in 0usize..200) {
        let mut rng = Xoshiro256StarStar::from_splitmix(seed);
        let (records, bks) = common::fuzz_records(&mut rng, n);
        let summary = summarize(&records, &bks, Some(2000)).unwrap();

        let mut cells: BTreeMap<(String, String), Vec<Option<u64>>> = BTreeMap::new();
        for r in &records {
            cells.entry((r.instance.clone(), r.method.clone())).or_default().push(r.cost);
        }
        prop_assert_eq!(summary.instances.len(), cells.len());
        for s in &summary.instances {
            let runs = &cells[&(s.instance.clone(), s.method.clone())];
            let costs: Vec<u64> = runs.iter().flatten().copied().collect();
            let b = bks.entries[&s.instance].cost;
            prop_assert_eq!(s.runs, runs.len());
            prop_assert_eq!(s.missing, runs.len() - costs.len());
            prop_assert_eq!(s.best, costs.iter().copied().min());
            if costs.is_empty() {
                prop_assert!(s.mean.is_none() && s.gap_best.is_none() && s.gap_mean.is_none());
                continue;
            }
            let mean = costs.iter().sum::<u64>() as f64 / costs.len() as f64;
            prop_assert!(close(s.mean.unwrap(), mean));
            prop_assert!(close(s.gap_best.unwrap(), common::gap(s.best.unwrap() as f64, b)));
            prop_assert!(close(s.gap_mean.unwrap(), common::gap(mean, b)));
            prop_assert!(s.gap_best.unwrap() <= s.gap_mean.unwrap() + 1e-12);
        }
        for g in summary.groups.iter().filter(|g| g.group == "all") {
            let gaps: Vec<f64> = summary
                .instances
                .iter()
                .filter(|s| s.method == g.method)
                .filter_map(|s| s.gap_best)
                .collect();
            prop_assert_eq!(g.instances, gaps.len());
            if !gaps.is_empty() {
                prop_assert!(close(g.avg_gap_best.unwrap(), gaps.iter().sum::<f64>() / gaps.len() as f64));
            }
        }
    }

    #[test]
    fn record_order_is_irrelevant(seed in any::<u64>(), n in 0usize..200) {
        let mut rng = Xoshiro256StarStar::from_splitmix(seed);
        let (mut records, bks) = common::fuzz_records(&mut rng, n);
        let a = summarize(&records, &bks, Some(2000)).unwrap();
        rng.shuffle(&mut records);
        let b = summarize(&records, &bks, Some(2000)).unwrap();
        // Means are sums in a different order: compare after rounding.
        prop_assert_eq!(a.instances.len(), b.instances.len());
        for (x, y) in a.instances.iter().zip(&b.instances) {
            prop_assert_eq!((&x.instance, &x.method, x.best, x.runs), (&y.instance, &y.method, y.best, y.runs));
            prop_assert_eq!(x.gap_mean.map(round3), y.gap_mean.map(round3));
        }
    }

    #[test]
    fn run_files_round_trip(seed in any::<u64>(), n in 0usize..50) {
        let mut rng = Xoshiro256StarStar::from_splitmix(seed);
        let (records, _) = common::fuzz_records(&mut rng, n);
        prop_assert_eq!(parse_runs(&write_runs(&records)).unwrap(), records);
    }

    #[test]
    fn gap_to_itself_is_zero(b in 1i64..10_000_000) {
        prop_assert_eq!(gap_percent(b as f64, b).unwrap(), 0.0);
    }
}

#[test]
fn non_positive_bks_is_rejected() {
    assert!(gap_percent(10.0, 0).is_err());
    assert!(gap_percent(10.0, -5).is_err());
}

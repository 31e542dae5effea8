use statrs::distribution::{ChiSquared, ContinuousCDF};
use xl_core::generator::{
    gen_customers, gen_demands, generate_instance, CustomerPos, DemandDist, DepotPos, GenConfig,
    GenSpec, RouteClass,
};
use xl_core::rng::{stream, StreamTag};
use xl_core::Point;

fn spec(
    n_total: usize,
    customers: CustomerPos,
    demand: DemandDist,
    route_class: RouteClass,
    seed: u64,
) -> GenSpec {
    GenSpec {
        n_total,
        depot: DepotPos::Central,
        customers,
        demand,
        route_class,
        seed,
    }
}

fn place(s: &GenSpec, cfg: &GenConfig) -> Vec<Point> {
    gen_customers(
        s,
        Point { x: 500, y: 500 },
        cfg,
        &mut stream(s.seed, StreamTag::Positions),
        &mut stream(s.seed, StreamTag::Clusters),
    )
    .unwrap()
    .points
}

#[test]
fn flat_attraction_makes_clusters_uniform() {
    // With a huge decay scale every candidate is accepted, so clustered
    // placement must be indistinguishable from uniform on a 10×10 grid.
    let cfg = GenConfig {
        decay_lambda: 1e9,
        ..GenConfig::default()
    };
    let s = spec(
        10_001,
        CustomerPos::Clustered,
        DemandDist::Unitary,
        RouteClass::Medium,
        9,
    );
    let points = place(&s, &cfg);
    assert_eq!(points.len(), 10_000);

    // Cells are 100 wide except the last, which also holds coordinate 1000.
    let cell = |v: i64| ((v / 100) as usize).min(9);
    let width = |c: usize| if c == 9 { 101.0 } else { 100.0 };
    let mut counts = [[0u32; 10]; 10];
    for p in &points {
        counts[cell(p.x)][cell(p.y)] += 1;
    }
    let n = points.len() as f64;
    let mut chi2 = 0.0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = n * width(i) * width(j) / (1001.0 * 1001.0);
            chi2 += (f64::from(obs) - expected).powi(2) / expected;
        }
    }
    let p_value = 1.0 - ChiSquared::new(99.0).unwrap().cdf(chi2);
    assert!(p_value > 0.01, "chi2 = {chi2}, p = {p_value}");
}

#[test]
fn default_clusters_are_not_uniform() {
    let s = spec(
        2001,
        CustomerPos::Clustered,
        DemandDist::Unitary,
        RouteClass::Medium,
        9,
    );
    let points = place(&s, &GenConfig::default());
    let mut counts = [0u32; 100];
    for p in &points {
        counts[((p.x / 100).min(9) * 10 + (p.y / 100).min(9)) as usize] += 1;
    }
    // 2000 uniform points would leave essentially no cell of 100 empty.
    let empty = counts.iter().filter(|&&c| c == 0).count();
    assert!(empty > 10, "only {empty} empty cells");
}

#[test]
fn small_large_fraction_tracks_its_draw() {
    let cfg = GenConfig::default();
    for seed in 0..20 {
        let s = spec(
            10_001,
            CustomerPos::Random,
            DemandDist::SmallLarge,
            RouteClass::Medium,
            seed,
        );
        let points = vec![Point { x: 0, y: 0 }; 10_000];
        let (demands, p) = gen_demands(&s, &points, &cfg, &mut stream(seed, StreamTag::Demands));
        let p = p.unwrap();
        assert!((0.70..=0.95).contains(&p));
        assert!(demands
            .iter()
            .all(|&q| (1..=10).contains(&q) || (50..=100).contains(&q)));
        let small = demands.iter().filter(|&&q| q <= 10).count() as f64 / demands.len() as f64;
        assert!((small - p).abs() <= 0.03, "seed {seed}: {small} vs {p}");
    }
}

#[test]
fn quadrant_demands_follow_position() {
    let s = spec(
        1001,
        CustomerPos::Random,
        DemandDist::Quadrant,
        RouteClass::Medium,
        3,
    );
    for seed in 0..10 {
        let s = GenSpec { seed, ..s };
        let (inst, _) = generate_instance(&s, &GenConfig::default()).unwrap();
        for (p, &q) in inst.customers.iter().zip(&inst.demands) {
            let east = p.x >= 500;
            let north = p.y >= 500;
            // NE and SW hold the large demands.
            let large = east == north;
            if large {
                assert!((51..=100).contains(&q), "{p:?} got {q}");
            } else {
                assert!((1..=50).contains(&q), "{p:?} got {q}");
            }
        }
    }
}

#[test]
fn trace_matches_attribute_rules() {
    let cfg = GenConfig::default();
    for (i, &customers) in CustomerPos::ALL.iter().enumerate() {
        for (j, &route_class) in RouteClass::ALL.iter().enumerate() {
            for n_total in [101, 202] {
                let seed = (i * 100 + j * 10 + n_total) as u64;
                let s = spec(n_total, customers, DemandDist::D1To100, route_class, seed);
                let (inst, trace) = generate_instance(&s, &cfg).unwrap();
                let (lo, hi) = route_class.interval();
                assert!(trace.drawn_r >= lo && trace.drawn_r < hi);
                let n = n_total - 1;
                match customers {
                    CustomerPos::Random => {
                        assert_eq!(trace.n_cluster_seeds, None);
                        assert_eq!(trace.n_clustered, 0);
                    }
                    CustomerPos::Clustered => assert_eq!(trace.n_clustered, n),
                    CustomerPos::RandomClustered => assert_eq!(trace.n_clustered, n.div_ceil(2)),
                }
                if let Some(k) = trace.n_cluster_seeds {
                    assert!((2..=6).contains(&k));
                }
                let sum: u64 = inst.demands.iter().map(|&q| u64::from(q)).sum();
                let max = *inst.demands.iter().max().unwrap();
                let target = (trace.drawn_r * sum as f64 / n as f64).floor() as u32;
                assert_eq!(inst.capacity, target.max(max));
            }
        }
    }
}

#[test]
fn unitary_fleet_is_a_ceiling() {
    for seed in 0..30 {
        let route_class = RouteClass::ALL[seed as usize % RouteClass::ALL.len()];
        let s = spec(
            301,
            CustomerPos::Random,
            DemandDist::Unitary,
            route_class,
            seed,
        );
        let (inst, _) = generate_instance(&s, &GenConfig::default()).unwrap();
        assert!(inst.k_min_proven);
        assert_eq!(
            u64::from(inst.k_min),
            300u64.div_ceil(u64::from(inst.capacity))
        );
    }
}

#[test]
fn depot_placement() {
    let cfg = GenConfig::default();
    for seed in 0..20 {
        for depot in DepotPos::ALL {
            let s = GenSpec {
                depot: *depot,
                ..spec(
                    21,
                    CustomerPos::Random,
                    DemandDist::Unitary,
                    RouteClass::Short,
                    seed,
                )
            };
            let (inst, _) = generate_instance(&s, &cfg).unwrap();
            match depot {
                DepotPos::Central => assert_eq!(inst.depot, Point { x: 500, y: 500 }),
                DepotPos::Eccentric => assert_eq!(inst.depot, Point { x: 0, y: 0 }),
                DepotPos::Random => assert!(
                    (0..=1000).contains(&inst.depot.x) && (0..=1000).contains(&inst.depot.y)
                ),
            }
            assert!(!inst.customers.contains(&inst.depot));
        }
    }
}

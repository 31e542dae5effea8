mod common;

use proptest::prelude::*;
use xl_core::model::{euclid_cost, solution_cost, validate, Point, Route, Solution, Violation};
use xl_core::rng::Xoshiro256StarStar;
use xl_core::solver::{solve, SolverConfig};

fn point() -> impl Strategy<Value = Point> {
    (0i64..=1000, 0i64..=1000).prop_map(|(x, y)| Point { x, y })
}

proptest! {
    #[test]
    fn cost_is_symmetric_and_matches_reference(a in point(), b in point()) {
        prop_assert_eq!(euclid_cost(a, b), euclid_cost(b, a));
        prop_assert_eq!(euclid_cost(a, b), common::nint(a, b));
    }

    #[test]
    fn rounded_triangle_slack(a in point(), b in point(), c in point()) {
        prop_assert!(euclid_cost(a, c) <= euclid_cost(a, b) + euclid_cost(b, c) + 1);
    }

    #[test]
    fn cost_ignores_route_order_and_direction(seed in any::<u64>(), rotate in 0usize..8, flip in 0usize..8) {
        let mut rng = Xoshiro256StarStar::from_splitmix(seed);
        let inst = common::random_instance(&mut rng, 12, 200, 9, 30);
        let sol = solve(&inst, &SolverConfig::iterations(3, seed)).unwrap().solution;
        let base = solution_cost(&inst, &sol).unwrap();
        let mut lists: Vec<Vec<usize>> = sol.routes.iter().map(|r| r.customers().to_vec()).collect();
        let len = lists.len();
        lists.rotate_left(rotate % len);
        lists[flip % len].reverse();
        let shuffled = Solution::new(lists.into_iter().map(|l| Route::new(l).unwrap()).collect());
        prop_assert_eq!(solution_cost(&inst, &shuffled).unwrap(), base);
    }

    #[test]
    fn validator_catches_every_mutation(seed in any::<u64>(), pick in any::<usize>()) {
        let mut rng = Xoshiro256StarStar::from_splitmix(seed);
        let inst = common::random_instance(&mut rng, 10, 200, 9, 25);
        let sol = solve(&inst, &SolverConfig::iterations(2, seed)).unwrap().solution;
        prop_assert!(validate(&inst, &sol).feasible);
        let lists: Vec<Vec<usize>> = sol.routes.iter().map(|r| r.customers().to_vec()).collect();
        let all: Vec<usize> = lists.iter().flatten().copied().collect();
        let victim = all[pick % all.len()];

        // Drop a customer.
        let dropped: Vec<Vec<usize>> = lists
            .iter()
            .map(|r| r.iter().copied().filter(|&c| c != victim).collect())
            .collect();
        let report = validate(&inst, &Solution::from_index_lists(dropped).unwrap());
        prop_assert!(!report.feasible);
        let missing = Violation::MissingCustomer { customer: victim };
        prop_assert!(report.violations.contains(&missing), "{:?}", report.violations);

        // Visit it twice, on its own extra route.
        let mut doubled = lists.clone();
        doubled.push(vec![victim]);
        let report = validate(&inst, &Solution::from_index_lists(doubled).unwrap());
        prop_assert!(!report.feasible);
        let duplicated = matches!(
            report.violations.as_slice(),
            [Violation::DuplicatedCustomer { customer, occurrences: 2 }] if *customer == victim
        );
        prop_assert!(duplicated, "{:?}", report.violations);

        // Everything on one route overloads it (total demand exceeds Q by construction below).
        if inst.total_demand() > u64::from(inst.capacity) {
            let merged = vec![all.clone()];
            let report = validate(&inst, &Solution::from_index_lists(merged).unwrap());
            prop_assert!(!report.feasible);
            let overloaded = matches!(
                report.violations.as_slice(),
                [Violation::CapacityExceeded { route: 1, .. }]
            );
            prop_assert!(overloaded, "{:?}", report.violations);
        }
    }
}

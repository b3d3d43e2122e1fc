use std::path::Path;

use greedy_descent::formats::{
    covering_to_csv, descent_to_csv, dictionary_to_csv, matrix_to_csv, parse_covering, parse_descent, parse_dictionary_raw,
    parse_matrix, parse_trace, trace_to_csv,
};
use greedy_descent_core::descent::{run_wgafr_co, QuadraticEnergy};
use greedy_descent_core::dictionary::{equispaced_circle_covering, min_circle_centers};
use greedy_descent_core::greedy::run_wcga;
use greedy_descent_core::{sampling, Dictionary, GreedyConfig, SmoothSpace};
use proptest::prelude::*;

fn here() -> &'static Path {
    Path::new("mem.csv")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dictionary_round_trips_exactly(d in 1usize..8, n in 1usize..20, p in prop::sample::select(vec![1.5, 2.0, 4.0]), seed in 0u64..1000) {
        let dict = Dictionary::random_sphere(SmoothSpace::lp(d, p).unwrap(), n, seed).unwrap();
        let back = parse_dictionary_raw(here(), &dictionary_to_csv(&dict)).unwrap().into_dictionary().unwrap();
        prop_assert_eq!(back.atoms(), dict.atoms());
        prop_assert_eq!(back.label(), dict.label());
        prop_assert_eq!(back.space().p(), p);
    }

    #[test]
    fn greedy_trace_round_trips_exactly(d in 2usize..8, seed in 0u64..1000) {
        let dict = Dictionary::random_sphere(SmoothSpace::euclidean(d), 2 * d, seed).unwrap();
        let f0 = sampling::gaussian(&mut sampling::seeded(seed), d);
        let t = run_wcga(&f0, &dict, &GreedyConfig { max_iter: 12, ..GreedyConfig::default() }).unwrap();
        let rows = parse_trace(here(), &trace_to_csv(&t)).unwrap();
        prop_assert_eq!(rows.len(), t.steps.len());
        for (r, s) in rows.iter().zip(&t.steps) {
            prop_assert_eq!(r.iter, s.m);
            prop_assert_eq!(r.selected_index, s.selected.get());
            prop_assert_eq!(r.residual_norm, s.residual_norm);
            prop_assert_eq!(r.coeff_l1, s.coeff_l1);
        }
    }

    #[test]
    fn descent_trace_round_trips_exactly(d in 2usize..6, seed in 0u64..1000) {
        let dict = Dictionary::random_sphere(SmoothSpace::euclidean(d), 2 * d, seed).unwrap();
        let e = QuadraticEnergy::new(sampling::gaussian(&mut sampling::seeded(seed), d)).unwrap();
        let t = run_wgafr_co(&e, &dict, &GreedyConfig { max_iter: 8, ..GreedyConfig::default() }).unwrap();
        let rows = parse_descent(here(), &descent_to_csv(&t)).unwrap();
        prop_assert_eq!(rows.len(), t.steps.len());
        for (r, s) in rows.iter().zip(&t.steps) {
            prop_assert_eq!(r.energy, s.energy);
            prop_assert_eq!(r.energy_gap, s.energy_gap);
        }
    }

    #[test]
    fn matrix_round_trips_exactly(rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 3), 1..10)) {
        prop_assert_eq!(parse_matrix(here(), &matrix_to_csv(&rows)).unwrap(), rows);
    }

    #[test]
    fn covering_round_trips_exactly(r in 0.2f64..0.9) {
        let cov = equispaced_circle_covering(min_circle_centers(r).unwrap(), r).unwrap();
        prop_assert_eq!(parse_covering(here(), &covering_to_csv(&cov)).unwrap(), cov);
    }
}

#[test]
fn malformed_rows_report_their_line() {
    let text = "# d=2 N=2 p=2 label=x\n1,0\n0,abc\n";
    let e = parse_dictionary_raw(here(), text).err().unwrap().to_string();
    assert!(e.contains('3'), "{e}");
}

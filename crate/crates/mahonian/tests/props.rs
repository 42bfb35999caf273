//! Property tests: parse/format round trips, inversion counting against the
//! quadratic oracle, labeling bijectivity, and JSON round trips.

use std::collections::BTreeMap;

use proptest::collection::vec;
use proptest::prelude::*;

use mahonian::labeling::{gl_den_labeling, liu_den_labeling, rmaj_labeling};
use mahonian::perm::inversions;
use mahonian::report::{
    from_json, to_json, CheckReportDoc, CheckReportsDoc, DistributionDoc, Payload, ReportDocument,
    TermDoc,
};
use mahonian::{FormatStyle, Permutation};

fn arb_permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (0..=max_n).prop_flat_map(|n| {
        Just((1..=n as u32).collect::<Vec<u32>>())
            .prop_shuffle()
            .prop_map(|word| Permutation::new(word).unwrap())
    })
}

proptest! {
    #[test]
    fn parse_format_round_trip(p in arb_permutation(12)) {
        for style in [FormatStyle::Compact, FormatStyle::Delimited] {
            let text = p.format(style);
            prop_assert_eq!(Permutation::parse(&text).unwrap(), p.clone());
        }
    }

    #[test]
    fn inversions_match_quadratic_oracle(letters in vec(1u32..10_000, 0..64)) {
        let mut distinct = letters;
        distinct.sort_unstable();
        distinct.dedup();
        let mut rng_order = distinct.clone();
        rng_order.reverse(); // deterministic scramble on top of the sort
        let mut oracle = 0u64;
        for i in 0..rng_order.len() {
            for j in i + 1..rng_order.len() {
                if rng_order[i] > rng_order[j] {
                    oracle += 1;
                }
            }
        }
        prop_assert_eq!(inversions(&rng_order), oracle);
    }

    #[test]
    fn labelings_are_bijections(p in arb_permutation(9), r in 1u32..7, g in 1u32..5, ell in 1u32..5) {
        let n = p.len() + 1;
        let check = |labels: &[u32]| {
            let mut seen: Vec<u32> = labels.to_vec();
            seen.sort_unstable();
            seen == (0..n as u32).collect::<Vec<u32>>()
        };
        prop_assert!(check(rmaj_labeling(&p, r).unwrap().labels()));
        let (liu, letters) = liu_den_labeling(&p, g).unwrap();
        prop_assert!(check(liu.labels()));
        prop_assert!(letters.letters().iter().all(|l| l.is_some()));
        if (g + ell) as usize <= n {
            prop_assert!(check(gl_den_labeling(&p, g, ell).unwrap().labels()));
        }
    }

    #[test]
    fn report_json_round_trip(
        n in 0usize..10,
        terms in vec((0u32..6, 0u32..30, 1u64..1_000_000), 0..20),
        reports in vec(("[a-z-]{1,12}", any::<bool>(), 0u64..10_000), 0..6),
    ) {
        let mut seen = std::collections::BTreeSet::new();
        let term_docs: Vec<TermDoc> = terms
            .into_iter()
            .filter(|&(t, q, _)| seen.insert((t, q)))
            .map(|(t, q, count)| TermDoc { t, q, count: count.to_string() })
            .collect();
        let doc = ReportDocument::new(
            BTreeMap::from([("n".to_string(), n.to_string())]),
            Payload::Distribution(DistributionDoc {
                n,
                stat1: "3des".to_string(),
                stat2: "3maj".to_string(),
                terms: term_docs,
            }),
        );
        let text = to_json(&doc).unwrap();
        prop_assert_eq!(from_json(&text).unwrap(), doc);

        let reports_doc = ReportDocument::new(
            BTreeMap::new(),
            Payload::CheckReports(CheckReportsDoc {
                reports: reports
                    .into_iter()
                    .map(|(name, pass, micros)| CheckReportDoc {
                        name,
                        params: "n=4".to_string(),
                        pass,
                        counterexample: None,
                        elapsed_micros: micros,
                    })
                    .collect(),
            }),
        );
        let text = to_json(&reports_doc).unwrap();
        prop_assert_eq!(from_json(&text).unwrap(), reports_doc);
    }
}

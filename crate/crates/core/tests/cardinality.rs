//! Both cardinality encodings against brute-force counting.

use twist_core::ast::CardKind;
use twist_core::card::CardEncoding;
use twist_testkit::checks::{cardinality, encode_card};

#[test]
fn encodings_match_brute_force_up_to_ten() {
    cardinality(10).unwrap();
}

#[test]
fn binomial_atmost_3_of_9_has_126_clauses() {
    let (cs, n_vars) = encode_card(CardKind::AtMost, 3, 9, CardEncoding::Binomial);
    assert_eq!(cs.len(), 126);
    assert_eq!(n_vars, 9);
    assert!(cs.iter().all(|c| c.len() == 4 && c.iter().all(|&l| l < 0)));
}

#[test]
fn counter_is_polynomial() {
    // at most 5 of 40 would need C(40,6) = 3838380 binomial clauses.
    let (cs, n_vars) = encode_card(CardKind::AtMost, 5, 40, CardEncoding::SeqCounter);
    assert_eq!(cs.len(), 2 * 40 * 5 + 40 - 3 * 5 - 1);
    assert_eq!(n_vars, 40 + 39 * 5);
}

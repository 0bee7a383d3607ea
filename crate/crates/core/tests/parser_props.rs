//! Parser properties: rendering round-trips and arbitrary input never
//! panics.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twist_core::ground::ground;
use twist_core::parse;
use twist_core::parser::parse_bytes;
use twist_core::render::render_program;
use twist_testkit::programs::{generate, Limits};

const DEEP: Limits = Limits {
    max_families: 4,
    max_domain: 3,
    max_depth: 6,
    min_universe: 1,
    max_universe: 40,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// parse ∘ render is the identity on what the parser produced, up to
    /// spans; checked by rendering twice and by grounding both.
    #[test]
    fn render_round_trip(seed in any::<u64>()) {
        let prog = generate(&mut ChaCha8Rng::seed_from_u64(seed), DEEP);
        let src = prog.source();
        let a = parse(&src).unwrap();
        let text = render_program(&a);
        let b = parse(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
        prop_assert_eq!(render_program(&b), text.clone());
        prop_assert_eq!(ground(&a).unwrap(), ground(&b).unwrap());
    }

    #[test]
    fn token_soup_never_panics(toks in prop::collection::vec(prop::sample::select(vec![
        "bigand", "bigor", "exact", "atmost", "atleast", "end", "when", "in", "and", "or", "not",
        "=>", "<=>", "(", ")", ",", ":", "..", "$i", "$S", "=", "P", "Q", "1", "2.5", "-3",
        "+", "-", "*", "/", "mod", "<", "<=", "==", "!=", "Top", "Bot", "int", "real", "\n",
        "formulas:", "sets:", "sqrt", ";; c\n",
    ]), 0..40)) {
        let src = toks.join(" ");
        let _ = parse(&src);
        if let Ok(p) = parse(&src) {
            let _ = ground(&p);
        }
    }

    #[test]
    fn bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_bytes(&bytes);
    }

    #[test]
    fn mutated_programs_never_panic(seed in any::<u64>(), cut in 0usize..400, junk in "[ -~]{0,6}") {
        let src = generate(&mut ChaCha8Rng::seed_from_u64(seed), Limits::default()).source();
        let at = src.char_indices().map(|(i, _)| i).nth(cut % src.len().max(1)).unwrap_or(0);
        let mutated = format!("{}{}{}", &src[..at], junk, &src[at..]);
        if let Ok(p) = parse(&mutated) {
            let _ = ground(&p);
        }
    }
}

#[test]
fn errors_carry_spans_inside_the_source() {
    for src in ["P and", "bigand $i in (1..3): P($k) end", "exact 2 $i in (1..3): P($i) end", "(p", "p )"] {
        let ds = parse(src).unwrap_err();
        assert!(!ds.is_empty());
        for d in ds {
            assert!(d.span.end <= src.len() && d.span.start <= d.span.end, "{src}: {d:?}");
        }
    }
}

//! The sieve alone, run through enough primes, isolates the rational points
//! of the worked curve without any p-adic input.

use chabauty_core::cli::parse_config;
use chabauty_core::sieve::{search_points, sieve_pass, SieveState};

#[test]
fn primes_up_to_89_leave_only_known_classes() {
    let ctx = parse_config(include_str!("fixtures/worked.json")).unwrap().context().unwrap();
    let mut st = search_points(&ctx, &SieveState::new(&ctx)).unwrap();
    assert_eq!(st.found.len(), 10);
    let mut history = Vec::new();
    for q in [7u64, 11, 13, 17, 23, 19, 29, 61, 79, 89] {
        st = sieve_pass(&ctx, &st, q).unwrap();
        history.push((q, st.modulus, st.surviving_count()));
        for fp in &st.found {
            assert!(st.is_surviving(fp.s, fp.torsion_index), "point lost at q = {q}");
        }
    }
    let mut known: Vec<(u64, usize)> = st
        .found
        .iter()
        .map(|fp| (fp.s.rem_euclid(st.modulus as i64) as u64, fp.torsion_index))
        .collect();
    known.sort_unstable();
    known.dedup();
    let mut left: Vec<_> = st.surviving_classes().collect();
    left.sort_unstable();
    assert_eq!(left, known, "trace {history:?}");
}

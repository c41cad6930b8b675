mod props;

use proptest::prelude::*;

fn run(check: fn(u64, usize) -> props::Check, seed: u64, n: usize) -> Result<(), TestCaseError> {
    check(seed, n).map_err(|e| TestCaseError::fail(format!("seed {seed}, n {n}: {e}")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qf_monotone_in_disc(seed in any::<u64>(), n in 3usize..30) { run(props::monotone_and_in_disc, seed, n)?; }

    #[test]
    fn inclusion_interval(seed in any::<u64>(), n in 3usize..30) { run(props::inclusion, seed, n)?; }

    #[test]
    fn distance_bound(seed in any::<u64>(), n in 3usize..30) { run(props::distance_bound, seed, n)?; }

    #[test]
    fn midpoint_improvement(seed in any::<u64>(), n in 3usize..30) { run(props::midpoint_improvement, seed, n)?; }

    #[test]
    fn psd_chain(seed in any::<u64>(), n in 3usize..30) { run(props::psd_chain, seed, n)?; }

    #[test]
    fn sqrt_identity(seed in any::<u64>(), n in 2usize..30) { run(props::sqrt_identity, seed, n)?; }

    #[test]
    fn hermitian_system(seed in any::<u64>(), n in 3usize..30) { run(props::hermitian_system, seed, n)?; }

    #[test]
    fn alignment_maximizer(seed in any::<u64>(), n in 2usize..20) { run(props::alignment_maximizer, seed, n)?; }

    #[test]
    fn shifted_orthogonality(seed in any::<u64>(), n in 2usize..25) { run(props::shifted_orthogonality, seed, n)?; }

    #[test]
    fn krylov_span(seed in any::<u64>(), n in 4usize..=12) { run(props::krylov_span, seed, n)?; }

    #[test]
    fn cayley_identities(seed in any::<u64>(), n in 2usize..=20) { run(props::cayley_identities, seed, n)?; }

    #[test]
    fn gradient_matches_differences(seed in any::<u64>(), n in 2usize..20) { run(props::gradient_matches_differences, seed, n)?; }

    #[test]
    fn descent_monotone(seed in any::<u64>(), n in 3usize..20) { run(props::descent_monotone, seed, n)?; }

    #[test]
    fn preconditioning_equivalence(seed in any::<u64>(), n in 2usize..15) { run(props::preconditioning_equivalence, seed, n)?; }

    #[test]
    fn deflation_postcondition(seed in any::<u64>(), n in 4usize..20) { run(props::deflation_postcondition, seed, n)?; }

    #[test]
    fn reformulations(seed in any::<u64>(), n in 3usize..20) { run(props::reformulations, seed, n)?; }

    #[test]
    fn arnoldi_disc(seed in any::<u64>(), n in 2usize..20) { run(props::arnoldi_disc, seed, n)?; }

    #[test]
    fn oracle_residuals(seed in any::<u64>(), n in 1usize..30) { run(props::oracle_residuals, seed, n)?; }

    #[test]
    fn oracle_congruence(seed in any::<u64>(), n in 2usize..20) { run(props::oracle_congruence, seed, n)?; }

    #[test]
    fn normalizing_product(seed in any::<u64>(), n in 2usize..15) { run(props::normalizing_product, seed, n)?; }

    #[test]
    fn shift_translation(seed in any::<u64>(), n in 4usize..20) { run(props::shift_translation_and_monitor, seed, n)?; }
}

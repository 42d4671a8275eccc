use bindep::bigraph::{Bigraph, SiteModel};
use bindep::compat::{
    decompose_tilde, decompose_zero, enumerate_compatible, env0, is_compatible, path_to_unfinished, unfinished_to_path,
    CompatClass, Step,
};
use bindep::cumulants::{joint_moment, CumulantKind, MatrixFamily};
use bindep::hilbert::{vacuum_moment, ProductSpace};
use bindep::matrix_model::{exact_expectation, haar_unitary, random_matrices, MatrixModel};
use bindep::ncps::AlgebraState;
use bindep::partitions::{enumerate_nc, kreweras, SetPartition};
use bindep::perm::Permutation;
use bindep::problem::relative_gap;
use bindep::weingarten::weingarten_table;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, seed: u64) -> Bigraph {
    Bigraph::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, 1..=max_len)
}

fn steps(max_len: usize) -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec(
        prop::sample::select(vec![(0u8, 0u8), (1, 0), (1, 1), (0, 1)]),
        0..=max_len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_round_trip(seq in steps(8)) {
        if let Ok(u) = path_to_unfinished(&seq) {
            prop_assert_eq!(unfinished_to_path(&u).unwrap(), seq);
            prop_assert!(u.base.is_noncrossing());
        }
    }

    #[test]
    fn zero_envelope_is_coarser_zero_and_idempotent(n in 1usize..=3, seed in any::<u64>(), pick in any::<usize>(), len in 1usize..=5) {
        let g = graph(n, seed);
        let colors: Vec<usize> = (0..len).map(|i| (seed as usize >> (2 * i)) % n).collect();
        let full = enumerate_compatible(&colors, &g, CompatClass::Full).unwrap();
        let p = &full[pick % full.len()];
        let e = env0(p, &colors, &g).unwrap();
        prop_assert!(p.leq(&e));
        prop_assert!(is_compatible(&e, &colors, &g, CompatClass::Zero));
        prop_assert_eq!(env0(&e, &colors, &g).unwrap(), e);
    }

    #[test]
    fn decompositions_round_trip(n in 1usize..=3, seed in any::<u64>(), pick in any::<usize>(), len in 1usize..=6) {
        let g = graph(n, seed);
        let colors: Vec<usize> = (0..len).map(|i| (seed as usize >> (2 * i)) % n).collect();
        let full = enumerate_compatible(&colors, &g, CompatClass::Full).unwrap();
        let p = &full[pick % full.len()];
        prop_assert_eq!(&decompose_zero(p, &colors, &g).unwrap().recompose().unwrap(), p);
        let tilde = enumerate_compatible(&colors, &g, CompatClass::Tilde).unwrap();
        let q = &tilde[pick % tilde.len()];
        prop_assert_eq!(&decompose_tilde(q, &colors, &g).unwrap().recompose().unwrap(), q);
    }

    #[test]
    fn three_bases_and_hilbert_agree(n in 1usize..=3, seed in any::<u64>(), colors in word(3, 5)) {
        let colors: Vec<usize> = colors.into_iter().map(|c| c % n).collect();
        let g = graph(n, seed);
        let dims: Vec<usize> = (0..n).map(|v| 2 + (seed as usize >> v) % 2).collect();
        let fam = MatrixFamily::random(&colors, &dims, seed).unwrap();
        let handles: Vec<usize> = (0..colors.len()).collect();
        let free = joint_moment(&g, &colors, &handles, &fam, CumulantKind::Free).unwrap();
        let boolean = joint_moment(&g, &colors, &handles, &fam, CumulantKind::Boolean).unwrap();
        let classical = joint_moment(&g, &colors, &handles, &fam, CumulantKind::Classical).unwrap();
        prop_assert!(relative_gap(free, boolean) < 1e-9);
        prop_assert!(relative_gap(free, classical) < 1e-9);
        if fam.states.iter().all(|s| matches!(s, AlgebraState::Vector(_))) {
            let space = ProductSpace::from_states(&g, &fam.states, colors.len()).unwrap();
            let h = vacuum_moment(&space, &colors, &fam.matrices()).unwrap();
            prop_assert!(relative_gap(free, h) < 1e-9);
        }
    }

    #[test]
    fn kreweras_squared_is_rotation(len in 1usize..=7, pick in any::<usize>()) {
        let all: Vec<SetPartition> = enumerate_nc(len).unwrap().collect();
        let p = &all[pick % all.len()];
        let k = kreweras(p).unwrap();
        prop_assert!(k.is_noncrossing());
        prop_assert_eq!(p.num_blocks() + k.num_blocks(), len + 1);
        let kk = kreweras(&k).unwrap();
        let shift = |d: usize| SetPartition::from_labels(&(0..len).map(|i| p.labels()[(i + d) % len]).collect::<Vec<_>>());
        prop_assert!(kk == shift(1) || kk == shift(len - 1), "{} -> {}", p, kk);
    }

    #[test]
    fn weingarten_inverts_the_gram_matrix(k in 1usize..=4, n in 4u64..=9, pick in any::<usize>()) {
        let t = weingarten_table(k, n).unwrap();
        let perms: Vec<Permutation> = Permutation::all(k).collect();
        let sigma = &perms[pick % perms.len()];
        let mut sum = BigRational::zero();
        for tau in &perms {
            let w = t.value(&sigma.compose(&tau.inverse()));
            sum += w * BigRational::from_integer(num_traits::pow(BigInt::from(n), tau.num_cycles()));
        }
        let expected = if sigma.is_identity() { BigRational::one() } else { BigRational::zero() };
        prop_assert_eq!(sum, expected);
    }

    #[test]
    fn bigraph_json_round_trip(n in 1usize..=5, seed in any::<u64>()) {
        let g = graph(n, seed);
        let back = Bigraph::from_json_str(&g.to_json_string()).unwrap();
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_expectation_is_unitarily_invariant(seed in any::<u64>(), colors in word(2, 4), n in 4usize..=5) {
        let sites = SiteModel::new(
            vec!["s0".into(), "s1".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0], vec![1]],
            vec![vec![1], vec![]],
        ).unwrap();
        let model = MatrixModel::new(sites, n).unwrap();
        let mats = random_matrices(&model, &colors, seed).unwrap();
        let rotations: Vec<_> = (0..2)
            .map(|v| haar_unitary(model.vertex_dim(v).unwrap(), seed.wrapping_add(v as u64 + 1)).unwrap())
            .collect();
        let rotated: Vec<_> = mats
            .iter()
            .zip(&colors)
            .map(|(a, &c)| &rotations[c] * a * rotations[c].adjoint())
            .collect();
        let before = exact_expectation(&model, &colors, &mats).unwrap();
        let after = exact_expectation(&model, &colors, &rotated).unwrap();
        prop_assert!(relative_gap(before, after) < 1e-10, "{before} vs {after}");
    }
}

use bindep::bigraph::{PairKind, SiteModel};
use bindep::matrix_model::{
    convergence_study, exact_expectation, haar_unitary, limit_moment, monte_carlo, profile_matrices, MatrixModel,
};
use bindep::ncps::{CMatrix, C64};
use bindep::Error;

fn model(s1: Vec<Vec<usize>>, s2: Vec<Vec<usize>>, n_sites: usize, n: usize) -> MatrixModel {
    let vertices = (0..s1.len()).map(|v| format!("v{v}")).collect();
    let sites = (0..n_sites).map(|s| format!("s{s}")).collect();
    MatrixModel::new(SiteModel::new(sites, vertices, s1, s2).unwrap(), n).unwrap()
}

#[test]
fn haar_entries_have_the_right_second_moment() {
    let dim = 6;
    let draws = 4000;
    let mean: f64 = (0..draws)
        .map(|s| haar_unitary(dim, s).unwrap()[(0, 0)].norm_sqr())
        .sum::<f64>()
        / draws as f64;
    // Var |u11|² = (d-1)/(d²(d+1)); five standard errors.
    let se = ((dim as f64 - 1.0) / (dim as f64 * dim as f64 * (dim as f64 + 1.0)) / draws as f64).sqrt();
    assert!((mean - 1.0 / dim as f64).abs() < 5.0 * se, "{mean}");
}

#[test]
fn monte_carlo_is_reproducible_and_within_error_bars() {
    let m = model(vec![vec![0], vec![1]], vec![vec![1], vec![]], 2, 4);
    let colors = [0, 1, 0, 1];
    let mats = profile_matrices(&m, &colors).unwrap();
    let a = monte_carlo(&m, &colors, &mats, 400, 7).unwrap();
    let b = monte_carlo(&m, &colors, &mats, 400, 7).unwrap();
    assert_eq!(a, b);
    let exact = exact_expectation(&m, &colors, &mats).unwrap();
    assert!(
        (a.mean - exact).norm() < 5.0 * a.stderr,
        "{} vs {exact} ({})",
        a.mean,
        a.stderr
    );
}

#[test]
fn standard_error_shrinks_like_inverse_root_of_samples() {
    let m = model(vec![vec![0]], vec![vec![]], 1, 4);
    let colors = [0, 0];
    let mats = profile_matrices(&m, &colors).unwrap();
    let small = monte_carlo(&m, &colors, &mats, 200, 1).unwrap();
    let large = monte_carlo(&m, &colors, &mats, 1800, 1).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((2.0..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn too_few_samples_is_an_error() {
    let m = model(vec![vec![0]], vec![vec![]], 1, 2);
    let mats = profile_matrices(&m, &[0]).unwrap();
    assert!(monte_carlo(&m, &[0], &mats, 1, 0).is_err());
}

#[test]
fn tensor_pair_is_exact_at_every_size() {
    let sites = SiteModel::new(
        vec!["s0".into(), "s1".into()],
        vec!["a".into(), "b".into()],
        vec![vec![0], vec![1]],
        vec![vec![], vec![]],
    )
    .unwrap();
    assert_eq!(sites.bigraph().unwrap().classify_pair(0, 1).unwrap(), PairKind::Tensor);
    let colors = [0, 1, 0, 1];
    let study = convergence_study(
        &sites,
        &colors,
        &|m: &MatrixModel| profile_matrices(m, &colors),
        &[3, 5],
    )
    .unwrap();
    assert!(study.is_exact(), "{:?}", study.rows);
}

#[test]
fn boolean_pair_gap_matches_closed_form() {
    let colors = [0, 1];
    for n in [3usize, 6] {
        let m = model(vec![vec![0], vec![1]], vec![vec![1], vec![0]], 2, n);
        let mats = profile_matrices(&m, &colors).unwrap();
        let tr = |x: &CMatrix| x.trace() / C64::from(n as f64);
        let exact = exact_expectation(&m, &colors, &mats).unwrap();
        let limit = limit_moment(&m, &colors, &mats).unwrap();
        assert!((limit - tr(&mats[0]) * tr(&mats[1])).norm() < 1e-12);
        assert!(
            (exact - limit).norm() < 1e-12,
            "single letters per color give no finite-N gap"
        );
    }
}

#[test]
fn oversized_models_are_refused() {
    let m = model(vec![vec![0, 1, 2]], vec![vec![]], 3, 20);
    let x = CMatrix::identity(2, 2);
    assert!(matches!(
        bindep::matrix_model::embed(&m, 0, &x),
        Err(Error::SizeGuard { .. })
    ));
    assert!(matches!(haar_unitary(5000, 0), Err(Error::SizeGuard { .. })));
}

use lpwidths::analytic::{bridge_lemma1, theorem17_quadrature};
use lpwidths::estimators::{estimate_log_widths, estimate_unnormalized_order_stats, estimate_widths, WidthQuery};
use lpwidths::samplers::{MeasureSpec, RngState};
use lpwidths::sparse_approx::PNorm;

fn pn(v: f64) -> PNorm {
    PNorm::new(v).unwrap()
}

#[test]
fn sparse_tensor_estimates_track_quadrature_in_both_scales() {
    let (p, n) = (pn(1.0), 40);
    let query = WidthQuery::new(PNorm::INFINITY, vec![0, 1, 2, 3], MeasureSpec::tensor_sparse(p, n).unwrap()).unwrap();
    let plain = estimate_widths(&query, 200_000, RngState::new(3, 0), 2).unwrap();
    let logs = estimate_log_widths(&query, 200_000, RngState::new(3, 0), 2).unwrap();
    for m in 0..4 {
        let exact = theorem17_quadrature(p, n, m + 1).unwrap();
        let e = plain[&m];
        assert!((e.mean - exact).abs() < 4.0 * e.std_error, "m={m}: {} vs {exact}", e.mean);
        // Same stream: the log-scale mean is the plain mean.
        assert!((logs[&m].ln_mean.exp() / e.mean - 1.0).abs() < 1e-10);
    }
}

#[test]
fn worker_count_changes_streams_not_the_estimand() {
    let spec = MeasureSpec::cone(pn(0.5), 30).unwrap();
    let query = WidthQuery::new(pn(1.0), vec![0, 5], spec).unwrap();
    let one = estimate_widths(&query, 100_000, RngState::new(9, 4), 1).unwrap();
    let four = estimate_widths(&query, 100_000, RngState::new(9, 4), 4).unwrap();
    let again = estimate_widths(&query, 100_000, RngState::new(9, 4), 4).unwrap();
    assert_eq!(four, again);
    for m in [0, 5] {
        let (a, b) = (one[&m], four[&m]);
        assert!((a.mean - b.mean).abs() < 5.0 * a.std_error.hypot(b.std_error));
    }
}

#[test]
fn bridge_connects_sphere_and_free_variates() {
    let (p, n) = (pn(2.0), 12);
    let query = WidthQuery::new(PNorm::INFINITY, vec![1], MeasureSpec::cone(p, n).unwrap()).unwrap();
    let sphere = estimate_widths(&query, 200_000, RngState::new(1, 0), 2).unwrap()[&1];
    let free = estimate_unnormalized_order_stats(p, n, &[2], 200_000, RngState::new(1, 1), 2).unwrap()[&2];
    let b = bridge_lemma1(p, n).unwrap().value;
    let se = sphere.std_error.hypot(b * free.std_error);
    assert!((sphere.mean - b * free.mean).abs() < 4.0 * se);
}

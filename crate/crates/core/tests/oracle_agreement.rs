use chsh_meter::chsh::{chsh_value, f_max_analytic, g_max_analytic, g_value};
use chsh_meter::oracle::{grid_scan_f, maximize_f, maximize_g, OptimizerConfig};
use chsh_meter::quantum::decompose_bloch;
use chsh_meter::states::random_state;

#[test]
fn optimizer_matches_closed_forms_on_random_states() {
    let mut worst_f: f64 = 0.0;
    let mut worst_g: f64 = 0.0;
    for seed in 0..500u64 {
        let d = decompose_bloch(&random_state(seed));
        let cfg = OptimizerConfig::with_seed(seed);
        let (f, fs) = f_max_analytic(&d);
        let (g, gs) = g_max_analytic(&d);
        assert!((chsh_value(&d, &fs) - f).abs() <= 1e-9);
        assert!((g_value(&d, &gs) - g).abs() <= 1e-9);

        let of = maximize_f(&d, &cfg);
        let og = maximize_g(&d, &cfg);
        assert_eq!(of.value, chsh_value(&d, &of.settings));
        worst_f = worst_f.max((of.value - f).abs());
        worst_g = worst_g.max((og.value - g).abs());
        assert!((of.value - f).abs() <= 1e-7, "seed {seed}: oracle F {} vs analytic {f}", of.value);
        assert!((og.value - g).abs() <= 1e-7, "seed {seed}: oracle G {} vs analytic {g}", og.value);
    }
    println!("worst |ΔF| = {worst_f:e}, worst |ΔG| = {worst_g:e}");
}

#[test]
fn grid_scan_never_beats_the_optimizer() {
    for seed in 0..20u64 {
        let d = decompose_bloch(&random_state(seed));
        let scan = grid_scan_f(&d, 12).unwrap();
        let best = maximize_f(&d, &OptimizerConfig::with_seed(seed)).value;
        assert!(scan <= best + 1e-12, "seed {seed}: scan {scan} > optimizer {best}");
        // A 12-point grid lands within a few percent of the optimum.
        assert!(scan >= 0.9 * best, "seed {seed}: scan {scan} far below {best}");
    }
}

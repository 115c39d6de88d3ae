use nullctl::semigroup_approx::{semigroup_diff, DiffOptions};
use nullctl::spectral::{build_basis, BoxDomain, PotentialSpec, SpectralField};

#[test]
fn inequality_grid_has_no_violations() {
    for d in [1, 2] {
        let b = build_basis(BoxDomain::new(d, 1.0).unwrap(), PotentialSpec::zero(d), 8).unwrap();
        let u0 = SpectralField::mode(b, &vec![1; d]).unwrap();
        for t in [0.05, 0.1, 0.5] {
            let mut last = f64::INFINITY;
            for l in [2.0, 4.0, 8.0] {
                let r = semigroup_diff(&u0, t, l, DiffOptions::default()).unwrap();
                eprintln!(
                    "d={d} t={t} L={l} a={:.3e} b={:.3e} c={:.3e} bound={:.3e} gap={:.1e} leak={:.1e} budget={:.1e}",
                    r.inside, r.outside, r.total, r.bound_c, r.pythagoras_gap, r.leakage, r.budget
                );
                assert_eq!(r.violations(), 0);
                assert!(r.pythagoras_gap <= 1e-10);
                assert!(r.total <= last);
                last = r.total;
            }
        }
    }
}

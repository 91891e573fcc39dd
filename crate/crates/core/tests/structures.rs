//! Invariants of algebroids, connections and representations on seeded
//! random instances.

use proptest::prelude::*;
use vbrep::algebroid::koszul_d;
use vbrep::random::{sample_algebroids, Gen};
use vbrep::rep2::{compose, gauge_iso, Rep2, RepMorphism};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sample_algebroids_satisfy_the_axioms(i in 0usize..8) {
        let pool = sample_algebroids();
        let a = &pool[i % pool.len()];
        prop_assert!(a.verify().passed());
    }

    #[test]
    fn koszul_square_is_curvature(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.algebroid();
        let nab = g.connection(&a, 2);
        // d_∇² s = R s on 0-forms
        let s = g.form(a.rank(), 0, 2, 1, a.dim());
        let dd = koszul_d(&nab, &koszul_d(&nab, &s).unwrap()).unwrap();
        for (t, m) in dd.components() {
            prop_assert_eq!(m, &(&nab.curvature_frame(t[0], t[1]) * s.get(&[])));
        }
    }

    #[test]
    fn dual_is_an_involution(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let r = g.rep_shaped();
        prop_assert_eq!(r.dual().dual(), r.clone());
        prop_assert_eq!(r.dual().verify().passed(), r.verify().passed());
    }

    #[test]
    fn gauge_action_is_additive_and_preserves_verdicts(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let r = if seed % 2 == 0 { g.passing_rep() } else { g.rep_shaped() };
        let (phi, psi) = (g.gauge(&r), g.gauge(&r));
        let once = r.gauge(&phi).unwrap();
        prop_assert_eq!(once.gauge(&psi).unwrap(), r.gauge(&phi.checked_add(&psi).unwrap()).unwrap());
        prop_assert_eq!(r.gauge(&r.zero_gauge()).unwrap(), r.clone());
        prop_assert_eq!(once.verify().passed(), r.verify().passed());
        prop_assert!(gauge_iso(&r, &phi).unwrap().verify().unwrap().passed());
    }

    #[test]
    fn gauge_isomorphisms_compose(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let r = g.passing_rep();
        let (phi, psi) = (g.gauge(&r), g.gauge(&r));
        let gp = r.gauge(&phi).unwrap();
        // r.gauge(φ).gauge(ψ) → r.gauge(φ) → r
        let m = compose(&gauge_iso(&gp, &psi).unwrap(), &gauge_iso(&r, &phi).unwrap()).unwrap();
        prop_assert!(m.verify().unwrap().passed());
        let id = RepMorphism::identity(&r);
        prop_assert!(id.verify().unwrap().passed());
    }

    #[test]
    fn adjoint_representations_pass(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.algebroid();
        let nab = g.tm_connection(a.chart(), a.rank());
        let ad = Rep2::adjoint(a, &nab).unwrap();
        prop_assert!(ad.verify().passed(), "{}", ad.verify());
    }
}

use proptest::prelude::*;

use umbilic_core::morse::MorseType;
use umbilic_core::unfolding::{
    critical_points_g, critical_value_graph, discriminant_section, embedded_params, inside,
    UnfoldingParams,
};

#[test]
fn census_along_embedding_line() {
    for k in 1..100 {
        let s = k as f64 / 100.0 / 72.0;
        assert!(inside(s), "s={s}");
    }
    for k in 1..=100 {
        let s = 1.0 / 72.0 + (0.25 - 1.0 / 72.0) * k as f64 / 100.0;
        assert_eq!(critical_points_g(&embedded_params(s)).len(), 2, "s={s}");
    }
}

#[test]
fn doubling_samples_keeps_geometry() {
    let a = discriminant_section(0.5, 96).unwrap();
    let b = discriminant_section(0.5, 192).unwrap();
    for (k, smp) in a.samples.iter().enumerate() {
        let other = &b.samples[2 * k];
        assert!((smp.u - other.u).abs() <= 1e-9 && (smp.v - other.v).abs() <= 1e-9);
    }
    assert_eq!(a.cusps.len(), b.cusps.len());
    for c in &a.cusps {
        assert!(b
            .cusps
            .iter()
            .any(|d| (c[0] - d[0]).abs() <= 1e-9 && (c[1] - d[1]).abs() <= 1e-9));
    }
}

#[test]
fn discriminant_samples_are_degenerate_critical_points() {
    let curve = discriminant_section(0.5, 48).unwrap();
    for smp in &curve.samples {
        let p = UnfoldingParams::new(0.5, smp.u, smp.v);
        let g = p.gradient(smp.x, smp.y);
        assert!(
            g[0].hypot(g[1]) < 1e-12,
            "gradient {g:?} at {:?}",
            (smp.u, smp.v)
        );
        assert!(p.hessian(smp.x, smp.y).det().abs() < 1e-12);
    }
}

#[test]
fn value_graph_sheets() {
    let g = critical_value_graph(0.5, (-0.05, 0.15), (-0.05, 0.05), 64).unwrap();
    assert!(g.len() <= 4 * 64 * 64);
    assert!(g
        .iter()
        .all(|r| r.morse != MorseType::Degenerate || r.z.is_finite()));
}

proptest! {
    #[test]
    fn real_root_count_is_even_off_the_discriminant(w in -1.0..1.0f64, u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let p = UnfoldingParams::new(w, u, v);
        let pts = critical_points_g(&p);
        let degenerate = pts.iter().any(|q| q.hessian.det().abs() < 1e-6);
        prop_assume!(!degenerate);
        prop_assert_eq!(pts.len() % 2, 0);
        for q in &pts {
            let g = p.gradient(q.position[0], q.position[1]);
            prop_assert!(g[0].hypot(g[1]) < 1e-10);
        }
    }
}

mod common;

use common::{awgn, layered, mac, two_user, Oracle};
use dirty_region::channels::{decompose_backward, decompose_forward, IcParams, MacHelperParams, PowerSplit, ZicParams};
use dirty_region::ic::{ic_strong_point, ic_vs_capacity, ic_vs_coefficients, ic_vs_residuals, ic_weak_sum_capacity};
use dirty_region::mac_helper::{
    classify, f_rate, g_rate, inner_envelope, optimizer, outer_envelope, outer_term, rho_star, InnerGrid, Label,
};
use dirty_region::region::RatePoint;
use dirty_region::z_ic::{
    zic_strong_point, zic_strong_segment, zic_vs_capacity, zic_vs_coefficients, zic_vs_condition, zic_weak_sum_capacity,
};
use proptest::prelude::*;

fn mac_params() -> impl Strategy<Value = MacHelperParams> {
    (0.1..10.0f64, 0.1..6.0f64, 0.1..6.0f64, 0.1..15.0f64)
        .prop_map(|(p0, p1, p2, q)| MacHelperParams::new(p0, p1, p2, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn helper_rates_match_oracle(p in mac_params(), alpha in -1.0..2.5f64, t in -0.95..0.95f64) {
        let beta = t * p.beta_bound();
        let o = mac(p.p0, p.p1, p.p2, p.q, alpha, beta);
        let f = o.mi(&["U", "X1"], &["Y"], &["X2"]) - o.mi(&["U"], &["S"], &[]);
        let g = o.mi(&["X1"], &["Y"], &["X2", "U"]);
        prop_assert!((f_rate(&p, alpha, beta, p.p1).unwrap() - f).abs() < 1e-9);
        prop_assert!((g_rate(&p, alpha, beta, p.p1).unwrap() - g).abs() < 1e-9);
        // the sum constraint: U, X1, X2 jointly
        let fs = o.mi(&["U", "X1", "X2"], &["Y"], &[]) - o.mi(&["U"], &["S"], &[]);
        prop_assert!((f_rate(&p, alpha, beta, p.p1 + p.p2).unwrap() - fs).abs() < 1e-9);
    }

    #[test]
    fn optimizer_meets_outer_first_term(p in mac_params()) {
        for power in [p.p1, p.p2, p.p1 + p.p2] {
            let (c, rs) = optimizer(&p, power).unwrap();
            let f = f_rate(&p, c.alpha, c.beta, power).unwrap();
            prop_assert!((f - rs.value).abs() < 1e-9, "f {f} vs T {}", rs.value);
        }
    }

    #[test]
    fn rho_star_beats_dense_grid(p in mac_params()) {
        let rs = rho_star(&p, p.p1).unwrap();
        let best = (0..=4000)
            .map(|i| outer_term(&p, p.p1, -1.0 + i as f64 / 2000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(rs.value >= best - 1e-12);
        prop_assert!(rs.rho.abs() <= 1.0);
    }

    #[test]
    fn sum_label_implies_single_labels(p in mac_params()) {
        let c = classify(&p).unwrap();
        if c.labels[2] == Label::C {
            prop_assert_eq!(c.labels[0], Label::C);
            prop_assert_eq!(c.labels[1], Label::C);
        }
        prop_assert!(c.case().is_some());
    }

    #[test]
    fn decompositions_preserve_variance(q1 in 0.1..5.0f64, q2 in 0.1..5.0f64, rho in -1.0..1.0f64) {
        let f = decompose_forward(q1, q2, rho).unwrap();
        prop_assert!((f.coefficient * f.coefficient * q2 + f.residual - q1).abs() < 1e-12);
        let b = decompose_backward(q1, q2, rho).unwrap();
        prop_assert!((b.coefficient * b.coefficient * q1 + b.residual - q2).abs() < 1e-12);
        // covariance of the two states agrees either way
        prop_assert!((f.coefficient * q2 - b.coefficient * q1).abs() < 1e-12);
    }

    #[test]
    fn zic_very_strong_against_oracle(
        a in 0.0..6.0f64, p1 in 0.2..4.0f64, p2 in 0.2..4.0f64,
        q1 in 0.2..3.0f64, q2 in 0.2..3.0f64, rho in -0.95..0.95f64,
    ) {
        let p = ZicParams::new(a, p1, p2, q1, q2, rho).unwrap();
        let d = rho * (q1 / q2).sqrt();
        let g = p1 / (p1 + 1.0);
        let beta = p2 / (p2 + 1.0);
        let c = zic_vs_coefficients(&p);
        prop_assert!((c.alpha1 - g * (d - a * beta)).abs() < 1e-12);
        let o = two_user(a, 0.0, p1, p2, q1, q2, d, (g, g * (d - a * beta)), (0.0, beta));
        let u = o.mi(&["U"], &["V", "Y1"], &[]) - o.mi(&["S1p", "S2"], &["U"], &[]);
        let v = o.mi(&["V"], &["Y2"], &[]) - o.mi(&["S2"], &["V"], &[]);
        prop_assert!((u - awgn(p1)).abs() < 1e-9);
        prop_assert!((v - awgn(p2)).abs() < 1e-9);
        let margin = o.mi(&["V"], &["Y1"], &[]) - o.mi(&["V"], &["Y2"], &[]);
        prop_assert!((zic_vs_condition(&p).unwrap().margin - margin).abs() < 1e-9);
    }

    #[test]
    fn ic_very_strong_against_oracle(
        a in 0.0..5.0f64, b in 0.0..5.0f64, p1 in 0.2..4.0f64, p2 in 0.2..4.0f64,
        q1 in 0.2..3.0f64, q2 in 0.2..3.0f64, rho in -0.95..0.95f64,
    ) {
        let p = IcParams::new(a, b, p1, p2, q1, q2, rho).unwrap();
        let det = (p1 + 1.0) * (p2 + 1.0) - a * b * p1 * p2;
        prop_assume!(det.abs() > 0.05);
        let d = rho * (q1 / q2).sqrt();
        let c = ic_vs_coefficients(&p).unwrap();
        let o = two_user(a, b, p1, p2, q1, q2, d, (c.alpha1, c.alpha2), (c.beta1, c.beta2));
        let u = o.mi(&["U"], &["V", "Y1"], &[]) - o.mi(&["S1p", "S2"], &["U"], &[]);
        let v = o.mi(&["V"], &["U", "Y2"], &[]) - o.mi(&["S1p", "S2"], &["V"], &[]);
        prop_assert!((u - awgn(p1)).abs() < 1e-8, "{u} vs {}", awgn(p1));
        prop_assert!((v - awgn(p2)).abs() < 1e-8, "{v} vs {}", awgn(p2));
        let scale = 1.0 + c.alpha1.abs() + c.alpha2.abs() + c.beta1.abs() + c.beta2.abs();
        for r in ic_vs_residuals(&p, &c) {
            prop_assert!(r.abs() < 1e-10 * scale * (1.0 + p1) * (1.0 + p2));
        }
    }

    #[test]
    fn layered_rates_against_oracle(
        p1 in 0.5..4.0f64, t in 0.0..1.0f64, p2 in 0.2..3.0f64,
        q1 in 0.2..3.0f64, q2 in 0.2..3.0f64, rho in -0.95..0.95f64, b in 0.0..3.0f64, s in 0.0..1.0f64,
    ) {
        let a = (1.0 + t * p1).sqrt();
        let private = s * p1;
        let z = ZicParams::new(a, p1, p2, q1, q2, rho).unwrap();
        let pt = zic_strong_point(&z, private).unwrap();
        let c = rho * (q2 / q1).sqrt();
        let o = layered(a, 0.0, p1 - private, private, p2, q1, q2 * (1.0 - rho * rho), c);
        let r1c = o.mi(&["U1"], &["Y1"], &[]) - o.mi(&["U1"], &["S1"], &[]);
        let r1p = o.mi(&["U2"], &["V", "Y1"], &["U1"]) - o.mi(&["U2"], &["S1"], &["U1"]);
        let r2 = o.mi(&["V"], &["U1", "Y1"], &[]) - o.mi(&["V"], &["S1"], &[]);
        prop_assert!((pt.rates.r1_common - r1c).abs() < 1e-9);
        prop_assert!((pt.rates.r1_private - r1p).abs() < 1e-9);
        prop_assert!((pt.rates.r2 - r2).abs() < 1e-9);
        let margin = o.mi(&["V"], &["Y2"], &[]) - o.mi(&["V"], &["U1", "Y1"], &[]);
        prop_assert!((pt.conditions[0].margin - margin).abs() < 1e-9);
        // the same split on an IC with b: receiver-2 margins
        let ic = IcParams { b: b.max(1.0), ..z.as_ic() };
        if let Ok(ip) = ic_strong_point(&ic, private) {
            if !ip.swapped {
                let o = layered(a, ic.b, p1 - private, private, p2, q1, q2 * (1.0 - rho * rho), c);
                let m3 = o.mi(&["V"], &["Y2"], &["U1"]) - o.mi(&["V"], &["S1"], &[]) - ip.rates.r2;
                prop_assert!((ip.conditions[2].margin - m3).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn inner_envelope_below_outer() {
    let p = MacHelperParams::new(5.0, 2.5, 2.5, 12.0).unwrap();
    let inner = inner_envelope(&p, InnerGrid::default()).unwrap();
    let outer = outer_envelope(&p, 401).unwrap();
    let ci = inner.boundary(201).unwrap();
    for pt in &ci.points {
        assert!(outer.margin(*pt) >= -1e-9, "{pt:?} escapes the outer bound");
    }
    assert!(inner.max_sum() <= outer.max_sum() + 1e-9);
}

#[test]
fn no_state_mac_is_the_gaussian_pentagon() {
    let p = MacHelperParams::new(1.0, 2.0, 3.0, 0.0).unwrap();
    let r = inner_envelope(&p, InnerGrid::default()).unwrap();
    assert!((r.max_sum() - awgn(5.0)).abs() < 1e-12);
    assert!(r.contains(RatePoint::new(awgn(2.0), awgn(3.0 / 3.0))));
}

#[test]
fn weak_sums() {
    let z = ZicParams::new(0.5, 2.0, 1.0, 1.0, 1.0, 0.3).unwrap();
    assert!((zic_weak_sum_capacity(&z).unwrap() - (awgn(2.0 / 1.25) + awgn(1.0))).abs() < 1e-15);
    let ic = IcParams::new(0.2, 0.1, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    // |0.2(1.01)| + |0.1(1.04)| < 1
    assert!((ic_weak_sum_capacity(&ic).unwrap() - (awgn(1.0 / 1.04) + awgn(1.0 / 1.01))).abs() < 1e-15);
}

#[test]
fn very_strong_capacity_is_the_rectangle_when_it_holds() {
    let p = ZicParams::with_forward(4.0, 2.0, 2.0, 1.0, 1.0, 0.5).unwrap();
    let r = zic_vs_capacity(&p).unwrap();
    assert!(r.condition.passed);
    let rect = r.region.unwrap();
    assert!((rect.m1 - awgn(2.0)).abs() < 1e-15 && (rect.m2 - awgn(2.0)).abs() < 1e-15);
    let ic = IcParams::with_forward(4.0, 4.0, 1.0, 1.0, 0.9, 0.9, 0.99).unwrap();
    let r = ic_vs_capacity(&ic).unwrap();
    assert!(r.identity_residuals.iter().all(|x| x.abs() < 1e-9));
}

#[test]
fn segment_is_a_suffix_of_the_scan() {
    for c in [0.62, 0.66, 0.7] {
        let p = ZicParams::with_backward(1.2, 1.0, 1.0, 2.0, 1.0, c).unwrap();
        let s = zic_strong_segment(&p).unwrap();
        assert!(!s.prefix_violation);
        let seg = s.segment.expect("segment");
        assert_eq!(seg.hi, 1.0);
        // every point of the segment passes, the scan point just below does not
        for x in [seg.lo, 0.5 * (seg.lo + seg.hi), seg.hi] {
            assert!(zic_strong_point(&p, x).unwrap().passed, "{c} {x}");
        }
        if seg.lo > s.scanned.lo + 1e-6 {
            assert!(!zic_strong_point(&p, seg.lo - 1e-6).unwrap().passed);
        }
    }
}

#[test]
fn power_split_rejects_overdraw() {
    assert!(PowerSplit::new(0.7, 0.4, 1.0).is_err());
    assert!(PowerSplit::full(1.0, 1.2).is_err());
    let _ = Oracle::new(&[("X", 1.0)], &[]);
}

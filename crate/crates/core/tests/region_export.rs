use dirty_region::mac_helper::{inner_envelope, InnerGrid};
use dirty_region::channels::MacHelperParams;
use dirty_region::region::{
    convexify, curve_to_csv, render_svg, upper_envelope, Binding, BoundaryCurve, Pentagon, PlotSpec, RatePoint,
    RateRegion, Series, CSV_HEADER,
};
use proptest::prelude::*;

fn golden_plot() -> (String, String) {
    let p = Pentagon::new(0.5, 0.5, 0.79);
    let curve = upper_envelope(&[p], 11).unwrap();
    let spec = PlotSpec::new("Fixed pentagon", "R1 (bits)", "R2 (bits)").with(Series::from_curve("boundary", &curve));
    (curve_to_csv(&curve), render_svg(&spec))
}

#[test]
fn golden_pentagon_files() {
    let (csv, svg) = golden_plot();
    if std::env::var_os("DIRTY_REGION_BLESS").is_some() {
        std::fs::write(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/pentagon.csv"), &csv).unwrap();
        std::fs::write(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/pentagon.svg"), &svg).unwrap();
    }
    assert_eq!(csv, include_str!("golden/pentagon.csv"));
    assert_eq!(svg, include_str!("golden/pentagon.svg"));
}

#[test]
fn empty_and_single_point_csv() {
    assert_eq!(curve_to_csv(&BoundaryCurve::default()), format!("{CSV_HEADER}\n"));
    let mut c = BoundaryCurve::default();
    c.push(RatePoint::new(0.25, 0.125), Binding::R2);
    assert_eq!(curve_to_csv(&c), format!("{CSV_HEADER}\n0.25,0.125,r2\n"));
}

#[test]
fn vertices_of_reference_pentagon() {
    let v = Pentagon::new(0.5, 0.5, 0.79).vertices();
    let want = [(0.0, 0.0), (0.5, 0.0), (0.5, 0.29), (0.29, 0.5), (0.0, 0.5)];
    assert_eq!(v.len(), want.len());
    for (p, w) in v.iter().zip(want) {
        assert!((p.r1 - w.0).abs() < 1e-12 && (p.r2 - w.1).abs() < 1e-12, "{p:?}");
    }
    assert_eq!(Pentagon::new(0.5, 0.5, 1.2).vertices().len(), 4);
}

fn pentagon() -> impl Strategy<Value = Pentagon> {
    (0.0..3.0f64, 0.0..3.0f64, 0.0..1.0f64).prop_map(|(m1, m2, t)| {
        let lo = m1.max(m2);
        Pentagon::new(m1, m2, lo + t * (m1 + m2 - lo))
    })
}

proptest! {
    #[test]
    fn boundary_points_lie_on_the_region(ps in prop::collection::vec(pentagon(), 1..6)) {
        let region = RateRegion::new(ps.clone());
        let curve = region.boundary(101).unwrap();
        for w in curve.points.windows(2) {
            prop_assert!(w[1].r1 > w[0].r1);
            prop_assert!(w[1].r2 <= w[0].r2 + 1e-12);
        }
        for pt in &curve.points {
            prop_assert!(region.margin(*pt) >= -1e-9);
            prop_assert!(!region.contains(RatePoint::new(pt.r1, pt.r2 + 1e-3)));
        }
    }

    #[test]
    fn envelope_dominates_each_member(ps in prop::collection::vec(pentagon(), 1..6)) {
        let curve = upper_envelope(&ps, 101).unwrap();
        for p in &ps {
            for pt in &curve.points {
                if let Some(r2) = p.r2_at(pt.r1) {
                    prop_assert!(pt.r2 >= r2 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn convexified_curve_dominates(ps in prop::collection::vec(pentagon(), 1..6)) {
        let curve = upper_envelope(&ps, 101).unwrap();
        let hull = convexify(&curve);
        for pt in &curve.points {
            let h = hull.r2_at(pt.r1).unwrap();
            prop_assert!(h >= pt.r2 - 1e-12);
        }
    }
}

#[test]
fn empty_envelope_is_an_error() {
    assert!(upper_envelope(&[], 11).is_err());
}

#[test]
fn helper_region_boundary_is_monotone() {
    let p = MacHelperParams::new(5.0, 2.5, 2.5, 12.0).unwrap();
    let r = inner_envelope(&p, InnerGrid { alpha_points: 65, beta_points: 33, refine: true }).unwrap();
    let c = r.boundary(101).unwrap();
    assert!(c.points.windows(2).all(|w| w[1].r2 <= w[0].r2 + 1e-12));
}

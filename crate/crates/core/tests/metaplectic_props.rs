//! Catalog-driven checks of the double-cover invariants: the seeded
//! symplectic identity corpus, exponential lifts against the half-sum
//! character, component automorphisms against hand-built lagrangian models,
//! hyperbolic-chamber independence of the square-root characters, moved-plane
//! orientation transport, and conjugation invariance.

use num_traits::{One, Zero};
use orbitlab_core::linalg::{self, RVec};
use orbitlab_core::metaplectic::{
    check_identities, delta_on_stabilizer_cover, exp_lift_sheet, moved_orientation,
    rho_lagrangian, rho_on_stabilizer_cover, rho_root_lagrangian, CoverValue, LagrangianData,
    LiftedElliptic,
};
use orbitlab_core::params::{
    build_positive_system, enumerate_a_chambers, EllipticPoint, LinearFormSS, ParamTilde,
    PositiveSystemData,
};
use orbitlab_core::phase::{AnglePi, ExactC};
use orbitlab_core::rat::{rat, rint, Rat};
use orbitlab_core::realform::{Catalog, RealGroup};
use proptest::prelude::*;

fn group<'a>(cat: &'a Catalog, name: &str) -> &'a RealGroup {
    cat.group(name).expect("catalog group")
}

/// Splits a seed functional into its conjugation eigenparts on a frame.
fn form_on(g: &RealGroup, frame: usize, seed: &RVec) -> LinearFormSS {
    let s = linalg::mat_vec(&g.frames[frame].sigma_form, seed);
    LinearFormSS::new(
        linalg::scale(&rat(1, 2), &linalg::sub(seed, &s)),
        linalg::scale(&rat(1, 2), &linalg::add(seed, &s)),
    )
}

/// Projects a seed angle vector onto the elliptic part of the Cartan.
fn elliptic_x(g: &RealGroup, frame: usize, seed: &RVec) -> RVec {
    let s = linalg::mat_vec(&g.frames[frame].sigma_point, seed);
    linalg::scale(&rat(1, 2), &linalg::sub(seed, &s))
}

/// Positive system of the parameter with the given seed functional, taken in
/// the first hyperbolic chamber.
fn psd_for(g: &RealGroup, frame: usize, seed: &RVec) -> PositiveSystemData {
    let pt = ParamTilde::new(frame, form_on(g, frame, seed), vec![]);
    let chambers = enumerate_a_chambers(g, &pt).expect("chambers");
    build_positive_system(g, &pt, &chambers[0]).expect("positive system")
}

fn half_sum_unit(g: &RealGroup, psd: &PositiveSystemData, x: &RVec) -> CoverValue {
    let hs = g.datum.half_sum(&psd.rplus_g_h);
    CoverValue::from_unit(ExactC::unit(&AnglePi(linalg::dot(&hs, x))))
}

#[test]
fn seeded_identity_corpus_is_clean() {
    let report = check_identities(2_718_281_828, 220);
    assert_eq!(report.cases, 220);
    assert!(report.passed(), "{}", report.failures.join("\n"));
}

#[test]
fn exponential_lifts_carry_the_half_sum_character() {
    let cat = Catalog::builtin();
    let cases: Vec<(&str, &str, RVec, RVec)> = vec![
        ("su2", "compact", vec![rat(1, 3)], vec![rint(1)]),
        ("su2", "compact", vec![rat(5, 3)], vec![rint(1)]),
        ("sl2R", "compact", vec![rat(1, 3)], vec![rint(1)]),
        ("sl2R", "compact", vec![rat(7, 5)], vec![rint(3)]),
        (
            "sl3R",
            "fundamental",
            vec![rat(1, 3), Rat::zero()],
            vec![rint(3), rat(1, 7)],
        ),
        (
            "sp4R",
            "fundamental",
            vec![rat(1, 5), rat(1, 7)],
            vec![rint(1), rat(1, 3)],
        ),
        (
            "sp4R",
            "intermediate-short",
            vec![rat(1, 3), Rat::zero()],
            vec![rint(5), rat(1, 7)],
        ),
        (
            "sl2Rsq_swap",
            "cc",
            vec![rat(1, 5), rat(1, 3)],
            vec![rint(1), rat(1, 3)],
        ),
    ];
    for (gname, fname, xseed, lseed) in cases {
        let g = group(cat, gname);
        let fi = g.frame_named(fname).expect("frame");
        let x = elliptic_x(g, fi, &xseed);
        let psd = psd_for(g, fi, &lseed);
        let sheet = exp_lift_sheet(g, fi, &psd, &x).expect("lift sheet");
        let lifted = LiftedElliptic {
            point: EllipticPoint::torus(g, fi, x.clone()),
            sheet,
        };
        let got = rho_on_stabilizer_cover(g, &psd, &lifted).expect("rho");
        assert_eq!(got, half_sum_unit(g, &psd, &x), "{gname}/{fname} x={x:?}");
    }
}

#[test]
fn the_nontrivial_deck_element_acts_by_minus_one() {
    let cat = Catalog::builtin();
    let cases: Vec<(&str, &str, RVec)> = vec![
        ("su2", "compact", vec![rint(1)]),
        ("sl3R", "fundamental", vec![rint(3), rat(1, 7)]),
        ("sl2Rsq_swap", "cc", vec![rint(1), rat(1, 3)]),
    ];
    let minus_one = CoverValue::from_unit(ExactC::from_int(-1));
    for (gname, fname, lseed) in cases {
        let g = group(cat, gname);
        let fi = g.frame_named(fname).expect("frame");
        let psd = psd_for(g, fi, &lseed);
        let one = LiftedElliptic {
            point: EllipticPoint::identity(g, fi),
            sheet: 1,
        };
        let iota = LiftedElliptic {
            point: EllipticPoint::identity(g, fi),
            sheet: -1,
        };
        assert_eq!(
            delta_on_stabilizer_cover(g, &psd, &one).expect("delta"),
            CoverValue::one(),
            "{gname}"
        );
        assert_eq!(
            delta_on_stabilizer_cover(g, &psd, &iota).expect("delta"),
            minus_one,
            "{gname}"
        );
        assert_eq!(
            rho_on_stabilizer_cover(g, &psd, &iota).expect("rho"),
            minus_one,
            "{gname}"
        );
    }
}

#[test]
fn swap_rotation_cover_value_matches_its_lagrangian_model() {
    let cat = Catalog::builtin();
    let g = group(cat, "sl2Rsq_swap");
    let fi = g.frame_named("cc").expect("frame");
    let psd = psd_for(g, fi, &vec![rint(1), rint(1)]);
    let samples: Vec<RVec> = vec![
        vec![Rat::zero(), Rat::zero()],
        vec![rat(1, 3), rat(1, 5)],
        vec![rat(1, 2), rat(1, 2)],
        vec![rint(1), rint(1)],
    ];
    for x in samples {
        let s = &x[0] + &x[1];
        for sheet in [1i32, -1] {
            let point = EllipticPoint {
                frame: fi,
                auto_name: Some("swap".to_string()),
                weyl: g.datum.weyl().identity(),
                angles: x.clone(),
            };
            let lifted = LiftedElliptic { point, sheet };
            let got = rho_on_stabilizer_cover(g, &psd, &lifted).expect("rho");
            // the swap glues the two noncompact root lines into one orbit
            // with eigenvalue angles s and s+1 on the spanned lagrangian
            let mut eigen = Vec::new();
            let mut unit_sig = Vec::new();
            for t in [s.clone(), s.clone() + Rat::one()] {
                let th = AnglePi(t).window_neg();
                if th.0.is_zero() {
                    continue;
                }
                eigen.push((Rat::one(), th.clone(), 1));
                unit_sig.push((th, 1, 0));
            }
            let lag = LagrangianData {
                eigen,
                unit_sig,
                cross_rank: vec![],
            };
            let oracle = rho_lagrangian(&lag, sheet).expect("lagrangian rho");
            assert_eq!(got, oracle, "x = {x:?} sheet {sheet}");
        }
    }
}

#[test]
fn square_root_characters_ignore_the_hyperbolic_chamber() {
    let cat = Catalog::builtin();
    let cases: Vec<(&str, &str, Vec<RVec>)> = vec![
        ("sl2R", "split", vec![vec![rint(1)], vec![rint(2)]]),
        ("psl2R", "split", vec![vec![rat(1, 2)], vec![rint(1)]]),
        (
            "sl2Rsq_swap",
            "ss",
            vec![vec![rint(1), Rat::zero()], vec![rint(1), rint(1)]],
        ),
    ];
    for (gname, fname, points) in cases {
        let g = group(cat, gname);
        let fi = g.frame_named(fname).expect("frame");
        let rank = g.datum.rank();
        let pt = ParamTilde::new(
            fi,
            LinearFormSS::new(linalg::zeros(rank), linalg::zeros(rank)),
            vec![],
        );
        let chambers = enumerate_a_chambers(g, &pt).expect("chambers");
        assert!(chambers.len() >= 2, "{gname}: expected several chambers");
        let psds: Vec<PositiveSystemData> = chambers
            .iter()
            .map(|c| build_positive_system(g, &pt, c).expect("positive system"))
            .collect();
        let mut all_points = vec![linalg::zeros(rank)];
        all_points.extend(points);
        for x in &all_points {
            for sheet in [1i32, -1] {
                let values: Vec<(CoverValue, CoverValue)> = psds
                    .iter()
                    .map(|psd| {
                        let lifted = LiftedElliptic {
                            point: EllipticPoint::torus(g, fi, x.clone()),
                            sheet,
                        };
                        let delta =
                            delta_on_stabilizer_cover(g, psd, &lifted).expect("delta");
                        let tau = rho_root_lagrangian(
                            g,
                            psd,
                            &psd.rplus_lambdatilde_aplus,
                            &lifted,
                        )
                        .expect("tau");
                        (delta, tau)
                    })
                    .collect();
                for v in &values[1..] {
                    assert_eq!(*v, values[0], "{gname} x={x:?} sheet {sheet}");
                }
            }
        }
    }
}

#[test]
fn moved_plane_orientations_agree_between_the_two_forms() {
    let cat = Catalog::builtin();
    // (group, frame, seed functional, torus points, elliptic seeds)
    type Case = (
        &'static str,
        &'static str,
        RVec,
        Vec<RVec>,
        Vec<RVec>,
    );
    let cases: Vec<Case> = vec![
        (
            "sl2R",
            "split",
            vec![rint(1)],
            vec![vec![rint(1)], vec![rint(2)]],
            vec![],
        ),
        (
            "psl2R",
            "split",
            vec![rint(1)],
            vec![vec![rat(1, 2)], vec![rint(1)]],
            vec![],
        ),
        (
            "sl3R",
            "fundamental",
            vec![rint(3), rat(1, 7)],
            vec![],
            vec![vec![rat(1, 3), Rat::zero()], vec![rat(1, 5), rat(1, 9)]],
        ),
        (
            "sp4R",
            "fundamental",
            vec![rint(1), rat(1, 3)],
            vec![],
            vec![vec![rat(1, 5), rat(1, 7)], vec![rat(1, 2), rat(1, 3)]],
        ),
        (
            "sp4R",
            "intermediate-short",
            vec![rint(5), rat(1, 7)],
            vec![],
            vec![vec![rat(1, 3), Rat::zero()], vec![rat(2, 7), rat(1, 5)]],
        ),
        (
            "sl2Rsq_swap",
            "cc",
            vec![rint(1), rat(1, 3)],
            vec![],
            vec![vec![rat(1, 3), rat(1, 5)]],
        ),
        (
            "sl2Rsq_swap",
            "ss",
            vec![rint(1), rat(1, 3)],
            vec![vec![rint(1), Rat::zero()], vec![rint(1), rint(1)]],
            vec![],
        ),
    ];
    for (gname, fname, lseed, raw_points, elliptic_seeds) in cases {
        let g = group(cat, gname);
        let fi = g.frame_named(fname).expect("frame");
        let psd = psd_for(g, fi, &lseed);
        let mut points = raw_points;
        points.extend(elliptic_seeds.iter().map(|s| elliptic_x(g, fi, s)));
        for x in points {
            let p = EllipticPoint::torus(g, fi, x.clone());
            let a = moved_orientation(g, &psd, &psd.lambda_plus, &p).expect("orientation");
            let b = moved_orientation(g, &psd, &psd.lambda_can, &p).expect("orientation");
            assert_eq!(a, b, "{gname}/{fname} x={x:?}");
        }
    }
}

#[test]
fn cover_functions_transport_along_frame_automorphisms() {
    let cat = Catalog::builtin();
    let cases: Vec<(&str, &str, RVec, RVec)> = vec![
        (
            "su2xsu2_swap",
            "compact",
            vec![rint(1), rint(1)],
            vec![rat(1, 3), rat(1, 5)],
        ),
        (
            "sl2Rsq_swap",
            "cc",
            vec![rint(1), rint(1)],
            vec![rat(1, 3), rat(1, 5)],
        ),
    ];
    for (gname, fname, lseed, x) in cases {
        let g = group(cat, gname);
        let fi = g.frame_named(fname).expect("frame");
        let psd = psd_for(g, fi, &lseed);
        let auto = g.frames[fi]
            .autos
            .iter()
            .find(|a| a.name == "swap")
            .expect("swap automorphism");
        let x2 = linalg::mat_vec(&auto.point_mat, &x);
        for sheet in [1i32, -1] {
            let a = LiftedElliptic {
                point: EllipticPoint::torus(g, fi, x.clone()),
                sheet,
            };
            let b = LiftedElliptic {
                point: EllipticPoint::torus(g, fi, x2.clone()),
                sheet,
            };
            assert_eq!(
                delta_on_stabilizer_cover(g, &psd, &a).expect("delta"),
                delta_on_stabilizer_cover(g, &psd, &b).expect("delta"),
                "{gname} delta sheet {sheet}"
            );
            assert_eq!(
                rho_on_stabilizer_cover(g, &psd, &a).expect("rho"),
                rho_on_stabilizer_cover(g, &psd, &b).expect("rho"),
                "{gname} rho sheet {sheet}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// On every rank-one compact Cartan in the catalog, the cover character
    /// of the canonical exponential lift is the half-sum exponential.
    #[test]
    fn exponential_lift_character_on_random_angles(
        num in -24i64..=24,
        den in 1i64..=6,
        pick in 0usize..3,
    ) {
        let cat = Catalog::builtin();
        let gname = ["su2", "sl2R", "psl2R"][pick];
        let g = group(cat, gname);
        let fi = g.frame_named("compact").expect("frame");
        let x = vec![rat(num, den)];
        let psd = psd_for(g, fi, &vec![rint(1)]);
        let sheet = exp_lift_sheet(g, fi, &psd, &x).expect("lift sheet");
        let lifted = LiftedElliptic {
            point: EllipticPoint::torus(g, fi, x.clone()),
            sheet,
        };
        let got = rho_on_stabilizer_cover(g, &psd, &lifted).expect("rho");
        prop_assert_eq!(got, half_sum_unit(g, &psd, &x), "{} x={:?}", gname, x);
    }
}

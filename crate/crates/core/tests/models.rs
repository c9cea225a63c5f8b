use lochness_core::group::{domain_contains, DEFAULT_REDUCTION_CAP, DEFAULT_WORD_CAP};
use lochness_core::render::{render_domain_svg, render_tessellation_svg, DEFAULT_CLIP};
use lochness_core::topology::{flat_truncation_polygon, topology_summary};
use lochness_core::{
    enumerate_words, reduce_to_domain, truncation_topology, GVariant, IdentifiedPolygon,
    TruncationSpec, UpperHalfPoint, DEFAULT_TOL,
};

#[test]
fn reduction_undoes_every_short_word() {
    let words = enumerate_words(1, 3, GVariant::Corrected, DEFAULT_WORD_CAP).unwrap();
    let seeds = [
        (2.0, 0.5),
        (-2.0, 2.0),
        (6.0, 1.2),
        (10.0, 0.3),
        (14.0, 3.0),
    ];
    for (re, im) in seeds {
        let z = UpperHalfPoint::new(re, im).unwrap();
        assert!(domain_contains(&z, DEFAULT_TOL));
        for w in &words[1..] {
            let image = w.matrix.apply(z);
            assert!(
                !domain_contains(&image, 1e-6),
                "{} moved {z} into P",
                w.word
            );
            // the reduction may need a wider window than the word itself
            let r = reduce_to_domain(image, 40, DEFAULT_TOL, DEFAULT_REDUCTION_CAP).unwrap();
            assert_eq!(r.word, w.word.inverse(), "{}", w.word);
            // images this close to the axis have lost most of their digits
            if image.im() > 1e-7 {
                assert!(r.point.dist(&z) < 1e-6, "{}: {} vs {z}", w.word, r.point);
            }
        }
    }
}

#[test]
fn flat_genus_does_not_depend_on_radius() {
    for k in 1..=5usize {
        let base = 8 * k as u64 + 4;
        for radius in [base, base + 1, base + 10, base + 100] {
            let s = truncation_topology(&TruncationSpec::Flat { pairs: k, radius }).unwrap();
            assert_eq!((s.genus, s.boundary_components), (k as u64, 1));
        }
        assert!(flat_truncation_polygon(k, 8 * k as u64).is_err());
    }
}

#[test]
fn classical_surfaces() {
    let cases = [
        ("a b a^-1 b^-1", 0, 1, 0),
        ("a b a' b' c d c' d'", -2, 2, 0),
        ("a a^-1", 2, 0, 0),
        ("a", 1, 0, 1),
        ("a b", 1, 0, 1),
        ("a b c a' b' c'", 0, 1, 0),
        ("a b a' b' c", -1, 1, 1),
    ];
    for (word, chi, genus, boundary) in cases {
        let s = topology_summary(&IdentifiedPolygon::parse(word).unwrap()).unwrap();
        assert_eq!(
            (s.euler_characteristic, s.genus, s.boundary_components),
            (chi, genus, boundary),
            "{word}"
        );
    }
}

#[test]
fn figures_write_and_report_paths() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("domain.svg");
    let s = render_domain_svg(2, None, &d).unwrap();
    assert_eq!(s.circles, 5);
    let text = std::fs::read_to_string(&d).unwrap();
    assert!(text.starts_with("<?xml") && text.ends_with("</svg>\n"));

    let t = dir.path().join("tess.svg");
    let s = render_tessellation_svg(0, 2, None, DEFAULT_CLIP, &t).unwrap();
    assert_eq!(s.arcs_total, s.circles * (1 + 4 + 12));

    let missing = dir.path().join("no/such/dir/x.svg");
    let err = render_domain_svg(1, None, &missing).unwrap_err();
    assert!(err.to_string().contains("no/such/dir"));
}

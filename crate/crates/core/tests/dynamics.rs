use fpl_core::dynamics::{
    classify_grid, detect_attractors, extract_packing, label_components, CellLabel, ClassifyParams, Grid, GridSpec,
};
use fpl_core::expr::parse_dynamical_map;
use fpl_core::geometry::{euclidean_diameter, BoundingBox, MetricTag};
use fpl_core::packing::CurveKind;
use num_complex::Complex64;

fn window() -> BoundingBox {
    BoundingBox::new(-2.0, -2.0, 2.0, 2.0).unwrap()
}

fn run(text: &str, resolution: usize, max_iters: usize) -> Grid {
    let f = parse_dynamical_map(text).unwrap();
    let a = detect_attractors(&f, 2000).unwrap();
    let spec = GridSpec::new(window(), resolution).unwrap();
    let params = ClassifyParams {
        max_iters,
        ..ClassifyParams::default()
    };
    classify_grid(&f, &a, &spec, params)
}

#[test]
fn square_map_basins_and_band() {
    let g = run("z^2", 256, 500);
    let at = |p: Complex64| {
        let (i, j) = g.cell_of(p).unwrap();
        g.label(i, j)
    };
    assert!(matches!(at(Complex64::new(0.5, 0.0)), CellLabel::Basin { attractor: 0, .. }));
    assert!(matches!(at(Complex64::new(1.5, 1.5)), CellLabel::Basin { attractor: 1, .. }));
    for j in 0..g.height {
        for i in 0..g.width {
            let r = g.cell_center(i, j).norm();
            if (r - 1.0).abs() <= g.cell {
                assert_eq!(g.label(i, j), CellLabel::Unresolved, "cell at radius {r}");
            }
        }
    }
}

#[test]
fn square_map_components_and_diameter() {
    let g = run("z^2", 256, 500);
    let m = label_components(&g);
    assert_eq!(m.len(), 2);
    let total: usize = m.components.iter().map(|c| c.cell_count).sum();
    assert_eq!(total + g.unresolved_count(), g.width * g.height);
    let p = extract_packing(&m, MetricTag::Euclidean, 4);
    let inner = p.curves().iter().find(|c| !c.outer).unwrap();
    assert!((inner.diameter - 2.0).abs() <= 2.0 * g.cell, "diameter {}", inner.diameter);
    assert!(p.outer().is_some());
}

#[test]
fn all_unresolved_grid_has_no_components() {
    let g = Grid::from_labels(window(), 16, 16, vec![CellLabel::Unresolved; 256]);
    assert!(label_components(&g).is_empty());
}

#[test]
fn basilica_counts_grow_with_resolution() {
    let counts: Vec<usize> = [128, 256, 512]
        .iter()
        .map(|&r| label_components(&run("z^2 - 1", r, 1000)).len())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert!(counts[2] >= 20, "{counts:?}");
}

#[test]
fn basilica_largest_diameters_match_hull_oracle() {
    let g = run("z^2 - 1", 256, 1000);
    let m = label_components(&g);
    let p = extract_packing(&m, MetricTag::Euclidean, 4);
    let bounded: Vec<_> = p.curves().iter().filter(|c| !c.outer).take(2).collect();
    assert_eq!(bounded.len(), 2);
    for c in bounded {
        let CurveKind::RasterBoundary { points, .. } = &c.kind else { panic!("raster curve expected") };
        let pts: Vec<Complex64> = points.clone();
        // every point sits half a cell from a boundary cell centre
        let comp = &m.components[c.id as usize];
        for p in &pts {
            let near = comp.boundary.iter().any(|&k| ((m.cell_center(k) - p).norm() - 0.5 * m.cell).abs() < 1e-12);
            assert!(near);
        }
        let mut brute = 0.0f64;
        for a in &pts {
            for b in &pts {
                brute = brute.max((a - b).norm());
            }
        }
        assert!((c.diameter - brute).abs() < 1e-12);
        assert!((euclidean_diameter(&pts) - brute).abs() < 1e-12);
    }
}

#[test]
fn refinement_stability_of_largest_diameters() {
    for text in ["z^2", "z^2 - 1"] {
        let coarse = run(text, 256, 1000);
        let fine = run(text, 512, 1000);
        let d = |g: &Grid| -> Vec<f64> {
            let m = label_components(g);
            extract_packing(&m, MetricTag::Euclidean, 4)
                .curves()
                .iter()
                .filter(|c| !c.outer)
                .take(5)
                .map(|c| c.diameter)
                .collect()
        };
        let (a, b) = (d(&coarse), d(&fine));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 4.0 * coarse.cell, "{text}: {x} vs {y}");
        }
    }
}

#[test]
fn labels_are_forward_invariant() {
    let f = parse_dynamical_map("z^2 - 1").unwrap();
    let a = detect_attractors(&f, 2000).unwrap();
    let spec = GridSpec::new(window(), 200).unwrap();
    let g = classify_grid(&f, &a, &spec, ClassifyParams::default());
    let classifier = fpl_core::dynamics::grid::Classifier::new(&f, &a, ClassifyParams::default());
    let (mut agree, mut total) = (0, 0);
    for j in (0..g.height).step_by(3) {
        for i in (0..g.width).step_by(3) {
            let CellLabel::Basin { attractor, .. } = g.label(i, j) else { continue };
            let w = f.eval_complex(g.cell_center(i, j)).unwrap();
            let fresh = match classifier.run(fpl_core::geometry::ExtendedComplex::Finite(w)) {
                fpl_core::dynamics::grid::Capture::Captured { attractor, .. } => Some(attractor),
                _ => None,
            };
            total += 1;
            if fresh == Some(attractor) {
                agree += 1;
            }
        }
    }
    assert!(agree as f64 >= 0.99 * total as f64, "{agree}/{total}");
}

#[test]
fn carpet_map_has_partial_residual() {
    let g = run("z^2 - 1/(16 z^2)", 256, 1000);
    let frac = g.unresolved_fraction();
    assert!(frac > 0.0 && frac < 1.0, "{frac}");
}

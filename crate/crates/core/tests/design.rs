//! Golden values for the full-size 200 um metasurface at the default grid.

use std::collections::BTreeSet;

use spinorbit::design::{
    far_field, generate_layout, near_field, oam_spectrum, phase_mask, Beam, LayoutSpec, MaskKind,
    DEFAULT_GRID,
};
use spinorbit::Spin;

#[test]
fn full_layout_counts() {
    let spec = LayoutSpec::default();
    let rods = generate_layout(&spec).unwrap();
    assert_eq!(rods.len(), 105_624);
    let blocks: BTreeSet<(i64, i64)> = rods
        .iter()
        .map(|r| (r.x_nm.div_euclid(700), r.y_nm.div_euclid(700)))
        .collect();
    assert_eq!(blocks.len(), 64_108);
    // Rod centres stay inside the aperture plus half a block.
    assert!(rods
        .iter()
        .all(|r| (r.x_nm as f64).hypot(r.y_nm as f64) < 100_350.0));
}

#[test]
fn vortex_far_field_and_spectrum() {
    let spec = LayoutSpec::default();
    let beam = Beam::default_gaussian(spec.aperture_diameter_nm);
    for (kind, floor) in [(MaskKind::Ideal, 0.99), (MaskKind::BlockQuantized, 0.9999)] {
        let mask = phase_mask(&spec, Spin::Plus, DEFAULT_GRID, kind).unwrap();
        let far = far_field(&mask, &beam).unwrap();
        assert!(far.on_axis() < 1e-3 * far.peak());
        assert!((far.total() - 1.0).abs() < 1e-6);
        let field = near_field(&mask, &beam).unwrap();
        let spectrum = oam_spectrum(&field, spec.aperture_diameter_nm / 4.0, 4).unwrap();
        let (order, power) = spectrum.dominant();
        assert_eq!(order, -1);
        assert!(power >= floor, "{kind:?}: {power}");
    }
}

#[test]
fn opposite_spin_imprints_opposite_order() {
    let spec = LayoutSpec::with_winding(2);
    let beam = Beam::default_gaussian(spec.aperture_diameter_nm);
    let mask = phase_mask(&spec, Spin::Minus, 512, MaskKind::Ideal).unwrap();
    let spectrum = oam_spectrum(&near_field(&mask, &beam).unwrap(), 50_000.0, 4).unwrap();
    assert_eq!(spectrum.dominant().0, 2);
}

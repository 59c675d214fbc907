mod properties;

#[test]
fn region_fuzz() {
    properties::region_fuzz().unwrap();
}

#[test]
fn region_fuzz_1d() {
    properties::region_fuzz_1d().unwrap();
}

#[test]
fn basis_invariants() {
    properties::basis_invariants().unwrap();
}

#[test]
fn continuity_across_overlay_boundary() {
    properties::continuity_across_overlay_boundary().unwrap();
}

#[test]
fn patch_test() {
    properties::patch_test().unwrap();
}

#[test]
fn energy_identity() {
    properties::energy_identity().unwrap();
}

#[test]
fn projection_exactness_and_idempotence() {
    properties::projection_exactness_and_idempotence().unwrap();
}

#[test]
fn theta_energy_decay() {
    properties::theta_energy_decay().unwrap();
}

#[test]
fn pcg_matches_direct() {
    properties::pcg_matches_direct().unwrap();
}

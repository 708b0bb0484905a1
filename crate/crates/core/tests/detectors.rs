mod common;

use mapaug_core::obstructions::ObstructionKind;

fn assert_equivalent(name: &str, inst: &mapaug_core::graph::MapInstance) {
    for kind in ObstructionKind::ALL {
        let (by_def, by_det) = common::carrier_sets(inst, kind);
        assert_eq!(by_def, by_det, "{name}: {kind}");
    }
}

#[test]
fn detectors_match_definitions_on_fixtures() {
    assert_equivalent("c4", &common::fix_c4());
    assert_equivalent("bowtie", &common::bowtie());
    assert_equivalent("r8", &common::fix_r8_small());
    let (r8, _) = common::carrier_sets(&common::fix_r8_small(), ObstructionKind::R8);
    assert_eq!(r8.len(), 1);
}

#[test]
fn detectors_match_definitions_on_small_random_instances() {
    for seed in 0..300 {
        assert_equivalent(&format!("seed {seed}"), &common::small_instance(seed));
    }
}

mod common;

use yfi_core::calibration::{build_profile, CalibrationOptions};
use yfi_core::detection::detect;
use yfi_core::raster::Connectivity;
use yfi_core::spectral::{build_stack, Channel};
use yfi_core::synth::{
    generate_scene, make_knowledge_from_truth, KnowledgeSelector, LandClass, LayoutSpec, PatchSpec,
    SceneSpec,
};

fn single_patch_scene(flowers: usize) -> SceneSpec {
    let mut spec = SceneSpec::new(160, 140, 77);
    spec.patches.push(PatchSpec {
        class: LandClass::Yfi,
        center: [70.0, 80.0],
        semi_axes: [45.0, 55.0],
        angle_deg: 30.0,
        flower_count: flowers,
    });
    spec
}

#[test]
fn planted_flowers_are_exactly_the_peaks() {
    let scene = generate_scene(&single_patch_scene(7)).unwrap();
    let truth = &scene.truth;
    assert_eq!(truth.flower_positions.len(), 7);
    let stack = build_stack(&scene.raster).unwrap();
    let patch = truth.patch_mask(1);
    let green = stack.channel(Channel::Green);
    assert_eq!(common::count_local_peaks(green, 0.1, &patch), 7);
    let everywhere = yfi_core::raster::BinaryMask::full(160, 140);
    assert_eq!(common::count_local_peaks(green, 0.1, &everywhere), 7);
    assert!(truth.flower_mask().is_subset_of(&patch).unwrap());
}

#[test]
fn foliage_within_four_sigma_of_class_means() {
    let spec = single_patch_scene(0);
    let scene = generate_scene(&spec).unwrap();
    let stats = spec.class_stats.yfi;
    for (b, name) in ["GREEN", "RED", "REDEDGE", "NIR"].iter().enumerate() {
        let band = scene.raster.band(name).unwrap();
        for (r, c) in scene.truth.yfi_mask.iter_set() {
            let z = (band.get(r, c) - stats.mean[b]) / stats.std[b];
            assert!(z.abs() <= 4.0 + 1e-4, "{name} ({r},{c}) z = {z}");
        }
    }
}

#[test]
fn calibration_scene_detects_its_own_patches() {
    let spec = SceneSpec::new(1024, 1024, 31).with_layout(LayoutSpec {
        yfi_patches: 6,
        vegetation_patches: 3,
        ..Default::default()
    });
    let scene = generate_scene(&spec).unwrap();
    let stack = build_stack(&scene.raster).unwrap();
    let k = make_knowledge_from_truth(&scene.truth, &KnowledgeSelector::All, Connectivity::Eight)
        .unwrap();
    let profile = build_profile(&stack, &k, &CalibrationOptions::default()).unwrap();
    assert_eq!(profile.q_green.len(), 6);
    let report = detect(&stack, &profile).unwrap();
    for subset in &k.subsets.regions {
        let overlap = k
            .subsets
            .region_mask(subset.id)
            .and(&report.final_mask_f)
            .unwrap();
        assert!(!overlap.is_empty(), "subset {} missed", subset.id);
    }
    let veg = scene.truth.class_mask(LandClass::GreenVegetation);
    assert!(report.final_mask_f.and(&veg).unwrap().is_empty());
}

#[test]
fn water_only_scene_has_no_detections() {
    let calib = generate_scene(&single_patch_scene(20)).unwrap();
    let stack = build_stack(&calib.raster).unwrap();
    let k = make_knowledge_from_truth(&calib.truth, &KnowledgeSelector::All, Connectivity::Eight)
        .unwrap();
    let profile = build_profile(&stack, &k, &CalibrationOptions::default()).unwrap();

    let mut water = SceneSpec::new(160, 140, 5);
    water.background = LandClass::Water;
    let scene = generate_scene(&water).unwrap();
    let report = detect(&build_stack(&scene.raster).unwrap(), &profile).unwrap();
    assert!(report.detections.is_empty());
    assert!(report.final_mask_f.is_empty());
}

#[test]
fn fifteen_labeled_patches_give_fifteen_counts() {
    let spec = SceneSpec::new(1024, 1024, 8).with_layout(LayoutSpec {
        yfi_patches: 15,
        vegetation_patches: 0,
        ..Default::default()
    });
    let scene = generate_scene(&spec).unwrap();
    let k = make_knowledge_from_truth(&scene.truth, &KnowledgeSelector::All, Connectivity::Eight)
        .unwrap();
    assert_eq!(k.count(), 15);
    let profile = build_profile(
        &build_stack(&scene.raster).unwrap(),
        &k,
        &CalibrationOptions::default(),
    )
    .unwrap();
    assert_eq!(profile.q_green.len(), 15);
    assert_eq!(profile.q_red.len(), 15);
    let one = make_knowledge_from_truth(
        &scene.truth,
        &KnowledgeSelector::First(1),
        Connectivity::Eight,
    )
    .unwrap();
    assert_eq!(one.count(), 1);
}

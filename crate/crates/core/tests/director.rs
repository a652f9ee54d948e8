use autocine::config::DirectorConfig;
use autocine::director::{direct, plan_next_shot, segment_timeline, Shot};
use autocine::measures::{update_history, VisitedHistory};
use autocine::synth::{random_scenario, synth_scene};
use autocine::tracks::parse_scene;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn viewports_respect_type_fov_and_pitch_clamp(seed in any::<u64>(), actors in 0usize..5) {
        let cfg = DirectorConfig::default();
        let scene = synth_scene(&random_scenario(seed, actors, 7.0, 10.0)).unwrap();
        let out = direct(&scene, &cfg).unwrap();
        prop_assert_eq!(out.camera_path.len(), scene.num_frames());
        for s in &out.shots {
            for (f, vp) in s.range.frames().zip(&s.path) {
                prop_assert_eq!(vp.hfov(), cfg.hfov(s.shot_type));
                prop_assert!(vp.center().pitch().abs() <= cfg.pitch_clamp() + 1e-12);
                prop_assert_eq!(out.camera_path[f], *vp);
            }
        }
    }

    #[test]
    fn chosen_shot_is_never_beaten(seed in any::<u64>(), actors in 0usize..4) {
        let cfg = DirectorConfig::default();
        let scene = synth_scene(&random_scenario(seed, actors, 9.0, 10.0)).unwrap();
        let mut history = VisitedHistory::new(cfg.measures.history_len);
        let mut types = Vec::new();
        let mut shots: Vec<Shot> = Vec::new();
        for range in segment_timeline(scene.num_frames(), scene.fps(), cfg.shot_length_s).unwrap() {
            let planned = plan_next_shot(&scene, range, &history, &types, shots.last(), &cfg).unwrap();
            for h in &planned.candidates {
                prop_assert!(planned.shot.score >= h.score - 1e-12);
            }
            history = update_history(&history, &planned.shot, &scene, &cfg.measures);
            types.push(planned.shot.shot_type);
            shots.push(planned.shot);
        }
    }

    #[test]
    fn synthetic_scenes_survive_the_track_format(seed in any::<u64>(), actors in 0usize..6) {
        let scene = synth_scene(&random_scenario(seed, actors, 2.0, 15.0)).unwrap();
        let back = parse_scene(scene.to_json().as_bytes()).unwrap();
        prop_assert_eq!(back, scene);
    }
}

#[test]
fn same_input_same_output() {
    let cfg = DirectorConfig::default();
    let scene = synth_scene(&random_scenario(42, 4, 12.0, 30.0)).unwrap();
    assert_eq!(direct(&scene, &cfg).unwrap(), direct(&scene, &cfg).unwrap());
}

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twostream::descriptor::{
    describe_frame, describe_sequence, load_descriptor_matrix, middle_frame_index,
    save_descriptor_matrix, DescriptorSpec, GridParams,
};
use twostream::frame::RgbFrame;
use twostream::pipeline::{appearance_features, final_representation, motion_features, PipelineConfig};
use twostream::pmtx::Matrix;
use twostream::timeseries::pool_var;
use twostream::{Error, MultiChannelSeries};

const D: usize = 176;
const BLOCK: usize = 11; // 8 bins + 3 mean colors

fn texture(seed: u64, w: usize, h: usize) -> Vec<[u8; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..w * h).map(|_| [rng.random(), rng.random(), rng.random()]).collect()
}

#[test]
fn cell_blocks_follow_a_one_cell_shift() {
    let (w, h) = (64, 64);
    let base = texture(1, w, h);
    let junk = texture(2, w, h);
    let a = RgbFrame::new(w, h, base.clone()).unwrap();
    let b = RgbFrame::from_fn(w, h, |x, y| if x >= 16 { base[y * w + x - 16] } else { junk[y * w + x] }).unwrap();
    let spec = DescriptorSpec::default();
    let (da, db) = (describe_frame(&a, &spec).unwrap(), describe_frame(&b, &spec).unwrap());
    assert_eq!(da.len(), D);
    for cy in 0..4 {
        let cell = |cx: usize| (cy * 4 + cx) * BLOCK;
        assert_eq!(&da[cell(1)..cell(1) + BLOCK], &db[cell(2)..cell(2) + BLOCK], "row {cy}");
    }
}

#[test]
fn step_edge_and_uniform_frames() {
    let spec = DescriptorSpec::default();
    let step = RgbFrame::from_fn(32, 32, |x, _| if x % 8 < 4 { [0; 3] } else { [200; 3] }).unwrap();
    let d = describe_frame(&step, &spec).unwrap();
    for c in 0..16 {
        let hist = &d[c * BLOCK..c * BLOCK + 8];
        // gradients point along +x or -x only: bins 0 and 4 of 8
        let horizontal = hist[0] + hist[4];
        assert!((horizontal - 1.0).abs() < 1e-12, "cell {c}: {hist:?}");
    }
    let gray = RgbFrame::filled(16, 16, [51, 51, 51]).unwrap();
    let d = describe_frame(&gray, &spec).unwrap();
    for c in 0..16 {
        assert!(d[c * BLOCK..c * BLOCK + 8].iter().all(|&v| v == 0.0));
        assert!(d[c * BLOCK + 8..(c + 1) * BLOCK].iter().all(|&v| (v - 0.2).abs() < 1e-12));
    }
    let tiny = RgbFrame::filled(3, 3, [0; 3]).unwrap();
    assert!(matches!(describe_frame(&tiny, &spec), Err(Error::InvalidInput(_))));
}

#[test]
fn grid_dimension_formula() {
    let g = GridParams { cells_x: 3, cells_y: 2, orientation_bins: 6, include_mean_color: false };
    assert_eq!(g.dim(), 36);
    let d = describe_frame(&RgbFrame::filled(12, 12, [9; 3]).unwrap(), &DescriptorSpec::Builtin(g)).unwrap();
    assert_eq!(d.len(), 36);
    assert_eq!(GridParams::default().dim(), D);
}

#[test]
fn middle_frame_rule() {
    assert_eq!(middle_frame_index(1).unwrap(), 0);
    assert_eq!(middle_frame_index(9).unwrap(), 4);
    assert_eq!(middle_frame_index(10).unwrap(), 5);
    assert!(middle_frame_index(0).is_err());
}

#[test]
fn sequence_shape_and_constant_series() {
    let frames = vec![RgbFrame::new(32, 32, texture(5, 32, 32)).unwrap(); 9];
    let s = describe_sequence(&frames, &DescriptorSpec::default()).unwrap();
    assert_eq!((s.channels(), s.length()), (D, 9));
    for c in 0..D {
        assert_eq!(pool_var(&s, c, s.full_window()).unwrap(), 0.0);
    }
    assert!(describe_sequence(&[], &DescriptorSpec::default()).is_err());
    let mixed = vec![frames[0].clone(), RgbFrame::filled(16, 32, [0; 3]).unwrap()];
    assert!(describe_sequence(&mixed, &DescriptorSpec::default()).is_err());
}

fn moving_clip(n: usize) -> Vec<RgbFrame> {
    let tex = texture(7, 40, 40);
    (0..n)
        .map(|t| {
            RgbFrame::from_fn(32, 32, |x, y| {
                let (sx, sy) = ((x + t) % 40, y % 40);
                let p = tex[sy * 40 + sx];
                // smooth it a little so flow is meaningful
                let q = tex[sy * 40 + (sx + 1) % 40];
                [((p[0] as u16 + q[0] as u16) / 2) as u8, p[1], q[2]]
            })
            .unwrap()
        })
        .collect()
}

#[test]
fn representation_dimensions_and_locality() {
    let frames = moving_clip(9);
    let cfg = PipelineConfig::default();
    let motion = motion_features(&frames, &cfg).unwrap();
    assert_eq!(motion.dim(), 5 * D * 7);
    let full = final_representation(&frames, &cfg).unwrap();
    assert_eq!(full.dim(), 6336);
    assert_eq!(&full.as_slice()[..motion.dim()], motion.as_slice());
    assert_eq!(&full.as_slice()[motion.dim()..], appearance_features(&frames, &cfg).unwrap().as_slice());
    assert!(full.as_slice().iter().all(|&v| v >= 0.0));
    assert_eq!(full, final_representation(&frames, &cfg).unwrap());

    let mut blanked = frames.clone();
    blanked[middle_frame_index(9).unwrap()] = RgbFrame::filled(32, 32, [0; 3]).unwrap();
    let mut cfg_app = cfg.clone();
    cfg_app.use_appearance = true;
    let other = final_representation(&blanked, &cfg_app).unwrap();
    assert_ne!(&other.as_slice()[motion.dim()..], &full.as_slice()[motion.dim()..]);
    // motion depends on every frame, so only the appearance block is compared for locality
    let app_only = appearance_features(&blanked, &cfg).unwrap();
    assert_eq!(&other.as_slice()[motion.dim()..], app_only.as_slice());
}

#[test]
fn identical_frames_have_flat_motion() {
    let frames = vec![moving_clip(1)[0].clone(); 10];
    let cfg = PipelineConfig::default();
    let v = motion_features(&frames, &cfg).unwrap();
    // per channel: [max, sum, grad_pos, grad_neg, var]
    for chunk in v.as_slice().chunks(5) {
        assert_eq!(&chunk[2..], &[0.0, 0.0, 0.0]);
    }
    assert!(motion_features(&frames[..1], &cfg).is_err());
    let too_short = PipelineConfig {
        pyramid: twostream::PyramidConfig::with_levels(5).unwrap(),
        ..cfg
    };
    let err = motion_features(&frames, &too_short).unwrap_err().to_string();
    assert!(err.contains("at most 4 levels"), "{err}");
}

#[test]
fn descriptor_matrix_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let channels: Vec<Vec<f64>> = (0..1024).map(|_| (0..30).map(|_| rng.random_range(0.0..5.0)).collect()).collect();
    let s = MultiChannelSeries::from_channels(channels).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.pmtx");
    save_descriptor_matrix(&s, &p).unwrap();
    let back = load_descriptor_matrix(&p).unwrap();
    assert_eq!((back.channels(), back.length()), (1024, 30));
    for c in 0..1024 {
        for t in 0..30 {
            assert_eq!(back.value(c, t), s.value(c, t) as f32 as f64);
        }
    }
}

#[test]
fn pmtx_errors() {
    let m = Matrix::from_f64(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let bytes = m.encode().unwrap();
    assert_eq!(bytes.len(), 16 + 24);
    let mut zero_rows = bytes.clone();
    zero_rows[8..12].copy_from_slice(&0u32.to_le_bytes());
    assert!(matches!(Matrix::decode(&zero_rows), Err(Error::Format { offset: 8, .. })));
    let mut big = bytes.clone();
    big[8..12].copy_from_slice(&3u32.to_le_bytes());
    assert!(matches!(Matrix::decode(&big), Err(Error::Format { .. })));
    let mut bad = bytes.clone();
    bad[1] = b'X';
    assert!(matches!(Matrix::decode(&bad), Err(Error::Format { offset: 0, .. })));
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..20, 1usize..20).prop_flat_map(|(r, c)| {
        prop::collection::vec(-1e6f32..1e6, r * c).prop_map(move |data| Matrix { rows: r, cols: c, data })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pmtx_round_trip_is_byte_exact(m in matrix()) {
        let bytes = m.encode().unwrap();
        let back = Matrix::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.encode().unwrap(), bytes);
    }

    #[test]
    fn descriptors_are_nonnegative_and_finite(seed in any::<u64>(), w in 8usize..40, h in 8usize..40) {
        let f = RgbFrame::new(w, h, texture(seed, w, h)).unwrap();
        let d = describe_frame(&f, &DescriptorSpec::default()).unwrap();
        prop_assert!(d.iter().all(|v| v.is_finite() && *v >= 0.0));
        for c in 0..16 {
            let s: f64 = d[c * BLOCK..c * BLOCK + 8].iter().sum();
            prop_assert!(s == 0.0 || (s - 1.0).abs() < 1e-12);
        }
    }
}

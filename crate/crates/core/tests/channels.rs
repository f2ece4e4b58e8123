use snmark::channel::{
    apply_channel, default_profiles, load_profiles, save_profiles, share, MetadataPolicy,
    RenamePolicy, ResolutionClass, UploadContext,
};
use snmark::corpus::{corpus_camera, shoot, Original, ShootSpec};
use snmark::diff::{diff_files, name_classify, NameClassifier, Namespace, UNCHANGED_LABEL};

fn original(dims: (usize, usize), index: usize) -> Original {
    let cam = corpus_camera(0, dims, 0.02, 31).unwrap();
    shoot(&cam, index, &ShootSpec::default()).unwrap()
}

#[test]
fn every_network_round_trip_is_diffable_and_repeatable() {
    let o = original((1280, 960), 0);
    let ctx = UploadContext::new("alice", 1_490_000_000);
    let classifier = NameClassifier::new(&NameClassifier::default_table()).unwrap();
    for p in default_profiles() {
        let a = apply_channel(&o.image, &o.metadata, &o.name, &p, &ctx).unwrap();
        let b = apply_channel(&o.image, &o.metadata, &o.name, &p, &ctx).unwrap();
        assert_eq!(a.bytes(), b.bytes(), "{}", p.name);
        assert_eq!(a.name, b.name, "{}", p.name);

        let report = diff_files(&o.name, o.bytes(), &a.name, a.bytes(), &classifier).unwrap();
        if p.passthrough {
            assert!(report.digest_equal, "{}", p.name);
            assert!(report.content_diff_count.is_identical());
            assert_eq!(report.compression_ratio, 0.0);
        } else {
            assert!(!report.digest_equal, "{}", p.name);
            assert!(!report.content_diff_count.is_identical(), "{}", p.name);
        }
        match p.rename_policy {
            RenamePolicy::Unchanged => assert_eq!(report.name_label_b, UNCHANGED_LABEL),
            _ => assert_eq!(report.name_label_b, p.name, "{}", a.name),
        }
        if p.metadata_policy == MetadataPolicy::EraseAll {
            assert!(a.metadata.is_empty(), "{}", p.name);
        }
    }
}

#[test]
fn output_sizes_respect_each_class() {
    let small = original((640, 480), 1);
    let big = original((4000, 3000), 2);
    let ctx = UploadContext::new("bob", 1_490_000_000);
    for p in default_profiles().iter().filter(|p| !p.passthrough) {
        let s = apply_channel(&small.image, &small.metadata, &small.name, p, &ctx).unwrap();
        assert_eq!(s.class, ResolutionClass::Small);
        assert_eq!(
            s.image.dimensions(),
            (640, 480),
            "{} keeps small images",
            p.name
        );

        let l = apply_channel(&big.image, &big.metadata, &big.name, p, &ctx).unwrap();
        assert_eq!(l.class, ResolutionClass::Large);
        let (w, h) = l.image.dimensions();
        assert!(w < 4000 && h < 3000, "{} shrinks large images", p.name);
        let aspect = w as f64 / h as f64;
        assert!(
            (aspect - 4.0 / 3.0).abs() < 0.01,
            "{} keeps the aspect ({w}x{h})",
            p.name
        );
    }
}

#[test]
fn facebook_fields_track_content_profile_and_time() {
    let fb = default_profiles()
        .into_iter()
        .find(|p| p.name == "Facebook")
        .unwrap();
    let a = original((1024, 768), 3);
    let b = original((1024, 768), 4);
    let up = |o: &Original, who: &str, ts: i64| {
        apply_channel(
            &o.image,
            &o.metadata,
            &o.name,
            &fb,
            &UploadContext::new(who, ts),
        )
        .unwrap()
    };
    let si = |o: &snmark::channel::ChannelOutput| {
        o.metadata
            .get(Namespace::Iptc, "SpecialInstructions")
            .unwrap()
            .to_vec()
    };
    let first = up(&a, "p1", 100);
    assert_eq!(si(&first), si(&up(&a, "p2", 900)));
    assert_ne!(si(&first), si(&up(&b, "p1", 100)));
    // re-sharing serves the stored file
    let shared = share(&first, &UploadContext::new("p3", 5000));
    assert_eq!(shared.bytes(), first.bytes());
    assert_eq!(name_classify(&shared.name), "Facebook");
}

#[test]
fn profiles_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profiles.json");
    let profiles = default_profiles();
    save_profiles(&profiles, &path).unwrap();
    assert_eq!(load_profiles(&path).unwrap(), profiles);
    std::fs::write(&path, "[{\"sn_id\": 3}]").unwrap();
    assert!(load_profiles(&path).is_err());
}

use std::path::Path;

use casimir_cli::config::{parse_overrides, RunConfig, DEFAULT_CONFIG};
use casimir_cli::units::{Conversion, UnitSystem};

#[test]
fn default_config_matches_shipped_file() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    let a = RunConfig::load(&shipped).unwrap();
    let b = RunConfig::from_toml(DEFAULT_CONFIG).unwrap();
    assert_eq!(a.hash(), b.hash());
}

#[test]
fn overrides_parse_and_apply() {
    let pairs = parse_overrides(" sumrule = 2e-2 ,leading=0.05,").unwrap();
    assert_eq!(pairs, vec![("sumrule".to_string(), 2e-2), ("leading".to_string(), 0.05)]);
    let mut cfg = RunConfig::from_toml(DEFAULT_CONFIG).unwrap();
    cfg.tolerances.apply_overrides(&pairs).unwrap();
    assert_eq!(cfg.tolerances.sumrule, 2e-2);
    assert_eq!(cfg.tolerances.leading, 0.05);

    for bad in ["sumrule", "sumrule=x"] {
        assert_eq!(parse_overrides(bad).unwrap_err().exit_code(), 2);
    }
    let unknown = parse_overrides("nope=1").unwrap();
    assert_eq!(cfg.tolerances.apply_overrides(&unknown).unwrap_err().exit_code(), 2);
}

#[test]
fn hash_tracks_numbers_not_output_dir() {
    let base = RunConfig::from_toml(DEFAULT_CONFIG).unwrap();
    let mut moved = base.clone();
    moved.output.dir = "elsewhere".into();
    assert_eq!(base.hash(), moved.hash());
    let mut reseeded = base.clone();
    reseeded.seed += 1;
    assert_ne!(base.hash(), reseeded.hash());
    assert_eq!(base.hash().len(), 64);
}

#[test]
fn schema_rejections() {
    let cases = [
        DEFAULT_CONFIG.replace("[units]", "[unit]"),
        DEFAULT_CONFIG.replace("system = \"reduced\"", "system = \"imperial\""),
        DEFAULT_CONFIG.replace("mass = 100.0", "mass = 0.0"),
        DEFAULT_CONFIG.replace("charge = 1.0", "charge = 1.5"),
    ];
    for text in &cases {
        let err = RunConfig::from_toml(text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
    }
}

#[test]
fn reduced_conversion_is_identity() {
    let c = Conversion::reduced();
    assert_eq!(c.length(3.5), 3.5);
    assert_eq!(c.mass(2.0), 2.0);
    assert_eq!(c.density(0.25), 0.25);
}

#[test]
fn si_reduced_light_speed_is_inverse_fine_structure() {
    for t in [10.0, 300.0, 5000.0] {
        let c = Conversion::physical(UnitSystem::Si, t);
        assert!((c.c_reduced - 137.035_999).abs() < 1e-3, "{}", c.c_reduced);
    }
}

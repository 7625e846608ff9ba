#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SCHEMA: &str = r#"{
  "gender": {"role": "protected", "protected_label": "F"},
  "dept": {"role": "resolving"},
  "hired": {"role": "outcome", "beneficial_label": "yes"}
}"#;

/// Hiring table with two models that under-hire women in region S:
/// `rf` drops 70% of their positive labels there, `xgb` 55%.
pub struct Fixture {
    pub data: String,
    pub rf: String,
    pub xgb: String,
}

pub fn fixture() -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut data = String::from("gender,dept,experience,region,hired\n");
    let mut rf = String::from("rf\n");
    let mut xgb = String::from("xgb\n");
    let label = |b: bool| if b { "yes" } else { "no" };
    for _ in 0..800 {
        let female = rng.gen_bool(0.5);
        let dept = ["A", "B", "C"][rng.gen_range(0..3)];
        let exp: f64 = (rng.gen_range(0.0..20.0f64) * 10.0).round() / 10.0;
        let south = rng.gen_bool(0.5);
        let p = 0.2 + if dept == "A" { 0.3 } else { 0.0 } + if exp > 10.0 { 0.3 } else { 0.0 };
        let y = rng.gen_bool(p);
        let hit = female && south && y;
        let r = y && !(hit && rng.gen_bool(0.7));
        let x = y && !(hit && rng.gen_bool(0.55));
        data.push_str(&format!(
            "{},{dept},{exp},{},{}\n",
            if female { "F" } else { "M" },
            if south { "S" } else { "N" },
            label(y)
        ));
        rf.push_str(label(r));
        rf.push('\n');
        xgb.push_str(label(x));
        xgb.push('\n');
    }
    Fixture { data, rf, xgb }
}

pub struct Files {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub rf: PathBuf,
    pub xgb: PathBuf,
}

pub fn write_fixture(dir: &Path) -> Files {
    let f = fixture();
    let files = Files {
        data: dir.join("data.csv"),
        schema: dir.join("schema.json"),
        rf: dir.join("rf.csv"),
        xgb: dir.join("xgb.csv"),
    };
    std::fs::write(&files.data, f.data).unwrap();
    std::fs::write(&files.schema, SCHEMA).unwrap();
    std::fs::write(&files.rf, f.rf).unwrap();
    std::fs::write(&files.xgb, f.xgb).unwrap();
    files
}

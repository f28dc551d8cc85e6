use std::fs;
use std::path::Path;

use spectra_web::scenario_summary;

#[test]
fn every_page_preset_solves() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("www/presets");
    let script = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("www/main.js")).unwrap();
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        assert!(
            script.contains(&format!("\"{stem}\"")),
            "{stem} is not listed in main.js"
        );
        let summary = scenario_summary(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{stem}: {e}"));
        let levels = summary["levels"].as_array().unwrap();
        assert_eq!(levels.len(), 3, "{stem}");
        for level in levels {
            for r in level["residuals"].as_array().unwrap() {
                assert!(r.as_f64().unwrap() <= 1e-8, "{stem}: residual {r}");
            }
        }
        assert!(!summary["reports"].as_array().unwrap().is_empty(), "{stem}");
        count += 1;
    }
    assert_eq!(count, 5);
}

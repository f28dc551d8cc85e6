use crate::bounds::CHECK_NAMES;

const CHARTS: [&str; 6] = [
    "affine (inner, scale, offset)",
    "associate_family (theta)",
    "cylinder (radius)",
    "flat_interval",
    "flat_rectangle",
    "stereographic_sphere (radius)",
];
const DOMAINS: [&str; 3] = ["disk (center, radius)", "interval (a, b)", "rectangle (lo, hi)"];
const ETA: [&str; 5] = [
    "constant (value)",
    "expr (expr)",
    "linear (coefficients)",
    "radial_quadratic (coefficient)",
    "zero",
];
const TENSOR: [&str; 4] = [
    "diagonal (values)",
    "expr (components)",
    "metric",
    "scaled_metric (factor)",
];
const TARGETS: [&str; 4] = [
    "hemisphere (radius)",
    "interval (length, shift)",
    "rectangle (a, b)",
    "values (values)",
];

/// Alphabetized listing of charts, field builtins and check names.
pub fn list_catalog() -> String {
    let mut out = String::new();
    let mut section = |title: &str, items: &[&str]| {
        let mut items = items.to_vec();
        items.sort_unstable();
        out.push_str(title);
        out.push_str(":\n");
        for item in items {
            out.push_str("  ");
            out.push_str(item);
            out.push('\n');
        }
    };
    section("charts", &CHARTS);
    section("checks", &CHECK_NAMES);
    section("domains", &DOMAINS);
    section("eta", &ETA);
    section("targets", &TARGETS);
    section("tensor", &TENSOR);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_contents_are_stable() {
        let text = list_catalog();
        for name in [
            "flat_rectangle",
            "stereographic_sphere",
            "associate_family",
            "thm_drift",
            "thm_tensor",
            "polya_type",
            "recursion_lemma",
        ] {
            assert!(text.contains(name), "{name}");
        }
        assert_eq!(text, list_catalog());
    }
}

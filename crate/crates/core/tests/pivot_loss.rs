#[path = "support/pivot_fixture.rs"]
mod pivot;

use prekladac_core::backends::{FeatureKey, FeatureValue};

#[test]
fn direct_route_keeps_gender_and_politeness() {
    let o = pivot::run();
    assert_eq!(o.source_features, pivot::expected_source_features());
    assert_eq!(o.direct_text, pivot::DIRECT);
    assert_eq!(o.direct_features, o.source_features);
    assert_eq!(o.routed_direct, pivot::DIRECT);
}

#[test]
fn english_pivot_loses_them() {
    let o = pivot::run();
    assert_eq!(o.pivot_text, pivot::PIVOT);
    assert_eq!(o.routed_pivot, pivot::PIVOT);
    assert!(pivot::is_strict_subset(&o.pivot_features, &o.direct_features), "{} vs {}", o.pivot_features, o.direct_features);
    assert_ne!(o.pivot_features.get(FeatureKey::Politeness), Some(FeatureValue::Formal));
    assert_ne!(o.pivot_features.get(FeatureKey::Gender), Some(FeatureValue::Feminine));
}

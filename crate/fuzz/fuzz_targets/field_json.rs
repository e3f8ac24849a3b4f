#![no_main]

use fracframe::domain::io::{field_from_json, field_to_json, FieldDocument};
use fracframe::domain::FieldValue;
use libfuzzer_sys::fuzz_target;

// Accepted documents must survive a write and re-read unchanged.
fn round_trip<T: FieldValue>(doc: FieldDocument) {
    if let Ok(f) = doc.into_field::<T>() {
        let text = field_to_json(&f);
        assert_eq!(field_to_json(&field_from_json::<T>(&text).unwrap()), text);
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = FieldDocument::parse(text) else { return };
    match doc.components {
        1 => round_trip::<f64>(doc),
        2 => round_trip::<[f64; 2]>(doc),
        _ => round_trip::<[f64; 3]>(doc),
    }
});

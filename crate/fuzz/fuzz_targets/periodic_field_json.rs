#![no_main]

use fracframe::spectral::PeriodicField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = PeriodicField::from_json(text) {
        let again = f.to_json();
        assert_eq!(PeriodicField::from_json(&again).unwrap(), f);
    }
});

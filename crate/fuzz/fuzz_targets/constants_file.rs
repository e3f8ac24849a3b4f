#![no_main]

use fracframe::frames::LiftConstants;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = LiftConstants::from_json(text) {
        assert!(c.validate().is_ok());
        assert!(c.epsilon_threshold().is_finite());
    }
});

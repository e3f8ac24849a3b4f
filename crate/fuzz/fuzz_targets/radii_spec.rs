#![no_main]

use fracframe::frames::{parse_radii, MAX_RADII};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(radii) = parse_radii(text) {
        assert!(!radii.is_empty() && radii.len() <= MAX_RADII);
        assert!(radii[0] > 0.0 && radii.iter().all(|r| r.is_finite()));
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
    }
});

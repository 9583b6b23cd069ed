#![no_main]

use latmesh_core::{ExponentPair, PrecisionContext};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((a, b)) = text.split_once(';') else { return };
    let ctx = PrecisionContext::with_bits(64);
    if let Ok(pair) = ExponentPair::parse(a, b, &ctx) {
        assert!(pair.a().to_f64() > 0.0);
        let _ = pair.label();
    }
});

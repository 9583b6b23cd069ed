#![no_main]

use latmesh_core::precision::parse_exponent;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(e) = parse_exponent(text) {
            let v = e.to_f64();
            assert!(!v.is_nan());
            if let Some(q) = e.as_rational() {
                assert_eq!(parse_exponent(&q.to_string()).unwrap().as_rational(), Some(q));
            }
        }
    }
});

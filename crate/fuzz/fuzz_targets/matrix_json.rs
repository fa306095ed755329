#![no_main]

use libfuzzer_sys::fuzz_target;
use opcalc_core::linalg::ComplexMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = ComplexMatrix::from_json(text) {
        assert_eq!(ComplexMatrix::from_json(&m.to_json()).unwrap(), m);
    }
});

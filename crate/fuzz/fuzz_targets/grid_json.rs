#![no_main]

use libfuzzer_sys::fuzz_target;
use opcalc_core::besov::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = Grid::from_json(text) {
        assert_eq!(Grid::from_json(&g.to_json()).unwrap(), g);
    }
});

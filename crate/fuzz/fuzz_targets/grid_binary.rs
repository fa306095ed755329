#![no_main]

use libfuzzer_sys::fuzz_target;
use opcalc_core::besov::Grid;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = Grid::from_binary(data) {
        assert_eq!(g.to_binary(), data);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use opcalc_core::expr::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(e) = parse(src) {
        let printed = e.to_string();
        let again = parse(&printed).expect("printed expressions reparse");
        assert_eq!(again, e, "{printed}");
        let _ = e.eval(0.5, -0.25);
    }
});

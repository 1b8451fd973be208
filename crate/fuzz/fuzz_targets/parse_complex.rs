#![no_main]
use hypdyn::parse::parse_complex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(z) = parse_complex(s) {
            assert!(z.is_finite());
        }
    }
});

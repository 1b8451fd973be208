#![no_main]
use hypdyn::parse::MapSpec;
use hypdyn::Complex64;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(spec) = s.parse::<MapSpec>() else { return };
    // large truncations are valid but slow to build
    if spec.truncation.is_some_and(|n| n > 10_000) {
        return;
    }
    if let Ok(map) = spec.build() {
        let _ = map.eval(Complex64::new(0.5, 0.25));
        let _ = map.deriv(Complex64::new(-3.0, 1.0));
    }
});

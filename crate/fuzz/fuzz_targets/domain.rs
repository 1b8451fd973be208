#![no_main]
use hypdyn::{Complex64, ModelDomain};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(domain) = s.parse::<ModelDomain>() {
            assert!(domain.validate().is_ok());
            let _ = domain.density(Complex64::new(0.5, 0.5));
        }
    }
});

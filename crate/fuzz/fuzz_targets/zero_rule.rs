#![no_main]
use hypdyn::ZeroRule;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(rule) = s.parse::<ZeroRule>() {
            let zeros = rule.zeros(8);
            assert!(zeros.iter().all(|x| *x > 0.0));
            let _ = rule.tail_reciprocal_sum(8);
        }
    }
});

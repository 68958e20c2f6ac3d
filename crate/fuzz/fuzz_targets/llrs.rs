#![no_main]

use libfuzzer_sys::fuzz_target;
use qcjscc::textio::{format_llrs, parse_llrs};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_llrs(text) {
        assert!(v.iter().all(|x| !x.is_nan()));
        let back = parse_llrs(&format_llrs(&v)).unwrap();
        assert!(back.iter().zip(&v).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(back.len(), v.len());
    }
});

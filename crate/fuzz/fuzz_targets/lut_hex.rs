#![no_main]

use libfuzzer_sys::fuzz_target;
use qcjscc::fixed::{FixedFormat, TanhLut};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lut) = TanhLut::from_hex(text, FixedFormat::Q6) {
        assert_eq!(TanhLut::from_hex(&lut.to_hex(), FixedFormat::Q6).unwrap(), lut);
    }
});

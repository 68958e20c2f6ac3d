#![no_main]

use libfuzzer_sys::fuzz_target;
use qcjscc::pbm::{Bitmap, PbmFormat};

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = Bitmap::parse(data) {
        for format in [PbmFormat::Ascii, PbmFormat::Binary] {
            assert_eq!(Bitmap::parse(&img.to_bytes(format)).unwrap(), img);
        }
    }
});

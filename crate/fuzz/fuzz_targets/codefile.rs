#![no_main]

use libfuzzer_sys::fuzz_target;
use qcjscc::codefile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = codefile::parse(text) {
        let again = codefile::parse(&codefile::serialize(&code)).expect("serialized code must parse");
        assert_eq!(again, code);
    }
});

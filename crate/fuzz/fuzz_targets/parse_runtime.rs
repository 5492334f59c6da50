#![no_main]

use libfuzzer_sys::fuzz_target;
use tx10_syntax::{parse_runtime, stmt_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_runtime(text) {
        let again = parse_runtime(&stmt_to_string(&s)).expect("printed statement reparses");
        assert_eq!(again.strip_labels(), s.strip_labels());
    }
});

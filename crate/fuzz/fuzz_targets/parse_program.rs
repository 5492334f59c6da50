#![no_main]

use libfuzzer_sys::fuzz_target;
use tx10_syntax::{parse_program, program_to_string};

// Parsing never panics, and what parses prints back to the same program.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_program(text) {
        let again = parse_program(&program_to_string(&p)).expect("printed program reparses");
        assert_eq!(again.strip_labels(), p.strip_labels());
    }
});

#![no_main]

use goalrec::sas::{parse_sas, to_sas};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(task) = parse_sas(text) {
        // whatever parses must survive a round trip
        let again = parse_sas(&to_sas(&task)).expect("serialized task parses");
        assert_eq!(again, task);
    }
});

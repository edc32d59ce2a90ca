#![no_main]

use goalrec::ObservationSequence;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let omega = ObservationSequence::parse(text);
    assert_eq!(ObservationSequence::parse(&omega.to_text()), omega);
});

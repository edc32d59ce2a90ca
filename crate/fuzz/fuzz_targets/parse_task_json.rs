#![no_main]

use goalrec::sas::{parse_task_json, to_task_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(task) = parse_task_json(text) {
        let again = parse_task_json(&to_task_json(&task)).expect("serialized task parses");
        assert_eq!(again, task);
    }
});

#![no_main]

use std::sync::OnceLock;

use goalrec::recognition::{format_hypotheses, parse_hypotheses};
use goalrec::sas::{parse_sas, Task};
use libfuzzer_sys::fuzz_target;

fn task() -> &'static Task {
    static TASK: OnceLock<Task> = OnceLock::new();
    TASK.get_or_init(|| parse_sas(include_str!("../../crates/core/tests/fixtures/corridor.sas")).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let t = task();
    if let Ok(hyps) = parse_hypotheses(t, text) {
        assert_eq!(parse_hypotheses(t, &format_hypotheses(t, &hyps)).unwrap(), hyps);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::engine::parse_event_log;
use novelty_board::replay::build_frames;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(log) = parse_event_log(text) {
        let _ = build_frames(&log);
    }
});

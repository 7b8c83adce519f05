#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::replay::{export_frames, parse_frames};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(frames) = parse_frames(text) {
        if let Ok(bytes) = export_frames(&frames, "ndjson") {
            let again = parse_frames(std::str::from_utf8(&bytes).unwrap()).expect("exported frames reparse");
            assert_eq!(frames, again);
        }
        let _ = export_frames(&frames, "snapshots");
    }
});

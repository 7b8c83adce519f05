#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::protocol::{decode, encode};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if let Ok(message) = decode(line) {
        assert_eq!(decode(&encode(&message)), Ok(message));
    }
});

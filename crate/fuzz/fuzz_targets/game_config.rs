#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::play::{prepare, GameConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = serde_json::from_slice::<GameConfig>(data) {
        let _ = prepare(&config);
    }
});

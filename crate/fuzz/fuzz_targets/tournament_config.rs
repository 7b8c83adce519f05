#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::tournament::TournamentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = serde_json::from_slice::<TournamentConfig>(data) {
        if config.violations().is_empty() {
            let _ = config.effective_onset();
            let _ = config.instance_for(config.games);
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::board::BoardSchema;
use novelty_board::engine::GameLimits;
use novelty_board::novelty::{apply_novelty, load_specs, sample_instance, write_specs};
use novelty_board::tournament::derive_seed;

// Deterministic stand-in for an RNG so crashes replay exactly.
struct Counter(u64);

impl rand::RngCore for Counter {
    fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }
    fn next_u64(&mut self) -> u64 {
        self.0 = derive_seed(self.0, 0, 1);
        self.0
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for b in dst {
            *b = self.next_u64() as u8;
        }
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(specs) = load_specs(text) else { return };
    let again = load_specs(&write_specs(&specs)).expect("written specs reload");
    assert_eq!(specs, again);
    let base = BoardSchema::us_default();
    for spec in &specs {
        let instance = sample_instance(spec, &mut Counter(data.len() as u64), 1);
        let _ = apply_novelty(&base, &GameLimits::default(), &instance);
    }
});

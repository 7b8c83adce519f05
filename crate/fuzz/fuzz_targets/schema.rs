#![no_main]

use libfuzzer_sys::fuzz_target;
use novelty_board::board::load_schema;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(schema) = load_schema(text) {
        let again = load_schema(&schema.to_canonical_json()).expect("canonical form reloads");
        assert_eq!(schema.content_hash(), again.content_hash());
    }
});

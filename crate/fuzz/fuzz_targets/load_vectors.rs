#![no_main]

use libfuzzer_sys::fuzz_target;

use speechmetrics::embeddings::load_vectors;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = load_vectors(data) {
        // every accepted table honors its declared dimensionality
        assert!(table.dim() > 0);
    }
});

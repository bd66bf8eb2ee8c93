#![no_main]

use libfuzzer_sys::fuzz_target;

use speechmetrics::corpus::{parse_reference_conllu, serialize_reference_conllu};
use speechmetrics::modifier_coherence::build_reference_stats;

fuzz_target!(|data: &[u8]| {
    if let Ok(docs) = parse_reference_conllu(data) {
        let emitted = serialize_reference_conllu(&docs);
        let reparsed =
            parse_reference_conllu(emitted.as_bytes()).expect("serializer output must parse");
        assert_eq!(docs, reparsed);
        // Stats building on parsed documents must not panic either; the
        // parser already guarantees unique doc ids.
        if !docs.is_empty() {
            let stats = build_reference_stats(&docs).expect("parsed docs have unique ids");
            assert!(stats.n_docs() == docs.len());
        }
    }
});

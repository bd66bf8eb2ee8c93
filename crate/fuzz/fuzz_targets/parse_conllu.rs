#![no_main]

use libfuzzer_sys::fuzz_target;

use speechmetrics::corpus::{parse_conllu, serialize_conllu};

// The transcript parser must never panic on arbitrary bytes, and any
// corpus it accepts must survive a serialize/reparse round trip.
fuzz_target!(|data: &[u8]| {
    if let Ok(corpus) = parse_conllu(data) {
        let emitted = serialize_conllu(&corpus);
        let reparsed = parse_conllu(emitted.as_bytes()).expect("serializer output must parse");
        assert_eq!(corpus, reparsed);
        assert_eq!(serialize_conllu(&reparsed), emitted);
    }
});

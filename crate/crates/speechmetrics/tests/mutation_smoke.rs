//! Structured mutation smoke test: byte-level corruptions of valid
//! inputs must never panic a parser, and whatever still parses must
//! survive its round trip. Complements the libFuzzer targets under
//! `fuzz/`, which need a nightly toolchain for coverage-guided runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speechmetrics::corpus::{
    parse_conllu, parse_reference_conllu, serialize_conllu, serialize_reference_conllu,
};
use speechmetrics::embeddings::load_vectors;

const TRANSCRIPT_SEED: &str = "\
# participant_id = p1
# group = patient
# question_id = 2
1\tHello\thello\tINTJ\t_\t_\t0\troot\t_\t_
2\t,\t,\tPUNCT\t_\t_\t1\tpunct\t_\t_
3\tworld\tworld\tNOUN\t_\t_\t1\tvocative\t_\t_

1\tBye\tbye\tINTJ\t_\t_\t0\troot\t_\t_

# participant_id = c1
# group = control
# question_id = 1
1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_
1\tde\tde\tADP\t_\t_\t2\tcase\t_\t_
2\tle\tle\tDET\t_\t_\t0\troot\t_\t_
";

const REFERENCE_SEED: &str = "\
# doc_id = d1
1\told\told\tADJ\t_\t_\t2\tamod\t_\t_
2\tviolin\tviolin\tNOUN\t_\t_\t0\troot\t_\t_

# doc_id = d2
1\tplay\tplay\tVERB\t_\t_\t0\troot\t_\t_
2\tloudly\tloudly\tADV\t_\t_\t1\tadvmod\t_\t_
";

const VECTORS_SEED: &str = "2 3\nalpha 0.25 -1.5 0.0\nbeta 1e-3 2.5 -0.125\n";

fn mutate(rng: &mut ChaCha8Rng, seed: &str) -> Vec<u8> {
    let mut bytes = seed.as_bytes().to_vec();
    for _ in 0..rng.random_range(1..=8) {
        if bytes.is_empty() {
            break;
        }
        match rng.random_range(0..5) {
            0 => {
                // flip a byte
                let at = rng.random_range(0..bytes.len());
                bytes[at] = rng.random();
            }
            1 => {
                // delete a span
                let at = rng.random_range(0..bytes.len());
                let len = rng.random_range(1..=16).min(bytes.len() - at);
                bytes.drain(at..at + len);
            }
            2 => {
                // duplicate a span somewhere else
                let at = rng.random_range(0..bytes.len());
                let len = rng.random_range(1..=16).min(bytes.len() - at);
                let span: Vec<u8> = bytes[at..at + len].to_vec();
                let to = rng.random_range(0..=bytes.len());
                bytes.splice(to..to, span);
            }
            3 => {
                // truncate
                let at = rng.random_range(0..=bytes.len());
                bytes.truncate(at);
            }
            _ => {
                // insert a structural byte
                let at = rng.random_range(0..=bytes.len());
                let b = *[b'\t', b'\n', b'#', b'=', b'-', b'.', b'0']
                    .get(rng.random_range(0..7))
                    .unwrap();
                bytes.insert(at, b);
            }
        }
    }
    bytes
}

#[test]
fn mutated_inputs_never_panic_and_roundtrip_when_accepted() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0_22);
    let mut accepted = [0usize; 3];
    for _ in 0..30_000 {
        let transcript = mutate(&mut rng, TRANSCRIPT_SEED);
        if let Ok(corpus) = parse_conllu(transcript.as_slice()) {
            accepted[0] += 1;
            let emitted = serialize_conllu(&corpus);
            let reparsed = parse_conllu(emitted.as_bytes()).expect("serializer output parses");
            assert_eq!(corpus, reparsed);
        }

        let reference = mutate(&mut rng, REFERENCE_SEED);
        if let Ok(docs) = parse_reference_conllu(reference.as_slice()) {
            accepted[1] += 1;
            let emitted = serialize_reference_conllu(&docs);
            assert_eq!(parse_reference_conllu(emitted.as_bytes()).unwrap(), docs);
        }

        let vectors = mutate(&mut rng, VECTORS_SEED);
        if let Ok(table) = load_vectors(vectors.as_slice()) {
            accepted[2] += 1;
            assert!(table.dim() > 0);
        }
    }
    // the mutator must not be so destructive that nothing parses
    assert!(
        accepted.iter().all(|n| *n > 100),
        "too few accepted inputs: {accepted:?}"
    );
}

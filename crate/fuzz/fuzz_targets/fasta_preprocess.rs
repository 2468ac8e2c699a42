#![no_main]
use libfuzzer_sys::fuzz_target;

use otindex::preprocess_fasta;

fuzz_target!(|data: &[u8]| {
    if let Ok(seq) = preprocess_fasta(data) {
        assert!(!seq.is_empty());
        assert!(!seq.contains(&b'\n') && !seq.contains(&b'\r'));
        assert!(!seq.iter().any(|b| b.is_ascii_lowercase()));
        // Already-clean input passes through unchanged.
        assert_eq!(preprocess_fasta(&seq).unwrap(), seq);
    }
});

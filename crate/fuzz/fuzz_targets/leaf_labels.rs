#![no_main]

use libfuzzer_sys::fuzz_target;
use partcx::partitions::LeafSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(l) = LeafSet::parse(text) {
        assert!(l.len() <= 32);
        let full = l.full();
        assert_eq!(l.parse_mask(&l.format_mask(full)).expect("formatted mask parses"), full);
    }
});

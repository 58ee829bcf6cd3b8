#![no_main]

use libfuzzer_sys::fuzz_target;
use partcx::partitions::{Chain, LeafSet, Partition};

// First line: leaf labels. Second line: a partition, or a chain with '<'.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut lines = text.splitn(2, '\n');
    let Ok(leaves) = LeafSet::parse(lines.next().unwrap_or("")) else { return };
    let rest = lines.next().unwrap_or("");
    if let Ok(p) = Partition::parse(&leaves, rest) {
        assert_eq!(Partition::parse(&leaves, &p.display(&leaves)).expect("display parses"), p);
        assert_eq!(Partition::from_json(&leaves, &p.to_json(&leaves)).expect("JSON parses"), p);
    }
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(rest) {
        let _ = Partition::from_json(&leaves, &v);
    }
    let parts: Vec<&str> = rest.split('<').collect();
    if let Ok(c) = Chain::parse(&leaves, &parts) {
        let _ = c.to_dot(&leaves, "c");
    }
});

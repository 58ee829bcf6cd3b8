#![no_main]

use libfuzzer_sys::fuzz_target;
use partcx::trees::Tree;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) {
        if let Ok(t) = Tree::from_json(&v) {
            assert_eq!(Tree::from_json(&t.to_json()).expect("round trip"), t);
            let _ = t.to_dot("t");
            let _ = t.vertex_poset();
        }
    }
});

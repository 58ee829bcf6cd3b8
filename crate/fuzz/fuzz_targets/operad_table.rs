#![no_main]

use libfuzzer_sys::fuzz_target;
use partcx::operads::parse_table;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(op) = parse_table(text) {
            // Anything accepted must survive a round trip.
            let again = parse_table(&op.to_table()).expect("serialized table parses");
            assert_eq!(again, op);
        }
    }
});

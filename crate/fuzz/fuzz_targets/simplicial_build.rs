#![no_main]

use libfuzzer_sys::fuzz_target;
use partcx::simplicial::{normalized_chain_complex, Face, Ring, SimplicialSet};

// JSON `[labels, faces]` where faces[d][k] lists face indices, negative for
// degenerate faces.
fuzz_target!(|data: &[u8]| {
    let Ok((labels, faces)) = serde_json::from_slice::<(Vec<Vec<String>>, Vec<Vec<Vec<i64>>>)>(data) else { return };
    if labels.iter().map(Vec::len).sum::<usize>() > 200 {
        return;
    }
    let faces = faces
        .into_iter()
        .map(|d| {
            d.into_iter()
                .map(|fs| fs.into_iter().map(|i| Face { index: i.unsigned_abs() as usize, degenerate: i < 0 }).collect())
                .collect()
        })
        .collect();
    if let Ok(x) = SimplicialSet::build(labels, faces) {
        let c = normalized_chain_complex(&x, Ring::Integers, true);
        assert!(c.check_d_squared().is_ok());
        let _ = x.reduced_homology();
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(w) = dyadic::io::tree_weight_from_json(text) {
        let round = dyadic::io::tree_weight_from_json(&dyadic::io::tree_weight_to_json(&w))
            .expect("serializer output must parse");
        assert_eq!(w, round);
        std::hint::black_box(w.square_masses());
    }
});

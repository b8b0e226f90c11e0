#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(symbol) = dyadic::io::symbol_from_json(text) {
        // accepted input must re-serialize and re-parse to the same symbol
        let round = dyadic::io::symbol_from_json(&dyadic::io::symbol_to_json(&symbol))
            .expect("serializer output must parse");
        assert_eq!(symbol, round);
        std::hint::black_box(symbol.cm_norm());
    }
});

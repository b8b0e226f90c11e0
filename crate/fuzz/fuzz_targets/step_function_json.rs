#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = dyadic::io::step_function_from_json(text) {
        let round =
            dyadic::io::step_function_from_json(&dyadic::io::step_function_to_json(&f))
                .expect("serializer output must parse");
        assert_eq!(f, round);
        // analysis/synthesis must stay total on accepted (finite) input
        std::hint::black_box(f.analyze().synthesize());
    }
});

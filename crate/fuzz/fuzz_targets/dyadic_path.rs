#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(i) = dyadic::tree::DyadicIndex::from_path(text) {
        // parse/print round-trip and navigation sanity
        assert_eq!(dyadic::tree::DyadicIndex::from_path(&i.path()).unwrap(), i);
        if let Some(p) = i.parent() {
            assert_eq!(p.level() + 1, i.level());
            assert!(i.is_contained_in(&p));
        }
        assert!(i.measure() > 0.0);
    }
});

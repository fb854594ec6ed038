#![no_main]

use leaklab::estimators::DiscreteChannel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ch) = DiscreteChannel::from_text(text) {
        let again = DiscreteChannel::from_text(&ch.to_text()).expect("rendered channel parses");
        assert_eq!(again, ch);
    }
});

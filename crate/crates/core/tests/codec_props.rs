use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spikelink::codec::{
    burst_isi, burst_spike_count, codebook, encode, encode_deterministic, max_level, ttfs_fire_index, Amplitude,
    CodecConfig, Scheme,
};

fn deterministic() -> impl Strategy<Value = Scheme> {
    prop_oneof![Just(Scheme::Ttfs), Just(Scheme::Phase), Just(Scheme::Burst)]
}

proptest! {
    #[test]
    fn trains_have_the_configured_length(
        scheme in deterministic(),
        n_bits in 1u32..=8,
        train_len in 8usize..=96,
        frac in 0.0f64..=1.0,
    ) {
        let cfg = CodecConfig::new(n_bits, train_len).unwrap();
        prop_assume!(cfg.validate_for(scheme).is_ok());
        let level = (frac * f64::from(max_level(n_bits))).round() as u32;
        let t = encode_deterministic(scheme, Amplitude::new(level, n_bits).unwrap(), &cfg).unwrap();
        prop_assert_eq!(t.len(), train_len);
        prop_assert!(t.spike_indices().iter().all(|&i| i < train_len));
    }

    #[test]
    fn louder_inputs_fire_earlier_and_denser(n_bits in 1u32..=8, train_len in 8usize..=96) {
        let cfg = CodecConfig::new(n_bits, train_len).unwrap();
        let mut prev_fire = None::<usize>;
        let mut prev_count = 0;
        let mut prev_isi = usize::MAX;
        for level in 0..=max_level(n_bits) {
            let a = Amplitude::new(level, n_bits).unwrap();
            if let Some(k) = ttfs_fire_index(a, &cfg) {
                if let Some(p) = prev_fire {
                    prop_assert!(k <= p);
                }
                prev_fire = Some(k);
            } else {
                prop_assert!(prev_fire.is_none(), "silence after a firing level");
            }
            let ns = burst_spike_count(a, &cfg);
            prop_assert!(ns >= prev_count);
            prev_count = ns;
            if ns > 1 {
                let isi = burst_isi(a, &cfg);
                prop_assert!(isi <= prev_isi);
                prev_isi = isi;
            }
        }
    }

    #[test]
    fn phase_spike_count_is_popcount(n_bits in 1u32..=10, extra in 0usize..40, level_seed: u32) {
        let cfg = CodecConfig::new(n_bits, n_bits as usize + extra).unwrap();
        let level = level_seed % (max_level(n_bits) + 1);
        let t = encode_deterministic(Scheme::Phase, Amplitude::new(level, n_bits).unwrap(), &cfg).unwrap();
        prop_assert_eq!(t.spike_count() as u32, level.count_ones());
    }

    #[test]
    fn rate_is_a_pure_function_of_the_stream(seed: u64, level in 0u32..=15) {
        let cfg = CodecConfig::new(4, 48).unwrap();
        let a = Amplitude::new(level, 4).unwrap();
        let x = encode(Scheme::Rate, a, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let y = encode(Scheme::Rate, a, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(&x, &y);
        if level == 0 {
            prop_assert_eq!(x.spike_count(), 0);
        }
        if level == 15 {
            prop_assert_eq!(x.spike_count(), 48);
        }
    }
}

#[test]
fn rate_spike_fraction_matches_amplitude() {
    let cfg = CodecConfig::new(4, 40_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for level in [1u32, 5, 8, 13] {
        let a = Amplitude::new(level, 4).unwrap();
        let t = encode(Scheme::Rate, a, &cfg, &mut rng).unwrap();
        let p = a.value();
        let frac = t.spike_count() as f64 / 40_000.0;
        let se = (p * (1.0 - p) / 40_000.0).sqrt();
        assert!((frac - p).abs() < 5.0 * se, "level {level}: {frac} vs {p}");
    }
}

#[test]
fn collision_count_matches_distinct_codewords() {
    for (n_bits, len) in [(8u32, 16usize), (8, 32), (8, 64), (4, 16), (4, 32)] {
        let cfg = CodecConfig::new(n_bits, len).unwrap();
        let book = codebook(Scheme::Ttfs, &cfg).unwrap();
        let distinct: HashSet<_> = book.trains().iter().collect();
        assert_eq!(book.collisions(), book.len() - distinct.len(), "({n_bits},{len})");
        // phase is injective whenever it fits
        let book = codebook(Scheme::Phase, &cfg).unwrap();
        assert_eq!(book.collisions(), 0);
    }
}

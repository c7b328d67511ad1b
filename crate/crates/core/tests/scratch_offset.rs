mod support;

use srckit::classify::{classify_lpca_src, classify_src};
use srckit::dictionary;
use srckit::synth::{generate, SynthConfig};

#[test]
#[ignore]
fn offset_scan() {
    for offset in [0.1, 0.2, 0.3, 0.4, 0.5] {
        for n in [2usize, 4] {
            let mut src_total = 0usize;
            let mut lpca_total = 0usize;
            let mut kappa_src = 0.0;
            let mut kappa_lpca = 0.0;
            let mut count = 0usize;
            let trials = 8;
            for seed in 0..trials {
                let data = generate(&SynthConfig {
                    per_class: 25,
                    noise: 0.001,
                    test_offset: offset,
                    seed,
                    ..SynthConfig::default()
                })
                .unwrap();
                let dict = dictionary::build_extended(&data.train, 1, n, seed).unwrap();
                for i in 0..data.test.len() {
                    let y = data.test.sample(i);
                    let truth = data.test.class_of(i);
                    let s = classify_src(&data.train, &y, 1e-3).unwrap();
                    let l = classify_lpca_src(&dict, &y, 1e-3).unwrap();
                    if s.label == truth {
                        src_total += 1;
                    }
                    if l.label == truth {
                        lpca_total += 1;
                    }
                    kappa_src += s.kappa.unwrap() as f64;
                    kappa_lpca += l.kappa.unwrap() as f64;
                    count += 1;
                }
            }
            println!(
                "offset {offset} n {n}: src {:.4} lpca {:.4} adv {:+.4} kappa {:.1}/{:.1}",
                src_total as f64 / count as f64,
                lpca_total as f64 / count as f64,
                (lpca_total as f64 - src_total as f64) / count as f64,
                kappa_lpca / count as f64,
                kappa_src / count as f64,
            );
        }
    }
}

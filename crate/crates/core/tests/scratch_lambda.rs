mod support;

use srckit::classify::{classify_lpca_src, classify_src};
use srckit::dictionary;
use srckit::synth::{generate, SynthConfig};

#[test]
#[ignore]
fn lambda_neighbor_scan() {
    let trials = 8;
    for n0 in [25usize] {
        for n in [1usize, 2] {
            for lambda in [1e-3, 5e-3, 1e-2, 5e-2] {
                let mut src_ok = 0usize;
                let mut lpca_ok = 0usize;
                let mut count = 0usize;
                for seed in 0..trials {
                    let data = generate(&SynthConfig {
                        per_class: n0,
                        noise: 0.001,
                        seed: seed + 40,
                        ..SynthConfig::default()
                    })
                    .unwrap();
                    let dict =
                        dictionary::build_extended(&data.train, 1, n, seed + 40).unwrap();
                    for i in 0..data.test.len() {
                        let y = data.test.sample(i);
                        let truth = data.test.class_of(i);
                        match classify_src(&data.train, &y, lambda) { Ok(p) if p.label == truth => { src_ok += 1; } Ok(_) => {} Err(e) => println!("SRC ERR seed {seed} i {i} lambda {lambda}: {e}") }
                        if false {
                            src_ok += 1;
                        }
                        match classify_lpca_src(&dict, &y, lambda) {
                            Ok(p) if p.label == truth => lpca_ok += 1,
                            Ok(_) => {}
                            Err(e) => println!("LPCA ERR seed {seed} i {i} lambda {lambda}: {e}"),
                        }
                        count += 1;
                    }
                }
                println!(
                    "N0 {n0} n {n} lambda {lambda}: src {:.4} lpca {:.4} adv {:+.4}",
                    src_ok as f64 / count as f64,
                    lpca_ok as f64 / count as f64,
                    (lpca_ok as f64 - src_ok as f64) / count as f64
                );
            }
        }
    }
}

mod support;

use srckit::classify::{classify_src, classify_src_pruned};
use srckit::synth::{generate, SynthConfig};

#[test]
#[ignore]
fn pruned_tracks_src() {
    let trials = 6;
    for n in [1usize, 2, 4, 8, 12] {
        let mut src_ok = 0usize;
        let mut pruned_ok = 0usize;
        let mut count = 0usize;
        let mut ny = 0.0;
        for seed in 0..trials {
            let data = generate(&SynthConfig {
                per_class: 25,
                noise: 0.001,
                seed: seed + 60,
                ..SynthConfig::default()
            })
            .unwrap();
            for i in 0..data.test.len() {
                let y = data.test.sample(i);
                let truth = data.test.class_of(i);
                if classify_src(&data.train, &y, 1e-3).unwrap().label == truth {
                    src_ok += 1;
                }
                match classify_src_pruned(&data.train, &y, 1e-3, n) {
                    Ok(p) => {
                        if p.label == truth {
                            pruned_ok += 1;
                        }
                        ny += p.dictionary_size;
                    }
                    Err(e) => println!("ERR {e}"),
                }
                count += 1;
            }
        }
        println!(
            "n {n}: src {:.4} pruned {:.4} mean Ny {:.0}",
            src_ok as f64 / count as f64,
            pruned_ok as f64 / count as f64,
            ny / count as f64
        );
    }
}

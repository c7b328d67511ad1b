mod support;

use nalgebra::DMatrix;
use srckit::dictionary;
use srckit::linalg;
use srckit::synth::{generate, SynthConfig};

#[test]
#[ignore]
fn per_class_reach() {
    let data = generate(&SynthConfig {
        per_class: 25,
        noise: 0.001,
        seed: 3,
        ..SynthConfig::default()
    })
    .unwrap();
    let train = &data.train;
    let n = 4;
    let dict = dictionary::build_extended(train, 1, n, 3).unwrap();

    for i in [26usize, 42, 57, 63] {
        let y = data.test.sample(i);
        let truth = data.test.class_of(i);
        let yn = linalg::normalized(&y).unwrap();
        let pruned = dictionary::prune(&dict, &yn).unwrap();
        println!("sample {i} truth {truth}:");
        for class in 0..4 {
            // sample-only columns (last column of each block) vs full blocks
            let mut sample_cols = Vec::new();
            let mut block_cols = Vec::new();
            for (b, range) in pruned.block_spans() {
                if dict.blocks()[b].class != class {
                    continue;
                }
                let w = range.len();
                for (k, j) in range.enumerate() {
                    block_cols.push(pruned.columns.column(j).into_owned());
                    if k == w - 1 {
                        sample_cols.push(pruned.columns.column(j).into_owned());
                    }
                }
            }
            let to_matrix = |cols: &Vec<nalgebra::DVector<f64>>| {
                let mut m = DMatrix::zeros(yn.len(), cols.len());
                for (j, c) in cols.iter().enumerate() {
                    m.set_column(j, c);
                }
                m
            };
            let rs = support::least_squares_residual_oracle(&to_matrix(&sample_cols), &yn);
            let rb = support::least_squares_residual_oracle(&to_matrix(&block_cols), &yn);
            // distance from y to the nearest single sample of the class
            let dmin = sample_cols
                .iter()
                .map(|c| (&yn - c).norm())
                .fold(f64::INFINITY, f64::min);
            println!(
                "  class {class}: kept {} samples, nearest {dmin:.4}, ls(samples) {rs:.4}, ls(blocks) {rb:.4}",
                sample_cols.len()
            );
        }
    }
}

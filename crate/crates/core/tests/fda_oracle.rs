use stiefelgen::fda::{functional_boxplot, mbd, FunctionalEnsemble};
use stiefelgen::linalg::random_normal;
use stiefelgen::rng::seeded;
use stiefelgen::DMatrix;

/// Direct enumeration over every unordered pair of curves.
fn mbd_oracle(y: &DMatrix<f64>) -> Vec<f64> {
    let (k, t) = y.shape();
    let pairs = (k * (k - 1) / 2) as f64;
    (0..k)
        .map(|c| {
            let mut total = 0.0;
            for i in 0..k {
                for j in i + 1..k {
                    let inside = (0..t)
                        .filter(|&s| {
                            let (lo, hi) = (y[(i, s)].min(y[(j, s)]), y[(i, s)].max(y[(j, s)]));
                            lo <= y[(c, s)] && y[(c, s)] <= hi
                        })
                        .count();
                    total += inside as f64 / t as f64;
                }
            }
            total / pairs
        })
        .collect()
}

#[test]
fn fast_depth_matches_enumeration() {
    for case in 0..200u64 {
        let k = 2 + (case % 7) as usize;
        let t = 1 + (case % 25) as usize;
        let mut y: DMatrix<f64> = random_normal(k, t, &mut seeded(case));
        if case % 3 == 0 {
            // coarse values force ties
            y.apply(|v| *v = v.round());
        }
        let fast = mbd(&FunctionalEnsemble::new(y.clone()).unwrap());
        for (a, b) in fast.iter().zip(mbd_oracle(&y)) {
            assert!((a - b).abs() < 1e-12, "case {case}");
        }
    }
}

#[test]
fn scaling_keeps_the_median() {
    let y: DMatrix<f64> = random_normal(9, 12, &mut seeded(5));
    let a = functional_boxplot(&FunctionalEnsemble::new(y.clone()).unwrap(), &[0.5], 1.5).unwrap();
    let b = functional_boxplot(&FunctionalEnsemble::new(y * 3.5).unwrap(), &[0.5], 1.5).unwrap();
    assert_eq!(a.median_index, b.median_index);
}

//! Property tests: cone barriers are logarithmically homogeneous,
//! F(lambda x) = F(x) - N log(lambda), for every interior point and
//! every positive scale.

use barrierlab::{BarrierGeometry, LorentzGeometry, OrthantGeometry};
use nalgebra::DVector;
use proptest::prelude::*;

proptest! {
    #[test]
    fn orthant_barrier_is_log_homogeneous(
        coords in proptest::collection::vec(0.05f64..20.0, 1..6),
        lambda in 0.1f64..10.0,
    ) {
        let geom = OrthantGeometry::new(coords.len()).unwrap();
        let n = geom.dim() as f64;
        let x = DVector::from_vec(coords);
        let scaled = geom.barrier(&x.scale(lambda));
        let predicted = geom.barrier(&x) - n * lambda.ln();
        prop_assert!(
            (scaled - predicted).abs() < 1e-10,
            "got {scaled}, predicted {predicted}"
        );
    }

    #[test]
    fn lorentz_barrier_is_log_homogeneous(
        spatial in proptest::collection::vec(-0.5f64..0.5, 1..5),
        lambda in 0.1f64..10.0,
    ) {
        let norm = spatial.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm < 0.95);
        let mut coords = vec![1.0];
        coords.extend(spatial);
        let geom = LorentzGeometry::new(coords.len()).unwrap();
        let ambient = geom.dim() as f64;
        let x = DVector::from_vec(coords);
        prop_assume!(geom.contains(&x));
        let scaled = geom.barrier(&x.scale(lambda));
        let predicted = geom.barrier(&x) - ambient * lambda.ln();
        prop_assert!(
            (scaled - predicted).abs() < 1e-10,
            "got {scaled}, predicted {predicted}"
        );
    }
}

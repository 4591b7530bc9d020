use mstperc::geometry::{dist, sample_poisson, Configuration, Cube, Point};
use proptest::prelude::*;

#[test]
fn poisson_restriction_keeps_the_intensity() {
    // counts in a quarter of the box average a quarter of the mean
    let dom = Cube::centered(2, 4.0).unwrap();
    let sub = Cube::new(Point::from_f64(&[2.0, 2.0]), 2.0).unwrap();
    let counts: Vec<f64> = (0..4000)
        .map(|s| sample_poisson::<f64>(&dom, 0.5, s).unwrap().restrict_to(&sub).len() as f64)
        .collect();
    let m = counts.iter().sum::<f64>() / counts.len() as f64;
    let v = counts.iter().map(|c| (c - m) * (c - m)).sum::<f64>() / (counts.len() - 1) as f64;
    let se = (v / counts.len() as f64).sqrt();
    assert!((m - 8.0).abs() < 3.0 * se, "{m}");
    // Poisson counts: variance equals the mean
    assert!((v / m - 1.0).abs() < 0.1, "{v} vs {m}");
}

#[test]
fn poisson_is_a_pure_function_of_its_seed() {
    let dom = Cube::centered(3, 2.0).unwrap();
    let a = sample_poisson::<f64>(&dom, 3.0, 9).unwrap();
    let b = sample_poisson::<f64>(&dom, 3.0, 9).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_poisson::<f64>(&dom, 3.0, 10).unwrap());
    assert!(a.iter().all(|p| dom.contains(p)));
    assert!(sample_poisson::<f64>(&dom, -1.0, 0).is_err());
    assert!(sample_poisson::<f64>(&dom, 0.0, 0).unwrap().is_empty());
}

#[test]
fn binary_round_trip() {
    let dom = Cube::centered(2, 3.0).unwrap();
    let c = sample_poisson::<f64>(&dom, 2.0, 1).unwrap();
    let mut buf = Vec::new();
    c.write_binary(&mut buf).unwrap();
    assert_eq!(Configuration::<f64>::read_binary(&buf[..]).unwrap(), c);
    assert!(Configuration::<f64>::read_binary(&buf[..buf.len() - 3]).is_err());
    buf[0] ^= 1;
    assert!(Configuration::<f64>::read_binary(&buf[..]).is_err());
}

#[test]
fn configurations_reject_points_outside_the_domain() {
    let dom = Cube::centered(2, 1.0).unwrap();
    assert!(Configuration::new(dom.clone(), &[Point::from_f64(&[2.0, 0.0])]).is_err());
    assert!(Configuration::new(dom, &[Point::from_f64(&[0.0, 0.0, 0.0])]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cube_distance_is_the_clamped_distance(x in -5.0f64..5.0, y in -5.0f64..5.0, h in 0.1f64..3.0) {
        let cube = Cube::centered(2, h).unwrap();
        let clamped = [x.clamp(-h, h), y.clamp(-h, h)];
        let d = dist(&[x, y], &clamped);
        prop_assert!((cube.distance(&[x, y]) - d).abs() < 1e-12);
        prop_assert_eq!(cube.contains(&[x, y]), d == 0.0);
    }

    #[test]
    fn distance_is_a_metric(a in prop::array::uniform3(-3.0f64..3.0), b in prop::array::uniform3(-3.0f64..3.0), c in prop::array::uniform3(-3.0f64..3.0)) {
        prop_assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-12);
        prop_assert_eq!(dist(&a, &b), dist(&b, &a));
    }

    #[test]
    fn union_and_filter_preserve_points(seed in any::<u64>()) {
        let dom = Cube::centered(2, 2.0).unwrap();
        let a = sample_poisson::<f64>(&dom, 2.0, seed).unwrap();
        let left = a.filter(|p| p[0] < 0.0);
        let right = a.filter(|p| p[0] >= 0.0);
        prop_assert_eq!(left.len() + right.len(), a.len());
        prop_assert_eq!(left.union(&right).len(), a.len());
    }
}

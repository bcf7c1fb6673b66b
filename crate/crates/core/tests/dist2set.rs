use spacestat::dist2set::{
    decode_sampler_set, distribution_to_set, distribution_to_set_estimated, estimate_freq, exact_distribution,
    hoeffding_samples, random_sampler, Dist2SetPath, Sampler, ThresholdTester,
};
use spacestat::BitString;

fn sampler(src: &str) -> Sampler {
    Sampler::parse(src).unwrap()
}

fn constant(x: &str) -> Sampler {
    let mut src = format!("sampler n={} R=0 m=1\n", x.len());
    for c in x.chars() {
        src.push_str(&format!("out {c}\n"));
    }
    src.push_str("halt\nend\n");
    sampler(&src)
}

fn copy3() -> Sampler {
    sampler("sampler n=3 R=3 m=1\nrout\nrout\nrout\nhalt\nend\n")
}

#[test]
fn deterministic_sampler() {
    let s = constant("0110");
    let d = exact_distribution(&s).unwrap();
    assert_eq!(d.probability(0b0110), 1.0);
    assert_eq!(estimate_freq(&d, 0b0110, 17, 3), 1.0);
    let x: BitString = "0110".parse().unwrap();
    let r = distribution_to_set(&x, Some(&s)).unwrap();
    assert_eq!(r.k, 0);
    assert!(r.set.contains(0b0110));
    assert!(r.set.len() <= 4);
    let t = ThresholdTester::new(0);
    assert!(t.accept_probability(&d, 0b0110) > 2.0 / 3.0);
    assert!(t.accept_probability(&d, 0b0111) < 1.0 / 3.0);
}

#[test]
fn uniform_on_eight() {
    let s = copy3();
    let d = exact_distribution(&s).unwrap();
    assert!((0..8).all(|y| d.count(y) == 1));
    let eps = 1.0 / 16.0;
    let n = hoeffding_samples(eps);
    let good = (0..100).filter(|&seed| (estimate_freq(&d, 5, n, seed) - 0.125).abs() <= eps).count();
    assert!(good >= 67, "{good}");
    let x: BitString = "101".parse().unwrap();
    let r = distribution_to_set(&x, Some(&s)).unwrap();
    assert_eq!(r.k, 3);
    assert_eq!(r.path, Dist2SetPath::Threshold);
    assert_eq!(r.set.len(), 8);
    assert_eq!(decode_sampler_set(&r.certificate).unwrap(), r.set);
    assert_eq!(r.certificate.payload_len(), s.charge());
}

#[test]
fn rare_outputs_give_the_whole_space() {
    // 00 on the all-zero tape, 11 elsewhere: P(00) = 1/8 < 2^{-2}
    let s = sampler(
        "sampler n=2 R=3 m=1\njmp rand1 +5\njmp rand1 +4\njmp rand1 +3\nout 0\nout 0\nhalt\nout 1\nout 1\nhalt\nend\n",
    );
    let d = exact_distribution(&s).unwrap();
    assert_eq!(d.count(0), 1);
    assert_eq!(d.count(3), 7);
    let r = distribution_to_set(&"00".parse().unwrap(), Some(&s)).unwrap();
    assert_eq!(r.path, Dist2SetPath::FullSpace);
    assert_eq!(r.set.len(), 4);
    assert!(distribution_to_set(&"01".parse().unwrap(), Some(&s)).is_err());
    let none = distribution_to_set(&"01".parse().unwrap(), None).unwrap();
    assert_eq!(none.set.len(), 1);
    assert_eq!(decode_sampler_set(&none.certificate).unwrap(), none.set);
}

#[test]
fn invalid_samplers_are_rejected() {
    // reads past its one-bit tape on half the tapes
    let s = sampler("sampler n=1 R=1 m=1\njmp rand1 +1\nrout\nrout\nhalt\nend\n");
    assert!(exact_distribution(&s).is_err());
    let short = sampler("sampler n=2 R=0 m=1\nout 1\nhalt\nend\n");
    assert!(exact_distribution(&short).is_err());
}

#[test]
fn derandomized_tester_agrees_with_tape_enumeration() {
    for seed in 0..6 {
        let s = random_sampler(2, 3, seed).unwrap();
        let d = exact_distribution(&s).unwrap();
        if d.tape_len == 0 {
            continue;
        }
        for k in 0..=2 {
            let samples = (20 / d.tape_len).min(5) as u64;
            let t = ThresholdTester::with_samples(k, samples);
            for y in 0..4 {
                let (acc, total) = t.accept_fraction_by_tapes(&d, y).unwrap();
                assert_eq!(t.derandomized(&d, y), 2 * acc >= total, "seed {seed} k {k} y {y}");
                assert!((t.accept_probability(&d, y) - acc as f64 / total as f64).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn generated_samplers_pipeline() {
    let mut samplers = 0;
    let mut runs = 0;
    let mut agree = 0;
    for seed in 0..40u64 {
        let n = 2 + (seed % 4) as usize;
        let s = random_sampler(n, 10, seed).unwrap();
        assert!(s.tape_len <= 10);
        let d = exact_distribution(&s).unwrap();
        assert_eq!(d.counts.values().sum::<u64>(), d.tapes());
        samplers += 1;
        for x in d.support() {
            let xb = BitString::from_u64(x, n);
            let r = distribution_to_set(&xb, Some(&s)).unwrap();
            assert!(r.set.contains(x));
            assert!(r.size_ok && r.bracket_ok, "{r:?}");
            assert_eq!(decode_sampler_set(&r.certificate).unwrap(), r.set);
            if let Some(t) = r.tester {
                for y in 0..1u64 << n {
                    let p = d.probability(y);
                    if p > 2f64.powi(-(r.k as i32) - 1) {
                        assert!(t.accept_probability(&d, y) > 2.0 / 3.0);
                        assert!(r.set.contains(y));
                    }
                    if p < 2f64.powi(-(r.k as i32) - 2) {
                        assert!(t.accept_probability(&d, y) < 1.0 / 3.0);
                        assert!(!r.set.contains(y));
                    }
                }
            }
            let e = distribution_to_set_estimated(&xb, &s, seed * 1000 + x).unwrap();
            runs += 1;
            agree += (e.set == r.set) as usize;
        }
    }
    assert!(samplers >= 20);
    let rate = agree as f64 / runs as f64;
    println!("estimate path agreement {agree}/{runs} = {rate:.3}");
    assert!(rate >= 0.95);
}

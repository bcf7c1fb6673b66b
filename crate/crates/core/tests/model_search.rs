use spacestat::complexity::Lab;
use spacestat::families::{ComplexityMode, Family};
use spacestat::machine::Caps;
use spacestat::model_search::{
    conditional_index, decode_conditional_index, hypothesis_scan, improve_model, Model,
};
use spacestat::nwgen::{decode_member, SearchContext, Strategy};
use spacestat::BitString;

fn lab(len: usize) -> Lab {
    Lab::new(Caps {
        program_len: len,
        ..Caps::default()
    })
    .unwrap()
}

/// Models containing `x` whose complexity and size class are not worse
/// than `a`'s, recounted from the definitions.
fn recount(lab: &Lab, a: Model, x: u64, m: usize, mode: ComplexityMode) -> usize {
    let cx = |idx: u64| match mode {
        ComplexityMode::Declared => Some(64 - idx.leading_zeros() as usize),
        ComplexityMode::Measured => lab.cd_set(&a.family.set(a.n, idx).unwrap(), m).unwrap().value(),
    };
    let ca = cx(a.index).unwrap();
    let size_a = a.set().unwrap().len();
    let j = (size_a as f64).log2().ceil() as usize;
    (0..a.family.index_count(a.n))
        .filter(|&idx| {
            let s = a.family.set(a.n, idx).unwrap();
            s.contains(x) && s.len() <= 1 << j && cx(idx).is_some_and(|c| c <= ca)
        })
        .count()
}

#[test]
fn conditional_index_round_trips() {
    let lab = lab(16);
    let mut checked = 0;
    for (family, n, mode) in [
        (Family::HammingBalls, 3, ComplexityMode::Declared),
        (Family::Cylinders, 4, ComplexityMode::Declared),
        (Family::Cylinders, 4, ComplexityMode::Measured),
        (Family::FullSpace, 3, ComplexityMode::Measured),
    ] {
        for idx in 0..family.index_count(n) {
            let a = Model::new(family, n, idx);
            let set = a.set().unwrap();
            for x in set.iter() {
                let xb = BitString::from_u64(x, n);
                let d = match conditional_index(&lab, a, &xb, 6, mode) {
                    Ok(d) => d,
                    Err(spacestat::Error::Cap { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let count = recount(&lab, a, x, 6, mode);
                let width = if count <= 1 { 0 } else { (count as f64).log2().ceil() as usize };
                assert_eq!(d.payload_len(), width);
                assert_eq!(decode_conditional_index(&lab, &d, &xb).unwrap(), a);
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
    let a = Model::new(Family::FullSpace, 3, 0);
    let d = conditional_index(&lab, a, &BitString::from_u64(5, 3), 6, ComplexityMode::Measured).unwrap();
    assert_eq!(d.payload_len(), 0);
    let outside = Model::new(Family::Cylinders, 3, 1);
    assert!(conditional_index(&lab, outside, &BitString::from_u64(7, 3), 6, ComplexityMode::Declared).is_err());
}

#[test]
fn length_two_cylinders_at_n5() {
    let lab = lab(16);
    for x in 0..32u64 {
        let u = BitString::from_u64(x >> 3, 2);
        let a = Model::new(Family::Cylinders, 5, Family::cylinder_index(&u));
        let xb = BitString::from_u64(x, 5);
        let d = conditional_index(&lab, a, &xb, 6, ComplexityMode::Measured).unwrap();
        let count = recount(&lab, a, x, 6, ComplexityMode::Measured);
        // longer prefixes cost more, shorter ones are too large
        assert_eq!(count, 1);
        assert_eq!(d.payload_len(), 0);
    }
}

#[test]
fn improvements_contain_x_and_decode() {
    let lab = lab(16);
    let ctx = SearchContext::default();
    let mut compared = 0;
    for (family, n, mode) in [
        (Family::HammingBalls, 3, ComplexityMode::Declared),
        (Family::Cylinders, 4, ComplexityMode::Declared),
        (Family::Cylinders, 4, ComplexityMode::Measured),
    ] {
        for idx in 0..family.index_count(n) {
            let a = Model::new(family, n, idx);
            let x = a.set().unwrap().iter().next().unwrap();
            let xb = BitString::from_u64(x, n);
            let mut lens = Vec::new();
            for strategy in [Strategy::Nw, Strategy::Bruteforce, Strategy::Mc] {
                let r = match improve_model(&lab, a, &xb, 6, mode, strategy, &ctx) {
                    Ok(r) => r,
                    Err(spacestat::Error::Cap { .. }) => break,
                    Err(e) => panic!("{e}"),
                };
                assert!(r.b_set.contains(x));
                assert!(r.size_ok);
                assert!(r.a_prime_size >= 1 << r.k);
                assert!(r.excess <= r.log_allowance + 2.0, "{r:?}");
                let (back, set) = decode_member(&lab, &r.certificate, &ctx).unwrap();
                assert_eq!((back, set), (r.b.index, r.b_set));
                if strategy != Strategy::Mc {
                    lens.push(r.certificate.total_len());
                }
            }
            if lens.len() == 2 {
                assert_eq!(lens[0], lens[1]);
                compared += 1;
            }
        }
    }
    assert!(compared > 20);
}

#[test]
fn full_space_is_an_improvement_with_empty_payload() {
    let lab = lab(16);
    let a = Model::new(Family::FullSpace, 4, 0);
    let xb: BitString = "1011".parse().unwrap();
    let r = improve_model(&lab, a, &xb, 8, ComplexityMode::Measured, Strategy::Nw, &SearchContext::default()).unwrap();
    assert_eq!(r.b, a);
    assert_eq!(r.certificate.payload_len(), 0);
}

/// Worst gap recomputed from the complexities directly, when all are finite.
fn oracle_worst_gap(lab: &Lab, family: Family, n: usize, m: usize, p: usize) -> Option<f64> {
    let sets = family.sets(n).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for x in 0..1u64 << n {
        let xb = BitString::from_u64(x, n);
        let cx = lab.cd_string(&xb, m).unwrap().value()? as f64;
        let holders: Vec<_> = sets.iter().filter(|(_, s)| s.contains(x)).collect();
        let mut best = f64::INFINITY;
        for (_, b) in &holders {
            best = best.min(lab.cd_set(b, p).unwrap().value()? as f64 + b.log_size() - cx);
        }
        for (_, a) in &holders {
            let d = a.log_size() - lab.cd_cond(&xb, a, p).unwrap().value()? as f64;
            worst = worst.max(best - d);
        }
    }
    Some(worst)
}

#[test]
fn hypothesis_scan_evidence() {
    let lab = lab(16);
    let full = hypothesis_scan(&lab, Family::FullSpace, 4, 10, 6, 2.0 * 14f64.log2()).unwrap();
    assert_eq!(full.rows.len(), 16);
    assert_eq!(full.exceeding, 0);
    assert_eq!(full.within, 16);
    let mut table = Vec::new();
    for n in 1..=4 {
        let s = hypothesis_scan(&lab, Family::Cylinders, n, 10, 6, 2.0 * ((n + 10) as f64).log2()).unwrap();
        assert_eq!(s.rows.len(), (n + 1) << n);
        assert_eq!(s.exceeding + s.within + s.undetermined, s.rows.len());
        let oracle = oracle_worst_gap(&lab, Family::Cylinders, n, 10, 6);
        if let Some(o) = oracle {
            assert_eq!(s.worst_gap_hi, Some(o));
            assert_eq!(s.worst_gap_lo, Some(o));
        }
        table.push((n, s.worst_gap_lo, s.worst_gap_hi, s.exceeding));
    }
    println!("cylinder worst gaps: {table:?}");
    let worst: Vec<f64> = table.iter().map(|t| t.2.unwrap()).collect();
    assert_eq!(worst, vec![7.0, 8.0, 8.0, 9.0]);
}

use std::collections::BTreeMap;

use spacestat::complexity::Lab;
use spacestat::machine::Caps;
use spacestat::symmetry::{
    build_pair_family, decode_heavy_first, decode_pair_given_first, full_pool, soi_forward,
    soi_reverse, ForwardReport, PairFamily,
};
use spacestat::StringSet;

const N: usize = 3;
const M: usize = 4;

fn lab(len: usize) -> Lab {
    Lab::new(Caps {
        program_len: len,
        ..Caps::default()
    })
    .unwrap()
}

/// Pairs with complexity at most `k`, recounted by a direct filter over the pool.
fn recount_d(lab: &Lab, k: usize) -> Vec<(StringSet, StringSet)> {
    let mut out = Vec::new();
    for (a, b) in full_pool(N).unwrap() {
        if lab.cd_pair(&a, &b, M).unwrap().value().is_some_and(|v| v <= k) {
            out.push((a, b));
        }
    }
    out
}

fn forward_sweep(lab: &Lab) -> Vec<ForwardReport> {
    let sets: Vec<StringSet> = (0..256u64).map(|m| StringSet::from_mask(N, m)).collect();
    let mut out = Vec::new();
    for a in &sets {
        if !lab.cd_set(a, M).unwrap().is_finite() {
            continue;
        }
        for b in &sets {
            if lab.cd_set_cond(b, a, M).unwrap().is_finite() {
                out.push(soi_forward(lab, a, b, M).unwrap());
            }
        }
    }
    out
}

#[test]
fn forward_inequality_with_one_constant() {
    let lab = lab(16);
    let reports = forward_sweep(&lab);
    assert!(reports.len() >= 20, "only {} pairs", reports.len());
    assert!(reports.iter().all(|r| r.composite_decides));
    let c = reports.iter().map(|r| r.required_c).fold(0.0, f64::max);
    assert!(reports.iter().all(|r| r.holds_with(c)));
    let worst = reports.iter().map(|r| r.slack).max().unwrap();
    println!("forward pairs {} fitted c {c:.4} worst slack {worst}", reports.len());
    // the combinator overhead bounds the slack
    assert!(worst <= 10);
}

fn reverse_checks(lab: &Lab, d: &PairFamily) -> usize {
    let oracle_d = recount_d(lab, d.k);
    assert_eq!(d.members.len(), oracle_d.len());
    assert!((d.members.len() as u64) < 1 << (d.k + 1));
    let mut firsts: BTreeMap<u64, usize> = BTreeMap::new();
    for (a, _) in &oracle_d {
        *firsts.entry(a.mask()).or_default() += 1;
    }
    for t in 0..=d.k {
        let heavy = firsts.values().filter(|&&s| s >= 1 << t).count();
        assert_eq!(d.heavy_first(t).len(), heavy);
        assert!(heavy as u128 <= 1u128 << (d.k - t + 1));
    }
    let mut checked = 0;
    for p in &d.members {
        let r = soi_reverse(d, &p.a, &p.b).unwrap();
        let size = firsts[&p.a.mask()];
        assert!(1 << r.t <= size && size < 1 << (r.t + 1));
        assert!(r.b_given_a.payload_len() <= r.t + 1);
        assert!(r.a.payload_len() <= d.k - r.t + 1);
        assert!(r.heavy_bound_ok);
        let a = p.a;
        let pair = decode_pair_given_first(lab, &r.b_given_a, &|y| a.contains(y)).unwrap();
        assert_eq!(pair, (p.a, p.b));
        assert_eq!(decode_heavy_first(lab, &r.a).unwrap(), p.a);
        checked += 1;
    }
    checked
}

#[test]
fn reverse_descriptions_round_trip() {
    let lab = lab(24);
    let pool = full_pool(N).unwrap();
    let mut total = 0;
    for k in [16, 19, 21, 23, 24] {
        let d = build_pair_family(&lab, &pool, N, M, k).unwrap();
        total += reverse_checks(&lab, &d);
    }
    let d = build_pair_family(&lab, &pool, N, M, 24).unwrap();
    // frozen from the recount oracle
    assert_eq!(d.members.len(), 20);
    assert_eq!(d.first_components().len(), 8);
    assert!(total >= 40);
}

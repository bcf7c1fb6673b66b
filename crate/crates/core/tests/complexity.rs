use proptest::prelude::*;
use spacestat::complexity::{
    counting_table, decode_good_explanation, deficiencies, good_explanation, independent_pair_example,
    verify_concat_bound, ComplexityValue, Lab,
};
use spacestat::machine::{assemble, decides, decides_pair, distinguishes, Caps, Oracle, Program};
use spacestat::{BitString, StringSet};

fn lab() -> Lab {
    Lab::new(Caps::default()).unwrap()
}

/// Shortest decider found by decoding every bit string in length order,
/// independent of the grammar enumerator and the table cache. Invalid
/// encodings are skipped, as in the enumerator.
fn brute_cd(target: &StringSet, m: usize, max_len: usize) -> Option<(usize, BitString)> {
    for len in 0..=max_len {
        for v in 0..1u64 << len {
            let code = BitString::from_u64(v, len);
            let Ok(p) = Program::parse(&code) else {
                continue;
            };
            if decides(&p, target.n(), m, Oracle::None) == Some(*target) {
                return Some((len, code));
            }
        }
    }
    None
}

#[test]
fn regression_values() {
    let lab = lab();
    let x: BitString = "0000".parse().unwrap();
    let v0 = lab.cd_string(&x, 6).unwrap();
    let (len, code) = brute_cd(&StringSet::singleton(4, 0), 6, 14).unwrap();
    assert_eq!(v0.value(), Some(len));
    assert_eq!(v0.witness().unwrap().code(), &code);
    assert_eq!(v0.value(), Some(14));

    let ball = StringSet::from_fn(4, |y| y.count_ones() <= 1);
    assert_eq!(lab.cd_set(&ball, 8).unwrap(), ComplexityValue::AboveCap { cap: 16 });
}

#[test]
fn tables_agree_with_brute_force_for_short_strings() {
    let lab = lab();
    for n in 0..=2 {
        for m in 1..=3 {
            for mask in 0..1u64 << (1 << n) {
                let a = StringSet::from_mask(n, mask);
                let want = brute_cd(&a, m, 12).map(|(l, _)| l);
                let got = lab.cd_set(&a, m).unwrap().value().filter(|&v| v <= 12);
                assert_eq!(got, want, "n={n} m={m} set={a:?}");
            }
        }
    }
}

#[test]
fn counting_invariant_exhaustive() {
    let lab = lab();
    for n in 0..=5 {
        for m in 1..=10 {
            for row in counting_table(&lab, n, m, 12).unwrap() {
                assert!(row.count < row.bound, "n={n} m={m} t={}", row.t);
            }
        }
    }
}

#[test]
fn witnesses_are_valid() {
    let lab = lab();
    for n in 1..=3 {
        for m in [1, 3, 5] {
            let t = lab.table(n, m, None).unwrap();
            for (set, i) in t.entries() {
                assert_eq!(decides(&lab.programs()[i], n, m, Oracle::None), Some(set));
            }
            for (x, v) in lab.all_strings(n, m).unwrap().iter().enumerate() {
                if let Some(w) = v.witness() {
                    assert!(distinguishes(w, &BitString::from_u64(x as u64, n), m, Oracle::None));
                }
            }
        }
    }
}

#[test]
fn monotone_in_space() {
    let lab = lab();
    let sets: Vec<StringSet> = (0..16).map(|mask| StringSet::from_mask(2, mask)).collect();
    for m in 1..6 {
        for a in &sets {
            assert!(lab.cd_set(a, m + 1).unwrap().lower() <= lab.cd_set(a, m).unwrap().lower());
            for b in &sets {
                let c1 = lab.cd_set_cond(b, a, m).unwrap().lower();
                let c2 = lab.cd_set_cond(b, a, m + 1).unwrap().lower();
                assert!(c2 <= c1);
                let p1 = lab.cd_pair(a, b, m).unwrap().lower();
                let p2 = lab.cd_pair(a, b, m + 1).unwrap().lower();
                assert!(p2 <= p1);
            }
        }
    }
    for n in 1..=4 {
        for m in 1..8 {
            let lo = lab.all_strings(n, m).unwrap();
            let hi = lab.all_strings(n, m + 1).unwrap();
            assert!(lo.iter().zip(&hi).all(|(a, b)| b.lower() <= a.lower()));
        }
    }
}

#[test]
fn singleton_and_conditional_relations() {
    let lab = lab();
    let member = assemble("qchk\nacc\nend").unwrap();
    for n in 1..=4 {
        for x in 0..1u64 << n {
            let xb = BitString::from_u64(x, n);
            let single = StringSet::singleton(n, x);
            let m = n + 1;
            assert_eq!(lab.cd_set(&single, m).unwrap(), lab.cd_string(&xb, m).unwrap());
            assert!(lab.cd_cond(&xb, &single, m).unwrap().lower() <= member.len());
            for mask in [0u64, 0b0110, (1 << (1 << n)) - 1] {
                let a = StringSet::from_mask(n, mask & ((1 << (1 << n)) - 1));
                assert!(lab.cd_cond(&xb, &a, m).unwrap().lower() <= lab.cd_string(&xb, m).unwrap().lower());
            }
        }
    }
}

#[test]
fn pair_duplicate_wrapper() {
    let lab = lab();
    let second = assemble("qchk\nacc\nend").unwrap();
    for n in 1..=2 {
        for mask in 0..1u64 << (1 << n) {
            let a = StringSet::from_mask(n, mask);
            let m = 2 * n;
            let Some(w) = lab.cd_set(&a, m).unwrap().witness().cloned() else {
                continue;
            };
            let wrapper = Program::pair(w.clone(), second.clone());
            assert_eq!(decides_pair(&wrapper, n, m, Oracle::None), Some((a, a)));
            let slack = wrapper.len() - w.len();
            assert!(lab.cd_pair(&a, &a, m).unwrap().value().unwrap_or(wrapper.len()) <= w.len() + slack);
        }
    }
}

#[test]
fn randomness_deficiency_counting() {
    let lab = lab();
    for n in 1..=4usize {
        for len in 0..=n {
            for u in 0..1u64 << len {
                let a = StringSet::from_fn(n, |y| y >> (n - len) == u);
                for beta in 0..=4 {
                    let over = a
                        .iter()
                        .filter(|&x| {
                            let r = deficiencies(&lab, &BitString::from_u64(x, n), &a, n, n, 2 * n).unwrap();
                            r.d_range.hi.is_none_or(|h| h > beta as f64)
                        })
                        .count();
                    assert!((over as f64) < 2f64.powf(a.log_size() - beta as f64));
                }
            }
        }
    }
}

#[test]
fn full_space_deficiency_at_most_log_size() {
    let lab = lab();
    for n in 1..=4 {
        for x in 0..1u64 << n {
            let r = deficiencies(&lab, &BitString::from_u64(x, n), &StringSet::full(n), 8, 8, 8).unwrap();
            assert!(r.d.unwrap() <= n as f64);
            let (d, delta) = r.recompute();
            assert_eq!((d, delta), (r.d, r.delta));
        }
    }
}

#[test]
fn good_explanations_up_to_five_bits() {
    let lab = lab();
    let mut c: f64 = f64::MIN;
    for n in 1..=5 {
        for m in [1, 4, 8] {
            for x in 0..1u64 << n {
                let g = good_explanation(&lab, &BitString::from_u64(x, n), m).unwrap();
                assert!(g.set.contains(x));
                assert!((g.set.len() as u64) < 1 << (g.k + 1));
                assert_eq!(decode_good_explanation(&lab, &g.description).unwrap(), g.set);
                c = c.max(g.fitted_constant());
                let scale = ((n + m + g.k + 1) as f64).log2();
                assert!(g.description.total_len() as f64 <= 3.0 * (2.0 * scale + 1.0));
            }
        }
    }
    // worst case n = 5, m = 8, k = 16: gamma lengths 5 + 7 + 9 against log 24
    assert!((c - (21.0 - 24f64.log2())).abs() < 1e-9, "fitted constant {c}");
}

#[test]
fn concat_sweep_single_constant() {
    let lab = lab();
    let mut worst: f64 = 0.0;
    for n in 1..=4usize {
        for x in 0..1u64 << n {
            let xb = BitString::from_u64(x, n);
            let mut models = vec![StringSet::full(n), StringSet::singleton(n, x)];
            models.extend((0..=n).map(|l| StringSet::from_fn(n, |y| y >> (n - l) == x >> (n - l))));
            for a in &models {
                let r = verify_concat_bound(&lab, &xb, a, n + 1).unwrap();
                assert!(r.composite_distinguishes);
                worst = worst.max(r.required_c);
            }
        }
    }
    for n in 1..=4usize {
        for x in 0..1u64 << n {
            let xb = BitString::from_u64(x, n);
            let r = verify_concat_bound(&lab, &xb, &StringSet::full(n), n + 1).unwrap();
            assert!(r.holds_with(worst));
            assert!(r.holds_with(r.construction_c));
        }
    }
}

#[test]
fn complement_of_singleton_gap() {
    let lab = lab();
    let e = independent_pair_example(&lab, 4, 6).unwrap();
    assert!(!e.set.contains(e.y.to_u64()));
    assert!(e.set.contains(e.x.to_u64()));
    assert!(e.gap_lower.unwrap() >= 4.0);
}

proptest! {
    #[test]
    fn deficiency_components_recompute(x in 0u64..16, mask in 1u64..65536, m in 1usize..8) {
        let lab = lab();
        let a = StringSet::from_mask(4, mask | 1 << x);
        let r = deficiencies(&lab, &BitString::from_u64(x, 4), &a, m, m, m).unwrap();
        prop_assert_eq!(r.recompute(), (r.d, r.delta));
        prop_assert_eq!(r.evaluable, r.d.is_some() && r.delta.is_some());
    }
}

#[test]
fn disk_cache_reproduces_tables() {
    let dir = tempfile::tempdir().unwrap();
    let caps = Caps::default();
    let fresh = Lab::new(caps).unwrap();
    let writer = Lab::new(caps).unwrap().with_cache_dir(dir.path());
    let reader = Lab::new(caps).unwrap().with_cache_dir(dir.path());
    let a = StringSet::from_mask(3, 0b1111_0000);
    let (x, y) = (StringSet::from_mask(1, 0b01), StringSet::from_mask(1, 0b10));
    for lab in [&writer, &reader] {
        assert_eq!(lab.cd_set(&a, 4).unwrap(), fresh.cd_set(&a, 4).unwrap());
        assert_eq!(lab.cd_pair(&x, &y, 4).unwrap(), fresh.cd_pair(&x, &y, 4).unwrap());
        assert_eq!(lab.table(3, 4, None).unwrap().entries(), fresh.table(3, 4, None).unwrap().entries());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

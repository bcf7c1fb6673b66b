//! One PASS/FAIL line per acceptance criterion, with tolerances pinned below.

use std::path::Path;
use std::process::Command;

use spacestat::complexity::{counting_table, decode_good_explanation, good_explanation, verify_concat_bound, Lab};
use spacestat::dist2set::{
    decode_sampler_set, distribution_to_set, distribution_to_set_estimated, exact_distribution, random_sampler,
};
use spacestat::families::{build_slice, builtin_families, ComplexityMode, Family};
use spacestat::machine::Caps;
use spacestat::nwgen::{
    bruteforce_search, certify_member, choose_subfamily, decode_member, derandomized_search, SearchContext,
    SearchSpec, Strategy,
};
use spacestat::subfamily::{build_prop2_circuit, estimate_success, coverage_tail, Instance};
use spacestat::symmetry::{
    build_pair_family, decode_heavy_first, decode_pair_given_first, full_pool, soi_forward, soi_reverse,
};
use spacestat::{BitString, StringSet};

/// Additive constant in the certificate payload bound.
const PAYLOAD_SLACK: f64 = 2.0;
/// Smallest agreement between estimated and exact sampler sets.
const MIN_AGREEMENT: f64 = 0.95;
/// Standard deviations allowed below the success-probability bounds.
const SIGMAS: f64 = 3.0;

fn lab(len: usize) -> Lab {
    Lab::new(Caps {
        program_len: len,
        ..Caps::default()
    })
    .unwrap()
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn counting_invariant() -> Outcome {
    let lab = lab(16);
    let mut rows = 0;
    let mut bad = Vec::new();
    for n in 0..=5 {
        for m in 1..=10 {
            for r in counting_table(&lab, n, m, 12).unwrap() {
                rows += 1;
                if r.count >= r.bound {
                    bad.push((n, m, r.t));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{rows} (n, m, t) rows, violations {bad:?}"))
}

fn good_explanations() -> Outcome {
    let lab = lab(16);
    let mut checked = 0;
    let mut ok = true;
    for n in 1..=5 {
        for m in 1..=10 {
            for x in 0..1u64 << n {
                let g = good_explanation(&lab, &BitString::from_u64(x, n), m).unwrap();
                ok &= g.set.contains(x)
                    && (g.set.len() as u64) < 1 << (g.k + 1)
                    && decode_good_explanation(&lab, &g.description).unwrap() == g.set
                    && g.description.params.len() == 3;
                checked += 1;
            }
        }
    }
    outcome(ok, format!("{checked} strings, m = 1..10"))
}

fn concatenation_bound() -> Outcome {
    let lab = lab(16);
    let mut reports = Vec::new();
    for n in 1..=4usize {
        let m = n + 1;
        for family in [Family::FullSpace, Family::Cylinders] {
            for (_, a) in family.sets(n).unwrap() {
                for x in a.iter() {
                    reports.push(verify_concat_bound(&lab, &BitString::from_u64(x, n), &a, m).unwrap());
                }
            }
        }
    }
    let c = reports.iter().map(|r| r.required_c).fold(0.0, f64::max);
    let ok = reports.iter().all(|r| r.composite_distinguishes && r.holds_with(c));
    outcome(ok, format!("fitted c = {c:.4} over {} pairs (x, A)", reports.len()))
}

fn subfamily_frequencies() -> Outcome {
    let lab = lab(16);
    let slice = build_slice(&lab, Family::HammingBalls, 4, 4, 7, 4, ComplexityMode::Declared).unwrap();
    let inst = Instance::new(&slice, 3).unwrap();
    let q = (4.0 + 2.0) * std::f64::consts::LN_2 / 8.0;
    let e = estimate_success(&inst, 1000, 7).unwrap();
    let half = e.freq_1_and_2 >= 0.5 - SIGMAS * e.sigma_half;
    let third = e.freq_1star_and_2 >= 1.0 / 3.0 - SIGMAS * e.sigma_third;
    outcome(
        inst.meets_preconditions() && (inst.q() - q).abs() < 1e-12 && half && third,
        format!(
            "|slice| = {}, q = {:.4}, freq (1)(2) = {}, freq (1*)(2) = {}",
            inst.len(),
            inst.q(),
            e.freq_1_and_2,
            e.freq_1star_and_2
        ),
    )
}

fn tail_chain() -> Outcome {
    let mut ok = true;
    let mut cases = 0;
    for k in 2..=8u32 {
        for n in 2..=8u64 {
            let t = coverage_tail(k, n).unwrap();
            ok &= t.wp_below_10n && t.chain.chain.iter().all(|&c| c) && t.final_below;
            cases += 1;
        }
    }
    outcome(ok, format!("{cases} (k, n) pairs"))
}

/// Property (2) straight from the definition.
fn direct_prop2(sets: &[StringSet], n: usize, k: usize, mask: &[bool]) -> bool {
    (0..1u64 << n).all(|y| {
        let holders = sets.iter().filter(|s| s.contains(y)).count();
        holders < 1 << k || sets.iter().zip(mask).any(|(s, &on)| on && s.contains(y))
    })
}

fn circuit_equivalence() -> Outcome {
    let lab = lab(16);
    let (mut slices, mut masks) = (0, 0u64);
    let mut ok = true;
    for f in builtin_families() {
        for n in 1..=4 {
            for j in 0..=n {
                for i in 0..=7 {
                    let s = build_slice(&lab, f, n, 4, i, j, ComplexityMode::Declared).unwrap();
                    if s.is_empty() || s.len() > 12 {
                        continue;
                    }
                    slices += 1;
                    let sets = s.sets();
                    for k in 0..=3 {
                        let c = build_prop2_circuit(&s, k).unwrap();
                        for bits in 0..1u32 << s.len() {
                            let mask: Vec<bool> = (0..s.len()).map(|t| bits >> t & 1 == 1).collect();
                            ok &= c.eval(&mask) == direct_prop2(&sets, n, k, &mask);
                            masks += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(ok && slices >= 20, format!("{slices} slices, {masks} masks"))
}

fn nw_pipeline() -> Outcome {
    let lab = lab(8);
    let ctx = SearchContext::default();
    let mut ok = true;
    let mut lines = Vec::new();
    let micro = [
        (Family::HammingBalls, 3, 4, 3, 3),
        (Family::HammingBalls, 4, 4, 4, 3),
        (Family::HammingBalls, 2, 5, 2, 3),
        (Family::Cylinders, 3, 4, 3, 1),
        (Family::FullSpace, 3, 4, 3, 0),
    ];
    for (f, n, i, j, k) in micro {
        let slice = build_slice(&lab, f, n, 4, i, j, ComplexityMode::Declared).unwrap();
        let inst = Instance::new(&slice, k).unwrap();
        let r = derandomized_search(&inst, &SearchSpec::default_for(&inst).unwrap()).unwrap();
        ok &= r.verdict.prop1_star && r.verdict.prop2;
        let nw = choose_subfamily(&inst, Strategy::Nw, &ctx).unwrap();
        let bf = choose_subfamily(&inst, Strategy::Bruteforce, &ctx).unwrap();
        ok &= nw.mask == r.mask && bruteforce_search(&inst).unwrap().0 == bf.mask;
        let first = |mask: &[bool]| slice.members[mask.iter().position(|&b| b).unwrap()];
        let cert = certify_member(&slice, &inst, &nw, first(&nw.mask), &ctx).unwrap();
        let (back, set) = decode_member(&lab, &cert, &ctx).unwrap();
        ok &= back == first(&nw.mask) && set == f.set(n, back).unwrap();
        let bound = (i as f64 - k as f64) + 2.0 * ((n + k) as f64).log2() + PAYLOAD_SLACK;
        ok &= cert.payload_len() as f64 <= bound;
        let oracle = certify_member(&slice, &inst, &bf, first(&bf.mask), &ctx).unwrap();
        ok &= cert.total_len() == oracle.total_len();
        lines.push(format!("{f} n={n}: {} <= {bound:.2}", cert.payload_len()));
    }
    outcome(ok, lines.join("; "))
}

fn samplers() -> Outcome {
    let (mut samplers, mut runs, mut agree) = (0, 0, 0);
    let mut ok = true;
    for seed in 0..40u64 {
        let n = 2 + (seed % 4) as usize;
        let s = random_sampler(n, 10, seed).unwrap();
        ok &= s.tape_len <= 10;
        let d = exact_distribution(&s).unwrap();
        samplers += 1;
        for x in d.support() {
            let xb = BitString::from_u64(x, n);
            let r = distribution_to_set(&xb, Some(&s)).unwrap();
            let p = d.probability(x);
            ok &= r.set.contains(x)
                && (r.set.len() as u64) <= 1 << (r.k + 2)
                && p >= 2f64.powi(-(r.k as i32))
                && p <= 2f64.powi(1 - r.k as i32)
                && decode_sampler_set(&r.certificate).unwrap() == r.set;
            let e = distribution_to_set_estimated(&xb, &s, seed * 1000 + x).unwrap();
            runs += 1;
            agree += (e.set == r.set) as usize;
        }
    }
    let rate = agree as f64 / runs as f64;
    outcome(
        ok && samplers >= 20 && rate >= MIN_AGREEMENT,
        format!("{samplers} samplers, agreement {agree}/{runs} = {rate:.4}"),
    )
}

fn symmetry() -> Outcome {
    let small = lab(16);
    let (n, m) = (3, 4);
    let sets: Vec<StringSet> = (0..256u64).map(|v| StringSet::from_mask(n, v)).collect();
    let mut forward = Vec::new();
    for a in &sets {
        if !small.cd_set(a, m).unwrap().is_finite() {
            continue;
        }
        for b in &sets {
            if small.cd_set_cond(b, a, m).unwrap().is_finite() {
                forward.push(soi_forward(&small, a, b, m).unwrap());
            }
        }
    }
    let c = forward.iter().map(|r| r.required_c).fold(0.0, f64::max);
    let mut ok = forward.iter().all(|r| r.composite_decides && r.holds_with(c));
    let big = lab(24);
    let pool = full_pool(n).unwrap();
    let mut pairs = 0;
    for k in [16, 19, 21, 23, 24] {
        let d = build_pair_family(&big, &pool, n, m, k).unwrap();
        for t in 0..=k {
            let firsts = d.first_components();
            let heavy = firsts.iter().filter(|(_, s)| *s >= 1 << t).count();
            ok &= heavy == d.heavy_first(t).len() && heavy as u128 <= 1u128 << (k - t + 1);
        }
        for p in &d.members {
            let r = soi_reverse(&d, &p.a, &p.b).unwrap();
            let a = p.a;
            ok &= r.b_given_a.payload_len() <= r.t + 1 && r.a.payload_len() <= k - r.t + 1;
            ok &= decode_pair_given_first(&big, &r.b_given_a, &|y| a.contains(y)).unwrap() == (p.a, p.b);
            ok &= decode_heavy_first(&big, &r.a).unwrap() == p.a;
            pairs += 1;
        }
    }
    outcome(
        ok && pairs > 0,
        format!("fitted c = {c:.4} over {} forward pairs; {pairs} reverse pairs", forward.len()),
    )
}

/// The report minus its timing line.
fn body(path: &Path) -> Vec<u8> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with("  \"timing\":"))
        .collect::<Vec<_>>()
        .join("\n")
        .into_bytes()
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let commands: [&[&str]; 10] = [
        &["cd", "--n", "4", "--m", "6"],
        &["deficiency", "--n", "4", "--m", "8", "--family", "full"],
        &["good-model", "--n", "4"],
        &["improve", "--n", "3", "--strategy", "mc"],
        &["lemma-prob", "--k", "3", "--n", "4", "--trials", "1000", "--seed", "7"],
        &["nw-search"],
        &["dist2set", "--samplers", "12", "--seed", "3"],
        &["soi", "--k", "21,24"],
        &["hypothesis-scan", "--family", "cylinder", "--n", "3"],
        &["example-sec2"],
    ];
    let mut failed = Vec::new();
    for args in commands {
        let out = dir.path().join(format!("{}.json", args[0]));
        let mut bodies = Vec::new();
        for (workers, cached) in [("1", false), ("3", true)] {
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_spacestat"));
            cmd.args(args).args(["--out", out.to_str().unwrap(), "--workers", workers]);
            if cached {
                cmd.env("SPACESTAT_CACHE_DIR", &cache);
            } else {
                cmd.env_remove("SPACESTAT_CACHE_DIR");
            }
            let status = cmd.status().unwrap();
            if status.code() != Some(0) {
                failed.push(format!("{} exited {status}", args[0]));
            }
            bodies.push(body(&out));
        }
        if bodies[0] != bodies[1] {
            failed.push(format!("{} bodies differ", args[0]));
        }
    }
    outcome(failed.is_empty(), format!("10 commands rerun; problems {failed:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("counting invariant", counting_invariant),
        ("good explanation", good_explanations),
        ("concatenation bound", concatenation_bound),
        ("random subfamily success", subfamily_frequencies),
        ("tail chain", tail_chain),
        ("circuit equivalence", circuit_equivalence),
        ("seed search pipeline", nw_pipeline),
        ("sampler to set", samplers),
        ("symmetry of information", symmetry),
        ("reproducibility", reproducibility),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        all &= o.pass;
        println!(
            "criterion {:>2} {name}: {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}

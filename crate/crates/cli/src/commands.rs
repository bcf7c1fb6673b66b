use serde::Serialize;
use spacestat::complexity::{
    counting_table, decode_good_explanation, deficiencies, good_explanation, independent_pair_example,
    verify_concat_bound, ComplexityValue, Lab,
};
use spacestat::dist2set::{
    decode_sampler_set, distribution_to_set, distribution_to_set_estimated, exact_distribution, random_sampler, Sampler,
};
use spacestat::families::build_slice;
use spacestat::machine::{check_input_len, check_space, Caps};
use spacestat::model_search::{decode_conditional_index, hypothesis_scan, improve_model, Model};
use spacestat::nwgen::{
    certify_member, choose_subfamily, decode_member, seed_quality, SearchContext, SearchSpec, Strategy,
};
use spacestat::subfamily::tail::miss_bound_holds;
use spacestat::subfamily::{build_prop2_circuit, estimate_success, coverage_tail, Instance};
use spacestat::symmetry::{
    build_pair_family, decode_heavy_first, decode_pair_given_first, full_pool, soi_forward, soi_reverse,
};
use spacestat::{BitString, StringSet};

use crate::config::*;
use crate::report::Report;
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, rep: &mut Report) -> Result<(), CliError> {
    let lab = make_lab(cfg.common.program_len)?;
    let (n, m) = match &cfg.command {
        Command::Cd(a) => (a.n, a.m),
        Command::Deficiency(a) => (a.n, a.p.unwrap_or(a.m).max(a.m)),
        Command::GoodModel(a) => (a.n, a.m),
        Command::Improve(a) => (a.n, a.m),
        Command::LemmaProb(a) => (a.n, a.m),
        Command::NwSearch(a) => (a.n, a.m),
        Command::Dist2set(a) => (a.n_max, 1),
        Command::Soi(a) => (2 * a.n, a.m),
        Command::HypothesisScan(a) => (a.n, a.p.unwrap_or(a.m).max(a.m)),
        Command::ExampleSec2(a) => (a.n, a.m),
    };
    check_input_len(n, lab.caps())?;
    check_space(m, lab.caps())?;
    match &cfg.command {
        Command::Cd(a) => cd(&lab, a, rep),
        Command::Deficiency(a) => deficiency(&lab, a, rep),
        Command::GoodModel(a) => good_model(&lab, a, rep),
        Command::Improve(a) => improve(&lab, a, cfg.common.seed, rep),
        Command::LemmaProb(a) => lemma_prob(&lab, a, cfg.common.seed, rep),
        Command::NwSearch(a) => nw_search(&lab, a, cfg.common.seed, rep),
        Command::Dist2set(a) => dist2set(a, cfg.common.seed, rep),
        Command::Soi(a) => soi(&lab, a, rep),
        Command::HypothesisScan(a) => scan(&lab, a, rep),
        Command::ExampleSec2(a) => example(&lab, a, rep),
    }
}

fn make_lab(program_len: usize) -> Result<Lab, CliError> {
    let lab = Lab::new(Caps {
        program_len,
        ..Caps::default()
    })?;
    Ok(match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => lab.with_cache_dir(dir),
        _ => lab,
    })
}

fn parse_string(s: &str, n: usize) -> Result<BitString, CliError> {
    let x: BitString = s.parse().map_err(CliError::Usage)?;
    if x.len() != n {
        return Err(CliError::Usage(format!("{s} does not have {n} bits")));
    }
    Ok(x)
}

fn parse_mask(mask: u64, n: usize) -> Result<StringSet, CliError> {
    if n > 6 || (n < 6 && mask >> (1u32 << n) != 0) {
        return Err(CliError::Usage(format!("mask {mask:#x} does not describe a subset of {{0,1}}^{n}")));
    }
    Ok(StringSet::from_mask(n, mask))
}

fn strings(n: usize, x: &Option<String>) -> Result<Vec<BitString>, CliError> {
    match x {
        Some(s) => Ok(vec![parse_string(s, n)?]),
        None => Ok((0..1u64 << n).map(|y| BitString::from_u64(y, n)).collect()),
    }
}

fn opt(v: &ComplexityValue) -> Option<usize> {
    v.value()
}

fn witness(v: &ComplexityValue) -> String {
    v.witness().map(|w| w.to_hex()).unwrap_or_default()
}

fn counting(lab: &Lab, n: usize, m: usize, rep: &mut Report) -> Result<(), CliError> {
    let rows = counting_table(lab, n, m, lab.cap())?;
    let bad: Vec<usize> = rows.iter().filter(|r| r.count >= r.bound).map(|r| r.t).collect();
    rep.check(
        "counting invariant",
        bad.is_empty(),
        format!("#{{x : CD^{m}(x) < t}} < 2^t for t <= {}; violated at {bad:?}", lab.cap()),
    );
    rep.table("counting", &rows)
}

#[derive(Serialize)]
struct CdRow {
    x: String,
    cd: Option<usize>,
    witness: String,
}

fn cd(lab: &Lab, a: &CdArgs, rep: &mut Report) -> Result<(), CliError> {
    let given = a.given.map(|g| parse_mask(g, a.n)).transpose()?;
    let target = match (&a.x, a.set) {
        (Some(s), _) => Some(StringSet::singleton(a.n, parse_string(s, a.n)?.to_u64())),
        (None, Some(mask)) => Some(parse_mask(mask, a.n)?),
        (None, None) => None,
    };
    let query = |t: &StringSet| match &given {
        Some(g) => lab.cd_set_cond(t, g, a.m),
        None => lab.cd_set(t, a.m),
    };
    if let Some(t) = target {
        let v = query(&t)?;
        rep.result("value", &v)?;
        rep.result("cap", lab.cap())?;
        return Ok(());
    }
    let mut rows = Vec::new();
    for y in 0..1u64 << a.n {
        let v = query(&StringSet::singleton(a.n, y))?;
        rows.push(CdRow {
            x: BitString::from_u64(y, a.n).to_string(),
            cd: opt(&v),
            witness: witness(&v),
        });
    }
    rep.result("cap", lab.cap())?;
    rep.table("strings", &rows)?;
    if given.is_none() {
        counting(lab, a.n, a.m, rep)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DeficiencyRow {
    x: String,
    model: u64,
    log_size: f64,
    cd_cond: Option<usize>,
    cd_set: Option<usize>,
    cd_string: Option<usize>,
    d: Option<f64>,
    delta: Option<f64>,
    proviso: bool,
    concat_p: Option<usize>,
    concat_upper: Option<usize>,
    concat_slack: Option<i64>,
    concat_required_c: Option<f64>,
    concat_construction_c: Option<f64>,
}

fn deficiency(lab: &Lab, a: &DeficiencyArgs, rep: &mut Report) -> Result<(), CliError> {
    counting(lab, a.n, a.m, rep)?;
    let p = a.p.unwrap_or(a.m);
    let mut rows = Vec::new();
    let mut recomputes = true;
    let mut composites = true;
    let mut concat = Vec::new();
    for (idx, set) in a.family.sets(a.n)? {
        for y in set.iter() {
            let x = BitString::from_u64(y, a.n);
            let r = deficiencies(lab, &x, &set, a.m, a.m, p)?;
            recomputes &= r.recompute() == (r.d, r.delta);
            let c = match verify_concat_bound(lab, &x, &set, a.m) {
                Ok(c) => Some(c),
                Err(spacestat::Error::NonEvaluable(_)) => None,
                Err(e) => return Err(e.into()),
            };
            if let Some(c) = &c {
                composites &= c.composite_distinguishes;
                concat.push(c.clone());
            }
            rows.push(DeficiencyRow {
                x: x.to_string(),
                model: idx,
                log_size: r.log_size,
                cd_cond: opt(&r.cd_cond),
                cd_set: opt(&r.cd_set),
                cd_string: opt(&r.cd_string),
                d: r.d,
                delta: r.delta,
                proviso: r.proviso,
                concat_p: c.as_ref().map(|c| c.p),
                concat_upper: c.as_ref().map(|c| c.cd_p_upper),
                concat_slack: c.as_ref().map(|c| c.slack),
                concat_required_c: c.as_ref().map(|c| c.required_c),
                concat_construction_c: c.as_ref().map(|c| c.construction_c),
            });
        }
    }
    let fitted = concat.iter().map(|c| c.required_c).fold(0.0, f64::max);
    rep.check("deficiency arithmetic", recomputes, "d and delta recompute from their components");
    rep.check("composite distinguishes", composites, "Compose(set, conditional) distinguishes x");
    rep.check(
        "concatenation bound",
        concat.iter().all(|c| c.holds_with(fitted)),
        format!("fitted c = {fitted:.6} over {} evaluable pairs", concat.len()),
    );
    rep.result("fitted_c", fitted)?;
    rep.result("evaluable_pairs", concat.len())?;
    rep.result("pairs", rows.len())?;
    rep.table("deficiencies", &rows)
}

#[derive(Serialize)]
struct GoodModelRow {
    x: String,
    k: usize,
    set_size: usize,
    set_mask: String,
    payload_len: usize,
    total_len: usize,
    decoded: bool,
}

fn good_model(lab: &Lab, a: &GoodModelArgs, rep: &mut Report) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let (mut member, mut small, mut decodes) = (true, true, true);
    for x in strings(a.n, &a.x)? {
        let g = good_explanation(lab, &x, a.m)?;
        let back = decode_good_explanation(lab, &g.description)?;
        member &= g.set.contains(x.to_u64());
        small &= (g.set.len() as u128) < 1u128 << (g.k + 1);
        decodes &= back == g.set;
        rows.push(GoodModelRow {
            x: x.to_string(),
            k: g.k,
            set_size: g.set.len(),
            set_mask: format!("{:#x}", g.set.mask()),
            payload_len: g.description.payload_len(),
            total_len: g.description.total_len(),
            decoded: back == g.set,
        });
    }
    rep.check("x in A", member, "");
    rep.check("|A| < 2^(k+1)", small, "");
    rep.check("decoder reconstructs A", decodes, "from (n, m, k)");
    rep.table("explanations", &rows)
}

#[derive(Serialize)]
struct ImproveRow {
    x: String,
    a: u64,
    status: String,
    b: Option<u64>,
    i: Option<usize>,
    j: Option<usize>,
    k: Option<usize>,
    slice_size: Option<usize>,
    a_prime_size: Option<usize>,
    a_given_x_len: Option<usize>,
    payload_len: Option<usize>,
    excess: Option<f64>,
    log_allowance: Option<f64>,
    size_ok: Option<bool>,
    decoded: Option<bool>,
}

fn improve(lab: &Lab, a: &ImproveArgs, seed: u64, rep: &mut Report) -> Result<(), CliError> {
    let ctx = SearchContext {
        mc_seed: seed,
        mc_trials: a.mc_trials,
        ..SearchContext::default()
    };
    let models: Vec<u64> = match a.model {
        Some(i) if i < a.family.index_count(a.n) => vec![i],
        Some(i) => return Err(CliError::Usage(format!("model index {i} is out of range"))),
        None => (0..a.family.index_count(a.n)).collect(),
    };
    let xs = strings(a.n, &a.x)?;
    let mut rows = Vec::new();
    for x in &xs {
        for &idx in &models {
            let model = Model::new(a.family, a.n, idx);
            if !model.set()?.contains(x.to_u64()) {
                continue;
            }
            let mut row = ImproveRow {
                x: x.to_string(),
                a: idx,
                status: String::new(),
                b: None,
                i: None,
                j: None,
                k: None,
                slice_size: None,
                a_prime_size: None,
                a_given_x_len: None,
                payload_len: None,
                excess: None,
                log_allowance: None,
                size_ok: None,
                decoded: None,
            };
            match improve_model(lab, model, x, a.m, a.mode, a.strategy, &ctx) {
                Ok(imp) => {
                    let (back, set) = decode_member(lab, &imp.certificate, &ctx)?;
                    let a_back = decode_conditional_index(lab, &imp.a_given_x, x)?;
                    row.status = "found".into();
                    row.b = Some(imp.b.index);
                    row.i = Some(imp.i);
                    row.j = Some(imp.j);
                    row.k = Some(imp.k);
                    row.slice_size = Some(imp.slice_size);
                    row.a_prime_size = Some(imp.a_prime_size);
                    row.a_given_x_len = Some(imp.a_given_x.payload_len());
                    row.payload_len = Some(imp.certificate.payload_len());
                    row.excess = Some(imp.excess);
                    row.log_allowance = Some(imp.log_allowance);
                    row.size_ok = Some(imp.size_ok && imp.b_set.contains(x.to_u64()));
                    row.decoded = Some(back == imp.b.index && set == imp.b_set && a_back == model);
                }
                Err(spacestat::Error::Cap { .. }) => row.status = "above_cap".into(),
                Err(spacestat::Error::NotFound(e)) => row.status = format!("not_found: {e}"),
                Err(e) => return Err(e.into()),
            }
            rows.push(row);
        }
    }
    let found = rows.iter().filter(|r| r.status == "found").count();
    let failed = rows.iter().filter(|r| r.status.starts_with("not_found")).count();
    rep.check("improved model found", failed == 0, format!("{found} found, {failed} without a qualifying B"));
    rep.check(
        "B contains x and is not larger",
        rows.iter().all(|r| r.size_ok != Some(false)),
        "floor(log|B|) <= floor(log|A|) + 1",
    );
    rep.check("certificates decode", rows.iter().all(|r| r.decoded != Some(false)), "B from its ordinal, A from x");
    let worst = rows
        .iter()
        .filter_map(|r| r.excess.zip(r.log_allowance).map(|(e, l)| e - l))
        .fold(f64::NEG_INFINITY, f64::max);
    rep.result("found", found)?;
    rep.result("worst_excess_over_allowance", worst.is_finite().then_some(worst))?;
    rep.table("improvements", &rows)
}

fn lemma_prob(lab: &Lab, a: &LemmaProbArgs, seed: u64, rep: &mut Report) -> Result<(), CliError> {
    let j = a.j.unwrap_or(a.n);
    let slice = build_slice(lab, a.family, a.n, a.m, a.i, j, a.mode)?;
    let inst = Instance::new(&slice, a.k)?;
    rep.check(
        "preconditions",
        inst.meets_preconditions(),
        format!("|slice| = {} <= 2^i = {}", inst.len(), 1u128 << a.i),
    );
    let e = estimate_success(&inst, a.trials, seed)?;
    rep.check(
        "(1) and (2)",
        e.meets_half,
        format!("frequency {} >= 1/2 - 3 sigma = {}", e.freq_1_and_2, 0.5 - 3.0 * e.sigma_half),
    );
    rep.check(
        "(1*) and (2)",
        e.meets_third,
        format!(
            "frequency {} >= 1/3 - 3 sigma = {}",
            e.freq_1star_and_2,
            1.0 / 3.0 - 3.0 * e.sigma_third
        ),
    );
    rep.check("(1*) implies (1)", e.star_without_1 == 0, "");
    let t = coverage_tail(a.k as u32, a.n as u64)?;
    rep.check("tail chain", t.chain.chain.iter().all(|&c| c), "exact rational comparisons");
    rep.check("tail below 2^(-2n)", t.final_below, "");
    rep.check(
        "uncovered heavy string",
        miss_bound_holds(a.k as u32, a.n as u64),
        "(1 - q)^(2^k) <= 2^(-n-2)",
    );
    rep.result("estimate", &e)?;
    rep.result("tail", &t)?;
    rep.result("slice", &slice.members)
}

#[derive(Serialize)]
struct StrategyRow {
    strategy: Strategy,
    chosen: usize,
    seed: Option<String>,
    trial: Option<u64>,
    first_member: u64,
    payload_len: usize,
    total_len: usize,
    payload_bound: f64,
    decoded: bool,
}

fn nw_search(lab: &Lab, a: &NwSearchArgs, seed: u64, rep: &mut Report) -> Result<(), CliError> {
    let ctx = SearchContext {
        mc_seed: seed,
        mc_trials: a.mc_trials,
        ..SearchContext::default()
    };
    let slice = build_slice(lab, a.family, a.n, a.m, a.i, a.j, a.mode)?;
    if slice.is_empty() {
        return Err(CliError::Core(spacestat::Error::NotFound("the slice is empty".into())));
    }
    let inst = Instance::new(&slice, a.k)?;
    let bound = (a.i as f64 - a.k as f64) + 2.0 * ((a.n + a.k) as f64).log2() + 2.0;
    let mut rows = Vec::new();
    for strategy in [Strategy::Nw, Strategy::Bruteforce, Strategy::Mc] {
        let chosen = match choose_subfamily(&inst, strategy, &ctx) {
            Err(spacestat::Error::Cap { .. }) if strategy == Strategy::Bruteforce => continue,
            r => r?,
        };
        rep.check(
            &format!("{strategy} subfamily passes (1*) and (2)"),
            chosen.verdict.prop1_star && chosen.verdict.prop2,
            "",
        );
        let pos = chosen.mask.iter().position(|&b| b).expect("good subfamilies are nonempty");
        let first = slice.members[pos];
        let cert = certify_member(&slice, &inst, &chosen, first, &ctx)?;
        let (back, set) = decode_member(lab, &cert, &ctx)?;
        rows.push(StrategyRow {
            strategy,
            chosen: chosen.mask.iter().filter(|&&b| b).count(),
            seed: chosen.seed.as_ref().map(|s| s.to_string()),
            trial: chosen.trial,
            first_member: first,
            payload_len: cert.payload_len(),
            total_len: cert.total_len(),
            payload_bound: bound,
            decoded: back == first && set == a.family.set(a.n, first)?,
        });
    }
    rep.check("certificates decode", rows.iter().all(|r| r.decoded), "");
    rep.check(
        "payload bound",
        rows.iter().all(|r| r.payload_len as f64 <= r.payload_bound),
        format!("payload <= (i - k) + 2 log(n + k) + 2 = {bound:.4}"),
    );
    let len_of = |s: Strategy| rows.iter().find(|r| r.strategy == s).map(|r| r.total_len);
    if let (Some(nw), Some(bf)) = (len_of(Strategy::Nw), len_of(Strategy::Bruteforce)) {
        rep.check("certificate length matches brute force", nw == bf, format!("nw {nw}, brute force {bf}"));
    }
    let spec = SearchSpec::default_for(&inst)?;
    let q = seed_quality(&inst, &spec)?;
    rep.check(
        "seeds fool the check",
        q.difference < a.epsilon,
        format!("|good seeds - good masks| = {} < {}", q.difference, a.epsilon),
    );
    if slice.len() <= 12 {
        let circuit = build_prop2_circuit(&slice, a.k)?;
        let l = slice.len();
        let agree = (0..1u32 << l).all(|bits| {
            let mask: Vec<bool> = (0..l).map(|t| bits >> t & 1 == 1).collect();
            circuit.eval(&mask) == inst.check(&mask).prop2
        });
        rep.check("circuit equivalence", agree, format!("all {} masks", 1u64 << l));
        rep.result("circuit", circuit.to_string())?;
    }
    rep.result("slice", &slice.members)?;
    rep.result("design", spec.design.to_string())?;
    rep.result("predicate", spec.predicate.table_string())?;
    rep.result("seed_quality", &q)?;
    rep.table("strategies", &rows)
}

#[derive(Serialize)]
struct SamplerRow {
    sampler: u64,
    n: usize,
    r: usize,
    x: String,
    count: u64,
    p_x: f64,
    k: usize,
    path: String,
    set_size: usize,
    set_mask: String,
    payload_len: usize,
    guarantees: bool,
    decoded: bool,
    estimate_agrees: bool,
}

fn dist2set(a: &Dist2SetArgs, seed: u64, rep: &mut Report) -> Result<(), CliError> {
    if a.n_min == 0 || a.n_min > a.n_max {
        return Err(CliError::Usage("need 1 <= n-min <= n-max".into()));
    }
    let samplers: Vec<(u64, Sampler)> = match &a.sampler {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            vec![(0, Sampler::parse(&text)?)]
        }
        None => (0..a.samplers)
            .map(|t| {
                let n = a.n_min + (t % (a.n_max - a.n_min + 1) as u64) as usize;
                Ok((t, random_sampler(n, a.max_tape, seed.wrapping_add(t))?))
            })
            .collect::<Result<_, CliError>>()?,
    };
    let mut rows = Vec::new();
    for (t, s) in &samplers {
        let d = exact_distribution(s)?;
        let xs = match &a.x {
            Some(x) => vec![parse_string(x, s.n)?.to_u64()],
            None => d.support(),
        };
        for x in xs {
            let xb = BitString::from_u64(x, s.n);
            let r = distribution_to_set(&xb, Some(s))?;
            let e = distribution_to_set_estimated(&xb, s, seed.wrapping_add(*t).wrapping_mul(1000).wrapping_add(x))?;
            rows.push(SamplerRow {
                sampler: *t,
                n: s.n,
                r: s.tape_len,
                x: xb.to_string(),
                count: r.count,
                p_x: r.p_x,
                k: r.k,
                path: format!("{:?}", r.path).to_lowercase(),
                set_size: r.set.len(),
                set_mask: format!("{:#x}", r.set.mask()),
                payload_len: r.certificate.payload_len(),
                guarantees: r.set.contains(x) && r.size_ok && r.bracket_ok,
                decoded: decode_sampler_set(&r.certificate)? == r.set,
                estimate_agrees: e.set == r.set,
            });
        }
    }
    let agree = rows.iter().filter(|r| r.estimate_agrees).count();
    let rate = if rows.is_empty() { 1.0 } else { agree as f64 / rows.len() as f64 };
    rep.check(
        "x in A, |A| <= 2^(k+2), 2^(-k+1) > P(x) >= 2^(-k)",
        rows.iter().all(|r| r.guarantees),
        format!("{} outputs of {} samplers", rows.len(), samplers.len()),
    );
    rep.check("certificates decode", rows.iter().all(|r| r.decoded), "");
    rep.check(
        "estimated path agrees",
        rate >= a.min_agreement,
        format!("{agree}/{} = {rate:.4} >= {}", rows.len(), a.min_agreement),
    );
    rep.result("samplers", samplers.iter().map(|(_, s)| s.to_string()).collect::<Vec<_>>())?;
    rep.result("agreement", rate)?;
    rep.table("outputs", &rows)
}

#[derive(Serialize)]
struct ForwardRow {
    a: String,
    b: String,
    cd_a: Option<usize>,
    cd_b_given_a: Option<usize>,
    composite_len: usize,
    p: usize,
    cd_pair_upper: usize,
    slack: i64,
    log_term: f64,
    required_c: f64,
}

#[derive(Serialize)]
struct ReverseRow {
    k: usize,
    a: String,
    b: String,
    cd: usize,
    t: usize,
    slice_size: usize,
    b_given_a_len: usize,
    a_len: usize,
    heavy_first: usize,
    decoded: bool,
}

fn soi(lab: &Lab, a: &SoiArgs, rep: &mut Report) -> Result<(), CliError> {
    let sets: Vec<StringSet> = (0..1u64 << (1 << a.n)).map(|m| StringSet::from_mask(a.n, m)).collect();
    let mut forward = Vec::new();
    for x in &sets {
        if !lab.cd_set(x, a.m)?.is_finite() {
            continue;
        }
        for y in &sets {
            if lab.cd_set_cond(y, x, a.m)?.is_finite() {
                forward.push(soi_forward(lab, x, y, a.m)?);
            }
        }
    }
    let fitted = forward.iter().map(|r| r.required_c).fold(0.0, f64::max);
    rep.check("pair programs decide (A, B)", forward.iter().all(|r| r.composite_decides), "");
    rep.check(
        "forward inequality",
        forward.iter().all(|r| r.holds_with(fitted)),
        format!("fitted c = {fitted:.6} over {} pairs", forward.len()),
    );
    rep.result("forward_fitted_c", fitted)?;
    let rows: Vec<ForwardRow> = forward
        .iter()
        .map(|r| ForwardRow {
            a: format!("{:#x}", r.a.mask()),
            b: format!("{:#x}", r.b.mask()),
            cd_a: opt(&r.cd_a),
            cd_b_given_a: opt(&r.cd_b_given_a),
            composite_len: r.composite_len,
            p: r.p,
            cd_pair_upper: r.cd_pair_upper,
            slack: r.slack,
            log_term: r.log_term,
            required_c: r.required_c,
        })
        .collect();
    rep.table("forward", &rows)?;

    let pair_lab = make_lab(a.pair_program_len)?;
    let pool = full_pool(a.n)?;
    let mut reverse = Vec::new();
    let (mut small_d, mut heavy_ok) = (true, true);
    let mut families = Vec::new();
    for &k in &a.k {
        let d = build_pair_family(&pair_lab, &pool, a.n, a.m, k)?;
        small_d &= (d.members.len() as u128) < 1u128 << (k + 1);
        for t in 0..=k {
            heavy_ok &= (d.heavy_first(t).len() as u128) <= 1u128 << (k - t + 1);
        }
        for p in &d.members {
            let r = soi_reverse(&d, &p.a, &p.b)?;
            let first = p.a;
            let pair = decode_pair_given_first(&pair_lab, &r.b_given_a, &|y| first.contains(y))?;
            let a_back = decode_heavy_first(&pair_lab, &r.a)?;
            reverse.push(ReverseRow {
                k,
                a: format!("{:#x}", p.a.mask()),
                b: format!("{:#x}", p.b.mask()),
                cd: p.cd,
                t: r.t,
                slice_size: r.slice_size,
                b_given_a_len: r.b_given_a.payload_len(),
                a_len: r.a.payload_len(),
                heavy_first: r.heavy_first,
                decoded: pair == (p.a, p.b) && a_back == p.a,
            });
        }
        families.push((k, d.members.len(), d.first_components().len()));
    }
    rep.check("|D| < 2^(k+1)", small_d, "");
    rep.check("heavy first components <= 2^(k-t+1)", heavy_ok, "every t");
    rep.check(
        "reverse payloads",
        reverse.iter().all(|r| r.b_given_a_len <= r.t + 1 && r.a_len <= r.k - r.t + 1),
        "t + 1 bits given A, k - t + 1 bits for A",
    );
    rep.check("reverse descriptions decode", reverse.iter().all(|r| r.decoded), format!("{} pairs", reverse.len()));
    rep.result("pair_families", families)?;
    rep.table("reverse", &reverse)
}

#[derive(Serialize)]
struct ScanCsvRow<'a> {
    x: &'a str,
    a: u64,
    log_a: f64,
    d_lo: Option<f64>,
    d_hi: Option<f64>,
    best_b: u64,
    delta_lo: Option<f64>,
    delta_hi: Option<f64>,
    gap_lo: Option<f64>,
    gap_hi: Option<f64>,
}

fn scan(lab: &Lab, a: &HypothesisScanArgs, rep: &mut Report) -> Result<(), CliError> {
    let s = hypothesis_scan(lab, a.family, a.n, a.m, a.p.unwrap_or(a.m), a.slack_budget)?;
    let consistent = s.rows.iter().all(|r| {
        r.gap_lo == r.delta_lo.zip(r.d_hi).map(|(x, y)| x - y) && r.gap_hi == r.delta_hi.zip(r.d_lo).map(|(x, y)| x - y)
    });
    rep.check("gap arithmetic", consistent, "gaps recompute from the deficiency intervals");
    rep.result("worst_gap_lo", s.worst_gap_lo)?;
    rep.result("worst_gap_hi", s.worst_gap_hi)?;
    rep.result("exceeding", s.exceeding)?;
    rep.result("within", s.within)?;
    rep.result("undetermined", s.undetermined)?;
    let rows: Vec<ScanCsvRow> = s
        .rows
        .iter()
        .map(|r| ScanCsvRow {
            x: &r.x,
            a: r.a,
            log_a: r.log_a,
            d_lo: r.d_lo,
            d_hi: r.d_hi,
            best_b: r.best_b,
            delta_lo: r.delta_lo,
            delta_hi: r.delta_hi,
            gap_lo: r.gap_lo,
            gap_hi: r.gap_hi,
        })
        .collect();
    rep.table("scan", &rows)
}

fn example(lab: &Lab, a: &ExampleArgs, rep: &mut Report) -> Result<(), CliError> {
    let e = independent_pair_example(lab, a.n, a.m)?;
    rep.check(
        "A = {0,1}^n minus {y} contains x",
        e.set.contains(e.x.to_u64()) && !e.set.contains(e.y.to_u64()) && e.set.len() + 1 == 1 << a.n,
        "",
    );
    rep.check(
        "deficiency arithmetic",
        e.deficiencies.recompute() == (e.deficiencies.d, e.deficiencies.delta),
        "",
    );
    rep.check(
        "delta exceeds d",
        e.gap_lower.is_some_and(|g| g > 0.0),
        format!("certified lower bound on delta - d: {:?}", e.gap_lower),
    );
    rep.result("example", &e)
}

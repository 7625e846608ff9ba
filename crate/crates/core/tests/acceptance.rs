//! Acceptance criteria, one line each.
//!
//! Runs as a plain binary (`harness = false`) so every criterion prints a
//! PASS/FAIL/SKIP line with its measured values; the process exits nonzero
//! if any criterion fails. Tolerances and budgets are fixed below.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use discrim_core::atoms::{compute_atoms, layout_rippleset, outline_set, LayoutOptions, DEFAULT_OUTLINE_MARGIN};
use discrim_core::causal::{discover_parents, suggest_resolving};
use discrim_core::data::{discretize_mdl, load_dataset, DiscretizedDataset, Role, Schema};
use discrim_core::discrim::{analyze, mine_discriminatory_itemsets, AnalysisConfig, ItemsetCollection};
use discrim_core::mitigation::{apply_plan, plan_reject_option};
use discrim_core::pipeline::{prepare, PipelineOptions};
use discrim_core::rules::{default_min_support, mine_conditions, mine_frequent_itemsets, Condition, Literal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const RD_TOL: f64 = 1e-12;
const SIMPSON_RD_TOL: f64 = 1e-9;
const SIMPSON_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const PERF_BUDGET: Duration = Duration::from_secs(60);
const MDL_TOL: f64 = 1e-12;
const GEOM_TOL: f64 = 1e-9;
const ORACLE_DATASETS: u64 = 200;
const LAYOUT_FAMILIES: u64 = 50;
const CAUSAL_TRIALS: u64 = 20;
const CAUSAL_REQUIRED: usize = 18;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("simpson_reproduction", simpson_reproduction),
        ("oracle_equivalence_mining", oracle_equivalence_mining),
        ("fpgrowth_vs_apriori", fpgrowth_vs_apriori),
        ("mdl_discretization", mdl_discretization),
        ("atom_layout_properties", atom_layout_properties),
        ("mitigation", mitigation),
        ("causal_local_recovery", causal_local_recovery),
        ("monotone_tau", monotone_tau),
        ("performance_envelope", performance_envelope),
        ("xapi_resolving_suggestion", xapi_resolving_suggestion),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("acceptance {tag} {name} ({secs:.2}s): {detail}");
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
}

// --- Simpson's paradox ---------------------------------------------------

fn simpson_reproduction() -> Verdict {
    let start = Instant::now();
    let ds = simpson();
    let frequent = mine_conditions(&ds, default_min_support(ds.len()), 6);
    let mut cfg = AnalysisConfig::for_dataset(&ds, "model");
    cfg.tau = 0.05;
    let resolved = analyze(&ds, &frequent, &cfg).expect("resolving run");
    cfg.resolving.clear();
    cfg.allow_empty_resolving = true;
    let parity = analyze(&ds, &frequent, &cfg).expect("empty-resolving run");
    let elapsed = start.elapsed();

    let sets: Vec<_> = parity.itemsets().collect();
    let global_ok = sets.len() == 1 && sets[0].condition.is_empty() && (sets[0].rd + 0.08).abs() <= SIMPSON_RD_TOL;
    let rd = sets.first().map(|s| s.rd).unwrap_or(f64::NAN);
    verdict(
        resolved.itemset_count() == 0 && global_ok && elapsed < SIMPSON_BUDGET,
        format!(
            "resolving={{major,score}} -> {} itemsets; empty resolving -> {} itemset(s), rd={rd:.12}; {:.3}s",
            resolved.itemset_count(),
            sets.len(),
            elapsed.as_secs_f64()
        ),
    )
}

// --- Mining oracle ---------------------------------------------------------

struct Case {
    ds: DiscretizedDataset,
    min_support: usize,
    config: AnalysisConfig,
}

fn small_cases() -> Vec<Case> {
    (0..ORACLE_DATASETS)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let rows = rng.gen_range(4..=12);
            let attrs = rng.gen_range(1..=4);
            let ds = random_table(&mut rng, rows, attrs);
            let names: Vec<String> = (0..attrs).map(|j| format!("a{j}")).collect();
            let mut cfg = AnalysisConfig::for_dataset(&ds, "m");
            cfg.tau = [0.05, 0.1, 0.2, 0.3][rng.gen_range(0..4)];
            cfg.min_group_support = rng.gen_range(1..=2);
            cfg.prune_redundant = rng.gen_bool(0.5);
            cfg.resolving = names.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
            cfg.proxies = names
                .iter()
                .filter(|n| !cfg.resolving.contains(*n))
                .filter(|_| rng.gen_bool(0.2))
                .cloned()
                .collect();
            cfg.allow_empty_resolving = cfg.resolving.is_empty();
            Case {
                ds,
                min_support: rng.gen_range(1..=3),
                config: cfg,
            }
        })
        .collect()
}

type Emitted = (String, Vec<usize>, Vec<usize>, f64);

fn oracle_itemsets(case: &Case) -> Vec<Emitted> {
    let ds = &case.ds;
    let cfg = &case.config;
    let preds = ds.predictions(&cfg.model_id).unwrap();
    let idx = |n: &String| ds.attribute_index(n).unwrap();
    let resolving: BTreeSet<usize> = cfg.resolving.iter().map(idx).collect();
    let proxies: BTreeSet<usize> = cfg.proxies.iter().map(idx).collect();
    let mut out = Vec::new();
    for cond in all_conditions(ds, &ds.minable_attributes()) {
        let rows = scan(ds, &cond);
        if !cond.is_empty() && rows.len() < case.min_support {
            continue;
        }
        let attrs: BTreeSet<usize> = cond.literals().iter().map(|l| l.attr).collect();
        if !resolving.is_subset(&attrs) || !proxies.is_disjoint(&attrs) {
            continue;
        }
        let prot: Vec<usize> = rows.iter().copied().filter(|&i| ds.protected_flag[i]).collect();
        let non: Vec<usize> = rows.iter().copied().filter(|&i| !ds.protected_flag[i]).collect();
        if prot.len() < cfg.min_group_support || non.len() < cfg.min_group_support {
            continue;
        }
        if cfg.prune_redundant {
            let redundant = cond
                .literals()
                .iter()
                .filter(|l| !resolving.contains(&l.attr))
                .any(|l| scan(ds, &cond.without(l.attr)) == rows);
            if redundant {
                continue;
            }
        }
        let rate = |ids: &[usize]| ids.iter().filter(|&&i| preds[i]).count() as f64 / ids.len() as f64;
        let rd = rate(&prot) - rate(&non);
        if rd.abs() > cfg.tau {
            out.push((cond.canonical_key(ds), prot, non, rd));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn oracle_equivalence_mining() -> Verdict {
    let start = Instant::now();
    let cases = small_cases();
    let mut mismatches = Vec::new();
    let mut emitted = 0;
    for (k, case) in cases.iter().enumerate() {
        let frequent = mine_frequent_itemsets(&case.ds, "m", case.min_support, 6).unwrap();
        let mut got: Vec<Emitted> = mine_discriminatory_itemsets(&frequent, &case.ds, &case.config)
            .unwrap()
            .into_iter()
            .map(|s| (s.canonical_key, s.members_protected, s.members_nonprotected, s.rd))
            .collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        let want = oracle_itemsets(case);
        emitted += want.len();
        let same = got.len() == want.len()
            && got
                .iter()
                .zip(&want)
                .all(|(g, w)| g.0 == w.0 && g.1 == w.1 && g.2 == w.2 && (g.3 - w.3).abs() <= RD_TOL);
        if !same {
            mismatches.push(k);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        mismatches.is_empty() && elapsed < ORACLE_BUDGET,
        format!(
            "{} datasets, {emitted} oracle itemsets, mismatching datasets {:?}; {:.2}s (budget {}s)",
            cases.len(),
            mismatches,
            elapsed.as_secs_f64(),
            ORACLE_BUDGET.as_secs()
        ),
    )
}

// --- FP-Growth vs Apriori --------------------------------------------------

fn apriori(ds: &DiscretizedDataset, min_support: usize, max_len: usize) -> BTreeMap<String, usize> {
    let support = |lits: &[Literal]| scan(ds, &Condition::new(lits.to_vec())).len();
    let mut level: Vec<Vec<Literal>> = ds
        .minable_attributes()
        .into_iter()
        .flat_map(|a| (0..ds.attributes[a].categories.len() as u32).map(move |code| vec![Literal { attr: a, code }]))
        .filter(|l| support(l) >= min_support)
        .collect();
    let mut out = BTreeMap::new();
    let mut k = 1;
    while !level.is_empty() && k <= max_len {
        for l in &level {
            out.insert(Condition::new(l.clone()).canonical_key(ds), support(l));
        }
        let known: BTreeSet<&Vec<Literal>> = level.iter().collect();
        let mut next = Vec::new();
        for (i, a) in level.iter().enumerate() {
            for b in &level[i + 1..] {
                if a[..k - 1] != b[..k - 1] || a[k - 1].attr >= b[k - 1].attr {
                    continue;
                }
                let mut cand = a.clone();
                cand.push(b[k - 1]);
                let closed = (0..cand.len()).all(|drop| {
                    let sub: Vec<Literal> = cand.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, l)| *l).collect();
                    known.contains(&sub)
                });
                if closed && support(&cand) >= min_support {
                    next.push(cand);
                }
            }
        }
        next.sort();
        level = next;
        k += 1;
    }
    out
}

fn fpgrowth_vs_apriori() -> Verdict {
    let cases = small_cases();
    let mut mismatches = Vec::new();
    let mut total = 0;
    for (k, case) in cases.iter().enumerate() {
        let fp: BTreeMap<String, usize> = mine_frequent_itemsets(&case.ds, "m", case.min_support, 6)
            .unwrap()
            .into_iter()
            .map(|(c, s)| (c.canonical_key(&case.ds), s))
            .collect();
        let fp_len = mine_frequent_itemsets(&case.ds, "m", case.min_support, 6).unwrap().len();
        let ap = apriori(&case.ds, case.min_support, 6);
        total += ap.len();
        if fp != ap || fp_len != fp.len() {
            mismatches.push(k);
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("{} datasets, {total} frequent conditions, mismatching datasets {:?}", cases.len(), mismatches),
    )
}

// --- MDL -----------------------------------------------------------------

/// Independent recursion over raw sorted pairs: (n, cut, gain, threshold).
fn mdl_oracle(values: &[f64], labels: &[bool], trace: &mut Vec<(usize, f64, f64, f64)>) -> Vec<f64> {
    fn ent(pos: usize, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        [pos, n - pos]
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n as f64;
                -p * p.log2()
            })
            .sum()
    }
    fn kinds(pos: usize, n: usize) -> f64 {
        (pos > 0) as u8 as f64 + (pos < n) as u8 as f64
    }
    let mut pairs: Vec<(f64, bool)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len();
    let pos = pairs.iter().filter(|p| p.1).count();
    if n < 2 || pos == 0 || pos == n {
        return Vec::new();
    }
    // Candidate i: cut between distinct values pairs[i-1] and pairs[i],
    // skipped when both sides of it are pure in the same class.
    let purity = |v: f64| {
        let same: Vec<bool> = pairs.iter().filter(|p| p.0 == v).map(|p| p.1).collect();
        if same.iter().all(|&b| b) {
            Some(true)
        } else if same.iter().all(|&b| !b) {
            Some(false)
        } else {
            None
        }
    };
    let mut best: Option<(usize, f64)> = None;
    for i in 1..n {
        if pairs[i].0 == pairs[i - 1].0 {
            continue;
        }
        let (pa, pb) = (purity(pairs[i - 1].0), purity(pairs[i].0));
        if pa.is_some() && pa == pb {
            continue;
        }
        let lp = pairs[..i].iter().filter(|p| p.1).count();
        let w = (i as f64 * ent(lp, i) + (n - i) as f64 * ent(pos - lp, n - i)) / n as f64;
        if best.is_none_or(|b| w < b.1) {
            best = Some((i, w));
        }
    }
    let Some((i, w)) = best else { return Vec::new() };
    let lp = pairs[..i].iter().filter(|p| p.1).count();
    let gain = ent(pos, n) - w;
    let (k, k1, k2) = (kinds(pos, n), kinds(lp, i), kinds(pos - lp, n - i));
    let delta = (3f64.powf(k) - 2.0).log2() - (k * ent(pos, n) - k1 * ent(lp, i) - k2 * ent(pos - lp, n - i));
    let threshold = ((n as f64 - 1.0).log2() + delta) / n as f64;
    let cut = (pairs[i - 1].0 + pairs[i].0) / 2.0;
    trace.push((n, cut, gain, threshold));
    if gain <= threshold {
        return Vec::new();
    }
    let (lv, ll): (Vec<f64>, Vec<bool>) = pairs[..i].iter().copied().unzip();
    let (rv, rl): (Vec<f64>, Vec<bool>) = pairs[i..].iter().copied().unzip();
    let mut cuts = mdl_oracle(&lv, &ll, trace);
    cuts.push(cut);
    cuts.extend(mdl_oracle(&rv, &rl, trace));
    cuts
}

fn mdl_discretization() -> Verdict {
    let labels = |v: &[u8]| v.iter().map(|&x| x == 1).collect::<Vec<bool>>();
    let separable = discretize_mdl(&[1.0, 2.0, 3.0, 10.0, 11.0, 12.0], &labels(&[0, 0, 0, 1, 1, 1]));
    let alternating = discretize_mdl(&[1.0, 2.0, 3.0, 4.0], &labels(&[0, 1, 0, 1]));
    let examples_ok = separable.thresholds == [6.5] && alternating.thresholds.is_empty();

    let mut bad_traces = Vec::new();
    let mut entries = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=200);
        let spread = rng.gen_range(3..=60);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..spread) as f64).collect();
        let cut = rng.gen_range(0..spread) as f64;
        let noise = rng.gen_range(0.0..0.4);
        let y: Vec<bool> = values.iter().map(|&v| (v > cut) ^ rng.gen_bool(noise)).collect();
        let got = discretize_mdl(&values, &y);
        let mut trace = Vec::new();
        let want = mdl_oracle(&values, &y, &mut trace);
        entries += got.acceptance_trace.len();
        let verdicts = got.acceptance_trace.iter().all(|c| c.accepted == (c.gain > c.mdl_threshold));
        let mut got_trace = got.acceptance_trace.clone();
        got_trace.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
        trace.sort_by(|a, b| a.1.total_cmp(&b.1));
        let trace_ok = got_trace.len() == trace.len()
            && got_trace.iter().zip(&trace).all(|(g, w)| {
                g.n == w.0
                    && g.threshold == w.1
                    && (g.gain - w.2).abs() <= MDL_TOL
                    && (g.mdl_threshold - w.3).abs() <= MDL_TOL
            });
        if got.thresholds != want || !verdicts || !trace_ok {
            bad_traces.push(seed);
        }
    }
    verdict(
        examples_ok && bad_traces.is_empty(),
        format!(
            "[1,2,3,10,11,12] -> {:?}; alternating -> {:?}; 100 random attributes, {entries} trace entries rechecked, failing seeds {:?}",
            separable.thresholds, alternating.thresholds, bad_traces
        ),
    )
}

// --- Atoms and layout ----------------------------------------------------

fn random_family(rng: &mut ChaCha8Rng) -> (ItemsetCollection, Vec<bool>) {
    let universe = rng.gen_range(1..=500);
    let k = rng.gen_range(1..=7);
    let protected: Vec<bool> = (0..universe).map(|_| rng.gen_bool(0.5)).collect();
    let preds: Vec<bool> = (0..universe).map(|_| rng.gen_bool(0.5)).collect();
    let itemsets = (0..k)
        .map(|s| {
            let density = rng.gen_range(0.05..0.6);
            let members: Vec<usize> = (0..universe).filter(|_| rng.gen_bool(density)).collect();
            let (p, n): (Vec<usize>, Vec<usize>) = members.into_iter().partition(|&i| protected[i]);
            synthetic_itemset(&format!("s{s}"), p, n, &preds)
        })
        .collect();
    let collection = ItemsetCollection {
        resolving_key: "[]".into(),
        resolving_condition: Condition::empty(),
        itemsets,
        total_items: 0,
        hierarchy: Vec::new(),
        row_order: Vec::new(),
    };
    (collection, preds)
}

fn atom_layout_properties() -> Verdict {
    let opts = LayoutOptions::default();
    let mut problems = String::new();
    let (mut atoms_seen, mut dots_seen) = (0, 0);
    for seed in 0..LAYOUT_FAMILIES {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let (collection, preds) = random_family(&mut rng);
        let atoms = compute_atoms(&collection, &preds);
        atoms_seen += atoms.len();

        // Partition: every member of the union in exactly one atom, with the
        // signature equal to its membership pattern.
        let union: BTreeSet<usize> = collection.member_union();
        let mut seen = BTreeSet::new();
        for a in &atoms {
            for id in a.item_ids() {
                if !seen.insert(id) {
                    let _ = write!(problems, "seed {seed}: item {id} in two atoms; ");
                }
                for (s, set) in collection.itemsets.iter().enumerate() {
                    if set.members().contains(&id) != a.signature.bit(s) {
                        let _ = write!(problems, "seed {seed}: item {id} signature; ");
                    }
                }
            }
        }
        if seen != union {
            let _ = write!(problems, "seed {seed}: atoms do not cover the union; ");
        }

        let build = || {
            let mut g = layout_rippleset(&atoms, &opts);
            g.outlines = (0..collection.itemsets.len())
                .filter_map(|s| outline_set(&g, s, DEFAULT_OUTLINE_MARGIN))
                .collect();
            g
        };
        let geom = build();
        dots_seen += geom.dots.len();
        let c = &geom.circles;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d = ((c[i].x - c[j].x).powi(2) + (c[i].y - c[j].y).powi(2)).sqrt();
                if d < c[i].radius + c[j].radius - GEOM_TOL {
                    let _ = write!(problems, "seed {seed}: circles {i},{j} overlap; ");
                }
            }
        }
        for d in &geom.dots {
            let o = &c[d.circle];
            let r = ((d.x - o.x).powi(2) + (d.y - o.y).powi(2)).sqrt() + d.radius;
            if r > o.radius + GEOM_TOL {
                let _ = write!(problems, "seed {seed}: dot {} outside; ", d.item_id);
            }
        }
        if let Some(first) = c.first() {
            let ratio = first.radius.powi(2) / first.count as f64;
            if c.iter().any(|x| ((x.radius.powi(2) / x.count as f64) / ratio - 1.0).abs() > GEOM_TOL) {
                let _ = write!(problems, "seed {seed}: radius^2 not proportional to count; ");
            }
        }
        let a = serde_json::to_string(&geom).unwrap();
        let b = serde_json::to_string(&build()).unwrap();
        if a != b {
            let _ = write!(problems, "seed {seed}: geometry not byte-identical; ");
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "{LAYOUT_FAMILIES} families, {atoms_seen} atoms, {dots_seen} dots; {}",
            if problems.is_empty() { "no violations".to_string() } else { problems }
        ),
    )
}

// --- Mitigation ------------------------------------------------------------

fn within(rd: f64, tau: f64) -> bool {
    rd.abs() <= tau + 1e-12
}

fn rd_of(prot: &[usize], non: &[usize], preds: &[bool]) -> f64 {
    let rate = |ids: &[usize]| {
        if ids.is_empty() {
            0.0
        } else {
            ids.iter().filter(|&&i| preds[i]).count() as f64 / ids.len() as f64
        }
    };
    rate(prot) - rate(non)
}

/// Fewest flips under the group-priority rule, by enumerating flip subsets:
/// advantaged-group flips only once every disadvantaged candidate is flipped,
/// falling back to any subset when no such subset reaches the target.
fn min_flips(prot: &[usize], non: &[usize], preds: &[bool], tau: f64) -> Option<usize> {
    let rd = rd_of(prot, non, preds);
    if within(rd, tau) {
        return Some(0);
    }
    let (low, high) = if rd < 0.0 { (prot, non) } else { (non, prot) };
    let up: Vec<usize> = low.iter().copied().filter(|&i| !preds[i]).collect();
    let down: Vec<usize> = high.iter().copied().filter(|&i| preds[i]).collect();
    let pool: Vec<usize> = up.iter().chain(&down).copied().collect();
    let (mut compliant, mut any): (Option<usize>, Option<usize>) = (None, None);
    for mask in 0u32..(1 << pool.len()) {
        let mut p = preds.to_vec();
        for (b, &i) in pool.iter().enumerate() {
            if mask & (1 << b) != 0 {
                p[i] = !p[i];
            }
        }
        if !within(rd_of(prot, non, &p), tau) {
            continue;
        }
        let size = mask.count_ones() as usize;
        let all_up = (0..up.len()).all(|b| mask & (1 << b) != 0);
        let uses_down = (up.len()..pool.len()).any(|b| mask & (1 << b) != 0);
        if !uses_down || all_up {
            compliant = Some(compliant.map_or(size, |c: usize| c.min(size)));
        }
        any = Some(any.map_or(size, |c: usize| c.min(size)));
    }
    compliant.or(any)
}

fn toy_dataset() -> DiscretizedDataset {
    let rows: Vec<Vec<String>> = (0..20)
        .map(|i| {
            let prot = i < 10;
            let pred = if prot { i < 2 } else { i < 18 };
            vec![(prot as u8).to_string(), (pred as u8).to_string(), (pred as u8).to_string()]
        })
        .collect();
    let schema = Schema::default()
        .with("g", Role::Protected)
        .with("y", Role::Outcome)
        .with("m", Role::Prediction);
    discretized(&csv_text(&["g", "y", "m"], &rows), &schema)
}

fn mitigation() -> Verdict {
    let ds = toy_dataset();
    let toy = synthetic_itemset("[]", (0..10).collect(), (10..20).collect(), ds.predictions("m").unwrap());
    let plan = plan_reject_option(&ds, "m", std::slice::from_ref(&toy), 0.25).unwrap();
    let (_, report) = apply_plan(&ds, "m", &plan, std::slice::from_ref(&toy)).unwrap();
    let toy_rd = report.itemsets[0].rd_after;
    let toy_ok = plan.flips.len() == 4 && (toy_rd + 0.2).abs() <= RD_TOL;

    // Minimality on single itemsets of at most 12 members.
    let mut minimal_bad = 0;
    let mut minimal_trials = 0;
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
        let ds = random_table(&mut rng, 40, 1);
        let preds = ds.predictions("m").unwrap();
        let size = rng.gen_range(2..=12);
        let mut ids: Vec<usize> = (0..ds.len()).collect();
        for i in (1..ids.len()).rev() {
            ids.swap(i, rng.gen_range(0..=i));
        }
        let mut members: Vec<usize> = ids[..size].to_vec();
        members.sort_unstable();
        let (p, n): (Vec<usize>, Vec<usize>) = members.into_iter().partition(|&i| ds.protected_flag[i]);
        if p.is_empty() || n.is_empty() {
            continue;
        }
        let tau = [0.1, 0.2, 0.25, 0.3][rng.gen_range(0..4)];
        let set = synthetic_itemset("s", p.clone(), n.clone(), preds);
        let plan = plan_reject_option(&ds, "m", std::slice::from_ref(&set), tau).unwrap();
        minimal_trials += 1;
        let ok = match min_flips(&p, &n, preds, tau) {
            Some(m) => plan.flips.len() == m && plan.unresolved.is_empty(),
            None => !plan.unresolved.is_empty(),
        };
        if !ok {
            minimal_bad += 1;
        }
    }

    // Post-condition on overlapping selections, recomputed from scratch.
    let mut post_bad = 0;
    let mut post_trials = 0;
    let mut max_after: f64 = 0.0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let ds = random_table(&mut rng, 200, 1);
        let preds = ds.predictions("m").unwrap();
        let tau = [0.1, 0.2, 0.3][rng.gen_range(0..3)];
        let k = rng.gen_range(1..=4);
        let selected: Vec<_> = (0..k)
            .map(|s| {
                let lo = rng.gen_range(0..150);
                let hi = lo + rng.gen_range(20..=50);
                let (p, n): (Vec<usize>, Vec<usize>) = (lo..hi.min(200)).partition(|&i| ds.protected_flag[i]);
                synthetic_itemset(&format!("s{s}"), p, n, preds)
            })
            .filter(|s| s.members_protected.len() >= 5 && s.members_nonprotected.len() >= 5)
            .collect();
        if selected.is_empty() {
            continue;
        }
        post_trials += 1;
        let plan = plan_reject_option(&ds, "m", &selected, tau).unwrap();
        let (after, _) = apply_plan(&ds, "m", &plan, &selected).unwrap();
        let ids: BTreeSet<usize> = plan.flips.iter().map(|f| f.item_id).collect();
        let in_region = ids.iter().all(|i| selected.iter().any(|s| s.members().contains(i)));
        let ok = ids.len() == plan.flips.len()
            && in_region
            && selected.iter().all(|s| {
                let rd = rd_of(&s.members_protected, &s.members_nonprotected, &after);
                max_after = max_after.max(rd.abs() - tau);
                within(rd, tau)
            });
        if !ok {
            post_bad += 1;
        }
    }

    verdict(
        toy_ok && minimal_bad == 0 && post_bad == 0,
        format!(
            "toy: {} flips, rd_after={toy_rd:.12}; minimality mismatches {minimal_bad}/{minimal_trials}; post-condition violations {post_bad}/{post_trials} (max |rd_after|-tau = {max_after:.3})",
            plan.flips.len()
        ),
    )
}

// --- Causal ----------------------------------------------------------------

fn chain_dataset(seed: u64, independent: bool) -> DiscretizedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<String>> = (0..2000)
        .map(|_| {
            let a = rng.gen_bool(0.5);
            let x = a ^ rng.gen_bool(0.1);
            let y = if independent { rng.gen_bool(0.5) } else { x ^ rng.gen_bool(0.1) };
            [a, x, y, y].iter().map(|&b| (b as u8).to_string()).collect()
        })
        .collect();
    let schema = Schema::default()
        .with("A", Role::Protected)
        .with("X", Role::Context)
        .with("Y", Role::Outcome)
        .with("m", Role::Prediction);
    discretized(&csv_text(&["A", "X", "Y", "m"], &rows), &schema)
}

fn causal_local_recovery() -> Verdict {
    let want: BTreeSet<String> = ["X".to_string()].into();
    let chain = (0..CAUSAL_TRIALS)
        .filter(|&s| discover_parents(&chain_dataset(100 + s, false)).unwrap().parents == want)
        .count();
    let indep = (0..CAUSAL_TRIALS)
        .filter(|&s| discover_parents(&chain_dataset(200 + s, true)).unwrap().parents.is_empty())
        .count();
    verdict(
        chain >= CAUSAL_REQUIRED && indep >= CAUSAL_REQUIRED,
        format!("chain A->X->Y: parents={{X}} in {chain}/{CAUSAL_TRIALS}; independent target: parents={{}} in {indep}/{CAUSAL_TRIALS} (need {CAUSAL_REQUIRED})"),
    )
}

// --- Monotone tau -------------------------------------------------------------

fn monotone_tau() -> Verdict {
    let taus = [0.1, 0.2, 0.3, 0.4];
    let mut broken = Vec::new();
    let mut sizes = Vec::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let ds = random_table(&mut rng, 300, 4);
        let frequent = mine_conditions(&ds, 5, 6);
        let mut cfg = AnalysisConfig::for_dataset(&ds, "m");
        cfg.resolving = ["a0".to_string()].into();
        let sets: Vec<BTreeSet<String>> = taus
            .iter()
            .map(|&t| {
                cfg.tau = t;
                analyze(&ds, &frequent, &cfg)
                    .unwrap()
                    .itemsets()
                    .map(|s| s.canonical_key.clone())
                    .collect()
            })
            .collect();
        sizes.push(sets.iter().map(|s| s.len()).collect::<Vec<_>>());
        if sets.windows(2).any(|w| !w[1].is_subset(&w[0])) {
            broken.push(seed);
        }
    }
    verdict(
        broken.is_empty(),
        format!("20 datasets at tau {taus:?}; first sizes {:?}; non-chains {:?}", &sizes[..3], broken),
    )
}

// --- Performance ---------------------------------------------------------------

fn performance_csv() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut header: Vec<String> = vec!["gender".into(), "label".into(), "model".into()];
    header.extend((0..6).map(|j| format!("num{j}")));
    header.extend((0..8).map(|j| format!("cat{j}")));
    let mut rows = Vec::new();
    for _ in 0..4000 {
        let g = rng.gen_bool(0.5);
        let nums: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..100.0)).collect();
        let cats: Vec<usize> = (0..8).map(|j| rng.gen_range(0..2 + j % 4)).collect();
        let score = nums[0] / 100.0 + nums[1] / 200.0 + if cats[0] == 0 { 0.3 } else { 0.0 } + if g { -0.1 } else { 0.1 };
        let y = score + rng.gen_range(-0.3..0.3) > 0.6;
        let pred = y ^ rng.gen_bool(0.15);
        let mut r = vec![(g as u8).to_string(), (y as u8).to_string(), (pred as u8).to_string()];
        r.extend(nums.iter().map(|v| format!("{v:.2}")));
        r.extend(cats.iter().map(|c| format!("c{c}")));
        rows.push(r);
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_text(&h, &rows)
}

fn performance_envelope() -> Verdict {
    let text = performance_csv();
    let schema = Schema::default()
        .with("gender", Role::Protected)
        .with("label", Role::Outcome)
        .with("model", Role::Prediction);
    let start = Instant::now();
    let ds = load_dataset(text.as_bytes(), &schema).unwrap();
    let prepared = prepare(&ds, &PipelineOptions::default()).unwrap();
    let parents = prepared.parents.as_ref().expect("4000 rows is enough for the parent search");
    let suggestion = suggest_resolving(parents, prepared.dataset.protected_attribute(), []);
    let mut cfg = AnalysisConfig::for_dataset(&prepared.dataset, "model");
    cfg.resolving = suggestion.resolving.clone();
    cfg.allow_empty_resolving = cfg.resolving.is_empty();
    let result = prepared.analyze(&cfg).unwrap();
    let elapsed = start.elapsed();
    verdict(
        elapsed <= PERF_BUDGET,
        format!(
            "4000 rows x 14 attributes: {} frequent conditions, resolving {:?}, {} itemsets in {} collections; {:.2}s (budget {}s)",
            prepared.frequent.len(),
            suggestion.resolving,
            result.itemset_count(),
            result.collections.len(),
            elapsed.as_secs_f64(),
            PERF_BUDGET.as_secs()
        ),
    )
}

// --- xAPI soft check -------------------------------------------------------------

/// Runs only when `XAPI_DATA` and `XAPI_SCHEMA` point at the public student
/// performance table (columns renamed to the attribute names used below)
/// and its role schema.
fn xapi_resolving_suggestion() -> Verdict {
    let (Ok(data), Ok(schema)) = (std::env::var("XAPI_DATA"), std::env::var("XAPI_SCHEMA")) else {
        return Verdict::Skip("XAPI_DATA / XAPI_SCHEMA not set; dataset not present".into());
    };
    let run = || -> Result<BTreeSet<String>, discrim_core::Error> {
        let schema = Schema::from_path(&schema)?;
        let file = std::fs::File::open(&data).map_err(discrim_core::DataError::from)?;
        let ds = load_dataset(file, &schema)?;
        let prepared = prepare(&ds, &PipelineOptions::default())?;
        let parents = prepared.parents.expect("xAPI has 480 rows");
        let proxies = schema.columns_with_role(Role::Proxy).collect::<Vec<_>>();
        Ok(suggest_resolving(&parents, prepared.dataset.protected_attribute(), proxies).resolving)
    };
    let named = ["announcements view", "raised hands", "absence days", "relationship"];
    match run() {
        Ok(suggested) => verdict(
            named.iter().all(|n| suggested.contains(*n)),
            format!("suggested {suggested:?}, expected superset of {named:?}"),
        ),
        Err(e) => Verdict::Fail(format!("could not run on {data}: {e}")),
    }
}

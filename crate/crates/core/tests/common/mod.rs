#![allow(dead_code)]

use discrim_core::data::{discretize_dataset, load_dataset, DiscretizedDataset, Role, Schema};
use discrim_core::discrim::DiscriminatoryItemset;
use discrim_core::rules::Condition;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn discretized(csv: &str, schema: &Schema) -> DiscretizedDataset {
    let ds = load_dataset(csv.as_bytes(), schema).expect("valid fixture");
    discretize_dataset(&ds).expect("discretizable fixture").0
}

/// Admission table with equal acceptance rates inside every
/// {major, score} cell but 42% vs 50% overall.
pub fn simpson() -> DiscretizedDataset {
    // (major, score, rate, female count, male count)
    let cells = [
        ("A", "H", 0.66, 200, 450),
        ("A", "L", 0.46, 300, 300),
        ("B", "H", 0.46, 300, 300),
        ("B", "L", 0.26, 450, 200),
    ];
    let mut rows = Vec::new();
    for (major, score, rate, f, m) in cells {
        for (gender, n) in [("F", f), ("M", m)] {
            let accepted = (rate * n as f64).round() as usize;
            for i in 0..n {
                let y = if i < accepted { "1" } else { "0" };
                rows.push(vec![gender.into(), major.into(), score.into(), y.into(), y.into()]);
            }
        }
    }
    let schema = Schema::default()
        .with("gender", Role::Protected)
        .protected_label("gender", "F")
        .with("major", Role::Resolving)
        .with("score", Role::Resolving)
        .with("admit", Role::Outcome)
        .with("model", Role::Prediction);
    discretized(&csv_text(&["gender", "major", "score", "admit", "model"], &rows), &schema)
}

/// Random categorical table: protected `g`, outcome `y`, prediction `m`
/// and `n_attrs` context attributes `a0..` with 2 or 3 values each.
/// Both groups and both outcome classes always occur.
pub fn random_table(rng: &mut ChaCha8Rng, n_rows: usize, n_attrs: usize) -> DiscretizedDataset {
    assert!(n_rows >= 2);
    let arity: Vec<usize> = (0..n_attrs).map(|_| rng.gen_range(2..=3)).collect();
    let mut header = vec!["g".to_string(), "y".to_string(), "m".to_string()];
    header.extend((0..n_attrs).map(|j| format!("a{j}")));
    let mut rows: Vec<Vec<String>> = (0..n_rows)
        .map(|i| {
            let g = if i < 2 { i % 2 } else { rng.gen_range(0..2) };
            let y = if i < 2 { (i + 1) % 2 } else { rng.gen_range(0..2) };
            let m = rng.gen_range(0..2);
            let mut r = vec![g.to_string(), y.to_string(), m.to_string()];
            r.extend(arity.iter().map(|&k| format!("v{}", rng.gen_range(0..k))));
            r
        })
        .collect();
    // Decouple the fixed first rows from position.
    for i in (1..rows.len()).rev() {
        let j = rng.gen_range(0..=i);
        rows.swap(i, j);
    }
    let mut schema = Schema::default()
        .with("g", Role::Protected)
        .with("y", Role::Outcome)
        .with("m", Role::Prediction);
    for j in 0..n_attrs {
        schema = schema.with(&format!("a{j}"), Role::Context);
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    discretized(&csv_text(&header, &rows), &schema)
}

/// An itemset with the given members and rates under `preds`, for the
/// layout and mitigation suites that do not need a real condition.
pub fn synthetic_itemset(key: &str, prot: Vec<usize>, non: Vec<usize>, preds: &[bool]) -> DiscriminatoryItemset {
    let bp = prot.iter().filter(|&&i| preds[i]).count();
    let bn = non.iter().filter(|&&i| preds[i]).count();
    let rate = |b: usize, n: usize| if n == 0 { 0.0 } else { b as f64 / n as f64 };
    let (pp, pn) = (rate(bp, prot.len()), rate(bn, non.len()));
    DiscriminatoryItemset {
        condition: Condition::empty(),
        canonical_key: key.to_string(),
        resolving_condition: Condition::empty(),
        resolving_key: "[]".into(),
        p_protected: pp,
        p_nonprotected: pn,
        rd: pp - pn,
        members_protected: prot,
        members_nonprotected: non,
        beneficial_protected: bp,
        beneficial_nonprotected: bn,
        context_attrs: Vec::new(),
    }
}

/// Every condition over `attrs`: each attribute absent or fixed to one of
/// its codes.
pub fn all_conditions(ds: &DiscretizedDataset, attrs: &[usize]) -> Vec<Condition> {
    let mut out = vec![Vec::new()];
    for &a in attrs {
        let k = ds.attributes[a].categories.len() as u32;
        let mut next = Vec::new();
        for lits in &out {
            next.push(lits.clone());
            for code in 0..k {
                let mut l: Vec<discrim_core::rules::Literal> = lits.clone();
                l.push(discrim_core::rules::Literal { attr: a, code });
                next.push(l);
            }
        }
        out = next;
    }
    out.into_iter().map(Condition::new).collect()
}

/// Row ids matching `cond`, by scanning every row.
pub fn scan(ds: &DiscretizedDataset, cond: &Condition) -> Vec<usize> {
    (0..ds.len())
        .filter(|&i| cond.literals().iter().all(|l| ds.codes[l.attr][i] == l.code))
        .collect()
}

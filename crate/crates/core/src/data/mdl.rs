//! Supervised entropy discretization with the minimum-description-length stop rule.
//!
//! The interval is split recursively at the class-boundary midpoint that
//! minimizes the weighted class entropy of the two halves. A split of a
//! subset `S` of size `N` at `T` is kept only if
//!
//! ```text
//! Gain(S; T) > (log2(N - 1) + Delta) / N
//! Delta      = log2(3^k - 2) - [k Ent(S) - k1 Ent(S1) - k2 Ent(S2)]
//! ```
//!
//! where `k`, `k1`, `k2` count the classes present in `S`, `S1`, `S2`.

use serde::{Deserialize, Serialize};

/// One evaluated split: the best boundary of a subinterval and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutCandidate {
    pub threshold: f64,
    /// Size of the subset being split.
    pub n: usize,
    pub gain: f64,
    pub mdl_threshold: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CutPoints {
    pub attribute: String,
    pub thresholds: Vec<f64>,
    pub acceptance_trace: Vec<CutCandidate>,
}

type Counts = [usize; 2];

fn total(c: &Counts) -> usize {
    c[0] + c[1]
}

fn classes_present(c: &Counts) -> u32 {
    c.iter().filter(|&&x| x > 0).count() as u32
}

/// Shannon entropy in bits of a class-count vector.
pub(crate) fn entropy(c: &Counts) -> f64 {
    let n = total(c) as f64;
    if n == 0.0 {
        return 0.0;
    }
    c.iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let p = x as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Right-hand side of the acceptance inequality.
pub(crate) fn mdl_threshold(whole: &Counts, left: &Counts, right: &Counts) -> f64 {
    let n = total(whole) as f64;
    let k = classes_present(whole) as f64;
    let k1 = classes_present(left) as f64;
    let k2 = classes_present(right) as f64;
    let delta = (3f64.powf(k) - 2.0).log2()
        - (k * entropy(whole) - k1 * entropy(left) - k2 * entropy(right));
    ((n - 1.0).log2() + delta) / n
}

struct Group {
    value: f64,
    counts: Counts,
}

/// Compute MDL cut points for one continuous attribute against binary labels.
///
/// Non-finite values are ignored. The result does not depend on input order.
pub fn discretize_mdl(values: &[f64], class_labels: &[bool]) -> CutPoints {
    assert_eq!(values.len(), class_labels.len(), "values and labels must align");
    let mut pairs: Vec<(f64, bool)> = values
        .iter()
        .copied()
        .zip(class_labels.iter().copied())
        .filter(|(v, _)| v.is_finite())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<Group> = Vec::new();
    for (v, y) in pairs {
        match groups.last_mut() {
            Some(g) if g.value == v => g.counts[y as usize] += 1,
            _ => {
                let mut counts = [0, 0];
                counts[y as usize] += 1;
                groups.push(Group { value: v, counts });
            }
        }
    }

    let mut out = CutPoints::default();
    split(&groups, &mut out);
    out
}

fn split(groups: &[Group], out: &mut CutPoints) {
    if groups.len() < 2 {
        return;
    }
    let mut whole = [0, 0];
    for g in groups {
        whole[0] += g.counts[0];
        whole[1] += g.counts[1];
    }
    let n = total(&whole);
    if n < 2 || classes_present(&whole) < 2 {
        return;
    }

    let mut best: Option<(usize, f64, Counts, Counts)> = None;
    let mut left = [0, 0];
    for i in 0..groups.len() - 1 {
        left[0] += groups[i].counts[0];
        left[1] += groups[i].counts[1];
        let (a, b) = (&groups[i].counts, &groups[i + 1].counts);
        let same_pure_class = classes_present(a) == 1
            && classes_present(b) == 1
            && (a[0] > 0) == (b[0] > 0);
        if same_pure_class {
            continue;
        }
        let right = [whole[0] - left[0], whole[1] - left[1]];
        let weighted = (total(&left) as f64 * entropy(&left)
            + total(&right) as f64 * entropy(&right))
            / n as f64;
        if best.as_ref().is_none_or(|b| weighted < b.1) {
            best = Some((i, weighted, left, right));
        }
    }
    let Some((i, weighted, left, right)) = best else {
        return;
    };

    let gain = entropy(&whole) - weighted;
    let threshold = mdl_threshold(&whole, &left, &right);
    let accepted = gain > threshold;
    let cut = (groups[i].value + groups[i + 1].value) / 2.0;
    out.acceptance_trace.push(CutCandidate {
        threshold: cut,
        n,
        gain,
        mdl_threshold: threshold,
        accepted,
    });
    if accepted {
        split(&groups[..=i], out);
        out.thresholds.push(cut);
        split(&groups[i + 1..], out);
    }
}

/// Bin code of a value: the number of thresholds `<= v`.
pub fn bin_code(thresholds: &[f64], v: f64) -> u32 {
    thresholds.partition_point(|t| *t <= v) as u32
}

/// Shortest rendering after rounding to 10 significant digits, so midpoints
/// like 10.350000000000001 print as 10.35.
fn fmt_num(v: f64) -> String {
    let rounded: f64 = format!("{v:.9e}").parse().unwrap_or(v);
    format!("{rounded}")
}

/// Display label of every bin, matching the condition literals like
/// `absence days:>7` or `raised hands:23-50`.
pub fn interval_labels(thresholds: &[f64]) -> Vec<String> {
    let (Some(first), Some(last)) = (thresholds.first(), thresholds.last()) else {
        return vec!["(-inf, inf)".to_string()];
    };
    let mut labels = Vec::with_capacity(thresholds.len() + 1);
    labels.push(format!("<{}", fmt_num(*first)));
    labels.extend(
        thresholds
            .windows(2)
            .map(|w| format!("{}-{}", fmt_num(w[0]), fmt_num(w[1]))),
    );
    labels.push(format!(">{}", fmt_num(*last)));
    labels
}

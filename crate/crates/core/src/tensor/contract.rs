use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::pow;
use super::{DenseTensor, Scalar, Variance};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlotRef {
    pub factor: usize,
    pub slot: usize,
}

impl SlotRef {
    pub fn new(factor: usize, slot: usize) -> Self {
        SlotRef { factor, slot }
    }
}

/// Factors, slot pairings and the order of free slots in the result.
#[derive(Clone, Debug)]
pub struct ContractionSpec<'a, S = f64> {
    pub factors: Vec<&'a DenseTensor<S>>,
    pub pairings: Vec<(SlotRef, SlotRef)>,
    pub free: Vec<SlotRef>,
}

impl<'a, S: Scalar> ContractionSpec<'a, S> {
    /// Builds a spec from einsum-style labels, e.g. `"abcd,cdef->abef"`.
    /// Each repeated letter is a pairing; letters after `->` give the free order.
    /// Omitting `->` means a full contraction.
    pub fn einsum(pattern: &str, factors: &[&'a DenseTensor<S>]) -> Result<Self> {
        let (lhs, rhs) = match pattern.split_once("->") {
            Some((l, r)) => (l, r.trim()),
            None => (pattern, ""),
        };
        let terms: Vec<&str> = lhs.split(',').map(str::trim).collect();
        if terms.len() != factors.len() {
            return Err(Error::Unsupported(format!(
                "pattern has {} terms but {} factors given",
                terms.len(),
                factors.len()
            )));
        }
        let mut seen: HashMap<char, Vec<SlotRef>> = HashMap::new();
        for (f, term) in terms.iter().enumerate() {
            if term.chars().count() != factors[f].rank() {
                return Err(Error::ShapeMismatch { got: term.chars().count(), want: factors[f].rank() });
            }
            for (s, c) in term.chars().enumerate() {
                seen.entry(c).or_default().push(SlotRef::new(f, s));
            }
        }
        let mut pairings = Vec::new();
        let mut free = Vec::new();
        let mut letters: Vec<_> = seen.keys().copied().collect();
        letters.sort_unstable();
        for c in letters {
            let refs = &seen[&c];
            match refs.len() {
                1 => {
                    if !rhs.contains(c) {
                        return Err(Error::Unsupported(format!("label `{c}` is neither paired nor free")));
                    }
                }
                2 => {
                    if rhs.contains(c) {
                        return Err(Error::Unsupported(format!("paired label `{c}` listed as free")));
                    }
                    pairings.push((refs[0], refs[1]));
                }
                _ => return Err(Error::Unsupported(format!("label `{c}` used more than twice"))),
            }
        }
        for c in rhs.chars() {
            match seen.get(&c) {
                Some(refs) if refs.len() == 1 => free.push(refs[0]),
                _ => return Err(Error::Unsupported(format!("free label `{c}` not found once"))),
            }
        }
        Ok(ContractionSpec { factors: factors.to_vec(), pairings, free })
    }
}

/// Pairwise evaluation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Smallest intermediate first.
    #[default]
    Greedy,
    /// Running product folded left to right.
    Sequential,
    /// Uniformly random connected pair at each step.
    Random(u64),
}

struct Operand<S> {
    tensor: DenseTensor<S>,
    labels: Vec<usize>,
}

/// Evaluates `spec`. Lower/lower pairings go through `inverse_metric`,
/// upper/upper ones through `metric`; mixed pairings contract directly.
pub fn contract<S: Scalar>(
    spec: &ContractionSpec<'_, S>,
    metric: &DenseTensor<S>,
    inverse_metric: &DenseTensor<S>,
    schedule: Schedule,
) -> Result<DenseTensor<S>> {
    let dim = metric.dim();
    if spec.factors.is_empty() {
        return Err(Error::Unsupported("no factors".into()));
    }
    for f in &spec.factors {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch(f.dim(), dim));
        }
    }
    let mut label_of: Vec<Vec<Option<usize>>> = spec.factors.iter().map(|f| vec![None; f.rank()]).collect();
    let assign = |r: SlotRef, l: usize, label_of: &mut Vec<Vec<Option<usize>>>| -> Result<()> {
        let rank = spec.factors.get(r.factor).map(|f| f.rank()).ok_or(Error::SlotOutOfRange {
            slot: r.factor,
            rank: spec.factors.len(),
        })?;
        if r.slot >= rank {
            return Err(Error::SlotOutOfRange { slot: r.slot, rank });
        }
        let cell = &mut label_of[r.factor][r.slot];
        if cell.is_some() {
            return Err(Error::SlotReuse { factor: r.factor, slot: r.slot });
        }
        *cell = Some(l);
        Ok(())
    };

    let mut next = 0usize;
    let mut extra: Vec<Operand<S>> = Vec::new();
    for &(p, q) in &spec.pairings {
        let vp = spec.factors.get(p.factor).and_then(|f| f.variance().get(p.slot)).copied();
        let vq = spec.factors.get(q.factor).and_then(|f| f.variance().get(q.slot)).copied();
        let (vp, vq) = match (vp, vq) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let bad = if vp.is_none() { p } else { q };
                return Err(Error::SlotOutOfRange { slot: bad.slot, rank: spec.factors.len() });
            }
        };
        if vp != vq {
            assign(p, next, &mut label_of)?;
            assign(q, next, &mut label_of)?;
            next += 1;
        } else {
            let (lp, lq) = (next, next + 1);
            next += 2;
            assign(p, lp, &mut label_of)?;
            assign(q, lq, &mut label_of)?;
            let m = if vp == Variance::Lower { inverse_metric } else { metric };
            extra.push(Operand { tensor: m.clone(), labels: vec![lp, lq] });
        }
    }
    let mut out_labels = Vec::with_capacity(spec.free.len());
    for &r in &spec.free {
        assign(r, next, &mut label_of)?;
        out_labels.push(next);
        next += 1;
    }
    for (f, labels) in label_of.iter().enumerate() {
        if let Some(s) = labels.iter().position(|l| l.is_none()) {
            return Err(Error::Unsupported(format!("slot ({f}, {s}) is neither paired nor free")));
        }
    }
    let out_variance: Vec<Variance> = spec.free.iter().map(|r| spec.factors[r.factor].variance()[r.slot]).collect();

    let mut ops: Vec<Operand<S>> = spec
        .factors
        .iter()
        .zip(label_of)
        .map(|(f, l)| Operand { tensor: (*f).clone(), labels: l.into_iter().map(Option::unwrap).collect() })
        .collect();
    // absorb each inserted metric into the factor owning its first label
    let nfactors = ops.len();
    ops.extend(extra);
    while ops.len() > nfactors {
        let m = ops.len() - 1;
        let owner = (0..nfactors).find(|&k| ops[k].labels.contains(&ops[m].labels[0])).unwrap();
        let keep = surviving(&ops, &[owner, m], &out_labels);
        let metric_op = ops.pop().unwrap();
        let o = &ops[owner];
        let t = pairwise(&o.tensor, &o.labels, Some((&metric_op.tensor, &metric_op.labels)), &keep, dim);
        ops[owner] = Operand { tensor: t, labels: keep };
    }

    // self-traces first
    for i in 0..ops.len() {
        if has_repeat(&ops[i].labels) {
            let keep = surviving(&ops, &[i], &out_labels);
            let op = &ops[i];
            let t = pairwise(&op.tensor, &op.labels, None, &keep, dim);
            ops[i] = Operand { tensor: t, labels: keep };
        }
    }

    let mut rng = match schedule {
        Schedule::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    while ops.len() > 1 {
        let (i, j) = match schedule {
            Schedule::Sequential => (0, 1),
            Schedule::Random(_) => {
                let rng = rng.as_mut().unwrap();
                let mut candidates = Vec::new();
                for i in 0..ops.len() {
                    for j in i + 1..ops.len() {
                        if ops[i].labels.iter().any(|l| ops[j].labels.contains(l)) {
                            candidates.push((i, j));
                        }
                    }
                }
                if candidates.is_empty() {
                    greedy_pick(&ops, &out_labels, dim)
                } else {
                    candidates[rng.gen_range(0..candidates.len())]
                }
            }
            Schedule::Greedy => greedy_pick(&ops, &out_labels, dim),
        };
        let keep = surviving(&ops, &[i, j], &out_labels);
        let b = ops.remove(j);
        let a = ops.remove(i);
        let t = pairwise(&a.tensor, &a.labels, Some((&b.tensor, &b.labels)), &keep, dim);
        ops.insert(i, Operand { tensor: t, labels: keep });
    }
    let last = ops.pop().unwrap();
    let result = if last.labels == out_labels {
        last.tensor
    } else {
        pairwise(&last.tensor, &last.labels, None, &out_labels, dim)
    };
    let result = result.with_variance(out_variance)?;
    if !result.all_finite() {
        return Err(Error::NonFinite);
    }
    Ok(result)
}

fn has_repeat(labels: &[usize]) -> bool {
    labels.iter().enumerate().any(|(k, l)| labels[..k].contains(l))
}

/// Labels of the merged operands `idx` that are still needed afterwards.
fn surviving<S>(ops: &[Operand<S>], idx: &[usize], out: &[usize]) -> Vec<usize> {
    let mut keep = Vec::new();
    for &i in idx {
        for &l in &ops[i].labels {
            if keep.contains(&l) {
                continue;
            }
            let outside = ops
                .iter()
                .enumerate()
                .filter(|(k, _)| !idx.contains(k))
                .any(|(_, o)| o.labels.contains(&l));
            if out.contains(&l) || outside {
                keep.push(l);
            }
        }
    }
    keep
}

fn greedy_pick<S>(ops: &[Operand<S>], out: &[usize], dim: usize) -> (usize, usize) {
    let mut best = None;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let shares = ops[i].labels.iter().any(|l| ops[j].labels.contains(l));
            let keep = surviving(ops, &[i, j], out);
            let mut all = ops[i].labels.clone();
            for &l in &ops[j].labels {
                if !all.contains(&l) {
                    all.push(l);
                }
            }
            let key = (!shares, pow(dim, keep.len()), pow(dim, all.len()));
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, (i, j)));
            }
        }
    }
    best.unwrap().1
}

/// Loop over `keep` (outer, row-major) and every other label (summed).
/// A label repeated within one operand walks its diagonal.
fn pairwise<S: Scalar>(
    a: &DenseTensor<S>,
    la: &[usize],
    b: Option<(&DenseTensor<S>, &[usize])>,
    keep: &[usize],
    dim: usize,
) -> DenseTensor<S> {
    let strides = |labels: &[usize], l: usize| -> usize {
        let r = labels.len();
        labels.iter().enumerate().filter(|(_, &x)| x == l).map(|(k, _)| pow(dim, r - 1 - k)).sum()
    };
    let lb: &[usize] = b.map_or(&[], |(_, l)| l);
    let mut summed: Vec<usize> = Vec::new();
    for &l in la.iter().chain(lb) {
        if !keep.contains(&l) && !summed.contains(&l) {
            summed.push(l);
        }
    }
    let outer_sa: Vec<usize> = keep.iter().map(|&l| strides(la, l)).collect();
    let outer_sb: Vec<usize> = keep.iter().map(|&l| strides(lb, l)).collect();
    let inner_sa: Vec<usize> = summed.iter().map(|&l| strides(la, l)).collect();
    let inner_sb: Vec<usize> = summed.iter().map(|&l| strides(lb, l)).collect();

    let offsets = |sa: &[usize], sb: &[usize]| -> Vec<(usize, usize)> {
        let n = sa.len();
        let total = pow(dim, n);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        let (mut oa, mut ob) = (0usize, 0usize);
        for _ in 0..total {
            out.push((oa, ob));
            for k in (0..n).rev() {
                idx[k] += 1;
                oa += sa[k];
                ob += sb[k];
                if idx[k] < dim {
                    break;
                }
                idx[k] = 0;
                oa -= sa[k] * dim;
                ob -= sb[k] * dim;
            }
        }
        out
    };
    let inner = offsets(&inner_sa, &inner_sb);
    let outer = offsets(&outer_sa, &outer_sb);
    let zero = a.data()[0].zero_like();
    let ad = a.data();
    let data: Vec<S> = match b {
        Some((bt, _)) => {
            let bd = bt.data();
            outer
                .iter()
                .map(|&(oa, ob)| {
                    let mut acc = zero.clone();
                    for &(ia, ib) in &inner {
                        acc.fma(1.0, &ad[oa + ia], &bd[ob + ib]);
                    }
                    acc
                })
                .collect()
        }
        None => outer
            .iter()
            .map(|&(oa, _)| {
                let mut acc = zero.clone();
                for &(ia, _) in &inner {
                    acc.add_scaled(1.0, &ad[oa + ia]);
                }
                acc
            })
            .collect(),
    };
    let variance = vec![Variance::Lower; keep.len()];
    DenseTensor::new(dim, variance, data).expect("pairwise shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(dim: usize, var: Vec<Variance>, seed: u64) -> DenseTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseTensor::from_fn(dim, var, |_| rng.gen_range(-1.0..1.0))
    }

    fn lower(n: usize) -> Vec<Variance> {
        vec![Variance::Lower; n]
    }

    #[test]
    fn matrix_product_matches_loops() {
        let a = random(4, vec![Variance::Lower, Variance::Upper], 1);
        let b = random(4, vec![Variance::Lower, Variance::Lower], 2);
        let g = DenseTensor::euclidean_metric(4);
        let spec = ContractionSpec::einsum("ab,bc->ac", &[&a, &b]).unwrap();
        let c = contract(&spec, &g, &g, Schedule::Greedy).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let want: f64 = (0..4).map(|j| a.get(&[i, j]) * b.get(&[j, k])).sum();
                assert!((c.get(&[i, k]) - want).abs() < 1e-14);
            }
        }
        assert_eq!(c.variance(), &[Variance::Lower, Variance::Lower]);
    }

    #[test]
    fn self_trace_and_free_reordering() {
        let t = random(3, vec![Variance::Upper, Variance::Lower, Variance::Lower], 3);
        let g = DenseTensor::euclidean_metric(3);
        let spec = ContractionSpec::einsum("aab", &[&t]).unwrap_err();
        let _ = spec;
        let spec = ContractionSpec::einsum("aab->b", &[&t]).unwrap();
        let tr0 = contract(&spec, &g, &g, Schedule::Greedy).unwrap();
        for b in 0..3 {
            let want: f64 = (0..3).map(|a| t.get(&[a, a, b])).sum();
            assert!((tr0.get(&[b]) - want).abs() < 1e-14);
        }
        let spec = ContractionSpec::einsum("abb->a", &[&t]).unwrap();
        let tr = contract(&spec, &g, &g, Schedule::Greedy).unwrap();
        for a in 0..3 {
            let want: f64 = (0..3).map(|b| t.get(&[a, b, b])).sum();
            assert!((tr.get(&[a]) - want).abs() < 1e-14);
        }
        let spec = ContractionSpec::einsum("abc->cab", &[&t]).unwrap();
        let p = contract(&spec, &g, &g, Schedule::Greedy).unwrap();
        assert_eq!(p, t.permute_slots(&[2, 0, 1]).unwrap());
    }

    #[test]
    fn metric_inserted_for_lower_pairs() {
        let mut g = DenseTensor::euclidean_metric(3);
        g.set(&[0, 0], 4.0);
        let gi = g.inverse().unwrap();
        let v = random(3, lower(1), 4);
        let spec = ContractionSpec::einsum("a,a", &[&v, &v]).unwrap();
        let s = contract(&spec, &g, &gi, Schedule::Greedy).unwrap();
        let want = v.get(&[0]).powi(2) / 4.0 + v.get(&[1]).powi(2) + v.get(&[2]).powi(2);
        assert!((s.data()[0] - want).abs() < 1e-14);
    }

    #[test]
    fn slot_errors() {
        let t = random(3, lower(2), 5);
        let g = DenseTensor::euclidean_metric(3);
        let spec = ContractionSpec {
            factors: vec![&t],
            pairings: vec![(SlotRef::new(0, 0), SlotRef::new(0, 0))],
            free: vec![SlotRef::new(0, 1)],
        };
        assert_eq!(contract(&spec, &g, &g, Schedule::Greedy), Err(Error::SlotReuse { factor: 0, slot: 0 }));
        let spec = ContractionSpec { factors: vec![&t], pairings: vec![], free: vec![SlotRef::new(0, 5)] };
        assert!(matches!(contract(&spec, &g, &g, Schedule::Greedy), Err(Error::SlotOutOfRange { .. })));
    }

    #[test]
    fn schedules_agree() {
        let dim = 4;
        let w: Vec<DenseTensor> = (0..4).map(|s| random(dim, lower(4), 10 + s)).collect();
        let g = DenseTensor::euclidean_metric(dim);
        let spec = ContractionSpec::einsum("abcd,cdef,efgh,ghab", &[&w[0], &w[1], &w[2], &w[3]]).unwrap();
        let reference = contract(&spec, &g, &g, Schedule::Sequential).unwrap().data()[0];
        let greedy = contract(&spec, &g, &g, Schedule::Greedy).unwrap().data()[0];
        assert!((reference - greedy).abs() < 1e-10 * reference.abs().max(1.0));
        for seed in 0..5 {
            let r = contract(&spec, &g, &g, Schedule::Random(seed)).unwrap().data()[0];
            assert!((reference - r).abs() < 1e-10 * reference.abs().max(1.0));
        }
    }
}

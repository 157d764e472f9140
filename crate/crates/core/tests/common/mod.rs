use itertools::Itertools;
use pecurv_core::DenseTensor;

pub fn sign(p: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Oracle: `(1/(4^ℓ ℓ!)) Σ_{a distinct} Σ_{σ} sgn(σ) Π T_{a a}{}^{σa σa}` with a
/// Euclidean metric, written without the Kronecker-delta helper.
pub fn pf_oracle(t: &DenseTensor, ell: usize) -> f64 {
    let n = t.dim();
    let k = 2 * ell;
    let mut total = 0.0;
    for a in (0..n).permutations(k) {
        for sigma in (0..k).permutations(k) {
            let mut prod = sign(&sigma);
            for i in 0..ell {
                prod *= t.get(&[a[2 * i], a[2 * i + 1], a[sigma[2 * i]], a[sigma[2 * i + 1]]]);
            }
            total += prod;
        }
    }
    let norm = 4f64.powi(ell as i32) * (1..=ell).map(|i| i as f64).product::<f64>();
    total / norm
}

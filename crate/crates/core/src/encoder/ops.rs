//! Forward/backward primitives shared by the encoder and its heads.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::params::{LayerNormParams, LinearParams};

pub const LN_EPS: f64 = 1e-12;

pub fn linear(x: &Array2<f64>, p: &LinearParams) -> Array2<f64> {
    x.dot(&p.w) + &p.b
}

/// Accumulates dW, db into `gp` and returns dx.
pub fn linear_bwd(
    x: &Array2<f64>,
    p: &LinearParams,
    dy: &Array2<f64>,
    gp: &mut LinearParams,
) -> Array2<f64> {
    gp.w += &x.t().dot(dy);
    gp.b += &dy.sum_axis(Axis(0));
    dy.dot(&p.w.t())
}

pub struct LnCache {
    /// Normalized input before gain/bias.
    pub xhat: Array2<f64>,
    /// 1 / sqrt(var + eps) per row.
    pub inv_std: Array1<f64>,
}

/// Row-wise layer norm over the last dimension.
pub fn layer_norm(x: &Array2<f64>, p: &LayerNormParams) -> (Array2<f64>, LnCache) {
    let d = x.ncols() as f64;
    let mean = x.mean_axis(Axis(1)).unwrap();
    let mut xhat = x.clone();
    for (mut row, &m) in xhat.rows_mut().into_iter().zip(mean.iter()) {
        row -= m;
    }
    let var = xhat.mapv(|v| v * v).sum_axis(Axis(1)) / d;
    let inv_std = var.mapv(|v| 1.0 / (v + LN_EPS).sqrt());
    for (mut row, &s) in xhat.rows_mut().into_iter().zip(inv_std.iter()) {
        row *= s;
    }
    let mut y = xhat.clone();
    y *= &p.g;
    y += &p.b;
    (y, LnCache { xhat, inv_std })
}

pub fn layer_norm_bwd(
    cache: &LnCache,
    p: &LayerNormParams,
    dy: &Array2<f64>,
    gp: &mut LayerNormParams,
) -> Array2<f64> {
    gp.g += &(dy * &cache.xhat).sum_axis(Axis(0));
    gp.b += &dy.sum_axis(Axis(0));
    let d = dy.ncols() as f64;
    let dxhat = dy * &p.g;
    let m1 = dxhat.sum_axis(Axis(1)) / d;
    let m2 = (&dxhat * &cache.xhat).sum_axis(Axis(1)) / d;
    let mut dx = dxhat;
    for ((mut row, xr), (&a, &b)) in dx
        .rows_mut()
        .into_iter()
        .zip(cache.xhat.rows())
        .zip(m1.iter().zip(m2.iter()))
    {
        for (v, &xh) in row.iter_mut().zip(xr.iter()) {
            *v = *v - a - xh * b;
        }
    }
    for (mut row, &s) in dx.rows_mut().into_iter().zip(cache.inv_std.iter()) {
        row *= s;
    }
    dx
}

const GELU_C: f64 = 0.7978845608028654; // sqrt(2/pi)
const GELU_A: f64 = 0.044715;

/// Tanh-form GELU, the convention BERT ships with.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

pub fn gelu_prime(x: f64) -> f64 {
    let u = GELU_C * (x + GELU_A * x * x * x);
    let t = u.tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}

pub fn relu_inplace(x: &mut Array2<f64>) {
    x.mapv_inplace(|v| v.max(0.0));
}

/// Row-wise softmax with max subtraction; rows may contain the attention
/// mask's large negative sentinel.
pub fn softmax_rows(x: &mut Array2<f64>) {
    for mut row in x.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.mapv_inplace(|v| v / sum);
    }
}

/// Softmax over a vector of logits; returns probabilities.
pub fn softmax_vec(z: &Array1<f64>) -> Array1<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut e = z.mapv(|v| (v - max).exp());
    let sum = e.sum();
    e.mapv_inplace(|v| v / sum);
    e
}

/// Cross-entropy of one logit vector against a class index, with the gradient
/// `softmax - onehot`.
pub fn cross_entropy_with_grad(z: &Array1<f64>, target: usize) -> (f64, Array1<f64>) {
    let probs = softmax_vec(z);
    let loss = -probs[target].max(f64::MIN_POSITIVE).ln();
    let mut dz = probs;
    dz[target] -= 1.0;
    (loss, dz)
}

/// Inverted-dropout mask with values 0 or 1/(1-rate).
pub fn dropout_mask(rng: &mut ChaCha8Rng, shape: (usize, usize), rate: f64) -> Array2<f64> {
    let keep = 1.0 - rate;
    Array2::from_shape_simple_fn(shape, || {
        if rng.gen_bool(keep) {
            1.0 / keep
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;

    #[test]
    fn layer_norm_rows_are_standardized() {
        let p = LayerNormParams {
            g: Array1::ones(4),
            b: Array1::zeros(4),
        };
        let x = array![[1.0, 2.0, 3.0, 4.0], [-3.0, 0.0, 5.0, 9.0]];
        let (y, _) = layer_norm(&x, &p);
        for row in y.rows() {
            assert!(row.mean().unwrap().abs() < 1e-9);
            let var = row.mapv(|v| v * v).mean().unwrap();
            assert!((var - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn layer_norm_backward_matches_finite_differences() {
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = LayerNormParams {
            g: Array1::from_shape_simple_fn(5, || 1.0 + 0.1 * rng.gen::<f64>()),
            b: Array1::from_shape_simple_fn(5, || 0.1 * rng.gen::<f64>()),
        };
        let x = Array2::from_shape_simple_fn((3, 5), || rng.gen::<f64>() * 2.0 - 1.0);
        let w = Array2::from_shape_simple_fn((3, 5), || rng.gen::<f64>());
        // scalar objective: sum(w * ln(x))
        let (y, cache) = layer_norm(&x, &p);
        let _ = y;
        let mut gp = LayerNormParams {
            g: Array1::zeros(5),
            b: Array1::zeros(5),
        };
        let dx = layer_norm_bwd(&cache, &p, &w, &mut gp);
        let h = 1e-6;
        for i in 0..3 {
            for j in 0..5 {
                let mut xp = x.clone();
                xp[[i, j]] += h;
                let mut xm = x.clone();
                xm[[i, j]] -= h;
                let fp = (layer_norm(&xp, &p).0 * &w).sum();
                let fm = (layer_norm(&xm, &p).0 * &w).sum();
                let num = (fp - fm) / (2.0 * h);
                assert!((dx[[i, j]] - num).abs() < 1e-6, "dx mismatch at {},{}", i, j);
            }
        }
    }

    #[test]
    fn gelu_prime_matches_finite_differences() {
        let h = 1e-6;
        for &x in &[-3.0, -1.0, -0.1, 0.0, 0.1, 1.0, 3.0] {
            let num = (gelu(x + h) - gelu(x - h)) / (2.0 * h);
            assert!((gelu_prime(x) - num).abs() < 1e-8, "at x={}", x);
        }
    }

    #[test]
    fn softmax_handles_masked_rows() {
        let mut x = array![[0.5, -1e30, 1.0]];
        softmax_rows(&mut x);
        assert_eq!(x[[0, 1]], 0.0);
        assert!((x.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_of_uniform_logits_is_ln_c() {
        for c in [2usize, 3, 12] {
            let z = Array1::zeros(c);
            let (loss, _) = cross_entropy_with_grad(&z, 0);
            assert!((loss - (c as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_entropy_is_shift_invariant() {
        let z = array![0.3, -1.2, 2.0, 0.7];
        let (l1, _) = cross_entropy_with_grad(&z, 2);
        let (l2, _) = cross_entropy_with_grad(&z.mapv(|v| v + 123.456), 2);
        assert!((l1 - l2).abs() < 1e-8);
    }
}

//! Parameter containers. Every learnable array has a stable name and a fixed
//! enumeration order; the optimizer, the checkpoint format and the gradient
//! checker all walk the same list.

use ndarray::{Array1, Array2, ArrayViewD, ArrayViewMutD};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::EncoderConfig;

const INIT_STD: f64 = 0.02;

/// Affine map `y = x W + b` with `W: [in, out]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl LinearParams {
    fn zeros(inp: usize, out: usize) -> Self {
        LinearParams {
            w: Array2::zeros((inp, out)),
            b: Array1::zeros(out),
        }
    }

    fn init(rng: &mut ChaCha8Rng, inp: usize, out: usize) -> Self {
        LinearParams {
            w: random_normal2(rng, inp, out),
            b: Array1::zeros(out),
        }
    }

    fn views<'a>(&'a self, prefix: &str, out: &mut Vec<(String, ArrayViewD<'a, f64>)>) {
        out.push((format!("{prefix}.w"), self.w.view().into_dyn()));
        out.push((format!("{prefix}.b"), self.b.view().into_dyn()));
    }

    fn views_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, ArrayViewMutD<'a, f64>)>) {
        out.push((format!("{prefix}.w"), self.w.view_mut().into_dyn()));
        out.push((format!("{prefix}.b"), self.b.view_mut().into_dyn()));
    }
}

/// Gain/bias of a layer norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormParams {
    pub g: Array1<f64>,
    pub b: Array1<f64>,
}

impl LayerNormParams {
    fn zeros(dim: usize) -> Self {
        LayerNormParams {
            g: Array1::zeros(dim),
            b: Array1::zeros(dim),
        }
    }

    fn init(dim: usize) -> Self {
        LayerNormParams {
            g: Array1::ones(dim),
            b: Array1::zeros(dim),
        }
    }

    fn views<'a>(&'a self, prefix: &str, out: &mut Vec<(String, ArrayViewD<'a, f64>)>) {
        out.push((format!("{prefix}.g"), self.g.view().into_dyn()));
        out.push((format!("{prefix}.b"), self.b.view().into_dyn()));
    }

    fn views_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, ArrayViewMutD<'a, f64>)>) {
        out.push((format!("{prefix}.g"), self.g.view_mut().into_dyn()));
        out.push((format!("{prefix}.b"), self.b.view_mut().into_dyn()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub q: LinearParams,
    pub k: LinearParams,
    pub v: LinearParams,
    pub o: LinearParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub attn: AttentionParams,
    pub ln1: LayerNormParams,
    pub ffn1: LinearParams,
    pub ffn2: LinearParams,
    pub ln2: LayerNormParams,
}

impl LayerParams {
    fn zeros(cfg: &EncoderConfig) -> Self {
        let h = cfg.hidden;
        LayerParams {
            attn: AttentionParams {
                q: LinearParams::zeros(h, h),
                k: LinearParams::zeros(h, h),
                v: LinearParams::zeros(h, h),
                o: LinearParams::zeros(h, h),
            },
            ln1: LayerNormParams::zeros(h),
            ffn1: LinearParams::zeros(h, cfg.ffn_dim),
            ffn2: LinearParams::zeros(cfg.ffn_dim, h),
            ln2: LayerNormParams::zeros(h),
        }
    }

    fn init(rng: &mut ChaCha8Rng, cfg: &EncoderConfig) -> Self {
        let h = cfg.hidden;
        LayerParams {
            attn: AttentionParams {
                q: LinearParams::init(rng, h, h),
                k: LinearParams::init(rng, h, h),
                v: LinearParams::init(rng, h, h),
                o: LinearParams::init(rng, h, h),
            },
            ln1: LayerNormParams::init(h),
            ffn1: LinearParams::init(rng, h, cfg.ffn_dim),
            ffn2: LinearParams::init(rng, cfg.ffn_dim, h),
            ln2: LayerNormParams::init(h),
        }
    }

    fn views<'a>(&'a self, prefix: &str, out: &mut Vec<(String, ArrayViewD<'a, f64>)>) {
        self.attn.q.views(&format!("{prefix}.attn.q"), out);
        self.attn.k.views(&format!("{prefix}.attn.k"), out);
        self.attn.v.views(&format!("{prefix}.attn.v"), out);
        self.attn.o.views(&format!("{prefix}.attn.o"), out);
        self.ln1.views(&format!("{prefix}.ln1"), out);
        self.ffn1.views(&format!("{prefix}.ffn1"), out);
        self.ffn2.views(&format!("{prefix}.ffn2"), out);
        self.ln2.views(&format!("{prefix}.ln2"), out);
    }

    fn views_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, ArrayViewMutD<'a, f64>)>) {
        self.attn.q.views_mut(&format!("{prefix}.attn.q"), out);
        self.attn.k.views_mut(&format!("{prefix}.attn.k"), out);
        self.attn.v.views_mut(&format!("{prefix}.attn.v"), out);
        self.attn.o.views_mut(&format!("{prefix}.attn.o"), out);
        self.ln1.views_mut(&format!("{prefix}.ln1"), out);
        self.ffn1.views_mut(&format!("{prefix}.ffn1"), out);
        self.ffn2.views_mut(&format!("{prefix}.ffn2"), out);
        self.ln2.views_mut(&format!("{prefix}.ln2"), out);
    }
}

/// MLM output head: affine + GELU + layer norm, projection tied to the token
/// embeddings plus a per-token bias.
#[derive(Debug, Clone, PartialEq)]
pub struct MlmHeadParams {
    pub transform: LinearParams,
    pub ln: LayerNormParams,
    pub out_bias: Array1<f64>,
}

/// Four affine layers with ReLU between; widths `[2H, H, H, H/2, classes]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpHeadParams {
    pub l1: LinearParams,
    pub l2: LinearParams,
    pub l3: LinearParams,
    pub l4: LinearParams,
}

impl MlpHeadParams {
    fn zeros(hidden: usize, classes: usize) -> Self {
        MlpHeadParams {
            l1: LinearParams::zeros(2 * hidden, hidden),
            l2: LinearParams::zeros(hidden, hidden),
            l3: LinearParams::zeros(hidden, hidden / 2),
            l4: LinearParams::zeros(hidden / 2, classes),
        }
    }

    fn init(rng: &mut ChaCha8Rng, hidden: usize, classes: usize) -> Self {
        MlpHeadParams {
            l1: LinearParams::init(rng, 2 * hidden, hidden),
            l2: LinearParams::init(rng, hidden, hidden),
            l3: LinearParams::init(rng, hidden, hidden / 2),
            l4: LinearParams::init(rng, hidden / 2, classes),
        }
    }

    fn views<'a>(&'a self, prefix: &str, out: &mut Vec<(String, ArrayViewD<'a, f64>)>) {
        self.l1.views(&format!("{prefix}.l1"), out);
        self.l2.views(&format!("{prefix}.l2"), out);
        self.l3.views(&format!("{prefix}.l3"), out);
        self.l4.views(&format!("{prefix}.l4"), out);
    }

    fn views_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, ArrayViewMutD<'a, f64>)>) {
        self.l1.views_mut(&format!("{prefix}.l1"), out);
        self.l2.views_mut(&format!("{prefix}.l2"), out);
        self.l3.views_mut(&format!("{prefix}.l3"), out);
        self.l4.views_mut(&format!("{prefix}.l4"), out);
    }
}

/// All learnable arrays of the encoder and its heads. Gradients use the same
/// container, zero-initialized.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub token_emb: Array2<f64>,
    pub pos_emb: Array2<f64>,
    pub emb_ln: LayerNormParams,
    pub layers: Vec<LayerParams>,
    pub mlm: MlmHeadParams,
    pub dsp: MlpHeadParams,
    pub dsp3: MlpHeadParams,
    pub drp: MlpHeadParams,
    pub finetune: LinearParams,
}

fn random_normal2(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || sample_normal(rng) * INIT_STD)
}

/// Box-Muller standard normal; rand_distr stays out of the dependency tree.
fn sample_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

impl EncoderParams {
    /// Weights ~ N(0, 0.02), biases 0, layer-norm gain 1; deterministic per seed.
    pub fn init(cfg: &EncoderConfig, rng_seed: u64) -> EncoderParams {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let h = cfg.hidden;
        EncoderParams {
            token_emb: random_normal2(&mut rng, cfg.vocab_size, h),
            pos_emb: random_normal2(&mut rng, cfg.max_len, h),
            emb_ln: LayerNormParams::init(h),
            layers: (0..cfg.layers).map(|_| LayerParams::init(&mut rng, cfg)).collect(),
            mlm: MlmHeadParams {
                transform: LinearParams::init(&mut rng, h, h),
                ln: LayerNormParams::init(h),
                out_bias: Array1::zeros(cfg.vocab_size),
            },
            dsp: MlpHeadParams::init(&mut rng, h, cfg.head_classes.dsp),
            dsp3: MlpHeadParams::init(&mut rng, h, cfg.head_classes.dsp3),
            drp: MlpHeadParams::init(&mut rng, h, cfg.head_classes.drp),
            finetune: LinearParams::init(&mut rng, h, cfg.head_classes.finetune),
        }
    }

    /// Zero arrays of the same shapes, for gradient accumulation.
    pub fn zeros(cfg: &EncoderConfig) -> EncoderParams {
        let h = cfg.hidden;
        EncoderParams {
            token_emb: Array2::zeros((cfg.vocab_size, h)),
            pos_emb: Array2::zeros((cfg.max_len, h)),
            emb_ln: LayerNormParams::zeros(h),
            layers: (0..cfg.layers).map(|_| LayerParams::zeros(cfg)).collect(),
            mlm: MlmHeadParams {
                transform: LinearParams::zeros(h, h),
                ln: LayerNormParams::zeros(h),
                out_bias: Array1::zeros(cfg.vocab_size),
            },
            dsp: MlpHeadParams::zeros(h, cfg.head_classes.dsp),
            dsp3: MlpHeadParams::zeros(h, cfg.head_classes.dsp3),
            drp: MlpHeadParams::zeros(h, cfg.head_classes.drp),
            finetune: LinearParams::zeros(h, cfg.head_classes.finetune),
        }
    }

    /// Named views of every array, in the canonical order.
    pub fn flat_views(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        let mut out = Vec::new();
        out.push(("emb.tok".to_string(), self.token_emb.view().into_dyn()));
        out.push(("emb.pos".to_string(), self.pos_emb.view().into_dyn()));
        self.emb_ln.views("emb.ln", &mut out);
        for (i, layer) in self.layers.iter().enumerate() {
            layer.views(&format!("layer{i}"), &mut out);
        }
        self.mlm.transform.views("mlm.transform", &mut out);
        self.mlm.ln.views("mlm.ln", &mut out);
        out.push(("mlm.out_bias".to_string(), self.mlm.out_bias.view().into_dyn()));
        self.dsp.views("head.dsp", &mut out);
        self.dsp3.views("head.dsp3", &mut out);
        self.drp.views("head.drp", &mut out);
        self.finetune.views("finetune", &mut out);
        out
    }

    /// Mutable counterpart of [`flat_views`](Self::flat_views), same order.
    pub fn flat_views_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        let mut out = Vec::new();
        out.push(("emb.tok".to_string(), self.token_emb.view_mut().into_dyn()));
        out.push(("emb.pos".to_string(), self.pos_emb.view_mut().into_dyn()));
        self.emb_ln.views_mut("emb.ln", &mut out);
        for (i, layer) in self.layers.iter_mut().enumerate() {
            layer.views_mut(&format!("layer{i}"), &mut out);
        }
        self.mlm.transform.views_mut("mlm.transform", &mut out);
        self.mlm.ln.views_mut("mlm.ln", &mut out);
        out.push(("mlm.out_bias".to_string(), self.mlm.out_bias.view_mut().into_dyn()));
        self.dsp.views_mut("head.dsp", &mut out);
        self.dsp3.views_mut("head.dsp3", &mut out);
        self.drp.views_mut("head.drp", &mut out);
        self.finetune.views_mut("finetune", &mut out);
        out
    }

    /// Total scalar count, for reporting.
    pub fn param_count(&self) -> usize {
        self.flat_views().iter().map(|(_, v)| v.len()).sum()
    }

    /// First non-finite array name, if any.
    pub fn find_non_finite(&self) -> Option<String> {
        self.flat_views()
            .into_iter()
            .find(|(_, v)| v.iter().any(|x| !x.is_finite()))
            .map(|(name, _)| name)
    }
}

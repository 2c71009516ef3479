use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelConfig;
use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};

/// `x W + b` on row vectors; `weight` is `in×out`, `bias` is `1×out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine<T = Tensor> {
    pub weight: T,
    pub bias: T,
}

/// One attention layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerParams<T = Tensor> {
    /// Per-modality node transform, `d_emb×d_emb`, no bias.
    pub transform: Vec<T>,
    /// Per head, a `2·d_head × slots` matrix. Column `t` is the attention
    /// vector of edge-type slot `t`: target half first, then source half.
    pub attention: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadParams<T = Tensor> {
    pub hidden: Option<Affine<T>>,
    pub out: Affine<T>,
}

/// All trainable tensors. `T` is [`Tensor`] for stored parameters and
/// [`Var`] once they are registered on a tape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T = Tensor> {
    /// Input projection per modality (audio, video, text).
    pub ffn: Vec<Affine<T>>,
    pub layers: Vec<LayerParams<T>>,
    pub head: HeadParams<T>,
}

impl<T> ModelParams<T> {
    /// Every leaf in canonical order, paired with a readable name.
    pub fn named(&self) -> Vec<(String, &T)> {
        let mut out = Vec::new();
        for (m, a) in self.ffn.iter().enumerate() {
            out.push((format!("ffn.{m}.weight"), &a.weight));
            out.push((format!("ffn.{m}.bias"), &a.bias));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            for (m, t) in layer.transform.iter().enumerate() {
                out.push((format!("layer.{l}.transform.{m}"), t));
            }
            for (h, a) in layer.attention.iter().enumerate() {
                out.push((format!("layer.{l}.attention.{h}"), a));
            }
        }
        if let Some(h) = &self.head.hidden {
            out.push(("head.hidden.weight".into(), &h.weight));
            out.push(("head.hidden.bias".into(), &h.bias));
        }
        out.push(("head.out.weight".into(), &self.head.out.weight));
        out.push(("head.out.bias".into(), &self.head.out.bias));
        out
    }

    pub fn leaves(&self) -> Vec<&T> {
        self.named().into_iter().map(|(_, t)| t).collect()
    }

    /// Structure-preserving map over every leaf, in canonical order.
    pub fn try_map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<ModelParams<U>> {
        fn affine<T, U>(a: &Affine<T>, f: &mut impl FnMut(&T) -> Result<U>) -> Result<Affine<U>> {
            Ok(Affine {
                weight: f(&a.weight)?,
                bias: f(&a.bias)?,
            })
        }
        let ffn = self.ffn.iter().map(|a| affine(a, &mut f)).collect::<Result<Vec<_>>>()?;
        let mut layers = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            layers.push(LayerParams {
                transform: layer.transform.iter().map(&mut f).collect::<Result<_>>()?,
                attention: layer.attention.iter().map(&mut f).collect::<Result<_>>()?,
            });
        }
        let head = HeadParams {
            hidden: self.head.hidden.as_ref().map(|a| affine(a, &mut f)).transpose()?,
            out: affine(&self.head.out, &mut f)?,
        };
        Ok(ModelParams { ffn, layers, head })
    }

    /// Same structure with leaves taken from `values`, in canonical order.
    pub fn with_leaves<U: Clone>(&self, values: &[U]) -> Result<ModelParams<U>> {
        let expected = self.leaves().len();
        if values.len() != expected {
            return Err(Error::shape(
                "with_leaves",
                format!("expected {expected} leaves, got {}", values.len()),
            ));
        }
        let mut it = values.iter().cloned();
        self.try_map(|_| Ok(it.next().expect("length checked")))
    }
}

impl ModelParams<Tensor> {
    /// Registers every tensor as a tracked leaf.
    pub fn register(&self, tape: &mut Tape) -> Result<ModelParams<Var>> {
        self.try_map(|t| tape.param(t.clone()))
    }

    pub fn scalar_count(&self) -> usize {
        self.leaves().iter().map(|t| t.len()).sum()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::new();
        for a in &mut self.ffn {
            out.push(&mut a.weight);
            out.push(&mut a.bias);
        }
        for layer in &mut self.layers {
            out.extend(layer.transform.iter_mut());
            out.extend(layer.attention.iter_mut());
        }
        if let Some(h) = &mut self.head.hidden {
            out.push(&mut h.weight);
            out.push(&mut h.bias);
        }
        out.push(&mut self.head.out.weight);
        out.push(&mut self.head.out.bias);
        out
    }

    /// Checks that the stored shapes are the ones `config` implies.
    pub fn check_shapes(&self, config: &ModelConfig) -> Result<()> {
        let expected = ModelParams::init(config, 0)?;
        let a: Vec<_> = self.named().into_iter().map(|(n, t)| (n, t.shape())).collect();
        let b: Vec<_> = expected.named().into_iter().map(|(n, t)| (n, t.shape())).collect();
        if a != b {
            return Err(Error::InvalidConfig(
                "parameter shapes do not match the model configuration".into(),
            ));
        }
        if self.leaves().iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("parameters"));
        }
        Ok(())
    }

    /// Uniform `(-s, s)` init with `s = sqrt(6 / (fan_in + fan_out))`;
    /// attention vectors use fans `2·d_head` and 1. Biases start at zero.
    pub fn init(config: &ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = config.d_emb;
        let dh = config.head_dim();
        let slots = config.edge_type_mode.type_count();

        let mut uniform = |rows: usize, cols: usize, fan_in: usize, fan_out: usize| {
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let data = (0..rows * cols).map(|_| rng.random_range(-s..s)).collect();
            Tensor::new(rows, cols, data).expect("shape")
        };

        let ffn = config
            .input_dims
            .iter()
            .map(|&din| Affine {
                weight: uniform(din, d, din, d),
                bias: Tensor::zeros(1, d),
            })
            .collect();
        let layers = (0..config.layers)
            .map(|_| LayerParams {
                transform: (0..3).map(|_| uniform(d, d, d, d)).collect(),
                attention: (0..config.heads)
                    .map(|_| uniform(2 * dh, slots, 2 * dh, 1))
                    .collect(),
            })
            .collect();
        let out_dim = config.output_dim();
        let head = if config.head_hidden > 0 {
            let h = config.head_hidden;
            HeadParams {
                hidden: Some(Affine {
                    weight: uniform(d, h, d, h),
                    bias: Tensor::zeros(1, h),
                }),
                out: Affine {
                    weight: uniform(h, out_dim, h, out_dim),
                    bias: Tensor::zeros(1, out_dim),
                },
            }
        } else {
            HeadParams {
                hidden: None,
                out: Affine {
                    weight: uniform(d, out_dim, d, out_dim),
                    bias: Tensor::zeros(1, out_dim),
                },
            }
        };
        Ok(ModelParams { ffn, layers, head })
    }
}

/// Closed-form parameter count, split by block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamBreakdown {
    /// Input projections, weights plus biases.
    pub ffn: usize,
    /// Per-modality node transforms over all layers.
    pub transforms: usize,
    /// Edge-type attention vectors over all layers.
    pub attention: usize,
    pub head: usize,
    pub total: usize,
}

pub fn param_count(config: &ModelConfig) -> ParamBreakdown {
    let d = config.d_emb;
    let ffn: usize = config.input_dims.iter().map(|din| din * d + d).sum();
    let transforms = config.layers * 3 * d * d;
    let attention = config.layers
        * config.edge_type_mode.type_count()
        * config.heads
        * 2
        * (d / config.heads.max(1));
    let out = config.output_dim();
    let head = if config.head_hidden > 0 {
        let h = config.head_hidden;
        d * h + h + h * out + out
    } else {
        d * out + out
    };
    ParamBreakdown {
        ffn,
        transforms,
        attention,
        head,
        total: ffn + transforms + attention + head,
    }
}

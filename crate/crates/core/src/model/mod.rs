//! The pointer-generator network: bidirectional LSTM encoder, additive
//! attention with optional coverage, a two-layer output projection, the
//! generation probability and the copy/generate mixture over the extended
//! vocabulary. Forward and backward passes are written by hand and verified
//! against central finite differences.

pub mod attention;
pub mod encoder;
pub mod lstm;
pub mod sequence;
pub mod steps;

pub use attention::attention_step;
pub use encoder::{encode_source, EncoderOutput};
pub use lstm::{LstmState, LstmWeights};
pub use sequence::{sequence_grad, sequence_loss, LossBreakdown};
pub use steps::{
    coverage_update, final_distribution, generation_probability, step_loss, vocab_distribution,
    StepPrediction,
};

use ndarray::{Array1, Array2, ArrayViewD, ArrayViewMutD};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{flt, Scalar};

/// Architecture and loss hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub embedding_dim: usize,
    /// LSTM cell size per direction.
    pub hidden_dim: usize,
    pub vocab_size: usize,
    pub coverage_enabled: bool,
    /// Coverage-loss weight; applied only while coverage is enabled.
    pub coverage_weight: f64,
    pub max_source_len: usize,
    pub max_target_len: usize,
}

impl Hyperparams {
    /// Published configuration: embeddings 128, cell size 256, vocabulary
    /// capped at 50K, targets capped at 100 tokens.
    pub fn paper(vocab_size: usize, max_source_len: usize, coverage_enabled: bool) -> Self {
        Hyperparams {
            embedding_dim: 128,
            hidden_dim: 256,
            vocab_size,
            coverage_enabled,
            coverage_weight: 1.0,
            max_source_len,
            max_target_len: 100,
        }
    }

    /// Attention feature size (the tanh layer width).
    pub fn attention_dim(&self) -> usize {
        2 * self.hidden_dim
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("embedding_dim", self.embedding_dim),
            ("hidden_dim", self.hidden_dim),
            ("vocab_size", self.vocab_size),
            ("max_source_len", self.max_source_len),
            ("max_target_len", self.max_target_len),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(crate::CoreError::InvalidConfig(format!(
                    "{name} must be positive"
                )));
            }
        }
        if self.vocab_size > 50_000 {
            return Err(crate::CoreError::InvalidConfig(
                "vocab_size exceeds the 50K cap".into(),
            ));
        }
        if self.coverage_weight < 0.0 {
            return Err(crate::CoreError::InvalidConfig(
                "coverage_weight must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Coverage-loss weight in effect: zero whenever coverage is disabled.
    pub fn effective_coverage_weight<F: Scalar>(&self) -> F {
        if self.coverage_enabled {
            flt(self.coverage_weight)
        } else {
            F::zero()
        }
    }

    /// With the coverage feature off, the network is the plain
    /// pointer-generator.
    pub fn without_coverage(&self) -> Self {
        Hyperparams {
            coverage_enabled: false,
            ..self.clone()
        }
    }
}

/// Weight + bias of one affine layer, stored as (out_dim, in_dim).
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<F> {
    pub weight: Array2<F>,
    pub bias: Array1<F>,
}

impl<F: Scalar> Affine<F> {
    fn zeros(out_dim: usize, in_dim: usize) -> Self {
        Affine {
            weight: Array2::zeros((out_dim, in_dim)),
            bias: Array1::zeros(out_dim),
        }
    }

    pub fn apply(&self, x: &Array1<F>) -> Array1<F> {
        self.weight.dot(x) + &self.bias
    }
}

/// All trainable tensors. The coverage weight vector exists only when the
/// coverage mechanism is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<F> {
    /// (vocab_size, embedding_dim); shared by encoder and decoder inputs.
    pub embedding: Array2<F>,
    pub encoder_fw: LstmWeights<F>,
    pub encoder_bw: LstmWeights<F>,
    /// Affine reduction of the concatenated final bidirectional hidden
    /// states to the initial decoder hidden state.
    pub reduce_h: Affine<F>,
    /// Same reduction for the cell state.
    pub reduce_c: Affine<F>,
    pub decoder: LstmWeights<F>,
    /// W_h: (attention_dim, 2*hidden).
    pub attn_enc: Array2<F>,
    /// W_s: (attention_dim, hidden).
    pub attn_dec: Array2<F>,
    pub attn_bias: Array1<F>,
    /// Score vector v: (attention_dim).
    pub attn_score: Array1<F>,
    /// Coverage feature weight w_c: (attention_dim).
    pub attn_coverage: Option<Array1<F>>,
    /// First output projection: [s_t; h*_t] -> hidden.
    pub out_hidden: Affine<F>,
    /// Second output projection: hidden -> vocab logits.
    pub out_vocab: Affine<F>,
    /// p_gen weights over context, decoder state, decoder input embedding.
    pub pgen_context: Array1<F>,
    pub pgen_state: Array1<F>,
    pub pgen_input: Array1<F>,
    /// Scalar bias stored as a length-1 tensor so it participates in the
    /// uniform parameter-group machinery.
    pub pgen_bias: Array1<F>,
}

impl<F: Scalar> Parameters<F> {
    /// All tensors zero; shapes from `hp`.
    pub fn zeros(hp: &Hyperparams) -> Self {
        let e = hp.embedding_dim;
        let h = hp.hidden_dim;
        let a = hp.attention_dim();
        let v = hp.vocab_size;
        Parameters {
            embedding: Array2::zeros((v, e)),
            encoder_fw: LstmWeights::zeros(e, h),
            encoder_bw: LstmWeights::zeros(e, h),
            reduce_h: Affine::zeros(h, 2 * h),
            reduce_c: Affine::zeros(h, 2 * h),
            decoder: LstmWeights::zeros(e, h),
            attn_enc: Array2::zeros((a, 2 * h)),
            attn_dec: Array2::zeros((a, h)),
            attn_bias: Array1::zeros(a),
            attn_score: Array1::zeros(a),
            attn_coverage: hp.coverage_enabled.then(|| Array1::zeros(a)),
            out_hidden: Affine::zeros(h, 3 * h),
            out_vocab: Affine::zeros(v, h),
            pgen_context: Array1::zeros(2 * h),
            pgen_state: Array1::zeros(h),
            pgen_input: Array1::zeros(e),
            pgen_bias: Array1::zeros(1),
        }
    }

    /// Visits every tensor with its group name, in a fixed order.
    pub fn visit(&self, f: &mut dyn FnMut(&str, ArrayViewD<'_, F>)) {
        f("embedding", self.embedding.view().into_dyn());
        self.encoder_fw.visit("encoder_fw", f);
        self.encoder_bw.visit("encoder_bw", f);
        f("reduce_h.weight", self.reduce_h.weight.view().into_dyn());
        f("reduce_h.bias", self.reduce_h.bias.view().into_dyn());
        f("reduce_c.weight", self.reduce_c.weight.view().into_dyn());
        f("reduce_c.bias", self.reduce_c.bias.view().into_dyn());
        self.decoder.visit("decoder", f);
        f("attn_enc", self.attn_enc.view().into_dyn());
        f("attn_dec", self.attn_dec.view().into_dyn());
        f("attn_bias", self.attn_bias.view().into_dyn());
        f("attn_score", self.attn_score.view().into_dyn());
        if let Some(wc) = &self.attn_coverage {
            f("attn_coverage", wc.view().into_dyn());
        }
        f("out_hidden.weight", self.out_hidden.weight.view().into_dyn());
        f("out_hidden.bias", self.out_hidden.bias.view().into_dyn());
        f("out_vocab.weight", self.out_vocab.weight.view().into_dyn());
        f("out_vocab.bias", self.out_vocab.bias.view().into_dyn());
        f("pgen_context", self.pgen_context.view().into_dyn());
        f("pgen_state", self.pgen_state.view().into_dyn());
        f("pgen_input", self.pgen_input.view().into_dyn());
        f("pgen_bias", self.pgen_bias.view().into_dyn());
    }

    /// Mutable counterpart of [`Parameters::visit`], same order.
    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&str, ArrayViewMutD<'_, F>)) {
        f("embedding", self.embedding.view_mut().into_dyn());
        self.encoder_fw.visit_mut("encoder_fw", f);
        self.encoder_bw.visit_mut("encoder_bw", f);
        f("reduce_h.weight", self.reduce_h.weight.view_mut().into_dyn());
        f("reduce_h.bias", self.reduce_h.bias.view_mut().into_dyn());
        f("reduce_c.weight", self.reduce_c.weight.view_mut().into_dyn());
        f("reduce_c.bias", self.reduce_c.bias.view_mut().into_dyn());
        self.decoder.visit_mut("decoder", f);
        f("attn_enc", self.attn_enc.view_mut().into_dyn());
        f("attn_dec", self.attn_dec.view_mut().into_dyn());
        f("attn_bias", self.attn_bias.view_mut().into_dyn());
        f("attn_score", self.attn_score.view_mut().into_dyn());
        if let Some(wc) = &mut self.attn_coverage {
            f("attn_coverage", wc.view_mut().into_dyn());
        }
        f(
            "out_hidden.weight",
            self.out_hidden.weight.view_mut().into_dyn(),
        );
        f("out_hidden.bias", self.out_hidden.bias.view_mut().into_dyn());
        f(
            "out_vocab.weight",
            self.out_vocab.weight.view_mut().into_dyn(),
        );
        f("out_vocab.bias", self.out_vocab.bias.view_mut().into_dyn());
        f("pgen_context", self.pgen_context.view_mut().into_dyn());
        f("pgen_state", self.pgen_state.view_mut().into_dyn());
        f("pgen_input", self.pgen_input.view_mut().into_dyn());
        f("pgen_bias", self.pgen_bias.view_mut().into_dyn());
    }

    pub fn group_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.visit(&mut |name, _| names.push(name.to_string()));
        names
    }

    /// Converts every tensor elementwise (used to move between training and
    /// verification precision).
    pub fn map_scalar<G: Scalar>(&self) -> Parameters<G> {
        let conv = |x: &F| G::from_f64(x.to_f64().unwrap()).unwrap();
        let conv1 = |a: &Array1<F>| a.mapv(|x| conv(&x));
        let conv2 = |a: &Array2<F>| a.mapv(|x| conv(&x));
        let conv_lstm = |w: &LstmWeights<F>| LstmWeights {
            w_input: conv2(&w.w_input),
            w_hidden: conv2(&w.w_hidden),
            bias: conv1(&w.bias),
        };
        let conv_affine = |a: &Affine<F>| Affine {
            weight: conv2(&a.weight),
            bias: conv1(&a.bias),
        };
        Parameters {
            embedding: conv2(&self.embedding),
            encoder_fw: conv_lstm(&self.encoder_fw),
            encoder_bw: conv_lstm(&self.encoder_bw),
            reduce_h: conv_affine(&self.reduce_h),
            reduce_c: conv_affine(&self.reduce_c),
            decoder: conv_lstm(&self.decoder),
            attn_enc: conv2(&self.attn_enc),
            attn_dec: conv2(&self.attn_dec),
            attn_bias: conv1(&self.attn_bias),
            attn_score: conv1(&self.attn_score),
            attn_coverage: self.attn_coverage.as_ref().map(conv1),
            out_hidden: conv_affine(&self.out_hidden),
            out_vocab: conv_affine(&self.out_vocab),
            pgen_context: conv1(&self.pgen_context),
            pgen_state: conv1(&self.pgen_state),
            pgen_input: conv1(&self.pgen_input),
            pgen_bias: conv1(&self.pgen_bias),
        }
    }
}

/// Initialization scale: uniform in [-0.02, 0.02].
const INIT_MAGNITUDE: f64 = 0.02;

/// Draws all weights uniformly in [-0.02, 0.02], deterministically for a
/// fixed seed.
pub fn init_parameters<F: Scalar>(hp: &Hyperparams, init_seed: u64) -> Parameters<F> {
    let mut params = Parameters::zeros(hp);
    let mut rng = ChaCha20Rng::seed_from_u64(init_seed);
    params.visit_mut(&mut |_, mut view| {
        for x in view.iter_mut() {
            let draw: f64 = rand::Rng::random(&mut rng);
            *x = flt(draw * 2.0 * INIT_MAGNITUDE - INIT_MAGNITUDE);
        }
    });
    params
}

//! Autoencoder with a block-diagonal latent head.
//!
//! The encoder MLP produces a pre-latent vector of width `P`; the head splits
//! it into `B` equal slices and maps slice `j` to latent coordinates
//! `[D·j, D·(j+1))` with its own `D × (P/B)` weight block. Off-block weights
//! are not stored, so they stay exactly zero through training.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::mlp::{affine_backward, affine_forward, Mlp, MlpCache, MlpSpec, DEFAULT_LEAKY_SLOPE};
use super::Matrix;
use crate::error::{invalid, Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockLinear {
    in_dim: usize,
    branches: usize,
    branch_dim: usize,
    /// `branches` weight blocks (`branch_dim × in_dim / branches` each), then
    /// `branches · branch_dim` biases.
    params: Vec<f64>,
}

impl BlockLinear {
    fn param_count(in_dim: usize, branches: usize, branch_dim: usize) -> usize {
        in_dim * branch_dim + branches * branch_dim
    }

    pub fn new(in_dim: usize, branches: usize, branch_dim: usize, seed: u64) -> Result<Self> {
        Self::check_shape(in_dim, branches, branch_dim)?;
        let mut rng = rng::seeded(seed);
        let bound = (branches as f64 / in_dim as f64).sqrt();
        let params = (0..Self::param_count(in_dim, branches, branch_dim))
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        Ok(Self {
            in_dim,
            branches,
            branch_dim,
            params,
        })
    }

    pub fn from_params(
        in_dim: usize,
        branches: usize,
        branch_dim: usize,
        params: Vec<f64>,
    ) -> Result<Self> {
        Self::check_shape(in_dim, branches, branch_dim)?;
        let want = Self::param_count(in_dim, branches, branch_dim);
        if params.len() != want {
            return Err(invalid(format!(
                "latent head expects {want} parameters, got {}",
                params.len()
            )));
        }
        Ok(Self {
            in_dim,
            branches,
            branch_dim,
            params,
        })
    }

    fn check_shape(in_dim: usize, branches: usize, branch_dim: usize) -> Result<()> {
        if branches == 0 || branch_dim == 0 {
            return Err(invalid("branch count and branch dimension must be >= 1"));
        }
        if in_dim == 0 || !in_dim.is_multiple_of(branches) {
            return Err(invalid(format!(
                "pre-latent width {in_dim} is not divisible by {branches} branches"
            )));
        }
        Ok(())
    }

    pub fn latent_dim(&self) -> usize {
        self.branches * self.branch_dim
    }

    fn slice_in(&self) -> usize {
        self.in_dim / self.branches
    }

    fn block_len(&self) -> usize {
        self.branch_dim * self.slice_in()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// The full `latent_dim × in_dim` weight matrix with zeros off the blocks.
    pub fn dense_weights(&self) -> Matrix {
        let mut w = Matrix::zeros(self.latent_dim(), self.in_dim);
        let (si, d) = (self.slice_in(), self.branch_dim);
        for j in 0..self.branches {
            let block = &self.params[j * self.block_len()..(j + 1) * self.block_len()];
            for o in 0..d {
                w.row_mut(j * d + o)[j * si..(j + 1) * si]
                    .copy_from_slice(&block[o * si..(o + 1) * si]);
            }
        }
        w
    }

    pub fn forward(&self, x: &Matrix) -> Matrix {
        let (si, d) = (self.slice_in(), self.branch_dim);
        let bias_off = self.branches * self.block_len();
        let mut z = Matrix::zeros(x.rows(), self.latent_dim());
        for j in 0..self.branches {
            let block = &self.params[j * self.block_len()..(j + 1) * self.block_len()];
            let bias = &self.params[bias_off + j * d..bias_off + (j + 1) * d];
            let part = affine_forward(&x.column_block(j * si, si), block, bias, d);
            for r in 0..x.rows() {
                z.row_mut(r)[j * d..(j + 1) * d].copy_from_slice(part.row(r));
            }
        }
        z
    }

    pub fn backward(&self, x: &Matrix, dz: &Matrix, grad: &mut [f64]) -> Matrix {
        let (si, d) = (self.slice_in(), self.branch_dim);
        let bl = self.block_len();
        let bias_off = self.branches * bl;
        let mut dx = Matrix::zeros(x.rows(), self.in_dim);
        let (wgrad, bgrad) = grad.split_at_mut(bias_off);
        for j in 0..self.branches {
            let block = &self.params[j * bl..(j + 1) * bl];
            let part = affine_backward(
                &x.column_block(j * si, si),
                block,
                &dz.column_block(j * d, d),
                &mut wgrad[j * bl..(j + 1) * bl],
                &mut bgrad[j * d..(j + 1) * d],
            );
            for r in 0..x.rows() {
                dx.row_mut(r)[j * si..(j + 1) * si].copy_from_slice(part.row(r));
            }
        }
        dx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeSpec {
    /// Input width, hidden widths, pre-latent width.
    pub encoder_widths: Vec<usize>,
    pub branches: usize,
    pub branch_dim: usize,
    pub slope: f64,
    pub seed: u64,
}

impl AeSpec {
    pub fn new(encoder_widths: Vec<usize>, branches: usize, branch_dim: usize, seed: u64) -> Self {
        Self {
            encoder_widths,
            branches,
            branch_dim,
            slope: DEFAULT_LEAKY_SLOPE,
            seed,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.branches * self.branch_dim
    }

    fn encoder_spec(&self) -> MlpSpec {
        MlpSpec {
            layer_widths: self.encoder_widths.clone(),
            slope: self.slope,
            activate_output: true,
            seed: rng::derive_seed(self.seed, 1),
        }
    }

    /// Latent width, then the encoder widths mirrored (pre-latent excluded).
    fn decoder_spec(&self) -> MlpSpec {
        let mut widths = vec![self.latent_dim()];
        let k = self.encoder_widths.len();
        widths.extend(self.encoder_widths[..k - 1].iter().rev());
        MlpSpec {
            layer_widths: widths,
            slope: self.slope,
            activate_output: false,
            seed: rng::derive_seed(self.seed, 3),
        }
    }

    fn pre_latent(&self) -> Result<usize> {
        if self.encoder_widths.len() < 2 {
            return Err(invalid(
                "encoder needs an input width and a pre-latent width",
            ));
        }
        Ok(*self.encoder_widths.last().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchedAutoencoder {
    spec: AeSpec,
    pub encoder: Mlp,
    pub head: BlockLinear,
    pub decoder: Mlp,
}

/// Forward-pass state needed by [`BranchedAutoencoder::backward`].
#[derive(Debug, Clone)]
pub struct AeCache {
    enc: MlpCache,
    pre_latent: Matrix,
    pub latent: Matrix,
    dec: MlpCache,
    pub reconstruction: Matrix,
}

impl AeCache {
    /// Distance to the nearest leaky-ReLU kink over the pass.
    pub fn kink_margin(&self, net: &BranchedAutoencoder) -> f64 {
        net.encoder
            .kink_margin(&self.enc)
            .min(net.decoder.kink_margin(&self.dec))
    }
}

/// Parameter gradients laid out like the network's parameter buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct AeGradients {
    pub encoder: Vec<f64>,
    pub head: Vec<f64>,
    pub decoder: Vec<f64>,
}

impl BranchedAutoencoder {
    pub fn new(spec: AeSpec) -> Result<Self> {
        let p = spec.pre_latent()?;
        let encoder = Mlp::new(spec.encoder_spec())?;
        let head = BlockLinear::new(
            p,
            spec.branches,
            spec.branch_dim,
            rng::derive_seed(spec.seed, 2),
        )?;
        let decoder = Mlp::new(spec.decoder_spec())?;
        Ok(Self {
            spec,
            encoder,
            head,
            decoder,
        })
    }

    pub fn spec(&self) -> &AeSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.spec.encoder_widths[0]
    }

    pub fn branches(&self) -> usize {
        self.spec.branches
    }

    pub fn branch_dim(&self) -> usize {
        self.spec.branch_dim
    }

    pub fn zero_gradients(&self) -> AeGradients {
        AeGradients {
            encoder: vec![0.0; self.encoder.params().len()],
            head: vec![0.0; self.head.params().len()],
            decoder: vec![0.0; self.decoder.params().len()],
        }
    }

    /// Latent codes `f_θ(x)`.
    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        let pre = self.encoder.predict(x)?;
        Ok(self.head.forward(&pre))
    }

    pub fn forward(&self, x: &Matrix) -> Result<AeCache> {
        let (pre_latent, enc) = self.encoder.forward(x)?;
        let latent = self.head.forward(&pre_latent);
        let (reconstruction, dec) = self.decoder.forward(&latent)?;
        Ok(AeCache {
            enc,
            pre_latent,
            latent,
            dec,
            reconstruction,
        })
    }

    /// Backpropagates `d_recon` through the decoder and `d_recon`'s latent
    /// gradient plus `d_latent_extra` through head and encoder.
    pub fn backward(
        &self,
        cache: &AeCache,
        d_recon: &Matrix,
        d_latent_extra: Option<&Matrix>,
        grads: &mut AeGradients,
    ) {
        let mut dz = self
            .decoder
            .backward(&cache.dec, d_recon, &mut grads.decoder);
        if let Some(extra) = d_latent_extra {
            for (a, b) in dz.as_mut_slice().iter_mut().zip(extra.as_slice()) {
                *a += b;
            }
        }
        let dpre = self.head.backward(&cache.pre_latent, &dz, &mut grads.head);
        self.encoder.backward(&cache.enc, &dpre, &mut grads.encoder);
    }

    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 3] {
        [
            self.encoder.params_mut(),
            self.head.params_mut(),
            self.decoder.params_mut(),
        ]
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            spec: self.spec.clone(),
            encoder: self.encoder.params().to_vec(),
            head: self.head.params().to_vec(),
            decoder: self.decoder.params().to_vec(),
        }
    }

    pub fn from_model_file(file: ModelFile) -> Result<Self> {
        if file.format != MODEL_FORMAT {
            return Err(Error::Parse(format!(
                "not a branched autoencoder model (format '{}')",
                file.format
            )));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Parse(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                file.version
            )));
        }
        let spec = file.spec;
        let p = spec.pre_latent()?;
        Ok(Self {
            encoder: Mlp::from_params(spec.encoder_spec(), file.encoder)?,
            head: BlockLinear::from_params(p, spec.branches, spec.branch_dim, file.head)?,
            decoder: Mlp::from_params(spec.decoder_spec(), file.decoder)?,
            spec,
        })
    }

    pub fn save_json(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &self.to_model_file())?;
        Ok(())
    }

    pub fn load_json(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let model: ModelFile = serde_json::from_reader(std::io::BufReader::new(file))?;
        Self::from_model_file(model)
    }
}

pub const MODEL_FORMAT: &str = "topocon-branched-ae";
pub const MODEL_VERSION: u32 = 1;

/// On-disk model: JSON object with the architecture and three flat parameter
/// arrays (encoder MLP, latent head, decoder MLP). Floats are written in
/// shortest round-trip form, so save/load is lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub spec: AeSpec,
    pub encoder: Vec<f64>,
    pub head: Vec<f64>,
    pub decoder: Vec<f64>,
}

/// Latent coordinates of branch `j` (0-based): columns `[D·j, D·(j+1))`.
pub fn slice(latent: &Matrix, branch: usize, branch_dim: usize) -> Matrix {
    latent.column_block(branch * branch_dim, branch_dim)
}

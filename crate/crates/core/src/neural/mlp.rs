use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{invalid, Result};
use crate::rng;

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_widths: Vec<usize>,
    /// Negative-side slope of the leaky ReLU.
    pub slope: f64,
    /// Whether the last layer is followed by an activation too.
    pub activate_output: bool,
    pub seed: u64,
}

impl MlpSpec {
    pub fn new(layer_widths: Vec<usize>, seed: u64) -> Self {
        Self {
            layer_widths,
            slope: DEFAULT_LEAKY_SLOPE,
            activate_output: false,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 2 {
            return Err(invalid(
                "an MLP needs at least an input and an output width",
            ));
        }
        if self.layer_widths.contains(&0) {
            return Err(invalid("layer widths must be positive"));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layer_widths
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

pub fn leaky_relu(x: f64, slope: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        slope * x
    }
}

fn leaky_relu_grad(x: f64, slope: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        slope
    }
}

/// Affine map `y = W x + b` applied row-wise; `W` is `out × in`, row-major.
pub(crate) fn affine_forward(x: &Matrix, w: &[f64], b: &[f64], out: usize) -> Matrix {
    let inp = x.cols();
    let mut y = Matrix::zeros(x.rows(), out);
    for r in 0..x.rows() {
        let xr = x.row(r);
        let yr = y.row_mut(r);
        for (o, yo) in yr.iter_mut().enumerate() {
            let wrow = &w[o * inp..(o + 1) * inp];
            *yo = b[o] + wrow.iter().zip(xr).map(|(a, c)| a * c).sum::<f64>();
        }
    }
    y
}

/// Accumulates `dW`, `db` and returns `dx` for the affine map.
pub(crate) fn affine_backward(
    x: &Matrix,
    w: &[f64],
    dy: &Matrix,
    dw: &mut [f64],
    db: &mut [f64],
) -> Matrix {
    let (inp, out) = (x.cols(), dy.cols());
    let mut dx = Matrix::zeros(x.rows(), inp);
    for r in 0..x.rows() {
        let xr = x.row(r);
        let dyr = dy.row(r);
        for o in 0..out {
            let g = dyr[o];
            if g == 0.0 {
                continue;
            }
            db[o] += g;
            let wrow = &w[o * inp..(o + 1) * inp];
            let dwrow = &mut dw[o * inp..(o + 1) * inp];
            for i in 0..inp {
                dwrow[i] += g * xr[i];
            }
            let dxr = dx.row_mut(r);
            for i in 0..inp {
                dxr[i] += g * wrow[i];
            }
        }
    }
    dx
}

/// Multi-layer perceptron with leaky-ReLU activations between layers.
///
/// Parameters live in one flat buffer: for each layer the `out × in` weight
/// matrix followed by its `out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    spec: MlpSpec,
    params: Vec<f64>,
}

/// Values kept from the forward pass: the input of every layer and every
/// layer's pre-activation.
#[derive(Debug, Clone)]
pub struct MlpCache {
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
}

impl Mlp {
    /// Weights and biases uniform in `±sqrt(1 / fan_in)`.
    pub fn new(spec: MlpSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = rng::seeded(spec.seed);
        let mut params = Vec::with_capacity(spec.param_count());
        for w in spec.layer_widths.windows(2) {
            let bound = (1.0 / w[0] as f64).sqrt();
            params.extend((0..w[0] * w[1] + w[1]).map(|_| rng.random_range(-bound..bound)));
        }
        Ok(Self { spec, params })
    }

    pub fn from_params(spec: MlpSpec, params: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if params.len() != spec.param_count() {
            return Err(invalid(format!(
                "expected {} parameters, got {}",
                spec.param_count(),
                params.len()
            )));
        }
        Ok(Self { spec, params })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn input_dim(&self) -> usize {
        self.spec.layer_widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.spec.layer_widths.last().unwrap()
    }

    fn layer_count(&self) -> usize {
        self.spec.layer_widths.len() - 1
    }

    fn layer_ranges(&self) -> Vec<(usize, usize, usize, usize)> {
        // (weight offset, bias offset, in, out)
        let mut off = 0;
        self.spec
            .layer_widths
            .windows(2)
            .map(|w| {
                let r = (off, off + w[0] * w[1], w[0], w[1]);
                off += w[0] * w[1] + w[1];
                r
            })
            .collect()
    }

    fn activated(&self, layer: usize) -> bool {
        layer + 1 < self.layer_count() || self.spec.activate_output
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, MlpCache)> {
        if x.cols() != self.input_dim() {
            return Err(invalid(format!(
                "input has {} columns, network expects {}",
                x.cols(),
                self.input_dim()
            )));
        }
        let slope = self.spec.slope;
        let mut cache = MlpCache {
            inputs: Vec::with_capacity(self.layer_count()),
            pre: Vec::with_capacity(self.layer_count()),
        };
        let mut current = x.clone();
        for (l, (wo, bo, inp, out)) in self.layer_ranges().into_iter().enumerate() {
            let pre = affine_forward(
                &current,
                &self.params[wo..wo + inp * out],
                &self.params[bo..bo + out],
                out,
            );
            let mut act = pre.clone();
            if self.activated(l) {
                act.as_mut_slice()
                    .iter_mut()
                    .for_each(|v| *v = leaky_relu(*v, slope));
            }
            cache.inputs.push(std::mem::replace(&mut current, act));
            cache.pre.push(pre);
        }
        Ok((current, cache))
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.forward(x)?.0)
    }

    /// Accumulates parameter gradients into `grad` (same layout as the
    /// parameters) and returns the gradient with respect to the input.
    pub fn backward(&self, cache: &MlpCache, dout: &Matrix, grad: &mut [f64]) -> Matrix {
        assert_eq!(grad.len(), self.params.len());
        let slope = self.spec.slope;
        let mut delta = dout.clone();
        for (l, (wo, bo, inp, out)) in self.layer_ranges().into_iter().enumerate().rev() {
            if self.activated(l) {
                for (d, p) in delta.as_mut_slice().iter_mut().zip(cache.pre[l].as_slice()) {
                    *d *= leaky_relu_grad(*p, slope);
                }
            }
            let (dw, db) = grad[wo..bo + out].split_at_mut(inp * out);
            delta = affine_backward(
                &cache.inputs[l],
                &self.params[wo..wo + inp * out],
                &delta,
                dw,
                db,
            );
        }
        delta
    }

    /// Smallest absolute pre-activation over activated layers; distance to the
    /// nearest leaky-ReLU kink.
    pub fn kink_margin(&self, cache: &MlpCache) -> f64 {
        (0..cache.pre.len())
            .filter(|&l| self.activated(l))
            .flat_map(|l| cache.pre[l].as_slice().iter().map(|v| v.abs()))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameters_give_zero_output() {
        let spec = MlpSpec::new(vec![3, 4, 2], 1);
        let net = Mlp::from_params(spec.clone(), vec![0.0; spec.param_count()]).unwrap();
        let x = Matrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![3.0, 3.0, 3.0]]).unwrap();
        let y = net.predict(&x).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_layer() {
        let spec = MlpSpec::new(vec![2, 2], 0);
        let net = Mlp::from_params(spec, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let x = Matrix::from_rows(&[vec![-1.5, 2.25]]).unwrap();
        assert_eq!(net.predict(&x).unwrap(), x);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let net = Mlp::new(MlpSpec::new(vec![3, 2], 0)).unwrap();
        assert!(net.predict(&Matrix::zeros(1, 2)).is_err());
        assert!(Mlp::new(MlpSpec::new(vec![3], 0)).is_err());
        assert!(Mlp::new(MlpSpec::new(vec![3, 0, 1], 0)).is_err());
    }

    #[test]
    fn matches_scalar_reevaluation() {
        let spec = MlpSpec::new(vec![3, 5, 4, 2], 9);
        let net = Mlp::new(spec.clone()).unwrap();
        let x = Matrix::from_rows(&[vec![0.3, -1.2, 2.0], vec![-0.7, 0.1, 0.0]]).unwrap();
        let y = net.predict(&x).unwrap();
        let p = net.params();
        for r in 0..2 {
            let mut a: Vec<f64> = x.row(r).to_vec();
            let mut off = 0;
            for (l, w) in spec.layer_widths.windows(2).enumerate() {
                let mut next = vec![0.0; w[1]];
                for o in 0..w[1] {
                    let mut s = p[off + w[0] * w[1] + o];
                    for i in 0..w[0] {
                        s += p[off + o * w[0] + i] * a[i];
                    }
                    next[o] = if l + 2 < spec.layer_widths.len() && s <= 0.0 {
                        0.01 * s
                    } else {
                        s
                    };
                }
                off += w[0] * w[1] + w[1];
                a = next;
            }
            for (got, want) in y.row(r).iter().zip(&a) {
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seeded_initialisation_is_deterministic() {
        let a = Mlp::new(MlpSpec::new(vec![2, 20, 20, 2], 5)).unwrap();
        let b = Mlp::new(MlpSpec::new(vec![2, 20, 20, 2], 5)).unwrap();
        assert_eq!(a, b);
        let bound = (1.0f64 / 20.0).sqrt();
        assert!(a.params()[60..].iter().all(|v| v.abs() <= bound));
    }
}

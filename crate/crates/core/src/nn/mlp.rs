use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

/// Fully connected layer computing `x · w + b` for row-major batches.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `in × out`
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            w: Array2::zeros((inputs, outputs)),
            b: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.w.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.w.ncols()
    }
}

/// Multilayer perceptron with ReLU after every layer except the last.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct MlpCache {
    /// Input to each layer (the network input, then post-ReLU activations).
    inputs: Vec<Array2<f64>>,
    /// Pre-activation of each hidden layer.
    pre: Vec<Array2<f64>>,
}

impl MlpCache {
    /// Pre-activations of the hidden layers, in order.
    pub fn hidden_preactivations(&self) -> &[Array2<f64>] {
        &self.pre
    }
}

/// Random matrix with orthonormal rows or columns (whichever is shorter),
/// scaled by `gain`.
pub fn orthogonal<R: Rng + ?Sized>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Array2<f64> {
    let (n, len) = if rows >= cols { (cols, rows) } else { (rows, cols) };
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    for i in 0..n {
        for j in 0..i {
            let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
            let (head, tail) = vecs.split_at_mut(i);
            for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                *a -= dot * b;
            }
        }
        let norm = vecs[i].iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        vecs[i].iter_mut().for_each(|a| *a /= norm);
    }
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        gain * if rows >= cols { vecs[c][r] } else { vecs[r][c] }
    })
}

fn check_finite(a: &Array2<f64>, layer: usize) -> Result<()> {
    if let Some(v) = a.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numeric {
            layer: format!("dense {layer}"),
            detail: format!("activation {v}"),
        });
    }
    Ok(())
}

impl Mlp {
    /// `sizes = [input, hidden.., output]`. Hidden layers get orthogonal
    /// weights with gain √2, the output layer gain `head_gain`; biases are 0.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], head_gain: f64, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, io)| {
                let gain = if i == last { head_gain } else { std::f64::consts::SQRT_2 };
                Dense {
                    w: orthogonal(io[0], io[1], gain, rng),
                    b: Array1::zeros(io[1]),
                }
            })
            .collect();
        Self { layers }
    }

    /// Same shapes, all zeros; doubles as a gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self.layers.iter().map(|l| Dense::zeros(l.inputs(), l.outputs())).collect(),
        }
    }

    pub fn input_len(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().map_or(0, Dense::outputs)
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| (l.inputs(), l.outputs())).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.input_len() {
            return Err(Error::contract(format!(
                "input width {} does not match network input {}",
                x.ncols(),
                self.input_len()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_input(&x)?;
        let mut h = x.to_owned();
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            h = h.dot(&l.w) + &l.b;
            if i < last {
                h.mapv_inplace(|v| v.max(0.0));
            }
            check_finite(&h, i)?;
        }
        Ok(h)
    }

    pub fn forward_cached(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, MlpCache)> {
        self.check_input(&x)?;
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(last);
        let mut h = x.to_owned();
        for (i, l) in self.layers.iter().enumerate() {
            let z = h.dot(&l.w) + &l.b;
            check_finite(&z, i)?;
            inputs.push(h);
            if i < last {
                h = z.mapv(|v| v.max(0.0));
                pre.push(z);
            } else {
                h = z;
            }
        }
        Ok((h, MlpCache { inputs, pre }))
    }

    /// Accumulates into `grads` the parameter gradients for upstream
    /// gradient `dout` (batch × outputs).
    pub fn backward(&self, cache: &MlpCache, dout: Array2<f64>, grads: &mut Mlp) {
        let mut d = dout;
        for i in (0..self.layers.len()).rev() {
            let g = &mut grads.layers[i];
            g.w += &cache.inputs[i].t().dot(&d);
            g.b += &d.sum_axis(Axis(0));
            if i > 0 {
                let mut dh = d.dot(&self.layers[i].w.t());
                ndarray::Zip::from(&mut dh)
                    .and(&cache.pre[i - 1])
                    .for_each(|g, &z| {
                        if z <= 0.0 {
                            *g = 0.0;
                        }
                    });
                d = dh;
            }
        }
    }

    /// Flat views of every weight and bias tensor, in layer order.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            out.push(l.w.as_slice().expect("standard layout"));
            out.push(l.b.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &mut self.layers {
            out.push(l.w.as_slice_mut().expect("standard layout"));
            out.push(l.b.as_slice_mut().expect("standard layout"));
        }
        out
    }
}

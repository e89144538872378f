use super::{Disp, Predictor};

/// Affine map from the flattened observed displacements to the flattened
/// predicted displacements: `out = A f + b`.
///
/// Parameter layout: `A` row-major (`2 t_pred` rows, `2 (t_obs - 1)` columns),
/// then `b`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    inputs: usize,
    outputs: usize,
}

impl Linear {
    pub fn new(t_obs: usize, t_pred: usize) -> Self {
        Linear {
            inputs: 2 * (t_obs - 1),
            outputs: 2 * t_pred,
        }
    }
}

impl Predictor for Linear {
    /// The flattened input vector `f`.
    type Tape = Vec<f64>;

    fn param_count(&self) -> usize {
        self.outputs * self.inputs + self.outputs
    }

    fn forward(&self, w: &[f64], observed: &[Disp]) -> (Vec<Disp>, Vec<f64>) {
        let f: Vec<f64> = observed.iter().flatten().copied().collect();
        debug_assert_eq!(f.len(), self.inputs);
        let (a, b) = w.split_at(self.outputs * self.inputs);
        let out = a
            .chunks_exact(self.inputs)
            .zip(b)
            .map(|(row, bias)| row.iter().zip(&f).map(|(x, y)| x * y).sum::<f64>() + bias)
            .collect::<Vec<_>>();
        let disp = out.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        (disp, f)
    }

    fn backward(&self, _w: &[f64], f: &Vec<f64>, grad_out: &[Disp], grad_w: &mut [f64]) {
        let (ga, gb) = grad_w.split_at_mut(self.outputs * self.inputs);
        for (i, g) in grad_out.iter().flatten().enumerate() {
            gb[i] += g;
            for (gij, fj) in ga[i * self.inputs..(i + 1) * self.inputs].iter_mut().zip(f) {
                *gij += g * fj;
            }
        }
    }
}

use super::{Disp, Predictor};

/// Single-layer Elman network with an autoregressive decoder.
///
/// Encoder: `h_t = tanh(W_ih d_t + W_hh h_{t-1} + b_h)`, `h_0 = 0`, over the
/// observed displacements. Decoder: starting from the final encoder state and
/// the last observed displacement, `h'_t = tanh(W_ih u_t + W_hh h'_{t-1} + b_h)`,
/// `out_t = W_out h'_t + b_out`, with `u_t = out_{t-1}` after the first step.
///
/// Parameter layout: `W_ih` (H x 2), `W_hh` (H x H), `b_h` (H), `W_out`
/// (2 x H), `b_out` (2), all row-major.
#[derive(Debug, Clone, Copy)]
pub struct Recurrent {
    hidden: usize,
    t_pred: usize,
}

struct Layout {
    w_ih: usize,
    w_hh: usize,
    b_h: usize,
    w_out: usize,
    b_out: usize,
    end: usize,
}

impl Recurrent {
    pub fn new(hidden: usize, t_pred: usize) -> Self {
        Recurrent { hidden, t_pred }
    }

    fn layout(&self) -> Layout {
        let h = self.hidden;
        let w_ih = 0;
        let w_hh = w_ih + 2 * h;
        let b_h = w_hh + h * h;
        let w_out = b_h + h;
        let b_out = w_out + 2 * h;
        Layout {
            w_ih,
            w_hh,
            b_h,
            w_out,
            b_out,
            end: b_out + 2,
        }
    }

    fn cell(&self, w: &[f64], l: &Layout, input: Disp, prev: &[f64]) -> Vec<f64> {
        let h = self.hidden;
        (0..h)
            .map(|i| {
                let wih = &w[l.w_ih + 2 * i..l.w_ih + 2 * i + 2];
                let whh = &w[l.w_hh + h * i..l.w_hh + h * (i + 1)];
                let z = wih[0] * input[0]
                    + wih[1] * input[1]
                    + whh.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>()
                    + w[l.b_h + i];
                z.tanh()
            })
            .collect()
    }

    fn readout(&self, w: &[f64], l: &Layout, state: &[f64]) -> Disp {
        let h = self.hidden;
        let mut out = [w[l.b_out], w[l.b_out + 1]];
        for (k, o) in out.iter_mut().enumerate() {
            *o += w[l.w_out + h * k..l.w_out + h * (k + 1)]
                .iter()
                .zip(state)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
        out
    }
}

/// Inputs and hidden states of every cell application, in order. `states[0]`
/// is the zero initial state; cell `j` maps `(inputs[j], states[j])` to
/// `states[j + 1]`. The last `t_pred` cells belong to the decoder.
pub struct RecurrentTape {
    inputs: Vec<Disp>,
    states: Vec<Vec<f64>>,
    encoder_steps: usize,
}

impl Predictor for Recurrent {
    type Tape = RecurrentTape;

    fn param_count(&self) -> usize {
        self.layout().end
    }

    fn forward(&self, w: &[f64], observed: &[Disp]) -> (Vec<Disp>, RecurrentTape) {
        let l = self.layout();
        let mut inputs = Vec::with_capacity(observed.len() + self.t_pred);
        let mut states = Vec::with_capacity(observed.len() + self.t_pred + 1);
        states.push(vec![0.0; self.hidden]);
        for d in observed {
            let next = self.cell(w, &l, *d, states.last().unwrap());
            inputs.push(*d);
            states.push(next);
        }
        let mut out = Vec::with_capacity(self.t_pred);
        let mut input = *observed.last().expect("at least one observed displacement");
        for _ in 0..self.t_pred {
            let next = self.cell(w, &l, input, states.last().unwrap());
            inputs.push(input);
            input = self.readout(w, &l, &next);
            states.push(next);
            out.push(input);
        }
        (
            out,
            RecurrentTape {
                inputs,
                states,
                encoder_steps: observed.len(),
            },
        )
    }

    fn backward(&self, w: &[f64], tape: &RecurrentTape, grad_out: &[Disp], grad_w: &mut [f64]) {
        let l = self.layout();
        let h = self.hidden;
        let enc = tape.encoder_steps;
        let cells = tape.inputs.len();

        let mut g_out: Vec<Disp> = grad_out.to_vec();
        let mut g_state = vec![0.0; h];
        let mut g_z = vec![0.0; h];
        for j in (0..cells).rev() {
            let state = &tape.states[j + 1];
            let prev = &tape.states[j];
            if j >= enc {
                let t = j - enc;
                let go = g_out[t];
                for k in 0..2 {
                    grad_w[l.b_out + k] += go[k];
                    for i in 0..h {
                        grad_w[l.w_out + h * k + i] += go[k] * state[i];
                        g_state[i] += w[l.w_out + h * k + i] * go[k];
                    }
                }
            }
            for i in 0..h {
                g_z[i] = g_state[i] * (1.0 - state[i] * state[i]);
            }
            let input = tape.inputs[j];
            let mut g_input = [0.0, 0.0];
            for i in 0..h {
                let gz = g_z[i];
                grad_w[l.b_h + i] += gz;
                grad_w[l.w_ih + 2 * i] += gz * input[0];
                grad_w[l.w_ih + 2 * i + 1] += gz * input[1];
                g_input[0] += w[l.w_ih + 2 * i] * gz;
                g_input[1] += w[l.w_ih + 2 * i + 1] * gz;
                for (m, p) in prev.iter().enumerate() {
                    grad_w[l.w_hh + h * i + m] += gz * p;
                }
            }
            for (m, gs) in g_state.iter_mut().enumerate() {
                *gs = (0..h).map(|i| w[l.w_hh + h * i + m] * g_z[i]).sum();
            }
            // Decoder inputs after the first are the previous outputs.
            if j > enc {
                let t = j - enc;
                g_out[t - 1][0] += g_input[0];
                g_out[t - 1][1] += g_input[1];
            }
        }
    }
}

use super::{Disp, Predictor};

/// Repeats the mean observed displacement. Has no parameters.
#[derive(Debug, Clone, Copy)]
pub struct ConstantVelocity {
    t_pred: usize,
}

impl ConstantVelocity {
    pub fn new(t_pred: usize) -> Self {
        ConstantVelocity { t_pred }
    }
}

impl Predictor for ConstantVelocity {
    type Tape = ();

    fn param_count(&self) -> usize {
        0
    }

    fn forward(&self, _w: &[f64], observed: &[Disp]) -> (Vec<Disp>, ()) {
        let n = observed.len() as f64;
        let (sx, sy) = observed
            .iter()
            .fold((0.0, 0.0), |(sx, sy), d| (sx + d[0], sy + d[1]));
        (vec![[sx / n, sy / n]; self.t_pred], ())
    }

    fn backward(&self, _w: &[f64], _tape: &(), _grad_out: &[Disp], _grad_w: &mut [f64]) {}
}

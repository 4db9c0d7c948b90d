//! Central finite-difference check of analytic gradients.
//!
//! The numerical side only ever calls `forward`; it never touches the
//! backward pass it is checking.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::network::{GradientSet, Mlp};
use crate::rng::{self, Stream};

/// Location of a single parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamRef {
    pub layer: usize,
    /// `None` for a bias.
    pub input: Option<usize>,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub n_params: usize,
    pub max_rel_error: f64,
    pub worst: Option<ParamRef>,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale == 0.0 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}

pub fn cross_entropy(mlp: &Mlp, input: &[f64], label: usize) -> Result<f64> {
    let trace = mlp.forward(input)?;
    Ok(-trace.output_probs()[label].ln())
}

fn central_difference(mlp: &mut Mlp, at: ParamRef, input: &[f64], label: usize, h: f64) -> Result<f64> {
    let read = |m: &Mlp| match at.input {
        Some(i) => m.layers()[at.layer].weight(at.output, i),
        None => m.layers()[at.layer].biases()[at.output],
    };
    let write = |m: &mut Mlp, v: f64| match at.input {
        Some(i) => m.layers_mut()[at.layer].set_weight(at.output, i, v),
        None => m.layers_mut()[at.layer].biases_mut()[at.output] = v,
    };
    let original = read(mlp);
    write(mlp, original + h);
    let plus = cross_entropy(mlp, input, label)?;
    write(mlp, original - h);
    let minus = cross_entropy(mlp, input, label)?;
    write(mlp, original);
    Ok((plus - minus) / (2.0 * h))
}

fn analytic_at(grads: &GradientSet, at: ParamRef) -> f64 {
    let g = &grads.layers[at.layer];
    match at.input {
        Some(i) => g.weight(at.output, i),
        None => g.biases[at.output],
    }
}

/// Compares `backward` against central differences over every parameter.
pub fn check_gradients(mlp: &Mlp, input: &[f64], label: usize, h: f64) -> Result<GradCheckReport> {
    let trace = mlp.forward(input)?;
    let grads = mlp.backward(&trace, label)?;
    let mut probe = mlp.clone();
    let mut report = GradCheckReport { n_params: 0, max_rel_error: 0.0, worst: None };
    for (layer, params) in mlp.layers().iter().enumerate() {
        let refs = (0..params.out_dim()).flat_map(|o| {
            (0..params.in_dim())
                .map(move |i| ParamRef { layer, input: Some(i), output: o })
                .chain(std::iter::once(ParamRef { layer, input: None, output: o }))
        });
        for at in refs {
            let numeric = central_difference(&mut probe, at, input, label, h)?;
            let err = relative_error(analytic_at(&grads, at), numeric);
            report.n_params += 1;
            if err > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = report.max_rel_error.max(err);
                report.worst = Some(at);
            }
        }
    }
    Ok(report)
}

/// A network, an input and a label to check gradients at.
#[derive(Debug, Clone)]
pub struct GradCase {
    pub mlp: Mlp,
    pub input: Vec<f64>,
    pub label: usize,
}

/// `count` random small networks (one or two hidden layers, at most
/// `max_params` parameters) with random biases, inputs and labels.
pub fn random_cases(seed: u64, count: usize, max_params: usize) -> Result<Vec<GradCase>> {
    // Smallest architecture drawn below is 1-1-2: 2 + 4 = 6 parameters.
    if max_params < 6 {
        return Err(Error::Config(format!("max_params {max_params} is below the smallest network (6)")));
    }
    let mut rng = rng::stream(seed, Stream::Task);
    let mut cases = Vec::with_capacity(count);
    while cases.len() < count {
        let depth = rng.random_range(1..=2);
        let mut sizes = vec![rng.random_range(1..=4)];
        sizes.extend((0..depth).map(|_| rng.random_range(1..=5)));
        sizes.push(rng.random_range(2..=4));
        let params: usize = sizes.windows(2).map(|w| (w[0] + 1) * w[1]).sum();
        if params > max_params {
            continue;
        }
        let mut mlp = Mlp::new(&sizes, rng.random())?;
        for layer in mlp.layers_mut() {
            for b in layer.biases_mut() {
                *b = rng.random_range(-0.5..0.5);
            }
        }
        let input = (0..sizes[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
        let label = rng.random_range(0..*sizes.last().expect("non-empty"));
        cases.push(GradCase { mlp, input, label });
    }
    Ok(cases)
}

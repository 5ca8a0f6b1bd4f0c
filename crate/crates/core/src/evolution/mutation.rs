use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::snn::{DecoderParams, Genome, NeuronParams, INPUTS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    /// Per-gene mutation probability.
    pub p_mut: f64,
    /// Halved gain steps clamped to [0, 1] and decays clamped to [0.3, 1].
    pub constrained: bool,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig { p_mut: 0.3, constrained: false }
    }
}

impl MutationConfig {
    fn gain_step(&self) -> f64 {
        if self.constrained {
            1.0 / 3.0
        } else {
            2.0 / 3.0
        }
    }

    fn gain_range(&self) -> (f64, f64) {
        if self.constrained {
            (0.0, 1.0)
        } else {
            (0.0, 2.0)
        }
    }

    fn decay_range(&self) -> (f64, f64) {
        if self.constrained {
            (0.3, 1.0)
        } else {
            (0.0, 1.0)
        }
    }
}

/// Uniform draw on the interval spanned by `a` and `b`, in either order.
fn uniform_between<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn perturb_clamped<R: Rng + ?Sized>(rng: &mut R, x: f64, step: f64, (lo, hi): (f64, f64)) -> f64 {
    uniform_between(rng, x - step, x + step).clamp(lo, hi)
}

struct Mutator<'a, R: ?Sized> {
    rng: &'a mut R,
    config: MutationConfig,
}

impl<R: Rng + ?Sized> Mutator<'_, R> {
    fn hit(&mut self) -> bool {
        self.rng.random::<f64>() < self.config.p_mut
    }

    fn weight(&mut self, w: &mut f64) {
        if self.hit() {
            *w = uniform_between(self.rng, -*w - 0.05, 2.0 * *w + 0.05);
        }
    }

    fn gain(&mut self, a: &mut f64) {
        if self.hit() {
            *a = perturb_clamped(self.rng, *a, self.config.gain_step(), self.config.gain_range());
        }
    }

    fn decay(&mut self, t: &mut f64) {
        if self.hit() {
            *t = perturb_clamped(self.rng, *t, 1.0 / 3.0, self.config.decay_range());
        }
    }

    fn threshold(&mut self, th: &mut f64) {
        if self.hit() {
            *th = perturb_clamped(self.rng, *th, 1.0 / 3.0, (0.0, 1.0));
        }
    }

    fn neuron(&mut self, p: &mut NeuronParams) {
        self.gain(&mut p.alpha_u);
        self.decay(&mut p.tau_u);
        self.gain(&mut p.alpha_theta);
        self.decay(&mut p.tau_theta);
        self.threshold(&mut p.theta_init);
    }

    fn decoder(&mut self, d: &mut DecoderParams) {
        self.gain(&mut d.alpha_x);
        self.decay(&mut d.tau_x);
    }
}

/// Returns a mutated copy; each gene is redrawn independently with `p_mut`.
///
/// Genes are visited in a fixed order (input weights row-major, output
/// weights, hidden neurons, output neuron, decoder) so a given random stream
/// always yields the same child. Topology and the action range are fixed.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, config: &MutationConfig, rng: &mut R) -> Genome {
    let mut child = genome.clone();
    let mut m = Mutator { rng, config: *config };
    child.w_in.iter_mut().flatten().for_each(|w| m.weight(w));
    child.w_out.iter_mut().for_each(|w| m.weight(w));
    child.hidden_params.iter_mut().for_each(|p| m.neuron(p));
    m.neuron(&mut child.output_params);
    m.decoder(&mut child.decoder);
    child
}

/// Random weights in [0, 1) with the fixed initial hyperparameters.
pub fn init_genome<R: Rng + ?Sized>(n_hidden: usize, rng: &mut R) -> Genome {
    let mut g = Genome::zeros(n_hidden);
    for w in g.w_in.iter_mut().flatten().chain(g.w_out.iter_mut()) {
        *w = rng.random::<f64>();
    }
    debug_assert_eq!(g.w_in.len(), INPUTS);
    g
}

pub fn init_population<R: Rng + ?Sized>(size: usize, n_hidden: usize, rng: &mut R) -> Vec<Genome> {
    (0..size).map(|_| init_genome(n_hidden, rng)).collect()
}

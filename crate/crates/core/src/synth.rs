//! Seeded synthetic-truth harness: draws datasets from known functions with
//! a certified gradient-norm bound and bounded noise, so membership and
//! containment claims can be tested against ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{BoundingBox, Dataset, Sample};
use crate::error::{Error, Result};

/// Truth function shapes with analytically certified gradient bounds.
#[derive(Debug, Clone)]
pub enum TruthFn {
    /// offset + amplitude * sin(frequency * u + phase), one input.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
    /// Polynomial in one input, coefficients low-to-high degree.
    Polynomial { coeffs: Vec<f64> },
    /// Sum of Gaussian bumps a_i * exp(-||u - c_i||^2 / width^2), any input
    /// dimension.
    RadialMixture {
        centers: Vec<Vec<f64>>,
        weights: Vec<f64>,
        width: f64,
    },
}

impl TruthFn {
    pub fn input_dim(&self) -> usize {
        match self {
            TruthFn::Sinusoid { .. } | TruthFn::Polynomial { .. } => 1,
            TruthFn::RadialMixture { centers, .. } => centers[0].len(),
        }
    }

    pub fn evaluate(&self, u: &[f64]) -> f64 {
        match self {
            TruthFn::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => offset + amplitude * (frequency * u[0] + phase).sin(),
            TruthFn::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, &c| acc * u[0] + c),
            TruthFn::RadialMixture {
                centers,
                weights,
                width,
            } => centers
                .iter()
                .zip(weights)
                .map(|(c, &w)| {
                    let d2: f64 = c.iter().zip(u).map(|(&ci, &x)| (x - ci) * (x - ci)).sum();
                    w * (-d2 / (width * width)).exp()
                })
                .sum(),
        }
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        match self {
            TruthFn::Sinusoid {
                amplitude,
                frequency,
                phase,
                ..
            } => vec![amplitude * frequency * (frequency * u[0] + phase).cos()],
            TruthFn::Polynomial { coeffs } => {
                let mut g = 0.0;
                for (k, &c) in coeffs.iter().enumerate().skip(1) {
                    g += k as f64 * c * u[0].powi(k as i32 - 1);
                }
                vec![g]
            }
            TruthFn::RadialMixture {
                centers,
                weights,
                width,
            } => {
                let w2 = width * width;
                let mut g = vec![0.0; u.len()];
                for (c, &w) in centers.iter().zip(weights) {
                    let d2: f64 = c.iter().zip(u).map(|(&ci, &x)| (x - ci) * (x - ci)).sum();
                    let v = w * (-d2 / w2).exp();
                    for (d, (&ci, &x)) in c.iter().zip(u).enumerate() {
                        g[d] += -2.0 * (x - ci) / w2 * v;
                    }
                }
                g
            }
        }
    }

    /// Certified upper bound on the gradient norm over the box (global bound
    /// for sinusoids and radial mixtures, interval endpoint analysis for
    /// polynomials).
    pub fn gradient_bound(&self, bounds: &BoundingBox) -> f64 {
        match self {
            TruthFn::Sinusoid {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency).abs(),
            TruthFn::Polynomial { coeffs } => {
                // |p'(u)| <= sum_k k*|c_k|*r^(k-1) with r = max |endpoint|.
                let r = bounds.lower()[0].abs().max(bounds.upper()[0].abs());
                coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &c)| k as f64 * c.abs() * r.powi(k as i32 - 1))
                    .sum()
            }
            TruthFn::RadialMixture {
                weights, width, ..
            } => {
                // Each bump's gradient norm peaks at sqrt(2/e)/width * |a_i|.
                let peak = (2.0f64 / std::f64::consts::E).sqrt() / width;
                weights.iter().map(|w| w.abs() * peak).sum()
            }
        }
    }
}

/// A truth function pinned to a box, with its certified gradient bound and
/// noise amplitude.
#[derive(Debug, Clone)]
pub struct SyntheticTruth {
    shape: TruthFn,
    bounds: BoundingBox,
    gamma_o: f64,
    noise_bound: f64,
}

impl SyntheticTruth {
    pub fn new(shape: TruthFn, bounds: BoundingBox, noise_bound: f64) -> Result<Self> {
        if shape.input_dim() != bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.input_dim(),
                got: bounds.dim(),
            });
        }
        if !(noise_bound.is_finite() && noise_bound >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise bound must be finite and nonnegative, got {noise_bound}"
            )));
        }
        let gamma_o = shape.gradient_bound(&bounds);
        Ok(Self {
            shape,
            bounds,
            gamma_o,
            noise_bound,
        })
    }

    pub fn shape(&self) -> &TruthFn {
        &self.shape
    }

    pub fn bounds(&self) -> &BoundingBox {
        &self.bounds
    }

    /// Certified gradient-norm bound over the box.
    pub fn gamma_o(&self) -> f64 {
        self.gamma_o
    }

    pub fn noise_bound(&self) -> f64 {
        self.noise_bound
    }

    pub fn evaluate(&self, u: &[f64]) -> f64 {
        self.shape.evaluate(u)
    }

    /// Draws `m` samples: inputs uniform in the box, outputs corrupted by
    /// uniform noise in [-noise_bound, noise_bound]. Deterministic per seed.
    pub fn generate(&self, m: usize, seed: u64) -> Result<Dataset> {
        if m == 0 {
            return Err(Error::EmptyInput("requested sample count"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.bounds.dim();
        let mut samples = Vec::with_capacity(m);
        for _ in 0..m {
            let u: Vec<f64> = (0..dim)
                .map(|i| {
                    let (lo, hi) = (self.bounds.lower()[i], self.bounds.upper()[i]);
                    if lo == hi {
                        lo
                    } else {
                        rng.gen_range(lo..=hi)
                    }
                })
                .collect();
            let noise = if self.noise_bound == 0.0 {
                0.0
            } else {
                rng.gen_range(-self.noise_bound..=self.noise_bound)
            };
            samples.push(Sample::new(u.clone(), self.shape.evaluate(&u) + noise)?);
        }
        Dataset::new(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SmHypotheses;
    use crate::falsification::falsify;
    use crate::grid::{Grid, GridLayout};

    fn interval(lo: f64, hi: f64) -> BoundingBox {
        BoundingBox::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn zero_noise_reproduces_truth_exactly() {
        let t = SyntheticTruth::new(
            TruthFn::Polynomial {
                coeffs: vec![1.0, -2.0, 0.5],
            },
            interval(-1.0, 2.0),
            0.0,
        )
        .unwrap();
        let d = t.generate(50, 7).unwrap();
        for s in d.samples() {
            assert_eq!(s.output(), t.evaluate(s.input()));
        }
    }

    #[test]
    fn identical_seeds_are_bit_exact() {
        let t = SyntheticTruth::new(
            TruthFn::Sinusoid {
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0,
                offset: 0.0,
            },
            interval(0.0, std::f64::consts::TAU),
            0.05,
        )
        .unwrap();
        let a = t.generate(100, 42).unwrap();
        let b = t.generate(100, 42).unwrap();
        assert_eq!(a.samples(), b.samples());
        let c = t.generate(100, 43).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn constant_truth_unfalsified_at_zero_gamma() {
        let t = SyntheticTruth::new(
            TruthFn::Polynomial { coeffs: vec![3.0] },
            interval(0.0, 1.0),
            0.1,
        )
        .unwrap();
        assert_eq!(t.gamma_o(), 0.0);
        let d = t.generate(40, 1).unwrap();
        let h = SmHypotheses::new(0.0, t.noise_bound()).unwrap();
        assert!(!falsify(&d, h).falsified);
    }

    #[test]
    fn sine_truth_never_falsifies_its_certificate() {
        let t = SyntheticTruth::new(
            TruthFn::Sinusoid {
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0,
                offset: 0.0,
            },
            interval(0.0, std::f64::consts::TAU),
            0.05,
        )
        .unwrap();
        assert_eq!(t.gamma_o(), 1.0);
        let h = SmHypotheses::new(t.gamma_o(), t.noise_bound()).unwrap();
        for seed in 0..100 {
            let d = t.generate(30, seed).unwrap();
            assert!(!falsify(&d, h).falsified, "seed {seed}");
        }
    }

    #[test]
    fn gradient_bounds_dominate_sampled_gradients() {
        let truths = vec![
            TruthFn::Polynomial {
                coeffs: vec![0.3, -1.2, 0.7, 0.05],
            },
            TruthFn::Sinusoid {
                amplitude: 2.0,
                frequency: 1.5,
                phase: 0.3,
                offset: -1.0,
            },
        ];
        let bounds = interval(-2.0, 3.0);
        for shape in truths {
            let cert = shape.gradient_bound(&bounds);
            let grid = Grid::new(&bounds, 2001, GridLayout::Endpoints).unwrap();
            for pt in grid.iter() {
                let g: f64 = shape.gradient(&pt).iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(g <= cert + 1e-12, "{shape:?} at {pt:?}: {g} > {cert}");
            }
        }
    }

    #[test]
    fn radial_mixture_bound_in_two_dims() {
        let shape = TruthFn::RadialMixture {
            centers: vec![vec![0.2, 0.4], vec![0.8, 0.1]],
            weights: vec![1.5, -0.7],
            width: 0.5,
        };
        let bounds = BoundingBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let cert = shape.gradient_bound(&bounds);
        let grid = Grid::new(&bounds, 101, GridLayout::Endpoints).unwrap();
        for pt in grid.iter() {
            let g: f64 = shape.gradient(&pt).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(g <= cert + 1e-12);
        }
        // Finite-difference spot check of the analytic gradient.
        let u = [0.33, 0.61];
        let g = shape.gradient(&u);
        for d in 0..2 {
            let h = 1e-6;
            let mut up = u.to_vec();
            up[d] += h;
            let mut dn = u.to_vec();
            dn[d] -= h;
            let fd = (shape.evaluate(&up) - shape.evaluate(&dn)) / (2.0 * h);
            assert!((g[d] - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn generation_respects_box_and_noise() {
        let t = SyntheticTruth::new(
            TruthFn::Polynomial {
                coeffs: vec![0.0, 1.0],
            },
            interval(2.0, 5.0),
            0.25,
        )
        .unwrap();
        let d = t.generate(200, 9).unwrap();
        for s in d.samples() {
            assert!(t.bounds().contains(s.input()));
            assert!((s.output() - t.evaluate(s.input())).abs() <= 0.25);
        }
    }
}

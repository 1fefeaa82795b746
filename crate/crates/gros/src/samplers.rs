//! Random generators for the simulation studies, driven by an explicit
//! splittable random state.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Normal, Poisson, StandardNormal, StudentT};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Seed plus stream counter. Identical `(seed, stream)` pairs produce
/// identical draws; replicate `r` of an experiment runs on `child(r)`,
/// which is an independent ChaCha stream of the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomState {
    pub seed: u64,
    pub stream: u64,
}

impl RandomState {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn child(&self, replicate: u64) -> Self {
        Self {
            seed: self.seed,
            // stream 0 is the parent; replicates start at 1.
            stream: self.stream.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(replicate + 1),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Parameters of the two-piece (Fernandez-Steel) skew-t noise family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewTParams {
    /// Scale, > 0.
    pub sigma: f64,
    /// Degrees of freedom, > 1 so the mean exists.
    pub nu: f64,
    /// Skewness, > 0; 1 gives the symmetric law.
    pub xi: f64,
    /// Location.
    pub kappa: f64,
}

impl SkewTParams {
    pub fn new(sigma: f64, nu: f64, xi: f64, kappa: f64) -> Self {
        assert!(sigma > 0.0 && xi > 0.0);
        Self {
            sigma,
            nu,
            xi,
            kappa,
        }
    }

    /// `E|T|` for T Student(nu): `2 sqrt(nu) Gamma((nu+1)/2) /
    /// ((nu-1) sqrt(pi) Gamma(nu/2))`.
    pub fn abs_student_mean(nu: f64) -> f64 {
        2.0 * nu.sqrt() * (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp()
            / ((nu - 1.0) * std::f64::consts::PI.sqrt())
    }

    /// Mean of the uncentered two-piece draw, `(xi - 1/xi) sigma E|T| +
    /// kappa`.
    pub fn mean(&self) -> f64 {
        (self.xi - 1.0 / self.xi) * self.sigma * Self::abs_student_mean(self.nu) + self.kappa
    }
}

/// One draw of the three-component bivariate Student mixture, with the
/// component label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledPoint {
    pub point: [f64; 2],
    pub label: usize,
}

/// Mixture weights and component parameters of the clustering scenario.
const MIXTURE_WEIGHTS: [f64; 3] = [0.45, 0.45, 0.10];
const MIXTURE_MEANS: [[f64; 2]; 3] = [[6.0, 0.0], [-6.0, 0.0], [0.0, 6.0]];
const MIXTURE_NU: f64 = 2.0;

/// Lower Cholesky factors of Sigma1 = Sigma2 = 3 I and
/// Sigma3 = [[4, 1], [1, 9]].
fn mixture_cholesky(component: usize) -> [[f64; 2]; 2] {
    match component {
        0 | 1 => {
            let s = 3.0f64.sqrt();
            [[s, 0.0], [0.0, s]]
        }
        _ => {
            // [[a, 0], [b, c]] with a^2 = 4, ab = 1, b^2 + c^2 = 9.
            let a = 2.0;
            let b = 0.5f64;
            let c = (9.0 - b * b).sqrt();
            [[a, 0.0], [b, c]]
        }
    }
}

/// Samples the three-component bivariate Student(2) mixture of the
/// clustering study. Each point is `mu_c + L z sqrt(nu / w)` with `z`
/// standard bivariate normal and `w` chi-square(nu).
pub fn sample_student_mixture<R: Rng>(n: usize, rng: &mut R) -> Vec<LabeledPoint> {
    let chi = ChiSquared::new(MIXTURE_NU).unwrap();
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let label = if u < MIXTURE_WEIGHTS[0] {
                0
            } else if u < MIXTURE_WEIGHTS[0] + MIXTURE_WEIGHTS[1] {
                1
            } else {
                2
            };
            let l = mixture_cholesky(label);
            let z0: f64 = StandardNormal.sample(rng);
            let z1: f64 = StandardNormal.sample(rng);
            let w: f64 = chi.sample(rng);
            let scale = (MIXTURE_NU / w).sqrt();
            let point = [
                MIXTURE_MEANS[label][0] + scale * (l[0][0] * z0),
                MIXTURE_MEANS[label][1] + scale * (l[1][0] * z0 + l[1][1] * z1),
            ];
            LabeledPoint { point, label }
        })
        .collect()
}

/// Mean-centered two-piece skew-t noise: draw |T| with T Student(nu); emit
/// `+sigma xi |T|` with probability `xi^2 / (1 + xi^2)`, else
/// `-sigma |T| / xi`; shift by kappa and subtract the analytic mean.
pub fn sample_skew_t_noise<R: Rng>(n: usize, params: &SkewTParams, rng: &mut R) -> Result<Vec<f64>> {
    if params.nu <= 1.0 {
        return Err(Error::InvalidDegreesOfFreedom(params.nu));
    }
    let student = StudentT::new(params.nu).unwrap();
    let p_plus = params.xi * params.xi / (1.0 + params.xi * params.xi);
    let mean = params.mean();
    Ok((0..n)
        .map(|_| {
            let t: f64 = student.sample(rng);
            let a = t.abs();
            let raw = if rng.gen::<f64>() < p_plus {
                params.sigma * params.xi * a
            } else {
                -params.sigma * a / params.xi
            };
            raw + params.kappa - mean
        })
        .collect())
}

/// Uniform draws from the ring with inner radius `r` and outer radius `R`
/// (area-correct radial inversion).
pub fn sample_uniform_ring<R: Rng>(n: usize, r: f64, outer: f64, rng: &mut R) -> Result<Vec<[f64; 2]>> {
    if !(0.0 <= r && r < outer) {
        return Err(Error::InvalidRing { r, outer });
    }
    Ok((0..n)
        .map(|_| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let u: f64 = rng.gen();
            let radius = (u * (outer * outer - r * r) + r * r).sqrt();
            [radius * theta.cos(), radius * theta.sin()]
        })
        .collect())
}

/// Per-point Bernoulli(lambda) mixture of the unit disk and the thin outer
/// ring `D(1, 1.25)`.
pub fn sample_ring_mixture<R: Rng>(n: usize, lambda: f64, rng: &mut R) -> Result<Vec<[f64; 2]>> {
    assert!((0.0..=1.0).contains(&lambda));
    (0..n)
        .map(|_| {
            let outlier = rng.gen::<f64>() < lambda;
            let pts = if outlier {
                sample_uniform_ring(1, 1.0, 1.25, rng)?
            } else {
                sample_uniform_ring(1, 0.0, 1.0, rng)?
            };
            Ok(pts[0])
        })
        .collect()
}

/// The three point sets of the topology study: 600 uniform points on the
/// unit circle, the same points under N(0, 0.05^2 I) perturbation, and the
/// 90/10 blend of the perturbed sample with a Matern cluster process.
pub struct CircleScenarios {
    pub baseline: Vec<[f64; 2]>,
    pub scenario1: Vec<[f64; 2]>,
    pub scenario2: Vec<[f64; 2]>,
}

pub const CIRCLE_SAMPLE_SIZE: usize = 600;

pub fn sample_circle_scenarios<R: Rng>(rng: &mut R) -> CircleScenarios {
    let n = CIRCLE_SAMPLE_SIZE;
    let baseline: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            [theta.cos(), theta.sin()]
        })
        .collect();

    let noise = Normal::new(0.0, 0.05).unwrap();
    let scenario1: Vec<[f64; 2]> = baseline
        .iter()
        .map(|p| [p[0] + noise.sample(rng), p[1] + noise.sample(rng)])
        .collect();

    // 90% of the perturbed sample, subsampled without replacement.
    let kept = (n * 9) / 10;
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    let mut scenario2: Vec<[f64; 2]> = order[..kept].iter().map(|&i| scenario1[i]).collect();

    // The remaining 10% come from a Matern cluster process on
    // [-0.5, 0.5]^2, resampled to exactly n - kept points.
    let mut cluster = Vec::new();
    while cluster.is_empty() {
        cluster = sample_matern_cluster(3.0, 0.25, 20.0, rng);
    }
    let needed = n - kept;
    for i in 0..needed {
        let pick = if i < cluster.len() {
            cluster[i]
        } else {
            cluster[rng.gen_range(0..cluster.len())]
        };
        scenario2.push(pick);
    }
    scenario2.truncate(n);

    CircleScenarios {
        baseline,
        scenario1,
        scenario2,
    }
}

/// Matern cluster process on `[-0.5, 0.5]^2`: Poisson(`intensity`) parent
/// count, each parent with Poisson(`mean_children`) children uniform in
/// the disk of radius `scale` around it. No edge correction; parents
/// outside the window are not simulated.
pub fn sample_matern_cluster<R: Rng>(
    intensity: f64,
    scale: f64,
    mean_children: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    let parent_count = Poisson::new(intensity).unwrap().sample(rng) as usize;
    let child_count = Poisson::new(mean_children).unwrap();
    let mut points = Vec::new();
    for _ in 0..parent_count {
        let parent = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let children = child_count.sample(rng) as usize;
        for _ in 0..children {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let radius = scale * rng.gen::<f64>().sqrt();
            points.push([
                parent[0] + radius * theta.cos(),
                parent[1] + radius * theta.sin(),
            ]);
        }
    }
    points
}

/// I.i.d. rewards `arm_mean + Student(df)`.
pub fn sample_student_rewards<R: Rng>(arm_mean: f64, df: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let student = StudentT::new(df).unwrap();
    (0..n).map(|_| arm_mean + student.sample(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        RandomState::new(seed).rng()
    }

    #[test]
    fn mixture_weights_are_respected() {
        let mut r = rng(1);
        let sample = sample_student_mixture(100_000, &mut r);
        let mut counts = [0usize; 3];
        for p in &sample {
            counts[p.label] += 1;
        }
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / 1e5).collect();
        assert!((freq[0] - 0.45).abs() < 0.01);
        assert!((freq[1] - 0.45).abs() < 0.01);
        assert!((freq[2] - 0.10).abs() < 0.01);
    }

    #[test]
    fn mixture_component_three_centers_at_its_mean() {
        let mut r = rng(2);
        let sample = sample_student_mixture(100_000, &mut r);
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for p in sample.iter().filter(|p| p.label == 2) {
            xs.push(p.point[0]);
            ys.push(p.point[1]);
        }
        // Heavy tails (nu = 2): medians, not means.
        let med = |v: &mut Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        assert!((med(&mut xs) - 0.0).abs() < 0.1);
        assert!((med(&mut ys) - 6.0).abs() < 0.1);
    }

    #[test]
    fn skew_t_symmetric_at_xi_one() {
        let mut r = rng(3);
        let params = SkewTParams::new(2.0, 3.0, 1.0, 0.0);
        let sample = sample_skew_t_noise(100_000, &params, &mut r).unwrap();
        let above = sample.iter().filter(|&&x| x > 0.0).count() as f64 / 1e5;
        assert!((above - 0.5).abs() < 0.01);
    }

    #[test]
    fn skew_t_is_mean_centered() {
        let mut r = rng(4);
        let params = SkewTParams::new(9.0, 3.0, 9.0, 0.0);
        let sample = sample_skew_t_noise(1_000_000, &params, &mut r).unwrap();
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        assert!(mean.abs() < 0.2, "empirical mean {mean}");
    }

    #[test]
    fn abs_student_mean_closed_form() {
        // nu = 3: E|T| = 2 sqrt(3) / pi.
        let expect = 2.0 * 3.0f64.sqrt() / std::f64::consts::PI;
        assert!((SkewTParams::abs_student_mean(3.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn abs_student_mean_matches_quadrature() {
        // Independent oracle: numeric quadrature of |t| f_nu(t) dt for the
        // Student(3) density.
        let nu = 3.0f64;
        let density = |t: f64| {
            let c = (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp()
                / ((nu * std::f64::consts::PI).sqrt());
            c * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0)
        };
        let mut integral = 0.0;
        let (lo, hi, steps) = (0.0, 2000.0, 4_000_000);
        let h = (hi - lo) / steps as f64;
        for i in 0..steps {
            let t0 = lo + i as f64 * h;
            let t1 = t0 + h;
            integral += 0.5 * h * (t0 * density(t0) + t1 * density(t1));
        }
        let by_quadrature = 2.0 * integral;
        assert!((SkewTParams::abs_student_mean(nu) - by_quadrature).abs() < 1e-3);
    }

    #[test]
    fn skew_t_rejects_small_nu() {
        let mut r = rng(5);
        let params = SkewTParams::new(1.0, 1.0, 1.0, 0.0);
        assert!(sample_skew_t_noise(10, &params, &mut r).is_err());
    }

    #[test]
    fn ring_radii_and_mean_radius() {
        let mut r = rng(6);
        let disk = sample_uniform_ring(100_000, 0.0, 1.0, &mut r).unwrap();
        let radii: Vec<f64> = disk.iter().map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt()).collect();
        assert!(radii.iter().all(|&x| x <= 1.0));
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01);

        let ring = sample_uniform_ring(10_000, 1.0, 1.25, &mut r).unwrap();
        assert!(ring
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .all(|x| (1.0..=1.25).contains(&x)));

        assert!(sample_uniform_ring(1, 2.0, 1.0, &mut r).is_err());
    }

    #[test]
    fn ring_mixture_extremes() {
        let mut r = rng(7);
        let clean = sample_ring_mixture(2000, 0.0, &mut r).unwrap();
        assert!(clean.iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0));

        let noisy = sample_ring_mixture(2000, 1.0, &mut r).unwrap();
        assert!(noisy
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .all(|x| (1.0..=1.25).contains(&x)));
    }

    #[test]
    fn circle_scenarios_shapes() {
        let mut r = rng(8);
        let s = sample_circle_scenarios(&mut r);
        assert_eq!(s.baseline.len(), 600);
        assert_eq!(s.scenario1.len(), 600);
        assert_eq!(s.scenario2.len(), 600);
        assert!(s
            .baseline
            .iter()
            .all(|p| ((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-12));
        let mean_radius = s
            .scenario1
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .sum::<f64>()
            / 600.0;
        assert!((mean_radius - 1.0).abs() < 0.01);
    }

    #[test]
    fn matern_children_stay_near_some_parent() {
        // Children lie within `scale` of their parent; parents live in the
        // window, so every point stays inside the window inflated by scale.
        let mut r = rng(9);
        for _ in 0..20 {
            let pts = sample_matern_cluster(3.0, 0.25, 20.0, &mut r);
            assert!(pts
                .iter()
                .all(|p| p[0].abs() <= 0.75 && p[1].abs() <= 0.75));
        }
    }

    #[test]
    fn student_rewards_moments() {
        let mut r = rng(10);
        let sample = sample_student_rewards(7.0, 3.0, 1_000_000, &mut r);
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        assert!((mean - 7.0).abs() < 0.05);
        let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / sample.len() as f64;
        assert!((var - 3.0).abs() < 0.3, "empirical variance {var}");
    }

    #[test]
    fn identical_state_identical_samples() {
        let state = RandomState::new(99).child(3);
        let a = sample_student_mixture(100, &mut state.rng());
        let b = sample_student_mixture(100, &mut state.rng());
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_decorrelate() {
        let root = RandomState::new(42);
        let a: Vec<f64> = {
            let mut r = root.child(1).rng();
            (0..100_000).map(|_| r.gen::<f64>()).collect()
        };
        let b: Vec<f64> = {
            let mut r = root.child(2).rng();
            (0..100_000).map(|_| r.gen::<f64>()).collect()
        };
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(&a), mean(&b));
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>()
            / a.len() as f64;
        let sd = |v: &[f64], m: f64| {
            (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
        };
        let rho = cov / (sd(&a, ma) * sd(&b, mb));
        assert!(rho.abs() < 0.01, "cross-stream correlation {rho}");
    }
}

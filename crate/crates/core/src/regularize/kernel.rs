use std::f64::consts::PI;

use crate::geometry::quadrature::gauss_legendre_unit;

/// Unnormalized profile `(1-t)^{-2} exp(1/(t-1))` on `[0,1)`, zero beyond.
pub fn chi_profile(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (1.0 / (t - 1.0)).exp() / ((1.0 - t) * (1.0 - t))
    }
}

/// Radial smoothing kernel `χ(|ζ|^2)` on the unit ball of `C^n`, together with
/// a product quadrature (Gauss-Legendre in the radius, uniform in the sphere
/// angles). Sample weights are normalized so that the rule has mass one.
#[derive(Debug, Clone)]
pub struct SmoothingKernel {
    n: usize,
    normalizer: f64,
    points: Vec<[f64; 4]>,
    weights: Vec<f64>,
    /// Radial nodes and their share of the mass, for the exact angular
    /// average used by [`SmoothingKernel::multiplier`].
    radii: Vec<(f64, f64)>,
}

pub const RADIAL_ORDER: usize = 48;
pub const ANGULAR_ORDER: usize = 32;

impl SmoothingKernel {
    pub fn new(n: usize) -> Self {
        Self::with_orders(n, RADIAL_ORDER, ANGULAR_ORDER)
    }

    pub fn with_orders(n: usize, radial: usize, angular: usize) -> Self {
        assert!(n == 1 || n == 2, "complex dimension must be 1 or 2");
        let (r, wr) = gauss_legendre_unit(radial);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut radii = Vec::new();
        let da = 2.0 * PI / angular as f64;
        for (&ri, &wi) in r.iter().zip(&wr) {
            let radial_w = wi * chi_profile(ri * ri) * ri.powi(2 * n as i32 - 1);
            radii.push((ri, radial_w));
            if n == 1 {
                for a in 0..angular {
                    let (s, c) = (a as f64 * da).sin_cos();
                    points.push([ri * c, ri * s, 0.0, 0.0]);
                    weights.push(radial_w * 2.0 * PI / angular as f64);
                }
            } else {
                // Hopf coordinates: (θ1, θ2, u = sin^2 η) are uniform on S^3
                let sphere = 2.0 * PI * PI / (angular * angular * angular) as f64;
                for b in 0..angular {
                    let u = (b as f64 + 0.5) / angular as f64;
                    let (c1, c2) = ((1.0 - u).sqrt(), u.sqrt());
                    for a1 in 0..angular {
                        let (s1, k1) = (a1 as f64 * da).sin_cos();
                        for a2 in 0..angular {
                            let (s2, k2) = (a2 as f64 * da).sin_cos();
                            points.push([ri * c1 * k1, ri * c1 * s1, ri * c2 * k2, ri * c2 * s2]);
                            weights.push(radial_w * sphere);
                        }
                    }
                }
            }
        }
        let raw: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= raw;
        }
        let radial_mass: f64 = radii.iter().map(|r| r.1).sum();
        for r in &mut radii {
            r.1 /= radial_mass;
        }
        Self {
            n,
            normalizer: 1.0 / raw,
            points,
            weights,
            radii,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The constant `C_n` making `∫_{|x|<=1} χ(|x|^2) dx = 1`, as computed by
    /// the radial rule.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn chi(&self, t: f64) -> f64 {
        self.normalizer * chi_profile(t)
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ |ζ|^2 χ(|ζ|^2) dζ`.
    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * p.iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    /// Factor by which convolution at radius `t` multiplies the Fourier mode
    /// `k`, and its derivative in `log t`.
    ///
    /// The sphere average of `cos(x ω·e)` is `J0(x)` on `S^1` and `2 J1(x)/x`
    /// on `S^3`, so only the radial rule is summed.
    pub fn multiplier(&self, k: &[i32; 4], t: f64) -> (f64, f64) {
        let k2: i32 = k.iter().map(|v| v * v).sum();
        if k2 == 0 {
            return (1.0, 0.0);
        }
        let scale = 2.0 * PI * t * (k2 as f64).sqrt();
        let mut m = 0.0;
        let mut dm = 0.0;
        for &(r, w) in &self.radii {
            let x = scale * r;
            let [j0, j1, j2] = bessel_j012(x);
            let (a, da) = if self.n == 1 {
                (j0, -j1)
            } else if x < 1e-8 {
                (1.0 - x * x / 8.0, -x / 4.0)
            } else {
                (2.0 * j1 / x, -2.0 * j2 / x)
            };
            m += w * a;
            dm += w * x * da;
        }
        (m, dm)
    }

    /// The same multiplier summed over the full product rule.
    pub fn multiplier_by_quadrature(&self, k: &[i32; 4], t: f64) -> (f64, f64) {
        if k.iter().all(|&v| v == 0) {
            return (1.0, 0.0);
        }
        let mut m = 0.0;
        let mut dm = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let ph = 2.0 * PI * (0..4).map(|a| k[a] as f64 * p[a]).sum::<f64>();
            let (s, c) = (t * ph).sin_cos();
            m += w * c;
            dm -= w * s * t * ph;
        }
        (m, dm)
    }
}

/// `J0, J1, J2` at `x >= 0` by Miller's backward recurrence.
pub fn bessel_j012(x: f64) -> [f64; 3] {
    if x < 1e-8 {
        return [1.0 - x * x / 4.0, x / 2.0, x * x / 8.0];
    }
    let top = 2 * ((x as usize + 2) + (40.0 * (x + 1.0)).sqrt() as usize + 10) / 2;
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut out = [0.0; 3];
    let mut norm = 0.0;
    for m in (1..=top).rev() {
        let jm = 2.0 * m as f64 / x * j - jp;
        jp = j;
        j = jm;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
        // j now holds J_{m-1}
        if m - 1 <= 2 {
            out[m - 1] = j;
        }
        if (m - 1) % 2 == 0 && m - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    [out[0] / norm, out[1] / norm, out[2] / norm]
}

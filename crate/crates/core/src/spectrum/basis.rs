use num_complex::Complex64;

use super::SpectrumError;

type C = Complex64;

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalized(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(a, a).sqrt();
    if n.is_finite() && n > 0.0 {
        Some(a.map(|v| v / n))
    } else {
        None
    }
}

/// Helicity vectors `ε_± = (ê₁ ± iê₂)/√2` with `ê₁ = n̂×k̂/|n̂×k̂|` and
/// `ê₂ = k̂×ê₁`. On the seam `k̂ ∥ ±n̂` the anchor `ê₁ = p̂` is used, which for
/// `n̂ = ẑ` gives `(x̂ ± iŷ)/√2` at `+ẑ` and `(x̂ ∓ iŷ)/√2` at `−ẑ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationBasis {
    axis: [f64; 3],
    anchor: [f64; 3],
}

/// Below this `|n̂×k̂|` a wavevector counts as lying on the seam.
const SEAM: f64 = 1e-12;

impl Default for PolarizationBasis {
    fn default() -> Self {
        PolarizationBasis {
            axis: [0.0, 0.0, 1.0],
            anchor: [1.0, 0.0, 0.0],
        }
    }
}

impl PolarizationBasis {
    /// Basis with its seam along `axis`. The anchor is the coordinate axis
    /// least aligned with it, made orthogonal.
    pub fn with_axis(axis: [f64; 3]) -> Result<Self, SpectrumError> {
        let n = normalized(axis).ok_or(SpectrumError::ZeroWavevector)?;
        let mut best = 0;
        for i in 1..3 {
            if n[i].abs() < n[best].abs() {
                best = i;
            }
        }
        let mut e = [0.0; 3];
        e[best] = 1.0;
        let d = dot(e, n);
        let p = normalized([e[0] - d * n[0], e[1] - d * n[1], e[2] - d * n[2]]).expect("anchor is independent of the axis");
        Ok(PolarizationBasis { axis: n, anchor: p })
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    /// `(ε_{+1}, ε_{−1})` at wavevector `k`.
    pub fn at(&self, k: [f64; 3]) -> Result<([C; 3], [C; 3]), SpectrumError> {
        let khat = normalized(k).ok_or(SpectrumError::ZeroWavevector)?;
        let nk = cross(self.axis, khat);
        let e1 = if dot(nk, nk).sqrt() < SEAM {
            self.anchor
        } else {
            normalized(nk).expect("checked above")
        };
        let e2 = cross(khat, e1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = std::array::from_fn(|i| C::new(e1[i] * s, e2[i] * s));
        let minus = std::array::from_fn(|i| C::new(e1[i] * s, -e2[i] * s));
        Ok((plus, minus))
    }
}

/// The default helicity pair at `k`.
pub fn polarization_basis(k: [f64; 3]) -> Result<([C; 3], [C; 3]), SpectrumError> {
    PolarizationBasis::default().at(k)
}

/// `u*·v`.
pub fn hdot(u: &[C; 3], v: &[C; 3]) -> C {
    u[0].conj() * v[0] + u[1].conj() * v[1] + u[2].conj() * v[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: C, b: C) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn anchor_on_the_axis() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (p, m) = polarization_basis([0.0, 0.0, 2.5]).unwrap();
        assert!(close(p[0], C::new(s, 0.0)) && close(p[1], C::new(0.0, s)) && close(p[2], C::new(0.0, 0.0)));
        assert!(close(m[0], C::new(s, 0.0)) && close(m[1], C::new(0.0, -s)));
        let (p, _) = polarization_basis([0.0, 0.0, -1.0]).unwrap();
        assert!(close(p[0], C::new(s, 0.0)) && close(p[1], C::new(0.0, -s)));
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(polarization_basis([0.0; 3]), Err(SpectrumError::ZeroWavevector)));
    }

    #[test]
    fn orthonormal_and_transverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let bases = [
            PolarizationBasis::default(),
            PolarizationBasis::with_axis([0.3, -0.8, 0.1]).unwrap(),
        ];
        for _ in 0..2000 {
            let k = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let kn = dot(k, k).sqrt();
            for b in &bases {
                let (p, m) = b.at(k).unwrap();
                assert!((hdot(&p, &p) - 1.0).norm() < 1e-15);
                assert!((hdot(&m, &m) - 1.0).norm() < 1e-15);
                assert!(hdot(&p, &m).norm() < 1e-15);
                for e in [p, m] {
                    let kd = e[0] * k[0] + e[1] * k[1] + e[2] * k[2];
                    assert!(kd.norm() < 1e-15 * kn);
                }
            }
        }
    }

    #[test]
    fn completeness_on_transverse_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..500 {
            let k = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let khat = normalized(k).unwrap();
            let raw: [C; 3] = std::array::from_fn(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let kd = raw[0] * khat[0] + raw[1] * khat[1] + raw[2] * khat[2];
            let v: [C; 3] = std::array::from_fn(|i| raw[i] - kd * khat[i]);
            let (p, m) = polarization_basis(k).unwrap();
            let (ap, am) = (hdot(&p, &v), hdot(&m, &v));
            for i in 0..3 {
                assert!((ap * p[i] + am * m[i] - v[i]).norm() < 1e-14);
            }
        }
    }
}

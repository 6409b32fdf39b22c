use serde::{Deserialize, Serialize};

use super::NumericsError;

/// How an axis is laid out. Every recipe is the trapezoid rule in a mapped
/// variable, so doubling `n` over the same range nests the old nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AxisRecipe {
    /// Nodes `j·max/n`, `j = 1..=n`. The origin is dropped: radial
    /// integrands carry a factor of the radius and vanish there.
    RadialLinear { max: f64, n: usize },
    /// `n + 1` log-spaced nodes on `[min, max]`.
    RadialLog { min: f64, max: f64, n: usize },
    /// `x = scale·sinh(u)` with `u_j = j·Δ`, `j = 1..=n`, reaching `max`.
    RadialSinh { scale: f64, max: f64, n: usize },
    /// `2n + 1` equispaced nodes on `[-half_width, half_width]`.
    SymmetricLinear { half_width: f64, n: usize },
    /// `x = scale·sinh(u)` with `u_j = j·Δ`, `j = -n..=n`.
    SymmetricSinh { scale: f64, half_width: f64, n: usize },
    /// `x = width·asinh((scale/width)·sinh u)`, `j = 1..=n`: geometric
    /// spacing out to about `width`, then spacing capped near `width·Δ`.
    RadialGraded { scale: f64, width: f64, max: f64, n: usize },
    /// Symmetric counterpart of `RadialGraded`, `j = -n..=n`.
    SymmetricGraded { scale: f64, width: f64, half_width: f64, n: usize },
    /// `n + 1` equispaced nodes on `[min, max]`.
    Linear { min: f64, max: f64, n: usize },
}

impl AxisRecipe {
    pub fn count(&self) -> usize {
        match *self {
            AxisRecipe::RadialLinear { n, .. } | AxisRecipe::RadialSinh { n, .. } | AxisRecipe::RadialGraded { n, .. } => n,
            AxisRecipe::RadialLog { n, .. } | AxisRecipe::Linear { n, .. } => n + 1,
            AxisRecipe::SymmetricLinear { n, .. }
            | AxisRecipe::SymmetricSinh { n, .. }
            | AxisRecipe::SymmetricGraded { n, .. } => 2 * n + 1,
        }
    }

    pub fn refined(&self) -> AxisRecipe {
        let mut r = *self;
        match &mut r {
            AxisRecipe::RadialLinear { n, .. }
            | AxisRecipe::RadialLog { n, .. }
            | AxisRecipe::RadialSinh { n, .. }
            | AxisRecipe::SymmetricLinear { n, .. }
            | AxisRecipe::SymmetricSinh { n, .. }
            | AxisRecipe::RadialGraded { n, .. }
            | AxisRecipe::SymmetricGraded { n, .. }
            | AxisRecipe::Linear { n, .. } => *n *= 2,
        }
        r
    }

    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            AxisRecipe::RadialLinear { .. }
                | AxisRecipe::RadialLog { .. }
                | AxisRecipe::RadialSinh { .. }
                | AxisRecipe::RadialGraded { .. }
        )
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            AxisRecipe::SymmetricLinear { .. } | AxisRecipe::SymmetricSinh { .. } | AxisRecipe::SymmetricGraded { .. }
        )
    }

    /// The largest node magnitude.
    pub fn extent(&self) -> f64 {
        match *self {
            AxisRecipe::RadialLinear { max, .. }
            | AxisRecipe::RadialLog { max, .. }
            | AxisRecipe::RadialSinh { max, .. }
            | AxisRecipe::RadialGraded { max, .. } => max,
            AxisRecipe::SymmetricLinear { half_width, .. }
            | AxisRecipe::SymmetricSinh { half_width, .. }
            | AxisRecipe::SymmetricGraded { half_width, .. } => half_width,
            AxisRecipe::Linear { min, max, .. } => min.abs().max(max.abs()),
        }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(NumericsError::InvalidGrid(format!("{name} must be positive, got {v}")))
            }
        };
        let count = |n: usize| {
            if n >= 1 {
                Ok(())
            } else {
                Err(NumericsError::InvalidGrid("node count must be at least 1".into()))
            }
        };
        match *self {
            AxisRecipe::RadialLinear { max, n } => {
                pos("max", max)?;
                count(n)
            }
            AxisRecipe::RadialLog { min, max, n } => {
                pos("min", min)?;
                pos("max", max)?;
                count(n)?;
                if min < max {
                    Ok(())
                } else {
                    Err(NumericsError::InvalidGrid(format!("min {min} must be below max {max}")))
                }
            }
            AxisRecipe::RadialSinh { scale, max, n } => {
                pos("scale", scale)?;
                pos("max", max)?;
                count(n)
            }
            AxisRecipe::SymmetricLinear { half_width, n } => {
                pos("half_width", half_width)?;
                count(n)
            }
            AxisRecipe::RadialGraded { scale, width, max, n } => {
                pos("scale", scale)?;
                pos("width", width)?;
                pos("max", max)?;
                count(n)
            }
            AxisRecipe::SymmetricGraded { scale, width, half_width, n } => {
                pos("scale", scale)?;
                pos("width", width)?;
                pos("half_width", half_width)?;
                count(n)
            }
            AxisRecipe::SymmetricSinh { scale, half_width, n } => {
                pos("scale", scale)?;
                pos("half_width", half_width)?;
                count(n)
            }
            AxisRecipe::Linear { min, max, n } => {
                count(n)?;
                if min.is_finite() && max.is_finite() && min < max {
                    Ok(())
                } else {
                    Err(NumericsError::InvalidGrid(format!("need finite min < max, got [{min}, {max}]")))
                }
            }
        }
    }
}

fn skips_origin(r: &AxisRecipe) -> bool {
    matches!(
        r,
        AxisRecipe::RadialLinear { .. } | AxisRecipe::RadialSinh { .. } | AxisRecipe::RadialGraded { .. }
    )
}

fn graded_extent(scale: f64, width: f64, max: f64) -> f64 {
    // asinh((w/s)·sinh(max/w)) without overflowing sinh for max ≫ w.
    let a = max / width;
    if a < 700.0 {
        ((width / scale) * a.sinh()).asinh()
    } else {
        a + (width / scale).ln()
    }
}

fn graded_map(scale: f64, width: f64) -> impl Fn(f64) -> (f64, f64) {
    move |u: f64| {
        let q = scale / width * u.sinh();
        (width * q.asinh(), scale * u.cosh() / q.hypot(1.0))
    }
}

/// Nodes and trapezoid weights of one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisGrid {
    recipe: AxisRecipe,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    radial: Vec<f64>,
}

fn trapezoid(u: impl Iterator<Item = f64>, du: f64, map: impl Fn(f64) -> (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    let (nodes, weights): (Vec<f64>, Vec<f64>) = u
        .map(|u| {
            let (x, dx) = map(u);
            (x, dx * du)
        })
        .unzip();
    (nodes, weights)
}

impl AxisGrid {
    pub fn new(recipe: AxisRecipe) -> Result<Self, NumericsError> {
        recipe.validate()?;
        let (nodes, mut weights) = match recipe {
            AxisRecipe::RadialLinear { max, n } => {
                let h = max / n as f64;
                trapezoid((1..=n).map(|j| j as f64 * h), h, |x| (x, 1.0))
            }
            AxisRecipe::RadialLog { min, max, n } => {
                let (a, b) = (min.ln(), max.ln());
                let du = (b - a) / n as f64;
                trapezoid((0..=n).map(|j| a + j as f64 * du), du, |u| (u.exp(), u.exp()))
            }
            AxisRecipe::RadialSinh { scale, max, n } => {
                let du = (max / scale).asinh() / n as f64;
                trapezoid((1..=n).map(|j| j as f64 * du), du, |u| {
                    (scale * u.sinh(), scale * u.cosh())
                })
            }
            AxisRecipe::SymmetricLinear { half_width, n } => {
                let h = half_width / n as f64;
                let m = n as i64;
                trapezoid((-m..=m).map(|j| j as f64 * h), h, |x| (x, 1.0))
            }
            AxisRecipe::SymmetricSinh { scale, half_width, n } => {
                let du = (half_width / scale).asinh() / n as f64;
                let m = n as i64;
                trapezoid((-m..=m).map(|j| j as f64 * du), du, |u| {
                    (scale * u.sinh(), scale * u.cosh())
                })
            }
            AxisRecipe::RadialGraded { scale, width, max, n } => {
                let du = graded_extent(scale, width, max) / n as f64;
                trapezoid((1..=n).map(|j| j as f64 * du), du, graded_map(scale, width))
            }
            AxisRecipe::SymmetricGraded { scale, width, half_width, n } => {
                let du = graded_extent(scale, width, half_width) / n as f64;
                let m = n as i64;
                trapezoid((-m..=m).map(|j| j as f64 * du), du, graded_map(scale, width))
            }
            AxisRecipe::Linear { min, max, n } => {
                let h = (max - min) / n as f64;
                trapezoid((0..=n).map(|j| min + j as f64 * h), h, |x| (x, 1.0))
            }
        };
        let last = weights.len() - 1;
        weights[last] *= 0.5;
        // The radial recipes that skip the origin keep a full first weight.
        if !skips_origin(&recipe) {
            weights[0] *= 0.5;
        }
        // Exact endpoints and exact zero at the centre of symmetric grids.
        match recipe {
            AxisRecipe::RadialLinear { max, .. }
            | AxisRecipe::RadialSinh { max, .. }
            | AxisRecipe::RadialGraded { max, .. } => {
                let l = nodes.len() - 1;
                let mut nodes = nodes;
                nodes[l] = max;
                Self::finish(recipe, nodes, weights)
            }
            AxisRecipe::SymmetricLinear { half_width, n }
            | AxisRecipe::SymmetricSinh { half_width, n, .. }
            | AxisRecipe::SymmetricGraded { half_width, n, .. } => {
                let mut nodes = nodes;
                nodes[0] = -half_width;
                nodes[2 * n] = half_width;
                nodes[n] = 0.0;
                Self::finish(recipe, nodes, weights)
            }
            AxisRecipe::RadialLog { min, max, n } | AxisRecipe::Linear { min, max, n } => {
                let mut nodes = nodes;
                nodes[0] = min;
                nodes[n] = max;
                Self::finish(recipe, nodes, weights)
            }
        }
    }

    fn finish(recipe: AxisRecipe, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self, NumericsError> {
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericsError::InvalidGrid("nodes are not strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(NumericsError::InvalidGrid("weights must be positive and finite".into()));
        }
        let mut radial: Vec<f64> = nodes.iter().zip(&weights).map(|(x, w)| x * w).collect();
        // For `∫ x f(x) dx` with f even in x the mapped integrand is odd, and
        // the plain trapezoid keeps an `h²·G'(0)/12` origin term. Estimating
        // G'(0) from the first two nodes removes it.
        if skips_origin(&recipe) && radial.len() >= 3 {
            radial[0] *= 1.0 + 1.0 / 9.0;
            radial[1] *= 1.0 - 1.0 / 72.0;
        }
        Ok(AxisGrid { recipe, nodes, weights, radial })
    }

    pub fn recipe(&self) -> AxisRecipe {
        self.recipe
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights for `∫ f(x) x dx` on radial axes, with the origin correction.
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same range, twice the intervals.
    pub fn doubled(&self) -> Self {
        AxisGrid::new(self.recipe.refined()).expect("refining a valid recipe stays valid")
    }

    /// Trapezoid integral of samples taken at the nodes.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64, NumericsError> {
        if samples.len() != self.len() {
            return Err(NumericsError::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            });
        }
        Ok(samples.iter().zip(&self.weights).map(|(f, w)| f * w).sum())
    }
}

/// Tensor-product grid in `(ρ, z)` for azimuthally symmetric integrands.
#[derive(Clone, Debug, PartialEq)]
pub struct CylGrid {
    pub rho: AxisGrid,
    pub z: AxisGrid,
}

impl CylGrid {
    pub fn new(rho: AxisRecipe, z: AxisRecipe) -> Result<Self, NumericsError> {
        if !rho.is_radial() {
            return Err(NumericsError::InvalidGrid("ρ axis needs a radial recipe".into()));
        }
        if !z.is_symmetric() {
            return Err(NumericsError::InvalidGrid("z axis needs a symmetric recipe".into()));
        }
        Ok(CylGrid {
            rho: AxisGrid::new(rho)?,
            z: AxisGrid::new(z)?,
        })
    }

    /// Doubles both counts; the refined grid contains every old node.
    pub fn doubled(&self) -> Self {
        CylGrid {
            rho: self.rho.doubled(),
            z: self.z.doubled(),
        }
    }

    pub fn n_rho(&self) -> usize {
        self.rho.len()
    }

    pub fn n_z(&self) -> usize {
        self.z.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_recipes() -> Vec<AxisRecipe> {
        vec![
            AxisRecipe::RadialLinear { max: 3.0, n: 7 },
            AxisRecipe::RadialLog { min: 1e-3, max: 1e3, n: 40 },
            AxisRecipe::RadialSinh { scale: 0.5, max: 100.0, n: 30 },
            AxisRecipe::SymmetricLinear { half_width: 2.0, n: 5 },
            AxisRecipe::SymmetricSinh { scale: 1.0, half_width: 50.0, n: 20 },
            AxisRecipe::RadialGraded { scale: 0.5, width: 4.0, max: 100.0, n: 40 },
            AxisRecipe::SymmetricGraded { scale: 0.5, width: 4.0, half_width: 100.0, n: 40 },
            AxisRecipe::Linear { min: -1.0, max: 4.0, n: 9 },
        ]
    }

    #[test]
    fn nodes_monotone_weights_positive() {
        for r in all_recipes() {
            let g = AxisGrid::new(r).unwrap();
            assert_eq!(g.len(), r.count());
            assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn doubling_nests_nodes() {
        for r in all_recipes() {
            let g = AxisGrid::new(r).unwrap();
            let f = g.doubled();
            for &x in g.nodes() {
                assert!(
                    f.nodes().iter().any(|&y| (x - y).abs() <= 1e-12 * x.abs().max(1.0)),
                    "{r:?}: node {x} lost"
                );
            }
        }
    }

    #[test]
    fn weights_integrate_constants_and_lines() {
        let g = AxisGrid::new(AxisRecipe::Linear { min: -1.0, max: 4.0, n: 9 }).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones).unwrap() - 5.0).abs() < 1e-14);
        let g = AxisGrid::new(AxisRecipe::RadialLinear { max: 3.0, n: 7 }).unwrap();
        let x: Vec<f64> = g.nodes().to_vec();
        assert!((g.integrate(&x).unwrap() - 4.5).abs() < 1e-13);
    }

    #[test]
    fn origin_correction_is_fourth_order() {
        // ∫ x e^{-x²} dx = 1/2 on [0, ∞)
        let mut errs = vec![];
        let mut g = AxisGrid::new(AxisRecipe::RadialSinh { scale: 0.5, max: 8.0, n: 50 }).unwrap();
        for _ in 0..3 {
            let s: f64 = g.nodes().iter().zip(g.radial_weights()).map(|(x, w)| w * (-x * x).exp()).sum();
            errs.push((s - 0.5).abs());
            g = g.doubled();
        }
        assert!(errs[2] < 1e-8, "{errs:?}");
        assert!(errs[0] / errs[1] > 12.0, "{errs:?}");
    }

    #[test]
    fn graded_spacing_is_capped() {
        let g = AxisGrid::new(AxisRecipe::RadialGraded { scale: 1.0, width: 8.0, max: 100.0, n: 600 }).unwrap();
        let x = g.nodes();
        let widest = x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let du = super::graded_extent(1.0, 8.0, 100.0) / 600.0;
        assert!(widest <= 8.0 * du * 1.0001, "{widest} vs {}", 8.0 * du);
        assert_eq!(x[599], 100.0);
        let s: f64 = x.iter().zip(g.radial_weights()).map(|(x, w)| w * (-x * x).exp()).sum();
        assert!((s - 0.5).abs() < 1e-7, "{s}");
    }

    #[test]
    fn symmetric_grids_are_symmetric() {
        let g = AxisGrid::new(AxisRecipe::SymmetricSinh { scale: 1.0, half_width: 50.0, n: 20 }).unwrap();
        let n = g.len();
        for i in 0..n {
            assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
            assert_eq!(g.weights()[i], g.weights()[n - 1 - i]);
        }
        assert_eq!(g.nodes()[20], 0.0);
    }

    #[test]
    fn bad_recipes_rejected() {
        assert!(AxisGrid::new(AxisRecipe::RadialLog { min: 2.0, max: 1.0, n: 4 }).is_err());
        assert!(AxisGrid::new(AxisRecipe::RadialSinh { scale: 0.0, max: 1.0, n: 4 }).is_err());
        assert!(AxisGrid::new(AxisRecipe::SymmetricLinear { half_width: 1.0, n: 0 }).is_err());
        let lin = AxisRecipe::Linear { min: 0.0, max: 1.0, n: 4 };
        assert!(CylGrid::new(lin, AxisRecipe::SymmetricLinear { half_width: 1.0, n: 2 }).is_err());
    }
}

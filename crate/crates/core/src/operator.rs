//! The convolution operator `A` in Fourier coordinates.
//!
//! For a filter with spectral coordinates `u = Vec_n F_n [phi]`,
//! `A u = Vec_n F_n [y * phi]_0^n`. The non-circular convolution on `[0, n]`
//! is read off a length-`(2n+1)` circular convolution, so
//!
//! ```text
//! A = sqrt(2n+1) Vec_n F_n P_n F_{2n}^H D_y F_{2n} P_n^H F_n^H Vec_n^H,
//! D_y = diag(F_{2n} [y]_{-n}^n),
//! ```
//!
//! and the adjoint is the same chain with `D_y` conjugated.

use rustfft::FftPlanner;

use crate::error::{invalid, Result};
use crate::signal::{wrap_two_sided, ComplexSignal, DftPlan, SpectralVector, C64};

/// Linear map on spectral vectors with a fixed offset `b`, i.e. the data of a
/// bilinear saddle function `<v, A u - b>`.
pub trait LinearMap {
    /// Real dimension of both the domain and the range.
    fn dim(&self) -> usize;
    fn apply(&self, u: &SpectralVector) -> SpectralVector;
    fn apply_adjoint(&self, v: &SpectralVector) -> SpectralVector;
    fn offset(&self) -> &SpectralVector;
    /// An upper bound on the spectral norm of the map.
    fn norm_bound(&self) -> f64;
}

#[derive(Clone, Debug)]
pub struct ConvolutionOperator {
    n: usize,
    diag: Vec<C64>,
    b: SpectralVector,
    short: DftPlan,
    long: DftPlan,
}

impl ConvolutionOperator {
    /// Builds `A` from observations supported on `[-n, n]`.
    pub fn build(y: &ComplexSignal) -> Result<Self> {
        let Some(n) = y.symmetric_half_length() else {
            return invalid(format!(
                "observations must be supported on [-n, n], got [{}, {}]",
                y.start(),
                y.end()
            ));
        };
        let mut planner = FftPlanner::new();
        let short = DftPlan::with_planner(&mut planner, n + 1)?;
        let long = DftPlan::with_planner(&mut planner, 2 * n + 1)?;

        let mut diag = wrap_two_sided(y, n);
        long.forward(&mut diag);

        let mut head = y.window(0, n as i64);
        short.forward(&mut head);

        Ok(Self {
            n,
            diag,
            b: SpectralVector::from_complex(&head),
            short,
            long,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2(n+1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n + 1)
    }

    /// `F_{2n}[y]_{-n}^n`, the diagonal of `D_y`.
    pub fn diag(&self) -> &[C64] {
        &self.diag
    }

    /// `b = Vec_n F_n [y]_0^n`.
    pub fn b(&self) -> &SpectralVector {
        &self.b
    }

    /// `||F_{2n}[y]_{-n}^n||_inf`.
    pub fn spectral_peak(&self) -> f64 {
        self.diag.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    fn check_dim(&self, u: &SpectralVector) -> Result<()> {
        if u.dim() != self.dim() {
            return invalid(format!(
                "spectral vector has dimension {}, operator expects {}",
                u.dim(),
                self.dim()
            ));
        }
        Ok(())
    }

    fn chain(&self, z: &[C64], conjugate: bool) -> Vec<C64> {
        let n = self.n;
        let mut short = z.to_vec();
        self.short.inverse(&mut short);

        let mut long = vec![C64::new(0.0, 0.0); 2 * n + 1];
        long[..=n].copy_from_slice(&short);
        self.long.forward(&mut long);
        for (v, d) in long.iter_mut().zip(&self.diag) {
            *v *= if conjugate { d.conj() } else { *d };
        }
        self.long.inverse(&mut long);

        short.copy_from_slice(&long[..=n]);
        self.short.forward(&mut short);
        let scale = ((2 * n + 1) as f64).sqrt();
        short.iter_mut().for_each(|v| *v *= scale);
        short
    }

    /// The complex form `𝒜 psi = F_n [y * F_n^H psi]`.
    pub fn apply_complex(&self, z: &[C64]) -> Vec<C64> {
        debug_assert_eq!(z.len(), self.n + 1);
        self.chain(z, false)
    }

    pub fn apply_adjoint_complex(&self, z: &[C64]) -> Vec<C64> {
        debug_assert_eq!(z.len(), self.n + 1);
        self.chain(z, true)
    }

    pub fn apply(&self, u: &SpectralVector) -> Result<SpectralVector> {
        self.check_dim(u)?;
        Ok(SpectralVector::from_complex(&self.chain(&u.to_complex(), false)))
    }

    pub fn apply_adjoint(&self, v: &SpectralVector) -> Result<SpectralVector> {
        self.check_dim(v)?;
        Ok(SpectralVector::from_complex(&self.chain(&v.to_complex(), true)))
    }

    /// `sqrt(2n+1) ||F_{2n}[y]_{-n}^n||_inf`, an upper bound on `||A||_{2->2}`.
    pub fn operator_norm_bound(&self) -> f64 {
        ((2 * self.n + 1) as f64).sqrt() * self.spectral_peak()
    }

    /// Exact `||𝒜||_{1->inf}` over complex coordinates: the largest entry
    /// magnitude over the columns `𝒜 e_j`. Costs `n + 1` applications.
    pub fn norm_1_to_inf(&self) -> f64 {
        let mut best = 0.0_f64;
        let mut e = vec![C64::new(0.0, 0.0); self.n + 1];
        for j in 0..=self.n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.chain(&e, false);
            best = col.iter().map(|c| c.norm()).fold(best, f64::max);
            e[j] = C64::new(0.0, 0.0);
        }
        best
    }
}

impl LinearMap for ConvolutionOperator {
    fn dim(&self) -> usize {
        ConvolutionOperator::dim(self)
    }

    fn apply(&self, u: &SpectralVector) -> SpectralVector {
        SpectralVector::from_complex(&self.chain(&u.to_complex(), false))
    }

    fn apply_adjoint(&self, v: &SpectralVector) -> SpectralVector {
        SpectralVector::from_complex(&self.chain(&v.to_complex(), true))
    }

    fn offset(&self) -> &SpectralVector {
        &self.b
    }

    fn norm_bound(&self) -> f64 {
        self.operator_norm_bound()
    }
}

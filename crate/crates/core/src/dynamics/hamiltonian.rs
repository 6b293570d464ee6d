//! Time-dependent Hamiltonians `H(t) = Σₖ eₖ(t) Oₖ`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{CsrMatrix, LinearOperator, SpaceSpec, StateVector};

type EnvelopeFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Complex scalar envelope with bounds used for step-size control.
///
/// `peak` bounds `|e(t)|` and `bandwidth` bounds the angular rate at which the
/// envelope's phase or magnitude varies.
#[derive(Clone)]
pub struct Envelope {
    f: EnvelopeFn,
    pub peak: f64,
    pub bandwidth: f64,
}

impl Envelope {
    pub fn new(f: impl Fn(f64) -> C64 + Send + Sync + 'static, peak: f64, bandwidth: f64) -> Self {
        Self {
            f: Arc::new(f),
            peak,
            bandwidth,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(move |_| c, c.norm(), 0.0)
    }

    pub fn eval(&self, t: f64) -> C64 {
        (self.f)(t)
    }

    /// Complex conjugate envelope.
    pub fn conj(&self) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |t| f(t).conj()),
            peak: self.peak,
            bandwidth: self.bandwidth,
        }
    }
}

impl fmt::Debug for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Envelope")
            .field("peak", &self.peak)
            .field("bandwidth", &self.bandwidth)
            .finish()
    }
}

/// One term `e(t) O`.
#[derive(Clone, Debug)]
pub struct Term {
    pub op: LinearOperator,
    pub envelope: Envelope,
}

/// Sum of modulated operators on a common space.
#[derive(Clone, Debug)]
pub struct PulsedHamiltonian {
    space: SpaceSpec,
    terms: Vec<Term>,
}

impl PulsedHamiltonian {
    pub fn new(space: &SpaceSpec) -> Self {
        Self {
            space: space.clone(),
            terms: Vec::new(),
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn check(&self, op: &LinearOperator) -> Result<()> {
        if op.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Adds a time-independent Hermitian operator.
    pub fn add_static(&mut self, op: LinearOperator) -> Result<()> {
        self.check(&op)?;
        if !op.is_hermitian() {
            return Err(Error::NotHermitian(op.hermiticity_error()));
        }
        self.terms.push(Term {
            op,
            envelope: Envelope::constant(C64::new(1.0, 0.0)),
        });
        Ok(())
    }

    /// Adds `e(t) O + e*(t) O†`.
    pub fn add_with_hc(&mut self, op: LinearOperator, envelope: Envelope) -> Result<()> {
        self.check(&op)?;
        let dag = op.dagger();
        let conj = envelope.conj();
        self.terms.push(Term { op, envelope });
        self.terms.push(Term {
            op: dag,
            envelope: conj,
        });
        Ok(())
    }

    /// Adds a raw term. The caller is responsible for hermiticity.
    pub fn add_raw(&mut self, op: LinearOperator, envelope: Envelope) -> Result<()> {
        self.check(&op)?;
        self.terms.push(Term { op, envelope });
        Ok(())
    }

    /// Concatenates the terms of two Hamiltonians on the same space.
    pub fn extend(&mut self, other: &PulsedHamiltonian) -> Result<()> {
        if other.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    /// Assembled matrix at time `t`.
    pub fn matrix_at(&self, t: f64) -> CsrMatrix {
        let d = self.space.dim();
        self.terms.iter().fold(CsrMatrix::zeros(d, d), |acc, term| {
            acc.add_scaled(term.envelope.eval(t), term.op.matrix())
        })
    }

    /// Assembled operator at time `t`, flagged Hermitian only if it is.
    pub fn operator_at(&self, t: f64) -> LinearOperator {
        let m = self.matrix_at(t);
        let herm = m.max_abs_diff(&m.adjoint()) <= crate::hilbert::operator::HERMITIAN_TOL;
        LinearOperator::new(self.space.clone(), m, herm).expect("assembled on own space")
    }

    /// `out += scale · H(t) x`.
    pub fn apply_acc(&self, t: f64, scale: C64, x: &[C64], out: &mut [C64]) {
        for term in &self.terms {
            let e = term.envelope.eval(t);
            if e != C64::new(0.0, 0.0) {
                term.op.matrix().mul_vec_acc(scale * e, x, out);
            }
        }
    }

    pub fn apply(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut out = StateVector::zeros(&self.space);
        self.apply_acc(
            t,
            C64::new(1.0, 0.0),
            psi.amplitudes().as_slice(),
            out.amplitudes_mut().as_mut_slice(),
        );
        Ok(out)
    }

    /// Upper bound on the angular rate of change of states under this
    /// Hamiltonian: `Σₖ peakₖ‖Oₖ‖∞` plus the largest envelope bandwidth.
    pub fn rate_bound(&self) -> f64 {
        let norm: f64 = self
            .terms
            .iter()
            .map(|t| t.envelope.peak * t.op.matrix().norm_inf())
            .sum();
        let bw = self
            .terms
            .iter()
            .map(|t| t.envelope.bandwidth)
            .fold(0.0, f64::max);
        norm + bw
    }

    /// Largest deviation from hermiticity over the given sample times.
    pub fn hermiticity_error(&self, times: &[f64]) -> f64 {
        times
            .iter()
            .map(|&t| {
                let m = self.matrix_at(t);
                m.max_abs_diff(&m.adjoint())
            })
            .fold(0.0, f64::max)
    }
}

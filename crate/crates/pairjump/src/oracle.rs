//! Exact reference dynamics via eigendecomposition.
//!
//! For joint dimensions small enough to diagonalize, the interaction
//! Hamiltonian `H = sum_alpha A_alpha ⊗ B_alpha` is assembled densely,
//! decomposed once as `H = U diag(lambda) U^dag`, and the joint state
//! evolved exactly, `|Psi(t)> = U e^{-i lambda t} U^dag |Psi(0)>`. Tracing
//! out the environment yields the reference reduced density matrix the
//! stochastic schemes are validated against.
//!
//! The flip-flop star coupling admits a closed form on top of that: starting
//! from the excited system and a fully polarized bath, the excited-state
//! occupation is `n_+(t) = cos^2(2 C t)` for *any* bath size, which pins down
//! both the prefactor convention and the bath-size scaling of the model
//! builder. The two routes — numerical eigendecomposition and closed form —
//! are kept as independent cross-checks.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{C64, DensityMatrix};
use crate::model::InteractionHamiltonian;
use crate::propagator::ProductState;
use crate::{Error, Result};

/// Largest joint dimension `exact_evolve` accepts. Past this the dense
/// eigendecomposition stops being a sane reference tool.
pub const DIMENSION_CAP: usize = 1 << 11;

/// Exact joint evolution reduced to the system: `rho_S(t_k)` on the
/// requested time grid.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    times: Vec<f64>,
    rho_s: Vec<DensityMatrix>,
}

impl ExactSolution {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rho_s(&self) -> &[DensityMatrix] {
        &self.rho_s
    }

    /// Excited-state occupation `Re rho_S[0,0]` per time; the system must be
    /// a two-level one for this to mean anything.
    pub fn occupation(&self) -> Result<Vec<f64>> {
        for rho in &self.rho_s {
            if rho.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: rho.dim(),
                    context: "occupation of a non-two-level system",
                });
            }
        }
        Ok(self.rho_s.iter().map(|r| r.entry(0, 0).re).collect())
    }
}

/// Evolves `initial` exactly under the assembled interaction and returns the
/// reduced system density matrix at each requested time. The initial state
/// is normalized once up front, so the reference has unit trace regardless
/// of the factors' normalization.
pub fn exact_evolve(
    h: &InteractionHamiltonian,
    initial: &ProductState,
    times: &[f64],
) -> Result<ExactSolution> {
    let dim = h.total_dim();
    if dim > DIMENSION_CAP {
        return Err(Error::DimensionCap { dim, cap: DIMENSION_CAP });
    }
    if initial.system().dim() != h.system_dim() || initial.environment().dim() != h.env_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.total_dim(),
            actual: initial.system().dim() * initial.environment().dim(),
            context: "exact evolution initial state",
        });
    }
    for &t in times {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite evolution time {t}")));
        }
    }
    let total = h.assemble_total();
    total.ensure_hermitian()?;
    let psi0 = initial.to_joint().normalized()?;

    let matrix = DMatrix::from_fn(dim, dim, |i, j| total.entry(i, j));
    let eig = matrix.symmetric_eigen();
    let psi_vec = DVector::from_iterator(dim, psi0.amplitudes().iter().copied());
    // coefficients in the eigenbasis
    let coeffs = eig.eigenvectors.adjoint() * psi_vec;

    let sys_dim = h.system_dim();
    let env_dim = h.env_dim();
    let mut rho_s = Vec::with_capacity(times.len());
    for &t in times {
        let rotated = DVector::from_iterator(
            dim,
            coeffs
                .iter()
                .zip(eig.eigenvalues.iter())
                .map(|(c, &lambda)| c * C64::from_polar(1.0, -lambda * t)),
        );
        let psi_t = &eig.eigenvectors * rotated;
        // partial trace over the environment (system index slow)
        let mut entries = vec![C64::new(0.0, 0.0); sys_dim * sys_dim];
        for a in 0..sys_dim {
            for b in 0..sys_dim {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..env_dim {
                    acc += psi_t[a * env_dim + j] * psi_t[b * env_dim + j].conj();
                }
                entries[a * sys_dim + b] = acc;
            }
        }
        rho_s.push(DensityMatrix::from_raw(sys_dim, entries));
    }
    Ok(ExactSolution { times: times.to_vec(), rho_s })
}

/// Closed-form excited-state occupation of the star benchmark:
/// `n_+(t) = cos^2(2 C t)`, independent of the bath size.
pub fn analytic_occupation(coupling: f64, t: f64) -> f64 {
    let c = (2.0 * coupling * t).cos();
    c * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;
    use crate::model::{build_spin_star, initial_state, Channel, SpinStarModel, sigma_plus};
    use crate::propagator::ProductState;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn closed_form_occupation_reproduced_for_any_bath_size() {
        let times: Vec<f64> = (0..=12).map(|k| k as f64 * 0.25).chain([8.0]).collect();
        for n_bath in [1usize, 2, 3] {
            for coupling in [0.5, 1.0] {
                let m = SpinStarModel::new(n_bath, coupling).unwrap();
                let h = build_spin_star(&m).unwrap();
                let sol = exact_evolve(&h, &initial_state(&m), &times).unwrap();
                let occ = sol.occupation().unwrap();
                for (&t, &n_plus) in times.iter().zip(&occ) {
                    let want = analytic_occupation(coupling, t);
                    assert!(
                        (n_plus - want).abs() < 1e-10,
                        "N={n_bath}, C={coupling}, t={t}: {n_plus} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn single_bath_superposition_matches_hand_solution() {
        // With |Psi(0)> = (alpha|+> + beta|->) ⊗ |->, C = 1/2, only the
        // flip-flop pair {|+,->, |-,+>} precesses: the joint state is
        // alpha cos(t)|+,-> - i alpha sin(t)|-,+> + beta|-,->, giving
        //   rho_00 = alpha^2 cos^2 t, rho_01 = alpha beta cos t,
        //   rho_11 = alpha^2 sin^2 t + beta^2.
        let (alpha, beta) = (0.6, 0.8);
        let m = SpinStarModel::new(1, 0.5).unwrap();
        let h = build_spin_star(&m).unwrap();
        let system = StateVector::new(vec![c(alpha, 0.0), c(beta, 0.0)]).unwrap();
        let env = StateVector::basis_state(2, 1).unwrap();
        let init = ProductState::new(system, env).unwrap();
        for t in [0.0, 0.3, 0.7, 1.9] {
            let sol = exact_evolve(&h, &init, &[t]).unwrap();
            let rho = &sol.rho_s()[0];
            let (ct, st) = (t.cos(), t.sin());
            assert!((rho.entry(0, 0) - c(alpha * alpha * ct * ct, 0.0)).norm() < 1e-12);
            assert!((rho.entry(0, 1) - c(alpha * beta * ct, 0.0)).norm() < 1e-12);
            assert!((rho.entry(1, 0) - c(alpha * beta * ct, 0.0)).norm() < 1e-12);
            assert!((rho.entry(1, 1) - c(alpha * alpha * st * st + beta * beta, 0.0)).norm() < 1e-12);
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reduced_density_is_physical_at_all_times() {
        let m = SpinStarModel::new(2, 0.8).unwrap();
        let h = build_spin_star(&m).unwrap();
        let system = StateVector::new(vec![c(0.8, 0.1), c(0.2, -0.55)]).unwrap();
        let env = StateVector::new(vec![c(0.3, 0.0), c(0.1, 0.4), c(-0.2, 0.2), c(0.5, -0.1)]).unwrap();
        let init = ProductState::new(system, env).unwrap();
        let times = [0.0, 0.5, 1.3, 2.9];
        let sol = exact_evolve(&h, &init, &times).unwrap();
        for rho in sol.rho_s() {
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
            assert!(rho.hermiticity_deviation() < 1e-12);
            for ev in rho.eigenvalues() {
                assert!(ev >= -1e-10 && ev <= 1.0 + 1e-10, "eigenvalue {ev}");
            }
        }
        // purity 1 only at t = 0; interaction entangles the factors
        assert!((sol.rho_s()[0].purity() - 1.0).abs() < 1e-12);
        assert!(sol.rho_s()[2].purity() < 1.0 - 1e-3);
    }

    #[test]
    fn dimension_cap_is_enforced_before_assembly() {
        let h = InteractionHamiltonian::new(4, 1024, vec![]).unwrap();
        let system = StateVector::basis_state(4, 0).unwrap();
        let env = StateVector::basis_state(1024, 0).unwrap();
        let init = ProductState::new(system, env).unwrap();
        match exact_evolve(&h, &init, &[0.0]) {
            Err(Error::DimensionCap { dim, cap }) => {
                assert_eq!(dim, 4096);
                assert_eq!(cap, DIMENSION_CAP);
            }
            other => panic!("expected dimension cap error, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_total_is_rejected() {
        let ch = Channel::new(sigma_plus(), sigma_plus());
        let h = InteractionHamiltonian::new(2, 2, vec![ch]).unwrap();
        let m = SpinStarModel::new(1, 0.5).unwrap();
        let init = initial_state(&m);
        assert!(matches!(exact_evolve(&h, &init, &[0.1]), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn input_validation() {
        let m = SpinStarModel::new(1, 0.5).unwrap();
        let h = build_spin_star(&m).unwrap();
        let init = initial_state(&m);
        assert!(exact_evolve(&h, &init, &[0.0, f64::NAN]).is_err());
        let m4 = SpinStarModel::new(2, 0.5).unwrap();
        let wrong = initial_state(&m4);
        assert!(exact_evolve(&h, &wrong, &[0.0]).is_err());
    }

    #[test]
    fn analytic_occupation_known_values() {
        assert!((analytic_occupation(0.5, 0.0) - 1.0).abs() < 1e-15);
        assert!(analytic_occupation(0.5, std::f64::consts::FRAC_PI_2) < 1e-15);
        assert!((analytic_occupation(0.5, std::f64::consts::PI) - 1.0).abs() < 1e-12);
        assert!((analytic_occupation(1.0, std::f64::consts::FRAC_PI_8) - 0.5).abs() < 1e-12);
    }
}

"""Expectation values, uncertainty and mean-commutator matrices, and
eigenstate residuals.

For observables X_1..X_n and a state rho:

    sigma_jk = <X_j X_k + X_k X_j>/2 - <X_j><X_k>
    C_jk     = (-i/2) <[X_j, X_k]>

``sigma + i C`` is the Gram matrix of the centred vectors (X_j - <X_j>) psi,
hence Hermitian positive semidefinite.
"""

from dataclasses import dataclass

import numpy as np

from .states import TAIL_LIMIT, TruncationError

IMAG_TOL = 1e-10
SYM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MomentPair:
    sigma: np.ndarray
    cmat: np.ndarray
    means: np.ndarray
    tail_mass: float = 0.0

    @property
    def n(self):
        return self.sigma.shape[0]

    def hermitian(self):
        return self.sigma + 1j * self.cmat

    def to_dict(self):
        return {
            "sigma": self.sigma.tolist(),
            "cmat": self.cmat.tolist(),
            "means": self.means.tolist(),
            "diagnostics": {"tailMass": self.tail_mass},
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            np.array(data["sigma"], dtype=float),
            np.array(data["cmat"], dtype=float),
            np.array(data["means"], dtype=float),
            data.get("diagnostics", {}).get("tailMass", 0.0),
        )


def _check_dims(X, state):
    if X.shape[0] != state.dim:
        raise ValueError(f"operator dim {X.shape[0]} != state dim {state.dim}")


def _real(value, what):
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise ValueError(f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


def expectation(X, state):
    """<psi|X|psi> (or Tr rho X) for a Hermitian ``X``."""
    X = np.asarray(X)
    _check_dims(X, state)
    if state.is_pure:
        psi = state.vector
        value = np.vdot(psi, X @ psi)
    else:
        value = np.trace(state.data @ X)
    return _real(complex(value), "expectation")


def second_moments(obs, state):
    """Matrix G_jk = <X_j X_k> (complex, Hermitian)."""
    mats = np.array(obs.matrices)
    if mats.shape[1] != state.dim:
        raise ValueError(f"observable dim {mats.shape[1]} != state dim {state.dim}")
    if state.is_pure:
        vecs = mats @ state.vector  # rows are X_j psi
        return vecs.conj() @ vecs.T
    # Tr(rho X_j X_k) = sum_ab (rho X_j)_ab (X_k)_ba
    left = state.data @ mats
    return np.einsum("jab,kba->jk", left, mats)


def moment_pair(obs, state, tail_limit=TAIL_LIMIT):
    """Uncertainty matrix, mean-commutator matrix and means."""
    if state.tail_mass >= tail_limit:
        raise TruncationError(
            f"state tail mass {state.tail_mass:.2e} too large for reliable moments"
        )
    means = np.array([expectation(X, state) for X in obs.matrices])
    G = second_moments(obs, state)
    sym = (G + G.T) / 2
    anti = (-0.5j) * (G - G.T)
    scale = max(1.0, float(np.abs(G).max()))
    if np.abs(sym.imag).max() > IMAG_TOL * scale or np.abs(anti.imag).max() > IMAG_TOL * scale:
        raise ValueError("second moments inconsistent with Hermitian observables")
    sigma = sym.real - np.outer(means, means)
    cmat = anti.real
    if np.abs(sigma - sigma.T).max() > SYM_TOL * scale:
        raise ValueError("uncertainty matrix not symmetric")
    sigma = (sigma + sigma.T) / 2
    cmat = (cmat - cmat.T) / 2
    return MomentPair(sigma, cmat, means, state.tail_mass)


def eigenstate_residual(coeffs, obs, state):
    """Distance of ``state`` from being an eigenvector of ``sum coeffs_i X_i``.

    Returns ``(residual, rayleigh)`` with ``rayleigh = <psi|B|psi>`` and
    ``residual = ||(B - rayleigh) psi||``.
    """
    if not state.is_pure:
        raise ValueError("eigenstate conditions apply to pure states only")
    coeffs = np.asarray(coeffs, dtype=complex)
    if not np.any(coeffs):
        raise ValueError("combination coefficients are all zero")
    B = obs.combine(coeffs)
    _check_dims(B, state)
    psi = state.vector
    Bpsi = B @ psi
    rayleigh = complex(np.vdot(psi, Bpsi))
    return float(np.linalg.norm(Bpsi - rayleigh * psi)), rayleigh

"""Exact numerical treatment of the Rabi Hamiltonian on the truncated space.

This module is the ground truth the approximate (dressed / dispersive)
descriptions are measured against: it builds

    H = (omega0/2) sigma_z + omega a^dag a + beta omega (a + a^dag) sigma_x

with hbar = 1 and diagonalizes it densely.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hilbert import (
    SpaceDims,
    annihilation,
    hermiticity_defect,
    max_abs,
    qubit_op,
)

__all__ = [
    "RabiParams",
    "Spectrum",
    "rabi_hamiltonian",
    "parity_operator",
    "diagonalize",
    "exact_spectrum",
    "ground_state",
    "max_overlap_pairing",
]

#: validity bounds of the quasi-degenerate ultra-strong-coupling regime
MAX_QUBIT_RATIO = 0.3
MAX_COUPLING = 0.2


@dataclass(frozen=True)
class RabiParams:
    """Physical parameters: oscillator frequency, qubit splitting, coupling.

    ``beta`` is the dimensionless coupling; the interaction term is
    beta*omega*(a+a^dag)*sigma_x.  All frequencies are in units of the
    problem's frequency scale (omega = 1 is the conventional choice).
    """

    omega: float = 1.0
    omega0: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.omega0 < 0:
            raise ValueError(f"omega0 must be >= 0, got {self.omega0}")

    @property
    def quasi_degenerate(self) -> bool:
        return self.omega0 <= MAX_QUBIT_RATIO * self.omega

    @property
    def coupling_ok(self) -> bool:
        return abs(self.beta) <= MAX_COUPLING


@dataclass
class Spectrum:
    """Eigenpairs sorted by energy; ``states`` holds eigenvectors as columns."""

    energies: np.ndarray
    states: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray | None = None
    parity: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)


def rabi_hamiltonian(p: RabiParams, dims: SpaceDims) -> np.ndarray:
    a = annihilation(dims)
    sx = qubit_op("sigma_x", dims)
    sz = qubit_op("sigma_z", dims)
    return 0.5 * p.omega0 * sz + p.omega * (a.conj().T @ a) + p.beta * p.omega * (a + a.conj().T) @ sx


def parity_operator(dims: SpaceDims) -> np.ndarray:
    """Conserved parity sigma_z * exp(i pi a^dag a); commutes with the Rabi Hamiltonian."""
    signs = (-1.0) ** np.arange(dims.n_cut)
    return np.kron(np.diag([1.0, -1.0]), np.diag(signs)).astype(complex)


def _fix_phases(states: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real and positive."""
    out = states.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        phase = out[idx, k] / abs(out[idx, k])
        out[:, k] = out[:, k] / phase
    return out


def _parity_resolve(energies, states, pi_op, gap_tol):
    """Rotate (near-)degenerate clusters onto parity eigenstates for determinism."""
    n = len(energies)
    k = 0
    states = states.copy()
    parity = np.zeros(n)
    while k < n:
        j = k + 1
        while j < n and energies[j] - energies[j - 1] < gap_tol:
            j += 1
        block = states[:, k:j]
        pi_block = block.conj().T @ pi_op @ block
        if j - k > 1:
            vals, vecs = np.linalg.eigh(0.5 * (pi_block + pi_block.conj().T))
            block = block @ vecs
            states[:, k:j] = block
            parity[k:j] = np.round(vals)
        else:
            parity[k] = np.round(np.real(pi_block[0, 0]))
        k = j
    return states, parity


def diagonalize(h: np.ndarray, keep: int | None = None, herm_tol: float = 1e-12) -> Spectrum:
    """Dense Hermitian diagonalization, lowest ``keep`` eigenpairs ascending.

    Near-degenerate clusters are rotated onto parity eigenstates when the
    matrix commutes with the joint parity, which makes the output
    deterministic for the decoupled qubit (omega0 = 0).
    """
    scale = max(max_abs(h), 1.0)
    defect = hermiticity_defect(h)
    if defect > herm_tol * scale:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3g}")
    energies, states = np.linalg.eigh(0.5 * (h + h.conj().T))
    if keep is not None:
        energies = energies[:keep]
        states = states[:, :keep]

    n_cut = h.shape[0] // 2
    pi_op = parity_operator(SpaceDims(n_cut)) if h.shape[0] == 2 * n_cut else None
    parity = None
    if pi_op is not None and max_abs(h @ pi_op - pi_op @ h) < 1e-9 * scale:
        states, parity = _parity_resolve(energies, states, pi_op, gap_tol=1e-10 * scale)
    states = _fix_phases(states)

    residuals = np.array(
        [np.linalg.norm(h @ states[:, k] - energies[k] * states[:, k]) for k in range(len(energies))]
    )
    return Spectrum(energies=energies, states=states, residuals=residuals, parity=parity)


def exact_spectrum(
    p: RabiParams,
    dims: SpaceDims,
    keep: int,
    convergence_step: int = 10,
    convergence_tol: float = 1e-8,
) -> Spectrum:
    """Diagonalize the Rabi Hamiltonian with a truncation-convergence check.

    Each retained eigenvalue is flagged converged only if it moves by less
    than ``convergence_tol * omega`` when n_cut is raised by
    ``convergence_step``.
    """
    spec = diagonalize(rabi_hamiltonian(p, dims), keep=keep)
    bigger = SpaceDims(dims.n_cut + convergence_step)
    ref = np.linalg.eigvalsh(rabi_hamiltonian(p, bigger))[:keep]
    shifts = np.abs(spec.energies - ref)
    spec.converged = shifts < convergence_tol * p.omega
    spec.metadata["truncation_shifts"] = shifts
    if not spec.converged.all():
        warnings.warn(
            f"{int((~spec.converged).sum())} of {keep} eigenpairs not converged "
            f"at n_cut={dims.n_cut} (max shift {shifts.max():.3g})",
            stacklevel=2,
        )
    return spec


def ground_state(p: RabiParams, dims: SpaceDims) -> tuple[float, np.ndarray]:
    spec = exact_spectrum(p, dims, keep=1)
    return float(spec.energies[0]), spec.states[:, 0]


def max_overlap_pairing(
    approx: np.ndarray, exact: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Match approximate states (columns) to exact states by global max |overlap|^2.

    Returns (exact_index, approx_index, fidelity) triples solving the
    maximum-weight assignment; robust where near-degenerate pairs make
    energy-order matching ambiguous.
    """
    ov = np.abs(exact.conj().T @ approx) ** 2
    rows, cols = linear_sum_assignment(-ov)
    return rows, cols, ov[rows, cols]

"""Truncated-Fock-space operator algebra for one qubit coupled to one oscillator.

All operators are dense complex numpy arrays on the joint space
qubit (x) oscillator, with the qubit index slowest: a joint operator is
``np.kron(q, o)`` for a 2x2 qubit matrix ``q`` and an n_cut x n_cut
oscillator matrix ``o``.  Qubit basis: index 0 = |e>, index 1 = |g>,
so sigma_z = diag(+1, -1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = [
    "SpaceDims",
    "fock",
    "basis_ket",
    "osc_annihilation",
    "osc_displacement",
    "annihilation",
    "number",
    "qubit_op",
    "sigma_x_eigenket",
    "displacement",
    "displaced_fock",
    "laguerre",
    "tensor",
    "dagger",
    "commutator",
    "expectation",
    "max_abs",
    "normalize",
    "hermiticity_defect",
    "density_matrix_defects",
    "assert_density_matrix",
    "trace_distance",
]


@dataclass(frozen=True)
class SpaceDims:
    """Truncation of the joint Hilbert space: oscillator Fock states |0>..|n_cut-1>."""

    n_cut: int

    def __post_init__(self):
        if self.n_cut < 2:
            raise ValueError(f"n_cut must be >= 2, got {self.n_cut}")

    @property
    def total_dim(self) -> int:
        return 2 * self.n_cut


def fock(n: int, n_cut: int) -> np.ndarray:
    """Oscillator number state |n> as a length-n_cut complex vector."""
    if not 0 <= n < n_cut:
        raise IndexError(f"Fock index {n} outside 0..{n_cut - 1}")
    ket = np.zeros(n_cut, dtype=complex)
    ket[n] = 1.0
    return ket


def basis_ket(qubit_index: int, n: int, dims: SpaceDims) -> np.ndarray:
    """Joint product state |qubit_index> (x) |n>; qubit index 0 = |e>, 1 = |g>."""
    ket = np.zeros(dims.total_dim, dtype=complex)
    ket[qubit_index * dims.n_cut + n] = 1.0
    return ket


def osc_annihilation(n_cut: int) -> np.ndarray:
    """Oscillator lowering operator on the bare Fock factor: <n-1|a|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, n_cut, dtype=float)), 1).astype(complex)


def annihilation(dims: SpaceDims) -> np.ndarray:
    """Joint-space oscillator lowering operator (identity on the qubit factor)."""
    return np.kron(np.eye(2, dtype=complex), osc_annihilation(dims.n_cut))


def number(dims: SpaceDims) -> np.ndarray:
    a = annihilation(dims)
    return a.conj().T @ a


_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "sigma_x": np.array([[0, 1], [1, 0]], dtype=complex),
    "sigma_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sigma_z": np.array([[1, 0], [0, -1]], dtype=complex),
    "sigma_plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "sigma_minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


def qubit_op(which: str, dims: SpaceDims) -> np.ndarray:
    """Qubit operator tensored with the oscillator identity.

    ``which`` is one of identity, sigma_x, sigma_y, sigma_z, sigma_plus,
    sigma_minus.  Convention: sigma_z|e> = +|e>, sigma_z|g> = -|g>.
    """
    try:
        q = _PAULI[which]
    except KeyError:
        raise ValueError(f"unknown qubit operator {which!r}; choose from {sorted(_PAULI)}")
    return np.kron(q, np.eye(dims.n_cut, dtype=complex))


def sigma_x_eigenket(m: int) -> np.ndarray:
    """Qubit sigma_x eigenstate |m=+1> or |m=-1>: (|e> + m|g>)/sqrt(2)."""
    if m not in (+1, -1):
        raise ValueError("m must be +1 or -1")
    return np.array([1.0, m], dtype=complex) / np.sqrt(2.0)


def osc_displacement(alpha: complex, n_cut: int, check: bool = True) -> np.ndarray:
    """Displacement operator exp(alpha a^dag - alpha* a) on the truncated Fock factor.

    Computed by the exact matrix exponential of the truncated generator.
    Truncation makes it unitary only on the low-lying Fock block; a warning
    is emitted when the displacement is too large for the truncation or when
    the unitarity defect on the lowest n_cut//2 block exceeds 1e-8.
    """
    a = osc_annihilation(n_cut)
    dop = expm(alpha * a.conj().T - np.conjugate(alpha) * a)
    if check:
        if 4.0 * abs(alpha) ** 2 >= n_cut:
            warnings.warn(
                f"displacement |alpha|={abs(alpha):.3g} is large for n_cut={n_cut}; "
                "increase the truncation",
                stacklevel=2,
            )
        half = n_cut // 2
        defect = max_abs((dop.conj().T @ dop - np.eye(n_cut))[:half, :half])
        if defect > 1e-8:
            warnings.warn(
                f"displacement unitarity defect {defect:.3g} on the protected Fock block",
                stacklevel=2,
            )
    return dop


def displacement(alpha: complex, dims: SpaceDims, check: bool = True) -> np.ndarray:
    """Joint-space displacement operator (identity on the qubit factor)."""
    return np.kron(np.eye(2, dtype=complex), osc_displacement(alpha, dims.n_cut, check=check))


def displaced_fock(
    n: int,
    m: int,
    beta: float,
    dims: SpaceDims,
    with_qubit: bool = False,
) -> np.ndarray:
    """Displaced Fock state D(-m beta)|n> of the oscillator.

    ``m`` = +1 or -1 selects the conditional displacement sign.  With
    ``with_qubit=True`` the state is tensored with the sigma_x eigenstate
    |m> into the joint space; otherwise the bare oscillator ket is returned.
    """
    if not 0 <= n < dims.n_cut:
        raise IndexError(f"Fock index {n} outside 0..{dims.n_cut - 1}")
    if m not in (+1, -1):
        raise ValueError("m must be +1 or -1")
    ket = osc_displacement(-m * beta, dims.n_cut)[:, n].copy()
    if with_qubit:
        return np.kron(sigma_x_eigenket(m), ket)
    return ket


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    lk_minus, lk = 1.0, 1.0 - x
    if n == 0:
        return lk_minus
    for k in range(1, n):
        lk_minus, lk = lk, ((2 * k + 1 - x) * lk - k * lk_minus) / (k + 1)
    return lk


# ---------------------------------------------------------------------------
# generic algebra helpers


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    """Real part of tr(op rho); warns when the imaginary defect exceeds 1e-9."""
    if op.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {op.shape} vs {rho.shape}")
    val = np.trace(op @ rho)
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-9 * scale:
        warnings.warn(f"expectation has imaginary defect {val.imag:.3g}", stacklevel=2)
    return float(val.real)


def max_abs(a: np.ndarray) -> float:
    """Largest absolute entry; the element-wise matrix norm used throughout."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def normalize(ket: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(ket)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return ket / nrm


def hermiticity_defect(a: np.ndarray) -> float:
    return max_abs(a - a.conj().T)


def density_matrix_defects(rho: np.ndarray) -> tuple[float, float, float]:
    """(hermiticity defect, trace defect, minimum eigenvalue) of a candidate state."""
    herm = hermiticity_defect(rho)
    tr = abs(np.trace(rho) - 1.0)
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return herm, float(tr), min_eig


def assert_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-10,
    eig_floor: float = -1e-8,
) -> None:
    herm, tr, min_eig = density_matrix_defects(rho)
    if herm > herm_tol:
        raise ValueError(f"state not Hermitian: defect {herm:.3g} > {herm_tol:.3g}")
    if tr > trace_tol:
        raise ValueError(f"state trace defect {tr:.3g} > {trace_tol:.3g}")
    if min_eig < eig_floor:
        raise ValueError(f"state has negative eigenvalue {min_eig:.3g} < {eig_floor:.3g}")


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance (1/2)||rho - sigma||_1 between two Hermitian matrices."""
    diff = 0.5 * ((rho - sigma) + (rho - sigma).conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))

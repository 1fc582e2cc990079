"""Dressed eigenstructure of the quasi-degenerate, strongly coupled Rabi model.

For a slow qubit the joint spectrum organizes into two interleaved harmonic
ladders of entangled qubit-oscillator states,

    |Psi_N^+-> = (|+, N_+> +- |-, N_->)/sqrt(2),

built from conditionally displaced Fock states |N_m> = D(-m beta)|N>.  The
module constructs the retained basis, its ladder/projection operators, the
effective two-oscillator Hamiltonian, and the matrix-element tables of the
position and sigma_x couplings that drive dissipation.

Reduced coordinates: basis states are ordered minus ladder first, then plus
ladder (index = N for |Psi_N^->, n_levels + N for |Psi_N^+>); operators in
this 2*n_levels representation are exact for anything supported on the
retained subspace.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    SpaceDims,
    laguerre,
    max_abs,
    osc_displacement,
    sigma_x_eigenket,
)
from .rabi import RabiParams

__all__ = [
    "DressedBasis",
    "ValidityReport",
    "displaced_overlap",
    "n_levels_cap",
    "build_basis",
    "build_ladders",
    "dressed_hamiltonian",
    "dressed_matrix_elements",
    "dressed_lowering",
    "validity_report",
]


def displaced_overlap(n: int, beta: float) -> float:
    """Overlap <N_-|N_+> = exp(-2 beta^2) L_N(4 beta^2) of same-N displaced Fock states.

    Signed; turns negative once N beta^2 is large enough for the Laguerre
    polynomial to change sign.
    """
    return math.exp(-2.0 * beta * beta) * laguerre(n, 4.0 * beta * beta)


def n_levels_cap(beta: float) -> tuple[int | None, int | None]:
    """(hard cap, warning threshold) on retained rungs from N << 1/(2 beta)^2."""
    if beta == 0.0:
        return None, None
    return (
        int(math.floor(0.25 / (2 * beta * beta) + 1e-9)),
        int(math.floor(0.1 / (2 * beta * beta) + 1e-9)),
    )


@dataclass
class DressedBasis:
    """Retained dressed ladders {|Psi_N^+->, E_N^+-} with their reduced algebra."""

    params: RabiParams
    dims: SpaceDims
    n_levels: int
    energy_mode: str
    states_minus: np.ndarray  # total_dim x n_levels, columns |Psi_N^->
    states_plus: np.ndarray
    energies_minus: np.ndarray
    energies_plus: np.ndarray
    omega_minus: float
    omega_plus: float
    omega_tilde: np.ndarray
    orthonormality_defect: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def reduced_dim(self) -> int:
        return 2 * self.n_levels

    @property
    def isometry(self) -> np.ndarray:
        """total_dim x 2*n_levels matrix of basis columns, minus block first."""
        return np.hstack([self.states_minus, self.states_plus])

    def state(self, n: int, sector: str) -> np.ndarray:
        block = self.states_minus if sector == "-" else self.states_plus
        return block[:, n]

    def reduced_index(self, n: int, sector: str) -> int:
        return n + (self.n_levels if sector == "+" else 0)

    # -- exact reduced-coordinate operators ---------------------------------

    def reduced_ladder(self, sector: str) -> np.ndarray:
        L = self.n_levels
        ladder = np.zeros((self.reduced_dim, self.reduced_dim), dtype=complex)
        off = L if sector == "+" else 0
        for n in range(L - 1):
            ladder[off + n, off + n + 1] = math.sqrt(n + 1)
        return ladder

    def reduced_projector(self, sector: str) -> np.ndarray:
        L = self.n_levels
        diag = np.zeros(self.reduced_dim)
        if sector == "+":
            diag[L:] = 1.0
        else:
            diag[:L] = 1.0
        return np.diag(diag).astype(complex)

    def reduced_cross(self, n: int) -> np.ndarray:
        """|Psi_n^-><Psi_n^+| in reduced coordinates."""
        op = np.zeros((self.reduced_dim, self.reduced_dim), dtype=complex)
        op[self.reduced_index(n, "-"), self.reduced_index(n, "+")] = 1.0
        return op

    def reduced_dephasing_op(self) -> np.ndarray:
        """S_z = sum_N <N_+|N_-> (|Psi_N^+><Psi_N^+| - |Psi_N^-><Psi_N^-|), reduced."""
        o = np.array([displaced_overlap(n, self.params.beta) for n in range(self.n_levels)])
        return np.diag(np.concatenate([-o, o])).astype(complex)

    def truncated_energies(self) -> tuple[np.ndarray, np.ndarray]:
        """Harmonic-ladder energies (E^-, E^+) with the constant -omega beta^2 dropped."""
        p = self.params
        n = np.arange(self.n_levels)
        half = 0.5 * p.omega0 * (1.0 - 2.0 * p.beta**2)
        return n * self.omega_minus - half, n * self.omega_plus + half

    def reduced_hamiltonian(self) -> np.ndarray:
        em, ep = self.truncated_energies()
        return np.diag(np.concatenate([em, ep])).astype(complex)

    # -- representation changes ---------------------------------------------

    def expand(self, op_reduced: np.ndarray) -> np.ndarray:
        v = self.isometry
        return v @ op_reduced @ v.conj().T

    def reduce(self, op_full: np.ndarray) -> np.ndarray:
        v = self.isometry
        return v.conj().T @ op_full @ v

    def expand_ket(self, ket_reduced: np.ndarray) -> np.ndarray:
        return self.isometry @ ket_reduced

    def project_density(self, rho_full: np.ndarray) -> tuple[np.ndarray, float]:
        """Reduced-coordinate state and the weight lost outside the retained span."""
        rho_d = self.reduce(rho_full)
        leakage = float(np.real(np.trace(rho_full) - np.trace(rho_d)))
        return rho_d, leakage


def build_basis(
    p: RabiParams,
    n_levels: int,
    dims: SpaceDims,
    energy_mode: str = "exact_overlap",
) -> DressedBasis:
    """Construct the retained dressed basis and its energies.

    ``energy_mode`` selects the energy formula:

    - ``"exact_overlap"``: E_N^+- = omega (N - beta^2) +- (omega0/2) <N_-|N_+>,
      keeping the exact Laguerre overlap and the constant -omega beta^2.
    - ``"truncated"``: E_N^+- = N omega_+- +- (omega0/2)(1 - 2 beta^2) with
      omega_+- = omega -+ 2 omega0 beta^2 and the constant dropped; this is
      the harmonic-ladder form the master-equation generators use.
    """
    if energy_mode not in ("exact_overlap", "truncated"):
        raise ValueError(f"unknown energy_mode {energy_mode!r}")
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if n_levels > dims.n_cut:
        raise ValueError(f"n_levels={n_levels} exceeds the Fock truncation n_cut={dims.n_cut}")
    cap, warn_above = n_levels_cap(p.beta)
    if cap is not None and n_levels > cap:
        raise ValueError(
            f"n_levels={n_levels} violates the ladder validity bound "
            f"n_levels <= {cap} at beta={p.beta} (N must stay far below 1/(2 beta)^2)"
        )
    if warn_above is not None and n_levels > warn_above:
        warnings.warn(
            f"n_levels={n_levels} above the comfortable bound {warn_above} at beta={p.beta}; "
            "top rungs carry growing O(N beta^2) error",
            stacklevel=2,
        )

    d_minus = osc_displacement(-p.beta, dims.n_cut)  # displaces |N> -> |N_+>
    d_plus = osc_displacement(+p.beta, dims.n_cut)  # displaces |N> -> |N_->
    ket_p = sigma_x_eigenket(+1)
    ket_m = sigma_x_eigenket(-1)

    states_minus = np.empty((dims.total_dim, n_levels), dtype=complex)
    states_plus = np.empty((dims.total_dim, n_levels), dtype=complex)
    for n in range(n_levels):
        up = np.kron(ket_p, d_minus[:, n])  # |+, N_+>
        dn = np.kron(ket_m, d_plus[:, n])  # |-, N_->
        states_plus[:, n] = (up + dn) / np.sqrt(2.0)
        states_minus[:, n] = (up - dn) / np.sqrt(2.0)

    omega_plus = p.omega - 2.0 * p.omega0 * p.beta**2
    omega_minus = p.omega + 2.0 * p.omega0 * p.beta**2
    n = np.arange(n_levels)
    omega_tilde = p.omega0 * (1.0 - 2.0 * p.beta**2 - 4.0 * n * p.beta**2)

    if energy_mode == "exact_overlap":
        ov = np.array([displaced_overlap(k, p.beta) for k in range(n_levels)])
        base = p.omega * (n - p.beta**2)
        energies_minus = base - 0.5 * p.omega0 * ov
        energies_plus = base + 0.5 * p.omega0 * ov
    else:
        half = 0.5 * p.omega0 * (1.0 - 2.0 * p.beta**2)
        energies_minus = n * omega_minus - half
        energies_plus = n * omega_plus + half

    gaps = energies_plus - energies_minus
    if p.omega0 > 0 and np.any(gaps <= 0):
        bad = int(np.argmax(gaps <= 0))
        raise ValueError(
            f"dressed splitting E_N^+ - E_N^- non-positive at N={bad}; "
            "the retained ladder extends beyond the validity window"
        )
    if p.omega0 == 0:
        warnings.warn("omega0 = 0: dressed pairs are degenerate", stacklevel=2)

    basis = DressedBasis(
        params=p,
        dims=dims,
        n_levels=n_levels,
        energy_mode=energy_mode,
        states_minus=states_minus,
        states_plus=states_plus,
        energies_minus=energies_minus,
        energies_plus=energies_plus,
        omega_minus=omega_minus,
        omega_plus=omega_plus,
        omega_tilde=omega_tilde,
    )
    v = basis.isometry
    basis.orthonormality_defect = max_abs(v.conj().T @ v - np.eye(2 * n_levels))
    if basis.orthonormality_defect > 1e-9:
        raise ValueError(
            f"dressed basis orthonormality defect {basis.orthonormality_defect:.3g}; "
            "raise n_cut"
        )
    return basis


def build_ladders(b: DressedBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Full-space (a_plus, a_minus, proj_plus, proj_minus) of the dressed ladders."""
    return (
        b.expand(b.reduced_ladder("+")),
        b.expand(b.reduced_ladder("-")),
        b.expand(b.reduced_projector("+")),
        b.expand(b.reduced_projector("-")),
    )


def dressed_hamiltonian(b: DressedBasis) -> np.ndarray:
    """Effective two-oscillator Hamiltonian (full space, harmonic-ladder energies)."""
    return b.expand(b.reduced_hamiltonian())


@dataclass
class ElementTable:
    """Matrix elements <Psi_N^s|O|Psi_M^p> organized by ladder blocks.

    ``intra`` holds the (identical) minus-minus and plus-plus blocks,
    ``cross`` the minus-plus block; ``operator`` is the full-space assembly.
    """

    which: str
    intra: np.ndarray
    cross: np.ndarray
    operator: np.ndarray


def dressed_matrix_elements(b: DressedBasis, which: str) -> ElementTable:
    """Closed-form dressed matrix elements of the position or sigma_x coupling.

    For the oscillator position (a + a^dag): intra-ladder elements are the
    bare ladder ones, sqrt(M) delta_{N,M-1} + sqrt(M+1) delta_{N,M+1}, and the
    cross-ladder block is -2 beta delta_{N,M}.  For sigma_x the intra blocks
    vanish and the cross block is delta_{N,M}.
    """
    L = b.n_levels
    if which == "position":
        intra = np.zeros((L, L))
        for n in range(L - 1):
            intra[n, n + 1] = math.sqrt(n + 1)
            intra[n + 1, n] = math.sqrt(n + 1)
        cross = -2.0 * b.params.beta * np.eye(L)
    elif which == "sigma_x":
        intra = np.zeros((L, L))
        cross = np.eye(L)
    else:
        raise ValueError(f"unknown coupling {which!r}; choose 'position' or 'sigma_x'")
    reduced = np.block([[intra, cross], [cross.T, intra]]).astype(complex)
    return ElementTable(which=which, intra=intra, cross=cross, operator=b.expand(reduced))


def dressed_lowering(b: DressedBasis) -> np.ndarray:
    """Dressed lowering operator a_- + a_+ - 2 beta sum_N |Psi_N^-><Psi_N^+| (full space)."""
    red = b.reduced_ladder("-") + b.reduced_ladder("+")
    for n in range(b.n_levels):
        red += -2.0 * b.params.beta * b.reduced_cross(n)
    return b.expand(red)


@dataclass
class ValidityReport:
    """Diagnostic margins for the approximations behind the dressed description.

    Purely informational; nothing here blocks a computation.
    """

    quasi_degenerate: bool
    qubit_margin: float
    beta_ok: bool
    beta_margin: float
    n_max: int | None
    n_levels_ok: bool
    secular_ok: bool | None
    secular_margin: float | None
    warnings: list[str] = field(default_factory=list)


def validity_report(
    p: RabiParams,
    n_levels: int,
    rates=None,
) -> ValidityReport:
    """Evaluate the regime constraints and, when rates are given, the secular margin.

    The secular margin compares the largest supplied relaxation rate against
    the smallest difference between distinct dressed transition frequencies
    (the spacing that protects the dissipator from cross-terms).
    """
    notes: list[str] = []
    quasi = p.omega0 <= 0.3 * p.omega
    q_margin = 0.3 * p.omega - p.omega0
    if not quasi:
        notes.append(f"omega0={p.omega0} exceeds the quasi-degenerate bound 0.3*omega")
    if p.omega0 == 0:
        notes.append("omega0 = 0: degenerate qubit, dressed pairs coincide")

    beta_ok = abs(p.beta) <= 0.2
    beta_margin = 0.2 - abs(p.beta)
    if not beta_ok:
        notes.append(f"|beta|={abs(p.beta)} exceeds the O(beta^4) bound 0.2")

    if p.beta != 0.0:
        n_max = int(math.floor(1.0 / (2.0 * p.beta) ** 2 + 1e-9))
    else:
        n_max = None
    cap, warn_above = n_levels_cap(p.beta)
    n_ok = cap is None or n_levels <= cap
    if warn_above is not None and n_levels > warn_above:
        notes.append(f"n_levels={n_levels} above the comfortable bound {warn_above}")

    secular_ok = None
    secular_margin = None
    if rates is not None:
        omega_plus = p.omega - 2.0 * p.omega0 * p.beta**2
        omega_minus = p.omega + 2.0 * p.omega0 * p.beta**2
        n = np.arange(max(n_levels, 1))
        omega_tilde = p.omega0 * (1.0 - 2.0 * p.beta**2 - 4.0 * n * p.beta**2)
        freqs = np.concatenate([[omega_plus, omega_minus], omega_tilde])
        diffs = np.abs(freqs[:, None] - freqs[None, :])
        distinct = diffs[diffs > 1e-15]
        min_spacing = float(distinct.min()) if distinct.size else 0.0
        evaluated = [rates.oscillator_rate(f) for f in freqs] + [
            rates.qubit_rate(f) for f in omega_tilde
        ]
        max_rate = max([*evaluated, rates.gamma_f])
        if max_rate > 0 and min_spacing > 0:
            secular_margin = min_spacing / max_rate
            # "much bigger" taken as a few times over; diagnostic only
            secular_ok = secular_margin >= 3.0
            if not secular_ok:
                notes.append(
                    f"secular margin {secular_margin:.3g} < 3: rates are not small "
                    "against the dressed frequency spacings"
                )
        else:
            secular_ok = True
            secular_margin = math.inf

    return ValidityReport(
        quasi_degenerate=quasi,
        qubit_margin=q_margin,
        beta_ok=beta_ok,
        beta_margin=beta_margin,
        n_max=n_max,
        n_levels_ok=n_ok,
        secular_ok=secular_ok,
        secular_margin=secular_margin,
        warnings=notes,
    )

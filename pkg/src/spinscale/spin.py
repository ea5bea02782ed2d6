"""Angular-momentum algebra in the Dicke basis and spin coherent states.

The 2J+1 dimensional Hilbert space of a collective spin J is spanned by the
Dicke states |J,m>, m = -J..+J.  Throughout the package, basis index i maps
to m = i - J (ascending m), so the fiducial state |J,-J> sits at index 0.
Only integer J is supported.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, DomainError, NonIntegerSpinError

#: default width of the excluded rim of the phase-space disk Q^2+P^2 < 4
BOUNDARY_EPS = 1e-9


def check_spin(j) -> int:
    """Validate a total spin value and return it as a plain int."""
    jf = float(j)
    if jf != int(jf):
        raise NonIntegerSpinError(
            f"total spin must be an integer, got {j} (half-integer J is not supported)")
    ji = int(jf)
    if ji < 1:
        raise ValueError(f"total spin must be >= 1, got {j}")
    return ji


@dataclass(frozen=True)
class DickeSpace:
    """The 2J+1 dimensional Dicke space of a collective spin J."""

    j: int

    def __post_init__(self):
        object.__setattr__(self, "j", check_spin(self.j))

    @property
    def dim(self) -> int:
        return 2 * self.j + 1

    def m_values(self) -> np.ndarray:
        """m quantum numbers in basis order, -J..+J."""
        return np.arange(-self.j, self.j + 1)

    def parity_signs(self) -> np.ndarray:
        """Diagonal of exp(-i*pi*Jz): (-1)^m per basis state."""
        return np.where(self.m_values() % 2 == 0, 1, -1)

    def parity_indices(self, sign: int) -> np.ndarray:
        """Basis indices belonging to the parity sector +1 (even m) or -1 (odd m)."""
        if sign not in (1, -1):
            raise ValueError(f"parity sign must be +1 or -1, got {sign}")
        return np.nonzero(self.parity_signs() == sign)[0]


@dataclass(frozen=True)
class CoherentState:
    """A spin coherent state |z(Q,P)> as amplitudes over the Dicke basis."""

    j: int
    q: float
    p: float
    coeffs: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.j + 1


def _check_disk(q: float, p: float, boundary_eps: float) -> float:
    r2 = q * q + p * p
    if r2 >= 4.0 - boundary_eps:
        raise DomainError(
            f"(Q,P)=({q},{p}) lies within {boundary_eps} of the chart rim "
            f"Q^2+P^2=4, the south-pole limit |J,+J>")
    return r2


def coherent_log_amplitudes(j, q: float, p: float, boundary_eps: float = BOUNDARY_EPS):
    """Log-magnitudes and phases of the coherent-state amplitudes.

    The amplitude on |J,m> is

        c_m = sqrt(C(2J, J+m)) * z^(J+m) / (1+|z|^2)^J,
        z   = (Q + iP) / sqrt(4 - (Q^2+P^2)),

    evaluated as log|c_m| (via log-gamma binomials) and arg(c_m), which stays
    finite over the whole support for J at least up to 15000 where the linear
    domain over/underflows.

    Returns
    -------
    logmag : (2J+1,) array of log|c_m|; -inf off the support.
    phase : (2J+1,) array of arg(c_m).
    """
    j = check_spin(j)
    r2 = _check_disk(q, p, boundary_eps)
    n = 2 * j
    k = np.arange(n + 1)
    phase = np.zeros(n + 1)
    if r2 == 0.0:
        logmag = np.full(n + 1, -np.inf)
        logmag[0] = 0.0
        return logmag, phase
    zsq = r2 / (4.0 - r2)  # |z|^2
    logmag = (0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
              + 0.5 * k * np.log(zsq) - j * np.log1p(zsq))
    phase = k * np.arctan2(p, q)
    return logmag, phase


def coherent_coefficients(j, q: float, p: float,
                          boundary_eps: float = BOUNDARY_EPS) -> np.ndarray:
    """Normalized coherent-state amplitude vector over the Dicke basis."""
    logmag, phase = coherent_log_amplitudes(j, q, p, boundary_eps)
    with np.errstate(under="ignore"):
        c = np.exp(logmag) * np.exp(1j * phase)
    # exact renormalization: log-gamma rounding at large J leaves the closed
    # form normalized only to ~1e-10
    c /= np.linalg.norm(c)
    return c


def coherent_state(j, q: float, p: float,
                   boundary_eps: float = BOUNDARY_EPS) -> CoherentState:
    """Construct a CoherentState at phase-space point (Q,P)."""
    j = check_spin(j)
    return CoherentState(j=j, q=float(q), p=float(p),
                         coeffs=coherent_coefficients(j, q, p, boundary_eps))


def overlap_probabilities(state: CoherentState, basis) -> np.ndarray:
    """Probabilities |<phi_i|z>|^2 of a state over an orthonormal eigenbasis.

    `basis` may be a SpectralBasis-like object (uses `.eigenvectors`) or a
    plain (N, N) matrix whose columns are the basis vectors.
    """
    v = getattr(basis, "eigenvectors", basis)
    v = np.asarray(v)
    if v.shape[0] != state.dim:
        raise DimensionMismatch(
            f"basis dimension {v.shape[0]} != state dimension {state.dim}")
    amps = v.conj().T @ state.coeffs
    return np.abs(amps) ** 2


def jz_diagonal(j) -> np.ndarray:
    """Diagonal of Jz in the Dicke basis: the m values."""
    j = check_spin(j)
    return np.arange(-j, j + 1, dtype=float)


def jx_offdiagonal(j) -> np.ndarray:
    """Jx couplings between m and m+1: sqrt(J(J+1) - m(m+1)) / 2."""
    j = check_spin(j)
    m = np.arange(-j, j, dtype=float)
    return 0.5 * np.sqrt(j * (j + 1.0) - m * (m + 1.0))


def jx_squared_band(j):
    """Banded form of Jx^2: (diagonal, couplings between m and m+2)."""
    a = jx_offdiagonal(j)
    apad = np.concatenate([[0.0], a, [0.0]])
    diag = apad[:-1] ** 2 + apad[1:] ** 2
    off2 = a[:-1] * a[1:]
    return diag, off2


def build_operator(kind: str, j) -> np.ndarray:
    """Dense matrix of a named collective-spin operator.

    kind is one of 'jz' (diagonal), 'jx' (tridiagonal), 'jx2' (pentadiagonal)
    or 'parity' (diagonal (-1)^m).
    """
    j = check_spin(j)
    n = 2 * j + 1
    kind = kind.lower()
    if kind == "jz":
        return np.diag(jz_diagonal(j))
    if kind == "jx":
        a = jx_offdiagonal(j)
        return np.diag(a, 1) + np.diag(a, -1)
    if kind == "jx2":
        diag, off2 = jx_squared_band(j)
        return np.diag(diag) + np.diag(off2, 2) + np.diag(off2, -2)
    if kind == "parity":
        return np.diag(DickeSpace(j).parity_signs().astype(float))
    raise ValueError(f"unknown operator kind {kind!r}; "
                     "expected one of jz, jx, jx2, parity")

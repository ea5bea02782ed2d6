"""Exact eigenproblems for the three collective-spin models.

HO is alpha*Jz (diagonal in the Dicke basis), LMG is alpha*Jz + k/(2J)*Jx^2
(real symmetric pentadiagonal), and the kicked top is described by its
one-period unitary F = exp(-i*alpha*Jz) exp(-i*k/(2J)*Jx^2) whose eigenphases
are the quasienergies.  All three commute with the parity operator
exp(-i*pi*Jz), so the solves are performed per parity block (even/odd m): the
blocks of Jx^2 are tridiagonal in the compressed index, parity labels come
for free, and near-degenerate doublets never mix sectors.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import (ConvergenceFailure, NonUnitaryInput, OutOfBudget,
                     UnsupportedModel)
from .spin import DickeSpace, check_spin, jx_offdiagonal, jx_squared_band, jz_diagonal

MODELS = ("HO", "LMG", "QKT")

#: largest dimension accepted for a dense solve
DENSE_DIM_LIMIT = 20001

#: rough flop count of one dense (complex) eigendecomposition
DENSE_SOLVE_FLOPS = 30.0


@dataclass(frozen=True)
class ModelParams:
    """Model selector plus its couplings and the spin J."""

    model: str
    j: int
    alpha: float = 0.84
    k: float = 0.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise UnsupportedModel(f"unknown model {self.model!r}; expected one of {MODELS}")
        object.__setattr__(self, "j", check_spin(self.j))
        if not (np.isfinite(self.alpha) and np.isfinite(self.k)):
            raise ValueError("alpha and k must be finite")

    @property
    def dim(self) -> int:
        return 2 * self.j + 1


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenvalues (energies or quasienergy phases), eigenvectors, parities.

    Eigenvectors are the columns of an (N, N) matrix in the Dicke basis,
    ordered by ascending eigenvalue (stable across parity sectors).
    """

    params: ModelParams | None
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    parity: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def sector(self, sign: int) -> np.ndarray:
        """Column indices of one parity sector."""
        return np.nonzero(self.parity == sign)[0]


def wrap_phase(x):
    """Map angles to the branch [-pi, pi)."""
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


def check_dense_budget(n: int, what: str = "dense solve"):
    if n > DENSE_DIM_LIMIT:
        raise OutOfBudget(
            f"{what} at N={n} exceeds the desk-scale limit N={DENSE_DIM_LIMIT} "
            f"(~{DENSE_SOLVE_FLOPS * n**3:.2e} flops)")


def lmg_hamiltonian(params: ModelParams) -> np.ndarray:
    """Dense LMG Hamiltonian alpha*Jz + k/(2J)*Jx^2 in the Dicke basis."""
    if params.model != "LMG":
        raise UnsupportedModel(f"lmg_hamiltonian got model {params.model!r}")
    j = params.j
    diag, off2 = jx_squared_band(j)
    g = params.k / (2.0 * j)
    h = np.diag(params.alpha * jz_diagonal(j) + g * diag)
    h += np.diag(g * off2, 2) + np.diag(g * off2, -2)
    return h


def _lmg_sector_band(params: ModelParams, sel: np.ndarray):
    """Tridiagonal (diag, off) of the LMG Hamiltonian on one parity block."""
    diag, off2 = jx_squared_band(params.j)
    g = params.k / (2.0 * params.j)
    m = sel - params.j
    d = params.alpha * m + g * diag[sel]
    e = g * off2[sel[:-1]] if len(sel) > 1 else np.zeros(0)
    return d, e


def _eigh_tridiagonal(d, e, label):
    try:
        return sla.eigh_tridiagonal(d, e)
    except (sla.LinAlgError, np.linalg.LinAlgError) as exc:  # pragma: no cover
        raise ConvergenceFailure(f"tridiagonal eigensolver failed for {label}") from exc


def _merge_sectors(pieces, n, complex_vectors):
    """Assemble per-sector (values, block vectors, indices, sign) into a basis.

    Columns are ordered by globally ascending eigenvalue; the sort is stable,
    so exact ties keep even-sector-first order and reruns are deterministic.
    """
    values = np.concatenate([w for w, _, _, _ in pieces])
    signs = np.concatenate([np.full(len(w), s) for w, _, _, s in pieces])
    dtype = complex if complex_vectors else float
    vectors = np.zeros((n, len(values)), dtype=dtype)
    col = 0
    for w, vb, sel, _ in pieces:
        vectors[np.ix_(sel, np.arange(col, col + len(w)))] = vb
        col += len(w)
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order], signs[order]


def spectral_basis(params: ModelParams, parity_split: bool = True) -> SpectralBasis:
    """Full eigenbasis of a model at given J, with parity labels.

    The default parity-split path solves the two blocks independently; it is
    both faster (tridiagonal blocks for HO/LMG) and gives well-defined parity
    even across numerically degenerate doublets.
    """
    n = params.dim
    check_dense_budget(n, f"{params.model} eigenbasis")
    space = DickeSpace(params.j)
    if params.model == "HO":
        values = params.alpha * jz_diagonal(params.j)
        basis = SpectralBasis(params, values, np.eye(n), space.parity_signs())
        return basis
    if params.model == "LMG":
        if not parity_split:
            return diagonalize_hermitian(lmg_hamiltonian(params), parity_split=False,
                                         params=params)
        pieces = []
        for sign in (1, -1):
            sel = space.parity_indices(sign)
            d, e = _lmg_sector_band(params, sel)
            w, vb = _eigh_tridiagonal(d, e, f"LMG J={params.j} parity {sign:+d}")
            pieces.append((w, vb, sel, sign))
        values, vectors, signs = _merge_sectors(pieces, n, complex_vectors=False)
        return SpectralBasis(params, values, vectors, signs)
    # QKT
    if not parity_split:
        return diagonalize_unitary(floquet_operator(params), parity_split=False,
                                   params=params)
    pieces = []
    for sign, (sel, fb) in zip((1, -1), floquet_sector_matrices(params)):
        ph, zb = _eig_unitary(fb, f"QKT J={params.j} parity {sign:+d}")
        pieces.append((ph, zb, sel, sign))
    values, vectors, signs = _merge_sectors(pieces, n, complex_vectors=True)
    return SpectralBasis(params, values, vectors, signs)


def floquet_operator(params: ModelParams) -> np.ndarray:
    """Dense one-period unitary exp(-i*alpha*Jz) exp(-i*k/(2J)*Jx^2).

    The torsion factor is built by sandwiching the diagonal phase between the
    eigenbasis of the tridiagonal Jx, which keeps the product unitary to the
    orthogonality of that eigenbasis.
    """
    if params.model != "QKT":
        raise UnsupportedModel(f"floquet_operator got model {params.model!r}")
    n = params.dim
    check_dense_budget(n, "Floquet operator")
    j = params.j
    lam, u = _eigh_tridiagonal(np.zeros(n), jx_offdiagonal(j), f"Jx J={j}")
    kick = (u * np.exp(-1j * (params.k / (2.0 * j)) * lam**2)) @ u.T
    return np.exp(-1j * params.alpha * jz_diagonal(j))[:, None] * kick


def floquet_sector_matrices(params: ModelParams):
    """Parity blocks of the Floquet operator: [(even indices, F_even), (odd, F_odd)].

    Jx^2 restricted to one parity block is tridiagonal in the compressed
    index, so each block costs a tridiagonal solve plus one dense product.
    """
    if params.model != "QKT":
        raise UnsupportedModel(f"floquet_sector_matrices got model {params.model!r}")
    check_dense_budget(params.dim, "Floquet operator")
    space = DickeSpace(params.j)
    diag, off2 = jx_squared_band(params.j)
    g = params.k / (2.0 * params.j)
    out = []
    for sign in (1, -1):
        sel = space.parity_indices(sign)
        e = off2[sel[:-1]] if len(sel) > 1 else np.zeros(0)
        mu, v = _eigh_tridiagonal(diag[sel], e, f"Jx^2 J={params.j} parity {sign:+d}")
        kick = (v * np.exp(-1j * g * mu)) @ v.T
        fb = np.exp(-1j * params.alpha * (sel - params.j))[:, None] * kick
        out.append((sel, fb))
    return out


def floquet_phases(params: ModelParams, sign: int) -> np.ndarray:
    """Sorted quasienergy phases of one parity sector (eigenvalues only)."""
    sector = 0 if sign == 1 else 1
    sel, fb = floquet_sector_matrices(params)[sector]
    try:
        ev = np.linalg.eigvals(fb)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceFailure(
            f"eigvals failed for QKT J={params.j} parity {sign:+d}") from exc
    phases = np.angle(ev)
    phases[phases == np.pi] = -np.pi
    return np.sort(phases)


def _eig_unitary(f: np.ndarray, label: str):
    """Schur-based eigendecomposition of a (normal) unitary matrix.

    The Schur vectors are orthonormal by construction; for a unitary input
    the triangular factor is numerically diagonal, which is verified so that
    the eigenvector residual contract cannot silently degrade.
    """
    try:
        t, z = sla.schur(f, output="complex")
    except (sla.LinAlgError, np.linalg.LinAlgError) as exc:  # pragma: no cover
        raise ConvergenceFailure(f"Schur decomposition failed for {label}") from exc
    ev = np.diag(t).copy()
    off = np.abs(t - np.diag(ev)).max() if len(ev) > 1 else 0.0
    if off > 1e-10:
        raise ConvergenceFailure(
            f"Schur form of {label} not numerically diagonal "
            f"(max off-diagonal {off:.2e}); quasienergy cluster too tight")
    phases = np.angle(ev)
    phases[phases == np.pi] = -np.pi
    order = np.argsort(phases, kind="stable")
    return phases[order], z[:, order]


def _space_for_dim(n: int, parity_split: bool):
    """DickeSpace of an odd dimension; even dimensions carry no parity labels."""
    if n % 2 == 1:
        return DickeSpace((n - 1) // 2)
    if parity_split:
        raise ValueError(f"parity split needs an odd (Dicke) dimension, got N={n}")
    return None


def _parity_labels(space, vectors):
    if space is None:
        return np.zeros(vectors.shape[1], dtype=int)
    signs = space.parity_signs()
    pexp = np.real(np.einsum("ij,i,ij->j", vectors.conj(), signs, vectors))
    return np.where(pexp >= 0, 1, -1)


def diagonalize_hermitian(matrix: np.ndarray, parity_split: bool = False,
                          params: ModelParams | None = None) -> SpectralBasis:
    """Full spectrum of a real-symmetric/Hermitian matrix in the Dicke basis.

    With parity_split the two m-parity blocks are solved independently (the
    matrix must not couple them) and merged with labels; otherwise a plain
    dense solve is used and parity labels are the signs of the per-vector
    parity expectation values (zeros for non-Dicke even dimensions).
    """
    h = np.asarray(matrix)
    n = h.shape[0]
    check_dense_budget(n)
    label = f"{params.model} J={params.j}" if params else f"matrix N={n}"
    space = _space_for_dim(n, parity_split)
    if parity_split:
        pieces = []
        for sign in (1, -1):
            sel = space.parity_indices(sign)
            other = space.parity_indices(-sign)
            coupling = np.abs(h[np.ix_(sel, other)]).max()
            if coupling > 1e-12:
                raise ValueError(
                    f"matrix couples parity sectors (|coupling| up to {coupling:.2e}); "
                    "parity_split is invalid")
            try:
                w, vb = sla.eigh(h[np.ix_(sel, sel)])
            except (sla.LinAlgError, np.linalg.LinAlgError) as exc:
                raise ConvergenceFailure(f"eigh failed for {label} parity {sign:+d}") from exc
            pieces.append((w, vb, sel, sign))
        values, vectors, signs = _merge_sectors(pieces, n,
                                                complex_vectors=np.iscomplexobj(h))
        return SpectralBasis(params, values, vectors, signs)
    try:
        values, vectors = sla.eigh(h)
    except (sla.LinAlgError, np.linalg.LinAlgError) as exc:
        raise ConvergenceFailure(f"eigh failed for {label}") from exc
    return SpectralBasis(params, values, vectors, _parity_labels(space, vectors))


def diagonalize_unitary(f: np.ndarray, parity_split: bool = False,
                        params: ModelParams | None = None) -> SpectralBasis:
    """Quasienergy phases in [-pi, pi) and eigenvectors of a unitary matrix."""
    f = np.asarray(f)
    n = f.shape[0]
    check_dense_budget(n)
    uerr = np.abs(f @ f.conj().T - np.eye(n)).max()
    if uerr > 1e-8:
        raise NonUnitaryInput(f"input is not unitary: max |FF^dag - I| = {uerr:.2e}")
    label = f"{params.model} J={params.j}" if params else f"matrix N={n}"
    space = _space_for_dim(n, parity_split)
    if parity_split:
        pieces = []
        for sign in (1, -1):
            sel = space.parity_indices(sign)
            other = space.parity_indices(-sign)
            coupling = np.abs(f[np.ix_(sel, other)]).max()
            if coupling > 1e-10:
                raise ValueError(
                    f"matrix couples parity sectors (|coupling| up to {coupling:.2e}); "
                    "parity_split is invalid")
            ph, zb = _eig_unitary(f[np.ix_(sel, sel)], f"{label} parity {sign:+d}")
            pieces.append((ph, zb, sel, sign))
        values, vectors, signs = _merge_sectors(pieces, n, complex_vectors=True)
        return SpectralBasis(params, values, vectors, signs)
    phases, z = _eig_unitary(f, label)
    return SpectralBasis(params, phases, z, _parity_labels(space, z))

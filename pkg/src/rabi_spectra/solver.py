"""Certified eigendecomposition, adaptive truncation, parity and level pairing.

Truncation control follows a belt-and-braces rule: a level counts as
converged only when both its coefficient tail weight (probability in the
last five basis indices) and its energy drift between successive
truncations are below tolerance. Drift alone can plateau spuriously when
newly added basis states are nearly orthogonal to the low levels, and a
tail coefficient can vanish accidentally, so neither test is trusted
alone. Because the truncated bases are nested, each tracked eigenvalue is
non-increasing as the basis grows, which the tests assert along the
iteration trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceFailure, DomainError, NoConvergence
from .hamiltonian import RwaLevel, build_displaced_hamiltonian
from .model import BasisSpec, ModelParams, validate
from . import states as _states

__all__ = [
    "EigenDecomposition",
    "eigh_symmetric",
    "eigh_hermitian",
    "SpectralResult",
    "solve_spectrum",
    "truncation_table",
    "parity_expectation",
    "LevelPairing",
    "classify_levels",
]

_TAIL_WINDOW = 5


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues, orthonormal column eigenvectors, certified residual."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norm: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column positive (real case)."""
    idx = np.argmax(np.abs(vectors), axis=0)
    flips = np.where(vectors[idx, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    return vectors * flips


def eigh_symmetric(matrix: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of an exactly symmetric real matrix.

    Deterministic for identical input; eigenvalues ascending; each
    eigenvector's largest-magnitude component is positive. The residual
    max_i ‖A v_i - λ_i v_i‖ is computed and certified against
    1e-9 · (1 + max|λ|).
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("expected a square matrix of dimension >= 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix must be exactly symmetric")
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    eigenvectors = _fix_signs(eigenvectors)
    residual = float(np.max(np.linalg.norm(a @ eigenvectors - eigenvectors * eigenvalues, axis=0)))
    bound = 1e-9 * (1.0 + float(np.max(np.abs(eigenvalues))))
    if residual > bound:
        raise NoConvergence(f"residual {residual:.3e} exceeds certified bound {bound:.3e}")
    return EigenDecomposition(eigenvalues, eigenvectors, residual)


def eigh_hermitian(matrix: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a complex Hermitian matrix.

    Reduced to a real symmetric problem of doubled dimension through the
    standard [[Re, -Im], [Im, Re]] embedding; every eigenvalue of the
    embedding appears twice and is deduplicated. Degenerate complex
    eigenvectors are re-orthonormalized, and each column's global phase is
    fixed so its largest-magnitude component is real positive.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("expected a square matrix of dimension >= 1")
    if not np.array_equal(a, a.conj().T):
        raise ValueError("matrix must be exactly Hermitian")
    dim = a.shape[0]
    embedded = np.zeros((2 * dim, 2 * dim))
    embedded[:dim, :dim] = a.real
    embedded[:dim, dim:] = -a.imag
    embedded[dim:, :dim] = a.imag
    embedded[dim:, dim:] = a.real
    pair_dec = eigh_symmetric(embedded)
    eigenvalues = 0.5 * (pair_dec.eigenvalues[0::2] + pair_dec.eigenvalues[1::2])
    # Each complex eigenvector appears twice in the embedding (as v and iv),
    # so a degenerate cluster of m complex levels spans 2m real columns whose
    # complex images have rank exactly m; the SVD extracts an orthonormal
    # basis of that span.
    scale = 1.0 + float(np.max(np.abs(eigenvalues)))
    vectors = np.empty((dim, dim), dtype=complex)
    start = 0
    for stop in range(1, dim + 1):
        if stop == dim or eigenvalues[stop] - eigenvalues[start] > 1e-12 * scale:
            block = (pair_dec.eigenvectors[:dim, 2 * start:2 * stop]
                     + 1j * pair_dec.eigenvectors[dim:, 2 * start:2 * stop])
            left, _, _ = np.linalg.svd(block, full_matrices=False)
            vectors[:, start:stop] = left[:, :stop - start]
            start = stop
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(dim)]
    vectors = vectors * (np.abs(pivots) / pivots)
    residual = float(np.max(np.linalg.norm(a @ vectors - vectors * eigenvalues, axis=0)))
    bound = 1e-9 * (1.0 + float(np.max(np.abs(eigenvalues))))
    if residual > bound:
        raise NoConvergence(f"residual {residual:.3e} exceeds certified bound {bound:.3e}")
    return EigenDecomposition(eigenvalues, vectors, residual)


@dataclass(frozen=True)
class SpectralResult:
    """Converged low-lying eigensolution of the displaced-basis eigenproblem.

    Coefficient rows ``coeff_c[i]`` / ``coeff_d[i]`` are the +g / -g
    displaced-block coefficients of level i at truncation ``n_final``.
    ``trace`` records (truncation, lowest-k energies) for every truncation
    visited, which is the raw material for monotonicity checks.
    ``decomposition`` keeps the full spectrum at ``n_final`` for the
    spectral propagator.
    """

    params: ModelParams
    basis: BasisSpec
    n_final: int
    energies: np.ndarray
    coeff_c: np.ndarray
    coeff_d: np.ndarray
    tail_weights: np.ndarray
    drifts: np.ndarray
    parities: Optional[np.ndarray]
    converged: np.ndarray
    trace: Tuple[Tuple[int, np.ndarray], ...]
    decomposition: EigenDecomposition = field(repr=False)

    @property
    def levels(self) -> int:
        return self.energies.shape[0]

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def vectors(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Per-level coefficient pairs (c, d)."""
        return [(self.coeff_c[i], self.coeff_d[i]) for i in range(self.levels)]


def _level_slices(dec: EigenDecomposition, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    dim = dec.dim // 2
    cols = dec.eigenvectors[:, :k]
    c = cols[:dim].T.copy()
    d = cols[dim:].T.copy()
    window = min(_TAIL_WINDOW, dim)
    tails = np.sum(c[:, dim - window:] ** 2, axis=1) + np.sum(d[:, dim - window:] ** 2, axis=1)
    return dec.eigenvalues[:k].copy(), c, d, tails


def _order_degenerate(dec: EigenDecomposition, g: float) -> EigenDecomposition:
    """Deterministic ordering inside degenerate clusters: parity, then upper-block weight.

    Only relevant at g = 0 where level pairs are exactly degenerate; keeps
    golden outputs stable across runs and platforms.
    """
    w = dec.eigenvalues
    v = dec.eigenvectors
    dim = v.shape[0] // 2
    scale = 1.0 + float(np.max(np.abs(w)))
    order = np.arange(w.shape[0])
    start = 0
    for stop in range(1, w.shape[0] + 1):
        if stop == w.shape[0] or w[stop] - w[start] > 1e-12 * scale:
            if stop - start > 1:
                signs = (-1.0) ** np.arange(dim)
                keys = []
                for j in range(start, stop):
                    c, d = v[:dim, j], v[dim:, j]
                    parity = 2.0 * np.sum(signs * c * d)  # bare-basis parity at g = 0
                    keys.append((-round(parity, 6), -round(float(np.sum(c * c)), 9), j))
                order[start:stop] = [j for _, _, j in sorted(keys)]
            start = stop
    if np.array_equal(order, np.arange(w.shape[0])):
        return dec
    return EigenDecomposition(w[order].copy(), v[:, order].copy(), dec.residual_norm)


def _solve_at(params: ModelParams, n: int, k: int):
    dec = eigh_symmetric(build_displaced_hamiltonian(params, n))
    if params.g == 0.0:
        dec = _order_degenerate(dec, params.g)
    energies, c, d, tails = _level_slices(dec, k)
    return dec, energies, c, d, tails


def solve_spectrum(params: ModelParams, basis: Optional[BasisSpec] = None) -> SpectralResult:
    """Adaptive eigensolution of the displaced-basis problem.

    Grows the truncation from ``n_start`` in steps of ``n_step`` until every
    requested level passes both the tail and the drift test, or raises
    :class:`ConvergenceFailure` (carrying the best result) at the hard cap.
    """
    params = validate(params)
    basis = basis if basis is not None else BasisSpec()
    k = basis.levels_requested
    trace: List[Tuple[int, np.ndarray]] = []
    prev_energies: Optional[np.ndarray] = None
    n = basis.n_start
    while True:
        dec, energies, c, d, tails = _solve_at(params, n, k)
        if prev_energies is None:
            drifts = np.full(k, np.inf)
        else:
            drifts = np.abs(energies - prev_energies)
        converged = (tails <= basis.tail_tol) & (drifts <= basis.drift_tol)
        trace.append((n, energies))
        done = bool(np.all(converged))
        if done or n >= basis.n_max_hard:
            parities = None
            if params.delta == 0.0:
                parities = _bulk_parities(c, d, params.g)
            result = SpectralResult(
                params=params, basis=basis, n_final=n, energies=energies,
                coeff_c=c, coeff_d=d, tail_weights=tails, drifts=drifts,
                parities=parities, converged=converged, trace=tuple(trace),
                decomposition=dec,
            )
            if done:
                return result
            raise ConvergenceFailure(
                f"not converged at hard cap n={basis.n_max_hard}: "
                f"max tail {np.max(tails):.3e}, max drift {np.max(drifts):.3e}",
                result=result,
            )
        prev_energies = energies
        n = min(n + basis.n_step, basis.n_max_hard)


def truncation_table(params: ModelParams, n_list: Sequence[int], levels: int) -> List[dict]:
    """Fixed-truncation snapshots: per (n, level) energy, tail weight and drift.

    Drift compares each truncation against the previous entry of ``n_list``
    and is None for the first one. Input truncations must be increasing.
    """
    params = validate(params)
    if not n_list or any(n < 1 for n in n_list):
        raise ValueError("n_list must hold truncations >= 1")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    if levels > 2 * (min(n_list) + 1):
        raise ValueError("levels exceeds the smallest problem dimension")
    rows = []
    prev = None
    for n in n_list:
        _, energies, _, _, tails = _solve_at(params, n, levels)
        for i in range(levels):
            drift = None if prev is None else abs(energies[i] - prev[i])
            rows.append({"n": n, "level": i, "energy": float(energies[i]),
                         "tail_weight": float(tails[i]), "drift": drift})
        prev = energies
    return rows


def _bulk_parities(c: np.ndarray, d: np.ndarray, g: float) -> np.ndarray:
    """Bare-basis parity of many coefficient rows, sharing one pair of basis changes."""
    from .overlap import displacement_matrix

    n = c.shape[1] - 1
    bare_c = c @ displacement_matrix(-g, n).real.T
    bare_d = d @ displacement_matrix(+g, n).real.T
    signs = (-1.0) ** np.arange(n + 1)
    return 2.0 * np.sum(signs[None, :] * bare_c * bare_d, axis=1)


def parity_expectation(c: np.ndarray, d: np.ndarray, params: ModelParams) -> float:
    """⟨σ_x ⊗ (-1)^(a†a)⟩ of a displaced-basis level, evaluated in the bare basis.

    Defined only at zero detuning, where the working-frame Hamiltonian
    commutes with the parity operator; raises :class:`DomainError`
    otherwise.
    """
    if params.delta != 0.0:
        raise DomainError("parity is conserved only at zero detuning")
    state = _states.eigvec_to_bare(np.asarray(c, dtype=float), np.asarray(d, dtype=float), params.g)
    return _states.parity_overlap(state)


@dataclass(frozen=True)
class LevelPairing:
    """One row of the level-assignment table against the rotating-wave spectrum."""

    level: int
    energy: float
    rwa_label: str
    rwa_energy: float
    gap: float
    nearest_label: str
    agrees: bool


def classify_levels(result: SpectralResult, rwa: Sequence[RwaLevel]) -> List[LevelPairing]:
    """Pair each computed level with its rotating-wave partner.

    The ground level is paired with the uncoupled RWA ground; excited level
    j is assigned to branch '-' of doublet (j-1)//2 when j is odd and
    branch '+' when j is even. The assignment is cross-checked against
    plain nearest-energy matching and any disagreement is flagged in the
    row, never silently reassigned.
    """
    by_label = {lv.label: lv.energy for lv in rwa}
    rows: List[LevelPairing] = []
    for j, energy in enumerate(result.energies):
        energy = float(energy)
        if j == 0:
            label = "ground"
        else:
            pair = (j - 1) // 2
            label = f"E-_{pair}" if j % 2 == 1 else f"E+_{pair}"
        if label not in by_label:
            raise ValueError(f"rwa spectrum too short: missing {label}")
        partner = by_label[label]
        nearest = min(rwa, key=lambda lv: (abs(lv.energy - energy), lv.label))
        rows.append(LevelPairing(
            level=j, energy=energy, rwa_label=label, rwa_energy=partner,
            gap=energy - partner, nearest_label=nearest.label,
            agrees=nearest.label == label,
        ))
    return rows

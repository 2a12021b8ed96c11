"""Dense symmetric observables and an eigensolver-free operator norm."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import DimensionError


class NumericError(RuntimeError):
    """An iterative numeric routine failed to converge."""


@dataclass(frozen=True, eq=False)
class DenseObservable:
    """Real symmetric matrix observable; all constructions here are real.

    ``norm_bounded`` flags matrices promised to satisfy ||M||_op <= 1 + 1e-9.
    Materialization is capped at 12 qubits (16.8M entries); anything larger
    must use PauliMask or structured forms.
    """

    entries: np.ndarray
    norm_bounded: bool = False

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError("observable must be square")
        dim = arr.shape[0]
        if dim < 2 or (dim & (dim - 1)) != 0:
            raise DimensionError("dimension must be a power of two >= 2")
        if dim > 1 << 12:
            raise DimensionError("dense observables capped at 12 qubits")
        if not np.array_equal(arr, arr.T):
            raise ValueError("observable must be exactly symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        if self.norm_bounded and operator_norm(arr) > 1.0 + 1e-9:
            raise ValueError("operator norm exceeds the declared bound")

    @property
    def qubits(self) -> int:
        return int(self.entries.shape[0]).bit_length() - 1


def operator_norm(matrix, rel_tol: float = 1e-9, max_iter: int = 20000) -> float:
    """Largest absolute eigenvalue of a symmetric matrix via power iteration.

    Iterates on M @ M (so paired eigenvalues +-lambda cannot stall it) and
    stops when the norm estimate stabilizes to well below ``rel_tol``; the
    start vector is seeded from the dimension alone, so results are
    reproducible. Raises NumericError after ``max_iter`` sweeps.
    """
    arr = np.ascontiguousarray(
        matrix.entries if isinstance(matrix, DenseObservable) else matrix,
        dtype=np.float64,
    )
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError("operator norm needs a square matrix")
    if not np.array_equal(arr, arr.T):
        raise ValueError("operator norm path requires an exactly symmetric matrix")
    if not np.any(arr):
        return 0.0

    dim = arr.shape[0]
    rng = np.random.default_rng(0xC0FFEE ^ dim)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    estimate = 0.0
    stable = 0
    for _ in range(max_iter):
        w = arr @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # v sits in the null space; restart from a fresh direction
            v = rng.standard_normal(dim)
            v /= np.linalg.norm(v)
            stable = 0
            continue
        u = arr @ w
        nu = float(np.linalg.norm(u))
        new_estimate = nw  # ||M v|| -> sqrt(lambda_max(M^2)) for unit v
        if nu != 0.0:
            v = u / nu
        else:
            v = w / nw
        if estimate > 0.0 and abs(new_estimate - estimate) <= 1e-13 * new_estimate:
            stable += 1
            if stable >= 3:
                return new_estimate
        else:
            stable = 0
        estimate = new_estimate
    raise NumericError(f"operator norm did not converge in {max_iter} iterations")

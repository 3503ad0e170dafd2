"""Banded symmetric indefinite LDL^T factorization.

The matrix is reordered by reverse Cuthill-McKee and factored inside its
band.  The pivoting rule is deterministic: a 1x1 diagonal pivot whenever it
passes the Bunch-Kaufman magnitude test against its own column, otherwise
the adjacent 2x2 diagonal block.  No row interchanges are performed, so the
band never grows by more than one column; a 2x2 block with negligible
determinant raises :class:`NumericalError` with the pivot location instead
of silently continuing.

Because the factorization is a congruence, the signs of the pivot blocks
give the matrix inertia (Sylvester), which is how negative eigenvalues of
the pencil (K, M) are counted: ``#{lambda < sigma} = n_neg(K - sigma*M)``.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import sparse
from scipy.sparse.csgraph import reverse_cuthill_mckee

from .errors import NumericalError

_ALPHA = (1.0 + math.sqrt(17.0)) / 8.0


class BandedLDLT:
    """Factor a sparse symmetric matrix; expose inertia and triangular solves.

    Attributes
    ----------
    inertia : tuple of int
        (negative, zero, positive) pivot-block eigenvalue counts.
    """

    def __init__(self, K: sparse.spmatrix, breakdown_rtol: float = 1e-13):
        K = sparse.csr_matrix(K)
        n = K.shape[0]
        if K.shape[0] != K.shape[1]:
            raise ValueError("matrix must be square")
        self.n = n
        if n == 0:
            self.inertia = (0, 0, 0)
            self._perm = np.zeros(0, dtype=np.int64)
            return

        perm = np.asarray(reverse_cuthill_mckee(K, symmetric_mode=True), dtype=np.int64)
        Kp = K[perm][:, perm].tocoo()
        mask = Kp.row >= Kp.col
        rows, cols, vals = Kp.row[mask], Kp.col[mask], Kp.data[mask]
        band = int((rows - cols).max()) if len(rows) else 0
        width = band + 2
        R = np.zeros((n, width))
        R[cols, rows - cols] = vals

        scale = float(np.abs(vals).max()) if len(vals) else 0.0
        tiny = breakdown_rtol * max(scale, 1e-300)

        pivot_kind = np.zeros(n, dtype=np.int8)  # 1: 1x1, 2: first of 2x2, 0: second of 2x2
        col_len = np.zeros(n, dtype=np.int64)
        D1 = np.zeros(n)
        E = np.zeros(n)
        neg = zero = pos = 0

        j = 0
        while j < n:
            m = min(band, n - 1 - j)
            d = R[j, 0]
            col = R[j, 1 : 1 + m].copy() if m > 0 else np.zeros(0)
            gamma = float(np.abs(col).max()) if m > 0 else 0.0

            if gamma == 0.0:
                pivot_kind[j] = 1
                col_len[j] = 0
                D1[j] = d
                if abs(d) <= tiny:
                    zero += 1
                    D1[j] = 0.0
                elif d > 0:
                    pos += 1
                else:
                    neg += 1
                j += 1
                continue

            if abs(d) >= _ALPHA * gamma:
                if d > 0:
                    pos += 1
                else:
                    neg += 1
                ell = col / d
                pad = np.concatenate([col, np.zeros(width)])
                win = sliding_window_view(pad, width)[:m]
                R[j + 1 : j + 1 + m, :] -= ell[:, None] * win
                R[j, 1 : 1 + m] = ell
                pivot_kind[j] = 1
                col_len[j] = m
                D1[j] = d
                j += 1
                continue

            # Adjacent 2x2 block pivot.
            if j + 1 >= n:
                raise NumericalError(f"LDLT breakdown at final pivot (row {int(perm[j])})")
            e = R[j, 1]
            d2 = R[j + 1, 0]
            det = d * d2 - e * e
            if abs(det) <= tiny * max(abs(d), abs(d2), abs(e), tiny):
                raise NumericalError(f"LDLT breakdown: singular 2x2 pivot at row {int(perm[j])}")
            if det < 0:
                neg += 1
                pos += 1
            elif d + d2 > 0:
                pos += 2
            else:
                neg += 2

            mm = min(band, n - 2 - j) if j + 2 <= n - 1 else 0
            c1 = np.zeros(mm)
            c1[: max(m - 1, 0)] = col[1:]
            c2 = R[j + 1, 1 : 1 + mm].copy()
            x1 = (c1 * d2 - c2 * e) / det
            x2 = (c2 * d - c1 * e) / det
            if mm > 0:
                p1 = np.concatenate([x1, np.zeros(width)])
                p2 = np.concatenate([x2, np.zeros(width)])
                w1 = sliding_window_view(p1, width)[:mm]
                w2 = sliding_window_view(p2, width)[:mm]
                R[j + 2 : j + 2 + mm, :] -= c1[:, None] * w1 + c2[:, None] * w2
            R[j, 2 : 2 + mm] = x1
            R[j + 1, 1 : 1 + mm] = x2
            pivot_kind[j] = 2
            pivot_kind[j + 1] = 0
            col_len[j] = mm
            col_len[j + 1] = mm
            D1[j], E[j], D1[j + 1] = d, e, d2
            j += 2

        self.inertia = (neg, zero, pos)
        self._perm = perm
        self._R = R
        self._pivot_kind = pivot_kind
        self._col_len = col_len
        self._D1 = D1
        self._E = E

    @property
    def n_negative(self) -> int:
        return self.inertia[0]

    @property
    def is_positive_definite(self) -> bool:
        return self.inertia[0] == 0 and self.inertia[1] == 0

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve K x = rhs with the stored factors (single right-hand side)."""
        n = self.n
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (n,):
            raise ValueError(f"rhs must have shape ({n},)")
        if n == 0:
            return rhs.copy()
        R, kind, clen, D1, E = self._R, self._pivot_kind, self._col_len, self._D1, self._E
        y = rhs[self._perm].copy()

        j = 0
        while j < n:
            m = clen[j]
            if kind[j] == 1:
                if m > 0:
                    y[j + 1 : j + 1 + m] -= R[j, 1 : 1 + m] * y[j]
                j += 1
            else:
                if m > 0:
                    y[j + 2 : j + 2 + m] -= R[j, 2 : 2 + m] * y[j] + R[j + 1, 1 : 1 + m] * y[j + 1]
                j += 2

        j = 0
        while j < n:
            if kind[j] == 1:
                if D1[j] == 0.0:
                    raise NumericalError(f"zero pivot at row {int(self._perm[j])}; matrix is singular")
                y[j] /= D1[j]
                j += 1
            else:
                d, e, d2 = D1[j], E[j], D1[j + 1]
                det = d * d2 - e * e
                yj, yj1 = y[j], y[j + 1]
                y[j] = (d2 * yj - e * yj1) / det
                y[j + 1] = (d * yj1 - e * yj) / det
                j += 2

        for j in range(n - 1, -1, -1):
            m = clen[j]
            if m == 0:
                continue
            if kind[j] == 1:
                y[j] -= R[j, 1 : 1 + m] @ y[j + 1 : j + 1 + m]
            elif kind[j] == 2:
                y[j] -= R[j, 2 : 2 + m] @ y[j + 2 : j + 2 + m]
            else:  # second member of a 2x2 block
                y[j] -= R[j, 1 : 1 + m] @ y[j + 1 : j + 1 + m]

        x = np.empty(n)
        x[self._perm] = y
        return x


def inertia(K: sparse.spmatrix) -> tuple[int, int, int]:
    """Inertia (negative, zero, positive) of a sparse symmetric matrix."""
    return BandedLDLT(K).inertia


def count_below(K: sparse.spmatrix, M: sparse.spmatrix, sigma: float) -> int:
    """Number of pencil eigenvalues of (K, M) strictly below sigma (M positive definite)."""
    fac = BandedLDLT(K - sigma * M)
    return fac.inertia[0]

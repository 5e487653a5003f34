"""Symmetric decomposition ``B H B^T = D`` with complete pivoting.

At each step the entry of largest magnitude in the trailing block is moved
to the pivot position (adding a neighbouring row/column with a sign chosen
so that the pivot cannot shrink), and the column below the pivot is then
eliminated.  The pivoting keeps ``B`` and ``B^{-1}`` small: their squared
Frobenius norms never exceed ``(5n)^n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .rational import ZERO, Matrix, inverse


class NotSymmetricError(ValueError):
    pass


@dataclass(frozen=True)
class PivotRecord:
    k: int
    s: int
    r: int
    gamma: int  # 0 when no row was added (s == r or degenerate step)
    degenerate: bool = False


@dataclass(frozen=True)
class SymDecomp:
    B: Matrix
    D: Matrix
    pivot_log: tuple[PivotRecord, ...]
    # (H^(k), P_k ... P_1) after each iteration, kept when requested
    history: tuple[tuple[Matrix, Matrix], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class LdlForm:
    L: Matrix
    D: Matrix


def _swap(M: list[list], i: int, j: int) -> None:
    if i == j:
        return
    M[i], M[j] = M[j], M[i]
    for row in M:
        row[i], row[j] = row[j], row[i]


def _swap_rows(M: list[list], i: int, j: int) -> None:
    M[i], M[j] = M[j], M[i]


def symmetric_decompose(Hhat: Matrix, record: bool = False) -> SymDecomp:
    if not Hhat.is_symmetric():
        raise NotSymmetricError("input matrix is not symmetric")
    n = Hhat.nrows
    H = [list(r) for r in Hhat.rows]
    B = [list(r) for r in Matrix.identity(n).rows]
    Pacc = [list(r) for r in Matrix.identity(n).rows]
    log = []
    hist = []
    for k in range(n - 1):
        best, s, r = ZERO, k, k
        for i in range(k, n):
            for j in range(i, n):
                a = abs(H[i][j])
                if a > best:
                    best, s, r = a, i, j
        if best == 0:
            log.append(PivotRecord(k, k, k, 0, degenerate=True))
            if record:
                hist.append((Matrix(H, ncols=n), Matrix(Pacc, ncols=n)))
            continue
        # move row/column s to position k
        _swap(H, s, k)
        _swap_rows(B, s, k)
        _swap_rows(Pacc, s, k)
        gamma = 0
        if s != r:
            gamma = 1 if H[r][k] * (H[k][k] + H[r][r]) >= 0 else -1
            g = mpq(gamma)
            H[k] = [a + g * b for a, b in zip(H[k], H[r])]
            for row in H:
                row[k] += g * row[r]
            B[k] = [a + g * b for a, b in zip(B[k], B[r])]
            Pacc[k] = [a + g * b for a, b in zip(Pacc[k], Pacc[r])]
        log.append(PivotRecord(k, s, r, gamma))
        piv = H[k][k]
        for i in range(k + 1, n):
            e = H[i][k] / piv
            if e:
                H[i] = [a - e * b for a, b in zip(H[i], H[k])]
                B[i] = [a - e * b for a, b in zip(B[i], B[k])]
        # symmetric column step: the block below row k is now H' = (I-E)H(I-E)^T
        for i in range(k + 1, n):
            e = H[k][i] / piv
            if e:
                for row in H:
                    row[i] -= e * row[k]
        if record:
            hist.append((Matrix(H, ncols=n), Matrix(Pacc, ncols=n)))
    Bm = Matrix(B, ncols=n) if n else Matrix.zero(0, 0)
    Dm = Matrix(H, ncols=n) if n else Matrix.zero(0, 0)
    return SymDecomp(Bm, Dm, tuple(log), tuple(hist))


def ldl_decompose(Hhat: Matrix) -> LdlForm:
    """``Hhat = L D L^T`` with ``L`` the inverse of the decomposition's ``B``."""
    sd = symmetric_decompose(Hhat)
    return LdlForm(inverse(sd.B), sd.D)

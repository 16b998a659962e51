"""Eigenvalue spectra from text files.

Two formats are read:

* a list of nonnegative eigenvalues separated by commas and/or newlines;
* a dense symmetric matrix: a header line holding ``n`` followed by ``n``
  rows of ``n`` whitespace-separated numbers.

Matrices are diagonalised with cyclic Jacobi rotations in round-robin
order, so each step applies ``n/2`` disjoint rotations at once.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass

import numpy as np

from ..dist import WeightVector
from ..errors import NotPSD, NotSymmetric, ParseError

SYMMETRY_RTOL = 1e-10
JACOBI_RTOL = 1e-10
PSD_CLAMP_RTOL = 1e-8
MAX_MATRIX_DIM = 2000
MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: WeightVector
    trace: float
    spectral_norm: float

    @property
    def effective_rank(self) -> float:
        return self.trace / self.spectral_norm


def _round_robin(n: int):
    """Disjoint index pairs; every pair of ``range(n)`` meets once per sweep."""
    m = n + (n % 2)  # odd n: index n is a bye
    players = list(range(m))
    for _ in range(m - 1):
        yield [(min(players[i], players[m - 1 - i]), max(players[i], players[m - 1 - i]))
               for i in range(m // 2) if max(players[i], players[m - 1 - i]) < n]
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigenvalues(a, rtol: float = JACOBI_RTOL) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted non-increasing.

    Sweeps until the off-diagonal Frobenius norm is at most
    ``rtol * ||A||_F``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    target = rtol * np.linalg.norm(a)

    off_diag = ~np.eye(n, dtype=bool)

    def off_norm():
        # direct sum: ||A||^2 - sum(diag^2) cancels to ~sqrt(eps) * ||A||
        return float(np.linalg.norm(a[off_diag]))

    for _ in range(MAX_SWEEPS):
        if off_norm() <= target:
            break
        for pairs in _round_robin(n):
            p = np.array([i for i, _ in pairs], dtype=int)
            q = np.array([j for _, j in pairs], dtype=int)
            apq = a[p, q]
            live = apq != 0
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            with np.errstate(over="ignore"):
                # huge theta gives t = 0: the element is already negligible
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.where(theta == 0, 1.0,
                             np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0)))
            c = 1.0 / np.sqrt(t**2 + 1.0)
            s = t * c
            rows_p, rows_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            cols_p, cols_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c[None, :] * cols_p - s[None, :] * cols_q
            a[:, q] = s[None, :] * cols_p + c[None, :] * cols_q
    else:
        raise ArithmeticError("Jacobi sweeps did not converge")
    return np.sort(np.diag(a))[::-1]


def spectrum_from_eigenvalues(values) -> Spectrum:
    vec = WeightVector(values)
    if vec.sum <= 0:
        raise ParseError("spectrum must have positive trace")
    return Spectrum(vec, vec.sum, vec.entries[0])


def spectrum_from_matrix(matrix) -> Spectrum:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParseError("matrix must be square")
    if a.shape[0] > MAX_MATRIX_DIM:
        raise ParseError(f"matrices above {MAX_MATRIX_DIM}x{MAX_MATRIX_DIM}: supply the spectrum")
    frob = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > SYMMETRY_RTOL * frob:
        raise NotSymmetric("matrix is not symmetric")
    eig = jacobi_eigenvalues(0.5 * (a + a.T))
    norm = float(eig[0]) if eig.size else 0.0
    floor = -PSD_CLAMP_RTOL * max(norm, 0.0)
    if eig.size and eig[-1] < floor:
        raise NotPSD(f"matrix has eigenvalue {eig[-1]:.6g} < 0")
    return spectrum_from_eigenvalues(np.clip(eig, 0.0, None))


_NUMBER = re.compile(r"[,\s]+")


def parse_spectrum(text: str, kind: str = "auto") -> Spectrum:
    """Parse spectrum text; ``kind`` is ``"auto"``, ``"list"`` or ``"matrix"``.

    ``auto`` reads a matrix only when the header is an integer ``n >= 2``
    followed by exactly ``n`` rows of ``n`` numbers; a 1x1 matrix needs
    ``kind="matrix"``.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty spectrum input")

    def numbers(chunks):
        try:
            vals = [float(tok) for tok in chunks if tok]
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite number in input")
        return vals

    if kind not in ("auto", "list", "matrix"):
        raise ValueError(f"unknown spectrum kind {kind!r}")
    if kind in ("auto", "matrix"):
        rows = [ln.split() for ln in lines[1:]]
        header = lines[0]
        if re.fullmatch(r"\d+", header):
            n = int(header)
            shaped = len(rows) == n and all(len(r) == n for r in rows)
            if shaped and (kind == "matrix" or n >= 2):
                return spectrum_from_matrix([numbers(r) for r in rows])
        if kind == "matrix":
            raise ParseError("matrix input needs a header 'n' and n rows of n numbers")
    values = numbers(_NUMBER.split(text.strip()))
    if any(v < 0 for v in values):
        raise ParseError("eigenvalues must be nonnegative")
    return spectrum_from_eigenvalues(values)


def ingest_spectrum(source, kind: str = "auto") -> Spectrum:
    """Read a spectrum from a path or an open text file."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    return parse_spectrum(text, kind)

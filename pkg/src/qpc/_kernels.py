"""Hot loop of program synthesis: score every gate sequence of one length.

Two interchangeable backends evaluate the same contract::

    search_level(gates, target, length, tol) -> (hit, evaluated, best, best_index)

``gates`` is a ``(g, n, n)`` stack of the non-identity instructions. Sequences
``(k_1, ..., k_L)`` with digits in ``[0, g)`` are visited in lexicographic
order, ``k_1`` most significant, and each is scored by the phase distance of
``gates[k_L] @ ... @ gates[k_1]`` to ``target``. ``hit`` is the index of the
first sequence within ``tol`` (or -1), ``evaluated`` the number of sequences
scored before stopping, ``best``/``best_index`` the smallest distance seen
and where it first occurred.

The numba backend runs a depth-first odometer with a prefix-product stack.
The numpy backend forms blocks of products with batched matmuls. Set
``QPC_DISABLE_NUMBA=1`` to force numpy.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("QPC_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

# products held in memory per batch by the numpy backend
_NUMPY_BLOCK = 1 << 15


def _phase_distances(prods: np.ndarray, target: np.ndarray) -> np.ndarray:
    overlap = np.einsum("ij,pij->p", target.conj(), prods)
    mag = np.abs(overlap)
    phase = np.where(mag > 0, overlap / np.where(mag > 0, mag, 1.0), 1.0)
    diff = prods - phase[:, None, None] * target[None]
    return np.sqrt(np.einsum("pij,pij->p", diff.real, diff.real) + np.einsum("pij,pij->p", diff.imag, diff.imag))


def _all_products(gates: np.ndarray, length: int) -> np.ndarray:
    n = gates.shape[1]
    prods = np.eye(n, dtype=complex)[None]
    for _ in range(length):
        # new index = old * g + k, keeping lexicographic order with the newest digit last
        prods = np.einsum("gij,pjk->pgik", gates, prods).reshape(-1, n, n)
    return prods


def _digits(index: int, g: int, length: int) -> list:
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        index, out[pos] = divmod(index, g)
    return out


def search_level_numpy(gates, target, length, tol):
    g, n, _ = gates.shape
    total = g**length
    suffix_len = 0
    while suffix_len < length and g ** (suffix_len + 1) <= _NUMPY_BLOCK:
        suffix_len += 1
    prefix_len = length - suffix_len
    suffixes = _all_products(gates, suffix_len)
    block = suffixes.shape[0]
    best, best_index = np.inf, -1
    for prefix_index in range(g**prefix_len):
        prefix = np.eye(n, dtype=complex)
        for k in _digits(prefix_index, g, prefix_len):
            prefix = gates[k] @ prefix
        dist = _phase_distances(suffixes @ prefix, target)
        base = prefix_index * block
        hits = np.flatnonzero(dist <= tol)
        stop = hits[0] + 1 if hits.size else block
        local = int(np.argmin(dist[:stop]))
        if dist[local] < best:
            best, best_index = float(dist[local]), base + local
        if hits.size:
            return base + int(hits[0]), base + int(stop), best, best_index
    return -1, total, best, best_index


def _search_level_py(gates, target, length, tol):
    g, n, _ = gates.shape
    prefix = np.empty((length + 1, n, n), dtype=np.complex128)
    tmp = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            prefix[0, i, j] = 1.0 if i == j else 0.0
    digits = np.zeros(length, dtype=np.int64)
    total = g**length
    best = np.inf
    best_index = -1
    start = 0
    for idx in range(total):
        # refresh prefix products from the first changed digit
        for pos in range(start, length):
            a = gates[digits[pos]]
            b = prefix[pos]
            for i in range(n):
                for j in range(n):
                    acc = 0j
                    for t in range(n):
                        acc += a[i, t] * b[t, j]
                    tmp[i, j] = acc
            prefix[pos + 1] = tmp
        prod = prefix[length]
        overlap = 0j
        for i in range(n):
            for j in range(n):
                overlap += target[i, j].conjugate() * prod[i, j]
        mag = abs(overlap)
        phase = overlap / mag if mag > 0 else 1.0 + 0j
        sq = 0.0
        for i in range(n):
            for j in range(n):
                d = prod[i, j] - phase * target[i, j]
                sq += d.real * d.real + d.imag * d.imag
        dist = np.sqrt(sq)
        if dist < best:
            best = dist
            best_index = idx
        if dist <= tol:
            return idx, idx + 1, best, best_index
        pos = length - 1
        while pos >= 0:
            digits[pos] += 1
            if digits[pos] < g:
                break
            digits[pos] = 0
            pos -= 1
        start = pos
    return -1, total, best, best_index


if NUMBA_AVAILABLE:
    search_level_numba = numba.njit(cache=True, nogil=True)(_search_level_py)
else:  # pragma: no cover
    search_level_numba = None


def search_level(gates, target, length, tol, backend=None):
    """Dispatch to the requested backend; ``None`` picks the configured default."""
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    gates = np.ascontiguousarray(gates, dtype=np.complex128)
    target = np.ascontiguousarray(target, dtype=np.complex128)
    if backend == "numba":
        if search_level_numba is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        hit, evaluated, best, best_index = search_level_numba(gates, target, length, float(tol))
    elif backend == "numpy":
        hit, evaluated, best, best_index = search_level_numpy(gates, target, length, float(tol))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return int(hit), int(evaluated), float(best), int(best_index)


def sequence_digits(index: int, g: int, length: int) -> list:
    """Decode a level index into its digit sequence ``k_1 .. k_L``."""
    return _digits(index, g, length)

"""Exact Gaussian elimination over a Field, on sparse rows (dict col -> value)."""
from __future__ import annotations

from .poly import Field


def rref(F: Field, rows, ncols: int):
    """Reduced row echelon form.  Returns (pivot_rows, pivot_cols).

    pivot_rows[k] is a dict with value one at pivot_cols[k] and zero at
    every other pivot column.
    """
    piv: dict[int, dict] = {}
    for r in rows:
        r = {c: v for c, v in r.items() if v}
        r = _reduce(F, r, piv)
        if not r:
            continue
        c0 = min(r)
        inv = F.inv(r[c0])
        r = {c: F.mul(v, inv) for c, v in r.items()}
        # eliminate c0 from the other pivot rows
        for pc, pr in piv.items():
            a = pr.get(c0)
            if a:
                _axpy(F, pr, r, F.neg(a))
        piv[c0] = r
    cols = sorted(piv)
    return [piv[c] for c in cols], cols


def _reduce(F: Field, r: dict, piv: dict) -> dict:
    # pivot rows are fully reduced, so one pass over the pivots hit suffices
    for c in [c for c in r if c in piv]:
        a = r.get(c)
        if a:
            _axpy(F, r, piv[c], F.neg(a))
    return r


def _axpy(F: Field, target: dict, src: dict, a):
    """target += a * src, in place."""
    for c, v in src.items():
        s = F.add(target.get(c, F.zero), F.mul(a, v))
        if s:
            target[c] = s
        else:
            target.pop(c, None)


def nullspace(F: Field, rows, ncols: int):
    """Basis of {x : r.x = 0 for every row}, one dense vector per free column.

    The basis vector for free column j has x_j = 1 and x_k = 0 at the other
    free columns, so coordinates w.r.t. this basis are read off directly.
    """
    prows, pcols = rref(F, rows, ncols)
    pset = set(pcols)
    free = [j for j in range(ncols) if j not in pset]
    basis = []
    for j in free:
        x = [F.zero] * ncols
        x[j] = F.one
        for pr, pc in zip(prows, pcols):
            a = pr.get(j)
            if a:
                x[pc] = F.neg(a)
        basis.append(x)
    return basis, free


def rank(F: Field, rows, ncols: int) -> int:
    return len(rref(F, rows, ncols)[1])

"""Small exact linear algebra over :class:`~quivalg.scalars.CQ`."""

from __future__ import annotations

from typing import Hashable, Mapping, Sequence

from .scalars import CQ, as_cq

__all__ = ["row_reduce", "rank", "is_psd_exact"]


def row_reduce(rows: Sequence[Mapping[Hashable, CQ]], columns: Sequence[Hashable]) -> list[dict]:
    """Reduced row echelon basis of the span of sparse rows.

    ``rows`` map column keys to scalars; ``columns`` fixes the pivot order.
    The returned rows are normalized (pivot entry 1) and independent.
    """
    basis: list[tuple[Hashable, dict]] = []
    for row in rows:
        r = {c: as_cq(v) for c, v in row.items() if v}
        for piv, b in basis:
            coef = r.get(piv)
            if coef:
                for c, v in b.items():
                    nv = r.get(c, CQ()) - coef * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
        if not r:
            continue
        piv = next(c for c in columns if c in r)
        inv = CQ(1) / r[piv]
        r = {c: v * inv for c, v in r.items()}
        for i, (p, b) in enumerate(basis):
            coef = b.get(piv)
            if coef:
                nb = dict(b)
                for c, v in r.items():
                    nv = nb.get(c, CQ()) - coef * v
                    if nv:
                        nb[c] = nv
                    else:
                        nb.pop(c, None)
                basis[i] = (p, nb)
        basis.append((piv, r))
    basis.sort(key=lambda pb: list(columns).index(pb[0]))
    return [b for _, b in basis]


def rank(rows: Sequence[Mapping[Hashable, CQ]], columns: Sequence[Hashable]) -> int:
    return len(row_reduce(rows, columns))


def is_psd_exact(entries: Mapping[tuple[int, int], int | CQ]) -> bool:
    """Exact positive-semidefiniteness test for a sparse self-adjoint matrix.

    Symmetric elimination with diagonal pivots: a negative pivot, or a zero
    pivot whose row is not identically zero, certifies indefiniteness.
    """
    m: dict[int, dict[int, CQ]] = {}
    for (i, j), v in entries.items():
        v = as_cq(v)
        if v:
            m.setdefault(i, {})[j] = v
    for (i, j), v in list(((i, j), v) for i, row in m.items() for j, v in row.items()):
        if m.get(j, {}).get(i, CQ()) != v.conjugate():
            return False
    active = sorted(m)
    while active:
        i = active.pop(0)
        row = m.get(i, {})
        d = row.get(i, CQ())
        if d.im:
            return False
        if d.re < 0:
            return False
        if d.re == 0:
            if any(v for j, v in row.items() if j != i):
                return False
            continue
        others = [j for j in row if j != i]
        for a in others:
            fa = m[a].get(i, CQ()) / d
            if not fa:
                continue
            for b, v in row.items():
                if b == i:
                    continue
                nv = m[a].get(b, CQ()) - fa * v
                if nv:
                    m[a][b] = nv
                else:
                    m[a].pop(b, None)
            m[a].pop(i, None)
        m.pop(i, None)
    return True

"""Symmetric matrices of scalar expressions.

Entries are shared between the two triangles (symmetry by storage, not by
assumption), and repeated subtrees across entries are evaluated once per
batch of sample points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import jets

__all__ = ["StructureTags", "SymMatFun", "embed_tail", "blockdiag"]


@dataclass(frozen=True)
class StructureTags:
    """Optional declared structure.

    degenerate_axes: variable indices the matrix degenerates in (the
        singular set is where these coordinates vanish; diagonal entries
        are expected to vary, up to bounded ratio, only in them);
    constant_blocks: index ranges (start, stop) whose entries are constant.
    """

    degenerate_axes: tuple = ()
    constant_blocks: tuple = ()


class SymMatFun:
    """n x n symmetric matrix of ScalarExpr entries in `nvars` variables."""

    def __init__(self, n, nvars, entries, tags=None):
        if n < 0:
            raise ValueError("dimension must be >= 0")
        if not 1 <= nvars <= ex.MAX_VARS:
            raise ValueError(f"nvars must be in 1..{ex.MAX_VARS}")
        self.n = n
        self.nvars = nvars
        tri = {}
        for (i, j), e in entries.items():
            if not 0 <= i <= j < n:
                raise ValueError(f"bad entry index ({i}, {j})")
            if not isinstance(e, ex.ScalarExpr):
                raise TypeError("entries must be ScalarExpr")
            if e.nvars > nvars:
                raise ex.VariableCountError(
                    f"entry ({i},{j}) uses variable x{e.max_index}"
                )
            tri[(i, j)] = e
        for i in range(n):
            for j in range(i, n):
                tri.setdefault((i, j), ex.ZERO)
        self._tri = tri
        self.tags = tags or StructureTags()

    @classmethod
    def from_rows(cls, rows, nvars=None, tags=None):
        """Build from a full square of expressions; the upper triangle wins
        and is shared with the lower one."""
        n = len(rows)
        entries = {}
        for i in range(n):
            for j in range(i, n):
                entries[(i, j)] = ex._coerce(rows[i][j])
        nv = nvars or max([1] + [e.nvars for e in entries.values()])
        return cls(n, nv, entries, tags)

    @classmethod
    def constant(cls, array, nvars=1, tags=None):
        a = np.asarray(array, dtype=float)
        entries = {
            (i, j): ex.const(a[i, j])
            for i in range(a.shape[0])
            for j in range(i, a.shape[0])
        }
        return cls(a.shape[0], nvars, entries, tags)

    def entry(self, i, j):
        if i > j:
            i, j = j, i
        return self._tri[(i, j)]

    def upper_entries(self):
        """((i, j), expr) for the stored triangle, row-major."""
        for i in range(self.n):
            for j in range(i, self.n):
                yield (i, j), self._tri[(i, j)]

    # -- evaluation ----------------------------------------------------------

    def entry_jets(self, points, order=0):
        """Jets of every stored entry at the given points, shared memo.

        Returns (dict (i,j) -> JetBatch, valid mask): a point is valid when
        every entry evaluated there.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        memo = {}
        out = {}
        valid = np.ones(pts.shape[0], dtype=bool)
        for key, e in self.upper_entries():
            jb = jets.eval_jet_batch(e, pts, order=order, nvars=self.nvars, memo=memo)
            out[key] = jb
            valid &= ~jb.invalid
        return out, valid

    def values(self, points):
        """Stack of matrices, shape (npts, n, n), with validity mask."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ejets, valid = self.entry_jets(pts, order=0)
        out = np.zeros((pts.shape[0], self.n, self.n))
        for (i, j), jb in ejets.items():
            out[:, i, j] = jb.values
            out[:, j, i] = jb.values
        return out, valid

    def value(self, point):
        """Matrix at one point; raises if any entry is undefined there."""
        vals, valid = self.values(np.asarray(point, dtype=float)[None, :])
        if not valid[0]:
            raise jets.SingularDomainError("matrix entry undefined", point=point)
        return vals[0]

    # -- structure -----------------------------------------------------------

    def submatrix(self, indices):
        indices = list(indices)
        entries = {}
        for a, i in enumerate(indices):
            for b, j in enumerate(indices[a:], start=a):
                entries[(a, b)] = self.entry(i, j)
        return SymMatFun(len(indices), self.nvars, entries, self.tags)

    def tail(self, k):
        """Trailing principal block on indices k..n-1."""
        return self.submatrix(range(k, self.n))

    def permuted(self, perm):
        perm = list(perm)
        entries = {}
        for a in range(self.n):
            for b in range(a, self.n):
                entries[(a, b)] = self.entry(perm[a], perm[b])
        return SymMatFun(self.n, self.nvars, entries, self.tags)

    def diagonal(self):
        return [self.entry(i, i) for i in range(self.n)]

    def to_json_dict(self):
        return {
            "dimension": self.n,
            "nvars": self.nvars,
            "entries": [
                [ex.to_dict(self.entry(i, j)) for j in range(self.n)]
                for i in range(self.n)
            ],
        }

    @classmethod
    def from_json_dict(cls, d):
        n = int(d["dimension"])
        rows = d["entries"]
        entries = {}
        for i in range(n):
            for j in range(i, n):
                entries[(i, j)] = ex.from_dict(rows[i][j])
        return cls(n, int(d["nvars"]), entries)


def embed_tail(Q, n):
    """Embed a k x k matrix function into the bottom-right corner of n x n."""
    off = n - Q.n
    entries = {}
    for (i, j), e in Q.upper_entries():
        entries[(i + off, j + off)] = e
    return SymMatFun(n, Q.nvars, entries, Q.tags)


def blockdiag(blocks, nvars=None, tags=None):
    """Block-diagonal assembly of SymMatFun blocks."""
    n = sum(b.n for b in blocks)
    nv = nvars or max(b.nvars for b in blocks)
    entries = {}
    off = 0
    for b in blocks:
        for (i, j), e in b.upper_entries():
            entries[(off + i, off + j)] = e
        off += b.n
    return SymMatFun(n, nv, entries, tags)

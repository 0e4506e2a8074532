"""Parity-check matrices as Tanner graphs: alist I/O, PEG construction, syndromes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np


class AlistError(ValueError):
    """Base class for alist parse errors. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class AlistHeaderError(AlistError):
    pass


class AlistDegreeError(AlistError):
    pass


class AlistIndexError(AlistError):
    pass


class AlistDuplicateEdgeError(AlistError):
    pass


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class TannerGraph:
    """Immutable bipartite graph of ``n_vns`` variable and ``n_cns`` check nodes.

    Adjacency lists are sorted tuples of 0-based indices. ``rate_override``
    replaces the design rate (N-M)/N when the true code rate is known.
    """

    n_vns: int
    n_cns: int
    vn_adjacency: tuple[tuple[int, ...], ...]
    cn_adjacency: tuple[tuple[int, ...], ...]
    rate_override: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.vn_adjacency) != self.n_vns or len(self.cn_adjacency) != self.n_cns:
            raise ValueError("adjacency sizes do not match node counts")
        for n, nbrs in enumerate(self.vn_adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ValueError(f"VN {n}: neighbours must be sorted and unique")
            for m in nbrs:
                if not 0 <= m < self.n_cns:
                    raise ValueError(f"VN {n}: CN index {m} out of range")
        edges_v = {(n, m) for n, nbrs in enumerate(self.vn_adjacency) for m in nbrs}
        edges_c = {(n, m) for m, nbrs in enumerate(self.cn_adjacency) for n in nbrs}
        if edges_v != edges_c:
            raise ValueError("VN and CN adjacency describe different edge sets")
        for m, nbrs in enumerate(self.cn_adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ValueError(f"CN {m}: neighbours must be sorted and unique")

    @classmethod
    def from_cn_lists(cls, n_vns: int, cn_lists, rate_override=None) -> "TannerGraph":
        vn = [[] for _ in range(n_vns)]
        cn = []
        for m, nbrs in enumerate(cn_lists):
            nbrs = sorted(int(v) for v in nbrs)
            cn.append(tuple(nbrs))
            for v in nbrs:
                vn[v].append(m)
        return cls(n_vns, len(cn), tuple(tuple(sorted(a)) for a in vn), tuple(cn), rate_override)

    @classmethod
    def from_dense(cls, H) -> "TannerGraph":
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("H must be 2-D")
        return cls.from_cn_lists(H.shape[1], [np.flatnonzero(row) for row in H])

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.n_cns, self.n_vns), dtype=np.uint8)
        for m, nbrs in enumerate(self.cn_adjacency):
            H[m, list(nbrs)] = 1
        return H

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.cn_adjacency)

    @cached_property
    def d_v(self) -> int:
        """Column weight, or 0 if the graph is irregular."""
        degs = {len(a) for a in self.vn_adjacency}
        return degs.pop() if len(degs) == 1 else 0

    @cached_property
    def d_c(self) -> int:
        """Row weight, or 0 if the graph is irregular."""
        degs = {len(a) for a in self.cn_adjacency}
        return degs.pop() if len(degs) == 1 else 0

    @property
    def is_regular(self) -> bool:
        return self.d_v > 0 and self.d_c > 0

    @property
    def design_rate(self) -> Fraction:
        return Fraction(self.n_vns - self.n_cns, self.n_vns)

    @property
    def rate(self) -> Fraction:
        return self.rate_override if self.rate_override is not None else self.design_rate

    # Edge numbering is (CN, position): edge e belongs to CN edge_cn[e].
    @cached_property
    def edge_cn(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_cns), [len(a) for a in self.cn_adjacency])

    @cached_property
    def edge_vn(self) -> np.ndarray:
        return np.fromiter((v for a in self.cn_adjacency for v in a), dtype=np.int64,
                           count=self.n_edges)

    @cached_property
    def cn_ptr(self) -> np.ndarray:
        """CN m owns edges cn_ptr[m]:cn_ptr[m+1]."""
        return np.concatenate(([0], np.cumsum([len(a) for a in self.cn_adjacency]))).astype(np.int64)

    @cached_property
    def vn_ptr(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum([len(a) for a in self.vn_adjacency]))).astype(np.int64)

    @cached_property
    def vn_edges(self) -> np.ndarray:
        """Edge ids grouped by VN (see ``vn_ptr``), ascending CN order within a VN."""
        return np.argsort(self.edge_vn, kind="stable").astype(np.int64)

    def with_rate(self, rate) -> "TannerGraph":
        return TannerGraph(self.n_vns, self.n_cns, self.vn_adjacency, self.cn_adjacency,
                           Fraction(rate).limit_denominator(10**6) if rate is not None else None)


def syndrome(g: TannerGraph, c) -> np.ndarray:
    """Mod-2 syndrome H c. Accepts a single word (N,) or a batch (B, N)."""
    c = np.asarray(c)
    if c.shape[-1] != g.n_vns:
        raise ValueError(f"word length {c.shape[-1]} does not match N={g.n_vns}")
    bits = c[..., g.edge_vn].astype(np.uint8) & 1
    out = np.zeros(c.shape[:-1] + (g.n_cns,), dtype=np.uint8)
    nonempty = np.diff(g.cn_ptr) > 0
    if nonempty.any():
        out[..., nonempty] = np.bitwise_xor.reduceat(bits, g.cn_ptr[:-1][nonempty], axis=-1)
    return out


def is_codeword(g: TannerGraph, c) -> bool:
    return not syndrome(g, c).any()


# -- alist -----------------------------------------------------------------

def _ints(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise AlistHeaderError(f"non-integer token in {what}", lineno) from None


def parse_alist(text: str) -> TannerGraph:
    """Parse a MacKay alist description.

    Zero entries in neighbour lists are padding and are skipped. Blank lines
    are ignored; reported line numbers refer to the original text.
    """
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise AlistHeaderError(f"unexpected end of input while reading {what}",
                                   lines[-1][0] + 1 if lines else 1)
        lineno, toks = lines[pos]
        pos += 1
        return lineno, toks

    lineno, toks = take("header")
    hdr = _ints(toks, lineno, "header")
    if len(hdr) != 2 or hdr[0] < 1 or hdr[1] < 1:
        raise AlistHeaderError("header must be 'N M' with positive counts", lineno)
    n, m = hdr

    lineno, toks = take("max degrees")
    maxdeg = _ints(toks, lineno, "max degrees")
    if len(maxdeg) != 2 or min(maxdeg) < 0:
        raise AlistHeaderError("second line must hold 'max_col_degree max_row_degree'", lineno)

    lineno, toks = take("column degrees")
    col_deg = _ints(toks, lineno, "column degrees")
    if len(col_deg) != n:
        raise AlistDegreeError(f"expected {n} column degrees, got {len(col_deg)}", lineno)
    if any(d < 0 or d > maxdeg[0] for d in col_deg):
        raise AlistDegreeError("column degree outside [0, max_col_degree]", lineno)

    lineno, toks = take("row degrees")
    row_deg = _ints(toks, lineno, "row degrees")
    if len(row_deg) != m:
        raise AlistDegreeError(f"expected {m} row degrees, got {len(row_deg)}", lineno)
    if any(d < 0 or d > maxdeg[1] for d in row_deg):
        raise AlistDegreeError("row degree outside [0, max_row_degree]", lineno)
    if sum(col_deg) != sum(row_deg):
        raise AlistDegreeError("column and row degree sums differ", lineno)

    def read_lists(count, degs, bound, what):
        out = []
        for k in range(count):
            lineno, toks = take(f"{what} list {k + 1}")
            vals = _ints(toks, lineno, f"{what} list")
            nz = [v for v in vals if v != 0]
            if len(nz) != degs[k]:
                raise AlistDegreeError(
                    f"{what} {k + 1} declares degree {degs[k]} but lists {len(nz)} entries", lineno)
            for v in nz:
                if not 1 <= v <= bound:
                    raise AlistIndexError(f"{what} {k + 1}: index {v} outside 1..{bound}", lineno)
            if len(set(nz)) != len(nz):
                raise AlistDuplicateEdgeError(f"{what} {k + 1}: repeated index", lineno)
            out.append((lineno, [v - 1 for v in nz]))
        return out

    cols = read_lists(n, col_deg, m, "column")
    rows = read_lists(m, row_deg, n, "row")
    if pos < len(lines):
        raise AlistHeaderError("trailing content after row lists", lines[pos][0])

    col_edges = {(v, c) for v, (_, cs) in enumerate(cols) for c in cs}
    for c, (lineno, vs) in enumerate(rows):
        for v in vs:
            if (v, c) not in col_edges:
                raise AlistDegreeError(
                    f"row {c + 1} lists column {v + 1}, absent from that column's list", lineno)
    return TannerGraph.from_cn_lists(n, [vs for _, vs in rows])


def read_alist(path) -> TannerGraph:
    with open(path) as f:
        return parse_alist(f.read())


def write_alist(g: TannerGraph) -> str:
    """Serialize to alist with 1-based indices, zero-padded to the max degree."""
    dv_max = max((len(a) for a in g.vn_adjacency), default=0)
    dc_max = max((len(a) for a in g.cn_adjacency), default=0)

    def row(vals, width):
        # an isolated node still gets a line ("0") so blank-line skipping stays safe
        vals = [v + 1 for v in vals] + [0] * (max(width, 1) - len(vals))
        return " ".join(map(str, vals))

    out = [f"{g.n_vns} {g.n_cns}", f"{dv_max} {dc_max}",
           " ".join(str(len(a)) for a in g.vn_adjacency),
           " ".join(str(len(a)) for a in g.cn_adjacency)]
    out += [row(a, dv_max) for a in g.vn_adjacency]
    out += [row(a, dc_max) for a in g.cn_adjacency]
    return "\n".join(out) + "\n"


# -- construction ------------------------------------------------------------

def build_peg_regular(n: int, d_v: int, d_c: int, seed: int = 0) -> TannerGraph:
    """Progressive-edge-growth construction of a (d_v, d_c)-regular graph.

    Each new edge of a VN goes to a CN that is unreachable from it in the
    current graph, or failing that to one at maximal BFS depth. Ties go to the
    lowest current CN degree, then the lowest CN index. ``seed`` fixes the
    order in which VNs receive their edges.
    """
    if d_v < 2 or d_c <= d_v:
        raise ConstructionError("need d_v >= 2 and d_c > d_v")
    if d_c > n:
        raise ConstructionError(f"d_c={d_c} exceeds block length n={n}")
    if (n * d_v) % d_c:
        raise ConstructionError(f"n*d_v={n * d_v} is not divisible by d_c={d_c}")
    m = n * d_v // d_c
    order = np.random.default_rng(seed).permutation(n)

    vn_adj: list[list[int]] = [[] for _ in range(n)]
    cn_adj: list[list[int]] = [[] for _ in range(m)]
    cn_deg = np.zeros(m, dtype=np.int64)

    def pick(cands):
        cands = np.asarray(sorted(cands))
        degs = cn_deg[cands]
        return int(cands[degs == degs.min()][0])

    def frontier_choice(v):
        # BFS over CNs from v; return the deepest level's admissible CN set
        seen_c = set(vn_adj[v])
        seen_v = {v}
        level = set(vn_adj[v])
        while True:
            nxt_v = {u for c in level for u in cn_adj[c]} - seen_v
            seen_v |= nxt_v
            nxt_c = {c for u in nxt_v for c in vn_adj[u]} - seen_c
            open_cns = [c for c in range(m) if cn_deg[c] < d_c and c not in seen_c]
            if not nxt_c:
                # expansion stalled: unreachable CNs exist (or none left)
                return open_cns or [c for c in level if cn_deg[c] < d_c and c not in vn_adj[v]]
            if len(seen_c | nxt_c) == m or not [c for c in open_cns if c not in nxt_c]:
                # next level would cover every admissible CN; stop at this depth
                return open_cns
            seen_c |= nxt_c
            level = nxt_c

    for v in map(int, order):
        for k in range(d_v):
            if k == 0:
                cands = [c for c in range(m) if cn_deg[c] < d_c]
            else:
                cands = frontier_choice(v)
            cands = [c for c in cands if c not in vn_adj[v]]
            if not cands:
                cands = [c for c in range(m) if cn_deg[c] < d_c and c not in vn_adj[v]]
            if cands:
                c = pick(cands)
            else:
                c = _swap_in(v, vn_adj, cn_adj, cn_deg, d_c)
            vn_adj[v].append(c)
            cn_adj[c].append(v)
            cn_deg[c] += 1
    return TannerGraph.from_cn_lists(n, cn_adj)


def _swap_in(v, vn_adj, cn_adj, cn_deg, d_c):
    """Free a slot for VN ``v`` when every open CN is already its neighbour.

    Moves an existing edge (u, c2) to (u, c_open) and hands c2 to ``v``.
    """
    open_cns = [c for c in range(len(cn_adj)) if cn_deg[c] < d_c]
    for c_open in open_cns:
        for c2 in range(len(cn_adj)):
            if c2 in vn_adj[v] or c2 == c_open:
                continue
            for u in cn_adj[c2]:
                if u != v and c_open not in vn_adj[u]:
                    cn_adj[c2].remove(u)
                    vn_adj[u].remove(c2)
                    vn_adj[u].append(c_open)
                    cn_adj[c_open].append(u)
                    cn_deg[c_open] += 1
                    cn_deg[c2] -= 1
                    return c2
    raise ConstructionError("cannot complete regular graph without multi-edges")


def girth(g: TannerGraph) -> float:
    """Length of the shortest cycle (in edges), ``inf`` for a forest."""
    best = float("inf")
    nv = g.n_vns
    # node ids: VNs 0..N-1, CNs N..N+M-1
    for root in range(nv):
        dist = {root: 0}
        parent = {root: -1}
        q = deque([root])
        while q:
            x = q.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            nbrs = [nv + c for c in g.vn_adjacency[x]] if x < nv else list(g.cn_adjacency[x - nv])
            for y in nbrs:
                if y == parent[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    q.append(y)
    return best

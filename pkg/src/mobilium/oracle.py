"""Brute-force enumeration of mobiles as explicit plane trees.

Trees are built outward from the root, choosing the cyclic label sequence
around every black and white vertex directly from the local label rules, and
each finished tree is re-validated by :func:`validate`, which flattens it into
a rotation system and checks every rule from scratch.  Nothing here touches
the band-matrix recursion, so agreement with :mod:`mobilium.mobiles` is a
genuine cross-check.

Conventions.  A flagged edge carries two labels ``lo <= hi``.  Travelling from
its black end to its white end, ``hi`` is on the left.  Around a white vertex,
read clockwise, a flagged edge shows ``lo`` then ``hi``; around a black vertex
it shows ``hi`` then ``lo``.

Nodes (nested tuples, which double as canonical forms)::

    ("L", label, (white, ...))                  labeled vertex and the whites after its parent
    ("W", (item, ...))                          white vertex, items clockwise after its parent
        item = ("lab", labeled_node) | ("flag", lo, hi, black_node)
    ("B", (item, ...))                          black vertex, items clockwise after its parent
        item = ("bud",) | ("flag", hi, lo, white_node)

Root kinds: ``("R", i)`` a corner of a labeled vertex with label i,
``("W", i, j)`` a white half-mobile whose root flag reads i on the left going
towards the white vertex (i >= j), ``("B", i, j)`` a black half-mobile whose
root flag reads i on the left going towards the black vertex (i <= j).
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .couplings import CouplingSpec
from .reports import Report
from .series import Monomial

__all__ = [
    "OracleInconclusive",
    "OracleCounts",
    "enumerate_mobiles",
    "validate",
    "cross_check",
    "counts_to_csv",
    "counts_from_csv",
    "MAX_WEIGHTED_VERTICES",
]

MAX_WEIGHTED_VERTICES = 4


class OracleInconclusive(RuntimeError):
    """The label window or the size bound prevents a conclusive count."""


@dataclass
class OracleCounts:
    root: tuple
    max_weighted: int
    counts: dict = field(default_factory=dict)  # Monomial -> int
    conclusive: bool = True
    trees: int = 0

    def count(self, m) -> int:
        if isinstance(m, str):
            m = Monomial.parse(m)
        return self.counts.get(m, 0)

    @property
    def root_name(self) -> str:
        return "_".join(str(x) for x in self.root)


class _Gen:
    """Memoized constructive enumeration for fixed (p, q, label_max)."""

    def __init__(self, p, q, label_max):
        self.p, self.q, self.label_max = p, q, label_max
        self.touched = False
        self.white_from_labeled = lru_cache(maxsize=None)(self._white_from_labeled)
        self.white_from_flag = lru_cache(maxsize=None)(self._white_from_flag)
        self.black = lru_cache(maxsize=None)(self._black)
        self.whites_at = lru_cache(maxsize=None)(self._whites_at)
        self.white_items = lru_cache(maxsize=None)(self._white_items)
        self.black_items = lru_cache(maxsize=None)(self._black_items)

    # each generator returns a list of (node, used, weight) with weight a
    # sorted tuple of ("g", k) / ("gt", k) factors and used <= budget

    def _whites_at(self, label, budget, at_least):
        """Ordered sequences of whites hanging from a labeled vertex."""
        out = []
        if at_least == 0:
            out.append(((), 0, ()))
        if budget == 0:
            return out
        for first, u1, w1 in self.white_from_labeled(label, budget):
            for rest, u2, w2 in self.whites_at(label, budget - u1, 0):
                out.append(((first,) + rest, u1 + u2, tuple(sorted(w1 + w2))))
        return out

    def _white_items(self, expected, close, slots, budget):
        """Item sequences around a white vertex, from ``expected`` until the
        running label returns to ``close``; at most ``slots`` items."""
        out = []
        if expected == close:
            out.append(((), 0, ()))
        if slots == 0:
            return out
        # a labeled vertex: its label is the expected one, then drop by 1
        if expected >= 1:
            for kids, u1, w1 in self.whites_at(expected, budget, 0):
                node = ("lab", ("L", expected, kids))
                for rest, u2, w2 in self.white_items(expected - 1, close, slots - 1, budget - u1):
                    out.append(((node,) + rest, u1 + u2, tuple(sorted(w1 + w2))))
        # a flagged edge: lo is the expected label, hi >= lo
        if expected >= 0 and budget >= 1:
            lo = expected
            for hi in range(lo, lo + self.p):
                if hi > self.label_max:
                    self.touched = True
                    break
                for bnode, u1, w1 in self.black(lo, hi, budget):
                    node = ("flag", lo, hi, bnode)
                    for rest, u2, w2 in self.white_items(hi, close, slots - 1, budget - u1):
                        out.append(((node,) + rest, u1 + u2, tuple(sorted(w1 + w2))))
        return out

    def _white(self, start, close, budget):
        if budget < 1:
            return []
        out = []
        for items, used, w in self.white_items(start, close, self.q - 1, budget - 1):
            deg = len(items) + 1
            out.append((("W", items), used + 1, tuple(sorted(w + (("g", deg),)))))
        return out

    def _white_from_labeled(self, label, budget):
        return self._white(label - 1, label, budget)

    def _white_from_flag(self, hi, lo, budget):
        return self._white(hi, lo, budget)

    def _black_items(self, current, hi, slots, budget):
        """Items around a black vertex from running label ``current`` back to
        the parent's ``hi``; ``slots`` bounds flags plus buds."""
        out = []
        buds = hi - current
        if 0 <= buds <= slots:
            out.append(((("bud",),) * buds, 0, ()))
        if budget == 0:
            return out
        for top in range(current, current + slots):
            nbud = top - current
            if nbud + 1 > slots:
                break
            if top > self.label_max:
                self.touched = True
                break
            for lo_c in range(0, top + 1):
                for wnode, u1, w1 in self.white_from_flag(top, lo_c, budget):
                    node = (("bud",),) * nbud + (("flag", top, lo_c, wnode),)
                    for rest, u2, w2 in self.black_items(lo_c, hi, slots - nbud - 1, budget - u1):
                        out.append((node + rest, u1 + u2, tuple(sorted(w1 + w2))))
        return out

    def _black(self, lo, hi, budget):
        if budget < 1:
            return []
        out = []
        for items, used, w in self.black_items(lo, hi, self.p - 1, budget - 1):
            deg = len(items) + 1
            out.append((("B", items), used + 1, tuple(sorted(w + (("gt", deg),)))))
        return out

    def roots(self, root, budget):
        kind = root[0]
        if kind == "R":
            i = root[1]
            return [(("L", i, kids), u, w) for kids, u, w in self.whites_at(i, budget, 1)]
        if kind == "W":
            i, j = root[1], root[2]
            return [(("Wroot", i, j, node), u, w) for node, u, w in self.white_from_flag(i, j, budget)]
        if kind == "B":
            i, j = root[1], root[2]
            return [(("Broot", i, j, node), u, w) for node, u, w in self.black(i, j, budget)]
        raise ValueError(f"unknown root kind {root!r}")


def _parse_root(root):
    if isinstance(root, str):
        parts = root.replace(",", "_").split("_")
        root = (parts[0],) + tuple(int(x) for x in parts[1:])
    root = tuple(root)
    kind = root[0]
    if kind == "R" and len(root) == 2 and root[1] >= 1:
        return root
    if kind == "W" and len(root) == 3 and root[1] >= root[2] >= 0:
        return root
    if kind == "B" and len(root) == 3 and 0 <= root[1] <= root[2]:
        return root
    raise ValueError(f"bad root {root!r}; expected ('R', i), ('W', i, j) or ('B', i, j)")


def enumerate_mobiles(
    spec: CouplingSpec,
    max_weighted: int,
    root,
    label_max: int | None = None,
    min_label: int | None = None,
) -> OracleCounts:
    """Weighted count of rooted mobiles with at most ``max_weighted`` black
    and white vertices.

    ``min_label`` restricts to mobiles whose smallest label equals it.
    """
    root = _parse_root(root)
    if max_weighted > MAX_WEIGHTED_VERTICES:
        raise OracleInconclusive(
            f"brute force is limited to {MAX_WEIGHTED_VERTICES} weighted vertices"
        )
    p, q = spec.p, spec.q
    top = max(root[1:])
    if label_max is None:
        label_max = top + (max_weighted + 1) * max(p, q)
    gen = _Gen(p, q, label_max)
    names = {("g", k): spec.white[k - 1] for k in range(1, q + 1)}
    names.update({("gt", k): spec.black[k - 1] for k in range(1, p + 1)})
    for key, w in names.items():
        if w not in (0, None) and not isinstance(w, str):
            raise ValueError("the oracle needs formal (named) weights")
    result = OracleCounts(root, max_weighted)
    seen = set()
    for node, used, weight in gen.roots(root, max_weighted):
        if node in seen:
            raise AssertionError("duplicate tree generated")
        seen.add(node)
        info = validate(node, p, q)
        if tuple(sorted(info["weight"])) != weight:
            raise AssertionError(f"weight mismatch for {node}")
        if min_label is not None and info["min_label"] != min_label:
            continue
        factors = Counter()
        dead = False
        for f in weight:
            name = names.get(f)
            if name in (0, None):
                dead = True
                break
            factors[name] += 1
        if dead:
            continue
        m = Monomial(factors)
        result.counts[m] = result.counts.get(m, 0) + 1
        result.trees += 1
    result.conclusive = not gen.touched
    return result


# --------------------------------------------------------------------------
# independent validation on a flattened rotation system


class _Flat:
    def __init__(self):
        self.kind = []  # "L" | "W" | "B" | "stub"
        self.label = []
        self.rot = []  # clockwise incident items: ("e", edge) or ("bud",)
        self.edges = []  # (kind, a, b, data)

    def vertex(self, kind, label=None):
        self.kind.append(kind)
        self.label.append(label)
        self.rot.append([])
        return len(self.kind) - 1

    def edge(self, kind, a, b, data=None):
        self.edges.append((kind, a, b, data))
        return len(self.edges) - 1


def _flatten(node):
    flat = _Flat()

    def labeled(n, parent_edge):
        v = flat.vertex("L", n[1])
        if parent_edge is not None:
            flat.rot[v].append(("e", parent_edge))
        for wnode in n[2]:
            e = flat.edge("regular", v, None)
            flat.rot[v].append(("e", e))
            white(wnode, e)
        return v

    def white(n, parent_edge):
        v = flat.vertex("W")
        _attach(parent_edge, v)
        flat.rot[v].append(("e", parent_edge))
        for item in n[1]:
            if item[0] == "lab":
                e = flat.edge("regular", v, None)
                flat.rot[v].append(("e", e))
                u = labeled(item[1], e)
                _attach(e, u)
            else:
                _, lo, hi, bnode = item
                e = flat.edge("flag", None, v, {"lo": lo, "hi": hi})
                flat.rot[v].append(("e", e))
                black(bnode, e)
        return v

    def black(n, parent_edge):
        v = flat.vertex("B")
        _attach(parent_edge, v, black_end=True)
        flat.rot[v].append(("e", parent_edge))
        for item in n[1]:
            if item[0] == "bud":
                flat.rot[v].append(("bud",))
            else:
                _, hi, lo, wnode = item
                e = flat.edge("flag", v, None, {"lo": lo, "hi": hi})
                flat.rot[v].append(("e", e))
                white(wnode, e)
        return v

    def _attach(e, v, black_end=False):
        kind, a, b, data = flat.edges[e]
        if kind == "flag":
            a, b = (v, b) if black_end else (a, v)
        else:
            a, b = (a, v) if a is not None else (v, b)
        flat.edges[e] = (kind, a, b, data)

    if node[0] == "L":
        labeled(node, None)
    elif node[0] == "Wroot":
        _, i, j, wnode = node
        stub = flat.vertex("stub")
        e = flat.edge("flag", stub, None, {"lo": j, "hi": i})
        flat.rot[stub].append(("e", e))
        white(wnode, e)
    elif node[0] == "Broot":
        _, i, j, bnode = node
        stub = flat.vertex("stub")
        e = flat.edge("flag", None, stub, {"lo": i, "hi": j})
        flat.rot[stub].append(("e", e))
        black(bnode, e)
    else:
        raise ValueError("unknown root node")
    return flat


def validate(node, p, q) -> dict:
    """Check every local rule on a generated tree.

    Returns the weight factors and the minimum label; raises AssertionError
    on any violation.
    """
    flat = _flatten(node)
    nv = len(flat.kind)
    if len(flat.edges) != nv - 1:
        raise AssertionError("not a tree")
    for kind, a, b, data in flat.edges:
        ka, kb = flat.kind[a], flat.kind[b]
        if kind == "flag":
            if not (ka in ("B", "stub") and kb in ("W", "stub")):
                raise AssertionError("flagged edge must join black to white")
            if not 0 <= data["lo"] <= data["hi"]:
                raise AssertionError("flag labels must satisfy 0 <= lo <= hi")
        elif {ka, kb} != {"L", "W"}:
            raise AssertionError("regular edge must join white to labeled")
    labels = []
    weight = []
    for v in range(nv):
        kind = flat.kind[v]
        rot = flat.rot[v]
        if kind == "L":
            if flat.label[v] < 1:
                raise AssertionError("labels of labeled vertices are positive")
            labels.append(flat.label[v])
        elif kind == "W":
            seq = []
            for item in rot:
                ek, a, b, data = flat.edges[item[1]]
                if ek == "flag":
                    seq.append(("flag", data["lo"], data["hi"]))
                else:
                    other = a if b == v else b
                    seq.append(("lab", flat.label[other], flat.label[other]))
            for t, cur in enumerate(seq):
                nxt = seq[(t + 1) % len(seq)]
                want = cur[2] if cur[0] == "flag" else cur[1] - 1
                if nxt[1] != want:
                    raise AssertionError("white vertex label rule violated")
            if not 1 <= len(rot) <= q:
                raise AssertionError("white degree out of range")
            weight.append(("g", len(rot)))
        elif kind == "B":
            flags = []
            buds_between = []
            count = 0
            for item in rot:
                if item[0] == "bud":
                    count += 1
                    continue
                data = flat.edges[item[1]][3]
                buds_between.append(count)
                count = 0
                flags.append((data["hi"], data["lo"]))
            buds_between[0] += count  # wrap the trailing buds around
            for t, (hi, lo) in enumerate(flags):
                nhi = flags[(t + 1) % len(flags)][0]
                if nhi < lo or buds_between[(t + 1) % len(flags)] != nhi - lo:
                    raise AssertionError("black vertex label rule violated")
            if not 1 <= len(rot) <= p:
                raise AssertionError("black degree out of range")
            weight.append(("gt", len(rot)))
    for kind, a, b, data in flat.edges:
        if kind == "flag":
            labels += [data["lo"], data["hi"]]
    return {"weight": weight, "min_label": min(labels)}


# --------------------------------------------------------------------------


def _solver_series(sol, root):
    kind = root[0]
    if kind == "R":
        return sol.R(root[1]) - 1
    if kind == "W":
        return sol.W(root[1], root[2])
    return sol.B(root[1], root[2])


def cross_check(sol, counts: OracleCounts, degree: int | None = None) -> Report:
    """Compare solver coefficients with oracle counts monomial by monomial."""
    root = counts.root
    rep = Report(f"oracle_{counts.root_name}")
    if not counts.conclusive:
        rep.add(None, None, "oracle run was inconclusive")
        return rep
    d = counts.max_weighted if degree is None else degree
    if d > sol.order:
        rep.add(None, None, f"solver order {sol.order} is below the compared degree {d}")
        return rep
    series = _solver_series(sol, root)
    if d < sol.order:
        series = series.truncate(d)
    mine = {}
    for exps, c in series.terms().items():
        mine[Monomial(zip(series.vars, exps))] = c
    theirs = {m: c for m, c in counts.counts.items() if m.degree <= d}
    for m in sorted(set(mine) | set(theirs), key=lambda m: (m.degree, str(m))):
        a, b = mine.get(m, 0), theirs.get(m, 0)
        if a != b:
            rep.add(root[1], root[-1], f"{m}: solver {a}, oracle {b}")
    rep.info["monomials"] = len(theirs)
    return rep


def counts_to_csv(runs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["monomial", "root", "count"])
    for run in runs:
        for m in sorted(run.counts, key=lambda m: (m.degree, str(m))):
            w.writerow([str(m), run.root_name, run.counts[m]])
    return buf.getvalue()


def counts_from_csv(text: str) -> dict:
    """``{root_name: {Monomial: count}}`` from :func:`counts_to_csv` output."""
    out: dict = {}
    rows = csv.DictReader(io.StringIO(text))
    for row in rows:
        out.setdefault(row["root"], {})[Monomial.parse(row["monomial"])] = int(row["count"])
    return out

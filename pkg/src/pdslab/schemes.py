"""Cayley association schemes: class partitions, intersection numbers,
fusions and amorphy certificates."""

from dataclasses import dataclass, field

import numpy as np

from .finite_group import FiniteGroupTable
from .forms import form_values
from .pds import classify_ls_nls, verify_pds


@dataclass
class SchemePartition:
    group: FiniteGroupTable
    classes: list
    names: list = field(default_factory=list)

    def __post_init__(self):
        self.classes = [np.unique(np.asarray(c, dtype=np.int64)) for c in self.classes]
        if not self.names:
            self.names = [f"D{i + 1}" for i in range(len(self.classes))]

    @property
    def sizes(self):
        return [len(c) for c in self.classes]

    def labels(self):
        """Class label per group element: 0 for the identity, i for class i."""
        lab = np.full(self.group.size, -1, dtype=np.int64)
        lab[self.group.identity] = 0
        for i, c in enumerate(self.classes, start=1):
            lab[c] = i
        return lab

    def validate(self):
        """List of problems with the partition itself (empty when well formed)."""
        problems = []
        seen = np.zeros(self.group.size, dtype=np.int64)
        seen[self.group.identity] += 1
        for name, c in zip(self.names, self.classes):
            if not len(c):
                problems.append(f"class {name} is empty")
            seen[c] += 1
            inv = np.unique(self.group.inv(c))
            if not np.array_equal(inv, c):
                problems.append(f"class {name} is not inverse-closed")
        if np.any(seen != 1):
            problems.append("classes do not partition G minus the identity")
        return problems

    def fuse(self, partition):
        """Merge classes; ``partition`` lists blocks of 1-based class indices."""
        classes = [np.concatenate([self.classes[i - 1] for i in block]) for block in partition]
        names = ["+".join(self.names[i - 1] for i in block) for block in partition]
        return SchemePartition(self.group, classes, names)


class EmptyClassError(ValueError):
    pass


def build_scheme(ctx, a, variant=4, group=None):
    """S^(4): Q^-1(0)\\{0}, Q^-1(1), Q^-1(w), Q^-1(w+1);  S^(3) merges the last two."""
    if variant not in (3, 4):
        raise ValueError("variant must be 3 or 4")
    q = form_values(ctx, a)
    idx = ctx.all
    levels = [idx[(q == v) & (idx != 0)] for v in range(4)]
    names = ["Q^-1(0)\\0", "Q^-1(1)", "Q^-1(w)", "Q^-1(w+1)"]
    if variant == 3:
        levels = [levels[0], levels[1], np.concatenate(levels[2:])]
        names = names[:2] + ["Q^-1(w)+Q^-1(w+1)"]
    for name, c in zip(names, levels):
        if not len(c):
            raise EmptyClassError(f"class {name} is empty for a={a}")
    if group is None:
        group = FiniteGroupTable.from_context(ctx)
    return SchemePartition(group, levels, names)


@dataclass
class IntersectionNumbers:
    p: np.ndarray  # p[i, j, k], index 0 is the identity class

    ok = True

    def to_json(self):
        return self.p.tolist()


@dataclass
class SchemeFailure:
    i: int
    j: int
    g: int
    g2: int
    counts: tuple

    ok = False

    def to_json(self):
        return {"i": self.i, "j": self.j, "g": self.g, "g2": self.g2, "counts": list(self.counts)}


def intersection_numbers(S):
    G = S.group
    lab = S.labels()
    if np.any(lab < 0):
        raise ValueError("partition does not cover the group")
    classes = [np.array([G.identity], dtype=np.int64)] + S.classes
    m = len(classes)
    p = np.zeros((m, m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            c = np.bincount(G.mul(classes[i][:, None], classes[j][None, :]).ravel(), minlength=G.size)
            for k in range(m):
                vals = c[classes[k]]
                bad = np.flatnonzero(vals != vals[0])
                if len(bad):
                    g, g2 = int(classes[k][0]), int(classes[k][bad[0]])
                    return SchemeFailure(i, j, g, g2, (int(vals[0]), int(vals[bad[0]])))
                p[i, j, k] = vals[0]
    return IntersectionNumbers(p)


def set_partitions(m):
    """Set partitions of {1..m} as lists of blocks, restricted growth strings
    in lexicographic order."""
    def rgs(prefix, top):
        if len(prefix) == m:
            yield prefix
            return
        for v in range(top + 2):
            yield from rgs(prefix + [v], max(top, v))

    for s in rgs([0], 0):
        blocks = [[] for _ in range(max(s) + 1)]
        for i, b in enumerate(s, start=1):
            blocks[b].append(i)
        yield blocks


def fused_tensor(p, partition):
    """Block sums of an intersection tensor for a fusion (identity kept apart)."""
    blocks = [[0]] + partition
    m = len(blocks)
    out = np.zeros((m, m, m), dtype=np.int64)
    for I, bi in enumerate(blocks):
        for J, bj in enumerate(blocks):
            for K, bk in enumerate(blocks):
                out[I, J, K] = p[np.ix_(bi, bj, [bk[0]])].sum()
    return out


@dataclass
class AmorphyCertificate:
    amorphic: bool
    fusions: list
    class_types: list
    uniform_type: str | None

    @property
    def passed(self):
        return sum(f["scheme"] for f in self.fusions)

    def to_json(self):
        return {
            "amorphic": self.amorphic,
            "fusions": self.fusions,
            "class_types": self.class_types,
            "uniform_type": self.uniform_type,
        }


def is_amorphic(S, threads=1):
    """Check every fusion of S is a scheme and type every class LS/NLS."""
    base = intersection_numbers(S)
    fusions = []
    for part in set_partitions(len(S.classes)):
        res = intersection_numbers(S.fuse(part))
        entry = {"partition": part, "scheme": bool(res.ok)}
        if res.ok and base.ok:
            entry["sums_match"] = bool(np.array_equal(res.p, fused_tensor(base.p, part)))
        fusions.append(entry)
    types = []
    for c in S.classes:
        params = verify_pds(S.group, c, threads)
        types.append(classify_ls_nls(params) if params.ok else None)
    kinds = {t.kind if t else None for t in types}
    uniform = kinds.pop() if len(kinds) == 1 else None
    amorphic = base.ok and all(f["scheme"] and f.get("sums_match", False) for f in fusions)
    return AmorphyCertificate(amorphic, fusions, [str(t) for t in types], uniform)


def is_scheme_automorphism(phi, S):
    """True iff the group map phi sends every class onto itself."""
    return all(class_preserved(phi, c) for c in S.classes)


def class_preserved(phi, c):
    return bool(np.array_equal(np.unique(phi.table[c]), c))

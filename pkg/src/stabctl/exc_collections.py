"""Exceptional collections with graded Hom tables and mutations.

A collection stores objects (label, lattice class, presentation shift,
optional representation handle), a graded Hom table for forward pairs, and
the Euler pairing of the ambient lattice.  Tables track exactness per entry:
after a mutation an entry is either forced by the long-exact-sequence degree
bound together with the Euler pairing, or it is marked unknown (None) until
resolved from outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .klattice import EulerMatrix, euler_pair

LEFT = "left"
RIGHT = "right"

KClass = tuple[int, ...]


@dataclass(frozen=True)
class ExcObject:
    """One exceptional object.

    `shift` records how the object relates to a module-category model:
    the object is modeled by `rep` placed in homological degree `-shift`,
    so classes carry the sign (-1)**shift of the underlying module class.
    """

    label: str
    kclass: KClass
    shift: int = 0
    rep: object | None = field(default=None, compare=False)

    def shifted(self, k: int) -> ExcObject:
        if k == 0:
            return self
        sign = -1 if k % 2 else 1
        return replace(
            self,
            label=f"{self.label}[{k}]",
            kclass=tuple(sign * x for x in self.kclass),
            shift=self.shift - k,
        )


def chi_of_entry(entry: dict[int, int]) -> int:
    return sum((-1) ** k * d for k, d in entry.items())


class HomTable:
    """Graded forward-Hom dimensions for an ordered collection.

    entries maps (i, j) with i < j to {degree: dim} or to None (unknown).
    A missing key means a known empty entry.
    """

    def __init__(self, size: int, entries: dict[tuple[int, int], dict[int, int] | None] | None = None):
        if size < 1:
            raise ValueError("table needs at least one object")
        self.size = size
        self._entries: dict[tuple[int, int], dict[int, int] | None] = {}
        for (i, j), e in (entries or {}).items():
            if not (0 <= i < j < size):
                raise ValueError(f"bad table key ({i},{j})")
            if e is None:
                self._entries[(i, j)] = None
                continue
            clean = {int(k): int(d) for k, d in e.items() if d != 0}
            if any(d < 0 for d in clean.values()):
                raise ValueError(f"negative dimension in entry ({i},{j})")
            if clean:
                self._entries[(i, j)] = clean

    def _check(self, i: int, j: int) -> None:
        if not (0 <= i < j < self.size):
            raise ValueError(f"bad pair ({i},{j})")

    def is_exact(self, i: int, j: int) -> bool:
        self._check(i, j)
        return self._entries.get((i, j), {}) is not None

    def entry(self, i: int, j: int) -> dict[int, int] | None:
        self._check(i, j)
        e = self._entries.get((i, j), {})
        return dict(e) if e is not None else None

    def support(self, i: int, j: int) -> frozenset[int] | None:
        e = self.entry(i, j)
        return None if e is None else frozenset(e)

    def min_degree(self, i: int, j: int) -> float:
        """Minimal nonzero degree; +inf for an empty entry."""
        e = self.entry(i, j)
        if e is None:
            raise ValueError(f"entry ({i},{j}) is unknown")
        return min(e) if e else math.inf

    def has_unknown(self) -> bool:
        return any(e is None for e in self._entries.values())

    def items(self):
        for i in range(self.size):
            for j in range(i + 1, self.size):
                yield (i, j), self.entry(i, j)

    def with_entry(self, i: int, j: int, e: dict[int, int] | None) -> HomTable:
        self._check(i, j)
        new = {k: (dict(v) if v is not None else None) for k, v in self._entries.items()}
        if e is None:
            new[(i, j)] = None
        else:
            new[(i, j)] = dict(e)
        return HomTable(self.size, new)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomTable):
            return NotImplemented
        if self.size != other.size:
            return False
        return all(self.entry(i, j) == other.entry(i, j) for (i, j), _ in self.items())

    def __repr__(self) -> str:
        parts = [f"({i},{j}):{'?' if e is None else e}" for (i, j), e in self.items() if e is None or e]
        return f"HomTable({self.size}, {', '.join(parts)})"


def table_compatible(a: HomTable, b: HomTable) -> bool:
    """Entries exact on both sides must agree; unknowns match anything."""
    if a.size != b.size:
        return False
    for (i, j), ea in a.items():
        eb = b.entry(i, j)
        if ea is not None and eb is not None and ea != eb:
            return False
    return True


@dataclass(frozen=True)
class ExcCollection:
    objects: tuple[ExcObject, ...]
    table: HomTable
    euler: EulerMatrix

    @property
    def size(self) -> int:
        return len(self.objects)

    def kclass(self, i: int) -> KClass:
        return self.objects[i].kclass

    def chi(self, i: int, j: int) -> int:
        return euler_pair(self.euler, self.kclass(i), self.kclass(j))


def make_collection(objects, table: HomTable, euler: EulerMatrix) -> ExcCollection:
    objects = tuple(objects)
    if not objects:
        raise ValueError("empty collection")
    if table.size != len(objects):
        raise ValueError("table size mismatch")
    labels = [o.label for o in objects]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate labels")
    for o in objects:
        if len(o.kclass) != euler.rank:
            raise ValueError("class length does not match the lattice rank")
        if euler_pair(euler, o.kclass, o.kclass) != 1:
            raise ValueError(f"class of {o.label} is not exceptional")
    n = len(objects)
    for i in range(n):
        for j in range(i + 1, n):
            back = euler_pair(euler, objects[j].kclass, objects[i].kclass)
            if back != 0:
                raise ValueError(f"backward pairing ({j},{i}) is {back}, not 0")
            e = table.entry(i, j)
            if e is not None:
                chi = euler_pair(euler, objects[i].kclass, objects[j].kclass)
                if chi_of_entry(e) != chi:
                    raise ValueError(
                        f"entry ({i},{j}) sums to {chi_of_entry(e)} but the pairing gives {chi}"
                    )
    return ExcCollection(objects, table, euler)


def mutate_class(euler: EulerMatrix, e: KClass, f: KClass, direction: str) -> KClass:
    chi = euler_pair(euler, e, f)
    if direction == LEFT:
        return tuple(chi * a - b for a, b in zip(e, f))
    if direction == RIGHT:
        return tuple(chi * b - a for a, b in zip(e, f))
    raise ValueError(f"unknown direction {direction!r}")


def _shift_set(s: frozenset[int] | None, k: int) -> frozenset[int] | None:
    return None if s is None else frozenset(x + k for x in s)


def _sum_sets(a: frozenset[int] | None, b: frozenset[int] | None) -> frozenset[int] | None:
    if a is None or b is None:
        return None
    return frozenset(x + y for x in a for y in b)


def _union(a: frozenset[int] | None, b: frozenset[int] | None) -> frozenset[int] | None:
    if a is None or b is None:
        return None
    return a | b


def _entry_from_bound(dset: frozenset[int] | None, chi: int, where: str) -> dict[int, int] | None:
    """Resolve an entry from its possible-degree set and its Euler number."""
    if dset is None:
        return None
    if not dset:
        if chi != 0:
            raise ValueError(f"entry {where}: no degrees allowed but pairing is {chi}")
        return {}
    if len(dset) == 1:
        (k0,) = dset
        d = (-1) ** k0 * chi
        if d < 0:
            raise ValueError(f"entry {where}: forced dimension {d} is negative")
        return {k0: d} if d else {}
    return None


def mutate(c: ExcCollection, i: int, direction: str) -> ExcCollection:
    """Mutate the adjacent pair (i, i+1); left keeps E_i second, right keeps E_{i+1} first."""
    n = c.size
    if not (0 <= i < n - 1):
        raise ValueError(f"no adjacent pair at {i}")
    if direction not in (LEFT, RIGHT):
        raise ValueError(f"unknown direction {direction!r}")
    pair = c.table.entry(i, i + 1)
    if pair is None:
        raise ValueError(f"cannot mutate: entry ({i},{i + 1}) is unknown")

    e_obj, f_obj = c.objects[i], c.objects[i + 1]
    new_class = mutate_class(c.euler, e_obj.kclass, f_obj.kclass, direction)
    if direction == LEFT:
        new_label = f"L[{e_obj.label}]({f_obj.label})"
        new_pair_objs = (ExcObject(new_label, new_class), e_obj)
    else:
        new_label = f"R[{f_obj.label}]({e_obj.label})"
        new_pair_objs = (f_obj, ExcObject(new_label, new_class))

    objects = list(c.objects)
    objects[i : i + 2] = list(new_pair_objs)

    s_pair = frozenset(pair)
    dual_pair = {-k: d for k, d in pair.items()}

    supp = c.table.support
    entries: dict[tuple[int, int], dict[int, int] | None] = {}
    # pairs not touching positions i, i+1 keep their content
    for (a, b), e in c.table.items():
        if a in (i, i + 1) or b in (i, i + 1):
            continue
        entries[(a, b)] = e
    entries[(i, i + 1)] = dual_pair

    def bounded(a: int, b: int, dset: frozenset[int] | None) -> None:
        chi = euler_pair(c.euler, objects[a].kclass, objects[b].kclass)
        entries[(a, b)] = _entry_from_bound(dset, chi, f"({a},{b})")

    if direction == RIGHT:
        # new pair at (i, i+1) is (F, R)
        for j in range(n):
            if j in (i, i + 1):
                continue
            if j < i:
                entries[(j, i)] = c.table.entry(j, i + 1)
                dset = _union(_sum_sets(supp(j, i + 1), frozenset(-k for k in s_pair)), _shift_set(supp(j, i), -1))
                bounded(j, i + 1, dset)
            else:
                entries[(i, j)] = c.table.entry(i + 1, j)
                dset = _union(_shift_set(supp(i, j), 1), _sum_sets(s_pair, supp(i + 1, j)))
                bounded(i + 1, j, dset)
    else:
        # new pair at (i, i+1) is (L, E)
        for j in range(n):
            if j in (i, i + 1):
                continue
            if j < i:
                entries[(j, i + 1)] = c.table.entry(j, i)
                dset = _union(_shift_set(supp(j, i + 1), 1), _sum_sets(supp(j, i), s_pair))
                bounded(j, i, dset)
            else:
                entries[(i + 1, j)] = c.table.entry(i, j)
                dset = _union(_sum_sets(supp(i, j), frozenset(-k for k in s_pair)), _shift_set(supp(i + 1, j), -1))
                bounded(i, j, dset)

    return make_collection(objects, HomTable(n, entries), c.euler)


def resolve_entry(c: ExcCollection, i: int, j: int, dims: dict[int, int]) -> ExcCollection:
    """Replace an unknown entry with externally supplied graded dimensions."""
    if c.table.entry(i, j) is not None:
        raise ValueError(f"entry ({i},{j}) is already exact")
    chi = c.chi(i, j)
    if chi_of_entry(dims) != chi:
        raise ValueError(f"resolved entry ({i},{j}) sums to {chi_of_entry(dims)}, pairing gives {chi}")
    return make_collection(c.objects, c.table.with_entry(i, j, dims), c.euler)


@dataclass(frozen=True)
class CollectionFlags:
    strong: bool
    ext: bool
    regular: bool
    orthogonal: bool


def classify(c: ExcCollection) -> CollectionFlags:
    strong = ext = regular = orthogonal = True
    for (i, j), e in c.table.items():
        if e is None:
            raise ValueError(f"cannot classify: entry ({i},{j}) is unknown")
        if e:
            orthogonal = False
        if any(k != 0 for k in e):
            strong = False
        if any(k < 1 for k in e):
            ext = False
        if len(e) > 1:
            regular = False
    return CollectionFlags(strong=strong, ext=ext, regular=regular, orthogonal=orthogonal)


def ext_shift(c: ExcCollection) -> tuple[int, ...]:
    """Smallest non-negative shifts p making {E_i[p_i]} an Ext-collection."""
    n = c.size
    p = [0] * n
    for i in range(n - 2, -1, -1):
        need = 0
        for j in range(i + 1, n):
            kmin = c.table.min_degree(i, j)
            if math.isinf(kmin):
                continue
            need = max(need, p[j] + 1 - int(kmin))
        p[i] = need
    return tuple(p)


def shift_objects(c: ExcCollection, p) -> ExcCollection:
    """The collection {E_i[p_i]} with its table in the shifted grading."""
    p = tuple(int(x) for x in p)
    if len(p) != c.size:
        raise ValueError("shift vector length mismatch")
    objects = [o.shifted(k) for o, k in zip(c.objects, p)]
    entries: dict[tuple[int, int], dict[int, int] | None] = {}
    for (i, j), e in c.table.items():
        if e is None:
            entries[(i, j)] = None
        else:
            entries[(i, j)] = {k + p[i] - p[j]: d for k, d in e.items()}
    return make_collection(objects, HomTable(c.size, entries), c.euler)


# -- serialization ---------------------------------------------------------


def parse_hom_table(text: str, size: int) -> HomTable:
    """Lines `hom i j k d` plus `unknown i j`; `#` starts a comment."""
    entries: dict[tuple[int, int], dict[int, int] | None] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "hom" and len(parts) == 5:
            i, j, k, d = (int(x) for x in parts[1:])
            cur = entries.setdefault((i, j), {})
            if cur is None:
                raise ValueError(f"line {ln}: entry ({i},{j}) already unknown")
            if k in cur:
                raise ValueError(f"line {ln}: duplicate degree {k} for ({i},{j})")
            cur[k] = d
        elif parts[0] == "unknown" and len(parts) == 3:
            i, j = int(parts[1]), int(parts[2])
            if entries.get((i, j)):
                raise ValueError(f"line {ln}: entry ({i},{j}) already has data")
            entries[(i, j)] = None
        else:
            raise ValueError(f"line {ln}: cannot parse {raw!r}")
    return HomTable(size, entries)


def format_hom_table(table: HomTable) -> str:
    lines = []
    for (i, j), e in table.items():
        if e is None:
            lines.append(f"unknown {i} {j}")
        else:
            for k in sorted(e):
                lines.append(f"hom {i} {j} {k} {e[k]}")
    return "\n".join(lines) + ("\n" if lines else "")


def collection_to_data(c: ExcCollection) -> dict:
    table = {}
    for (i, j), e in c.table.items():
        if e is None:
            table[f"{i},{j}"] = None
        elif e:
            table[f"{i},{j}"] = {str(k): d for k, d in sorted(e.items())}
    return {
        "labels": [o.label for o in c.objects],
        "classes": [list(o.kclass) for o in c.objects],
        "shifts": [o.shift for o in c.objects],
        "euler": [list(row) for row in c.euler.entries],
        "table": table,
    }


def _derive_euler(classes: list[KClass], table: HomTable) -> EulerMatrix:
    """Gram matrix from the table when the classes form a unimodular basis."""
    from . import _linalg

    n = len(classes)
    if any(len(cl) != n for cl in classes):
        raise ValueError("euler matrix required: classes do not form a square basis")
    cmat = _linalg.frac_matrix([[classes[j][r] for j in range(n)] for r in range(n)])
    cinv = _linalg.frac_inverse(cmat)
    if cinv is None:
        raise ValueError("euler matrix required: classes are not a basis")
    u = [[0] * n for _ in range(n)]
    for i in range(n):
        u[i][i] = 1
        for j in range(i + 1, n):
            e = table.entry(i, j)
            if e is None:
                raise ValueError("euler matrix required: table has unknown entries")
            u[i][j] = chi_of_entry(e)
    m = _linalg.frac_matmul(
        _linalg.frac_matmul([list(row) for row in zip(*cinv)], _linalg.frac_matrix(u)), cinv
    )
    entries = []
    for row in m:
        out_row = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("derived pairing is not integral")
            out_row.append(int(x))
        entries.append(tuple(out_row))
    return EulerMatrix(tuple(entries))


def collection_from_data(data: dict, table: HomTable | None = None) -> ExcCollection:
    labels = list(data["labels"])
    classes = [tuple(int(x) for x in cl) for cl in data["classes"]]
    shifts = [int(x) for x in data.get("shifts", [0] * len(labels))]
    if table is None:
        entries: dict[tuple[int, int], dict[int, int] | None] = {}
        for key, e in (data.get("table") or {}).items():
            i, j = (int(x) for x in key.split(","))
            entries[(i, j)] = None if e is None else {int(k): int(d) for k, d in e.items()}
        table = HomTable(len(labels), entries)
    if data.get("euler") is not None:
        euler = EulerMatrix(tuple(tuple(int(x) for x in row) for row in data["euler"]))
    else:
        euler = _derive_euler(classes, table)
    objects = [ExcObject(lab, cl, sh) for lab, cl, sh in zip(labels, classes, shifts)]
    return make_collection(objects, table, euler)

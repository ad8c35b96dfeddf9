"""Enumeration of generating invariants up to explicit bounds.

Two families are produced for a mixed quiver setting: characteristic
coefficients of realized closed-path products in the double, and block
pfaffians of weighted path tableaux whose weights are supported on SL and SO
vertices (weights anywhere else force the family empty).  The one-vertex
specialization recovers the classical matrix-invariant lists for GL, O, SO
and Sp, including the pfaffian-type generators that exist only for SO in
even dimension.

Generation holds as an algebra statement with no degree bound; every
enumerator here is explicitly bounded and reports its bounds, and duplicates
arising from rotation or transpose coincidences are kept but flagged rather
than merged.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .pfaffian import partial_linearization
from .poly import Polynomial, PolyMatrix, sigma
from .quiver import (
    Arrow,
    Quiver,
    Setting,
    SettingError,
    closed_paths,
    double_setting,
    is_normalized,
    path_matrix,
    paths_between,
    require_valid,
)
from .tableau import TabArrow, Tableau, bpf, expand_weight

POLY_TEXT_GATE = 400  # max terms rendered into report text


class BudgetError(RuntimeError):
    def __init__(self, message: str, count: int, budget: int):
        super().__init__(f"{message}: {count} candidates exceed the budget of {budget}")
        self.count = count
        self.budget = budget


@dataclass
class GeneratorDescriptor:
    kind: str                       # "sigma" | "bpf" | "plin"
    polynomial: Polynomial
    multidegree: tuple
    path: tuple | None = None       # sigma: closed path in the double
    k: int | None = None            # sigma: coefficient index
    weight: tuple | None = None     # bpf: vertex weight
    columns: tuple | None = None    # bpf: shape
    cell_arrows: tuple | None = None  # bpf: ((tail cell, head cell), ...)
    paths: tuple | None = None      # bpf: per-label path in the double
    words: tuple | None = None      # plin: word per slot
    degrees: tuple | None = None    # plin: linearization degrees
    duplicate_of: int | None = None

    @property
    def is_zero(self) -> bool:
        return self.polynomial.is_zero()

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind, "multidegree": list(self.multidegree)}
        if self.kind == "sigma":
            doc["path"] = list(self.path)
            doc["k"] = self.k
        elif self.kind == "bpf":
            doc["weight"] = list(self.weight)
            doc["columns"] = list(self.columns)
            doc["arrows"] = [
                {"tail": list(t), "head": list(h), "label": i + 1}
                for i, (t, h) in enumerate(self.cell_arrows)
            ]
            doc["paths"] = [list(p) for p in self.paths]
        else:
            doc["words"] = [list(w) for w in self.words]
            doc["degrees"] = list(self.degrees)
        if self.duplicate_of is not None:
            doc["duplicate_of"] = self.duplicate_of
        doc["zero"] = self.is_zero
        if len(self.polynomial.terms) <= POLY_TEXT_GATE:
            doc["polynomial"] = str(self.polynomial)
        else:
            doc["terms"] = len(self.polynomial.terms)
        return doc


def multidegree(f: Polynomial, arrow_names: Sequence[str], assert_homogeneous: bool = False) -> tuple:
    """Per-arrow total degrees of a polynomial, in the given arrow order."""
    if assert_homogeneous and not f.is_homogeneous_per_arrow():
        raise AssertionError(f"polynomial is not homogeneous per arrow: {f}")
    degs = f.arrow_degrees()
    return tuple(degs.get(name, 0) for name in arrow_names)


def _flag_duplicates(descriptors):
    seen: dict = {}
    for idx, desc in enumerate(descriptors):
        key = desc.polynomial.key()
        if key in seen:
            desc.duplicate_of = seen[key]
        else:
            seen[key] = idx
    return descriptors


def _require_normalized(setting: Setting):
    require_valid(setting)
    if not is_normalized(setting):
        raise SettingError("generator enumeration requires a normalized setting (no self-dual GL/SL vertex)")


def sigma_generators(setting: Setting, max_path_len: int, max_generators: int | None = None):
    """Characteristic coefficients of realized closed-path products in the
    double: one descriptor per rotation class of closed paths of bounded
    length and per coefficient index up to the base vertex dimension."""
    _require_normalized(setting)
    d = double_setting(setting)
    arrow_names = [a.name for a in setting.quiver.arrows]
    paths = closed_paths(d.setting.quiver, max_path_len)
    count = sum(setting.dim_of(d.setting.quiver.arrow(p[0]).tail) for p in paths)
    if max_generators is not None and count > max_generators:
        raise BudgetError("sigma generator enumeration", count, max_generators)
    out = []
    for path in paths:
        base_vertex = d.setting.quiver.arrow(path[0]).tail
        mat = path_matrix(d, path)
        for k in range(1, setting.dim_of(base_vertex) + 1):
            poly = sigma(mat, k)
            out.append(
                GeneratorDescriptor(
                    kind="sigma",
                    polynomial=poly,
                    multidegree=multidegree(poly, arrow_names, assert_homogeneous=True),
                    path=path,
                    k=k,
                )
            )
    return _flag_duplicates(out)


def _weight_ranges(setting: Setting, max_weight: int):
    ranges = []
    for v in range(1, setting.vertices + 1):
        g = setting.group_of(v)
        g_dual = setting.group_of(setting.inv(v))
        if g in ("GL", "O", "Sp") or g_dual in ("GL", "O", "Sp"):
            ranges.append((0,))
        elif g == "SO":
            ranges.append(tuple(range(0, min(1, max_weight) + 1)))
        else:
            ranges.append(tuple(range(0, max_weight + 1)))
    return ranges


def _weight_admissible(setting: Setting, weight) -> bool:
    for v in range(1, setting.vertices + 1):
        if setting.group_of(v) == "SL":
            if weight[v - 1] and weight[setting.inv(v) - 1]:
                return False
    return any(weight)


def _directed_pairings(cells):
    if not cells:
        yield []
        return
    first = cells[0]
    rest = cells[1:]
    for idx, other in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for pair in ((first, other), (other, first)):
            for sub in _directed_pairings(remaining):
                yield [pair] + sub


def bpf_generators(
    setting: Setting,
    max_weight: int = 1,
    max_path_len: int = 3,
    max_cells: int = 6,
    budget: int = 200_000,
):
    """Block pfaffians of weighted path tableaux over the double.

    Weights run over vectors bounded by max_weight that vanish at GL, O and
    Sp vertices (and their duals), stay below 2 at SO vertices, and vanish on
    one side of every SL pair.  For each admissible weight the induced shape
    is paired off in every direction, each arrow is assigned every path of
    bounded length in the double compatible with its column vertices, and
    the labels are one per arrow.  Identically zero polynomials are dropped;
    textual duplicates are kept and flagged.
    """
    _require_normalized(setting)
    d = double_setting(setting)
    arrow_names = [a.name for a in setting.quiver.arrows]
    out = []
    candidates = 0
    for weight in product(*_weight_ranges(setting, max_weight)):
        if not _weight_admissible(setting, weight):
            continue
        columns = expand_weight(setting.dim, weight)
        total = sum(columns)
        if total == 0 or total % 2 or total > max_cells:
            continue
        vertex_of_col = []
        for v in range(1, setting.vertices + 1):
            vertex_of_col += [v] * weight[v - 1]
        cells = [(c, r) for c, size in enumerate(columns, start=1) for r in range(1, size + 1)]
        pool_cache: dict = {}

        def pool(tail_col, head_col):
            key = (tail_col, head_col)
            if key not in pool_cache:
                pool_cache[key] = paths_between(
                    d.setting.quiver,
                    setting.inv(vertex_of_col[head_col - 1]),
                    vertex_of_col[tail_col - 1],
                    max_path_len,
                )
            return pool_cache[key]

        for pairing in _directed_pairings(cells):
            pairing = sorted(pairing)
            pools = [pool(t[0], h[0]) for t, h in pairing]
            if any(not p for p in pools):
                continue
            combos = 1
            for p in pools:
                combos *= len(p)
            candidates += combos
            if candidates > budget:
                raise BudgetError("tableau generator enumeration", candidates, budget)
            tableau = Tableau(
                columns=columns,
                arrows=tuple(TabArrow(t, h) for t, h in pairing),
                labels=tuple(range(1, len(pairing) + 1)),
            )
            for chosen in product(*pools):
                mats = [path_matrix(d, p) for p in chosen]
                poly = bpf(tableau, mats)
                if not isinstance(poly, Polynomial) or poly.is_zero():
                    continue
                out.append(
                    GeneratorDescriptor(
                        kind="bpf",
                        polynomial=poly,
                        multidegree=multidegree(poly, arrow_names, assert_homogeneous=True),
                        weight=tuple(weight),
                        columns=columns,
                        cell_arrows=tuple((t, h) for t, h in pairing),
                        paths=tuple(chosen),
                    )
                )
    return _flag_duplicates(out)


def one_vertex_setting(n: int, d: int, group: str) -> Setting:
    """A single vertex carrying d unconstrained loops x1..xd."""
    arrows = tuple(Arrow(name=f"x{i}", tail=1, head=1, kind="M") for i in range(1, d + 1))
    return Setting(
        quiver=Quiver(vertices=1, arrows=arrows),
        dim=(n,),
        group=(group,),
        involution=(1,),
    )


def _letters(setting: Setting, group: str):
    """Letter alphabet for word products: the loops, plus their transposes
    (J-twisted at a symplectic vertex) when the group pairs a matrix with
    its dual."""
    letters = [(a.name, setting.generic(a.name)) for a in setting.quiver.arrows]
    if group == "GL":
        return letters
    n = setting.dim_of(1)
    extra = []
    for a in setting.quiver.arrows:
        t = setting.generic(a.name).transpose()
        if group == "Sp":
            j = PolyMatrix.symplectic(n)
            extra.append((f"{a.name}^t", j * t * j))
        else:
            extra.append((f"{a.name}^t", t))
    return letters + extra


def _words(names, max_len):
    out = []
    for length in range(1, max_len + 1):
        out.extend(product(names, repeat=length))
    return out


def _rotation_canonical(words):
    seen = []
    taken = set()
    for w in words:
        canon = min(w[i:] + w[:i] for i in range(len(w)))
        if canon not in taken:
            taken.add(canon)
            seen.append(canon)
    return seen


def _word_matrix(word, table) -> PolyMatrix:
    result = table[word[-1]]
    for name in reversed(word[:-1]):
        result = result * table[name]
    return result


def _compositions(total: int):
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            yield (first,) + rest


def matrix_invariant_generators(
    n: int,
    d: int,
    group: str,
    max_word_len: int,
    budget: int = 100_000,
):
    """Generators for the invariants of d matrices under a classical group
    acting by simultaneous conjugation.

    GL uses words in the matrices alone; O and SO also use transposes; Sp
    uses J-twisted transposes.  For SO in even dimension the pfaffian-type
    partial linearizations over tuples of words are appended; SO in odd
    dimension has no such generators.  Words for the characteristic
    coefficients are rotation-canonical.
    """
    if group not in ("GL", "O", "SO", "Sp"):
        raise ValueError(f"unsupported group {group}")
    if group == "Sp" and n % 2:
        raise ValueError("symplectic group needs even dimension")
    setting = one_vertex_setting(n, d, group)
    letters = _letters(setting, group)
    table = dict(letters)
    names = [name for name, _ in letters]
    arrow_names = [a.name for a in setting.quiver.arrows]
    all_words = _words(names, max_word_len)
    if len(all_words) * n > budget:
        raise BudgetError("word enumeration", len(all_words) * n, budget)
    out = []
    for word in _rotation_canonical(all_words):
        mat = _word_matrix(word, table)
        for k in range(1, n + 1):
            poly = sigma(mat, k)
            out.append(
                GeneratorDescriptor(
                    kind="sigma",
                    polynomial=poly,
                    multidegree=multidegree(poly, arrow_names, assert_homogeneous=True),
                    path=word,
                    k=k,
                )
            )
    if group == "SO" and n % 2 == 0:
        half = n // 2
        for degrees in _compositions(half):
            slots = len(degrees)
            count = len(all_words) ** slots
            if count > budget:
                raise BudgetError("pfaffian-type enumeration", count, budget)
            emitted = set()
            for combo in product(all_words, repeat=slots):
                canon = tuple(sorted(zip(degrees, combo)))
                if canon in emitted:
                    continue
                emitted.add(canon)
                mats = [_word_matrix(w, table) for w in combo]
                poly = partial_linearization(mats, list(degrees))
                if poly.is_zero():
                    continue
                out.append(
                    GeneratorDescriptor(
                        kind="plin",
                        polynomial=poly,
                        multidegree=multidegree(poly, arrow_names, assert_homogeneous=True),
                        words=tuple(combo),
                        degrees=tuple(degrees),
                    )
                )
    return _flag_duplicates(out)

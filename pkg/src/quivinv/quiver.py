"""Quivers, mixed quiver settings, and the derived settings used to produce
invariants.

A mixed quiver setting is a quiver plus a dimension vector, a classical group
label per vertex (GL, O, Sp, SL, SO), a subspace label per arrow (M, S+, S-,
L+, L-), and a vertex involution, subject to the compatibility conditions
a) through i) checked by :func:`validate`.

Three derived settings are constructed here, each with a substitution map
sending its generic matrices back into the base coordinate ring:

- the double, which adds a formal transpose arrow for every unconstrained
  arrow and realizes it as a transpose with J-twists at symplectic ends;
- the loop extension, which adds an identity-valued loop at each v < i(v)
  of an all-GL/SL setting;
- the reduction, which trades every orthogonal/symplectic/special-orthogonal
  vertex for a GL/SL pair joined by constant arrows, leaving a setting with
  only GL and SL labels and only unconstrained arrows.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .poly import Polynomial, PolyMatrix, generic_matrix, substitute

GROUPS = ("GL", "O", "Sp", "SL", "SO")
KINDS = ("M", "S+", "S-", "L+", "L-")

_NAME_RE = re.compile(r"^[^,\[\]\s]+$")


class SettingError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: int
    head: int
    kind: str = "M"

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise SettingError(f"bad arrow name {self.name!r}")
        if self.kind not in KINDS:
            raise SettingError(f"unknown arrow kind {self.kind!r}")

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Quiver:
    vertices: int
    arrows: tuple

    def __post_init__(self):
        if self.vertices < 1:
            raise SettingError("a quiver needs at least one vertex")
        names = set()
        for a in self.arrows:
            if not (1 <= a.tail <= self.vertices and 1 <= a.head <= self.vertices):
                raise SettingError(f"arrow {a.name} endpoints outside 1..{self.vertices}")
            if a.name in names:
                raise SettingError(f"duplicate arrow name {a.name!r}")
            names.add(a.name)

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise SettingError(f"no arrow named {name!r}")

    def arrows_from(self, v: int):
        return [a for a in self.arrows if a.tail == v]


@dataclass(frozen=True)
class Setting:
    quiver: Quiver
    dim: tuple
    group: tuple
    involution: tuple

    def __post_init__(self):
        l = self.quiver.vertices
        if len(self.dim) != l or len(self.group) != l or len(self.involution) != l:
            raise SettingError("dim, group and involution must have one entry per vertex")
        if any(n < 1 for n in self.dim):
            raise SettingError("dimensions must be positive")
        if any(g not in GROUPS for g in self.group):
            raise SettingError(f"group labels must be among {GROUPS}")
        if any(not (1 <= w <= l) for w in self.involution):
            raise SettingError("involution values outside the vertex range")

    @property
    def vertices(self) -> int:
        return self.quiver.vertices

    def dim_of(self, v: int) -> int:
        return self.dim[v - 1]

    def group_of(self, v: int) -> str:
        return self.group[v - 1]

    def inv(self, v: int) -> int:
        return self.involution[v - 1]

    def arrow_dims(self, a: Arrow):
        """(rows, cols) of the generic matrix of an arrow: head dim x tail dim."""
        return self.dim_of(a.head), self.dim_of(a.tail)

    def generic(self, name: str) -> PolyMatrix:
        a = self.quiver.arrow(name)
        rows, cols = self.arrow_dims(a)
        return _generic_cached(name, rows, cols, a.kind)

    def variables(self) -> set:
        out = set()
        for a in self.quiver.arrows:
            out |= self.generic(a.name).variables()
        return out


@lru_cache(maxsize=None)
def _generic_cached(name, rows, cols, kind):
    return generic_matrix(name, rows, cols, kind)


@dataclass(frozen=True)
class Violation:
    condition: str
    subject: str
    message: str

    def __str__(self):
        return f"condition {self.condition}) violated at {self.subject}: {self.message}"


def validate(setting: Setting, characteristic: int = 0):
    """All violated compatibility conditions, identified a) through i);
    an empty list means the setting is valid."""
    out = []
    s = setting
    for v in range(1, s.vertices + 1):
        g, n = s.group_of(v), s.dim_of(v)
        if g == "Sp" and n % 2:
            out.append(Violation("a", f"vertex {v}", f"Sp label with odd dimension {n}"))
        if g in ("O", "SO") and characteristic == 2:
            out.append(Violation("b", f"vertex {v}", "orthogonal label in characteristic 2"))
        if s.inv(s.inv(v)) != v:
            out.append(Violation("c", f"vertex {v}", "involution does not square to the identity"))
        if s.dim_of(s.inv(v)) != n:
            out.append(Violation("d", f"vertex {v}", f"dimension {n} differs from its dual's {s.dim_of(s.inv(v))}"))
        if g in ("O", "Sp", "SO") and s.inv(v) != v:
            out.append(Violation("e", f"vertex {v}", f"{g} vertex must be fixed by the involution"))
    for a in s.quiver.arrows:
        if a.kind != "M" and s.dim_of(a.head) != s.dim_of(a.tail):
            out.append(Violation("f", f"arrow {a.name}", "constrained arrow between different dimensions"))
        if a.is_loop and a.kind in ("S+", "S-") and s.group_of(a.head) not in ("O", "SO"):
            out.append(Violation("g", f"arrow {a.name}", f"{a.kind} loop at a {s.group_of(a.head)} vertex"))
        if a.is_loop and a.kind in ("L+", "L-") and s.group_of(a.head) != "Sp":
            out.append(Violation("h", f"arrow {a.name}", f"{a.kind} loop at a {s.group_of(a.head)} vertex"))
        if not a.is_loop and a.kind != "M":
            if s.inv(a.head) != a.tail:
                out.append(Violation("i", f"arrow {a.name}", "constrained arrow must join a vertex to its dual"))
            if a.kind not in ("S+", "S-"):
                out.append(Violation("i", f"arrow {a.name}", f"{a.kind} not allowed off the diagonal"))
    return out


def require_valid(setting: Setting, characteristic: int = 0):
    violations = validate(setting, characteristic)
    if violations:
        raise SettingError("; ".join(str(v) for v in violations))


def is_normalized(setting: Setting) -> bool:
    """True when no GL or SL vertex is fixed by the involution."""
    return all(
        setting.inv(v) != v
        for v in range(1, setting.vertices + 1)
        if setting.group_of(v) in ("GL", "SL")
    )


@dataclass(frozen=True)
class Rule:
    """How one derived generic matrix is expressed in the base coordinates:
    the base generic itself, its transpose with optional J factors, or a
    constant identity/skew-form matrix."""

    kind: str                 # "generic" | "transpose" | "constant"
    base: str | None = None
    pre_j: bool = False       # left factor J(base tail dim)
    post_j: bool = False      # right factor J(base head dim)
    const: str | None = None  # "E" or "J"
    size: int = 0

    def to_json(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "matrix": self.const, "size": self.size}
        if self.kind == "transpose":
            return {"kind": "transpose", "base": self.base, "pre_j": self.pre_j, "post_j": self.post_j}
        return {"kind": "generic", "base": self.base}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Rule":
        if doc["kind"] == "constant":
            return cls(kind="constant", const=doc["matrix"], size=doc["size"])
        if doc["kind"] == "transpose":
            return cls(kind="transpose", base=doc["base"], pre_j=doc["pre_j"], post_j=doc["post_j"])
        return cls(kind="generic", base=doc["base"])


class SubstitutionMap:
    """Arrow-wise substitution from a derived setting's coordinate ring into
    the base setting's; applying it to polynomials is a ring homomorphism."""

    def __init__(self, base: Setting, rules: Mapping[str, Rule]):
        self.base = base
        self.rules = dict(rules)
        self._matrices: dict = {}

    def matrix(self, name: str) -> PolyMatrix:
        got = self._matrices.get(name)
        if got is not None:
            return got
        rule = self.rules[name]
        if rule.kind == "constant":
            m = PolyMatrix.identity(rule.size) if rule.const == "E" else PolyMatrix.symplectic(rule.size)
        elif rule.kind == "generic":
            m = self.base.generic(rule.base)
        else:
            arrow = self.base.quiver.arrow(rule.base)
            m = self.base.generic(rule.base).transpose()
            if rule.pre_j:
                m = PolyMatrix.symplectic(self.base.dim_of(arrow.tail)) * m
            if rule.post_j:
                m = m * PolyMatrix.symplectic(self.base.dim_of(arrow.head))
        self._matrices[name] = m
        return m

    def tables(self) -> dict:
        return {name: self.matrix(name) for name in self.rules}

    def apply(self, f: Polynomial) -> Polynomial:
        return substitute(f, self.tables())

    def apply_matrix(self, m: PolyMatrix) -> PolyMatrix:
        tables = self.tables()
        return m.map(lambda p: substitute(p, tables))

    def to_json(self) -> dict:
        return {name: rule.to_json() for name, rule in sorted(self.rules.items())}


@dataclass(frozen=True)
class DerivedSetting:
    setting: Setting
    base: Setting
    substitution: SubstitutionMap
    twins: tuple = ()  # (original vertex, appended twin) pairs

    def path_matrix(self, path: Sequence[str]) -> PolyMatrix:
        return path_matrix(self, path)


def _identity_rules(setting: Setting) -> dict:
    return {a.name: Rule(kind="generic", base=a.name) for a in setting.quiver.arrows}


def normalize_setting(setting: Setting) -> DerivedSetting:
    """Append a twin vertex for every GL/SL vertex fixed by the involution,
    pairing the two under the involution.  Arrows, and hence the coordinate
    ring, are unchanged; the twins table records the new vertex numbers."""
    require_valid(setting)
    l = setting.vertices
    dim = list(setting.dim)
    group = list(setting.group)
    inv = list(setting.involution)
    twins = []
    nxt = l + 1
    for v in range(1, l + 1):
        if setting.group_of(v) in ("GL", "SL") and setting.inv(v) == v:
            dim.append(setting.dim_of(v))
            group.append(setting.group_of(v))
            inv[v - 1] = nxt
            inv.append(v)
            twins.append((v, nxt))
            nxt += 1
    out = Setting(
        quiver=Quiver(vertices=len(dim), arrows=setting.quiver.arrows),
        dim=tuple(dim),
        group=tuple(group),
        involution=tuple(inv),
    )
    require_valid(out)
    return DerivedSetting(setting=out, base=setting, substitution=SubstitutionMap(setting, _identity_rules(out)), twins=tuple(twins))


def double_setting(setting: Setting) -> DerivedSetting:
    """The double: every unconstrained arrow gains a formal transpose arrow
    between the dual vertices, realized in the base coordinates as the
    transposed generic matrix with a J factor at each symplectic end."""
    require_valid(setting)
    if not is_normalized(setting):
        raise SettingError("double requires every GL/SL vertex to be split off its dual; normalize first")
    arrows = list(setting.quiver.arrows)
    rules = _identity_rules(setting)
    taken = {a.name for a in arrows}
    for a in setting.quiver.arrows:
        if a.kind != "M":
            continue
        name = f"{a.name}^t"
        while name in taken:
            name += "^t"
        taken.add(name)
        arrows.append(Arrow(name=name, tail=setting.inv(a.head), head=setting.inv(a.tail), kind="M"))
        rules[name] = Rule(
            kind="transpose",
            base=a.name,
            pre_j=setting.group_of(a.tail) == "Sp",
            post_j=setting.group_of(a.head) == "Sp",
        )
    out = Setting(
        quiver=Quiver(vertices=setting.vertices, arrows=tuple(arrows)),
        dim=setting.dim,
        group=setting.group,
        involution=setting.involution,
    )
    require_valid(out)
    return DerivedSetting(setting=out, base=setting, substitution=SubstitutionMap(setting, rules))


def loop_setting(setting: Setting) -> DerivedSetting:
    """The loop extension of an all-GL/SL setting with unconstrained arrows:
    one extra loop per vertex below its dual, substituted by the identity."""
    require_valid(setting)
    bad = [v for v in range(1, setting.vertices + 1) if setting.group_of(v) not in ("GL", "SL")]
    if bad:
        raise SettingError(f"loop extension needs GL/SL labels everywhere, offending vertices {bad}")
    constrained = [a.name for a in setting.quiver.arrows if a.kind != "M"]
    if constrained:
        raise SettingError(f"loop extension needs unconstrained arrows, offending {constrained}")
    arrows = list(setting.quiver.arrows)
    rules = _identity_rules(setting)
    for v in range(1, setting.vertices + 1):
        if v < setting.inv(v):
            name = f"alpha@{v}"
            arrows.append(Arrow(name=name, tail=v, head=v, kind="M"))
            rules[name] = Rule(kind="constant", const="E", size=setting.dim_of(v))
    out = Setting(
        quiver=Quiver(vertices=setting.vertices, arrows=tuple(arrows)),
        dim=setting.dim,
        group=setting.group,
        involution=setting.involution,
    )
    require_valid(out)
    return DerivedSetting(setting=out, base=setting, substitution=SubstitutionMap(setting, rules))


def reduce_setting(setting: Setting) -> DerivedSetting:
    """The reduction to GL/SL labels: every O/Sp vertex gains a twin joined
    by two constant arrows (identity for O, the skew form for Sp) and every
    SO vertex gains an SL twin joined by one identity arrow; all arrow kinds
    become unconstrained."""
    require_valid(setting)
    if not is_normalized(setting):
        raise SettingError("reduction requires every GL/SL vertex to be split off its dual; normalize first")
    l = setting.vertices
    dim = list(setting.dim)
    group = list(setting.group)
    inv = list(setting.involution)
    arrows = [Arrow(name=a.name, tail=a.tail, head=a.head, kind="M") for a in setting.quiver.arrows]
    rules = _identity_rules(setting)
    twins = []
    nxt = l + 1
    for v in range(1, l + 1):
        g = setting.group_of(v)
        if g in ("GL", "SL"):
            continue
        n = setting.dim_of(v)
        dim.append(n)
        group[v - 1] = "GL" if g in ("O", "Sp") else "SL"
        group.append(group[v - 1])
        inv[v - 1] = nxt
        inv.append(v)
        twins.append((v, nxt))
        beta = f"beta@{v}"
        arrows.append(Arrow(name=beta, tail=nxt, head=v, kind="M"))
        rules[beta] = Rule(kind="constant", const="J" if g == "Sp" else "E", size=n)
        if g in ("O", "Sp"):
            gamma = f"gamma@{v}"
            arrows.append(Arrow(name=gamma, tail=v, head=nxt, kind="M"))
            rules[gamma] = Rule(kind="constant", const="J" if g == "Sp" else "E", size=n)
        nxt += 1
    out = Setting(
        quiver=Quiver(vertices=len(dim), arrows=tuple(arrows)),
        dim=tuple(dim),
        group=tuple(group),
        involution=tuple(inv),
    )
    require_valid(out)
    return DerivedSetting(setting=out, base=setting, substitution=SubstitutionMap(setting, rules), twins=tuple(twins))


def closed_paths(quiver: Quiver, max_len: int):
    """All closed paths of length up to max_len, one representative per
    rotation class: the lexicographically least rotation of the name tuple.

    Rotation classes coincide for the characteristic coefficients of path
    products (sigma_k(AB) = sigma_k(BA)), which is why rotations are the
    only duplicates removed here.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    by_tail: dict = {}
    for a in quiver.arrows:
        by_tail.setdefault(a.tail, []).append(a)
    found = set()

    def extend(path, head):
        if len(path) >= 1 and head == path[0].tail:
            names = tuple(a.name for a in path)
            found.add(min(names[i:] + names[:i] for i in range(len(names))))
        if len(path) == max_len:
            return
        for nxt in by_tail.get(head, ()):
            extend(path + [nxt], nxt.head)

    for start in quiver.arrows:
        extend([start], start.head)
    return sorted(found, key=lambda p: (len(p), p))


def paths_between(quiver: Quiver, tail: int, head: int, max_len: int):
    """All paths from tail to head of length up to max_len, in traversal
    order (first arrow first)."""
    by_tail: dict = {}
    for a in quiver.arrows:
        by_tail.setdefault(a.tail, []).append(a)
    out = []

    def extend(path, at):
        if path and at == head:
            out.append(tuple(a.name for a in path))
        if len(path) == max_len:
            return
        for nxt in by_tail.get(at, ()):
            extend(path + [nxt], nxt.head)

    extend([], tail)
    return sorted(out, key=lambda p: (len(p), p))


def path_matrix(setting, path: Sequence[str]) -> PolyMatrix:
    """Product of the generic matrices along a path, last arrow leftmost.
    For a derived setting the substitution is applied arrow by arrow, so the
    result lives in the base coordinates."""
    if isinstance(setting, DerivedSetting):
        quiver = setting.setting.quiver
        matrix_of = setting.substitution.matrix
    else:
        quiver = setting.quiver
        matrix_of = setting.generic
    if not path:
        raise SettingError("empty path")
    arrows = [quiver.arrow(name) for name in path]
    for first, second in zip(arrows, arrows[1:]):
        if first.head != second.tail:
            raise SettingError(f"arrows {first.name} and {second.name} do not compose")
    result = matrix_of(arrows[-1].name)
    for a in reversed(arrows[:-1]):
        result = result * matrix_of(a.name)
    return result


def setting_to_json(setting: Setting) -> dict:
    return {
        "vertices": setting.vertices,
        "dim": list(setting.dim),
        "group": list(setting.group),
        "involution": list(setting.involution),
        "arrows": [
            {"id": a.name, "tail": a.tail, "head": a.head, "kind": a.kind}
            for a in setting.quiver.arrows
        ],
    }


def setting_from_json(doc: Mapping) -> Setting:
    arrows = tuple(
        Arrow(name=a["id"], tail=a["tail"], head=a["head"], kind=a.get("kind", "M"))
        for a in doc["arrows"]
    )
    return Setting(
        quiver=Quiver(vertices=doc["vertices"], arrows=arrows),
        dim=tuple(doc["dim"]),
        group=tuple(doc["group"]),
        involution=tuple(doc["involution"]),
    )


def derived_to_json(derived: DerivedSetting) -> dict:
    doc = setting_to_json(derived.setting)
    doc["substitution"] = derived.substitution.to_json()
    if derived.twins:
        doc["twins"] = [list(pair) for pair in derived.twins]
    return doc


def load_setting(path: str) -> Setting:
    with open(path, "r", encoding="utf-8") as fh:
        return setting_from_json(json.load(fh))

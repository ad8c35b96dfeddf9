"""Randomized exact verification of (semi-)invariance.

Group elements are sampled exactly: GL by rejection on the determinant, SL by
rescaling a row, SO and Sp by Cayley transforms of skew respectively
Hamiltonian matrices (no square roots, so everything stays in the field), and
O by an optional reflection on top of an SO sample.  The involution coupling
g at the dual vertex = inverse transpose is enforced last.

Checks evaluate polynomials at sampled points on both sides of the claimed
identity and compare exactly; a failed comparison is reported with a witness,
never raised.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Mapping, Sequence

from .field import Mat, RATIONALS
from .poly import Polynomial, entry_var
from .quiver import Setting, SettingError, path_matrix, require_valid
from .tableau import Tableau, bpf, expand_weight

MAX_SAMPLE_RETRIES = 64


class SampleError(RuntimeError):
    pass


@dataclass(frozen=True)
class GroupElement:
    """Per-vertex invertible matrices satisfying the group memberships and
    the involution coupling."""

    mats: tuple  # one Mat per vertex, index v-1

    def __getitem__(self, v: int) -> Mat:
        return self.mats[v - 1]

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple(m.inv() for m in self.mats))


@dataclass(frozen=True)
class RepresentationPoint:
    """Per-arrow numeric matrices lying in the prescribed subspaces."""

    mats: dict

    def __getitem__(self, arrow: str) -> Mat:
        return self.mats[arrow]


def _rand_mat(rng, rows, cols, field):
    return Mat([[field.rand(rng) for _ in range(cols)] for _ in range(rows)])


def _rand_invertible(rng, n, field):
    for _ in range(MAX_SAMPLE_RETRIES):
        m = _rand_mat(rng, n, n, field)
        if m.det():
            return m
    raise SampleError(f"no invertible {n}x{n} matrix found in {MAX_SAMPLE_RETRIES} tries")


def _rand_special(rng, n, field):
    m = _rand_invertible(rng, n, field)
    d = m.det()
    rows = [list(r) for r in m.data]
    rows[0] = [e / d for e in rows[0]]
    return Mat(rows)


def _rand_skew(rng, n, field):
    rows = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = field.rand(rng)
            rows[i][j] = v
            rows[j][i] = -v
    return Mat(rows)


def _rand_special_orthogonal(rng, n, field):
    e = Mat.identity(n, field)
    for _ in range(MAX_SAMPLE_RETRIES):
        s = _rand_skew(rng, n, field)
        if (e - s).det():
            g = (e + s) * (e - s).inv()
            assert g * g.transpose() == e and g.det() == field.one
            return g
    raise SampleError("Cayley sampling for SO failed")


def _rand_orthogonal(rng, n, field):
    g = _rand_special_orthogonal(rng, n, field)
    if rng.random() < 0.5:
        refl = [list(r) for r in Mat.identity(n, field).data]
        refl[0][0] = -field.one
        g = Mat(refl) * g
    assert g * g.transpose() == Mat.identity(n, field)
    return g


def _rand_hamiltonian(rng, n, field):
    # Block form [[P, Q], [R, -P^t]] with Q, R symmetric makes J*A symmetric.
    m = n // 2
    p = _rand_mat(rng, m, m, field)
    q = _rand_mat(rng, m, m, field)
    r = _rand_mat(rng, m, m, field)
    q = q + q.transpose()
    r = r + r.transpose()
    rows = [[field.zero] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            rows[i][j] = p[i, j]
            rows[i][m + j] = q[i, j]
            rows[m + i][j] = r[i, j]
            rows[m + i][m + j] = -p[j, i]
    return Mat(rows)


def _rand_symplectic(rng, n, field):
    e = Mat.identity(n, field)
    j = Mat.symplectic(n, field)
    for _ in range(MAX_SAMPLE_RETRIES):
        a = _rand_hamiltonian(rng, n, field)
        if (e - a).det():
            g = (e - a).inv() * (e + a)
            assert g.transpose() * j * g == j
            return g
    raise SampleError("Cayley sampling for Sp failed")


_SINGLE_SAMPLERS = {
    "GL": _rand_invertible,
    "SL": _rand_special,
    "O": _rand_orthogonal,
    "SO": _rand_special_orthogonal,
    "Sp": _rand_symplectic,
}


def sample_group_element(setting: Setting, rng: random.Random, field=RATIONALS) -> GroupElement:
    """Draw a random element of the setting's group, exactly.

    For a dual pair the free factor is sampled at the smaller vertex (with
    the special-linear restriction if either label demands it) and the dual
    factor is its inverse transpose.
    """
    if field.characteristic in (2, 3):
        raise SettingError("sampling needs characteristic 0 or at least 5")
    mats: list = [None] * setting.vertices
    for v in range(1, setting.vertices + 1):
        w = setting.inv(v)
        if w == v:
            mats[v - 1] = _SINGLE_SAMPLERS[setting.group_of(v)](rng, setting.dim_of(v), field)
        elif v < w:
            labels = {setting.group_of(v), setting.group_of(w)}
            sampler = _rand_special if "SL" in labels else _rand_invertible
            g = sampler(rng, setting.dim_of(v), field)
            mats[v - 1] = g
            mats[w - 1] = g.inv().transpose()
    return GroupElement(tuple(mats))


def sample_point(setting: Setting, rng: random.Random, field=RATIONALS) -> RepresentationPoint:
    """Draw a random representation point: each arrow's matrix is its generic
    matrix evaluated at random values of the free entries, which lands in the
    prescribed subspace by construction."""
    mats = {}
    for a in setting.quiver.arrows:
        generic = setting.generic(a.name)
        assignment = {v: field.rand(rng) for v in generic.variables()}
        mats[a.name] = generic.evaluate(assignment, field)
    return RepresentationPoint(mats)


def _in_subspace(kind: str, m: Mat) -> bool:
    if kind == "M":
        return True
    if kind == "S+":
        return m.is_symmetric()
    if kind == "S-":
        return m.is_skew()
    sample = m[0, 0]
    if isinstance(sample, Fraction):
        j = Mat.symplectic(m.rows)
    else:
        from .field import PrimeField

        j = Mat.symplectic(m.rows, PrimeField(sample.p))
    prod = m * j
    return prod.is_symmetric() if kind == "L+" else prod.is_skew()


def act(setting: Setting, g: GroupElement, h: RepresentationPoint) -> RepresentationPoint:
    """The group action on points: conjugate every arrow matrix by the head
    and inverse tail factors.  The result is asserted to stay inside each
    arrow's subspace; a violation means the setting was not validated."""
    inverses: dict = {}
    out = {}
    for a in setting.quiver.arrows:
        if a.tail not in inverses:
            inverses[a.tail] = g[a.tail].inv()
        moved = g[a.head] * h[a.name] * inverses[a.tail]
        if not _in_subspace(a.kind, moved):
            raise RuntimeError(f"action left the {a.kind} subspace at arrow {a.name}")
        out[a.name] = moved
    return RepresentationPoint(out)


def point_assignment(setting: Setting, h: RepresentationPoint) -> dict:
    """Assignment of every coordinate variable (including dependent entries)
    to the point's matrix entries."""
    out = {}
    for a in setting.quiver.arrows:
        m = h[a.name]
        for i in range(m.rows):
            for j in range(m.cols):
                out[entry_var(a.name, i + 1, j + 1)] = m[i, j]
    return out


def _mat_json(m: Mat):
    return [[str(e) for e in row] for row in m.data]


@dataclass
class CheckResult:
    name: str
    trials: int
    failures: list = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "trials": self.trials, "ok": self.ok}


@dataclass
class Report:
    field: str
    seed: int
    trials: int
    checks: list = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, check: CheckResult):
        self.checks.append(check)

    def to_json(self) -> dict:
        failures = [
            {"check": c.name, "trial": f["trial"], "witness": f["witness"]}
            for c in self.checks
            for f in c.failures
        ]
        return {
            "field": self.field,
            "seed": self.seed,
            "trials": self.trials,
            "checks": [c.to_json() for c in self.checks],
            "failures": failures,
            "ok": self.ok,
        }


def check_invariance(setting: Setting, f: Polynomial, trials: int, seed: int, field=RATIONALS, name: str = "invariance") -> Report:
    """Test g . f = f by comparing f at a random point with f at the moved
    point, exactly, over the requested number of independent trials."""
    require_valid(setting)
    rng = random.Random(seed)
    check = CheckResult(name=name, trials=trials)
    for trial in range(trials):
        g = sample_group_element(setting, rng, field)
        h = sample_point(setting, rng, field)
        lhs = f.evaluate(point_assignment(setting, h), field)
        rhs = f.evaluate(point_assignment(setting, act(setting, g, h)), field)
        if lhs != rhs:
            check.failures.append(
                {
                    "trial": trial,
                    "witness": {
                        "value_at_h": str(lhs),
                        "value_at_gh": str(rhs),
                        "g": [_mat_json(m) for m in g.mats],
                        "h": {k: _mat_json(v) for k, v in sorted(h.mats.items())},
                    },
                }
            )
    report = Report(field=field.name, seed=seed, trials=trials)
    report.add(check)
    return report


def semi_invariance_factor(setting: Setting, weight: Sequence[int], g: GroupElement, field):
    """The determinant character by which a weighted tableau polynomial
    transforms: product over fixed vertices of det^(-w) and over dual pairs
    of det^(weight at the dual minus weight here)."""
    q = field.one
    for v in range(1, setting.vertices + 1):
        w = setting.inv(v)
        d = g[v].det()
        if w == v:
            q = q * d ** (-weight[v - 1])
        elif v < w:
            q = q * d ** (weight[w - 1] - weight[v - 1])
    return q


def check_semi_invariance(
    setting: Setting,
    tableau: Tableau,
    weight: Sequence[int],
    paths: Mapping[int, Sequence[str]],
    trials: int,
    seed: int,
    field=RATIONALS,
    name: str = "semi-invariance",
) -> Report:
    """Test that the block pfaffian of a path tableau transforms by the
    determinant character: (g . f)(h) = f(g^{-1} . h) must equal q(g) f(h).

    Weights must vanish at symplectic vertices; the character formula does
    not cover them.
    """
    require_valid(setting)
    for v in range(1, setting.vertices + 1):
        if setting.group_of(v) == "Sp" and weight[v - 1] > 0:
            raise SettingError(f"nonzero weight at symplectic vertex {v}")
    if tuple(tableau.columns) != expand_weight(setting.dim, weight):
        raise SettingError("tableau shape does not match the weight expansion")
    mats = [path_matrix(setting, paths[lbl]) for lbl in range(1, tableau.label_count + 1)]
    f = bpf(tableau, mats)
    rng = random.Random(seed)
    check = CheckResult(name=name, trials=trials)
    for trial in range(trials):
        g = sample_group_element(setting, rng, field)
        h = sample_point(setting, rng, field)
        value = f.evaluate(point_assignment(setting, h), field)
        moved = f.evaluate(point_assignment(setting, act(setting, g.inverse(), h)), field)
        expected = semi_invariance_factor(setting, weight, g, field) * value
        if moved != expected:
            check.failures.append(
                {
                    "trial": trial,
                    "witness": {
                        "transformed": str(moved),
                        "character_times_value": str(expected),
                        "g": [_mat_json(m) for m in g.mats],
                    },
                }
            )
    report = Report(field=field.name, seed=seed, trials=trials)
    report.add(check)
    return report


def check_reduction_invariance(setting: Setting, f_reduced: Polynomial, trials: int, seed: int, field=RATIONALS) -> Report:
    """Push an invariant candidate of the reduced setting through the
    reduction substitution and test invariance under the original group."""
    from .quiver import reduce_setting

    derived = reduce_setting(setting)
    pushed = derived.substitution.apply(f_reduced)
    return check_invariance(setting, pushed, trials, seed, field, name="reduction-invariance")


def sample_setting(rng: random.Random, max_pairs: int = 2, max_dim: int = 3) -> Setting:
    """Random valid setting built from dual pairs and self-dual vertices,
    with a few arrows of random legal kinds.  Used by the randomized
    property checks."""
    from .quiver import Arrow, Quiver

    dims: list = []
    groups: list = []
    inv: list = []
    for _ in range(rng.randint(1, max_pairs)):
        if rng.random() < 0.5:
            g = rng.choice(("GL", "SL"))
            n = rng.randint(1, max_dim)
            v = len(dims) + 1
            dims += [n, n]
            groups += [g, g]
            inv += [v + 1, v]
        else:
            g = rng.choice(("O", "SO", "Sp"))
            n = rng.randint(1, max_dim)
            if g == "Sp":
                n = 2
            v = len(dims) + 1
            dims.append(n)
            groups.append(g)
            inv.append(v)
    l = len(dims)
    arrows = []
    for idx in range(rng.randint(1, 3)):
        tail = rng.randint(1, l)
        head = rng.randint(1, l)
        kind = "M"
        if rng.random() < 0.3:
            if tail == head and groups[tail - 1] in ("O", "SO"):
                kind = rng.choice(("S+", "S-"))
            elif tail == head and groups[tail - 1] == "Sp":
                kind = rng.choice(("L+", "L-"))
            elif inv[head - 1] == tail and dims[head - 1] == dims[tail - 1]:
                kind = rng.choice(("S+", "S-"))
        arrows.append(Arrow(name=f"a{idx}", tail=tail, head=head, kind=kind))
    setting = Setting(
        quiver=Quiver(vertices=l, arrows=tuple(arrows)),
        dim=tuple(dims),
        group=tuple(groups),
        involution=tuple(inv),
    )
    require_valid(setting)
    return setting


def sample_path_tableau(setting: Setting, rng: random.Random, max_cells: int = 8, max_path_len: int = 3, attempts: int = 40):
    """Random path tableau for a setting: a weight (zero at symplectic
    vertices), a directed pairing of the induced cells, and one path per
    arrow compatible with the column vertices.  Returns (tableau, weight,
    paths) or None when the setting admits none within the attempt budget."""
    from .quiver import paths_between
    from .tableau import TabArrow

    l = setting.vertices
    for _ in range(attempts):
        weight = [0] * l
        for v in range(1, l + 1):
            if setting.group_of(v) == "Sp":
                continue
            if setting.group_of(v) == "SO" or rng.random() < 0.6:
                weight[v - 1] = rng.randint(0, 1)
            else:
                weight[v - 1] = rng.randint(0, 2)
        columns = expand_weight(setting.dim, weight)
        total = sum(columns)
        if total == 0 or total % 2 or total > max_cells:
            continue
        vertex_of_col = []
        for v in range(1, l + 1):
            vertex_of_col += [v] * weight[v - 1]
        cells = [(c, r) for c, size in enumerate(columns, start=1) for r in range(1, size + 1)]
        path_pool: dict = {}

        def pool(tail_col, head_col):
            key = (tail_col, head_col)
            if key not in path_pool:
                path_pool[key] = paths_between(
                    setting.quiver,
                    setting.inv(vertex_of_col[head_col - 1]),
                    vertex_of_col[tail_col - 1],
                    max_path_len,
                )
            return path_pool[key]

        def match(remaining):
            if not remaining:
                return []
            first = remaining[0]
            rest = remaining[1:]
            order = list(range(len(rest)))
            rng.shuffle(order)
            for idx in order:
                other = rest[idx]
                after = rest[:idx] + rest[idx + 1:]
                directions = [(first, other), (other, first)]
                rng.shuffle(directions)
                for tail, head in directions:
                    if pool(tail[0], head[0]):
                        sub = match(after)
                        if sub is not None:
                            return [(tail, head)] + sub
            return None

        pairing = match(cells)
        if pairing is None:
            continue
        pairing.sort()
        arrows = tuple(TabArrow(tail, head) for tail, head in pairing)
        labels = tuple(range(1, len(arrows) + 1))
        tableau = Tableau(columns=columns, arrows=arrows, labels=labels)
        paths = {
            lbl: rng.choice(pool(a.tail[0], a.head[0]))
            for lbl, a in zip(labels, arrows)
        }
        return tableau, tuple(weight), paths
    return None

"""Tracing compiler front end: record sphere-position kinematics as an op DAG.

Forward kinematics for every collision sphere is traced once per robot into
a TraceGraph of scalar operations (constants, joint inputs, add/sub/mul,
negation, sine, cosine).  Only sphere *positions* are recorded as outputs;
orientation columns that no sphere consumes simply never reach an output
and die in optimization.

The builder is deliberately naive: rotation-matrix composition emits every
product and sum, including multiplications by constant zeros and ones from
axis-aligned joint patterns.  optimize_graph then folds constants, applies
identity rewrites, removes double negations, shares common subexpressions,
and drops dead nodes, which is what shrinks an axis-aligned rotation to its
four essential multiplies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .robot import KinematicTree, SphereModel

# Op kinds.
CONST, INPUT, ADD, SUB, MUL, NEG, SIN, COS = range(8)
KIND_NAMES = ("const", "input", "add", "sub", "mul", "neg", "sin", "cos")

COARSE = "coarse"
FINE = "fine"


class SphereKey(NamedTuple):
    """Identifies one collision sphere of the robot."""

    link: int
    level: str  # COARSE | FINE
    index: int


@dataclass
class TraceGraph:
    """Append-only operation DAG with sphere-position outputs.

    Parallel arrays keep the arena compact: `kinds[i]` is the op kind,
    `a[i]`/`b[i]` operand node ids (-1 when absent), `values[i]` the
    constant payload (inputs store the joint index there).
    """

    dof: int
    kinds: list[int] = field(default_factory=list)
    a: list[int] = field(default_factory=list)
    b: list[int] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    outputs: dict[SphereKey, tuple[int, int, int]] = field(default_factory=dict)
    radii: dict[SphereKey, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.kinds)

    def _node(self, kind: int, a: int = -1, b: int = -1, value: float = 0.0) -> int:
        for operand in (a, b):
            if operand >= len(self.kinds):
                raise ValueError("operand must reference an earlier node")
        self.kinds.append(kind)
        self.a.append(a)
        self.b.append(b)
        self.values.append(value)
        return len(self.kinds) - 1

    def const(self, value: float) -> int:
        return self._node(CONST, value=float(value))

    def input(self, joint: int) -> int:
        if not 0 <= joint < self.dof:
            raise ValueError(f"joint index {joint} out of range for dof {self.dof}")
        return self._node(INPUT, value=float(joint))

    def add(self, x: int, y: int) -> int:
        return self._node(ADD, x, y)

    def sub(self, x: int, y: int) -> int:
        return self._node(SUB, x, y)

    def mul(self, x: int, y: int) -> int:
        return self._node(MUL, x, y)

    def neg(self, x: int) -> int:
        return self._node(NEG, x)

    def sin(self, x: int) -> int:
        return self._node(SIN, x)

    def cos(self, x: int) -> int:
        return self._node(COS, x)


def evaluate_graph(g: TraceGraph, q: np.ndarray) -> dict[SphereKey, np.ndarray]:
    """Evaluate all outputs in double precision.

    `q` is one configuration (dof,) or a batch (n, dof); each output maps to
    a (3,) position or an (n, 3) batch of positions.  This is the graph's
    defining semantics, used to check that optimization preserves meaning.
    """
    qs = np.asarray(q, dtype=np.float64)
    single = qs.ndim == 1
    if single:
        qs = qs[None, :]
    if qs.shape[1] != g.dof:
        raise ValueError(f"configuration dim {qs.shape[1]} != dof {g.dof}")
    n = len(g)
    vals = np.empty((n, qs.shape[0]), dtype=np.float64)
    for i in range(n):
        k = g.kinds[i]
        if k == CONST:
            vals[i] = g.values[i]
        elif k == INPUT:
            vals[i] = qs[:, int(g.values[i])]
        elif k == ADD:
            np.add(vals[g.a[i]], vals[g.b[i]], out=vals[i])
        elif k == SUB:
            np.subtract(vals[g.a[i]], vals[g.b[i]], out=vals[i])
        elif k == MUL:
            np.multiply(vals[g.a[i]], vals[g.b[i]], out=vals[i])
        elif k == NEG:
            np.negative(vals[g.a[i]], out=vals[i])
        elif k == SIN:
            np.sin(vals[g.a[i]], out=vals[i])
        else:
            np.cos(vals[g.a[i]], out=vals[i])
    result = {}
    for key, (ix, iy, iz) in g.outputs.items():
        pos = np.stack([vals[ix], vals[iy], vals[iz]], axis=-1)
        result[key] = pos[0] if single else pos
    return result


def rpy_to_matrix(rpy: np.ndarray) -> np.ndarray:
    """Fixed-axis roll/pitch/yaw to rotation matrix: Rz(yaw) Ry(pitch) Rx(roll)."""
    r, p, y = (float(v) for v in rpy)
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


# --- symbolic 3x3 / 3-vector helpers over node ids ---------------------------

def _const_matrix(g: TraceGraph, m: np.ndarray) -> list[list[int]]:
    return [[g.const(m[i][j]) for j in range(3)] for i in range(3)]


def _const_vec(g: TraceGraph, v: np.ndarray) -> list[int]:
    return [g.const(v[i]) for i in range(3)]


def _mat_mul(g: TraceGraph, ma, mb) -> list[list[int]]:
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            p0 = g.mul(ma[i][0], mb[0][j])
            p1 = g.mul(ma[i][1], mb[1][j])
            p2 = g.mul(ma[i][2], mb[2][j])
            row.append(g.add(g.add(p0, p1), p2))
        out.append(row)
    return out


def _mat_vec(g: TraceGraph, m, v) -> list[int]:
    return [
        g.add(g.add(g.mul(m[i][0], v[0]), g.mul(m[i][1], v[1])), g.mul(m[i][2], v[2]))
        for i in range(3)
    ]


def _vec_add(g: TraceGraph, u, v) -> list[int]:
    return [g.add(u[i], v[i]) for i in range(3)]


def _axis_aligned(axis: np.ndarray) -> tuple[int, float] | None:
    """Return (axis index, sign) when the axis is +-x/y/z within 1e-9."""
    for k in range(3):
        for sign in (1.0, -1.0):
            unit = np.zeros(3)
            unit[k] = sign
            if np.linalg.norm(axis - unit) < 1e-9:
                return k, sign
    return None


def _joint_rotation(g: TraceGraph, axis: np.ndarray, s: int, c: int) -> list[list[int]]:
    """Symbolic rotation about `axis` given sine/cosine nodes of the angle."""
    aligned = _axis_aligned(axis)
    if aligned is not None:
        k, sign = aligned
        sn = s if sign > 0 else g.neg(s)
        one, zero = g.const(1.0), g.const(0.0)
        if k == 0:  # about x
            return [[one, zero, zero], [zero, c, g.neg(sn)], [zero, sn, c]]
        if k == 1:  # about y
            return [[c, zero, sn], [zero, one, zero], [g.neg(sn), zero, c]]
        return [[c, g.neg(sn), zero], [sn, c, zero], [zero, zero, one]]  # about z
    # Rodrigues: R = c I + s K + (1 - c) a a^T, with constant axis terms.
    ax, ay, az = (float(v) for v in axis)
    kmat = np.array([[0.0, -az, ay], [az, 0.0, -ax], [-ay, ax, 0.0]])
    outer = np.outer(axis, axis)
    eye = np.eye(3)
    one_minus_c = g.sub(g.const(1.0), c)
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            term = g.mul(c, g.const(eye[i][j]))
            term = g.add(term, g.mul(s, g.const(kmat[i][j])))
            term = g.add(term, g.mul(one_minus_c, g.const(outer[i][j])))
            row.append(term)
        rows.append(row)
    return rows


def trace_kinematics(tree: KinematicTree, model: SphereModel) -> TraceGraph:
    """Trace world positions of every coarse and fine sphere into a graph."""
    g = TraceGraph(dof=tree.dof)
    world: dict[int, tuple[list[list[int]], list[int]]] = {
        tree.root: (_const_matrix(g, np.eye(3)), _const_vec(g, np.zeros(3)))
    }
    for joint in tree.joints:
        if joint.parent not in world:
            raise ValueError(f"joint {joint.name!r} parent not reachable from root")
        rp, tp = world[joint.parent]
        r1 = _mat_mul(g, rp, _const_matrix(g, rpy_to_matrix(joint.rpy)))
        t1 = _vec_add(g, _mat_vec(g, rp, _const_vec(g, joint.xyz)), tp)
        if joint.kind == "fixed":
            world[joint.child] = (r1, t1)
            continue
        qnode = g.input(joint.input_index)
        if joint.kind == "prismatic":
            disp = [g.mul(g.const(float(v)), qnode) for v in joint.axis]
            world[joint.child] = (r1, _vec_add(g, _mat_vec(g, r1, disp), t1))
        else:  # revolute or continuous
            s, c = g.sin(qnode), g.cos(qnode)
            world[joint.child] = (_mat_mul(g, r1, _joint_rotation(g, joint.axis, s, c)), t1)

    for link, spheres in enumerate(model.fine):
        if not spheres:
            continue
        if link not in world:
            raise ValueError(f"link {tree.links[link]!r} not reachable from root")
        r, t = world[link]
        levels = [(COARSE, [model.coarse[link]]), (FINE, spheres)]
        for level, level_spheres in levels:
            for idx, sphere in enumerate(level_spheres):
                pos = _vec_add(g, _mat_vec(g, r, _const_vec(g, sphere.center)), t)
                key = SphereKey(link=link, level=level, index=idx)
                g.outputs[key] = (pos[0], pos[1], pos[2])
                g.radii[key] = float(sphere.radius)
    return g


def _is_const(g: TraceGraph, i: int, value: float | None = None) -> bool:
    if g.kinds[i] != CONST:
        return False
    return value is None or g.values[i] == value


def optimize_graph(g: TraceGraph) -> TraceGraph:
    """Fold constants, simplify identities, drop double negations, share
    common subexpressions, and eliminate dead nodes.

    Semantics are preserved exactly: every rewrite replaces a node with a
    value-identical one (constant folding happens in double precision, the
    same precision evaluate_graph uses).  Node count never increases and
    the pass is idempotent.
    """
    out = TraceGraph(dof=g.dof)
    interned: dict[tuple, int] = {}

    def emit(kind: int, a: int = -1, b: int = -1, value: float = 0.0) -> int:
        if kind in (ADD, MUL) and a > b:  # commutative: canonical operand order
            a, b = b, a
        key = (kind, a, b, np.float64(value).tobytes())
        found = interned.get(key)
        if found is not None:
            return found
        nid = out._node(kind, a, b, value)
        interned[key] = nid
        return nid

    remap: list[int] = []
    for i in range(len(g)):
        kind = g.kinds[i]
        if kind == CONST:
            remap.append(emit(CONST, value=g.values[i]))
            continue
        if kind == INPUT:
            remap.append(emit(INPUT, value=g.values[i]))
            continue
        a = remap[g.a[i]]
        b = remap[g.b[i]] if g.b[i] >= 0 else -1

        def cval(n: int) -> float:
            return out.values[n]

        aconst = out.kinds[a] == CONST
        bconst = b >= 0 and out.kinds[b] == CONST
        new = None
        if kind == ADD:
            if aconst and bconst:
                new = emit(CONST, value=cval(a) + cval(b))
            elif aconst and cval(a) == 0.0:
                new = b
            elif bconst and cval(b) == 0.0:
                new = a
        elif kind == SUB:
            if aconst and bconst:
                new = emit(CONST, value=cval(a) - cval(b))
            elif bconst and cval(b) == 0.0:
                new = a
            elif aconst and cval(a) == 0.0:
                new = emit(NEG, b)
            elif a == b:
                new = emit(CONST, value=0.0)
        elif kind == MUL:
            if aconst and bconst:
                new = emit(CONST, value=cval(a) * cval(b))
            elif (aconst and cval(a) == 0.0) or (bconst and cval(b) == 0.0):
                new = emit(CONST, value=0.0)
            elif aconst and cval(a) == 1.0:
                new = b
            elif bconst and cval(b) == 1.0:
                new = a
        elif kind == NEG:
            if aconst:
                new = emit(CONST, value=-cval(a))
            elif out.kinds[a] == NEG:
                new = out.a[a]
        elif kind == SIN:
            if aconst:
                new = emit(CONST, value=math.sin(cval(a)))
        elif kind == COS:
            if aconst:
                new = emit(CONST, value=math.cos(cval(a)))
        if new is None:
            new = emit(kind, a, b)
        remap.append(new)

    # Dead-node elimination: keep ancestors of outputs, preserving order.
    live = np.zeros(len(out), dtype=bool)
    stack = [remap[n] for key in g.outputs for n in g.outputs[key]]
    while stack:
        n = stack.pop()
        if live[n]:
            continue
        live[n] = True
        for operand in (out.a[n], out.b[n]):
            if operand >= 0 and not live[operand]:
                stack.append(operand)

    final = TraceGraph(dof=g.dof)
    compact = np.full(len(out), -1, dtype=np.int64)
    for n in range(len(out)):
        if not live[n]:
            continue
        a = int(compact[out.a[n]]) if out.a[n] >= 0 else -1
        b = int(compact[out.b[n]]) if out.b[n] >= 0 else -1
        compact[n] = final._node(out.kinds[n], a, b, out.values[n])
    for key, (ix, iy, iz) in g.outputs.items():
        final.outputs[key] = (
            int(compact[remap[ix]]), int(compact[remap[iy]]), int(compact[remap[iz]]),
        )
    final.radii = dict(g.radii)
    return final

"""Straightline kinematic programs with interleaved collision-check markers.

schedule_program turns an optimized trace graph into a branch-free op list
plus an ordered list of check markers, each placed immediately after the
last op its sphere position depends on.  Greedy placement: markers are
visited link by link from the root (coarse sphere first, then fine), and
for each marker exactly its unemitted dependency closure is appended, in
node creation order.  Ops a sphere does not need therefore never run
before its check, and an early abort wastes almost no kinematics work.

evaluate_program interprets the op list one op at a time but a whole lane
block at a time, streaming each marker's lane-wide sphere centers to a
caller-provided sink that can stop the evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .lanes import ConfigBlock
from .trace import ADD, CONST, COS, FINE, INPUT, KIND_NAMES, MUL, NEG, SIN, SUB
from .trace import SphereKey, TraceGraph


@dataclass(frozen=True)
class CheckMarker:
    """A collision check for one sphere, valid once `position` ops have run."""

    link: int
    level: str
    index: int
    radius: float
    xyz: tuple[int, int, int]  # op positions of the sphere center coordinates
    position: int  # number of ops preceding this marker


@dataclass
class KinematicProgram:
    """Topologically ordered, branch-free op list with check markers."""

    dof: int
    kinds: np.ndarray  # (n,) int8
    a: np.ndarray  # (n,) int32, -1 when absent
    b: np.ndarray
    values: np.ndarray  # (n,) float64 const payloads / input joint indices
    checks: list[CheckMarker]
    outputs: dict[SphereKey, tuple[int, int, int]]

    def __len__(self) -> int:
        return len(self.kinds)

    def dispatch_ops(self) -> tuple[list, list]:
        """Cached interpreter feed: (const fills, dynamic ops).

        Const rows do not depend on the block, so a scratch evaluates them
        once; the dynamic list carries (index, kind, a, b, value) tuples.
        """
        cached = getattr(self, "_dispatch", None)
        if cached is None:
            consts: list[tuple[int, float]] = []
            dynamic: list[tuple[int, int, int, int, float]] = []
            for i in range(len(self.kinds)):
                k = int(self.kinds[i])
                if k == CONST:
                    consts.append((i, float(self.values[i])))
                else:
                    dynamic.append((i, k, int(self.a[i]), int(self.b[i]),
                                    float(self.values[i])))
            cached = (consts, dynamic)
            object.__setattr__(self, "_dispatch", cached)
        return cached


class CheckSink(Protocol):
    def __call__(self, marker: CheckMarker, x: np.ndarray, y: np.ndarray,
                 z: np.ndarray) -> bool: ...


def schedule_program(g: TraceGraph) -> KinematicProgram:
    """Schedule an optimized graph into a straightline program."""
    check_order = sorted(
        g.outputs.keys(),
        key=lambda k: (k.link, 0 if k.level != FINE else 1, k.index),
    )
    n = len(g)
    pos_of = np.full(n, -1, dtype=np.int64)
    kinds: list[int] = []
    ops_a: list[int] = []
    ops_b: list[int] = []
    values: list[float] = []

    def emit_closure(roots: tuple[int, int, int]) -> None:
        stack = [r for r in roots if pos_of[r] < 0]
        need: list[int] = []
        seen = set()
        while stack:
            node = stack.pop()
            if node in seen or pos_of[node] >= 0:
                continue
            seen.add(node)
            need.append(node)
            for operand in (g.a[node], g.b[node]):
                if operand >= 0 and pos_of[operand] < 0:
                    stack.append(operand)
        for node in sorted(need):  # creation order is a topological order
            a = int(pos_of[g.a[node]]) if g.a[node] >= 0 else -1
            b = int(pos_of[g.b[node]]) if g.b[node] >= 0 else -1
            pos_of[node] = len(kinds)
            kinds.append(g.kinds[node])
            ops_a.append(a)
            ops_b.append(b)
            values.append(g.values[node])

    checks: list[CheckMarker] = []
    for key in check_order:
        roots = g.outputs[key]
        emit_closure(roots)
        checks.append(CheckMarker(
            link=key.link, level=key.level, index=key.index,
            radius=g.radii[key],
            xyz=tuple(int(pos_of[r]) for r in roots),
            position=len(kinds),
        ))
    outputs = {
        key: tuple(int(pos_of[r]) for r in roots)
        for key, roots in g.outputs.items()
    }
    return KinematicProgram(
        dof=g.dof,
        kinds=np.asarray(kinds, dtype=np.int8),
        a=np.asarray(ops_a, dtype=np.int32),
        b=np.asarray(ops_b, dtype=np.int32),
        values=np.asarray(values, dtype=np.float64),
        checks=checks,
        outputs=outputs,
    )


@dataclass
class Scratch:
    """Per-thread evaluation workspace, one float32 row per op.

    `owner` records which program's const rows are currently filled in.
    """

    rows: np.ndarray  # (n_ops, width)
    owner: object = None

    @classmethod
    def for_program(cls, program: KinematicProgram, width: int) -> "Scratch":
        return cls(rows=np.empty((len(program), width), dtype=np.float32))


def evaluate_program(
    program: KinematicProgram,
    block: ConfigBlock,
    sink: CheckSink | Callable[..., bool] | None = None,
    scratch: Scratch | None = None,
) -> Scratch:
    """Run the straightline ops lane-wide over a configuration block.

    At each check marker the sink receives the lane-wide x, y, z rows of
    the sphere center (radius on the marker); a True return aborts the
    remaining evaluation.  Returns the scratch so callers can read rows.
    """
    if block.dim != program.dof:
        raise ValueError(f"block dim {block.dim} != program dof {program.dof}")
    if scratch is None or scratch.rows.shape != (len(program), block.width):
        scratch = Scratch.for_program(program, block.width)
    rows = scratch.rows
    consts, dynamic = program.dispatch_ops()
    if scratch.owner is not program:
        for i, value in consts:
            rows[i] = np.float32(value)
        scratch.owner = program
    data = block.data
    checks = program.checks
    n_checks = len(checks)
    ci = 0
    next_check = checks[0].position if n_checks else len(program) + 1
    mul, add, sub, neg = np.multiply, np.add, np.subtract, np.negative
    sin, cos = np.sin, np.cos  # width-consistent float32 kernels, see lanes
    for i, k, ai, bi, value in dynamic:
        # markers positioned at or before this op fire first; any const ops
        # between them were prefilled, so sink inputs are already complete
        while next_check <= i:
            m = checks[ci]
            ci += 1
            next_check = checks[ci].position if ci < n_checks else len(program) + 1
            if sink is not None and sink(m, rows[m.xyz[0]], rows[m.xyz[1]], rows[m.xyz[2]]):
                return scratch
        if k == MUL:
            mul(rows[ai], rows[bi], out=rows[i])
        elif k == ADD:
            add(rows[ai], rows[bi], out=rows[i])
        elif k == SUB:
            sub(rows[ai], rows[bi], out=rows[i])
        elif k == SIN:
            sin(rows[ai], out=rows[i])
        elif k == COS:
            cos(rows[ai], out=rows[i])
        elif k == NEG:
            neg(rows[ai], out=rows[i])
        else:  # INPUT
            rows[i] = data[int(value)]
    while ci < n_checks:
        m = checks[ci]
        ci += 1
        if sink is not None and sink(m, rows[m.xyz[0]], rows[m.xyz[1]], rows[m.xyz[2]]):
            return scratch
    return scratch


def dump_program(program: KinematicProgram) -> str:
    """Stable one-op-per-line listing, suitable for golden-file comparison."""
    lines = [f"program dof={program.dof} ops={len(program)} checks={len(program.checks)}"]
    by_position: dict[int, list[CheckMarker]] = {}
    for m in program.checks:
        by_position.setdefault(m.position, []).append(m)

    def check_lines(pos: int) -> None:
        for m in by_position.get(pos, []):
            lines.append(
                f"  check link={m.link} {m.level}[{m.index}] r={m.radius:.6g} "
                f"pos=(%{m.xyz[0]}, %{m.xyz[1]}, %{m.xyz[2]})"
            )

    for i in range(len(program)):
        check_lines(i)
        k = int(program.kinds[i])
        name = KIND_NAMES[k]
        if k == CONST:
            lines.append(f"  %{i} = const {program.values[i]:.9g}")
        elif k == INPUT:
            lines.append(f"  %{i} = input q{int(program.values[i])}")
        elif k in (NEG, SIN, COS):
            lines.append(f"  %{i} = {name} %{program.a[i]}")
        else:
            lines.append(f"  %{i} = {name} %{program.a[i]} %{program.b[i]}")
    check_lines(len(program))
    return "\n".join(lines) + "\n"

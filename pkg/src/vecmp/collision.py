"""Lane-wide narrowphase collision tests and batch state validation.

Obstacles are geometric primitives (spheres, capsules, oriented cuboids);
cylinders in environment documents are ingested as capsules of the same
axis and radius, a conservative over-approximation that keeps the segment
distance test branch-light.  Boundary contact counts as collision.

validate_block drives the straightline kinematic program over a block and
answers, per lane, whether that configuration is free of environment and
self collisions.  A link's single coarse sphere is checked first; any
obstacle it misses in every lane is skipped for all of that link's fine
spheres (the hierarchy prune), which never changes the verdict because
every fine sphere is contained in its coarse sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import yaml

from .lanes import DEFAULT_WIDTH, Config, ConfigBlock, LaneMask
from .program import CheckMarker, KinematicProgram, Scratch, evaluate_program
from .robot import SelfCollisionPairs, SphereModel
from .trace import COARSE, rpy_to_matrix


class EnvironmentFormatError(ValueError):
    """Raised for malformed environment documents."""


@dataclass(frozen=True)
class SphereObstacle:
    center: np.ndarray  # (3,)
    radius: float


@dataclass(frozen=True)
class CapsuleObstacle:
    p0: np.ndarray  # (3,) segment endpoint
    p1: np.ndarray
    radius: float


@dataclass(frozen=True)
class BoxObstacle:
    center: np.ndarray  # (3,)
    half_extents: np.ndarray  # (3,) > 0
    rotation: np.ndarray  # (3, 3) row-major world-from-box rotation


Primitive = Union[SphereObstacle, CapsuleObstacle, BoxObstacle]


class _PackedEnvironment:
    """Struct-of-arrays obstacle data, grouped by primitive kind.

    Squared hit thresholds per robot-sphere radius are memoized; radii come
    from the sphere model, so only a handful of keys ever exist.
    """

    def __init__(self, primitives: list[Primitive]):
        spheres = [p for p in primitives if isinstance(p, SphereObstacle)]
        capsules = [p for p in primitives if isinstance(p, CapsuleObstacle)]
        boxes = [p for p in primitives if isinstance(p, BoxObstacle)]
        f32 = np.float32
        self.sphere_c = np.asarray([s.center for s in spheres], dtype=f32).reshape(-1, 3)
        self.sphere_r = np.asarray([s.radius for s in spheres], dtype=f32)
        self.cap_p0 = np.asarray([c.p0 for c in capsules], dtype=f32).reshape(-1, 3)
        axes = np.asarray([c.p1 - c.p0 for c in capsules], dtype=np.float64).reshape(-1, 3)
        vv = np.sum(axes * axes, axis=1)
        inv = np.where(vv > 1e-18, 1.0 / np.maximum(vv, 1e-300), 0.0)  # degenerate -> sphere
        self.cap_axis = axes.astype(f32)
        self.cap_inv_vv = inv.astype(f32)
        self.cap_r = np.asarray([c.radius for c in capsules], dtype=f32)
        self.box_c = np.asarray([b.center for b in boxes], dtype=f32).reshape(-1, 3)
        self.box_h = np.asarray([b.half_extents for b in boxes], dtype=f32).reshape(-1, 3)
        self.box_rt = np.asarray([b.rotation.T for b in boxes], dtype=f32).reshape(-1, 3, 3)
        self.box_cols, self.box_hc, self.box_hn = _box_columns(self.box_h, self.box_rt)
        self.counts = (len(spheres), len(capsules), len(boxes))
        self._thr: dict[tuple[int, float], np.ndarray] = {}

    def box_arrays(self, sel=None) -> tuple:
        if sel is None:
            return self.box_c, self.box_cols, self.box_hc, self.box_hn
        return (self.box_c[sel], tuple(c[sel] for c in self.box_cols),
                tuple(c[sel] for c in self.box_hc), tuple(c[sel] for c in self.box_hn))

    def sphere_thr(self, radius: float) -> np.ndarray:
        key = (0, radius)
        thr = self._thr.get(key)
        if thr is None:
            thr = self._thr[key] = (self.sphere_r + np.float32(radius)) ** 2
        return thr

    def capsule_thr(self, radius: float) -> np.ndarray:
        key = (1, radius)
        thr = self._thr.get(key)
        if thr is None:
            thr = self._thr[key] = (self.cap_r + np.float32(radius)) ** 2
        return thr


@dataclass
class Environment:
    """A named list of obstacle primitives (possibly empty)."""

    primitives: list[Primitive] = field(default_factory=list)
    name: str = "env"
    _packed: _PackedEnvironment | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def packed(self) -> _PackedEnvironment:
        if self._packed is None:
            self._packed = _PackedEnvironment(self.primitives)
        return self._packed


def _orthonormal(r: np.ndarray) -> bool:
    return bool(np.allclose(r @ r.T, np.eye(3), atol=1e-5))


def _vec(entry, key: str) -> np.ndarray:
    v = np.asarray(entry[key], dtype=np.float64).reshape(-1)
    if v.shape != (3,):
        raise EnvironmentFormatError(f"{key} must be a 3-vector")
    return v


def parse_environment(doc: dict) -> Environment:
    """Build an Environment from a parsed document mapping."""
    if not isinstance(doc, dict):
        raise EnvironmentFormatError("environment document must be a mapping")
    name = str(doc.get("name", "env"))
    prims: list[Primitive] = []
    for entry in doc.get("primitives", []) or []:
        kind = entry.get("kind")
        try:
            if kind == "sphere":
                radius = float(entry["radius"])
                if radius <= 0:
                    raise EnvironmentFormatError("sphere radius must be > 0")
                prims.append(SphereObstacle(center=_vec(entry, "center"), radius=radius))
            elif kind in ("capsule", "cylinder"):
                # Cylinders become capsules: same axis and radius, rounded caps.
                radius = float(entry["radius"])
                if radius <= 0:
                    raise EnvironmentFormatError(f"{kind} radius must be > 0")
                prims.append(CapsuleObstacle(
                    p0=_vec(entry, "p0"), p1=_vec(entry, "p1"), radius=radius))
            elif kind == "cuboid":
                half = _vec(entry, "half_extents")
                if np.any(half <= 0):
                    raise EnvironmentFormatError("cuboid half extents must be > 0")
                if "rotation" in entry:
                    rot = np.asarray(entry["rotation"], dtype=np.float64).reshape(3, 3)
                else:
                    rot = rpy_to_matrix(_vec(entry, "rpy") if "rpy" in entry
                                        else np.zeros(3))
                if not _orthonormal(rot):
                    raise EnvironmentFormatError("cuboid rotation is not orthonormal")
                prims.append(BoxObstacle(center=_vec(entry, "center"),
                                         half_extents=half, rotation=rot))
            else:
                raise EnvironmentFormatError(f"unknown primitive kind {kind!r}")
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, EnvironmentFormatError):
                raise
            raise EnvironmentFormatError(f"bad {kind} primitive: {e}") from e
    return Environment(primitives=prims, name=name)


def load_environment(text: str) -> Environment:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise EnvironmentFormatError(f"malformed environment document: {e}") from e
    return parse_environment(doc or {})


def environment_to_doc(env: Environment) -> dict:
    """Inverse of parse_environment, for writing problem sets back out."""
    prims = []
    for p in env.primitives:
        if isinstance(p, SphereObstacle):
            prims.append({"kind": "sphere", "center": [float(v) for v in p.center],
                          "radius": float(p.radius)})
        elif isinstance(p, CapsuleObstacle):
            prims.append({"kind": "capsule", "p0": [float(v) for v in p.p0],
                          "p1": [float(v) for v in p.p1], "radius": float(p.radius)})
        else:
            prims.append({"kind": "cuboid", "center": [float(v) for v in p.center],
                          "half_extents": [float(v) for v in p.half_extents],
                          "rotation": [[float(v) for v in row] for row in p.rotation]})
    return {"name": env.name, "primitives": prims}


# --- lane-wide hit tests ------------------------------------------------------
# Lane positions arrive as a (3, W) float32 buffer; obstacles broadcast along
# a leading K axis.  All math uses exactly rounded IEEE operations (add, sub,
# mul, min, max), so per-lane results are independent of the lane width.

def _hit_spheres(c: np.ndarray, thr: np.ndarray, pos: np.ndarray) -> np.ndarray:
    d = c[:, :, None] - pos[None, :, :]  # (K, 3, W)
    np.multiply(d, d, out=d)
    d2 = d[:, 0] + d[:, 1]
    d2 += d[:, 2]
    return d2 <= thr[:, None]


def _hit_capsules(p0, axis, inv_vv, thr, pos) -> np.ndarray:
    d = pos[None, :, :] - p0[:, :, None]  # (K, 3, W)
    t = d[:, 0] * axis[:, 0, None]
    t += d[:, 1] * axis[:, 1, None]
    t += d[:, 2] * axis[:, 2, None]
    t *= inv_vv[:, None]
    np.minimum(t, np.float32(1.0), out=t)
    np.maximum(t, np.float32(0.0), out=t)
    d -= t[:, None, :] * axis[:, :, None]
    np.multiply(d, d, out=d)
    d2 = d[:, 0] + d[:, 1]
    d2 += d[:, 2]
    return d2 <= thr[:, None]


def _box_columns(h: np.ndarray, rt: np.ndarray) -> tuple[tuple, tuple, tuple]:
    """Contiguous (K, 1) column views of box frames, ready to broadcast."""
    cols = tuple(np.ascontiguousarray(rt[:, i, j])[:, None]
                 for i in range(3) for j in range(3))
    hc = tuple(np.ascontiguousarray(h[:, i])[:, None] for i in range(3))
    hn = tuple(-c for c in hc)
    return cols, hc, hn


def _hit_boxes(c, cols, hc, hn, pos, radius: float) -> np.ndarray:
    d = pos[None, :, :] - c[:, :, None]  # (K, 3, W)
    d0, d1, d2 = d[:, 0], d[:, 1], d[:, 2]
    acc = None
    for i in range(3):
        local = cols[3 * i] * d0
        local += cols[3 * i + 1] * d1
        local += cols[3 * i + 2] * d2
        clamped = np.minimum(local, hc[i])
        np.maximum(clamped, hn[i], out=clamped)
        local -= clamped
        np.multiply(local, local, out=local)
        if acc is None:
            acc = local
        else:
            acc += local
    return acc <= np.float32(radius) ** 2


def _pos_buffer(cx, cy, cz) -> np.ndarray:
    pos = np.empty((3, np.size(cx)), dtype=np.float32)
    pos[0], pos[1], pos[2] = cx, cy, cz
    return pos


def sphere_vs_sphere_lanes(cx, cy, cz, r: float, obstacle: SphereObstacle) -> LaneMask:
    """Per-lane sphere intersection; a set bit means collision."""
    c = np.asarray([obstacle.center], dtype=np.float32)
    thr = (np.asarray([obstacle.radius], np.float32) + np.float32(r)) ** 2
    return _hit_spheres(c, thr, _pos_buffer(cx, cy, cz))[0]


def sphere_vs_capsule_lanes(cx, cy, cz, r: float, obstacle: CapsuleObstacle) -> LaneMask:
    """Per-lane sphere vs capsule; degenerate capsules behave as spheres."""
    axis = np.asarray(obstacle.p1, np.float64) - np.asarray(obstacle.p0, np.float64)
    vv = float(axis @ axis)
    inv = np.asarray([1.0 / vv if vv > 1e-18 else 0.0], dtype=np.float32)
    thr = (np.asarray([obstacle.radius], np.float32) + np.float32(r)) ** 2
    return _hit_capsules(np.asarray([obstacle.p0], np.float32),
                         np.asarray([axis], np.float32), inv, thr,
                         _pos_buffer(cx, cy, cz))[0]


def sphere_vs_cuboid_lanes(cx, cy, cz, r: float, obstacle: BoxObstacle) -> LaneMask:
    """Per-lane sphere vs oriented box (rotate into box frame, clamp per axis)."""
    cols, hc, hn = _box_columns(
        np.asarray([obstacle.half_extents], np.float32),
        np.asarray([obstacle.rotation.T], np.float32))
    return _hit_boxes(np.asarray([obstacle.center], np.float32), cols, hc, hn,
                      _pos_buffer(cx, cy, cz), r)[0]


_ALL = (None, None, None)  # no per-group obstacle subsetting


class BlockValidator:
    """Check sink accumulating per-lane validity over one program evaluation.

    Evaluation aborts as soon as every lane is invalid (or, in reject-all
    mode, as soon as any lane is).  Coarse markers never change verdicts;
    with pruning enabled they select which obstacles the link's fine
    spheres still have to test.  reset() rearms the sink for the next
    block, keeping its buffers.
    """

    def __init__(self, packed: _PackedEnvironment, pairs: SelfCollisionPairs,
                 width: int, prune: bool = True, reject_all: bool = False):
        self.packed = packed
        self.width = width
        self.prune = prune
        self.reject_all = reject_all
        self.valid = np.ones(width, dtype=bool)
        self._pos = np.empty((3, width), dtype=np.float32)
        self._active: dict[int, tuple] = {}
        self._fine_seen: dict[int, list] = {}
        self._partners: dict[int, list[int]] = {}
        for a, b in pairs.pairs:
            lo, hi = (a, b) if a < b else (b, a)
            self._partners.setdefault(hi, []).append(lo)
        for partners in self._partners.values():
            partners.sort()

    def reset(self, prune: bool | None = None, reject_all: bool | None = None) -> None:
        if prune is not None:
            self.prune = prune
        if reject_all is not None:
            self.reject_all = reject_all
        self.valid[:] = True
        self._active.clear()
        self._fine_seen.clear()

    def _env_hits(self, pos, radius: float, select) -> np.ndarray | None:
        pk = self.packed
        sel_s, sel_c, sel_b = select
        collide = None

        def merge(mask):
            nonlocal collide
            any_hit = mask.any(axis=0)
            collide = any_hit if collide is None else (collide | any_hit)

        if len(pk.sphere_r):
            if sel_s is None:
                merge(_hit_spheres(pk.sphere_c, pk.sphere_thr(radius), pos))
            elif len(sel_s):
                merge(_hit_spheres(pk.sphere_c[sel_s], pk.sphere_thr(radius)[sel_s], pos))
        if len(pk.cap_r):
            if sel_c is None:
                merge(_hit_capsules(pk.cap_p0, pk.cap_axis, pk.cap_inv_vv,
                                    pk.capsule_thr(radius), pos))
            elif len(sel_c):
                merge(_hit_capsules(pk.cap_p0[sel_c], pk.cap_axis[sel_c],
                                    pk.cap_inv_vv[sel_c], pk.capsule_thr(radius)[sel_c],
                                    pos))
        if len(pk.box_h) and (sel_b is None or len(sel_b)):
            merge(_hit_boxes(*pk.box_arrays(sel_b), pos, radius))
        return collide

    def __call__(self, marker: CheckMarker, x, y, z) -> bool:
        pos = self._pos
        pos[0], pos[1], pos[2] = x, y, z
        if marker.level == COARSE:
            if self.prune:
                pk = self.packed
                r = marker.radius
                active = []
                for hits in (
                    _hit_spheres(pk.sphere_c, pk.sphere_thr(r), pos)
                    if len(pk.sphere_r) else None,
                    _hit_capsules(pk.cap_p0, pk.cap_axis, pk.cap_inv_vv,
                                  pk.capsule_thr(r), pos) if len(pk.cap_r) else None,
                    _hit_boxes(*pk.box_arrays(), pos, r) if len(pk.box_h) else None,
                ):
                    if hits is None:
                        active.append(None)
                        continue
                    lane_any = hits.any(axis=1)
                    # everything still active: keep full arrays, no index copies
                    active.append(None if lane_any.all() else np.flatnonzero(lane_any))
                self._active[marker.link] = tuple(active)
            return False
        select = self._active.get(marker.link, _ALL) if self.prune else _ALL
        collide = self._env_hits(pos, marker.radius, select)
        changed = False
        if collide is not None and collide.any():
            self.valid &= ~collide
            changed = True
        partners = self._partners.get(marker.link)
        if partners:
            for partner in partners:
                for px, py, pz, pr in self._fine_seen.get(partner, ()):
                    dx, dy, dz = x - px, y - py, z - pz
                    thr = np.float32(marker.radius + pr) ** 2
                    clear = dx * dx + dy * dy + dz * dz > thr
                    if not clear.all():
                        self.valid &= clear
                        changed = True
        if self._partners:
            # scratch rows are written once per evaluation, so views are stable
            self._fine_seen.setdefault(marker.link, []).append(
                (x, y, z, marker.radius))
        if not changed:
            return False
        if self.reject_all and not self.valid.all():
            return True
        return not self.valid.any()

    def result(self) -> LaneMask:
        if self.reject_all and not self.valid.all():
            return np.zeros(self.width, dtype=bool)
        return self.valid.copy()


def validate_block(
    program: KinematicProgram,
    model: SphereModel,
    pairs: SelfCollisionPairs,
    env: Environment,
    block: ConfigBlock,
    *,
    prune: bool = True,
    reject_all: bool = False,
    scratch: Scratch | None = None,
    sink: BlockValidator | None = None,
) -> LaneMask:
    """Per-lane validity of a configuration block; a set bit means VALID."""
    if sink is None:
        sink = BlockValidator(env.packed(), pairs, block.width,
                              prune=prune, reject_all=reject_all)
    else:
        sink.reset(prune=prune, reject_all=reject_all)
    evaluate_program(program, block, sink, scratch)
    return sink.result()


@dataclass
class ValidationContext:
    """Everything needed to validate states and motions in one environment.

    Holds a reusable scratch and check sink sized to the program, so a
    context must not be shared between threads; counters record how much
    validation work ran.
    """

    program: KinematicProgram
    model: SphereModel
    pairs: SelfCollisionPairs
    env: Environment
    width: int = DEFAULT_WIDTH
    prune: bool = True

    def __post_init__(self) -> None:
        self._scratch = Scratch.for_program(self.program, self.width)
        self._sink = BlockValidator(self.env.packed(), self.pairs, self.width,
                                    prune=self.prune)
        self.blocks_evaluated = 0
        self.motion_checks = 0

    def validate_block(self, block: ConfigBlock, reject_all: bool = False) -> LaneMask:
        self.blocks_evaluated += 1
        return validate_block(self.program, self.model, self.pairs, self.env, block,
                              prune=self.prune, reject_all=reject_all,
                              scratch=self._scratch, sink=self._sink)

    def state_valid(self, q: Config) -> bool:
        data = np.repeat(np.asarray(q, np.float32).reshape(-1, 1), self.width, axis=1)
        block = ConfigBlock(dim=data.shape[0], width=self.width, data=data, valid_count=1)
        return bool(self.validate_block(block)[0])

"""Parameter blocks of the embedding + Q-network, and their checkpoint format.

Checkpoint layout (little-endian, byte-exact):

    offset  size  field
    0       4     magic ``b"RBQ1"``
    4       4     uint32 format version (currently 1)
    8       4     uint32 p (embedding dimension)
    12      4     uint32 h (hidden width)
    16      4     uint32 t_embed (embedding iterations)
    20      4     uint32 flags: bit0 theta2 sums over all nodes (else partial
                  neighbors), bit1 theta3 sums over all nodes (else partial),
                  bits 2-3 latency normalization (0 none, 1 matrix
                  off-diagonal mean, 2 mean row sum)
    24      ...   ten float64 blocks, row-major, in order theta1..theta10 with
                  shapes (), (p,p), (p,p), (p,), (p,p), (p,p), (p,p),
                  (h,3p+1), (h,h), (h,)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..rng import make_rng

__all__ = ["EmbedParams", "QModel", "CheckpointFormatError", "save_model", "load_model"]

_MAGIC = b"RBQ1"
_VERSION = 1

_FLAG_T2_ALL = 1
_FLAG_T3_ALL = 2
_NORM_MODES = ("none", "offdiag_mean", "rowsum_mean")  # header bits 2-3


class CheckpointFormatError(ValueError):
    """Raised when a checkpoint file cannot be parsed or has wrong dimensions."""


def _block_shapes(p: int, h: int) -> dict[str, tuple[int, ...]]:
    return {
        "theta1": (),
        "theta2": (p, p),
        "theta3": (p, p),
        "theta4": (p,),
        "theta5": (p, p),
        "theta6": (p, p),
        "theta7": (p, p),
        "theta8": (h, 3 * p + 1),
        "theta9": (h, h),
        "theta10": (h,),
    }


BLOCK_NAMES = tuple(_block_shapes(1, 1))


@dataclass(eq=False)
class EmbedParams:
    """The ten trainable blocks; shapes fixed by (p, h)."""

    theta1: np.ndarray
    theta2: np.ndarray
    theta3: np.ndarray
    theta4: np.ndarray
    theta5: np.ndarray
    theta6: np.ndarray
    theta7: np.ndarray
    theta8: np.ndarray
    theta9: np.ndarray
    theta10: np.ndarray

    def __post_init__(self):
        for name in BLOCK_NAMES:
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        shapes = _block_shapes(self.p, self.h)
        for name, shape in shapes.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def p(self) -> int:
        return self.theta4.shape[0]

    @property
    def h(self) -> int:
        return self.theta10.shape[0]

    def blocks(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in BLOCK_NAMES}

    def copy(self) -> "EmbedParams":
        return EmbedParams(**{k: v.copy() for k, v in self.blocks().items()})

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.blocks().items()}

    def sgd_step(self, grads: dict[str, np.ndarray], lr: float) -> None:
        for name, g in grads.items():
            getattr(self, name)[...] -= lr * g

    @classmethod
    def init_random(cls, p: int, h: int, seed: int) -> "EmbedParams":
        """Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per block.

        theta2 and theta5 consume *summed* embeddings (over neighbors and
        over all nodes); their bounds carry an extra 1/4 damping so the
        recurrent embedding iteration and the global aggregate stay O(1) at
        initialization instead of compounding across iterations.
        """
        rng = make_rng(seed)
        fan_in = {
            "theta1": 1,
            "theta2": p,
            "theta3": p,
            "theta4": 1,
            "theta5": p,
            "theta6": p,
            "theta7": p,
            "theta8": 3 * p + 1,
            "theta9": h,
            "theta10": h,
        }
        damping = {"theta2": 0.25, "theta5": 0.25}
        blocks = {}
        for name, shape in _block_shapes(p, h).items():
            bound = damping.get(name, 1.0) / np.sqrt(fan_in[name])
            blocks[name] = rng.uniform(-bound, bound, size=shape)
        return cls(**blocks)

    @classmethod
    def zeros(cls, p: int, h: int) -> "EmbedParams":
        return cls(**{k: np.zeros(s) for k, s in _block_shapes(p, h).items()})


@dataclass(eq=False)
class QModel:
    """Parameters plus the evaluation conventions they were trained under."""

    params: EmbedParams
    t_embed: int = 4
    theta2_scope: str = "partial"  # neighbor sum over partial-solution edges
    theta3_scope: str = "all"  # latency-feature sum over all other nodes
    latency_norm: str = "rowsum_mean"  # or "offdiag_mean" / "none"

    def __post_init__(self):
        if self.t_embed < 1:
            raise ValueError(f"t_embed must be >= 1, got {self.t_embed}")
        for scope in (self.theta2_scope, self.theta3_scope):
            if scope not in ("partial", "all"):
                raise ValueError(f"scope must be 'partial' or 'all', got {scope!r}")
        if self.latency_norm not in _NORM_MODES:
            raise ValueError(f"unknown latency_norm {self.latency_norm!r}")

    def copy(self) -> "QModel":
        return replace(self, params=self.params.copy())


def save_model(model: QModel, path: str | Path) -> None:
    flags = 0
    if model.theta2_scope == "all":
        flags |= _FLAG_T2_ALL
    if model.theta3_scope == "all":
        flags |= _FLAG_T3_ALL
    flags |= _NORM_MODES.index(model.latency_norm) << 2
    p, h = model.params.p, model.params.h
    header = _MAGIC + struct.pack("<5I", _VERSION, p, h, model.t_embed, flags)
    payload = b"".join(
        np.ascontiguousarray(block, dtype="<f8").tobytes()
        for block in model.params.blocks().values()
    )
    Path(path).write_bytes(header + payload)


def load_model(path: str | Path) -> QModel:
    raw = Path(path).read_bytes()
    if len(raw) < 24 or raw[:4] != _MAGIC:
        raise CheckpointFormatError(f"{path}: not a ringbench checkpoint")
    version, p, h, t_embed, flags = struct.unpack("<5I", raw[4:24])
    if version != _VERSION:
        raise CheckpointFormatError(
            f"{path}: format version {version}, expected {_VERSION}"
        )
    shapes = _block_shapes(p, h)
    expected = 24 + sum(int(np.prod(s, dtype=np.int64)) for s in shapes.values()) * 8
    if len(raw) != expected:
        raise CheckpointFormatError(
            f"{path}: payload is {len(raw)} bytes, expected {expected} "
            f"for p={p}, h={h}"
        )
    offset = 24
    blocks = {}
    for name, shape in shapes.items():
        count = int(np.prod(shape, dtype=np.int64))
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
        blocks[name] = arr.reshape(shape).astype(np.float64)
        offset += count * 8
    norm_bits = (flags >> 2) & 0b11
    if norm_bits >= len(_NORM_MODES):
        raise CheckpointFormatError(f"{path}: unknown normalization code {norm_bits}")
    return QModel(
        params=EmbedParams(**blocks),
        t_embed=t_embed,
        theta2_scope="all" if flags & _FLAG_T2_ALL else "partial",
        theta3_scope="all" if flags & _FLAG_T3_ALL else "partial",
        latency_norm=_NORM_MODES[norm_bits],
    )

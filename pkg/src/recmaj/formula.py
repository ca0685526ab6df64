"""Recursive 3-majority formulas, hard inputs, and randomized encodings.

The function of height h is the read-once formula on 3^h variables given by
a complete ternary tree of majority gates.  Leaves are numbered 1..3^h left
to right.  An input is *hard* when at every internal node the three child
values are not all identical; equivalently, exactly one child (the minority
child) disagrees with its parent.  Hard inputs carry two distinguished
structures this package leans on everywhere:

* the minority path: root -> disagreeing child -> ... -> leaf m(x), along
  which node values strictly alternate;
* the sensitive bits: the 2^h leaves whose flip flips the root, i.e. the
  leaves whose entire root path carries one value.

The encoding machinery embeds a hard input of height h-k into a uniformly
random hard input of height h, one gadget level at a time.  A source bit y
with gadget symbol (b, s) becomes one of

    s=1: y b (1-b)      s=2: (1-b) y b      s=3: b (1-b) y

so the majority of the triple is always y and the triple is never constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

import numpy as np

MAX_HEIGHT = 18

#: alphabet of one gadget symbol: a fixed bit and the slot of the source bit
GADGET_SLOTS = (1, 2, 3)


class HeightLimitError(ValueError):
    """Raised when a requested height exceeds MAX_HEIGHT (3^18 leaves)."""


def check_height(h: int) -> int:
    if h < 0:
        raise ValueError(f"height must be non-negative, got {h}")
    if h > MAX_HEIGHT:
        raise HeightLimitError(
            f"height {h} exceeds the supported maximum {MAX_HEIGHT} "
            f"(3^{MAX_HEIGHT} = {3 ** MAX_HEIGHT} leaves)")
    return h


RngLike = Union[np.random.Generator, int, None]


def make_rng(seed: RngLike, *stream: int) -> np.random.Generator:
    """Named, reproducible generator.  `stream` tags derive independent
    substreams from one root seed (used for per-trial randomness)."""
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError("cannot derive a substream from a live generator")
        return seed
    entropy = 0 if seed is None else int(seed)
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=stream))


@dataclass(frozen=True)
class TreeAddr:
    """Node address: child indices (0-based) on the path from the root."""

    path: tuple[int, ...] = ()

    def __post_init__(self):
        if any(c not in (0, 1, 2) for c in self.path):
            raise ValueError(f"child indices must be 0..2: {self.path}")

    @property
    def depth(self) -> int:
        return len(self.path)

    def child(self, i: int) -> "TreeAddr":
        return TreeAddr(self.path + (i,))

    def parent(self) -> "TreeAddr":
        if not self.path:
            raise ValueError("root has no parent")
        return TreeAddr(self.path[:-1])

    def node_index(self) -> int:
        """Index of this node within its depth level, 0-based left to right."""
        i = 0
        for c in self.path:
            i = 3 * i + c
        return i

    def leaf_span(self, height: int) -> tuple[int, int]:
        """1-based half-open range of leaves below this node in a height-h tree."""
        if self.depth > height:
            raise ValueError(f"depth {self.depth} exceeds height {height}")
        width = 3 ** (height - self.depth)
        lo = self.node_index() * width
        return lo + 1, lo + width + 1


ROOT = TreeAddr()


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0/1")
    return arr


def _majority_reduce(level: np.ndarray) -> np.ndarray:
    return (level.reshape(-1, 3).sum(axis=1, dtype=np.int64) >= 2).astype(np.uint8)


class Input:
    """Assignment to the 3^h leaves; bits packed as a read-only uint8 vector."""

    __slots__ = ("height", "bits", "__dict__")

    def __init__(self, height: int, bits):
        check_height(height)
        arr = _as_bits(bits)
        if arr.size != 3 ** height:
            raise ValueError(f"expected {3 ** height} bits for height {height}, "
                             f"got {arr.size}")
        arr = arr.copy()
        arr.flags.writeable = False
        self.height = height
        self.bits = arr

    @classmethod
    def from_string(cls, text: str) -> "Input":
        text = text.strip()
        n = len(text)
        h = 0
        while 3 ** h < n:
            h += 1
        if 3 ** h != n:
            raise ValueError(f"bit string length {n} is not a power of 3")
        if set(text) - {"0", "1"}:
            raise ValueError("bit string must be over {0,1}")
        return cls(h, [int(c) for c in text])

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @cached_property
    def level_values(self) -> list[np.ndarray]:
        """Node values per depth, levels[d] has 3^d entries; levels[h] = bits."""
        levels = [self.bits]
        for _ in range(self.height):
            levels.append(_majority_reduce(levels[-1]))
        levels.reverse()
        return levels

    @property
    def value(self) -> int:
        return int(self.level_values[0][0])

    def value_at(self, addr: TreeAddr) -> int:
        if addr.depth > self.height:
            raise ValueError("address below the leaves")
        return int(self.level_values[addr.depth][addr.node_index()])

    def leaf(self, index: int) -> int:
        """1-based leaf access."""
        if not 1 <= index <= self.bits.size:
            raise ValueError(f"leaf index {index} out of range")
        return int(self.bits[index - 1])

    def is_hard(self) -> bool:
        level = self.bits
        for _ in range(self.height):
            sums = level.reshape(-1, 3).sum(axis=1, dtype=np.int64)
            if ((sums == 0) | (sums == 3)).any():
                return False
            level = (sums >= 2).astype(np.uint8)
        return True

    def __eq__(self, other):
        return (isinstance(other, Input) and self.height == other.height
                and bool((self.bits == other.bits).all()))

    def __hash__(self):
        return hash((self.height, self.bits.tobytes()))

    def __repr__(self):
        s = self.to_string()
        if len(s) > 30:
            s = s[:27] + "..."
        return f"Input(h={self.height}, {s})"


def eval_input(input: Input, addr: TreeAddr = ROOT) -> int:
    """Value of the formula, or of the subformula rooted at `addr`."""
    return input.value_at(addr)


def is_hard(input: Input) -> bool:
    return input.is_hard()


class NotHardError(ValueError):
    """Raised when an operation requires a hard input."""


class HardInput:
    """A hard input together with its minority path and absolute minority."""

    __slots__ = ("input", "__dict__")

    def __init__(self, input: Input):
        if not input.is_hard():
            raise NotHardError("input is not hard: some node has three equal children")
        self.input = input

    @property
    def height(self) -> int:
        return self.input.height

    @property
    def root_value(self) -> int:
        return self.input.value

    @cached_property
    def minority_path(self) -> tuple[TreeAddr, ...]:
        """Addresses from the root to the absolute minority; values alternate."""
        levels = self.input.level_values
        addr = ROOT
        path = [addr]
        for d in range(self.height):
            v = levels[d][addr.node_index()]
            kids = levels[d + 1][3 * addr.node_index(): 3 * addr.node_index() + 3]
            disagree = np.flatnonzero(kids != v)
            assert disagree.size == 1, "hard input must have a unique minority child"
            addr = addr.child(int(disagree[0]))
            path.append(addr)
        return tuple(path)

    @cached_property
    def absolute_minority(self) -> int:
        """1-based index of the leaf ending the minority path."""
        return self.minority_path[-1].node_index() + 1

    @cached_property
    def sensitive_bits(self) -> frozenset[int]:
        """1-based leaves whose flip flips the root: all path nodes share the
        root value, so there are exactly 2^h of them."""
        levels = self.input.level_values
        root = self.root_value
        found: list[int] = []
        stack = [ROOT]
        while stack:
            addr = stack.pop()
            if addr.depth == self.height:
                found.append(addr.node_index() + 1)
                continue
            base = 3 * addr.node_index()
            kids = levels[addr.depth + 1][base: base + 3]
            for i in range(3):
                if kids[i] == root:
                    stack.append(addr.child(i))
        return frozenset(found)

    def to_text(self) -> str:
        return (f"h={self.height} root={self.root_value} m={self.absolute_minority}\n"
                f"{self.input.to_string()}\n")

    @classmethod
    def from_text(cls, text: str) -> "HardInput":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if len(lines) != 2 or not lines[0].startswith("h="):
            raise ValueError("expected a header line and a bits line")
        fields = dict(part.split("=", 1) for part in lines[0].split())
        hard = cls(Input.from_string(lines[1]))
        if int(fields["h"]) != hard.height:
            raise ValueError("header height does not match bits")
        if int(fields["root"]) != hard.root_value:
            raise ValueError("header root value does not match bits")
        if int(fields["m"]) != hard.absolute_minority:
            raise ValueError("header minority does not match bits")
        return hard

    def __eq__(self, other):
        return isinstance(other, HardInput) and self.input == other.input

    def __hash__(self):
        return hash(("hard", self.input))

    def __repr__(self):
        return f"HardInput(h={self.height}, root={self.root_value}, m={self.absolute_minority})"


def minority_path(x: HardInput) -> tuple[tuple[TreeAddr, ...], int]:
    """The alternating disagreement path and its terminal leaf (1-based)."""
    return x.minority_path, x.absolute_minority


def sensitive_bits(x: HardInput) -> frozenset[int]:
    return x.sensitive_bits


# ---------------------------------------------------------------------------
# Hard-input sampling: fix the root value, then choose the minority-child
# position uniformly at every internal node.  Both root classes have equal
# size 3^((3^h-1)/2), so this is the uniform distribution over hard inputs.
# ---------------------------------------------------------------------------

def hard_count(h: int, root_value: Optional[int] = None) -> int:
    """|H_h| (or |H_h^b|): each internal node independently picks its
    minority child, so one root class has 3^((3^h-1)/2) members."""
    per_class = 3 ** ((3 ** h - 1) // 2)
    return per_class if root_value is not None else 2 * per_class


def sample_hard_bits(h: int, count: int, root_values: np.ndarray,
                     rng: np.random.Generator) -> np.ndarray:
    """Batched sampler returning a (count, 3^h) uint8 array of leaf bits."""
    vals = np.asarray(root_values, dtype=np.uint8).reshape(count, 1)
    for d in range(h):
        n = 3 ** d
        kids = np.repeat(vals, 3, axis=1)
        minor = rng.integers(0, 3, size=(count, n))
        cols = 3 * np.arange(n) + minor
        rows = np.arange(count)[:, None]
        kids[rows, cols] = 1 - vals
        vals = kids
    return vals


def sample_hard(h: int, root_value: Optional[int] = None,
                rng: RngLike = None) -> HardInput:
    """Uniform sample from the hard inputs of height h (or from one root class)."""
    check_height(h)
    gen = make_rng(rng)
    if root_value is None:
        root_value = int(gen.integers(0, 2))
    elif root_value not in (0, 1):
        raise ValueError("root_value must be 0 or 1")
    bits = sample_hard_bits(h, 1, np.array([root_value]), gen)[0]
    return HardInput(Input(h, bits))


def enumerate_hard(h: int, root_value: Optional[int] = None) -> Iterator[HardInput]:
    """All hard inputs of height h <= 3, by minority-position enumeration."""
    if h > 3:
        raise ValueError("exhaustive enumeration supported for h <= 3 only")
    internal = (3 ** h - 1) // 2
    roots = (0, 1) if root_value is None else (root_value,)
    for r in roots:
        for code in range(3 ** internal):
            vals = np.array([r], dtype=np.uint8)
            c = code
            for d in range(h):
                n = 3 ** d
                kids = np.repeat(vals, 3)
                for j in range(n):
                    kids[3 * j + c % 3] = 1 - vals[j]
                    c //= 3
                vals = kids
            yield HardInput(Input(h, vals))


# ---------------------------------------------------------------------------
# Uniform k-level encodings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EncodingRandomness:
    """Randomness of a k-level encoding into height h.

    levels[0] is applied first (3^(h-k) gadget symbols, lifting the source
    by one level); levels[k-1] is applied last (3^(h-1) symbols).  Each
    symbol is a pair (fixed bit, slot in 1..3).
    """

    h: int
    k: int
    levels: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        if not 1 <= self.k <= self.h:
            raise ValueError(f"need 1 <= k <= h, got k={self.k}, h={self.h}")
        if len(self.levels) != self.k:
            raise ValueError(f"expected {self.k} levels, got {len(self.levels)}")
        for i, level in enumerate(self.levels):
            want = 3 ** (self.h - self.k + i)
            if len(level) != want:
                raise ValueError(f"level {i} must have {want} symbols, "
                                 f"got {len(level)}")
            for b, s in level:
                if b not in (0, 1) or s not in GADGET_SLOTS:
                    raise ValueError(f"bad gadget symbol {(b, s)}")

    @classmethod
    def sample(cls, h: int, k: int, rng: RngLike = None) -> "EncodingRandomness":
        gen = make_rng(rng)
        levels = []
        for i in range(k):
            n = 3 ** (h - k + i)
            bs = gen.integers(0, 2, size=n)
            ss = gen.integers(1, 4, size=n)
            levels.append(tuple((int(b), int(s)) for b, s in zip(bs, ss)))
        return cls(h, k, tuple(levels))


def _gadget_level(cur: np.ndarray, bvec: np.ndarray, svec: np.ndarray) -> np.ndarray:
    """Batched one-level gadget: cur is (batch, m); returns (batch, 3m)."""
    batch, m = cur.shape
    out = np.empty((batch, 3 * m), dtype=np.uint8)
    nb = 1 - bvec
    out[:, 0::3] = np.where(svec == 1, cur, np.where(svec == 2, nb, bvec))
    out[:, 1::3] = np.where(svec == 1, bvec, np.where(svec == 2, cur, nb))
    out[:, 2::3] = np.where(svec == 1, nb, np.where(svec == 2, bvec, cur))
    return out


def encode_bits(y_bits: np.ndarray, levels_b: Sequence[np.ndarray],
                levels_s: Sequence[np.ndarray]) -> np.ndarray:
    """Batched encoding core: y_bits (batch, 3^(h-k)) -> (batch, 3^h)."""
    cur = np.asarray(y_bits, dtype=np.uint8)
    for bvec, svec in zip(levels_b, levels_s):
        cur = _gadget_level(cur, np.asarray(bvec), np.asarray(svec))
    return cur


def encode(y: HardInput, r: EncodingRandomness) -> HardInput:
    """Embed the hard input y of height h-k into a hard input of height h.

    The root value is preserved for every choice of randomness, and for
    uniformly random (y, r) the image is uniform over the hard inputs.
    """
    if y.height != r.h - r.k:
        raise ValueError(f"encoding expects a source of height {r.h - r.k}, "
                         f"got {y.height}")
    levels_b = [np.array([b for b, _ in lv], dtype=np.uint8) for lv in r.levels]
    levels_s = [np.array([s for _, s in lv], dtype=np.uint8) for lv in r.levels]
    bits = encode_bits(y.input.bits[None, :], levels_b, levels_s)[0]
    return HardInput(Input(r.h, bits))


def q_positions(r: EncodingRandomness) -> np.ndarray:
    """1-based leaf positions carrying the source bits.

    Position i (1-based source index) lands in ((i-1)*3^k, i*3^k]; all other
    leaves of the image are fixed bits, independent of the source.
    """
    m = 3 ** (r.h - r.k)
    pos = np.arange(m, dtype=np.int64)
    for level in r.levels:
        slots = np.array([s for _, s in level], dtype=np.int64)
        pos = 3 * pos + (slots[pos] - 1)
    return pos + 1

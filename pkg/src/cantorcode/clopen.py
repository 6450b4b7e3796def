"""Finite clopen subsets of Cantor space at a fixed depth.

A class of depth d is a set of length-d words, stored as a canonical binary
trie so that near-full classes at depth 24+ stay cheap: a trie node is either
True (everything below present), False (nothing below), or a (left, right)
pair that is never uniformly full or empty.  All measures and densities come
out as exact dyadics.

Also provides the shrinking-approximation wrapper, the text file format, the
budgeted pruning construction, and the extension/density property verifiers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, TYPE_CHECKING

from .bits import BitString, Dyadic, dyadic_sum
from .errors import InputError, InternalError, PreconditionError

if TYPE_CHECKING:  # pragma: no cover
    from .schedules import Schedule

__all__ = [
    "ClopenClass",
    "ApproxSequence",
    "ActRecord",
    "PruneResult",
    "PropertyVerdict",
    "prune",
    "verify_extension_property",
    "verify_density_property",
    "parse_class_text",
    "render_class_text",
    "load_class",
    "save_class",
    "random_class",
]

# -- trie primitives ---------------------------------------------------------
# node := True (full subtree) | False (empty subtree) | (left, right)

_FULL = True
_EMPTY = False


def _make(left, right):
    if left is _FULL and right is _FULL:
        return _FULL
    if left is _EMPTY and right is _EMPTY:
        return _EMPTY
    return (left, right)


def _count(node, depth: int) -> int:
    if node is _FULL:
        return 1 << depth
    if node is _EMPTY:
        return 0
    return _count(node[0], depth - 1) + _count(node[1], depth - 1)


def _at(node, value: int, length: int):
    """Subtree rooted at the given prefix."""
    for i in range(length):
        if node is _FULL or node is _EMPTY:
            return node
        node = node[(value >> (length - 1 - i)) & 1]
    return node


def _remove(node, value: int, length: int):
    """Node with the cylinder below the given prefix emptied."""
    if length == 0 or node is _EMPTY:
        return _EMPTY if length == 0 else node
    left, right = (node, node) if node is _FULL else node
    bit = (value >> (length - 1)) & 1
    rest = value & ((1 << (length - 1)) - 1)
    if bit == 0:
        return _make(_remove(left, rest, length - 1), right)
    return _make(left, _remove(right, rest, length - 1))


def _insert(node, value: int, length: int):
    """Node with the cylinder below the given prefix filled."""
    if length == 0 or node is _FULL:
        return _FULL if length == 0 else node
    left, right = (node, node) if node is _EMPTY else node
    bit = (value >> (length - 1)) & 1
    rest = value & ((1 << (length - 1)) - 1)
    if bit == 0:
        return _make(_insert(left, rest, length - 1), right)
    return _make(left, _insert(right, rest, length - 1))


def _union(a, b):
    if a is _FULL or b is _FULL:
        return _FULL
    if a is _EMPTY:
        return b
    if b is _EMPTY:
        return a
    return _make(_union(a[0], b[0]), _union(a[1], b[1]))


def _intersect(a, b):
    if a is _EMPTY or b is _EMPTY:
        return _EMPTY
    if a is _FULL:
        return b
    if b is _FULL:
        return a
    return _make(_intersect(a[0], b[0]), _intersect(a[1], b[1]))


def _minus(a, b):
    if a is _EMPTY or b is _FULL:
        return _EMPTY
    if b is _EMPTY:
        return a
    aa = (a, a) if a is _FULL else a
    return _make(_minus(aa[0], b[0]), _minus(aa[1], b[1]))


def _subset(a, b) -> bool:
    if a is _EMPTY or b is _FULL:
        return True
    if b is _EMPTY:
        return False
    if a is _FULL:
        return False  # b is a proper tuple here, so it misses something
    return _subset(a[0], b[0]) and _subset(a[1], b[1])


def _leftmost(node, depth: int) -> int:
    if node is _EMPTY:
        raise InternalError("leftmost of empty trie")
    if node is _FULL:
        return 0
    if node[0] is not _EMPTY:
        return _leftmost(node[0], depth - 1)
    return (1 << (depth - 1)) | _leftmost(node[1], depth - 1)


def _iter_prefix_values(node, length: int, acc: int = 0) -> Iterator[int]:
    """All extendible prefixes of the given length, in lexicographic order."""
    if node is _EMPTY:
        return
    if length == 0:
        yield acc
        return
    if node is _FULL:
        base = acc << length
        yield from range(base, base + (1 << length))
        return
    yield from _iter_prefix_values(node[0], length - 1, acc << 1)
    yield from _iter_prefix_values(node[1], length - 1, (acc << 1) | 1)


def _iter_mixed(node, length: int, acc: int = 0) -> Iterator[tuple[int, tuple]]:
    """Prefixes of the given length whose subtree is neither full nor empty.

    Lexicographic order.  Full regions are skipped wholesale, which is what
    keeps scans over near-full deep classes cheap.
    """
    if node is _EMPTY or node is _FULL:
        return
    if length == 0:
        yield acc, node
        return
    yield from _iter_mixed(node[0], length - 1, acc << 1)
    yield from _iter_mixed(node[1], length - 1, (acc << 1) | 1)


def _ext_count(node, depth: int) -> int:
    """Number of extendible prefixes of the given relative depth."""
    if node is _EMPTY:
        return 0
    if node is _FULL:
        return 1 << depth
    if depth == 0:
        return 1
    return _ext_count(node[0], depth - 1) + _ext_count(node[1], depth - 1)


def _take_leftmost(node, depth: int, quota: int):
    """Trie keeping only the `quota` lexicographically least members."""
    if quota <= 0 or node is _EMPTY:
        return _EMPTY
    total = _count(node, depth)
    if quota >= total:
        return node
    left, right = (node, node) if node is _FULL else node
    nl = _count(left, depth - 1)
    if quota <= nl:
        return _make(_take_leftmost(left, depth - 1, quota), _EMPTY)
    return _make(left, _take_leftmost(right, depth - 1, quota - nl))


# -- the public class --------------------------------------------------------


class ClopenClass:
    """Depth-d approximation of an effectively closed set: a set of length-d words."""

    __slots__ = ("depth", "_root", "_n")

    def __init__(self, depth: int, root=_EMPTY):
        # depth 0 (the class {empty word}) is degenerate but needed as the
        # restriction of a class to length-0 strings.
        if depth < 0:
            raise PreconditionError(f"class depth must be non-negative, got {depth}")
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "_root", root)
        object.__setattr__(self, "_n", _count(root, depth))

    def __setattr__(self, name, val):  # pragma: no cover - defensive
        raise AttributeError("ClopenClass is immutable")

    @classmethod
    def full(cls, depth: int) -> "ClopenClass":
        return cls(depth, _FULL)

    @classmethod
    def empty(cls, depth: int) -> "ClopenClass":
        return cls(depth, _EMPTY)

    @classmethod
    def from_members(cls, depth: int, members) -> "ClopenClass":
        root = _EMPTY
        for m in members:
            if len(m) != depth:
                raise PreconditionError(f"member {m} has length {len(m)}, expected {depth}")
            root = _insert(root, m.as_int, depth)
        return cls(depth, root)

    @classmethod
    def from_cylinders(cls, depth: int, prefixes) -> "ClopenClass":
        root = _EMPTY
        for p in prefixes:
            if len(p) > depth:
                raise PreconditionError(f"cylinder {p} deeper than class depth {depth}")
            root = _insert(root, p.as_int, len(p))
        return cls(depth, root)

    # -- queries -------------------------------------------------------------

    @property
    def member_count(self) -> int:
        return self._n

    def measure(self) -> Dyadic:
        return Dyadic(self._n, self.depth)

    def is_empty(self) -> bool:
        return self._root is _EMPTY

    def __contains__(self, s: BitString) -> bool:
        if len(s) != self.depth:
            return False
        return _at(self._root, s.as_int, self.depth) is _FULL

    def _check_len(self, s: BitString) -> None:
        if len(s) > self.depth:
            raise PreconditionError("string deeper than class approximation")

    def is_extendible(self, s: BitString) -> bool:
        """True iff some member has s as a prefix."""
        self._check_len(s)
        return _at(self._root, s.as_int, len(s)) is not _EMPTY

    def density(self, s: BitString) -> Dyadic:
        """Relative measure of the class inside the cylinder of s, in [0, 1]."""
        self._check_len(s)
        sub = _at(self._root, s.as_int, len(s))
        return Dyadic(_count(sub, self.depth - len(s)), self.depth - len(s))

    def extension_count(self, s: BitString, length: int) -> int:
        """Number of extendible length-`length` extensions of s."""
        self._check_len(s)
        if not len(s) <= length <= self.depth:
            raise PreconditionError(f"extension length {length} out of range")
        sub = _at(self._root, s.as_int, len(s))
        return _ext_count(sub, length - len(s))

    def extendible_strings(self, length: int) -> Iterator[BitString]:
        """All extendible words of the given length, lexicographically."""
        if not 0 <= length <= self.depth:
            raise PreconditionError("string deeper than class approximation")
        for v in _iter_prefix_values(self._root, length):
            yield BitString.from_int(v, length)

    def extendible_extensions(self, s: BitString, length: int) -> Iterator[BitString]:
        """Extendible length-`length` extensions of s, lexicographically, lazily."""
        self._check_len(s)
        if not len(s) <= length <= self.depth:
            raise PreconditionError(f"extension length {length} out of range")
        sub = _at(self._root, s.as_int, len(s))
        for v in _iter_prefix_values(sub, length - len(s), s.as_int):
            yield BitString.from_int(v, length)

    def leftmost(self, length: int) -> BitString:
        """Lexicographically least extendible word of the given length."""
        if self.is_empty():
            raise PreconditionError("empty class has no extendible strings")
        if not 0 <= length <= self.depth:
            raise PreconditionError("string deeper than class approximation")
        return BitString.from_int(_leftmost(self._root, self.depth) >> (self.depth - length), length)

    def members(self) -> list[BitString]:
        if self._n > (1 << 22):
            raise PreconditionError(f"refusing to materialize {self._n} members")
        return [BitString.from_int(v, self.depth) for v in _iter_prefix_values(self._root, self.depth)]

    # -- algebra -------------------------------------------------------------

    def minus_cylinder(self, s: BitString) -> "ClopenClass":
        self._check_len(s)
        return ClopenClass(self.depth, _remove(self._root, s.as_int, len(s)))

    def part_below(self, s: BitString) -> "ClopenClass":
        """The class restricted to extensions of s (same depth)."""
        self._check_len(s)
        sub = _at(self._root, s.as_int, len(s))
        out = _EMPTY
        if sub is not _EMPTY:
            for i in range(len(s) - 1, -1, -1):
                sub = (sub, _EMPTY) if not s[i] else (_EMPTY, sub)
            out = sub
        return ClopenClass(self.depth, out)

    def union(self, other: "ClopenClass") -> "ClopenClass":
        self._same_depth(other)
        return ClopenClass(self.depth, _union(self._root, other._root))

    def intersect(self, other: "ClopenClass") -> "ClopenClass":
        self._same_depth(other)
        return ClopenClass(self.depth, _intersect(self._root, other._root))

    def minus(self, other: "ClopenClass") -> "ClopenClass":
        self._same_depth(other)
        return ClopenClass(self.depth, _minus(self._root, other._root))

    def is_subset_of(self, other: "ClopenClass") -> bool:
        self._same_depth(other)
        return _subset(self._root, other._root)

    def keep_leftmost(self, quota: int) -> "ClopenClass":
        """The `quota` lexicographically least members (all of them if fewer)."""
        return ClopenClass(self.depth, _take_leftmost(self._root, self.depth, quota))

    def _same_depth(self, other: "ClopenClass") -> None:
        if self.depth != other.depth:
            raise PreconditionError(f"depth mismatch: {self.depth} vs {other.depth}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ClopenClass)
            and self.depth == other.depth
            and self._root == other._root
        )

    def __hash__(self) -> int:
        return hash((self.depth, self._root))

    def __repr__(self) -> str:
        return f"ClopenClass(depth={self.depth}, members={self._n})"


@dataclass(frozen=True)
class ApproxSequence:
    """Monotone shrinking stages of equal depth: stages[s+1] is a subset of stages[s]."""

    stages: tuple[ClopenClass, ...]

    def __post_init__(self):
        if not self.stages:
            raise PreconditionError("approximation needs at least one stage")
        depth = self.stages[0].depth
        for i, st in enumerate(self.stages):
            if st.depth != depth:
                raise PreconditionError(f"stage {i} has depth {st.depth}, expected {depth}")
        for i in range(len(self.stages) - 1):
            if not self.stages[i + 1].is_subset_of(self.stages[i]):
                raise PreconditionError(f"stage {i + 1} is not a subset of stage {i}")

    @property
    def depth(self) -> int:
        return self.stages[0].depth

    @property
    def final(self) -> ClopenClass:
        return self.stages[-1]

    def at(self, s: int) -> ClopenClass:
        """Stage s, clamped to the last provided stage."""
        return self.stages[min(s, len(self.stages) - 1)]


# -- text format --------------------------------------------------------------


def parse_class_text(text: str) -> ClopenClass:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("depth "):
        raise InputError("line 1 must be 'depth <d>'")
    try:
        depth = int(lines[0][len("depth "):])
    except ValueError:
        raise InputError("line 1 must be 'depth <d>'") from None
    root = _EMPTY
    seen: set[int] = set()
    for k, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if len(line) != depth or any(c not in "01" for c in line):
            raise InputError(f"wrong-length member at line {k}")
        v = int(line, 2)
        if v in seen:
            raise InputError(f"duplicate member at line {k}")
        seen.add(v)
        root = _insert(root, v, depth)
    return ClopenClass(depth, root)


def render_class_text(c: ClopenClass) -> str:
    out = [f"depth {c.depth}"]
    out.extend(str(m) for m in c.members())
    return "\n".join(out) + "\n"


def write_class_text(c: ClopenClass, fh) -> None:
    """Streamed variant of render_class_text, usable at any member count."""
    fh.write(f"depth {c.depth}\n")
    width = c.depth
    for v in _iter_prefix_values(c._root, c.depth):
        fh.write(format(v, f"0{width}b") + "\n" if width else "\n")


def load_class(path) -> ClopenClass:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_class_text(fh.read())


def save_class(c: ClopenClass, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_class_text(c, fh)


def random_class(depth: int, seed: int, min_measure: Dyadic, removals: int = 24) -> ClopenClass:
    """Seeded class: start full, carve out random cylinders while staying above min_measure."""
    rng = random.Random(seed)
    c = ClopenClass.full(depth)
    for _ in range(removals):
        length = rng.randint(1, depth)
        prefix = BitString.from_int(rng.getrandbits(length), length)
        candidate = c.minus_cylinder(prefix)
        if candidate.measure() > min_measure:
            c = candidate
    return c


# -- pruning construction ------------------------------------------------------


@dataclass(frozen=True)
class ActRecord:
    """One removal: at `stage`, the level-`level` string `sigma` lost its whole remainder."""

    stage: int
    level: int
    sigma: BitString
    removed: Dyadic


@dataclass(frozen=True)
class PruneResult:
    pstar: ClopenClass
    q: ClopenClass
    trace: tuple[ActRecord, ...]


def _coding_budget(sched: "Schedule", levels: int) -> Dyadic:
    return dyadic_sum(Dyadic.pow2(sched.m(i) - sched.l(i)) for i in range(levels))


def prune(P: ClopenClass, sched: "Schedule", levels: int) -> PruneResult:
    """Carve low-density cylinders out of P until every surviving block boundary is thick.

    Repeatedly scans block-boundary lengths in increasing order and strings in
    lexicographic order, removing the remainder below the least string whose
    current density is at most 2^(m_n - l_n), until nothing qualifies.  The
    removals Q have measure at most the series sum, so the result is nonempty
    whenever that sum is below measure(P).
    """
    if sched.L(levels) > P.depth:
        raise PreconditionError(
            f"class depth {P.depth} is shallower than L({levels}) = {sched.L(levels)}"
        )
    budget = _coding_budget(sched, levels)
    if not budget < P.measure():
        raise PreconditionError(
            f"measure budget exhausted: partial sum {budget} >= measure {P.measure()}"
        )
    lengths = [sched.L(n) for n in range(levels)]
    thresholds = [Dyadic.pow2(sched.m(n) - sched.l(n)) for n in range(levels)]
    current = P
    q = ClopenClass.empty(P.depth)
    trace: list[ActRecord] = []
    stage = 0
    while True:
        hit = None
        for n, (length, thr) in enumerate(zip(lengths, thresholds)):
            for value, sub in _iter_mixed(current._root, length):
                if Dyadic(_count(sub, P.depth - length), P.depth - length) <= thr:
                    hit = (n, BitString.from_int(value, length))
                    break
            if hit:
                break
        if hit is None:
            break
        n, sigma = hit
        piece = current.part_below(sigma)
        q = q.union(piece)
        current = current.minus_cylinder(sigma)
        stage += 1
        trace.append(ActRecord(stage, n, sigma, piece.measure()))
    if q.measure() > budget:
        raise InternalError(f"removed measure {q.measure()} exceeds budget {budget}")
    if current.is_empty():
        raise InternalError("pruning emptied the class despite a valid budget")
    return PruneResult(current, q, tuple(trace))


# -- property verifiers --------------------------------------------------------


@dataclass(frozen=True)
class PropertyVerdict:
    """Outcome of a property scan; on failure carries the least counterexample."""

    ok: bool
    level: int | None = None
    sigma: BitString | None = None
    observed: object = None
    required: object = None

    def __bool__(self) -> bool:
        return self.ok


def verify_extension_property(C: ClopenClass, sched: "Schedule", levels: int) -> PropertyVerdict:
    """Every extendible string at L_i must have at least 2^(m_i) extendible
    extensions of length L_{i+1}, for each i < levels."""
    if sched.L(levels) > C.depth:
        raise PreconditionError("string deeper than class approximation")
    for i in range(levels):
        li, li1 = sched.L(i), sched.L(i + 1)
        need = 1 << sched.m(i)
        # Inside a full region every string has 2^(l_i) >= 2^(m_i) extensions,
        # so only mixed prefixes can fail.
        for value, sub in _iter_mixed(C._root, li):
            got = _ext_count(sub, li1 - li)
            if got < need:
                return PropertyVerdict(False, i, BitString.from_int(value, li), got, need)
    return PropertyVerdict(True)


def verify_density_property(C: ClopenClass, sched: "Schedule", levels: int) -> PropertyVerdict:
    """Every extendible string at L_i must have density at least 2^(m_i - l_i)."""
    if sched.L(levels) > C.depth:
        raise PreconditionError("string deeper than class approximation")
    for i in range(levels):
        li = sched.L(i)
        thr = Dyadic.pow2(sched.m(i) - sched.l(i))
        for value, sub in _iter_mixed(C._root, li):
            dens = Dyadic(_count(sub, C.depth - li), C.depth - li)
            if not dens >= thr:
                return PropertyVerdict(False, i, BitString.from_int(value, li), dens, thr)
    return PropertyVerdict(True)

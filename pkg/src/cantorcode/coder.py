"""Block coding through a clopen class: word tables, encoding, instrumented decoding.

For a node sigma at block boundary L(i), a word table assigns to each slot
j < 2^(m_i) a distinct extendible extension of sigma of length L(i+1).  Tables
are settled by a stage process that fills the least open slot with the least
fresh extendible candidate and clears slots whose word dies under a shrinking
approximation; against a fixed class the fixpoint is simply the 2^(m_i)
lexicographically least extendible extensions in slot order.

Encoding maps source block number j to slot j's word; decoding inverts this by
searching the settled table for the slot whose word prefixes the oracle, and
records exactly how much oracle it consulted per bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitString, EMPTY, Dyadic
from .clopen import ApproxSequence, ClopenClass, PruneResult, prune
from .errors import InternalError, PreconditionError
from .schedules import Schedule, convergence_margin

__all__ = [
    "TableEvent",
    "WordTable",
    "CodePath",
    "DecodeResult",
    "EndToEndResult",
    "CodingSession",
    "settle_words",
    "encode",
    "decode",
    "end_to_end",
]


@dataclass(frozen=True)
class TableEvent:
    stage: int
    slot: int
    op: str  # "assign" | "clear"
    word: BitString


@dataclass(frozen=True)
class WordTable:
    sigma: BitString
    level: int
    slots: tuple[BitString, ...]
    history: tuple[TableEvent, ...]

    def slot_of(self, word: BitString) -> int | None:
        for j, w in enumerate(self.slots):
            if w == word:
                return j
        return None


def _level_of(sched: Schedule, length: int) -> int:
    i = 0
    while sched.L(i) < length:
        i += 1
    if sched.L(i) != length:
        raise PreconditionError(f"string length {length} is not a block boundary L(i)")
    return i


def settle_words(
    P: ClopenClass,
    sched: Schedule,
    sigma: BitString,
    stages: ApproxSequence | None = None,
) -> WordTable:
    """Run the slot-filling stage process to its fixpoint and freeze the table.

    With `stages` supplied, assignments are made against the stage current at
    each step and slots are cleared when their word loses all extensions; the
    final stage must equal P.  Raises when the fixpoint leaves a slot open,
    which happens exactly when sigma has fewer than 2^(m_i) extendible
    extensions at the next boundary.
    """
    level = _level_of(sched, len(sigma))
    width = sched.L(level + 1)
    if width > P.depth:
        raise PreconditionError(f"class depth {P.depth} shallower than L({level + 1}) = {width}")
    if not P.is_extendible(sigma):
        raise PreconditionError(f"node {sigma} is not extendible in the class")
    if stages is not None and stages.final != P:
        raise PreconditionError("approximation stages must end at the coding class")

    nslots = 1 << sched.m(level)
    words: list[BitString | None] = [None] * nslots
    history: list[TableEvent] = []
    if stages is None:
        # Against a fixed class nothing is ever cleared, so the fixpoint is the
        # first 2^(m_i) extendible extensions assigned to slots in order.
        for slot, cand in zip(range(nslots), P.extendible_extensions(sigma, width)):
            words[slot] = cand
            history.append(TableEvent(slot + 1, slot, "assign", cand))
        return _freeze(P, sigma, level, words, history)
    step = 1
    while True:
        cls = stages.at(step)
        target = None
        for t in range(nslots):
            w = words[t]
            if w is None or not cls.is_extendible(w):
                target = t
                break
        if target is None:
            if cls != P:
                step += 1  # drain remaining stages so the fixpoint is against P
                continue
            break
        w = words[target]
        if w is not None and not cls.is_extendible(w):
            words[target] = None
            history.append(TableEvent(step, target, "clear", w))
        else:
            taken = {x for x in words if x is not None}
            fresh = None
            for cand in cls.extendible_extensions(sigma, width):
                if cand not in taken:
                    fresh = cand
                    break
            if fresh is None:
                break  # no unused extension left; the open-slot check reports it
            words[target] = fresh
            history.append(TableEvent(step, target, "assign", fresh))
        step += 1
    return _freeze(P, sigma, level, words, history)


def _freeze(P: ClopenClass, sigma: BitString, level: int,
            words: list[BitString | None], history: list[TableEvent]) -> WordTable:
    if any(w is None for w in words):
        raise PreconditionError(f"extension property violated at {sigma or 'the root'}")
    slots = tuple(words)  # type: ignore[arg-type]
    for w in slots:
        if not P.is_extendible(w):
            raise InternalError(f"settled word {w} is not extendible in the final class")
    if len(set(slots)) != len(slots):
        raise InternalError(f"settled words at {sigma} are not pairwise distinct")
    return WordTable(sigma, level, slots, tuple(history))


class CodingSession:
    """Word tables memoized per (class, schedule); safe to reuse across calls."""

    def __init__(self, P: ClopenClass, sched: Schedule):
        self.P = P
        self.sched = sched
        self._tables: dict[BitString, WordTable] = {}

    def word_table(self, sigma: BitString) -> WordTable:
        table = self._tables.get(sigma)
        if table is None:
            table = settle_words(self.P, self.sched, sigma)
            self._tables[sigma] = table
        return table


@dataclass(frozen=True)
class CodePath:
    """A source prefix, its code word, and the slot chosen at each block."""

    source: BitString
    code: BitString
    slots: tuple[int, ...]
    block_uses: tuple[int, ...]


def encode(X: BitString, P: ClopenClass, sched: Schedule,
           session: CodingSession | None = None) -> CodePath:
    """Build the code word for X block by block; X must end on a block boundary."""
    n = sched.blocks_for_source(len(X))
    if sched.L(n) > P.depth:
        raise PreconditionError(f"class depth {P.depth} shallower than L({n}) = {sched.L(n)}")
    if session is None:
        session = CodingSession(P, sched)
    y = EMPTY
    slots: list[int] = []
    uses: list[int] = []
    for i in range(n):
        block = X.slice(sched.M(i), sched.M(i + 1))
        table = session.word_table(y)
        t = block.as_int
        y = table.slots[t]
        slots.append(t)
        uses.append(sched.L(i + 1))
    return CodePath(X, y, tuple(slots), tuple(uses))


class _Oracle:
    """Read-tracking wrapper around the code word; remembers the longest prefix touched."""

    def __init__(self, y: BitString):
        self._y = y
        self.high = 0

    def prefix(self, k: int) -> BitString:
        if k > len(self._y):
            raise PreconditionError(f"oracle exhausted: needs {k} bits, has {len(self._y)}")
        if k > self.high:
            self.high = k
        return self._y.prefix(k)


@dataclass(frozen=True)
class DecodeResult:
    source: BitString
    use: tuple[int, ...]  # per decoded bit: length of oracle prefix consulted
    slots: tuple[int, ...]


def decode(Y: BitString, P: ClopenClass, sched: Schedule, n: int,
           session: CodingSession | None = None) -> DecodeResult:
    """Invert the coding map on the first n blocks of Y.

    The oracle is consulted through a tracker, so the returned per-bit use is
    measured, not assumed; only the prefix of length L(n) is ever touched.
    """
    if len(Y) < sched.L(n):
        raise PreconditionError(f"oracle too short: {len(Y)} < L({n}) = {sched.L(n)}")
    if session is None:
        session = CodingSession(P, sched)
    oracle = _Oracle(Y)
    x = EMPTY
    uses: list[int] = []
    slots: list[int] = []
    for i in range(n):
        sigma = oracle.prefix(sched.L(i))
        if not P.is_extendible(sigma):
            raise PreconditionError("oracle outside code tree")
        table = session.word_table(sigma)
        target = oracle.prefix(sched.L(i + 1))
        j = table.slot_of(target)
        if j is None:
            raise PreconditionError("oracle outside code tree")
        x = x + BitString.from_int(j, sched.m(i))
        slots.append(j)
        uses.extend([oracle.high] * sched.m(i))
    if oracle.high > sched.L(n):
        raise InternalError(f"decoder touched {oracle.high} oracle bits, beyond L({n})")
    return DecodeResult(x, tuple(uses), tuple(slots))


@dataclass(frozen=True)
class EndToEndResult:
    pruned: PruneResult
    path: CodePath
    use: tuple[int, ...]  # measured per-bit use from the verification decode
    margin: Dyadic


def end_to_end(X: BitString, P: ClopenClass, sched: Schedule) -> EndToEndResult:
    """Prune P for the needed levels, encode X against the result, verify by decoding."""
    n = sched.blocks_for_source(len(X))
    if sched.L(n) > P.depth:
        raise PreconditionError(f"class depth {P.depth} shallower than L({n}) = {sched.L(n)}")
    margin, within = convergence_margin(sched, n, P.measure())
    if not within:
        raise PreconditionError(
            f"measure budget exhausted: partial sum {margin} >= measure {P.measure()}"
        )
    pruned = prune(P, sched, n)
    session = CodingSession(pruned.pstar, sched)
    path = encode(X, pruned.pstar, sched, session)
    back = decode(path.code, pruned.pstar, sched, n, session)
    if back.source != X:
        raise InternalError("decode of the fresh code word did not recover the source")
    return EndToEndResult(pruned, path, back.use, margin)

"""Search for integral infinite-order elements in a two-generator group.

Group elements (not words) are enumerated by word length.  Each element is kept
once, under its canonical matrix, with the shortlex-least word reaching it
(letter order a < A < b < B).  Because canonical matrices are compared, every
relation of the represented group is quotiented out for free.

Two modes:

* ``bfs``  - layer by layer up to ``max_length``; only the previous two layers
  are held for deduplication, since a neighbour of layer L lies in L-1, L or L+1.
* ``mitm`` - enumerate to ceil(L/2), bucket elements by the image of the base
  vertex in the product of trees, and combine colliding pairs g, h into
  g^-1 h.  Two elements share a bucket exactly when g^-1 h is integral with
  unit determinant, so no collision is a false positive.

Frontier checkpoint format (text, UTF-8, one item per line)::

    lrwitness-frontier 1
    generators <a11> <a12> <a21> <a22> <b11> <b12> <b21> <b22>
    layer <k> <count>
    <m11> <m12> <m21> <m22> <word>        # word "-" for the empty word
    ...                                   # (previous layer block, then current)
    end <total element count>

A checkpoint stores the last two completed layers, which is what resuming needs.
"""

from __future__ import annotations

import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Literal, Sequence

from .exact import IDENTITY, ProjectiveMatrix, inverse
from .family import make_family
from .tree import is_vertex_stabilizer, vertex_pair
from .witness import WitnessRecord, record_for
from .words import INVERSE, LETTERS, free_reduce, invert_word, shortlex_key

log = logging.getLogger(__name__)

FRONTIER_MAGIC = "lrwitness-frontier"
FRONTIER_VERSION = 1

Key = tuple  # (m11, m12, m21, m22) of a canonical matrix
Layer = dict  # Key -> word, iteration order is shortlex order of the words


class SearchError(Exception):
    pass


class MemoryBudgetExceeded(SearchError):
    def __init__(self, last_completed_layer: int, estimate: int, budget: int) -> None:
        super().__init__(
            f"memory budget {budget} bytes exceeded (estimate {estimate}); "
            f"last completed layer {last_completed_layer}"
        )
        self.last_completed_layer = last_completed_layer


class FrontierError(SearchError):
    pass


class FrontierVersionError(FrontierError):
    pass


class FrontierCorruptError(FrontierError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    max_length: int
    mode: Literal["bfs", "mitm"] = "bfs"
    t: Fraction = Fraction(9)
    memory_budget: int | None = None
    persist_path: Path | None = None
    emit_torsion: bool = False
    generators: tuple[ProjectiveMatrix, ProjectiveMatrix] | None = None
    primes: tuple[int, ...] | None = None
    resume_from: Path | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.max_length < 1:
            raise ValueError("max_length must be at least 1")
        if self.mode not in ("bfs", "mitm"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @property
    def half_depth(self) -> int:
        return -(-self.max_length // 2)

    def generator_pair(self) -> tuple[ProjectiveMatrix, ProjectiveMatrix]:
        if self.generators is not None:
            return self.generators
        fam = make_family(self.t)
        return fam.gen_a, fam.gen_b

    def prime_support(self) -> tuple[int, ...]:
        if self.primes is not None:
            return tuple(self.primes)
        a, b = self.generator_pair()
        return tuple(sorted(set(prime_factors(a.det)) | set(prime_factors(b.det)))) or (2,)


@dataclass
class SearchStats:
    layers: int = 0
    elements: int = 0
    witnesses: int = 0
    layer_sizes: list[int] = field(default_factory=list)


@dataclass
class Frontier:
    """The last completed layer (and the one before it, for resuming)."""

    layer: int
    elements: Layer
    previous: Layer = field(default_factory=dict)
    generators: tuple[ProjectiveMatrix, ProjectiveMatrix] | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frontier):
            return NotImplemented
        return (
            self.layer == other.layer
            and list(self.elements.items()) == list(other.elements.items())
            and list(self.previous.items()) == list(other.previous.items())
            and self.generators == other.generators
        )


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# --- core arithmetic on raw tuples (hot loop) ------------------------------


def _mul_key(x: Key, y: Key) -> Key:
    a, b, c, d = x
    e, f, g, h = y
    m11 = a * e + b * g
    m12 = a * f + b * h
    m21 = c * e + d * g
    m22 = c * f + d * h
    k = math.gcd(m11, m12, m21, m22)
    if (m11 or m12 or m21) < 0:
        k = -k
    if k != 1:
        return (m11 // k, m12 // k, m21 // k, m22 // k)
    return (m11, m12, m21, m22)


def _letter_images(gens: tuple[ProjectiveMatrix, ProjectiveMatrix]) -> list[tuple[str, Key]]:
    a, b = gens
    images = {"a": a, "A": inverse(a), "b": b, "B": inverse(b)}
    return [(ch, images[ch].entries) for ch in LETTERS]


def _extensions(items: Iterable[tuple[Key, str]], letters: list[tuple[str, Key]]) -> Iterator[tuple[Key, str]]:
    """All one-letter reduced extensions, in shortlex order when ``items`` is."""
    for key, word in items:
        back = INVERSE[word[-1]] if word else ""
        for ch, g in letters:
            if ch != back:
                yield _mul_key(key, g), word + ch


def _expand_slice(items: Sequence[tuple[Key, str]], letters: list[tuple[str, Key]]) -> list[tuple[Key, str]]:
    return list(_extensions(items, letters))


def _entry_bytes(key: Key, word: str) -> int:
    # tuple + four ints + str + dict slot, CPython 64-bit ballpark
    ints = sum(28 + 4 * (abs(x).bit_length() // 30) for x in key)
    return 72 + ints + 49 + len(word) + 104


def _layer_bytes(layer: Layer) -> int:
    if not layer:
        return 0
    key, word = next(reversed(layer.items()))
    return len(layer) * _entry_bytes(key, word)


def _sort_layer(layer: dict[Key, str]) -> Layer:
    return dict(sorted(layer.items(), key=lambda kv: shortlex_key(kv[1])))


def _merge(chunks: Iterable[list[tuple[Key, str]]], prev: Layer, cur: Layer) -> dict[Key, str]:
    """Insert-if-absent with shortlex-least word retained; order independent."""
    new: dict[Key, str] = {}
    for chunk in chunks:
        for key, word in chunk:
            if key in cur or key in prev:
                continue
            old = new.get(key)
            if old is None or shortlex_key(word) < shortlex_key(old):
                new[key] = word
    return new


class LayerEnumerator:
    """Shortest-word enumeration of group elements, one layer at a time."""

    def __init__(
        self,
        gens: tuple[ProjectiveMatrix, ProjectiveMatrix],
        *,
        memory_budget: int | None = None,
        workers: int = 1,
        start: Frontier | None = None,
    ) -> None:
        self.gens = gens
        self.letters = _letter_images(gens)
        self.memory_budget = memory_budget
        self.workers = workers
        if start is None:
            self.layer = 0
            self.prev: Layer = {}
            self.cur: Layer = {IDENTITY.entries: ""}
        else:
            if start.generators is not None and start.generators != tuple(gens):
                raise SearchError("frontier was produced with different generators")
            self.layer = start.layer
            self.prev = dict(start.previous)
            self.cur = dict(start.elements)

    def frontier(self) -> Frontier:
        return Frontier(self.layer, self.cur, self.prev, tuple(self.gens))

    def _check_budget(self, pending: int, sample: tuple[Key, str] | None) -> None:
        if self.memory_budget is None:
            return
        est = _layer_bytes(self.prev) + _layer_bytes(self.cur)
        if sample is not None:
            est += pending * _entry_bytes(*sample)
        if est > self.memory_budget:
            raise MemoryBudgetExceeded(self.layer, est, self.memory_budget)

    def step(self) -> Layer:
        """Build and return the next layer."""
        self._check_budget(0, None)
        if self.workers > 1 and len(self.cur) >= 4 * self.workers:
            new = self._step_parallel(list(self.cur.items()))
        else:
            new = {}
            prev, cur = self.prev, self.cur
            for n, (key, word) in enumerate(_extensions(self.cur.items(), self.letters)):
                # iteration order is shortlex, so the first word to arrive wins
                if key in cur or key in prev or key in new:
                    continue
                new[key] = word
                if not n & 0xFFFF:
                    self._check_budget(len(new), (key, word))
        self._check_budget(len(new), next(iter(new.items()), None))
        self.prev, self.cur = self.cur, new
        self.layer += 1
        return new

    def _step_parallel(self, items: list[tuple[Key, str]]) -> Layer:
        size = -(-len(items) // self.workers)
        slices = [items[i : i + size] for i in range(0, len(items), size)]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            chunks = list(pool.map(_expand_slice, slices, [self.letters] * len(slices)))
        return _sort_layer(_merge(chunks, self.prev, self.cur))


def _stabilizer_element(key: Key, primes: Sequence[int]) -> ProjectiveMatrix | None:
    """The matrix for ``key`` if it is a nontrivial element of PGL_2(Z)."""
    m = ProjectiveMatrix(*key)
    if m.is_identity() or not is_vertex_stabilizer(m, primes):
        return None
    return m


def _make_record(word: str, m: ProjectiveMatrix, emit_torsion: bool) -> WitnessRecord | None:
    rec = record_for(word, m)
    if rec.order.is_finite and not emit_torsion:
        return None
    return rec


def bfs_search(cfg: SearchConfig, stats: SearchStats | None = None) -> Iterator[WitnessRecord]:
    """Stream witness records layer by layer, each layer in shortlex order."""
    stats = stats if stats is not None else SearchStats()
    gens = cfg.generator_pair()
    primes = cfg.prime_support()
    start = load_frontier(cfg.resume_from) if cfg.resume_from else None
    enum = LayerEnumerator(gens, memory_budget=cfg.memory_budget, workers=cfg.workers, start=start)
    if start is None:
        stats.layer_sizes.append(1)
        stats.elements = 1
    while enum.layer < cfg.max_length:
        layer = enum.step()
        stats.layers = enum.layer
        stats.layer_sizes.append(len(layer))
        stats.elements += len(layer)
        log.info("layer %d: %d new elements", enum.layer, len(layer))
        if cfg.persist_path is not None:
            persist_frontier(enum.frontier(), cfg.persist_path)
        for key, word in layer.items():
            m = _stabilizer_element(key, primes)
            if m is None:
                continue
            rec = _make_record(word, m, cfg.emit_torsion)
            if rec is not None:
                stats.witnesses += 1
                yield rec


def enumerate_ball(
    gens: tuple[ProjectiveMatrix, ProjectiveMatrix], radius: int, memory_budget: int | None = None
) -> Layer:
    """All elements of word length <= ``radius``, shortest words, shortlex order."""
    enum = LayerEnumerator(gens, memory_budget=memory_budget)
    ball: Layer = dict(enum.cur)
    while enum.layer < radius:
        ball.update(enum.step())
    return ball


def mitm_search(cfg: SearchConfig, stats: SearchStats | None = None) -> Iterator[WitnessRecord]:
    """Meet in the middle on vertex-pair collisions.

    Left factors have length <= floor(L/2) and right factors <= ceil(L/2), so
    every combined word has length <= L and every element of length <= L is
    reached; the emitted element set equals that of :func:`bfs_search`.
    """
    stats = stats if stats is not None else SearchStats()
    gens = cfg.generator_pair()
    primes = cfg.prime_support()
    ball = enumerate_ball(gens, cfg.half_depth, cfg.memory_budget)
    stats.layers = cfg.half_depth
    stats.elements = len(ball)
    left_depth = cfg.max_length // 2

    buckets: dict[tuple, list[tuple[Key, str]]] = {}
    for key, word in ball.items():
        pair = vertex_pair(ProjectiveMatrix(*key), primes)
        buckets.setdefault(pair, []).append((key, word))

    found: dict[Key, str] = {}
    for bucket in buckets.values():
        if len(bucket) < 2:
            continue
        for gkey, gword in bucket:
            if len(gword) > left_depth:
                continue
            ginv = inverse(ProjectiveMatrix(*gkey)).entries
            gword_inv = invert_word(gword)
            for hkey, hword in bucket:
                if hkey == gkey:
                    continue
                key = _mul_key(ginv, hkey)
                word = free_reduce(gword_inv + hword)
                old = found.get(key)
                if old is None or shortlex_key(word) < shortlex_key(old):
                    found[key] = word

    for key, word in sorted(found.items(), key=lambda kv: shortlex_key(kv[1])):
        m = _stabilizer_element(key, primes)
        if m is None:
            continue
        rec = _make_record(word, m, cfg.emit_torsion)
        if rec is not None:
            stats.witnesses += 1
            yield rec


def run_search(cfg: SearchConfig, stats: SearchStats | None = None) -> Iterator[WitnessRecord]:
    if cfg.mode == "mitm":
        return mitm_search(cfg, stats)
    return bfs_search(cfg, stats)


# --- persistence -------------------------------------------------------------


def _format_block(index: int, layer: Layer) -> Iterator[str]:
    yield f"layer {index} {len(layer)}\n"
    for key, word in layer.items():
        yield f"{key[0]} {key[1]} {key[2]} {key[3]} {word or '-'}\n"


def persist_frontier(f: Frontier, path: str | os.PathLike) -> None:
    """Write ``f`` atomically (temporary file then rename)."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    total = len(f.previous) + len(f.elements)
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{FRONTIER_MAGIC} {FRONTIER_VERSION}\n")
        if f.generators is None:
            fh.write("generators -\n")
        else:
            a, b = f.generators
            fh.write("generators " + " ".join(str(x) for x in a.entries + b.entries) + "\n")
        if f.layer > 0:
            fh.writelines(_format_block(f.layer - 1, f.previous))
        fh.writelines(_format_block(f.layer, f.elements))
        fh.write(f"end {total}\n")
    os.replace(tmp, path)


def _read_block(lines: Iterator[str], expect_index: int) -> Layer:
    header = next(lines, None)
    if header is None:
        raise FrontierCorruptError("missing layer block")
    parts = header.split()
    if len(parts) != 3 or parts[0] != "layer":
        raise FrontierCorruptError(f"bad layer header {header.strip()!r}")
    try:
        index, count = int(parts[1]), int(parts[2])
    except ValueError as exc:
        raise FrontierCorruptError(f"bad layer header {header.strip()!r}") from exc
    if index != expect_index:
        raise FrontierCorruptError(f"expected layer {expect_index}, found {index}")
    layer: Layer = {}
    for _ in range(count):
        line = next(lines, None)
        if line is None:
            raise FrontierCorruptError(f"layer {index} truncated")
        fields = line.split()
        if len(fields) != 5:
            raise FrontierCorruptError(f"bad element line {line.strip()!r}")
        try:
            key = tuple(int(x) for x in fields[:4])
        except ValueError as exc:
            raise FrontierCorruptError(f"bad element line {line.strip()!r}") from exc
        word = "" if fields[4] == "-" else fields[4]
        if len(word) != index or any(ch not in INVERSE for ch in word):
            raise FrontierCorruptError(f"bad word {fields[4]!r} in layer {index}")
        layer[key] = word
    return layer


def load_frontier(path: str | os.PathLike) -> Frontier:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise FrontierCorruptError(f"{path}: not a text frontier file") from exc
    if not text.endswith("\n"):
        raise FrontierCorruptError(f"{path}: truncated")
    lines = iter(text.splitlines())
    magic = next(lines, "").split()
    if len(magic) != 2 or magic[0] != FRONTIER_MAGIC:
        raise FrontierCorruptError(f"{path}: not a frontier file")
    if magic[1] != str(FRONTIER_VERSION):
        raise FrontierVersionError(f"{path}: version {magic[1]}, expected {FRONTIER_VERSION}")
    gen_line = next(lines, "").split()
    if not gen_line or gen_line[0] != "generators":
        raise FrontierCorruptError(f"{path}: missing generators line")
    generators = None
    if gen_line[1:] != ["-"]:
        try:
            vals = [int(x) for x in gen_line[1:]]
        except ValueError as exc:
            raise FrontierCorruptError(f"{path}: bad generators line") from exc
        if len(vals) != 8:
            raise FrontierCorruptError(f"{path}: bad generators line")
        generators = (ProjectiveMatrix(*vals[:4]), ProjectiveMatrix(*vals[4:]))

    # peek at the first block to learn which layers are present
    rest = list(lines)
    if not rest or not rest[0].startswith("layer "):
        raise FrontierCorruptError(f"{path}: missing layer block")
    try:
        first_index = int(rest[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise FrontierCorruptError(f"{path}: bad layer header") from exc
    it = iter(rest)
    if first_index == 0:
        previous: Layer = {}
        current = _read_block(it, 0)
        layer_index = 0
    else:
        previous = _read_block(it, first_index)
        current = _read_block(it, first_index + 1)
        layer_index = first_index + 1
    trailer = next(it, None)
    if trailer is None or trailer.split()[:1] != ["end"]:
        raise FrontierCorruptError(f"{path}: missing end marker")
    if trailer.split()[1:] != [str(len(previous) + len(current))]:
        raise FrontierCorruptError(f"{path}: element count mismatch")
    if next(it, None) is not None:
        raise FrontierCorruptError(f"{path}: trailing data")
    return Frontier(layer_index, current, previous, generators)


def print_summary(stats: SearchStats, seconds: float, stream=None) -> None:
    print(
        f"layers={stats.layers} elements={stats.elements} witnesses={stats.witnesses} "
        f"wall_time={seconds:.2f}s",
        file=stream or sys.stderr,
    )

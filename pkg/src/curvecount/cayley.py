"""Word metrics on free groups for arbitrary finite symmetric generating sets.

The metric quantities are all exact integers:

* ``word_length(g, S)``    -- distance from the identity to the element g in
  the Cayley graph of S;
* ``conj_length(c, S)``    -- translation length of the conjugacy class c,
  i.e. the minimum of ``word_length`` over all representatives;
* ``enumerate_ball(S, L)`` -- the full metric ball as per-radius spheres.

Engine selection (all exact, cross-validated against each other in tests):

``standard``   S is exactly the standard basis: lengths are reduced /
               cyclically reduced word lengths.
``syllable``   every generator of S is a power of a standard generator: the
               group splits as a free product of cyclic factors wholly
               containing S, so lengths add over maximal single-letter runs
               and each run is an exact signed coin-change cost.
``corridor``   every generator has standard length <= 2: geodesics stay in a
               provably bounded corridor of the standard-tree geodesic, so a
               width-capped BFS over (prefix position, detour) states is
               exact.  Translation lengths minimize over rotations of the
               core plus one-letter spur conjugations, which is exhaustive
               for some minimizing representative.
``ball``       generic fallback: scan balls of increasing radius (spec'd
               behaviour), with explicit budget errors.

The corridor bound: for max generator length M and max S-length M' of a
standard generator, any S-geodesic stays within (M-1)*(M*M'+1) of the tree
geodesic between its endpoints, and some translation-length minimizer sits
within M-1 of the axis.  Both follow from the branch-separation property of
trees: an excursion into a branch must enter and leave past its attaching
vertex, which pins its S-length and hence its depth.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._packed import PackedSpace
from .errors import (
    BudgetExceededError,
    EmptySetError,
    MemoryBudgetExceededError,
    NotGeneratingError,
)
from .words import (
    CyclicClass,
    Word,
    canonical_class,
    invert,
    word_from_text,
)

__all__ = [
    "GenSet",
    "Ball",
    "build_genset",
    "enumerate_ball",
    "word_length",
    "conj_length",
    "sphere_sizes",
]

DEFAULT_GENERATION_BUDGET = 8
DEFAULT_MEMORY_BYTES = 8 << 30
_BYTES_PER_ELEMENT = 40  # code + length + sort/unique workspace, amortized


# --------------------------------------------------------------------------
# generating sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GenSet:
    """A finite symmetric generating set of the free group of given rank.

    ``elements`` is symmetric-closed, deduplicated, and sorted canonically so
    that every enumeration over it is deterministic.  ``std_gen_lengths[i]``
    is the exact S-length of standard generator i+1 (a generation witness).
    """

    rank: int
    elements: tuple[Word, ...]
    std_gen_lengths: tuple[int, ...]

    @property
    def max_word_length(self) -> int:
        """M = longest generator, measured in standard letters."""
        return max(len(s) for s in self.elements)

    @property
    def max_std_gen_cost(self) -> int:
        """M' = worst S-length of a standard generator."""
        return max(self.std_gen_lengths)

    @property
    def is_standard_basis(self) -> bool:
        return len(self.elements) == 2 * self.rank and self.max_word_length == 1

    @property
    def is_power_type(self) -> bool:
        """True when every generator is a power of a standard generator."""
        return all(len(set(abs(x) for x in s.letters)) == 1 for s in self.elements)

    def letter_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(s.letters for s in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        names = ",".join(s.to_text() for s in self.elements)
        return f"GenSet(rank={self.rank}, {{{names}}})"


def _sorted_symmetric(words: Iterable[Word], rank: int) -> tuple[Word, ...]:
    seen = {}
    for w in words:
        if w.is_identity:
            continue
        seen[w.letters] = w
        seen[invert(w).letters] = invert(w)
    def key(w: Word):
        return (len(w.letters), tuple(2 * (abs(x) - 1) + (x < 0) for x in w.letters))
    return tuple(sorted(seen.values(), key=key))


def build_genset(
    rank: int,
    words: Sequence[Word | str],
    budget: int = DEFAULT_GENERATION_BUDGET,
) -> GenSet:
    """Build the symmetric closure and certify that it generates.

    The certificate is a BFS of the Cayley graph out to ``budget`` that must
    reach every standard generator; the radius at which generator i appears
    is its exact S-length and is kept on the result.
    """
    ws = [word_from_text(w, rank) if isinstance(w, str) else w for w in words]
    elements = _sorted_symmetric(ws, rank)
    if not elements:
        raise EmptySetError("generating set is empty after dropping the identity")
    letter_lists = tuple(w.letters for w in elements)

    targets = {(i,): i for i in range(1, rank + 1)}
    found: dict[int, int] = {}
    dist = {(): 0}
    frontier = [()]
    for r in range(1, budget + 1):
        new = []
        for w in frontier:
            for s in letter_lists:
                v = _mul(w, s)
                if v not in dist:
                    dist[v] = r
                    new.append(v)
                    if v in targets:
                        found[targets[v]] = r
        frontier = new
        if len(found) == rank:
            break
        if not frontier:
            break
    if len(found) < rank:
        missing = [i for i in range(1, rank + 1) if i not in found]
        raise NotGeneratingError(
            f"standard generators {missing} not reached within radius {budget}"
        )
    std_costs = tuple(found[i] for i in range(1, rank + 1))
    return GenSet(rank, elements, std_costs)


def _mul(w: tuple[int, ...], s: tuple[int, ...]) -> tuple[int, ...]:
    out = list(w)
    for x in s:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


# --------------------------------------------------------------------------
# balls
# --------------------------------------------------------------------------


class Ball:
    """The exact metric ball of radius L: every element with S-length <= L.

    Stored as per-radius spheres.  The array backend keeps sorted packed
    codes; the dict backend keeps tuples.  Both are immutable after
    construction.
    """

    def __init__(self, genset: GenSet, radius: int, spheres, lens, space: PackedSpace | None):
        self.genset = genset
        self.radius = radius
        self._spheres = spheres
        self._lens = lens
        self._space = space

    def sphere_sizes(self) -> list[int]:
        return [len(s) for s in self._spheres]

    def __len__(self) -> int:
        return sum(len(s) for s in self._spheres)

    def length_of(self, g: Word) -> int | None:
        """S-length of g, or None when g lies outside the ball."""
        if self._space is not None:
            code = self._space.encode(g.letters)
            for r, sph in enumerate(self._spheres):
                i = np.searchsorted(sph, code)
                if i < len(sph) and sph[i] == code:
                    return r
            return None
        for r, sph in enumerate(self._spheres):
            if g.letters in sph:
                return r
        return None

    def __contains__(self, g: Word) -> bool:
        return self.length_of(g) is not None

    def items(self):
        """Yield (Word, length) pairs; intended for tests and export."""
        for r, sph in enumerate(self._spheres):
            if self._space is not None:
                for code in sph:
                    yield Word(self._space.decode(int(code)), self.genset.rank), r
            else:
                for letters in sorted(sph):
                    yield Word(letters, self.genset.rank), r

    def sphere_codes(self, r: int):
        """Array-backend accessor: (codes, lengths) of sphere r."""
        if self._space is None:
            raise ValueError("dict-backed ball has no packed codes")
        return self._spheres[r], self._lens[r]

    @property
    def space(self) -> PackedSpace | None:
        return self._space


def enumerate_ball(
    S: GenSet,
    L: int,
    *,
    max_bytes: int = DEFAULT_MEMORY_BYTES,
    workers: int = 1,
) -> Ball:
    """Exact ball of radius L; raises MemoryBudgetExceededError over budget."""
    if L < 0:
        raise ValueError("radius must be >= 0")
    space = PackedSpace(S.rank)
    max_elements = max_bytes // _BYTES_PER_ELEMENT
    if L * S.max_word_length <= space.capacity:
        try:
            spheres, lens = space.bfs_spheres(
                S.letter_lists(), L, max_elements=max_elements, workers=workers
            )
        except MemoryError as e:
            raise MemoryBudgetExceededError(str(e)) from e
        return Ball(S, L, spheres, lens, space)
    # tuple fallback for words too long to pack
    prev2: set = set()
    prev1 = {()}
    spheres = [{()}]
    total = 1
    for _ in range(1, L + 1):
        new = set()
        for w in prev1:
            for s in S.letter_lists():
                v = _mul(w, s)
                if v and v not in prev1 and v not in prev2:
                    new.add(v)
        total += len(new)
        if total > max_elements:
            raise MemoryBudgetExceededError(
                f"ball exceeds memory budget ({total} elements)"
            )
        spheres.append(new)
        prev2, prev1 = prev1, new
    return Ball(S, L, spheres, None, None)


def sphere_sizes(S: GenSet, L: int, **kwargs) -> list[int]:
    """Sizes of spheres 0..L (growth diagnostics)."""
    return enumerate_ball(S, L, **kwargs).sphere_sizes()


# --------------------------------------------------------------------------
# engine: syllable costs for power-type sets
# --------------------------------------------------------------------------


class _SyllableCosts:
    """Signed coin-change costs per standard generator (power-type S only).

    The free group is the free product of its cyclic factors <a_i>, and a
    power-type S is a union of factor subsets, so S-length is the sum over
    maximal runs of the per-factor cost of the run's exponent.
    """

    def __init__(self, S: GenSet):
        powers: dict[int, set[int]] = collections.defaultdict(set)
        for s in S.elements:
            g = abs(s.letters[0])
            powers[g].add(len(s.letters))
        self.powers = {g: sorted(ps) for g, ps in powers.items()}
        self._tables: dict[int, dict[int, int]] = {}
        self._limits: dict[int, int] = {}

    def cost(self, gen: int, exponent: int) -> int:
        e = abs(exponent)
        table = self._tables.get(gen)
        if table is None or e > self._limits[gen]:
            limit = max(64, 2 * e)
            table = self._grow(gen, limit)
            self._tables[gen] = table
            self._limits[gen] = limit
        return table[e]

    def _grow(self, gen: int, limit: int) -> dict[int, int]:
        # Exact min-coin costs with coins {+-p}.  Partial sums of an optimal
        # signed sum can be reordered to stay within [-max(ps), limit+max(ps)],
        # so BFS over that interval is exact for targets in [0, limit].
        ps = self.powers.get(gen)
        if not ps:
            raise KeyError(f"no generator powers for letter {gen}")
        top = limit + max(ps)
        cost = {0: 0}
        q = collections.deque([0])
        while q:
            v = q.popleft()
            for p in ps:
                for d in (p, -p):
                    u = v + d
                    if -max(ps) <= u <= top and u not in cost:
                        cost[u] = cost[v] + 1
                        q.append(u)
        return {e: c for e, c in cost.items() if e >= 0}

    def run_costs(self, letters: Sequence[int], cyclic: bool) -> int:
        if not letters:
            return 0
        runs: list[tuple[int, int]] = []
        for x in letters:
            g = abs(x)
            e = 1 if x > 0 else -1
            if runs and runs[-1][0] == g:
                runs[-1] = (g, runs[-1][1] + e)
            else:
                runs.append((g, e))
        if cyclic and len(runs) > 1 and runs[0][0] == runs[-1][0]:
            g, e = runs.pop()
            runs[0] = (g, runs[0][1] + e)
        return sum(self.cost(g, e) for g, e in runs if e != 0)


def _syllable_costs(S: GenSet) -> _SyllableCosts:
    cache = _ENGINE_CACHE.setdefault(S, {})
    if "syllable" not in cache:
        cache["syllable"] = _SyllableCosts(S)
    return cache["syllable"]


_ENGINE_CACHE: dict[GenSet, dict] = {}


# --------------------------------------------------------------------------
# engine: corridor BFS (all generators of standard length <= 2)
# --------------------------------------------------------------------------


def _corridor_width(S: GenSet) -> int:
    M = S.max_word_length
    Mp = S.max_std_gen_cost
    return (M - 1) * (M * Mp + 1)


def _corridor_ok(S: GenSet) -> bool:
    return S.max_word_length <= 2


def _corridor_bfs(
    w: tuple[int, ...],
    gens: tuple[tuple[int, ...], ...],
    width: int,
    cap: int | None = None,
) -> int | None:
    """Exact S-length of the reduced word w via corridor-restricted BFS.

    States are (pos, tail): the element w[:pos] * tail with |tail| <= width
    and tail never extending along the word.  Every geodesic stays inside by
    the excursion bound, so plain BFS depth is exact.  Returns None if the
    distance exceeds ``cap``.
    """
    n = len(w)
    goal = (n, ())
    start = (0, ())
    if start == goal:
        return 0
    seen = {start}
    frontier = [start]
    depth = 0
    while frontier:
        depth += 1
        if cap is not None and depth > cap:
            return None
        new = []
        for pos, tail in frontier:
            for s in gens:
                p = pos
                t = list(tail)
                ok = True
                for x in s:
                    if t:
                        if t[-1] == -x:
                            t.pop()
                        else:
                            t.append(x)
                    elif p < n and w[p] == x:
                        p += 1
                    elif p > 0 and w[p - 1] == -x:
                        p -= 1
                    else:
                        t.append(x)
                    if len(t) > width:
                        ok = False
                        break
                if not ok:
                    continue
                st = (p, tuple(t))
                if st == goal:
                    return depth
                if st not in seen:
                    seen.add(st)
                    new.append(st)
        frontier = new
    return None  # unreachable within the corridor cap (cap must have pruned)


def _corridor_word_length(g: Word, S: GenSet, cap: int | None = None) -> int | None:
    width = _corridor_width(S)
    d = _corridor_bfs(g.letters, S.letter_lists(), width, cap)
    return d


def _corridor_conj_length(
    core: tuple[int, ...], S: GenSet, n: int = 1, cap: int | None = None
) -> int | None:
    """Translation length of the class of core^n (core cyclically reduced).

    Minimizes word length over rotations of core^n and over one-letter spur
    conjugates of those rotations; by the near-axis property of minimizers
    this is exhaustive.  A spur changes length by at most
    slack = 2 * M' * (M-1), so rotations are searched to depth best+slack and
    spur candidates only run where a rotation landed within the slack window.
    Returns None exactly when the translation length exceeds ``cap``.
    """
    width = _corridor_width(S)
    gens = S.letter_lists()
    M = S.max_word_length
    slack = 2 * S.max_std_gen_cost * (M - 1)
    c = len(core)
    rots = [core[i:] + core[:i] for i in range(c)]
    best: int | None = None
    rot_vals: list[int | None] = []
    for r in rots:
        word = r * n
        if best is None:
            bound = None if cap is None else cap + slack
        else:
            bound = best + slack if cap is None else min(best, cap) + slack
        v = _corridor_bfs(word, gens, width, bound)
        rot_vals.append(v)
        if v is not None and (best is None or v < best):
            best = v
    if M > 1:
        spur_letters = [x for i in range(1, S.rank + 1) for x in (i, -i)]
        for r, v in zip(rots, rot_vals):
            if v is None or (best is not None and v > best + slack):
                continue
            fwd, back = r[0], -r[-1]
            for x in spur_letters:
                if x == fwd or x == back:
                    continue
                word = (-x,) + r * n + (x,)
                bound = best if cap is None else min(best or cap, cap)
                v2 = _corridor_bfs(word, gens, width, bound)
                if v2 is not None and (best is None or v2 < best):
                    best = v2
    if cap is not None and best is not None and best > cap:
        return None
    return best


# --------------------------------------------------------------------------
# engine: meet-in-the-middle double BFS / ball scan
# --------------------------------------------------------------------------


def _mitm_word_length(g: Word, S: GenSet, budget: int) -> int:
    """Bidirectional BFS: grow spheres around 1 and around g, meet in the middle."""
    fwd = {(): 0}
    bwd = {g.letters: 0}
    fwd_spheres = [{()}]
    bwd_spheres = [{g.letters}]
    if g.letters in fwd:
        return 0
    gens = S.letter_lists()
    for total in range(1, budget + 1):
        # expand the smaller side
        if len(fwd) <= len(bwd):
            side, spheres, other = fwd, fwd_spheres, bwd
        else:
            side, spheres, other = bwd, bwd_spheres, fwd
        new = set()
        for w in spheres[-1]:
            for s in gens:
                v = _mul(w, s)
                if v not in side:
                    side[v] = len(spheres)
                    new.add(v)
        spheres.append(new)
        hits = [side[v] + other[v] for v in new if v in other]
        if hits:
            return min(hits)
    raise BudgetExceededError(f"word length of {g.to_text()!r} exceeds budget {budget}")


def _ballscan_conj_length(c: CyclicClass, S: GenSet, budget: int) -> int:
    """Scan balls of growing radius; the first radius containing any conjugate
    of c is the translation length (spec'd generic route)."""
    target = c.word.letters
    oriented = c.oriented
    prev2: set = set()
    prev1 = {()}
    for r in range(1, budget + 1):
        new = set()
        for w in prev1:
            for s in S.letter_lists():
                v = _mul(w, s)
                if v and v not in prev1 and v not in prev2:
                    new.add(v)
        for v in new:
            if canonical_class(Word(v, S.rank), oriented=oriented).word.letters == target:
                return r
        prev2, prev1 = prev1, new
    raise BudgetExceededError(
        f"class {c.to_text()!r} not found within ball radius {budget}"
    )


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------


DEFAULT_SEARCH_BUDGET = 24


def word_length(
    g: Word,
    S: GenSet,
    budget: int | None = None,
    method: str = "auto",
) -> int:
    """Exact S-word-length of the element g (not of its class).

    ``budget`` caps the search radius for the scanning engines (and is the
    raise threshold for the corridor engine); the closed-form engines ignore
    it.  None means the per-engine default.
    """
    if g.is_identity:
        return 0
    if method == "auto":
        if S.is_standard_basis:
            return len(g)
        if S.is_power_type:
            method = "syllable"
        elif _corridor_ok(S):
            method = "corridor"
        else:
            method = "mitm"
    if method == "standard":
        if not S.is_standard_basis:
            raise ValueError("standard method needs the standard basis")
        return len(g)
    if method == "syllable":
        if not S.is_power_type:
            raise ValueError("syllable method needs a power-type generating set")
        return _syllable_costs(S).run_costs(g.letters, cyclic=False)
    if method == "corridor":
        if not _corridor_ok(S):
            raise ValueError("corridor method needs all generators of length <= 2")
        v = _corridor_word_length(g, S, cap=budget)
        if v is None:
            raise BudgetExceededError(f"length of {g.to_text()!r} exceeds {budget}")
        return v
    if method == "mitm":
        return _mitm_word_length(g, S, budget or DEFAULT_SEARCH_BUDGET)
    raise ValueError(f"unknown method {method!r}")


def conj_length(
    c: CyclicClass,
    S: GenSet,
    budget: int | None = None,
    method: str = "auto",
) -> int:
    """Exact translation length of the class c: min S-length over representatives."""
    if method == "auto":
        if S.is_standard_basis:
            return len(c)
        if S.is_power_type:
            method = "syllable"
        elif _corridor_ok(S):
            method = "corridor"
        else:
            method = "ball-scan"
    if method == "standard":
        if not S.is_standard_basis:
            raise ValueError("standard method needs the standard basis")
        return len(c)
    if method == "syllable":
        if not S.is_power_type:
            raise ValueError("syllable method needs a power-type generating set")
        return _syllable_costs(S).run_costs(c.word.letters, cyclic=True)
    if method == "corridor":
        if not _corridor_ok(S):
            raise ValueError("corridor method needs all generators of length <= 2")
        v = _corridor_conj_length(c.word.letters, S, 1, cap=budget)
        if v is None:
            raise BudgetExceededError(f"class length of {c.to_text()!r} exceeds {budget}")
        return v
    if method == "ball-scan":
        return _ballscan_conj_length(c, S, budget or DEFAULT_SEARCH_BUDGET)
    raise ValueError(f"unknown method {method!r}")


def conj_power_length(
    c: CyclicClass,
    S: GenSet,
    n: int,
    budget: int | None = None,
    method: str = "auto",
) -> int:
    """Exact translation length of the class of c^n (shared-engine fast path)."""
    if n < 1:
        raise ValueError("power must be >= 1")
    core = c.word.letters
    if method == "auto":
        if S.is_standard_basis:
            return n * len(core)
        if S.is_power_type:
            letters = core * n
            return _syllable_costs(S).run_costs(letters, cyclic=True)
        if _corridor_ok(S):
            v = _corridor_conj_length(core, S, n, cap=budget)
            if v is None:
                raise BudgetExceededError(
                    f"length of {c.to_text()!r}^{n} exceeds budget {budget}"
                )
            return v
        from .words import power as _pow

        cls = canonical_class(_pow(c.word, n), oriented=c.oriented)
        return _ballscan_conj_length(cls, S, budget or DEFAULT_SEARCH_BUDGET)
    from .words import power as _pow

    cls = canonical_class(_pow(c.word, n), oriented=c.oriented)
    return conj_length(cls, S, budget, method)

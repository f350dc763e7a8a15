"""Surface topology layer: signatures, peripheral structure, self-intersection,
mapping-class-group orbits and curve-type classification.

A compact surface of genus g with r >= 1 boundary components has free
fundamental group of rank 2g + r - 1.  The fixed presentation convention:

* generators a_1, b_1, ..., a_g, b_g are the handle curves (indices
  1..2g) and d_1, ..., d_{r-1} the first boundary curves (indices
  2g+1..2g+r-1);
* the last boundary class is ([a_1,b_1]...[a_g,b_g] d_1...d_{r-1})^-1.

Curves are unoriented conjugacy classes by default.  Self-intersection
numbers are computed combinatorially on a one-vertex ribbon graph whose
boundary faces realize exactly the peripheral classes above: strands of the
cyclic word become chords of the vertex disk with endpoints on the boundary
circle of the standard tree, ordered by iterated dart positions, and the
minimal self-intersection of a primitive class is the number of linked
chord pairs.  Non-primitive classes u^k add the standard cabling term:
k^2 * si(u) + (k - 1).
"""

from __future__ import annotations

import collections
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BudgetExceededError,
    ClosedSurfaceUnsupportedError,
    HypothesisViolatedError,
    IdentityClassError,
    InvalidAutomorphismError,
    UnsupportedSignatureError,
)
from .words import (
    CyclicClass,
    FreeAutomorphism,
    Word,
    apply_automorphism,
    canonical_class,
    invert,
    reduce as reduce_word,
    word_from_text,
)

__all__ = [
    "SurfaceSig",
    "PeripheralStructure",
    "MCGGens",
    "CurveTypeKey",
    "OrbitBall",
    "SameTypeResult",
    "make_surface",
    "is_essential",
    "self_intersection",
    "mcg_generators",
    "orbit_ball",
    "same_type",
]

DEFAULT_ORBIT_NODE_BUDGET = 200_000
ORBIT_SLACK = 4


@dataclass(frozen=True)
class SurfaceSig:
    """Genus / boundary signature with the derived counting exponent."""

    genus: int
    boundary: int

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise HypothesisViolatedError("genus must be >= 0")
        if self.boundary < 1:
            raise ClosedSurfaceUnsupportedError(
                "closed surfaces are unsupported (need r >= 1)"
            )
        if 3 * self.genus + self.boundary <= 3:
            raise HypothesisViolatedError(
                f"signature ({self.genus},{self.boundary}) needs 3g + r > 3"
            )

    @property
    def rank(self) -> int:
        return 2 * self.genus + self.boundary - 1

    @property
    def exponent(self) -> int:
        return 6 * self.genus - 6 + 2 * self.boundary


@dataclass(frozen=True)
class PeripheralStructure:
    """The r boundary classes, in the fixed convention order."""

    boundary_classes: tuple[CyclicClass, ...]

    def __post_init__(self) -> None:
        if len(set(self.boundary_classes)) != len(self.boundary_classes):
            raise HypothesisViolatedError("boundary classes must be pairwise distinct")

    def __iter__(self):
        return iter(self.boundary_classes)


def _boundary_words(sig: SurfaceSig) -> list[Word]:
    g, r, rank = sig.genus, sig.boundary, sig.rank
    ds = list(range(2 * g + 1, 2 * g + r))
    words = [Word((d,), rank) for d in ds]
    big: list[int] = []
    for i in range(g):
        a, b = 2 * i + 1, 2 * i + 2
        big += [a, b, -a, -b]
    big += ds
    words.append(invert(reduce_word(big, rank)))
    return words


def make_surface(g: int, r: int) -> tuple[SurfaceSig, PeripheralStructure]:
    """Signature plus peripheral classes for genus g, r boundary components."""
    sig = SurfaceSig(g, r)
    classes = tuple(canonical_class(w) for w in _boundary_words(sig))
    return sig, PeripheralStructure(classes)


def is_essential(c: CyclicClass, P: PeripheralStructure) -> bool:
    """False iff c is a boundary class or a proper power of one (unoriented)."""
    root, _ = c.primitive_root()
    root_u = canonical_class(root.word, oriented=False)
    boundary = {canonical_class(b.word, oriented=False) for b in P}
    return root_u not in boundary


# --------------------------------------------------------------------------
# ribbon structure and self-intersection
# --------------------------------------------------------------------------


class _Ribbon:
    """One-vertex fat graph realizing the surface; fixes the boundary circle order.

    sigma lists the 2*rank darts (signed letters) counterclockwise around the
    vertex. Faces are traced by dart -> sigma-successor of its reversal; the
    construction below yields faces equal to the peripheral classes (checked).
    """

    def __init__(self, sig: SurfaceSig):
        g, r = sig.genus, sig.boundary
        sigma: list[int] = []
        for i in range(g):
            a, b = 2 * i + 1, 2 * i + 2
            sigma += [a, -b, -a, b]
        for d in range(2 * g + 1, 2 * g + r):
            sigma += [d, -d]
        self.sig = sig
        self.sigma = tuple(sigma)
        self.pos = {d: i for i, d in enumerate(self.sigma)}
        self.n_darts = len(self.sigma)
        self._validate()

    def _face_cycles(self) -> list[tuple[int, ...]]:
        n = self.n_darts
        nxt = {d: self.sigma[(self.pos[-d] + 1) % n] for d in self.sigma}
        seen: set[int] = set()
        cycles = []
        for d0 in self.sigma:
            if d0 in seen:
                continue
            cyc = []
            d = d0
            while d not in seen:
                seen.add(d)
                cyc.append(d)
                d = nxt[d]
            cycles.append(tuple(cyc))
        return cycles

    def _validate(self) -> None:
        rank = self.sig.rank
        expected = {
            canonical_class(w).word.letters for w in _boundary_words(self.sig)
        }
        got = {
            canonical_class(Word(cyc, rank)).word.letters
            for cyc in self._face_cycles()
        }
        if got != expected:
            raise UnsupportedSignatureError(
                f"ribbon faces {got} do not match boundary classes {expected}"
            )


_RIBBON_CACHE: dict[tuple[int, int], _Ribbon] = {}


def _ribbon(sig: SurfaceSig) -> _Ribbon:
    key = (sig.genus, sig.boundary)
    if key not in _RIBBON_CACHE:
        _RIBBON_CACHE[key] = _Ribbon(sig)
    return _RIBBON_CACHE[key]


def _ray_digits(ribbon: _Ribbon, letters: Sequence[int], start: int, sign: int, T: int):
    """Boundary-circle coordinate of a periodic ray as a digit tuple.

    sign=+1: the forward ray w[start], w[start+1], ...; sign=-1: the backward
    ray -w[start], -w[start-1], ... (both periodic in the cyclic word).  The
    first digit is the absolute dart position; later digits are positions
    relative to the incoming dart, so lexicographic order of tuples is the
    circular order of boundary points cut at dart 0.
    """
    n = len(letters)
    pos = ribbon.pos
    k2 = ribbon.n_darts

    def letter(t: int) -> int:
        if sign > 0:
            return letters[(start + t) % n]
        return -letters[(start - t) % n]

    digits = [pos[letter(0)]]
    prev = letter(0)
    for t in range(1, T):
        cur = letter(t)
        d = (pos[cur] - pos[-prev]) % k2
        digits.append(d)
        prev = cur
    return tuple(digits)


def _in_open_arc(x, a, b) -> bool:
    """Is x strictly inside the counterclockwise arc from a to b?"""
    if a < b:
        return a < x < b
    return x > a or x < b


def _linked_pairs(ribbon: _Ribbon, letters: tuple[int, ...]) -> int:
    """Number of linked strand pairs of the primitive cyclic word."""
    n = len(letters)
    if n == 1:
        return 0
    T = 2 * n + 4
    fut = [_ray_digits(ribbon, letters, i, +1, T) for i in range(n)]
    past = [_ray_digits(ribbon, letters, (i - 1) % n, -1, T) for i in range(n)]
    count = 0
    for i in range(n):
        a, b = past[i], fut[i]
        for j in range(i + 1, n):
            c, d = past[j], fut[j]
            if c == a or c == b or d == a or d == b:
                # strands sharing an endpoint at infinity are asymptotic and
                # can be pushed off each other without crossing
                continue
            if _in_open_arc(c, a, b) != _in_open_arc(d, a, b):
                count += 1
    return count


def self_intersection(c: CyclicClass, sig: SurfaceSig) -> int:
    """Minimal self-intersection number of the free homotopy class c.

    Primitive classes are counted as linked chord pairs on the ribbon vertex;
    a k-th power of a primitive with m crossings needs k^2*m + (k-1).
    """
    if len(c.word) == 0:
        raise IdentityClassError("the identity has no curve")
    ribbon = _ribbon(sig)
    root, k = c.primitive_root()
    m = _linked_pairs(ribbon, root.word.letters)
    if k == 1:
        return m
    return k * k * m + (k - 1)


# --------------------------------------------------------------------------
# mapping class group generators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MCGGens:
    """Validated mapping-class generators plus the peripheral structure they respect."""

    gens: tuple[FreeAutomorphism, ...]
    peripheral: PeripheralStructure
    rank: int
    closure_under_inverse: bool = True

    def __len__(self) -> int:
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)


def _check_peripheral(f: FreeAutomorphism, P: PeripheralStructure) -> None:
    boundary = [canonical_class(b.word, oriented=False) for b in P]
    images = []
    for b in boundary:
        img = canonical_class(apply_automorphism(f, b.word), oriented=False)
        images.append(img)
    if sorted(i.word.letters for i in images) != sorted(
        b.word.letters for b in boundary
    ):
        raise InvalidAutomorphismError(
            f"{f!r} does not permute the boundary classes"
        )


def mcg_generators(
    sig: SurfaceSig,
    peripheral: PeripheralStructure | None = None,
    user_automorphisms: Iterable[FreeAutomorphism] | None = None,
) -> MCGGens:
    """Built-in generators for the once-holed torus; validated user lists otherwise.

    Every provided automorphism must send the set of unoriented boundary
    classes to itself; inverses are appended so the BFS alphabet is symmetric.
    """
    if peripheral is None:
        _, peripheral = make_surface(sig.genus, sig.boundary)
    listed: list[FreeAutomorphism]
    if user_automorphisms is not None:
        listed = list(user_automorphisms)
    elif (sig.genus, sig.boundary) == (1, 1):
        w = lambda t: word_from_text(t, 2)  # noqa: E731
        listed = [
            FreeAutomorphism((w("a"), w("ba")), 2, name="twist_a"),
            FreeAutomorphism((w("ab"), w("b")), 2, name="twist_b"),
            FreeAutomorphism((w("A"), w("b")), 2, name="reverse_a"),
        ]
    else:
        raise UnsupportedSignatureError(
            f"no built-in mapping-class generators for ({sig.genus},{sig.boundary}); "
            "pass user_automorphisms"
        )
    for f in listed:
        if f.rank != sig.rank:
            raise InvalidAutomorphismError(
                f"automorphism rank {f.rank} != surface rank {sig.rank}"
            )
        _check_peripheral(f, peripheral)
    gens = tuple(listed) + tuple(f.inverse() for f in listed)
    return MCGGens(gens=gens, peripheral=peripheral, rank=sig.rank)


# --------------------------------------------------------------------------
# orbits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitBall:
    """Orbit classes with canonical length <= len_bound; complete=False means
    the node budget cut the BFS and the set may be a strict subset."""

    gamma0: CyclicClass
    classes: frozenset[CyclicClass]
    len_bound: int
    working_bound: int
    complete: bool
    explored: int

    def __contains__(self, c: CyclicClass) -> bool:
        return c in self.classes

    def __len__(self) -> int:
        return len(self.classes)


def orbit_ball(
    gamma0: CyclicClass,
    G: MCGGens,
    len_bound: int,
    node_budget: int = DEFAULT_ORBIT_NODE_BUDGET,
    working_bound: int | None = None,
) -> OrbitBall:
    """BFS the mapping-class orbit of gamma0 through classes of bounded length.

    The BFS explores every class of canonical length <= working_bound
    (default len_bound + 4; orbits may leave and re-enter a length ball, so
    the slack catches short detours).  Classes of length <= len_bound are
    collected.
    """
    if not is_essential(gamma0, G.peripheral):
        raise IdentityClassError(
            f"{gamma0.to_text()!r} is not essential; it has no curve type"
        )
    W = working_bound if working_bound is not None else len_bound + ORBIT_SLACK
    start = canonical_class(gamma0.word, oriented=gamma0.oriented)
    seen = {start}
    frontier = [start]
    explored = 0
    complete = True
    while frontier:
        new = []
        for cls in frontier:
            explored += 1
            if explored > node_budget:
                complete = False
                frontier = []
                new = []
                break
            for f in G.gens:
                img = canonical_class(
                    apply_automorphism(f, cls.word), oriented=cls.oriented
                )
                if len(img.word) <= W and img not in seen:
                    seen.add(img)
                    new.append(img)
        frontier = new
    classes = frozenset(c for c in seen if len(c.word) <= len_bound)
    return OrbitBall(
        gamma0=start,
        classes=classes,
        len_bound=len_bound,
        working_bound=W,
        complete=complete,
        explored=explored,
    )


@dataclass(frozen=True)
class SameTypeResult:
    verdict: str  # "yes" | "no-within-budget"
    path: tuple[str, ...] = ()

    @property
    def is_yes(self) -> bool:
        return self.verdict == "yes"


def same_type(
    c1: CyclicClass,
    c2: CyclicClass,
    G: MCGGens,
    node_budget: int = DEFAULT_ORBIT_NODE_BUDGET,
    working_bound: int | None = None,
) -> SameTypeResult:
    """Decide orbit equivalence by bidirectional BFS.

    "yes" carries a verified generator path from c1 to c2; "no-within-budget"
    is not a proof of distinctness.
    """
    for c in (c1, c2):
        if not is_essential(c, G.peripheral):
            raise IdentityClassError(f"{c.to_text()!r} is not essential")
    a = canonical_class(c1.word, oriented=c1.oriented)
    b = canonical_class(c2.word, oriented=c2.oriented)
    W = working_bound
    if W is None:
        W = max(len(a.word), len(b.word)) + ORBIT_SLACK

    names = [f.name or f"g{i}" for i, f in enumerate(G.gens)]
    inverse_index = {}
    for i, f in enumerate(G.gens):
        for j, h in enumerate(G.gens):
            if f.images == h.inverse_images and f.inverse_images == h.images:
                inverse_index[i] = j
                break

    # parents: class -> (prev class, gen index) per side
    sides = [{a: None}, {b: None}]
    frontiers = [[a], [b]]
    explored = 0

    def build_path(meet: CyclicClass) -> tuple[str, ...]:
        fwd = []
        cur = meet
        while sides[0][cur] is not None:
            prev, gi = sides[0][cur]
            fwd.append(gi)
            cur = prev
        fwd.reverse()
        bwd = []
        cur = meet
        while sides[1][cur] is not None:
            prev, gi = sides[1][cur]
            bwd.append(inverse_index[gi])
            cur = prev
        seq = fwd + bwd
        # verify the certificate end to end
        cur_cls = a
        for gi in seq:
            cur_cls = canonical_class(
                apply_automorphism(G.gens[gi], cur_cls.word), oriented=cur_cls.oriented
            )
        if cur_cls != b:
            raise AssertionError("internal: orbit certificate failed verification")
        return tuple(names[gi] for gi in seq)

    if a == b:
        return SameTypeResult("yes", ())
    while frontiers[0] or frontiers[1]:
        side = 0 if (frontiers[0] and len(sides[0]) <= len(sides[1])) else 1
        if not frontiers[side]:
            side = 1 - side
        new = []
        for cls in frontiers[side]:
            explored += 1
            if explored > node_budget:
                return SameTypeResult("no-within-budget")
            for gi, f in enumerate(G.gens):
                img = canonical_class(
                    apply_automorphism(f, cls.word), oriented=cls.oriented
                )
                if len(img.word) > W or img in sides[side]:
                    continue
                sides[side][img] = (cls, gi)
                if img in sides[1 - side]:
                    if side == 0:
                        return SameTypeResult("yes", build_path(img))
                    return SameTypeResult("yes", build_path(img))
                new.append(img)
        frontiers[side] = new
    return SameTypeResult("no-within-budget")


@dataclass(frozen=True)
class CurveTypeKey:
    """How count experiments bucket curves: by exact orbit or by the coarser
    self-intersection invariant."""

    mode: str  # "orbit" | "invariant"
    orbit_id: CyclicClass | None = None
    si_value: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("orbit", "invariant"):
            raise ValueError("mode must be 'orbit' or 'invariant'")
        if self.mode == "orbit" and self.orbit_id is None:
            raise ValueError("orbit mode needs orbit_id")
        if self.mode == "invariant" and self.si_value is None:
            raise ValueError("invariant mode needs si_value")

"""Exact free-group algebra: reduced words, cyclic (conjugacy) classes, automorphisms.

Letters are nonzero signed integers: ``i`` is the i-th generator, ``-i`` its
inverse.  Words are always stored freely reduced.  The total letter order used
for canonical forms is

    a1 < a1^-1 < a2 < a2^-1 < ...

i.e. ``1 < -1 < 2 < -2 < ...``, and the canonical representative of a
conjugacy class is the least rotation of its cyclically reduced core (also
minimized over the inverse word in unoriented mode).

Text encoding: ``a``..``z`` are generators 1..26 and uppercase letters are
their inverses, so ``abAB`` reads as a b a^-1 b^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    IdentityClassError,
    InvalidAutomorphismError,
    LetterRangeError,
    RankMismatchError,
)

__all__ = [
    "Word",
    "CyclicClass",
    "FreeAutomorphism",
    "reduce",
    "multiply",
    "invert",
    "power",
    "cyclic_reduce",
    "canonical_class",
    "apply_automorphism",
    "word_from_text",
    "word_to_text",
    "letter_key",
]


def letter_key(letter: int) -> int:
    """Position of a letter in the fixed order 1 < -1 < 2 < -2 < ...

    >>> [letter_key(x) for x in (1, -1, 2, -2)]
    [0, 1, 2, 3]
    """
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def _word_key(letters: Iterable[int]) -> tuple[int, ...]:
    return tuple(letter_key(x) for x in letters)


def _reduce_letters(raw: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in raw:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _check_letters(letters: Iterable[int], rank: int) -> None:
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise LetterRangeError(f"letter {x} out of range for rank {rank}")


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group of the given rank.

    Construct with :func:`reduce` (or :meth:`Word.make`) unless the letters
    are already known to be reduced.
    """

    letters: tuple[int, ...]
    rank: int

    def __post_init__(self) -> None:
        _check_letters(self.letters, self.rank)
        for i in range(len(self.letters) - 1):
            if self.letters[i] == -self.letters[i + 1]:
                raise ValueError(f"letters {self.letters} are not freely reduced")

    @staticmethod
    def make(raw: Sequence[int], rank: int) -> "Word":
        _check_letters(raw, rank)
        return Word(_reduce_letters(raw), rank)

    @staticmethod
    def identity(rank: int) -> "Word":
        return Word((), rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return power(invert(self), -n)
        return power(self, n)

    def inverse(self) -> "Word":
        return invert(self)

    def is_cyclically_reduced(self) -> bool:
        w = self.letters
        return len(w) < 2 or w[0] != -w[-1]

    def to_text(self) -> str:
        return word_to_text(self)

    def __repr__(self) -> str:
        return f"Word({word_to_text(self)!r}, rank={self.rank})"


def reduce(raw: Sequence[int], rank: int) -> Word:
    """Freely reduce a raw letter sequence.

    >>> reduce([1, -1, 2], 2).letters
    (2,)
    >>> reduce([], 2).is_identity
    True
    >>> reduce([1, -2, 2, 1], 2).letters
    (1, 1)
    """
    _check_letters(raw, rank)
    return Word(_reduce_letters(raw), rank)


def multiply(u: Word, v: Word) -> Word:
    """Reduced product u*v."""
    if u.rank != v.rank:
        raise RankMismatchError(f"rank {u.rank} != rank {v.rank}")
    a = list(u.letters)
    for x in v.letters:
        if a and a[-1] == -x:
            a.pop()
        else:
            a.append(x)
    return Word(tuple(a), u.rank)


def invert(u: Word) -> Word:
    """Inverse word: reversed letters with flipped signs."""
    return Word(tuple(-x for x in reversed(u.letters)), u.rank)


def power(u: Word, n: int) -> Word:
    """Reduced n-th power, n >= 0.

    For cyclically reduced u this is just n-fold concatenation; in general the
    conjugator shell cancels between factors, so we exponentiate the core.
    """
    if n < 0:
        raise ValueError("power expects n >= 0; invert first for negative n")
    if n == 0 or u.is_identity:
        return Word.identity(u.rank)
    core, conj = cyclic_reduce(u)
    mid = core.letters * n
    return multiply(multiply(conj, Word(mid, u.rank)), invert(conj))


def cyclic_reduce(u: Word) -> tuple[Word, Word]:
    """Split u = conj * core * conj^-1 with core cyclically reduced.

    >>> core, conj = cyclic_reduce(reduce([2, 1, -2], 2))
    >>> core.letters, conj.letters
    ((1,), (2,))
    """
    w = list(u.letters)
    pre: list[int] = []
    while len(w) >= 2 and w[0] == -w[-1]:
        pre.append(w[0])
        w = w[1:-1]
    return Word(tuple(w), u.rank), Word(tuple(pre), u.rank)


def _min_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    best = letters
    best_key = _word_key(letters)
    for i in range(1, len(letters)):
        rot = letters[i:] + letters[:i]
        k = _word_key(rot)
        if k < best_key:
            best, best_key = rot, k
    return best


def _primitive_root(letters: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Smallest period d of the cyclic word; returns (root, n // d)."""
    n = len(letters)
    for d in range(1, n + 1):
        if n % d == 0 and letters == letters[d:] + letters[:d]:
            return letters[:d], n // d
    return letters, 1


@dataclass(frozen=True)
class CyclicClass:
    """Canonical form of a conjugacy class (a free homotopy class of curves).

    ``word`` is the cyclically reduced, lexicographically least rotation; in
    unoriented mode (the default policy) the inverse word's rotations compete
    too, so a class equals the class of its inverse.
    """

    word: Word
    oriented: bool = False

    def __len__(self) -> int:
        return len(self.word)

    @property
    def rank(self) -> int:
        return self.word.rank

    def inverse_class(self) -> "CyclicClass":
        return canonical_class(invert(self.word), oriented=self.oriented)

    def primitive_root(self) -> tuple["CyclicClass", int]:
        root, k = _primitive_root(self.word.letters)
        return canonical_class(Word(root, self.rank), oriented=self.oriented), k

    def representative(self) -> Word:
        return self.word

    def to_text(self) -> str:
        return word_to_text(self.word)

    def __repr__(self) -> str:
        flag = "oriented" if self.oriented else "unoriented"
        return f"CyclicClass({self.to_text()!r}, {flag})"


def canonical_class(u: Word, oriented: bool = False) -> CyclicClass:
    """Canonical conjugacy-class form of a nontrivial word.

    >>> canonical_class(reduce([2, 1], 2)).to_text()
    'ab'
    >>> canonical_class(reduce([2, 1, -2], 2)).to_text()
    'a'
    >>> canonical_class(reduce([1, -2], 2)).to_text()
    'aB'
    """
    core, _ = cyclic_reduce(u)
    if core.is_identity:
        raise IdentityClassError("the identity has no curve class")
    best = _min_rotation(core.letters)
    if not oriented:
        inv_core = tuple(-x for x in reversed(core.letters))
        alt = _min_rotation(inv_core)
        if _word_key(alt) < _word_key(best):
            best = alt
    return CyclicClass(Word(best, u.rank), oriented)


@dataclass(frozen=True)
class FreeAutomorphism:
    """An automorphism of the free group, given by generator images.

    Invertibility is certified at construction: either pass the known
    ``inverse_images`` or let the constructor derive them by Nielsen
    reduction.  Composition with the inverse must fix every generator.
    """

    images: tuple[Word, ...]
    rank: int
    inverse_images: tuple[Word, ...] = field(default=None)  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.images) != self.rank:
            raise InvalidAutomorphismError(
                f"need {self.rank} images, got {len(self.images)}"
            )
        for img in self.images:
            if img.rank != self.rank:
                raise RankMismatchError("image rank mismatch")
        if self.inverse_images is None:
            object.__setattr__(
                self, "inverse_images", _derive_inverse(self.images, self.rank)
            )
        self._check_inverse()

    def _check_inverse(self) -> None:
        if len(self.inverse_images) != self.rank:
            raise InvalidAutomorphismError("wrong number of inverse images")
        for i in range(1, self.rank + 1):
            gen = Word((i,), self.rank)
            back = _substitute(self.inverse_images, _substitute(self.images, gen))
            forth = _substitute(self.images, _substitute(self.inverse_images, gen))
            if back != gen or forth != gen:
                raise InvalidAutomorphismError(
                    f"inverse check failed on generator {i}"
                )

    def __call__(self, u: Word) -> Word:
        return apply_automorphism(self, u)

    def inverse(self) -> "FreeAutomorphism":
        nm = f"{self.name}^-1" if self.name else ""
        return FreeAutomorphism(self.inverse_images, self.rank, self.images, nm)

    def compose(self, other: "FreeAutomorphism") -> "FreeAutomorphism":
        """self after other: (self.compose(other))(w) == self(other(w))."""
        if self.rank != other.rank:
            raise RankMismatchError("rank mismatch in composition")
        imgs = tuple(_substitute(self.images, img) for img in other.images)
        inv = tuple(
            _substitute(other.inverse_images, img) for img in self.inverse_images
        )
        return FreeAutomorphism(imgs, self.rank, inv)

    def __repr__(self) -> str:
        imgs = ", ".join(w.to_text() or "1" for w in self.images)
        label = f" {self.name!r}" if self.name else ""
        return f"FreeAutomorphism({imgs}{label})"


def _substitute(images: tuple[Word, ...], u: Word) -> Word:
    rank = images[0].rank
    out: list[int] = []
    for x in u.letters:
        img = images[abs(x) - 1].letters
        seq = img if x > 0 else tuple(-y for y in reversed(img))
        for y in seq:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(tuple(out), rank)


def apply_automorphism(f: FreeAutomorphism, u: Word) -> Word:
    """Image of u under f (reduced)."""
    if f.rank != u.rank:
        raise RankMismatchError(f"rank {f.rank} != rank {u.rank}")
    return _substitute(f.images, u)


def _derive_inverse(images: tuple[Word, ...], rank: int) -> tuple[Word, ...]:
    """Find inverse images by Nielsen-reducing the image tuple.

    Tracks the row operations as words over formal symbols 1..rank so that
    when the tuple reaches a signed permutation of the basis we can read off
    where each standard generator came from.  Rejects tuples the greedy
    reduction cannot bring to a basis.
    """
    current = [list(img.letters) for img in images]
    # trace[i] = word in the ORIGINAL images equal to current[i]
    trace = [[i + 1] for i in range(rank)]

    def red(seq: list[int]) -> list[int]:
        out: list[int] = []
        for x in seq:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return out

    def neg(seq: list[int]) -> list[int]:
        return [-x for x in reversed(seq)]

    improved = True
    guard = 0
    while improved:
        guard += 1
        if guard > 10_000:
            raise InvalidAutomorphismError("Nielsen reduction did not terminate")
        improved = False
        for i in range(rank):
            for j in range(rank):
                if i == j:
                    continue
                for si in (1, -1):
                    for sj in (1, -1):
                        a = current[i] if si > 0 else neg(current[i])
                        b = current[j] if sj > 0 else neg(current[j])
                        cand = red(a + b)
                        if len(cand) < len(current[i]) and cand:
                            current[i] = cand if si > 0 else neg(cand)
                            ta = trace[i] if si > 0 else neg(trace[i])
                            tb = trace[j] if sj > 0 else neg(trace[j])
                            t = red(ta + tb)
                            trace[i] = t if si > 0 else neg(t)
                            improved = True
    # current must now be a signed permutation of the basis
    inverse: list[Word | None] = [None] * rank
    for i in range(rank):
        if len(current[i]) != 1:
            raise InvalidAutomorphismError(
                "images do not Nielsen-reduce to a basis; not an automorphism "
                "(or beyond the greedy reduction: pass inverse_images explicitly)"
            )
        g = current[i][0]
        t = trace[i] if g > 0 else neg(trace[i])
        inverse[abs(g) - 1] = Word(tuple(t), rank)
    if any(w is None for w in inverse):
        raise InvalidAutomorphismError("images do not hit every generator")
    return tuple(inverse)  # type: ignore[arg-type]


# --- text encoding -------------------------------------------------------

_ALPHA = "abcdefghijklmnopqrstuvwxyz"


def word_from_text(text: str, rank: int | None = None) -> Word:
    """Parse the letter encoding; lowercase = generator, uppercase = inverse.

    >>> word_from_text("abAB").letters
    (1, 2, -1, -2)
    >>> word_from_text("", 2).is_identity
    True
    """
    letters: list[int] = []
    for ch in text.strip():
        if ch in _ALPHA:
            letters.append(_ALPHA.index(ch) + 1)
        elif ch.lower() in _ALPHA:
            letters.append(-(_ALPHA.index(ch.lower()) + 1))
        else:
            raise LetterRangeError(f"cannot parse letter {ch!r}")
    if rank is None:
        rank = max((abs(x) for x in letters), default=1)
    return reduce(letters, rank)


def word_to_text(u: Word) -> str:
    """Inverse of :func:`word_from_text`; bit-exact round-trip on reduced words."""
    out = []
    for x in u.letters:
        ch = _ALPHA[abs(x) - 1]
        out.append(ch if x > 0 else ch.upper())
    return "".join(out)

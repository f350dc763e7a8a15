"""Stable translation length of classes and its linear extension to rational currents.

The stable length of a class c with respect to a generating set S is
lim_n l_S(c^n)/n; by subadditivity of n -> l_S(c^n) (Fekete) the limit equals
inf_n l_S(c^n)/n, so every sampled power gives a certified upper bound.  The
certified lower bound comes from the bi-Lipschitz comparison with the
standard basis: each generator spells at most M standard letters, so
l_S(c^n) >= n*len(c)/M and the stable length is at least len(c)/M.

All arithmetic is exact (fractions.Fraction); nothing is floated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cayley import GenSet, conj_length, conj_power_length
from .errors import BudgetExceededError
from .words import CyclicClass, canonical_class

__all__ = [
    "StableLengthEstimate",
    "BracketEstimate",
    "Current",
    "power_lengths",
    "stable_length",
    "stable_length_current",
    "flip",
    "check_sandwich",
    "default_power_schedule",
]


@dataclass(frozen=True)
class StableLengthEstimate:
    """Bracket [lower, upper] around the stable length of one class.

    ``upper`` is min over sampled powers of l_S(c^n)/n (a true bound by
    Fekete); ``lower`` is the bi-Lipschitz bound len(c)/M.  ``exact`` is set
    when the bracket closes, or when the doubling heuristic fired, in which
    case ``certificate`` says which ("bracket" is a proof, "doubling" is a
    flagged heuristic).  ``complete`` is False when a budget cut the schedule
    short (the bracket is still valid).
    """

    lower: Fraction
    upper: Fraction
    samples: tuple[tuple[int, int], ...]
    exact: bool
    certificate: str = "none"
    complete: bool = True

    @property
    def value(self) -> Fraction:
        """Best point estimate: the certified upper bound."""
        return self.upper

    def as_dict(self) -> dict:
        return {
            "lower": str(self.lower),
            "upper": str(self.upper),
            "exact": self.exact,
            "certificate": self.certificate,
            "complete": self.complete,
            "samples": [[n, l] for n, l in self.samples],
        }


@dataclass(frozen=True)
class BracketEstimate:
    """Aggregated bracket for a current (weighted sum of class brackets)."""

    lower: Fraction
    upper: Fraction
    exact: bool
    complete: bool = True


class Current:
    """Finite nonnegative-rational weighted sum of conjugacy classes.

    The rational points of the current cone: weights are positive Fractions
    and keys are canonical classes (re-canonicalized on construction so that
    duplicate spellings of one class merge).
    """

    def __init__(self, terms: Mapping[CyclicClass, Fraction | int] | Iterable):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[CyclicClass, Fraction] = {}
        for cls, weight in items:
            w = Fraction(weight)
            if w < 0:
                raise ValueError("current weights must be positive")
            if w == 0:
                continue
            key = canonical_class(cls.word, oriented=cls.oriented)
            acc[key] = acc.get(key, Fraction(0)) + w
        self._terms = dict(sorted(acc.items(), key=lambda kv: kv[0].word.letters))

    @property
    def terms(self) -> dict[CyclicClass, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def scale(self, t: Fraction | int) -> "Current":
        t = Fraction(t)
        if t < 0:
            raise ValueError("scale factor must be nonnegative")
        return Current({c: w * t for c, w in self._terms.items()})

    def __add__(self, other: "Current") -> "Current":
        acc = dict(self._terms)
        for c, w in other._terms.items():
            acc[c] = acc.get(c, Fraction(0)) + w
        return Current(acc)

    def __eq__(self, other) -> bool:
        return isinstance(other, Current) and self._terms == other._terms

    def __repr__(self) -> str:
        parts = " + ".join(f"{w}*{c.to_text()}" for c, w in self._terms.items())
        return f"Current({parts or '0'})"


def default_power_schedule(n_max: int, S: GenSet) -> tuple[int, ...]:
    """Doubling schedule 1,2,4,... plus multiples of the longest generator.

    The extra multiples let the upper bound meet the lower bound len(c)/M
    when a long generator is the efficient spelling (powers of a standard
    generator reach it only at exponents divisible by M).
    """
    ns = set()
    k = 1
    while k <= n_max:
        ns.add(k)
        k *= 2
    M = S.max_word_length
    if M > 1:
        k = M
        while k <= n_max:
            ns.add(k)
            k *= 2
    return tuple(sorted(ns))


def power_lengths(
    c: CyclicClass,
    S: GenSet,
    ns: Sequence[int],
    budget: int | None = None,
) -> list[tuple[int, int]]:
    """Exact translation lengths of the powers c^n for n in ns."""
    if not ns or any(n <= 0 for n in ns) or list(ns) != sorted(set(ns)):
        raise ValueError("ns must be positive, strictly increasing")
    return [(n, conj_power_length(c, S, n, budget=budget)) for n in ns]


def stable_length(
    c: CyclicClass,
    S: GenSet,
    n_max: int = 16,
    budget: int | None = None,
) -> StableLengthEstimate:
    """Bracket the stable length of c, sampling powers up to n_max.

    Stops early once the bracket closes.  On BudgetExceededError the partial
    bracket computed so far is returned with complete=False.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lower = Fraction(len(c), S.max_word_length)
    samples: list[tuple[int, int]] = []
    upper: Fraction | None = None
    complete = True
    for n in default_power_schedule(n_max, S):
        try:
            ln = conj_power_length(c, S, n, budget=budget)
        except BudgetExceededError:
            complete = False
            break
        samples.append((n, ln))
        q = Fraction(ln, n)
        if upper is None or q < upper:
            upper = q
        if upper == lower:
            break
    if upper is None:
        raise BudgetExceededError(
            f"no power of {c.to_text()!r} fit in the budget; no bracket available"
        )
    exact = False
    certificate = "none"
    if upper == lower:
        exact = True
        certificate = "bracket"
    elif _doubling_fired(samples):
        exact = True
        certificate = "doubling"
    return StableLengthEstimate(
        lower=lower,
        upper=upper,
        samples=tuple(samples),
        exact=exact,
        certificate=certificate,
        complete=complete,
    )


def _doubling_fired(samples: Sequence[tuple[int, int]]) -> bool:
    """Two consecutive doublings n -> 2n -> 4n with exactly additive lengths."""
    table = dict(samples)
    for n, ln in samples:
        if table.get(2 * n) == 2 * ln and table.get(4 * n) == 4 * ln:
            return True
    return False


def stable_length_current(
    mu: Current,
    S: GenSet,
    n_max: int = 16,
    budget: int | None = None,
) -> BracketEstimate:
    """Weighted sum of per-class brackets; brackets add and scale exactly."""
    if not mu:
        raise ValueError("current has no terms")
    lo = Fraction(0)
    hi = Fraction(0)
    exact = True
    complete = True
    for cls, w in mu.terms.items():
        est = stable_length(cls, S, n_max=n_max, budget=budget)
        lo += w * est.lower
        hi += w * est.upper
        exact &= est.exact
        complete &= est.complete
    return BracketEstimate(lower=lo, upper=hi, exact=exact, complete=complete)


def flip(mu: Current) -> Current:
    """Orientation reversal: replace every class by its inverse class.

    Under the unoriented policy classes already equal their inverses, so this
    is the identity map there.
    """
    return Current({c.inverse_class(): w for c, w in mu.terms.items()})


def check_sandwich(
    c: CyclicClass,
    S: GenSet,
    n_max: int = 8,
    budget: int | None = None,
) -> dict:
    """Compare the stable upper bound against the plain translation length.

    The first sandwich inequality (stable <= plain) holds for every isometry,
    so ratio <= 1 always; how close it sits to 1 is the statistical content.
    """
    ell = conj_length(c, S, budget=budget)
    est = stable_length(c, S, n_max=n_max, budget=budget)
    ratio = Fraction(est.upper) / ell
    if ratio > 1:
        raise AssertionError(
            f"sandwich violated for {c.to_text()!r}: upper {est.upper} > ell {ell}"
        )
    return {"ell": ell, "upper": est.upper, "ratio": ratio, "estimate": est}

"""Vectorized packed-word kernels for ball enumeration and canonicalization.

Words are packed into int64: a leading 1 bit (sentinel) followed by one
fixed-width field per letter, most significant field = first letter.  Letter
fields use the canonical order a=0, a^-1=1, b=2, b^-1=3, ... so that, within a
fixed length, integer comparison of codes is lexicographic comparison of
words, and flipping the lowest field bit inverts a letter.

Capacity at rank 2 is 31 letters per word, which covers every workload the
package enumerates with arrays; longer words fall back to the tuple-based
paths in :mod:`curvecount.cayley`.
"""

from __future__ import annotations

import numpy as np

__all__ = ["PackedSpace"]


class PackedSpace:
    """Fixed-rank packing parameters plus the vector kernels that use them."""

    def __init__(self, rank: int):
        self.rank = rank
        bits = 1
        while (1 << bits) < 2 * rank:
            bits += 1
        self.bits = bits
        self.mask = (1 << bits) - 1
        self.capacity = 63 // bits  # one bit reserved for the sentinel

    # -- scalar helpers ---------------------------------------------------

    def letter_code(self, letter: int) -> int:
        return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)

    def code_letter(self, code: int) -> int:
        idx = code // 2 + 1
        return idx if code % 2 == 0 else -idx

    def encode(self, letters) -> int:
        n = 1
        for x in letters:
            n = (n << self.bits) | self.letter_code(x)
        return n

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        while code > 1:
            out.append(self.code_letter(code & self.mask))
            code >>= self.bits
        return tuple(reversed(out))

    def length_of(self, code: int) -> int:
        return (int(code).bit_length() - 1) // self.bits

    # -- vector kernels ----------------------------------------------------

    def mul_letter(self, codes: np.ndarray, lens: np.ndarray, letter_code: int):
        """Right-multiply every packed word by one letter, with cancellation."""
        last = codes & self.mask
        cancel = (lens > 0) & (last == (letter_code ^ 1))
        grown = (codes << self.bits) | letter_code
        codes = np.where(cancel, codes >> self.bits, grown)
        lens = np.where(cancel, lens - 1, lens + 1)
        return codes, lens

    def mul_word(self, codes: np.ndarray, lens: np.ndarray, letters):
        for x in letters:
            codes, lens = self.mul_letter(codes, lens, self.letter_code(x))
        return codes, lens

    def strip_first(self, codes: np.ndarray, lens: np.ndarray):
        """Drop the leading letter (lens must be >= 1); returns new codes."""
        width = (lens.astype(np.int64) - 1) * self.bits
        low = codes & ((np.int64(1) << width) - 1)
        return low | (np.int64(1) << width)

    def first_letter(self, codes: np.ndarray, lens: np.ndarray) -> np.ndarray:
        shift = np.maximum(lens.astype(np.int64) - 1, 0) * self.bits
        return (codes >> shift) & self.mask

    def cyclic_reduce(self, codes: np.ndarray, lens: np.ndarray):
        """Strip mutually inverse first/last letters until cyclically reduced."""
        codes = codes.copy()
        lens = lens.astype(np.int64).copy()
        while True:
            active = lens >= 2
            if not active.any():
                break
            first = self.first_letter(codes, lens)
            last = codes & self.mask
            strip = active & (first == (last ^ 1))
            if not strip.any():
                break
            sub = codes[strip] >> self.bits
            sublen = lens[strip] - 1
            codes[strip] = self.strip_first(sub, sublen)
            lens[strip] = sublen - 1
        return codes, lens

    def rotate1(self, codes: np.ndarray, lens: np.ndarray) -> np.ndarray:
        """Move the first letter to the end (lens fixed, must be >= 1)."""
        first = self.first_letter(codes, lens)
        rest = self.strip_first(codes, lens)
        return (rest << self.bits) | first

    def invert(self, codes: np.ndarray, lens: np.ndarray) -> np.ndarray:
        """Packed inverse words: reversed letters, signs flipped."""
        out = np.ones_like(codes)
        tmp = codes.copy()
        maxlen = int(lens.max()) if len(lens) else 0
        for _ in range(maxlen):
            live = tmp > 1
            letter = tmp & self.mask
            out = np.where(live, (out << self.bits) | (letter ^ 1), out)
            tmp = np.where(live, tmp >> self.bits, tmp)
        return out

    def canonical(self, codes: np.ndarray, lens: np.ndarray, oriented: bool = False):
        """Canonical conjugacy-class code for every word (vector form).

        Returns (canonical codes, core lengths).  Identity words (length 0
        after cyclic reduction) keep code 1.
        """
        core, clens = self.cyclic_reduce(codes, lens)
        canon = core.copy()
        for n in np.unique(clens):
            n = int(n)
            if n == 0:
                continue
            sel = clens == n
            group = core[sel]
            ln = np.full(group.shape, n, dtype=np.int64)
            best = group.copy()
            cur = group
            for _ in range(n - 1):
                cur = self.rotate1(cur, ln)
                np.minimum(best, cur, out=best)
            if not oriented:
                cur = self.invert(group, ln)
                np.minimum(best, cur, out=best)
                for _ in range(n - 1):
                    cur = self.rotate1(cur, ln)
                    np.minimum(best, cur, out=best)
            canon[sel] = best
        return canon, clens

    # -- ball BFS -----------------------------------------------------------

    def bfs_spheres(
        self,
        gen_letter_lists,
        radius: int,
        *,
        max_elements: int | None = None,
        workers: int = 1,
    ):
        """Exact metric spheres 0..radius as sorted code arrays.

        ``gen_letter_lists``: the generating set as letter tuples.  Sharding
        by ``workers`` only changes chunking; the merged result is the sorted
        union either way, so output is worker-count independent.
        """
        max_gen_len = max(len(g) for g in gen_letter_lists)
        if radius * max_gen_len > self.capacity:
            raise OverflowError("word capacity exceeded; use the dict backend")
        spheres = [np.array([1], dtype=np.int64)]
        sphere_lens = [np.array([0], dtype=np.int64)]
        total = 1
        for r in range(1, radius + 1):
            prev = spheres[r - 1]
            plens = sphere_lens[r - 1]
            parts = []
            part_lens = []
            nshards = max(1, min(workers, len(prev)))
            bounds = np.linspace(0, len(prev), nshards + 1, dtype=int)

            def expand(lo: int, hi: int):
                seg = prev[lo:hi]
                seg_l = plens[lo:hi]
                outs = []
                out_ls = []
                for g in gen_letter_lists:
                    c, l = self.mul_word(seg.copy(), seg_l.copy(), g)
                    outs.append(c)
                    out_ls.append(l)
                return np.concatenate(outs), np.concatenate(out_ls)

            if nshards == 1:
                cand, cand_l = expand(0, len(prev))
            else:
                from concurrent.futures import ThreadPoolExecutor

                with ThreadPoolExecutor(max_workers=nshards) as pool:
                    futs = [
                        pool.submit(expand, bounds[i], bounds[i + 1])
                        for i in range(nshards)
                    ]
                    results = [f.result() for f in futs]
                cand = np.concatenate([r[0] for r in results])
                cand_l = np.concatenate([r[1] for r in results])

            cand, idx = np.unique(cand, return_index=True)
            cand_l = cand_l[idx]
            keep = ~np.isin(cand, prev, assume_unique=True)
            if r >= 2:
                keep &= ~np.isin(cand, spheres[r - 2], assume_unique=True)
            keep &= cand != 1
            spheres.append(cand[keep])
            sphere_lens.append(cand_l[keep])
            total += int(keep.sum())
            if max_elements is not None and total > max_elements:
                raise MemoryError(f"ball exceeds {max_elements} elements")
        return spheres, sphere_lens

"""Bit-packed multisets for the enumeration hot loop.

Each species owns a fixed-width field of a Python int; the top bit of every
field is a guard that absorbs borrows, so saturating subtraction, subset
tests and species-wise maximum are a handful of integer operations.
Counts must stay below ``2**(bits-1)``; the width bound guarantees that.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

from .crn import CRN, State
from .signatures import ReducedSignature


class PackedKey(NamedTuple):
    initial: int
    final: int
    width: int
    closed: bool
    dfs: frozenset  # (low, high) pairs of intermediate-only packed states
    rfs: frozenset


class PackedCRN:
    def __init__(self, crn: CRN, max_count: int):
        self.crn = crn
        self.species = sorted(crn.species)
        bits = max(8, (2 * max_count + 8).bit_length() + 1)
        self.bits = bits
        self.field = (1 << bits) - 1
        self.modulus = self.field  # x % (2**bits - 1) sums the fields
        self.offset = {sp: i * bits for i, sp in enumerate(self.species)}
        self.guard = sum(1 << (off + bits - 1) for off in self.offset.values())
        self.fmask = sum(self.field << self.offset[sp] for sp in self.species
                         if sp in crn.formal)
        self.imask = sum(self.field << self.offset[sp] for sp in self.species
                         if sp not in crn.formal)
        self.reactions = []
        for r in crn.reactions:
            R, P = self.encode(r.reactants), self.encode(r.products)
            self.reactions.append((R, P, R & self.imask, P & self.imask, P & self.fmask))
        self.empty = PackedKey(0, 0, 0, True, frozenset(), frozenset())

    def encode(self, s: State) -> int:
        return sum(n << self.offset[sp] for sp, n in s.items())

    def decode(self, x: int) -> State:
        f = self.field
        return State._from_items(
            (sp, (x >> self.offset[sp]) & f) for sp in self.species
            if (x >> self.offset[sp]) & f)

    def size(self, x: int) -> int:
        return x % self.modulus if x else 0

    def sat_sub(self, a: int, b: int) -> int:
        d = (a | self.guard) - b
        g = d & self.guard
        return d & (g - (g >> (self.bits - 1)))

    def subset(self, a: int, b: int) -> bool:
        return ((b | self.guard) - a) & self.guard == self.guard

    def extend(self, key: PackedKey, idx: int) -> Optional[PackedKey]:
        """Packed twin of :func:`signatures.extend_reduced`."""
        R, P, Ri, Pi, Pf = self.reactions[idx]
        guard, hb = self.guard, self.bits - 1
        final = key.final
        d = (R | guard) - final
        g = d & guard
        delta = d & (g - (g >> hb))
        if delta & self.imask:
            return None
        initial = key.initial + delta
        new_final = final + delta - R + P
        nff = new_final & self.fmask
        m = self.modulus
        width = max(key.width + (delta % m if delta else 0),
                    new_final % m if new_final else 0)
        closed = key.closed and ((initial | guard) - nff) & guard == guard

        dfs = set()
        if Ri:
            for t1, t2 in key.dfs:
                if ((t2 | guard) - Ri) & guard == guard:
                    a, b = t1, t2 - Ri + Pi
                    dfs.add((a, b) if a <= b else (b, a))
                if ((t1 | guard) - Ri) & guard == guard:
                    a, b = t2, t1 - Ri + Pi
                    dfs.add((a, b) if a <= b else (b, a))
        else:
            if key.width > 0:
                a, b = final & self.imask, Pi
                dfs.add((a, b) if a <= b else (b, a))
            for t1, t2 in key.dfs:
                a, b = t1, t2 + Pi
                dfs.add((a, b) if a <= b else (b, a))
                a, b = t2, t1 + Pi
                dfs.add((a, b) if a <= b else (b, a))

        if delta:
            rfs = set()
        else:
            rfs = set()
            for t in key.rfs:
                d = (nff | guard) - t
                g = d & guard
                rfs.add(t + (d & (g - (g >> hb))))
        if key.closed and ((R | guard) - (final & self.fmask)) & guard == guard:
            rfs.add(Pf)
        return PackedKey(initial, new_final, width, closed, frozenset(dfs), frozenset(rfs))

    def view(self, key: PackedKey) -> ReducedSignature:
        dec = self.decode
        return ReducedSignature(
            dec(key.initial), dec(key.final), key.width, key.closed,
            frozenset(_sorted_pair(dec(a), dec(b)) for a, b in key.dfs),
            frozenset(dec(t) for t in key.rfs))


def _sorted_pair(a: State, b: State) -> tuple:
    return (a, b) if not b < a else (b, a)

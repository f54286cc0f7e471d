"""Closed-loop ABC-chain emulator with a fixed three-cell tape head.

The chain has m triples (m odd) of cells in species order A, B, C,
repeating clockwise; cell index 3*t + s addresses species s in
{0: A, 1: B, 2: C} of triple t. One triple (the head) supports local
gates; everything else moves only through species-parallel swap layers:

    SWAP_AB   swaps every (A_t, B_t) pair
    SWAP_BC   swaps every (B_t, C_t) pair
    SWAP_AC   swaps every (C_t, A_{t+1}) pair (wraps around the loop)

Composing four layers gives a "shift" that keeps one species fixed and
moves the other two one triple in opposite directions; all routing is
built from these shifts plus head-local swaps. Pulse counts are the
number of primitives issued; no attempt is made to minimize them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuits import Gate, _parse_gate, _format_gate, majority_circuit_toffoli, swap

__all__ = [
    "SPECIES", "ChainLoop", "PrimitiveOp",
    "parallel_swap_op", "head_gate_op", "apply_primitive", "execute",
    "shift_ops", "shift_sequence",
    "bring_pair_ops", "bring_pair_under_head",
    "swap_adjacent_ops", "swap_adjacent",
    "permutation_ops", "apply_permutation",
    "compile_cooling_step",
    "pulse_program_to_text", "pulse_program_from_text",
]

SPECIES = ("A", "B", "C")
_LAYERS = ("SWAP_AB", "SWAP_BC", "SWAP_AC")

# fixed species -> (layer sequence, species moving counterclockwise, clockwise)
_SHIFTS = {
    "B": (("SWAP_AC", "SWAP_AB", "SWAP_BC", "SWAP_AB"), "A", "C"),
    "A": (("SWAP_BC", "SWAP_AC", "SWAP_AB", "SWAP_AC"), "C", "B"),
    "C": (("SWAP_AB", "SWAP_BC", "SWAP_AC", "SWAP_BC"), "B", "A"),
}


@dataclass(frozen=True)
class ChainLoop:
    """m ABC-triples in a ring, one bit per cell, head at a fixed triple."""

    m: int
    bits: tuple[int, ...]
    head: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if self.m < 1 or self.m % 2 == 0:
            raise ValueError(f"need an odd number of triples, got m={self.m}")
        if len(self.bits) != 3 * self.m:
            raise ValueError(f"need {3 * self.m} bits, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("cell values must be bits")
        if not (0 <= self.head < self.m):
            raise ValueError(f"head triple {self.head} out of range")

    @property
    def n_cells(self) -> int:
        return 3 * self.m

    def species_of(self, cell: int) -> str:
        return SPECIES[cell % 3]

    def triple_of(self, cell: int) -> int:
        return cell // 3

    def head_cell(self, species: int) -> int:
        return 3 * self.head + species

    def with_bits(self, bits: Sequence[int]) -> "ChainLoop":
        return ChainLoop(self.m, tuple(bits), self.head)


@dataclass(frozen=True)
class PrimitiveOp:
    """One pulse: a species-parallel swap layer, or a gate at the head."""

    kind: str  # one of _LAYERS, or "HEAD"
    gate: Gate | None = None

    def __post_init__(self) -> None:
        if self.kind in _LAYERS:
            if self.gate is not None:
                raise ValueError("swap layers take no gate")
        elif self.kind == "HEAD":
            if self.gate is None:
                raise ValueError("HEAD op requires a gate")
            if self.gate.max_index > 2:
                raise ValueError("head gates act on local cells 0..2 only")
        else:
            raise ValueError(f"unknown primitive kind {self.kind!r}")


def parallel_swap_op(pair: str) -> PrimitiveOp:
    return PrimitiveOp(f"SWAP_{pair}")


def head_gate_op(gate: Gate) -> PrimitiveOp:
    return PrimitiveOp("HEAD", gate)


def apply_primitive(loop: ChainLoop, op: PrimitiveOp) -> ChainLoop:
    bits = list(loop.bits)
    if op.kind == "HEAD":
        local = (bits[loop.head_cell(0)]
                 | bits[loop.head_cell(1)] << 1
                 | bits[loop.head_cell(2)] << 2)
        local = op.gate.apply_to_state(local)
        for s in range(3):
            bits[loop.head_cell(s)] = (local >> s) & 1
        return loop.with_bits(bits)
    offset = {"SWAP_AB": 0, "SWAP_BC": 1, "SWAP_AC": 2}[op.kind]
    n = loop.n_cells
    for t in range(loop.m):
        a = 3 * t + offset
        b = (a + 1) % n
        bits[a], bits[b] = bits[b], bits[a]
    return loop.with_bits(bits)


def execute(loop: ChainLoop, ops: Iterable[PrimitiveOp]) -> ChainLoop:
    for op in ops:
        loop = apply_primitive(loop, op)
    return loop


def shift_ops(fixed_species: str) -> list[PrimitiveOp]:
    """The four-layer sequence that leaves one species' bits in place."""
    if fixed_species not in _SHIFTS:
        raise ValueError(f"fixed species must be one of {SPECIES}, got {fixed_species!r}")
    layers, _, _ = _SHIFTS[fixed_species]
    return [PrimitiveOp(layer) for layer in layers]


def shift_sequence(loop: ChainLoop, fixed_species: str) -> ChainLoop:
    """Apply one shift: with B fixed, A bits move one triple counterclockwise
    (toward lower triple index) and C bits one triple clockwise; the other
    two choices permute the roles accordingly."""
    return execute(loop, shift_ops(fixed_species))


def bring_pair_ops(loop: ChainLoop, pos1: int, pos2: int) -> list[PrimitiveOp]:
    """Shift program landing two adjacent bits on their head cells.

    Each bit keeps its species under shifts, so the pair ends on the
    same-species cells of the head triple. The second phase uses the
    shift that leaves the first bit's species fixed.
    """
    n = loop.n_cells
    if (pos2 - pos1) % n == 1:
        p, q = pos1, pos2
    elif (pos1 - pos2) % n == 1:
        p, q = pos2, pos1
    else:
        raise ValueError(f"cells {pos1} and {pos2} are not adjacent on the loop")
    h, m = loop.head, loop.m
    sp = p % 3
    t = p // 3
    if sp == 0:    # (A_t, B_t): move A ccw to the head, then B cw, A fixed
        phases = [("B", (t - h) % m), ("A", (h - t) % m)]
    elif sp == 1:  # (B_t, C_t): move B ccw, then C cw, B fixed
        phases = [("C", (t - h) % m), ("B", (h - t) % m)]
    else:          # (C_t, A_{t+1}): move C ccw, then A cw, C fixed
        phases = [("A", (t - h) % m), ("C", (h - (t + 1)) % m)]
    ops: list[PrimitiveOp] = []
    for fixed, count in phases:
        ops.extend(op for _ in range(count) for op in shift_ops(fixed))
    return ops


def bring_pair_under_head(loop: ChainLoop, pos1: int, pos2: int) -> tuple[ChainLoop, int]:
    ops = bring_pair_ops(loop, pos1, pos2)
    return execute(loop, ops), len(ops)


def swap_adjacent_ops(loop: ChainLoop, pos: int) -> list[PrimitiveOp]:
    """Program for a single transposition of pos with its clockwise neighbor.

    Shuttle the pair to the head, swap there, and replay the shuttle in
    reverse (every primitive is an involution, so the reversed list is
    the exact inverse).
    """
    if not (0 <= pos < loop.n_cells):
        raise ValueError(f"cell {pos} out of range")
    q = (pos + 1) % loop.n_cells
    shuttle = bring_pair_ops(loop, pos, q)
    head_swap = head_gate_op(swap(pos % 3, q % 3))
    return shuttle + [head_swap] + shuttle[::-1]


def swap_adjacent(loop: ChainLoop, pos: int) -> tuple[ChainLoop, int]:
    ops = swap_adjacent_ops(loop, pos)
    return execute(loop, ops), len(ops)


def permutation_ops(m: int, head: int, perm: Sequence[int]) -> list[PrimitiveOp]:
    """Compile a destination map (bit at cell i moves to cell perm[i]) into
    adjacent transpositions, bubble-sort style, each realized at the head."""
    n = 3 * m
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a bijection on all cell indices")
    geometry = ChainLoop(m, (0,) * n, head)
    inverse = [0] * n
    for src, dst in enumerate(perm):
        inverse[dst] = src
    current = list(range(n))  # current[cell] = original index of the bit there
    ops: list[PrimitiveOp] = []
    for cell in range(n):
        i = current.index(inverse[cell], cell)
        while i > cell:
            ops.extend(swap_adjacent_ops(geometry, i - 1))
            current[i - 1], current[i] = current[i], current[i - 1]
            i -= 1
    return ops


def apply_permutation(loop: ChainLoop, perm: Sequence[int]) -> tuple[ChainLoop, int]:
    ops = permutation_ops(loop.m, loop.head, perm)
    return execute(loop, ops), len(ops)


def compile_cooling_step(loop: ChainLoop, positions: Sequence[int]) -> tuple[list[PrimitiveOp], int]:
    """Program computing the 3-bit majority of the named cells into the first.

    The three bits are routed onto the head cells (A, B, C in argument
    order), the majority circuit's gates run at the head, and the routing
    is undone, so the majority lands back on positions[0] and every
    uninvolved bit is restored.
    """
    p1, p2, p3 = positions
    if len({p1, p2, p3}) != 3:
        raise ValueError(f"positions must be distinct, got {positions}")
    for pos in (p1, p2, p3):
        if not (0 <= pos < loop.n_cells):
            raise ValueError(f"cell {pos} out of range")
    head_gates = [head_gate_op(g) for g in majority_circuit_toffoli().gates]
    targets = [loop.head_cell(0), loop.head_cell(1), loop.head_cell(2)]
    if [p1, p2, p3] == targets:
        return head_gates, len(head_gates)
    perm = [0] * loop.n_cells
    perm[p1], perm[p2], perm[p3] = targets
    rest_src = sorted(set(range(loop.n_cells)) - {p1, p2, p3})
    rest_dst = sorted(set(range(loop.n_cells)) - set(targets))
    for src, dst in zip(rest_src, rest_dst):
        perm[src] = dst
    gather = permutation_ops(loop.m, loop.head, perm)
    ops = gather + head_gates + gather[::-1]
    return ops, len(ops)


# --------------------------------------------------------------- pulse dumps


def pulse_program_to_text(ops: Iterable[PrimitiveOp]) -> str:
    """One primitive per line; head gates reuse the circuit gate syntax."""
    lines = []
    for op in ops:
        if op.kind == "HEAD":
            lines.append(f"HEAD {_format_gate(op.gate)}")
        else:
            lines.append(op.kind)
    return "\n".join(lines) + "\n"


def pulse_program_from_text(text: str) -> list[PrimitiveOp]:
    ops: list[PrimitiveOp] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] in _LAYERS:
            if len(tokens) != 1:
                raise ValueError(f"swap layer takes no arguments: {line!r}")
            ops.append(PrimitiveOp(tokens[0]))
        elif tokens[0] == "HEAD":
            if len(tokens) < 2:
                raise ValueError(f"HEAD line needs a gate: {line!r}")
            ops.append(head_gate_op(_parse_gate(tokens[1:])))
        else:
            raise ValueError(f"unknown primitive {tokens[0]!r}")
    return ops

"""Classical reversible gates, circuits, and exact distribution propagation.

Gates act as permutations of basis states; every supported gate is an
involution. Circuits may carry designated noise sites, given as pairs
(pos, bit) meaning "a bit-flip may occur on `bit` after the first `pos`
gates have been applied" (pos ranges 0..len(gates)).

Circuits serialize to a line-oriented text format, one gate per line:

    NOT 2
    CNOT 1 0:1
    TOFFOLI 0 1:1 2:1
    SWAP 0 1
    CSWAP 0 2 1:0
    NOISE 1 0

Targets are bare indices; controls are written bit:value. NOISE lines
list the noise sites as `NOISE pos bit`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bias import ErrorRates
from .distribution import JointDistribution

__all__ = [
    "Gate", "Circuit",
    "not_gate", "cnot", "toffoli", "gtoffoli", "swap", "cswap",
    "apply_gate", "gate_permutation",
    "majority_circuit_toffoli", "majority_circuit_cswap",
    "two_bc_circuit", "two_bc_sort_circuit", "cnot_cswap_majority",
    "circuit_to_text", "circuit_from_text",
]

NOT = "NOT"
CNOT = "CNOT"
TOFFOLI = "TOFFOLI"
SWAP = "SWAP"
CSWAP = "CSWAP"

_FLIP_KINDS = (NOT, CNOT, TOFFOLI)
_SWAP_KINDS = (SWAP, CSWAP)
_ARITY = {NOT: (1, 0), CNOT: (1, 1), TOFFOLI: (1, 2), SWAP: (2, 0), CSWAP: (2, 1)}


@dataclass(frozen=True)
class Gate:
    """One reversible gate: a target set, plus controls as (bit, value) pairs."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets, n_controls = _ARITY[self.kind]
        if len(self.targets) != n_targets or len(self.controls) != n_controls:
            raise ValueError(f"{self.kind} takes {n_targets} target(s) and "
                             f"{n_controls} control(s)")
        indices = list(self.targets) + [bit for bit, _ in self.controls]
        if len(set(indices)) != len(indices):
            raise ValueError(f"gate indices must be distinct, got {indices}")
        if any(idx < 0 for idx in indices):
            raise ValueError("gate indices must be nonnegative")
        if any(val not in (0, 1) for _, val in self.controls):
            raise ValueError("control values must be 0 or 1")

    @property
    def max_index(self) -> int:
        return max(list(self.targets) + [bit for bit, _ in self.controls])

    def apply_to_state(self, x: int) -> int:
        """Image of basis state x (an integer, bit 0 = LSB) under this gate."""
        for bit, val in self.controls:
            if (x >> bit) & 1 != val:
                return x
        if self.kind in _FLIP_KINDS:
            return x ^ (1 << self.targets[0])
        a, b = self.targets
        if (x >> a) & 1 != (x >> b) & 1:
            return x ^ ((1 << a) | (1 << b))
        return x


def not_gate(target: int) -> Gate:
    return Gate(NOT, (target,))


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (target,), ((control, 1),))


def toffoli(control1: int, control2: int, target: int) -> Gate:
    return Gate(TOFFOLI, (target,), ((control1, 1), (control2, 1)))


def gtoffoli(target: int, controls: Iterable[tuple[int, int]]) -> Gate:
    """Generalized Toffoli: NOT on target conditioned on a 2-control pattern."""
    return Gate(TOFFOLI, (target,), tuple(controls))


def swap(a: int, b: int) -> Gate:
    return Gate(SWAP, (a, b))


def cswap(a: int, b: int, control: int, value: int = 1) -> Gate:
    return Gate(CSWAP, (a, b), ((control, value),))


def gate_permutation(gate: Gate, width: int) -> np.ndarray:
    """Basis-state permutation array: perm[x] = gate(x)."""
    if gate.max_index >= width:
        raise ValueError(f"gate touches bit {gate.max_index}, register width {width}")
    states = np.arange(1 << width)
    ok = np.ones(states.size, dtype=bool)
    for bit, val in gate.controls:
        ok &= ((states >> bit) & 1) == val
    if gate.kind in _FLIP_KINDS:
        images = states ^ (1 << gate.targets[0])
    else:
        a, b = gate.targets
        differ = ((states >> a) & 1) ^ ((states >> b) & 1)
        images = states ^ ((differ << a) | (differ << b))
    return np.where(ok, images, states)


def apply_gate(dist: JointDistribution, gate: Gate) -> JointDistribution:
    """Push a distribution through a gate; total probability is preserved."""
    perm = gate_permutation(gate, dist.width)
    out = np.empty_like(dist.probs)
    out[perm] = dist.probs
    return JointDistribution(out, validate=False)


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on a fixed-width register, with noise sites."""

    width: int
    gates: tuple[Gate, ...]
    noise_sites: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "noise_sites", tuple(self.noise_sites))
        if self.width < 1 or self.width > 20:
            raise ValueError("circuit width must be in 1..20")
        for g in self.gates:
            if g.max_index >= self.width:
                raise ValueError(f"gate {g} exceeds width {self.width}")
        for pos, bit in self.noise_sites:
            if not (0 <= pos <= len(self.gates)):
                raise ValueError(f"noise position {pos} out of range")
            if not (0 <= bit < self.width):
                raise ValueError(f"noise bit {bit} out of range")

    def apply_to_state(self, x: int) -> int:
        for g in self.gates:
            x = g.apply_to_state(x)
        return x

    def apply_to_state_with_flips(self, x: int, flips: Sequence[int]) -> int:
        """Run on a basis state with a NOT inserted at every flagged noise site.

        `flips` has one 0/1 entry per noise site, in site order.
        """
        if len(flips) != len(self.noise_sites):
            raise ValueError("one flip flag per noise site required")
        by_pos: dict[int, list[int]] = {}
        for k, (pos, bit) in enumerate(self.noise_sites):
            by_pos.setdefault(pos, []).append(k)
        for pos in range(len(self.gates) + 1):
            if pos > 0:
                x = self.gates[pos - 1].apply_to_state(x)
            for k in by_pos.get(pos, ()):
                if flips[k]:
                    x ^= 1 << self.noise_sites[k][1]
        return x

    def run(self, dist: JointDistribution) -> JointDistribution:
        """Propagate a distribution through all gates (noise sites ignored)."""
        for g in self.gates:
            dist = apply_gate(dist, g)
        return dist

    def run_with_channels(self, dist: JointDistribution, rates: ErrorRates) -> JointDistribution:
        """Propagate with an independent bit-flip channel at every noise site."""
        by_pos: dict[int, list[int]] = {}
        for pos, bit in self.noise_sites:
            by_pos.setdefault(pos, []).append(bit)
        for pos in range(len(self.gates) + 1):
            if pos > 0:
                dist = apply_gate(dist, self.gates[pos - 1])
            for bit in by_pos.get(pos, ()):
                dist = dist.apply_bitflip_channel(bit, rates)
        return dist


def majority_circuit_toffoli() -> Circuit:
    """3-bit majority into bit 0 via two CNOTs and one Toffoli.

    Ships with the canonical 7 noise sites: after each of the three
    gates, flips on every bit whose later value can still reach bit 0
    (errors on bits 1 and 2 after the final Toffoli cannot).
    """
    gates = (cnot(0, 1), cnot(0, 2), toffoli(1, 2, 0))
    sites = ((1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2), (3, 0))
    return Circuit(3, gates, sites)


def majority_circuit_cswap() -> Circuit:
    """3-bit majority into bit 0 via CNOT plus a decomposed controlled swap.

    The swap of bits 0 and 1, controlled on bit 2 reading 0, is expanded
    into three generalized Toffolis. Implements a different basis-state
    permutation than majority_circuit_toffoli, with the same effect on
    the marginal of bit 0.
    """
    gates = (
        cnot(1, 2),
        gtoffoli(1, ((0, 1), (2, 0))),
        gtoffoli(0, ((1, 1), (2, 0))),
        gtoffoli(1, ((0, 1), (2, 0))),
    )
    return Circuit(3, gates)


def two_bc_circuit() -> Circuit:
    """The 2-bit compression core: CNOT with bit 0 as control, bit 1 as target.

    Acceptance is conditioning on bit 1 reading 0 afterwards.
    """
    return Circuit(2, (cnot(0, 1),))


def two_bc_sort_circuit() -> Circuit:
    """2-bit compression with the accept/reject sorting swap made explicit.

    CNOT(0 -> 1), then swap bits 0 and 2 when the target read 0. Bit 2
    acts as the "cold side" slot: conditioned on acceptance it holds the
    compressed control bit, and unconditionally it holds the majority of
    all three inputs.
    """
    return Circuit(3, (cnot(0, 1), cswap(0, 2, 1, 0)))


def cnot_cswap_majority(b1: int, b2: int, c: int) -> int:
    """Majority of three bits via the CNOT + controlled-swap identity.

    Equals b1*c + b2*c + b1*b2 mod 2, the value the sorting circuit
    leaves in the third slot.
    """
    for v in (b1, b2, c):
        if v not in (0, 1):
            raise ValueError("inputs must be bits")
    return (b1 & c) ^ (b2 & c) ^ (b1 & b2)


# ---------------------------------------------------------------------------
# text serialization


def _format_gate(g: Gate) -> str:
    parts = [g.kind] + [str(t) for t in g.targets]
    parts += [f"{bit}:{val}" for bit, val in g.controls]
    return " ".join(parts)


def circuit_to_text(circuit: Circuit) -> str:
    lines = [_format_gate(g) for g in circuit.gates]
    lines += [f"NOISE {pos} {bit}" for pos, bit in circuit.noise_sites]
    return "\n".join(lines) + "\n"


def _parse_gate(tokens: list[str]) -> Gate:
    kind = tokens[0].upper()
    if kind not in _ARITY:
        raise ValueError(f"unknown gate {kind!r}")
    n_targets, n_controls = _ARITY[kind]
    args = tokens[1:]
    if len(args) != n_targets + n_controls:
        raise ValueError(f"{kind} expects {n_targets + n_controls} operands, got {args}")
    targets = tuple(int(a) for a in args[:n_targets])
    controls = []
    for a in args[n_targets:]:
        if ":" not in a:
            raise ValueError(f"control must be bit:value, got {a!r}")
        bit, val = a.split(":", 1)
        controls.append((int(bit), int(val)))
    return Gate(kind, targets, tuple(controls))


def circuit_from_text(text: str) -> Circuit:
    """Parse the line format; width is the highest referenced index plus one."""
    gates: list[Gate] = []
    sites: list[tuple[int, int]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0].upper() == "NOISE":
            if len(tokens) != 3:
                raise ValueError(f"NOISE expects `pos bit`, got {line!r}")
            sites.append((int(tokens[1]), int(tokens[2])))
        else:
            gates.append(_parse_gate(tokens))
    if not gates and not sites:
        raise ValueError("empty circuit description")
    width = 1 + max([g.max_index for g in gates] + [bit for _, bit in sites])
    return Circuit(width, tuple(gates), tuple(sites))

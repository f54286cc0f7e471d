"""Executable cooling schedules with resource accounting.

Three schedules are provided:

  * simple_recursive: partition into triples, majority-compress, discard
    the heated bits, recurse on the survivors.
  * heatbath_recursive: same, but heated bits are re-polarized at the
    bath and re-partitioned until each level is exhausted (two leftovers
    per level).
  * fibonacci_algorithm: grow a register one bit at a time, driving each
    new bit to the steady state of repeated compression against its two
    predecessors.

Every run returns a CoolingResult carrying the achieved bias, a cost
ledger, algorithm-specific stats, and an optional per-step trace that
exports as JSON lines.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from . import limits
from .bias import (ErrorRates, debias_step, fibonacci_numbers, three_bc_bias,
                   three_bc_bias_unequal)
from .jsonio import dumps as json_dumps

__all__ = [
    "CostLedger", "CoolingResult", "RegisterBiases", "BoundCheck",
    "simple_recursive", "heatbath_recursive", "fibonacci_algorithm",
    "three_bc_hb", "fibonacci_bound_check", "random_hb_trace_check",
    "run_with_noise", "trace_to_jsonl",
]

_BOUND_TOL = 1e-12


@dataclass
class CostLedger:
    bits_consumed: int = 0
    three_bc_ops: int = 0
    heat_bath_contacts: int = 0
    recursion_depth: int = 0

    def as_dict(self) -> dict:
        return {
            "bits_consumed": self.bits_consumed,
            "three_bc_ops": self.three_bc_ops,
            "heat_bath_contacts": self.heat_bath_contacts,
            "recursion_depth": self.recursion_depth,
        }


@dataclass
class CoolingResult:
    final_bias: float
    ledger: CostLedger
    stats: dict
    trace: Optional[list[dict]] = None


def _check_targets(b_i: float, b_t: float) -> None:
    if not (0.0 < b_i < 1.0):
        raise ValueError(f"initial bias must be in (0, 1), got {b_i!r}")
    if not (b_i < b_t < 1.0):
        raise ValueError(f"target bias must be in (b_i, 1), got {b_t!r}")


def _trace_entry(step: int, op: str, positions, biases_after, ledger: CostLedger) -> dict:
    return {
        "step": step,
        "op": op,
        "positions": positions,
        "biases_after": list(biases_after),
        "ledger": ledger.as_dict(),
    }


def simple_recursive(b_i: float, b_t: float, mode: str = "exact") -> CoolingResult:
    """Triple-and-discard recursion from bias b_i up to at least b_t.

    approx mode treats each level as a flat 3/2 gain, giving a real-valued
    depth k = log_{3/2}(b_t / b_i) and 3**k starting bits (also reported
    rounded up). exact mode iterates the true majority update and counts
    whole levels.
    """
    _check_targets(b_i, b_t)
    if mode == "approx":
        k = math.log(b_t / b_i) / math.log(1.5)
        bits = 3.0**k
        ledger = CostLedger(bits_consumed=math.ceil(bits), recursion_depth=math.ceil(k))
        stats = {"mode": mode, "k": k, "bits": bits, "bits_ceil": math.ceil(bits)}
        return CoolingResult(final_bias=b_t, ledger=ledger, stats=stats)
    if mode != "exact":
        raise ValueError(f"mode must be 'approx' or 'exact', got {mode!r}")
    ledger = CostLedger()
    trace = []
    b, k = b_i, 0
    while b < b_t:
        b = three_bc_bias(b)
        k += 1
        trace.append(_trace_entry(k, "majority-level", None, [b], ledger))
    bits = 3**k
    # a depth-k ternary tree applies (3^k - 1) / 2 majority steps in total
    ledger.bits_consumed = bits
    ledger.three_bc_ops = (bits - 1) // 2
    ledger.recursion_depth = k
    for entry in trace:
        entry["ledger"] = ledger.as_dict()
    stats = {"mode": mode, "k": k, "bits": bits, "bits_ceil": bits}
    return CoolingResult(final_bias=b, ledger=ledger, stats=stats, trace=trace)


def heatbath_recursive(b_i: float, b_t: float) -> CoolingResult:
    """Heat-bath recursion: re-polarize heated bits and re-partition per level.

    Each level turns m equal-bias bits into m - 2 bits at the next bias
    (two leftovers are discarded), at the price of repeated bath contact.
    The headline bit count is the 2k figure with the flat-gain depth
    k = log_{3/2}(b_t / b_i); the simulated exact-level ledger (with its
    working register of 2*k_exact + 1 bits) is reported alongside.
    """
    _check_targets(b_i, b_t)
    levels = []
    b = b_i
    while b < b_t:
        b = three_bc_bias(b)
        levels.append(b)
    k_exact = len(levels)
    m0 = 2 * k_exact + 1
    ledger = CostLedger(bits_consumed=m0, recursion_depth=k_exact)
    trace = []
    m = m0
    for lvl, bias in enumerate(levels, start=1):
        pool = m
        while pool >= 3:
            t = pool // 3
            ledger.three_bc_ops += t
            ledger.heat_bath_contacts += 2 * t
            pool -= t
        m -= 2  # the two sub-target leftovers are dropped
        trace.append(_trace_entry(lvl, "heatbath-level", None, [bias], ledger))
    k_approx = math.log(b_t / b_i) / math.log(1.5)
    stats = {
        "k": k_approx,
        "bits_2k": 2.0 * k_approx,
        "k_exact": k_exact,
        "bits_2k_exact": 2 * k_exact,
        "working_register": m0,
    }
    return CoolingResult(final_bias=b, ledger=ledger, stats=stats, trace=trace)


@dataclass
class RegisterBiases:
    """Position-indexed biases of a register fed by a bath at initial_bias."""

    biases: list[float]
    initial_bias: float

    def __post_init__(self) -> None:
        self.biases = [float(b) for b in self.biases]
        for b in self.biases + [self.initial_bias]:
            if not (0.0 <= b <= 1.0):
                raise ValueError(f"register biases must be in [0, 1], got {b!r}")

    def sorted_biases(self) -> list[float]:
        return sorted(self.biases)


def three_bc_hb(state: RegisterBiases, i: int, j: int, k: int,
                ledger: Optional[CostLedger] = None) -> RegisterBiases:
    """Majority-compress three positions, then bath-reset the two losers.

    The position holding the largest of the three biases receives the
    compressed bias; the other two return to the bath bias. Positions
    must be distinct.
    """
    if len({i, j, k}) != 3:
        raise ValueError(f"positions must be distinct, got {(i, j, k)}")
    for pos in (i, j, k):
        if not (0 <= pos < len(state.biases)):
            raise ValueError(f"position {pos} out of range")
    ordered = sorted((i, j, k), key=lambda pos: (state.biases[pos], pos))
    b1, b2, b3 = (state.biases[pos] for pos in ordered)
    new_biases = list(state.biases)
    new_biases[ordered[2]] = three_bc_bias_unequal(b1, b2, b3)
    new_biases[ordered[0]] = state.initial_bias
    new_biases[ordered[1]] = state.initial_bias
    if ledger is not None:
        ledger.three_bc_ops += 1
        ledger.heat_bath_contacts += 2
    return RegisterBiases(new_biases, state.initial_bias)


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    witness_index: Optional[int] = None  # 1-based position in the sorted order
    witness_value: Optional[float] = None
    bound: Optional[float] = None


def fibonacci_bound_check(state: RegisterBiases) -> BoundCheck:
    """Check the sorted biases against b_i * F(j) position by position."""
    values = state.sorted_biases()
    fibs = fibonacci_numbers(len(values))
    for j, (value, f) in enumerate(zip(values, fibs), start=1):
        bound = state.initial_bias * f
        if value > bound + _BOUND_TOL:
            return BoundCheck(False, witness_index=j, witness_value=value, bound=bound)
    return BoundCheck(True)


def random_hb_trace_check(trials: int, max_bits: int = 8, seed: int = 0,
                          max_ops: int = 20) -> dict:
    """Fuzz: random compress-and-reset traces never breach the Fibonacci bound.

    Each trial draws a register size (3..max_bits), a bath bias, and a
    random sequence of (three_bc_hb at random distinct positions, random
    permutation); the sorted-bias bound is checked after every operation.
    """
    rng = random.Random(seed)
    violations: list[dict] = []
    checks = 0
    for trial in range(trials):
        n = rng.randint(3, max_bits)
        b_i = rng.uniform(0.001, 0.5)
        state = RegisterBiases([b_i] * n, b_i)
        for _ in range(rng.randint(1, max_ops)):
            i, j, k = rng.sample(range(n), 3)
            state = three_bc_hb(state, i, j, k)
            rng.shuffle(state.biases)
            check = fibonacci_bound_check(state)
            checks += 1
            if not check.passed:
                violations.append({
                    "trial": trial,
                    "witness_index": check.witness_index,
                    "witness_value": check.witness_value,
                    "bound": check.bound,
                })
    return {"trials": trials, "checks": checks, "seed": seed,
            "violations": len(violations), "first_violations": violations[:5]}


def fibonacci_algorithm(b_i: float, b_t: float, mode: str = "exact",
                        tol: float = 1e-12, max_n: int = 100_000) -> CoolingResult:
    """Smallest register size n whose last bit reaches b_t.

    approx mode uses the linear regime (bias of bit j grows like
    b_i * F(j)); exact mode builds the steady-state recurrence
    B_j = (B_{j-2} + B_{j-1}) / (1 + B_{j-2} B_{j-1}) with B_1 = B_2 = b_i,
    simulating each steady-state loop to tolerance tol for the ledger.
    """
    _check_targets(b_i, b_t)
    if mode == "approx":
        f_prev, f_last = 1, 1
        sequence = [b_i * f_prev, b_i * f_last]
        while sequence[-1] < b_t:
            if len(sequence) >= max_n:
                raise RuntimeError("target not reached within max_n bits")
            f_prev, f_last = f_last, f_prev + f_last
            sequence.append(b_i * f_last)
        n = len(sequence)
        ledger = CostLedger(bits_consumed=n)
        stats = {"mode": mode, "n": n, "sequence": sequence}
        return CoolingResult(final_bias=sequence[-1], ledger=ledger, stats=stats)
    if mode != "exact":
        raise ValueError(f"mode must be 'approx' or 'exact', got {mode!r}")
    ledger = CostLedger()
    trace = []
    sequence = [b_i, b_i]
    while sequence[-1] < b_t:
        if len(sequence) >= max_n:
            raise RuntimeError("target not reached within max_n bits")
        older, newer = sequence[-2], sequence[-1]
        # drive the fresh bit to the pair's steady state, counting the loop
        x = b_i
        while True:
            nx = three_bc_bias_unequal(older, newer, x)
            ledger.three_bc_ops += 1
            ledger.heat_bath_contacts += 2
            if abs(nx - x) < tol:
                break
            x = nx
        sequence.append((older + newer) / (1.0 + older * newer))
        j = len(sequence)
        trace.append(_trace_entry(j, "steady-state-majority", [j - 2, j - 1, j],
                                  [sequence[-1]], ledger))
    n = len(sequence)
    ledger.bits_consumed = n
    ledger.recursion_depth = n
    stats = {"mode": mode, "n": n, "sequence": sequence}
    return CoolingResult(final_bias=sequence[-1], ledger=ledger, stats=stats, trace=trace)


def _noisy_unequal_update(b1: float, b2: float, b3: float, rates: ErrorRates) -> float:
    return debias_step(three_bc_bias_unequal(b1, b2, b3), rates)


def run_with_noise(algorithm: str, b_i: float, b_t: float, rates: ErrorRates,
                   model: str = limits.ASYM_AFTER, tol: float = 1e-12,
                   max_steps: int = 1_000_000) -> CoolingResult:
    """Re-run a schedule with every compression replaced by its noisy update.

    The run stops once the update stops improving the best bias (or the
    target is reached); the achieved supremum never exceeds the model's
    bias limit. The fibonacci schedule supports the after-step models
    only, via the unequal-bias update ((b1+b2+b3 - b1 b2 b3)/2)(1-s) + d.
    """
    if not (0.0 < b_i <= b_t <= 1.0):
        raise ValueError("need 0 < b_i <= b_t <= 1")
    if model not in limits.MODEL_LABELS:
        raise ValueError(f"unknown model {model!r}")
    trace = []
    ledger = CostLedger()
    if algorithm == "simple-recursive":
        update = limits.make_model(model, rates).update
        b, steps = b_i, 0
        while b < b_t and steps < max_steps:
            nb = update(b)
            if nb <= b + tol:
                b = max(b, nb)
                break
            b = nb
            steps += 1
            ledger.three_bc_ops += 1
            trace.append(_trace_entry(steps, "noisy-majority-level", None, [b], ledger))
        ledger.recursion_depth = steps
        stats = {"algorithm": algorithm, "model": model, "steps": steps,
                 "reached_target": b >= b_t}
        return CoolingResult(final_bias=b, ledger=ledger, stats=stats, trace=trace)
    if algorithm == "fibonacci":
        if model not in (limits.SYM_AFTER, limits.ASYM_AFTER):
            raise ValueError("fibonacci schedule supports the after-step models only")
        if model == limits.SYM_AFTER and rates.d != 0.0:
            raise ValueError("sym-after requires a symmetric channel")
        sequence = [b_i, b_i]
        steps = 0
        while sequence[-1] < b_t and steps < max_steps:
            older, newer = sequence[-2], sequence[-1]
            x = b_i
            while True:
                nx = _noisy_unequal_update(older, newer, x, rates)
                ledger.three_bc_ops += 1
                ledger.heat_bath_contacts += 2
                steps += 1
                if abs(nx - x) < tol or steps >= max_steps:
                    x = max(x, nx)
                    break
                x = nx
            if x <= sequence[-1] + tol:
                break
            sequence.append(x)
            j = len(sequence)
            trace.append(_trace_entry(j, "noisy-steady-state", [j - 2, j - 1, j],
                                      [x], ledger))
        ledger.bits_consumed = len(sequence)
        stats = {"algorithm": algorithm, "model": model, "n": len(sequence),
                 "sequence": sequence, "reached_target": sequence[-1] >= b_t}
        return CoolingResult(final_bias=sequence[-1], ledger=ledger, stats=stats,
                             trace=trace)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def trace_to_jsonl(result: CoolingResult) -> str:
    """One JSON record per trace step, newline separated."""
    if result.trace is None:
        raise ValueError("result carries no trace")
    return "\n".join(json_dumps(entry) for entry in result.trace) + "\n"

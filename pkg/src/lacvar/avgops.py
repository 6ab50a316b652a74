"""One-sided averaging operators and their truncated s-variation.

The window average is A_n f(x) = (1/n) * int_0^n f(x - t) dt, i.e. the mean
of f over [x - n, x].  For a step function this is exact arithmetic: the
fast path reads two values off the antiderivative, the oracle sums cell
overlaps directly.  The variation stacks a lacunary family of windows and
takes the ell^s norm of consecutive differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gridfn import GridFunction, GridMismatch, UniformGrid, require_same_grid
from .lacunary import LacunarySeq


class NonPositiveWindow(ValueError):
    pass


class TailTooLarge(RuntimeError):
    """Truncation tail bound exceeds the requested tolerance.

    `k_needed` estimates the truncation index that would satisfy it (the
    bound decays by at least beta per extra scale); None when the tolerance
    is non-positive and no index can help.
    """

    def __init__(self, tail: float, tol: float, k_needed: int | None):
        super().__init__(
            f"tail bound {tail:.6g} exceeds tolerance {tol:.6g}; "
            f"need truncation index ~{k_needed}"
        )
        self.tail = tail
        self.tol = tol
        self.k_needed = k_needed


@dataclass(frozen=True)
class VariationSpec:
    """Parameters of the truncated variation.

    s is the variation exponent (>= 1; the inequalities under test hold for
    s >= 2).  k_max is the truncation index: differences k = 1..k_max enter
    the sum.  The truncation error is controlled relative to the computed
    value: the analytic tail bound must stay below
    tail_tol * (sup of the result + tail_floor), unless enforce_tail is off.
    """

    s: float = 2.0
    k_max: int = 0
    tail_tol: float = 1e-8
    tail_floor: float = 0.0
    enforce_tail: bool = True

    def __post_init__(self):
        if not self.s >= 1.0:
            raise ValueError(f"variation exponent must be >= 1, got {self.s!r}")
        if math.isinf(self.s):
            raise ValueError("s = inf is not supported")
        if self.k_max < 1:
            raise ValueError(f"truncation index must be >= 1, got {self.k_max!r}")
        if not self.tail_tol > 0.0:
            raise ValueError("tail_tol must be positive")
        if self.tail_floor < 0.0:
            raise ValueError("tail_floor must be non-negative")

    def check_seq(self, seq: LacunarySeq) -> None:
        if self.k_max > len(seq) - 1:
            raise ValueError(
                f"truncation index {self.k_max} needs {self.k_max + 1} scales, "
                f"sequence has {len(seq)}"
            )


def _window_means(f: GridFunction, n: float, x: np.ndarray, S: np.ndarray) -> np.ndarray:
    e = f.x0 + f.h * np.arange(f.n + 1)
    top = float(S[-1])
    s_hi = np.interp(x, e, S, left=0.0, right=top)
    s_lo = np.interp(x - n, e, S, left=0.0, right=top)
    return (s_hi - s_lo) / n


def averages_at(f: GridFunction, n: float, x) -> np.ndarray:
    """A_n f at arbitrary points (fast antiderivative path)."""
    if not n > 0.0:
        raise NonPositiveWindow(f"window must be positive, got {n!r}")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return _window_means(f, n, x, f.antiderivative_edges())


def oracle_averages_at(f: GridFunction, n: float, x) -> np.ndarray:
    """A_n f by direct overlap summation over every cell; cross-check only.

    Deliberately avoids the antiderivative entirely so it stays an
    independent route; points are processed in bounded-memory batches.
    """
    if not n > 0.0:
        raise NonPositiveWindow(f"window must be positive, got {n!r}")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    lo_edges = f.x0 + f.h * np.arange(f.n)
    hi_edges = lo_edges + f.h
    out = np.empty(x.size, dtype=np.float64)
    step = max(1, (4 << 20) // max(f.n, 1))
    for start in range(0, x.size, step):
        xc = x[start : start + step, None]
        overlap = np.minimum(xc, hi_edges) - np.maximum(xc - n, lo_edges)
        np.clip(overlap, 0.0, None, out=overlap)
        out[start : start + step] = overlap @ f.values / n
    return out


def average_fast(f: GridFunction, n: float, eval_grid: UniformGrid) -> GridFunction:
    """A_n f sampled at the midpoints of eval_grid."""
    vals = averages_at(f, n, eval_grid.midpoints)
    return GridFunction(eval_grid.x0, eval_grid.h, vals)


def average_oracle(f: GridFunction, n: float, eval_grid: UniformGrid) -> GridFunction:
    vals = oracle_averages_at(f, n, eval_grid.midpoints)
    return GridFunction(eval_grid.x0, eval_grid.h, vals)


@dataclass(frozen=True, eq=False)
class ScaleStack:
    """A_{n_k} f for k = 0..k_max at shared eval points; levels[k] is row k."""

    x: np.ndarray = field(repr=False)
    levels: np.ndarray = field(repr=False)
    scales: tuple[float, ...]

    def __post_init__(self):
        if self.levels.shape != (len(self.scales), self.x.size):
            raise ValueError("levels must be (number of scales, number of points)")


def scale_stack_at(f: GridFunction, seq: LacunarySeq, k_max: int, x) -> ScaleStack:
    if k_max > len(seq) - 1:
        raise ValueError(f"k_max={k_max} exceeds sequence length {len(seq)} - 1")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    S = f.antiderivative_edges()
    levels = np.empty((k_max + 1, x.size), dtype=np.float64)
    for k in range(k_max + 1):
        levels[k] = _window_means(f, seq.scales[k], x, S)
    return ScaleStack(x, levels, seq.scales[: k_max + 1])


def scale_stack(f: GridFunction, seq: LacunarySeq, k_max: int, eval_grid: UniformGrid) -> ScaleStack:
    return scale_stack_at(f, seq, k_max, eval_grid.midpoints)


def _compensated_power_sum(diffs: np.ndarray, s: float) -> np.ndarray:
    """sum_k diffs[k]**s per column, ascending k, Neumaier-compensated.

    The order and the compensation are fixed so results do not depend on
    how work is split across threads.
    """
    acc = np.zeros(diffs.shape[1], dtype=np.float64)
    comp = np.zeros_like(acc)
    for k in range(diffs.shape[0]):
        term = diffs[k] ** s
        total = acc + term
        acc_big = np.abs(acc) >= np.abs(term)
        comp += np.where(acc_big, (acc - total) + term, (term - total) + acc)
        acc = total
    return acc + comp


def l1_norm(f: GridFunction) -> float:
    return float(np.sum(np.abs(f.values)) * f.h)


def tail_bound(f: GridFunction, seq: LacunarySeq, s: float, k_max: int) -> float:
    """Upper bound on the ell^s mass of the differences past index k_max.

    Two bounds are combined.  Both start from sup |A_n f| <= ||f||_1 / n and
    n_k >= n_K * beta^(k-K):

      * geometric-pair bound: |difference k| <= 2 ||f||_1 / n_k, summing to
        (2 ||f||_1 / n_K) * (beta^-s / (1 - beta^-s))^(1/s);
      * predecessor bound: |difference k| <= ||f||_1 / n_{k-1}, summing to
        (||f||_1 / n_K) * (1 / (1 - beta^-s))^(1/s).

    The max of the two is returned.  They coincide at beta = 2; for large
    beta the second is the sharper (and is the one that is always valid).
    """
    if k_max > len(seq) - 1:
        raise ValueError("k_max exceeds sequence length - 1")
    nk = seq.scales[k_max]
    m1 = l1_norm(f)
    if m1 == 0.0:
        return 0.0
    q = seq.beta ** (-s)
    pair = (2.0 * m1 / nk) * (q / (1.0 - q)) ** (1.0 / s)
    pred = (m1 / nk) * (1.0 / (1.0 - q)) ** (1.0 / s)
    return max(pair, pred)


def default_eval_grid(f: GridFunction, seq: LacunarySeq, k_max: int, h: float | None = None) -> UniformGrid:
    """Grid covering the support of f padded by n_{k_max} on the right.

    Everything V_s f can be nonzero on lives inside this window; past it
    every truncated average vanishes (only the analytic tail survives, and
    tail_bound accounts for that).
    """
    h = f.h if h is None else float(h)
    span = f.x1 + seq.scales[k_max] - f.x0
    n = int(np.ceil(span / h - 1e-9))
    return UniformGrid(f.x0, h, max(n, 1))


def _tail_gate(tail: float, sup_val: float, spec: VariationSpec, seq: LacunarySeq) -> None:
    if not spec.enforce_tail:
        return
    tol = spec.tail_tol * (sup_val + spec.tail_floor)
    if tail <= tol:
        return
    if tol > 0.0:
        k_needed = spec.k_max + max(1, math.ceil(math.log(tail / tol) / math.log(seq.beta)))
    else:
        k_needed = None
    raise TailTooLarge(tail, tol, k_needed)


def variation_at(f: GridFunction, seq: LacunarySeq, spec: VariationSpec, x) -> np.ndarray:
    """V_s f at arbitrary points: (sum_{k=1..k_max} |A_{n_k}f - A_{n_{k-1}}f|^s)^(1/s)."""
    spec.check_seq(seq)
    stack = scale_stack_at(f, seq, spec.k_max, x)
    diffs = np.abs(np.diff(stack.levels, axis=0))
    vals = _compensated_power_sum(diffs, spec.s) ** (1.0 / spec.s)
    _tail_gate(tail_bound(f, seq, spec.s, spec.k_max), float(np.max(vals, initial=0.0)), spec, seq)
    return vals


def variation(
    f: GridFunction,
    seq: LacunarySeq,
    spec: VariationSpec,
    eval_grid: UniformGrid | None = None,
) -> GridFunction:
    """V_s f sampled at eval-grid midpoints (default grid: support + right pad)."""
    if eval_grid is None:
        eval_grid = default_eval_grid(f, seq, spec.k_max)
    vals = variation_at(f, seq, spec, eval_grid.midpoints)
    return GridFunction(eval_grid.x0, eval_grid.h, vals)


def vector_variation(
    fs: list[GridFunction],
    seq: LacunarySeq,
    spec: VariationSpec,
    rho: float,
    eval_grid: UniformGrid | None = None,
) -> GridFunction:
    """Pointwise ell^rho aggregate (sum_j (V_s f_j)^rho)^(1/rho)."""
    if not fs:
        raise ValueError("need at least one function")
    if not rho > 1.0:
        raise ValueError(f"aggregation exponent must exceed 1, got {rho!r}")
    for g in fs[1:]:
        require_same_grid(fs[0], g)
    if eval_grid is None:
        eval_grid = default_eval_grid(fs[0], seq, spec.k_max)
    parts = np.stack([variation_at(g, seq, spec, eval_grid.midpoints) for g in fs])
    agg = _compensated_power_sum(parts, rho) ** (1.0 / rho)
    return GridFunction(eval_grid.x0, eval_grid.h, agg)

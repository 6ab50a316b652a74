"""Step functions on uniform grids: norms, oscillation, interval families, CSV IO.

Everything downstream works with functions that are constant on the cells of
a uniform grid and identically zero outside it.  That makes averages, Lp
norms and superlevel measures exact finite sums, so the test oracles can be
exact too.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


class GridMismatch(ValueError):
    pass


class EmptyFamily(ValueError):
    pass


class IntervalTooSmall(ValueError):
    pass


class BadParams(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class UniformGrid:
    """Cells [x0 + i*h, x0 + (i+1)*h) for i = 0..n-1."""

    x0: float
    h: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x0) and np.isfinite(self.h)):
            raise ValueError("grid origin and step must be finite")
        if self.h <= 0.0:
            raise ValueError(f"grid step must be positive, got {self.h!r}")
        if self.n < 1:
            raise ValueError(f"grid needs at least one cell, got n={self.n!r}")

    @property
    def edges(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.x0 + self.h * (np.arange(self.n) + 0.5)

    @property
    def x1(self) -> float:
        return self.x0 + self.h * self.n


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Right-open step function: values[i] on [x0 + i*h, x0 + (i+1)*h), 0 outside."""

    x0: float
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "h", float(self.h))
        if not (np.isfinite(self.x0) and self.h > 0.0):
            raise ValueError("need finite x0 and positive h")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def grid(self) -> UniformGrid:
        return UniformGrid(self.x0, self.h, self.n)

    @property
    def x1(self) -> float:
        return self.x0 + self.h * self.n

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        idx = np.floor((x - self.x0) / self.h).astype(np.int64)
        inside = (idx >= 0) & (idx < self.n)
        out = np.zeros(x.shape, dtype=np.float64)
        out[inside] = self.values[idx[inside]]
        return out

    def antiderivative_edges(self) -> np.ndarray:
        """Exact antiderivative S(x) = int_{x0}^{x} f at the cell edges.

        Accumulated in extended precision: the float64 running sum alone can
        drift past the 1e-12 agreement the average oracles are held to.
        """
        acc = np.cumsum(self.values.astype(np.longdouble)) * np.longdouble(self.h)
        out = np.empty(self.n + 1, dtype=np.float64)
        out[0] = 0.0
        out[1:] = acc.astype(np.float64)
        return out

    def integral(self, a: float, b: float) -> float:
        """Exact int_a^b f for a <= b (f vanishes outside the grid)."""
        if b < a:
            raise ValueError("need a <= b")
        S = self.antiderivative_edges()
        e = self.x0 + self.h * np.arange(self.n + 1)
        sa, sb = np.interp([a, b], e, S, left=0.0, right=float(S[-1]))
        return float(sb - sa)


def require_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.n != g.n or f.x0 != g.x0 or f.h != g.h:
        raise GridMismatch("functions live on different grids")


def _weight_cells(f: GridFunction, w) -> np.ndarray | None:
    """Per-cell weight densities aligned to f's grid; None means unweighted."""
    if w is None:
        return None
    if isinstance(w, GridFunction):
        require_same_grid(f, w)
        return w.values
    arr = np.asarray(w, dtype=np.float64)
    if arr.shape != (f.n,):
        raise GridMismatch("weight must give one density value per cell of f")
    return arr


def lp_norm(f: GridFunction, p: float, w=None) -> float:
    """||f||_p, optionally against a weight sampled on the same grid.

    The weight may be a GridFunction sharing f's grid or a bare per-cell
    array; sums are exact for the step functions involved.
    """
    if not p >= 1.0:
        raise ValueError(f"need p >= 1, got {p!r}")
    wc = _weight_cells(f, w)
    if np.isinf(p):
        return sup_norm(f)
    cell = np.abs(f.values) ** p * f.h
    if wc is not None:
        cell = cell * wc
    return float(np.sum(cell) ** (1.0 / p))


def sup_norm(f: GridFunction) -> float:
    return float(np.max(np.abs(f.values)))


def superlevel_measure(f: GridFunction, lam: float, w=None) -> float:
    """measure{ f > lam } restricted to the grid (strict inequality)."""
    wc = _weight_cells(f, w)
    mask = f.values > lam
    if wc is None:
        return float(np.count_nonzero(mask) * f.h)
    return float(np.sum(wc[mask]) * f.h)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"empty interval [{self.lo!r}, {self.hi!r})")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


IntervalFamily = tuple[Interval, ...]


def make_dyadic_family(
    domain: Interval,
    min_len: float,
    *,
    margin: float = 0.0,
    shifts: tuple[float, ...] = (0.0,),
    inside_only: bool = True,
) -> IntervalFamily:
    """Dyadic intervals [j*2^m, (j+1)*2^m) meeting the (padded) domain.

    Levels run from the largest power of two not above the padded domain
    length down to the first level not below `min_len`.  With `inside_only`
    the family keeps only intervals contained in the padded domain.
    `shifts` adds translated copies of the lattice (as fractions of each
    interval's own length).
    """
    lo, hi = domain.lo - margin, domain.hi + margin
    if not min_len > 0.0:
        raise ValueError("min_len must be positive")
    m_top = int(np.floor(np.log2(hi - lo) + 1e-12))
    m_bot = int(np.ceil(np.log2(min_len) - 1e-12))
    if m_top < m_bot:
        raise EmptyFamily("no dyadic level fits between min_len and the domain length")
    out: list[Interval] = []
    for m in range(m_top, m_bot - 1, -1):
        ln = 2.0**m
        for frac in shifts:
            off = frac * ln
            j0 = int(np.floor((lo - off) / ln))
            j1 = int(np.ceil((hi - off) / ln))
            for j in range(j0, j1 + 1):
                a = j * ln + off
                b = a + ln
                if b <= lo or a >= hi:
                    continue
                if inside_only and (a < lo or b > hi):
                    continue
                out.append(Interval(a, b))
    if not out:
        raise EmptyFamily("family came out empty; widen the domain or shrink min_len")
    return tuple(out)


def average_over(f: GridFunction, I: Interval) -> float:
    return f.integral(I.lo, I.hi) / I.length


def bmo_norm(f: GridFunction, family: IntervalFamily) -> float:
    """sup over the family of the mean oscillation (f zero outside its grid).

    Oscillation over I is (1/|I|) int_I |f - avg_I f|; on a step function
    this is an exact sum over cell fragments, partial cells included.
    """
    if not family:
        raise EmptyFamily("bmo_norm needs at least one interval")
    S = f.antiderivative_edges()
    e = f.x0 + f.h * np.arange(f.n + 1)
    top = float(S[-1])
    best = 0.0
    for I in family:
        s_hi, s_lo = np.interp([I.hi, I.lo], e, S, left=0.0, right=top)
        avg = (s_hi - s_lo) / I.length
        # fragment the interval by the cell edges it crosses
        i0 = max(int(np.ceil((I.lo - f.x0) / f.h)), 0)
        i1 = min(int(np.floor((I.hi - f.x0) / f.h)), f.n)
        inner = f.x0 + f.h * np.arange(i0, i1 + 1)
        inner = inner[(inner > I.lo) & (inner < I.hi)]
        cuts = np.concatenate([[I.lo], inner, [I.hi]])
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        lens = np.diff(cuts)
        osc = float(np.sum(np.abs(f(mids) - avg) * lens)) / I.length
        best = max(best, osc)
    return best


@dataclass(frozen=True, eq=False)
class Atom:
    """Mean-zero function supported on `interval` with sup norm <= 1/|interval|."""

    fn: GridFunction
    interval: Interval


def make_atom(I: Interval, seed: int, cells: int = 32) -> Atom:
    """Random mean-zero step function on I scaled to peak exactly 1/|I|.

    The same seed gives the same cell pattern whatever the interval, so a
    family of atoms at different scales consists of dilates of each other.
    """
    if cells < 2:
        raise IntervalTooSmall("an atom needs at least two cells to have zero mean")
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1.0, 1.0, size=cells)
    v -= v.mean()
    v -= v.mean()  # second pass mops up the rounding residue of the first
    peak = np.max(np.abs(v))
    if peak == 0.0:
        raise ValueError("degenerate atom draw; change the seed")
    v *= 1.0 / (peak * I.length)
    return Atom(GridFunction(I.lo, I.length / cells, v), I)


def make_family(kind: str, params: dict) -> list[GridFunction]:
    """Deterministic test-function corpora.

    kinds and their params (all accept an optional left endpoint x0):
      indicator    scales: lengths L -> unit-height indicators of [x0, x0+L)
      haar         scales: lengths L -> +1 then -1 over two half cells
      bump         scales: lengths L -> raised cosine, peak 1
      random_step  count, seed, cells=64, length=1.0 -> uniform(-1,1) steps
      spike        epsilons: widths e -> (1/e) * indicator of [x0, x0+e)
    """
    x0 = float(params.get("x0", 0.0))
    if kind == "indicator":
        scales = params.get("scales")
        if not scales:
            raise BadParams("indicator family needs non-empty 'scales'")
        cells = int(params.get("cells", 1))
        return [GridFunction(x0, float(L) / cells, np.ones(cells)) for L in scales]
    if kind == "haar":
        scales = params.get("scales")
        if not scales:
            raise BadParams("haar family needs non-empty 'scales'")
        return [
            GridFunction(x0, float(L) / 2.0, np.array([1.0, -1.0])) for L in scales
        ]
    if kind == "bump":
        scales = params.get("scales")
        if not scales:
            raise BadParams("bump family needs non-empty 'scales'")
        cells = int(params.get("cells", 64))
        t = (np.arange(cells) + 0.5) / cells
        prof = 0.5 * (1.0 - np.cos(2.0 * np.pi * t))
        return [GridFunction(x0, float(L) / cells, prof) for L in scales]
    if kind == "random_step":
        count = int(params.get("count", 0))
        if count < 1:
            raise BadParams("random_step family needs 'count' >= 1")
        seed = int(params.get("seed", 0))
        cells = int(params.get("cells", 64))
        length = float(params.get("length", 1.0))
        rng = np.random.default_rng(seed)
        return [
            GridFunction(x0, length / cells, rng.uniform(-1.0, 1.0, size=cells))
            for _ in range(count)
        ]
    if kind == "spike":
        eps = params.get("epsilons")
        if not eps:
            raise BadParams("spike family needs non-empty 'epsilons'")
        return [GridFunction(x0, float(e), np.array([1.0 / float(e)])) for e in eps]
    raise BadParams(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------- CSV format

_HEADER = "x,value"


def write_function_csv(f: GridFunction, path_or_buf) -> None:
    """CSV with a metadata comment line, then one row per cell left edge.

    Values carry 17 significant digits so the round trip is bit-exact for
    float64.
    """
    own = isinstance(path_or_buf, (str, bytes))
    buf = open(path_or_buf, "w", encoding="utf-8") if own else path_or_buf
    try:
        buf.write(f"# x0={f.x0:.17g} h={f.h:.17g} n={f.n}\n")
        buf.write(_HEADER + "\n")
        edges = f.x0 + f.h * np.arange(f.n)
        for x, v in zip(edges, f.values):
            buf.write(f"{x:.17g},{v:.17g}\n")
    finally:
        if own:
            buf.close()


def read_function_csv(path_or_buf) -> GridFunction:
    own = isinstance(path_or_buf, (str, bytes))
    buf = open(path_or_buf, "r", encoding="utf-8") if own else path_or_buf
    try:
        meta = buf.readline().strip()
        if not meta.startswith("#"):
            raise ValueError("missing metadata comment line")
        fields = dict(tok.split("=", 1) for tok in meta[1:].split())
        x0, h, n = float(fields["x0"]), float(fields["h"]), int(fields["n"])
        header = buf.readline().strip()
        if header != _HEADER:
            raise ValueError(f"expected header {_HEADER!r}, got {header!r}")
        rows = np.loadtxt(io.StringIO(buf.read()), delimiter=",", ndmin=2)
        if rows.shape[0] != n:
            raise ValueError(f"metadata says n={n} but file has {rows.shape[0]} rows")
        return GridFunction(x0, h, rows[:, 1])
    finally:
        if own:
            buf.close()

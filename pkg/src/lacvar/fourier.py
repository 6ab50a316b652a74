"""Closed-form Fourier side of the averaging operators.

The window profile (1/n) * indicator of (0, n) has transform F(xi * n) with
F(r) = (1 - exp(-i r)) / (i r) and F(0) = 1.  Everything here is evaluated
from that closed form; no discrete transform is involved, so there is no
aliasing to worry about.  The module computes the telescoping multiplier
sums (the first-difference l^1 sum I with its two-regime split I1 + I2 and
the squared sum Q) and checks the derivative bound used to control the
large-frequency regime.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lacunary import LacunarySeq


class EmptyGrid(ValueError):
    pass


class BoundViolation(AssertionError):
    def __init__(self, r: float, value: float, bound: float):
        super().__init__(
            f"|F'({r!r})| = {value!r} exceeds the claimed bound {bound!r}"
        )
        self.r = r
        self.value = value
        self.bound = bound


# Power-series coefficients of F(r) = sum_m (-i r)^m / (m+1)!; used below
# |r| = 1e-3 where the subtractive closed form loses digits.  The m = 6 term
# is ~ r^6/5040 ~ 1e-22, far below double precision at the switch point.
_F_COEFF = (1.0, -0.5j, -1.0 / 6.0, 1.0j / 24.0, 1.0 / 120.0, -1.0j / 720.0)
_FP_COEFF = (-0.5j, -1.0 / 3.0, 1.0j / 8.0, 1.0 / 30.0, -1.0j / 144.0)
_SMALL = 1e-3


def _horner(r: np.ndarray, coeff) -> np.ndarray:
    out = np.full(r.shape, coeff[-1], dtype=np.complex128)
    for c in coeff[-2::-1]:
        out = out * r + c
    return out


def F_eval(r):
    """F(r) = (1 - exp(-i r)) / (i r), with F(0) = 1 by the series limit.

    |F(r)| = 2 |sin(r/2)| / |r| for r != 0, so |F| <= 1 everywhere and
    F vanishes at nonzero multiples of 2 pi.
    """
    arr = np.asarray(r, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty(arr.shape, dtype=np.complex128)
    small = np.abs(arr) < _SMALL
    out[small] = _horner(arr[small], _F_COEFF)
    big = arr[~small]
    out[~small] = (1.0 - np.exp(-1j * big)) / (1j * big)
    return complex(out[0]) if scalar else out


def fprime(r):
    """Derivative of F: (r exp(-i r) + i (1 - exp(-i r))) / r**2."""
    arr = np.asarray(r, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty(arr.shape, dtype=np.complex128)
    small = np.abs(arr) < _SMALL
    out[small] = _horner(arr[small], _FP_COEFF)
    big = arr[~small]
    e = np.exp(-1j * big)
    out[~small] = (big * e + 1j * (1.0 - e)) / big**2
    return complex(out[0]) if scalar else out


def phi_hat(n: float, xi):
    """Transform of the window profile at scale n: F(xi * n)."""
    if not n > 0.0:
        raise ValueError(f"window must be positive, got {n!r}")
    return F_eval(np.asarray(xi, dtype=np.float64) * n)


@dataclass(frozen=True, eq=False)
class MultiplierScan:
    """Per-frequency multiplier sums over a truncated scale family.

    i_sum[k] collects |F(xi n_k) - F(xi n_{k-1})| for k = 1..k_max, split
    into i_high (terms with |xi| n_k >= 1) and i_low (the rest), with
    i_sum = i_high + i_low exactly.  q_sum is the squared-modulus sum.
    """

    xi: np.ndarray = field(repr=False)
    i_sum: np.ndarray = field(repr=False)
    i_high: np.ndarray = field(repr=False)
    i_low: np.ndarray = field(repr=False)
    q_sum: np.ndarray = field(repr=False)
    k_max: int = 0


def multiplier_sums(seq: LacunarySeq, xi, k_max: int) -> MultiplierScan:
    if k_max > len(seq) - 1:
        raise ValueError(f"k_max={k_max} exceeds sequence length {len(seq)} - 1")
    if k_max < 1:
        raise ValueError("need k_max >= 1 for at least one difference")
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if xi.size == 0:
        raise EmptyGrid("frequency grid is empty")
    scales = np.array(seq.scales[: k_max + 1])
    hat = F_eval(np.multiply.outer(xi, scales))
    diffs = np.abs(np.diff(hat, axis=1))
    high = np.abs(xi)[:, None] * scales[None, 1:] >= 1.0
    i_high = np.sum(diffs * high, axis=1)
    i_low = np.sum(diffs * ~high, axis=1)
    q_sum = np.sum(diffs * diffs, axis=1)
    return MultiplierScan(xi, i_high + i_low, i_high, i_low, q_sum, k_max)


@dataclass(frozen=True, eq=False)
class ScanSummary:
    scan: MultiplierScan
    sup_i: float
    sup_q: float
    argmax_xi: float


def sup_scan(seq: LacunarySeq, xi_grid, k_max: int) -> ScanSummary:
    scan = multiplier_sums(seq, xi_grid, k_max)
    at = int(np.argmax(scan.i_sum))
    return ScanSummary(
        scan,
        float(scan.i_sum[at]),
        float(np.max(scan.q_sum)),
        float(scan.xi[at]),
    )


def default_xi_grid(lo: float = 1e-6, hi: float = 1e6, count: int = 8192) -> np.ndarray:
    """count log-spaced magnitudes in [lo, hi], plus zero and sign reflection."""
    if not (0.0 < lo < hi) or count < 2:
        raise ValueError("need 0 < lo < hi and count >= 2")
    mags = np.geomspace(lo, hi, count)
    return np.concatenate([-mags[::-1], [0.0], mags])


def parse_xi_grid(spec: str) -> np.ndarray:
    """Frequency-grid literal "log:<lo>:<hi>:<count>" (reflected, zero added)."""
    parts = spec.split(":")
    if parts[0] != "log" or len(parts) != 4:
        raise ValueError(f"unrecognized frequency grid literal {spec!r}")
    return default_xi_grid(float(parts[1]), float(parts[2]), int(parts[3]))


@dataclass(frozen=True, eq=False)
class FprimeReport:
    r: np.ndarray = field(repr=False)
    deriv_abs: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)
    fd_rel_err: np.ndarray = field(repr=False)

    @property
    def max_fd_rel_err(self) -> float:
        return float(np.max(self.fd_rel_err))

    @property
    def max_bound_margin(self) -> float:
        """max of |F'| / bound; below 1 means no violation anywhere."""
        return float(np.max(self.deriv_abs / self.bound))


def fprime_check(r_samples) -> FprimeReport:
    """Verify |F'(r)| <= (r+2)/r**2 and cross-check F' by central differences.

    The difference step is 1e-6 * max(1, r), balancing truncation against
    cancellation so the comparison is meaningful at 1e-6 relative.
    """
    r = np.atleast_1d(np.asarray(r_samples, dtype=np.float64))
    if np.any(r <= 0.0):
        raise ValueError("all sample points must be positive")
    deriv = fprime(r)
    deriv_abs = np.abs(deriv)
    bound = (r + 2.0) / r**2
    bad = deriv_abs > bound
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BoundViolation(float(r[i]), float(deriv_abs[i]), float(bound[i]))
    step = 1e-6 * np.maximum(1.0, r)
    fd = (F_eval(r + step) - F_eval(r - step)) / (2.0 * step)
    fd_rel = np.abs(fd - deriv) / deriv_abs
    return FprimeReport(r, deriv_abs, bound, fd_rel)

"""Independent numerical ground truth.

Everything here is deliberately ignorant of operators and kernels: plain
adaptive quadrature, alternating-slab integration of oscillatory tails,
Monte Carlo with a documented PRNG, Richardson extrapolation and Euler
summation. The symbolic side is checked against these routines.
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

LOGGER = logging.getLogger(__name__)

# Gauss-Kronrod (7, 15) nodes on [-1, 1]; only the nonnegative half is stored.
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993945, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0000000000000000,
])
_WGK = np.array([
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
])
# Gauss weights for the 7-point rule, attached to the odd-indexed Kronrod nodes.
_WG = np.array([0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: complex | float
    error_estimate: float
    subdivisions: int
    converged: bool

    def __float__(self):
        return float(np.real(self.value))


@dataclass(frozen=True)
class McResult:
    estimate: float
    standard_error: float
    sample_count: int
    seed: int

    def agrees(self, truth: float, sigmas: float = 3.0) -> bool:
        return abs(self.estimate - truth) <= sigmas * self.standard_error


def _gk15(f, a: float, b: float):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    xs = np.concatenate([c - h * _XGK[:-1], [c], c + h * _XGK[:-1][::-1]])
    fx = np.array([f(x) for x in xs])
    left, mid, right = fx[:7], fx[7], fx[8:][::-1]
    pair = left + right
    kron = h * (np.dot(_WGK[:-1], pair) + _WGK[-1] * mid)
    gauss = h * (np.dot(_WG[:3], pair[1::2]) + _WG[3] * mid)
    resabs = abs(h) * (np.dot(_WGK[:-1], np.abs(left) + np.abs(right)) + _WGK[-1] * abs(mid))
    err = abs(kron - gauss)
    err = max(err, 50.0 * _EPS * resabs)
    return kron, float(err)


def _map_infinite(f, a, b):
    """Return (g, lo, hi) so that the integral of f on [a, b] equals that of g on [lo, hi]."""
    if math.isinf(a) and math.isinf(b):
        if a > 0 or b < 0:
            raise ValueError("degenerate infinite interval")
        # t = s / (1 - s^2) on (-1, 1)
        def g(s):
            d = 1.0 - s * s
            return f(s / d) * (1.0 + s * s) / (d * d)
        return g, -1.0, 1.0
    if math.isinf(b):
        # t = a + s / (1 - s) on [0, 1)
        def g(s):
            d = 1.0 - s
            return f(a + s / d) / (d * d)
        return g, 0.0, 1.0
    if math.isinf(a):
        def g(s):
            d = 1.0 - s
            return f(b - s / d) / (d * d)
        return g, 0.0, 1.0
    return f, a, b


def quad_1d(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_subdivisions: int = 2000,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7, 15) quadrature.

    The interval with the largest error estimate is bisected until the
    summed estimate drops below ``tol * max(1, |value|)`` or the subdivision
    cap is hit. Infinite endpoints are mapped onto finite ones with
    ``t = s / (1 - s)``. The per-interval error is ``|K15 - G7|`` floored at
    50 ulps of the absolute integral, so it never claims more than
    double precision allows.
    """
    if a == b:
        return QuadResult(0.0, 0.0, 0, True)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    g, lo, hi = _map_infinite(f, a, b)
    val, err = _gk15(g, lo, hi)
    heap = [(-err, lo, hi, val)]
    total_val, total_err = val, err
    n = 1
    while True:
        target = tol * max(1.0, abs(total_val))
        if total_err <= target:
            break
        if n >= max_subdivisions:
            LOGGER.debug("quad_1d hit subdivision cap; error %.3g > %.3g", total_err, target)
            break
        neg_err, x0, x1, v = heapq.heappop(heap)
        xm = 0.5 * (x0 + x1)
        if xm <= x0 or xm >= x1:
            # interval collapsed to machine resolution
            heapq.heappush(heap, (neg_err, x0, x1, v))
            break
        v1, e1 = _gk15(g, x0, xm)
        v2, e2 = _gk15(g, xm, x1)
        heapq.heappush(heap, (-e1, x0, xm, v1))
        heapq.heappush(heap, (-e2, xm, x1, v2))
        n += 1
        # re-sum from scratch occasionally to avoid drift in the running totals
        total_val = total_val - v + v1 + v2
        total_err = total_err + neg_err + e1 + e2
        if n % 64 == 0:
            total_val = sum(item[3] for item in heap)
            total_err = -sum(item[0] for item in heap)
    total_val = sum(item[3] for item in sorted(heap, key=lambda it: it[1]))
    total_err = -sum(item[0] for item in heap)
    converged = total_err <= tol * max(1.0, abs(total_val))
    value = sign * total_val
    if isinstance(value, complex) or np.iscomplexobj(value):
        value = complex(value)
    else:
        value = float(value)
    return QuadResult(value, float(total_err), n, bool(converged))


def euler_transform(partial_sums: Sequence[complex]) -> tuple[complex, float]:
    """Sum a (possibly divergent) alternating series by iterated averaging.

    Row ``j`` of the table holds the partial sums averaged ``j`` times. The
    last entry of every row forms the diagonal; the value returned is the
    diagonal entry whose change from its predecessor is smallest, together
    with that change as the stabilization metric.
    """
    row = np.asarray(partial_sums, dtype=complex)
    if row.size == 0:
        raise ValueError("no partial sums")
    diag = [row[-1]]
    while row.size > 1:
        row = 0.5 * (row[:-1] + row[1:])
        diag.append(row[-1])
    if len(diag) == 1:
        return _realify(diag[0]), math.inf
    deltas = np.abs(np.diff(diag))
    j = int(np.argmin(deltas))
    return _realify(diag[j + 1]), float(deltas[j])


def _realify(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


def quad_oscillatory(
    f: Callable[[float], float],
    a: float = 0.0,
    half_period: float = math.pi,
    first_zero: float | None = None,
    tol: float = 1e-10,
    slabs: int = 160,
    depth: int = 40,
) -> QuadResult:
    """Integrate an oscillatory integrand on ``[a, inf)``.

    The domain is cut at ``first_zero + k * half_period`` (``first_zero``
    defaults to ``a``); each slab is integrated with :func:`quad_1d` and the
    resulting alternating series is summed with :func:`euler_transform`
    applied to the last ``depth + 1`` partial sums.
    """
    z0 = a if first_zero is None else first_zero
    if z0 < a:
        raise ValueError("first_zero must lie at or after a")
    pieces = []
    err = 0.0
    subdiv = 0
    if z0 > a:
        r = quad_1d(f, a, z0, tol * 1e-2)
        pieces.append(r.value)
        err += r.error_estimate
        subdiv += r.subdivisions
    head = sum(pieces)
    slab_vals = []
    for k in range(slabs):
        lo = z0 + k * half_period
        r = quad_1d(f, lo, lo + half_period, tol * 1e-2)
        slab_vals.append(r.value)
        err += r.error_estimate
        subdiv += r.subdivisions
    sums = np.cumsum(slab_vals)
    tail = sums[-(depth + 1):]
    value, metric = euler_transform(tail)
    # consistency: same transform one slab earlier
    value2, _ = euler_transform(sums[-(depth + 2):-1])
    est = err + metric + abs(value - value2)
    value = head + value
    converged = est <= tol * max(1.0, abs(value))
    return QuadResult(_realify(value), float(est), subdiv, bool(converged))


def richardson_limit(
    g: Callable[[float], complex],
    h0: float,
    levels: int = 8,
    ratio: float = 2.0,
    first_power: int = 1,
) -> tuple[complex, float]:
    """Limit of ``g(h)`` as ``h -> 0`` by Richardson extrapolation.

    Assumes ``g(h) = L + c1 h^p + c2 h^(p+1) + ...`` with ``p = first_power``
    and evaluates at ``h0, h0/ratio, ...``. Returns the last diagonal entry
    and the difference from the previous one.
    """
    hs = [h0 / ratio**k for k in range(levels)]
    table = [[complex(g(h))] for h in hs]
    for i in range(1, levels):
        for j in range(1, i + 1):
            fac = ratio ** (first_power + j - 1)
            prev = table[i][j - 1]
            table[i].append(prev + (prev - table[i - 1][j - 1]) / (fac - 1.0))
    best = table[-1][-1]
    delta = abs(best - table[-2][-2]) if levels > 1 else math.inf
    return _realify(best), float(delta)


# ---------------------------------------------------------------------------
# Monte Carlo

_MASK = (1 << 64) - 1
_XS_MUL = np.uint64(0x2545F4914F6CDD1D)
_LANES = 256


def _splitmix64(x: int) -> tuple[int, int]:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* generator run as 256 interleaved lanes.

    Lane ``j`` starts from the ``j``-th output of splitmix64 seeded with
    ``seed``. One step of a lane is::

        x ^= x >> 12; x ^= x << 25; x ^= x >> 27
        out = x * 0x2545F4914F6CDD1D  (mod 2**64)

    A block of draws takes one step of every lane, lanes in index order.
    Uniforms are ``(out >> 11) * 2**-53``, which lies in ``[0, 1)``.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        st = self.seed & _MASK
        lanes = []
        for _ in range(_LANES):
            st, z = _splitmix64(st)
            lanes.append(z or 1)
        self._state = np.array(lanes, dtype=np.uint64)

    def _step(self) -> np.ndarray:
        x = self._state
        x ^= x >> np.uint64(12)
        x ^= x << np.uint64(25)
        x ^= x >> np.uint64(27)
        self._state = x
        return x * _XS_MUL

    def uint64(self, count: int) -> np.ndarray:
        blocks = -(-count // _LANES)
        out = np.empty(blocks * _LANES, dtype=np.uint64)
        for i in range(blocks):
            out[i * _LANES:(i + 1) * _LANES] = self._step()
        return out[:count]

    def uniform(self, count: int) -> np.ndarray:
        return (self.uint64(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def exponential(self, count: int) -> np.ndarray:
        # 1 - U lies in (0, 1], so the log is finite
        return -np.log1p(-self.uniform(count))


def _mc_result(values: np.ndarray, scale: float, seed: int) -> McResult:
    n = values.size
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if n > 1 else math.inf
    return McResult(scale * mean, scale * sd / math.sqrt(n), n, seed)


def sample_simplex(n: int, samples: int, rng: XorShift64Star) -> np.ndarray:
    """Uniform points of ``{x >= 0, sum x <= 1}`` via normalized exponential spacings.

    ``n + 1`` exponentials per point are normalized to a Dirichlet(1,...,1)
    vector and the last coordinate is dropped (it plays the role of the
    slack ``1 - sum x``).
    """
    e = rng.exponential(samples * (n + 1)).reshape(samples, n + 1)
    d = e / e.sum(axis=1, keepdims=True)
    return d[:, :n]


def mc_simplex(f: Callable[[np.ndarray], np.ndarray], n: int, samples: int = 1_000_000,
               seed: int = 12345) -> McResult:
    """Monte Carlo integral of ``f`` over the standard simplex S_n.

    ``f`` is vectorized: it receives a ``(samples, n)`` array.
    """
    rng = XorShift64Star(seed)
    x = sample_simplex(n, samples, rng)
    vals = np.asarray(f(x), dtype=float) * np.ones(samples)
    return _mc_result(vals, 1.0 / math.factorial(n), seed)


def mc_orthant_exp(f: Callable[[np.ndarray], np.ndarray], b: Sequence[float],
                   samples: int = 1_000_000, seed: int = 12345) -> McResult:
    """Monte Carlo of ``int_{[0,inf)^n} f(x) exp(-b.x) dx`` by exponential importance draws.

    ``x_k ~ Exp(b_k)`` independently, so the estimate is ``mean(f) / prod(b)``.
    A warning is logged when the largest single contribution dominates the
    sum, which signals an unstable (possibly infinite-variance) estimator.
    """
    b = np.asarray(b, dtype=float)
    if np.any(b <= 0):
        raise ValueError("rates must be positive")
    rng = XorShift64Star(seed)
    x = rng.exponential(samples * b.size).reshape(samples, b.size) / b
    vals = np.asarray(f(x), dtype=float) * np.ones(samples)
    total = np.sum(np.abs(vals))
    if total > 0 and np.max(np.abs(vals)) > 0.01 * total:
        LOGGER.warning("mc_orthant_exp: single draw carries >1%% of the mass; variance may be infinite")
    return _mc_result(vals, 1.0 / float(np.prod(b)), seed)

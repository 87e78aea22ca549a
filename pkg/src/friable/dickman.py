"""Dickman rho and the analytic companions used by the saddle-point and
contour machinery: the nonzero root xi(u) of exp(xi) = 1 + u*xi, the entire
integral I(z) = integral_0^z (e^t - 1)/t dt, the Laplace transform rho_hat,
the asymptotic formula for rho, and the growth gauges H, L_eps, Y_eps.

rho is represented piecewise on unit intervals [k, k+1] by Chebyshev series.
Each piece is obtained from the previous one through the delay equation
rho(u) = rho(k) - integral_k^u rho(t-1)/t dt, integrating the Chebyshev
interpolant of the integrand in coefficient space (no quadrature error).

Forward integration of the delay equation propagates a roughly constant
*absolute* error (generic solutions of u f' = -f(u-1) decay only like 1/u,
unlike rho itself), so fixed double precision loses all relative accuracy once
rho(u) drops below ~1e-16.  The build therefore runs in mpmath at a working
precision scaled to |log10 rho(u_max)|; the finished coefficients are stored in
extended precision, whose 64-bit mantissa keeps the evaluation error below
1e-14 relative for u <= 50.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, RegionError

EULER_GAMMA = 0.5772156649015328606065120900824024310421593359399

DEFAULT_U_MAX = 56.0
DEFAULT_STEP = 1.0 / 256.0
DEFAULT_ORDER = 150

_LD = np.longdouble


def _cheb_eval(coeffs: np.ndarray, xi):
    """Clenshaw evaluation of sum coeffs_i T_i at xi in [-1, 1] (array ok)."""
    xi = np.asarray(xi, dtype=_LD)
    b1 = np.zeros_like(xi)
    b2 = np.zeros_like(xi)
    two_xi = _LD(2) * xi
    for c in coeffs[:0:-1]:
        b1, b2 = two_xi * b1 - b2 + c, b1
    return xi * b1 - b2 + coeffs[0]


@dataclass
class DickmanTable:
    """rho sampled on a dense grid plus the Chebyshev pieces used to evaluate
    it anywhere below u_max; interpolation error stays below 1e-12 relative up
    to u = 50 (see module docstring)."""

    u_max: float
    step: float
    values: np.ndarray
    interp_order: int
    pieces: list = field(repr=False)

    def rho(self, u: float) -> float:
        if u < 0.0:
            return 0.0
        if u <= 1.0:
            return 1.0
        if u > self.u_max:
            raise RegionError(
                f"u={u} beyond table u_max={self.u_max}; rebuild with a larger "
                f"u_max or call rho(..., extend=True)"
            )
        k = min(int(math.floor(u)), len(self.pieces) - 1)
        xi = _LD(2) * (_LD(u) - _LD(k)) - _LD(1)
        return float(_cheb_eval(self.pieces[k], xi))


def log10_rho_estimate(u: float) -> float:
    """log10 of the saddle-point approximation to rho; coarse but safe for
    sizing precision (adequate for u up to several hundred)."""
    if u <= 1.0:
        return 0.0
    x = xi(u)
    return (
        EULER_GAMMA - u * x + big_I(x).real + 0.5 * math.log(xi_prime(u) / (2 * math.pi))
    ) / math.log(10.0)


def _to_longdouble(value) -> np.longdouble:
    """Conversion preserving extended precision via a two-float split."""
    hi = float(value)
    lo = float(value - hi)
    return _LD(hi) + _LD(lo)


def build_dickman_table(
    u_max: float = DEFAULT_U_MAX,
    step: float = DEFAULT_STEP,
    interp_order: int = DEFAULT_ORDER,
) -> DickmanTable:
    """One-time construction of the piecewise-Chebyshev representation.

    The working precision shrinks piece by piece: piece k only needs enough
    digits for roundoff at scale rho(k) to stay below the final table's
    absolute target, which is a small multiple of rho(u_max)."""
    import mpmath as mp

    n_pieces = max(int(math.ceil(u_max)), 1)
    order = int(interp_order)
    # absolute error target and the per-piece decimal precision schedule
    log10_target = log10_rho_estimate(n_pieces + 1) - 15.0
    dps_max = max(40, 10 + int(-log10_target))

    def piece_dps(k: int) -> int:
        return max(30, 12 + int(log10_rho_estimate(max(k - 1, 0)) - log10_target))

    with mp.workdps(dps_max):
        # every fit coefficient is cos(pi*r/(2*order)) for some residue r
        cos_base = [mp.cos(mp.pi * r / (2 * order)) for r in range(4 * order)]
    nodes = [cos_base[(2 * j + 1) % (4 * order)] for j in range(order)]

    def clenshaw(c, x):
        b1 = b2 = mp.mpf(0)
        for cc in reversed(c[1:]):
            b1, b2 = 2 * x * b1 - b2 + cc, b1
        return x * b1 - b2 + c[0]

    def trim(coeffs, floor):
        keep = len(coeffs)
        while keep > 8 and abs(coeffs[keep - 1]) < floor:
            keep -= 1
        return coeffs[:keep]

    mp_pieces = [[mp.mpf(1)]]
    rho_left = mp.mpf(1)
    for k in range(1, n_pieces):
        with mp.workdps(piece_dps(k)):
            vals = []
            for j in range(order):
                t = k + (nodes[j] + 1) / 2
                vals.append(clenshaw(mp_pieces[k - 1], 2 * (t - k) - 1) / t)
            a = [
                2 * mp.fdot((cos_base[(i * (2 * j + 1)) % (4 * order)], vals[j])
                            for j in range(order)) / order
                for i in range(order)
            ]
            a[0] /= 2
            # antidifferentiate the T-series exactly; B(-1) = 0
            b = [mp.mpf(0)] * (order + 1)
            b[1] = a[0] - a[2] / 2
            for i in range(2, order + 1):
                hi = a[i + 1] if i + 1 < order else mp.mpf(0)
                b[i] = (a[i - 1] - hi) / (2 * i)
            b[0] = -mp.fsum(b[i] * (-1) ** i for i in range(1, order + 1))
            coeffs = [-v / 2 for v in b]  # dt = dxi/2 on a unit interval
            coeffs[0] += rho_left
            coeffs = trim(coeffs, mp.mpf(10) ** int(log10_target - 2))
            mp_pieces.append(coeffs)
            rho_left = mp.fsum(coeffs)  # value at xi = 1
    pieces = [
        np.array([_to_longdouble(c) for c in piece], dtype=_LD) for piece in mp_pieces
    ]
    grid = np.arange(0.0, u_max + step / 2, step)
    values = np.empty_like(grid)
    for i, u in enumerate(grid):
        if u <= 1.0:
            values[i] = 1.0
        else:
            k = min(int(math.floor(u)), n_pieces - 1)
            values[i] = float(_cheb_eval(pieces[k], _LD(2) * (_LD(u) - _LD(k)) - _LD(1)))
    return DickmanTable(
        u_max=float(n_pieces), step=step, values=values, interp_order=order, pieces=pieces
    )


_default_table: DickmanTable | None = None


def default_table() -> DickmanTable:
    global _default_table
    if _default_table is None:
        _default_table = build_dickman_table()
    return _default_table


def rho(u: float, table: DickmanTable | None = None, extend: bool = False) -> float:
    """Dickman rho: 1 on [0, 1], u*rho'(u) = -rho(u-1) beyond, 0 for u < 0."""
    global _default_table
    tab = table if table is not None else default_table()
    if extend and u > tab.u_max:
        tab = build_dickman_table(u_max=math.ceil(u) + 1, step=tab.step, interp_order=tab.interp_order)
        if table is None:
            _default_table = tab
    return tab.rho(u)


def _expm1_over(t: float) -> float:
    """(e^t - 1)/t, continuous through t = 0."""
    if abs(t) < 1e-8:
        return 1.0 + t / 2.0 + t * t / 6.0
    return math.expm1(t) / t


def xi(u: float) -> float:
    """The nonzero real root of exp(x) = 1 + u*x, i.e. the root of
    (e^x - 1)/x = u; returns 0 at u = 1 by continuity."""
    if u <= 0:
        raise ValueError(f"need u > 0, got {u}")
    if u == 1.0:
        return 0.0
    if u > 1.0:
        lo, hi = 0.0, 1.0
        while _expm1_over(hi) < u:
            hi *= 2.0
    else:
        hi, lo = 0.0, -2.0 / u
        while _expm1_over(lo) > u:
            lo *= 2.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if _expm1_over(mid) < u:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(6):  # Newton polish on e^x - 1 - u*x
        f = math.expm1(x) - u * x
        fp = math.exp(x) - u
        if fp == 0.0:
            break
        step = f / fp
        x -= step
        if abs(step) <= 1e-16 * (1.0 + abs(x)):
            break
    return x


def xi_prime(u: float) -> float:
    """Derivative of xi by implicit differentiation: exp(xi) xi' = xi + u xi'
    gives xi' = xi / (exp(xi) - u) = xi / (1 + u*xi - u); equals 2 at u = 1."""
    if u == 1.0:
        return 2.0
    x = xi(u)
    return x / (1.0 + u * x - u)


def big_I(z) -> complex:
    """Entire function integral_0^z (e^t - 1)/t dt.

    The everywhere-convergent series sum z^n/(n*n!) is used where its largest
    term e^|z| does not drown the result (|z| - Re z small); elsewhere the
    series cancels catastrophically in doubles and the value is taken from
    I(z) = -gamma - log(-z) - E1(-z), which is safe exactly there because -z
    stays away from the negative real axis."""
    z = complex(z)
    if abs(z.real) > 700.0:
        raise RegionError(f"exp overflow evaluating I({z})")
    if abs(z) - z.real <= 12.0 or abs(z) < 1.0:
        total = 0j
        term = 1.0 + 0j
        for n in range(1, 1000):
            term *= z / n
            contrib = term / n
            total += contrib
            if abs(contrib) <= 1e-18 * (abs(total) + 1e-300):
                return total
        raise ConvergenceError(f"series for I({z}) did not converge in 1000 terms")
    import mpmath as mp

    with mp.workdps(30):
        w = mp.mpc(-z)
        val = -mp.euler - mp.log(w) - mp.e1(w)
        return complex(val)


def rho_hat(s) -> complex:
    """Laplace transform of rho via the identity rho_hat(s) = exp(gamma + I(-s));
    the primary, fast route (entire in s)."""
    return complex(np.exp(EULER_GAMMA + np.complex128(big_I(-complex(s)))))


def rho_hat_quadrature(
    s, table: DickmanTable | None = None, tol: float = 1e-10, nodes: int = 32
) -> complex:
    """Laplace transform by direct Gauss-Legendre quadrature of
    integral_0^inf e^{-st} rho(t) dt over the table, with a certified tail.

    The tail uses the rigorous staircase decay rho(t) <= rho(u_max) *
    u_max^{-(t-u_max)+1} (from t*rho(t) = integral_{t-1}^t rho), which confines
    the certified region to Re s > -log(u_max) + margin; outside it the
    integral mass lives beyond any practical table and the call fails loudly.
    """
    tab = table if table is not None else default_table()
    s = complex(s)
    sigma = s.real
    decay = math.log(tab.u_max)
    if sigma <= -decay + 0.05:
        raise ConvergenceError(
            f"quadrature route for rho_hat({s}) not certified: need Re s > "
            f"{-decay + 0.05:.3f} for the tail beyond u_max={tab.u_max} to converge"
        )
    x_gl, w_gl = np.polynomial.legendre.leggauss(nodes)
    panels_per_unit = max(1, int(math.ceil(abs(s.imag) / 8.0)))
    total = 0j
    kmax = int(tab.u_max)
    for k in range(kmax):
        for j in range(panels_per_unit):
            a = k + j / panels_per_unit
            b = k + (j + 1) / panels_per_unit
            mid, half = (a + b) / 2.0, (b - a) / 2.0
            t = mid + half * x_gl
            if k == 0:
                vals = np.ones_like(t)
            else:
                xi_loc = _LD(2) * (t.astype(_LD) - _LD(k)) - _LD(1)
                vals = _cheb_eval(tab.pieces[k], xi_loc).astype(np.float64)
            total += half * np.sum(w_gl * vals * np.exp(-s * t))
    rho_end = tab.rho(tab.u_max - 1e-12)
    tail = rho_end * tab.u_max * math.exp(-sigma * tab.u_max) / (sigma + decay)
    if tail > tol * max(abs(total), 1e-300):
        raise ConvergenceError(
            f"tail bound {tail:.3e} beyond u_max={tab.u_max} exceeds tolerance "
            f"{tol:.1e} * |integral| for s={s}; increase u_max"
        )
    return complex(total)


def rho_asymptotic(u: float) -> float:
    """Saddle-point approximation sqrt(xi'(u)/2 pi) * exp(gamma - u*xi + I(xi)),
    accurate to a relative O(1/u) for u >= 1."""
    if u < 1.0:
        raise ValueError(f"need u >= 1, got {u}")
    x = xi(u)
    return math.sqrt(xi_prime(u) / (2.0 * math.pi)) * math.exp(
        EULER_GAMMA - u * x + big_I(x).real
    )


def gauge_H(u: float) -> float:
    """exp(u / log(u+1)^2)."""
    if u <= 0:
        raise ValueError(f"need u > 0, got {u}")
    return math.exp(u / math.log(u + 1.0) ** 2)


def gauge_L(y: float, epsilon: float) -> float:
    """exp((log y)^(3/5 - eps))."""
    if y < 1:
        raise ValueError(f"need y >= 1, got {y}")
    return math.exp(math.log(y) ** (0.6 - epsilon)) if y > 1 else 1.0


def gauge_Y(y: float, epsilon: float) -> float:
    """exp((log y)^(3/2 - eps))."""
    if y <= 1:
        raise ValueError(f"need y > 1, got {y}")
    return math.exp(math.log(y) ** (1.5 - epsilon))


@dataclass(frozen=True)
class DomainGauges:
    """The three growth gauges bundled with their epsilon parameter."""

    epsilon: float = 0.1

    def H(self, u: float) -> float:
        return gauge_H(u)

    def L(self, y: float) -> float:
        return gauge_L(y, self.epsilon)

    def Y(self, y: float) -> float:
        return gauge_Y(y, self.epsilon)


def in_hildebrand_domain(x: float, y: float, epsilon: float = 0.1) -> bool:
    """Whether (x, y) lies in the domain x >= 3,
    exp((log log x)^(5/3 + eps)) <= y <= x."""
    if x < 3 or y < 2:
        return False
    return y <= x and y >= math.exp(math.log(math.log(x)) ** (5.0 / 3.0 + epsilon))

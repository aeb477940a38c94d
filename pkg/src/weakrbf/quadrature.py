"""Quadrature rules on intervals and rectangles.

Gauss-Legendre and Gauss-Lobatto nodes are computed by Newton iteration on
the Legendre three-term recurrence, which stays O(J^2) and is usable for the
thousands of points the reference rule needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from weakrbf.errors import QuadratureError

NEWTON_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray  # (J, d)
    weights: np.ndarray
    exactness_degree: int | None
    name: str = ""
    factors: tuple = field(default=(), repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        w = np.asarray(self.weights, dtype=float)
        if len(nodes) != len(w):
            raise ValueError("nodes and weights differ in length")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    def __len__(self):
        return len(self.weights)


def _legendre_and_derivative(n: int, x):
    """``P_n(x)``, ``P_n'(x)`` and ``P_{n-1}(x)`` by recurrence."""
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x), np.zeros_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp, p0


def _gauss_legendre_reference(J: int):
    if J == 1:
        return np.array([0.0]), np.array([2.0])
    m = (J + 1) // 2
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (J + 0.5))
    for _ in range(100):
        p, dp, _ = _legendre_and_derivative(J, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    _, dp, _ = _legendre_and_derivative(J, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    nodes = np.concatenate([-x, x[::-1][J % 2 :]])
    weights = np.concatenate([w, w[::-1][J % 2 :]])
    if J % 2:
        nodes[m - 1] = 0.0
    return nodes, weights


def _gauss_lobatto_reference(J: int):
    n = J - 1
    if n == 1:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    # interior nodes are the roots of P_n'; start from Chebyshev-Gauss-Lobatto
    x = -np.cos(np.pi * np.arange(J) / n)
    interior = x[1:-1].copy()
    for _ in range(100):
        p, dp, _ = _legendre_and_derivative(n, interior)
        d2p = (2 * interior * dp - n * (n + 1) * p) / (1.0 - interior**2)
        dx = dp / d2p
        interior = interior - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    x = np.concatenate([[-1.0], interior, [1.0]])
    x = 0.5 * (x - x[::-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        p, _, _ = _legendre_and_derivative(n, x)
    w = 2.0 / (n * (n + 1) * p * p)
    return x, 0.5 * (w + w[::-1])


def _mapped(x, w, a, b):
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def trapezoid_rule(a: float, b: float, J: int) -> QuadratureRule:
    if J < 2:
        raise ValueError("trapezoid rule needs J >= 2")
    if not a < b:
        raise ValueError("need a < b")
    x = np.linspace(a, b, J)
    h = (b - a) / (J - 1)
    w = np.full(J, h)
    w[[0, -1]] = 0.5 * h
    return QuadratureRule(x, w, 1, f"trapezoid:{J}")


def gauss_legendre_rule(a: float, b: float, J: int) -> QuadratureRule:
    if J < 1:
        raise ValueError("Gauss-Legendre rule needs J >= 1")
    if not a < b:
        raise ValueError("need a < b")
    x, w = _mapped(*_gauss_legendre_reference(J), a, b)
    return QuadratureRule(x, w, 2 * J - 1, f"gauss:{J}")


def gauss_lobatto_rule(a: float, b: float, J: int) -> QuadratureRule:
    if J < 2:
        raise ValueError("Gauss-Lobatto rule needs J >= 2")
    if not a < b:
        raise ValueError("need a < b")
    x, w = _mapped(*_gauss_lobatto_reference(J), a, b)
    x[0], x[-1] = a, b
    return QuadratureRule(x, w, 2 * J - 3, f"lobatto:{J}")


def composite_gauss_rule(breakpoints, J_per_panel: int) -> QuadratureRule:
    """Gauss-Legendre on every panel between consecutive breakpoints."""
    bp = np.unique(np.asarray(breakpoints, dtype=float))
    xr, wr = _gauss_legendre_reference(J_per_panel)
    xs, ws = [], []
    for a, b in zip(bp[:-1], bp[1:]):
        x, w = _mapped(xr, wr, a, b)
        xs.append(x)
        ws.append(w)
    return QuadratureRule(
        np.concatenate(xs), np.concatenate(ws), 2 * J_per_panel - 1, f"composite-gauss:{J_per_panel}"
    )


def reference_rule(a: float, b: float, centers, points_per_panel: int = 50) -> QuadratureRule:
    """High-count Gauss-Legendre stand-in for exact integration in 1D.

    Panels are split at the centers, where polyharmonic kernels lose
    smoothness, so the rule is exact (up to round-off) for piecewise
    polynomial integrands of degree < 2 * points_per_panel.
    """
    c = np.asarray(centers, dtype=float).ravel()
    c = c[(c > a) & (c < b)]
    rule = composite_gauss_rule(np.concatenate([[a], c, [b]]), points_per_panel)
    return QuadratureRule(rule.nodes, rule.weights, rule.exactness_degree, "reference")


def tensor_product(rx: QuadratureRule, ry: QuadratureRule) -> QuadratureRule:
    if rx.dimension != 1 or ry.dimension != 1:
        raise ValueError("tensor_product needs two 1D rules")
    X, Y = np.meshgrid(rx.nodes[:, 0], ry.nodes[:, 0], indexing="ij")
    W = np.outer(rx.weights, ry.weights)
    deg = None
    if rx.exactness_degree is not None and ry.exactness_degree is not None:
        deg = min(rx.exactness_degree, ry.exactness_degree)
    return QuadratureRule(
        np.column_stack([X.ravel(), Y.ravel()]),
        W.ravel(),
        deg,
        f"{rx.name}x{ry.name}",
        factors=(rx, ry),
    )


def integrate(rule: QuadratureRule, f) -> float:
    """``sum_q w_q f(x_q)``; ``f`` receives the (J, d) node array (1D: (J,))."""
    x = rule.nodes[:, 0] if rule.dimension == 1 else rule.nodes
    vals = np.asarray(f(x), dtype=float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        q = int(np.flatnonzero(bad)[0])
        raise QuadratureError(f"integrand is not finite at node {rule.nodes[q]}")
    return float(rule.weights @ vals)


def parse_rule(spec: str, domain, centers=None, N: int | None = None) -> QuadratureRule:
    """Build a rule from ``trapezoid:J | gauss:J | lobatto:J | reference``.

    A bare kind without ``:J`` uses the default count ``max(100, 5N)``. On a
    rectangle the 1D rule is applied per axis and tensorized; the reference
    rule in 2D is a tensor Gauss-Legendre rule with ``50 sqrt(N)`` points per
    axis.
    """
    spec = spec.strip().lower()
    kind, _, count = spec.partition(":")
    if N is None:
        N = 1 if centers is None else len(np.atleast_1d(centers))
    J = int(count) if count else None
    makers = {"trapezoid": trapezoid_rule, "gauss": gauss_legendre_rule, "lobatto": gauss_lobatto_rule}
    if kind not in makers and kind != "reference":
        raise ValueError(f"unknown quadrature {spec!r}")

    if domain.dim == 1:
        a, b = domain.lower[0], domain.upper[0]
        if kind == "reference":
            if centers is None:
                return gauss_legendre_rule(a, b, 50 * N)
            return reference_rule(a, b, centers)
        return makers[kind](a, b, J if J is not None else max(100, 5 * N))

    if kind == "reference":
        kind, J = "gauss", J or 50 * int(np.ceil(np.sqrt(N)))
    J = J if J is not None else max(100, 5 * int(np.ceil(np.sqrt(N))))
    rules = [makers[kind](lo, hi, J) for lo, hi in zip(domain.lower, domain.upper)]
    return tensor_product(*rules)

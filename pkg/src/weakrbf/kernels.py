"""Radial kernels and their radial derivatives.

Every kernel is evaluated as ``phi(eps * r)``; the polyharmonic splines carry
``eps = 1``. All functions accept scalars or numpy arrays of radii.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from weakrbf.errors import KernelDomainError, SingularPointError


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    MULTIQUADRIC = "mq"
    INVERSE_QUADRATIC = "iq"
    PHS_ODD = "phs"
    PHS_EVEN_LOG = "phslog"


_SMOOTH = (KernelKind.GAUSSIAN, KernelKind.MULTIQUADRIC, KernelKind.INVERSE_QUADRATIC)


@dataclass(frozen=True)
class Kernel:
    kind: KernelKind
    shape: float = 1.0
    order: int = 0

    def __post_init__(self):
        if self.kind in _SMOOTH:
            if not self.shape > 0:
                raise ValueError(f"shape parameter must be positive, got {self.shape}")
        elif self.kind is KernelKind.PHS_ODD:
            if self.order < 1 or self.order % 2 != 1:
                raise ValueError(f"odd PHS exponent must be odd and >= 1, got {self.order}")
            object.__setattr__(self, "shape", 1.0)
        else:
            if self.order < 2 or self.order % 2 != 0:
                raise ValueError(f"log PHS exponent must be even and >= 2, got {self.order}")
            object.__setattr__(self, "shape", 1.0)

    @property
    def is_polyharmonic(self) -> bool:
        return self.kind not in _SMOOTH

    @property
    def name(self) -> str:
        if self.kind is KernelKind.PHS_ODD:
            return {3: "cubic", 5: "quintic"}.get(self.order, f"phs:{self.order}")
        if self.kind is KernelKind.PHS_EVEN_LOG:
            return f"phslog:{self.order}"
        return self.kind.value

    @property
    def gradient_defined_at_center(self) -> bool:
        """False only for ``phi(r) = r`` whose radial slope at 0 is nonzero."""
        return not (self.kind is KernelKind.PHS_ODD and self.order == 1)


def gaussian(eps: float) -> Kernel:
    return Kernel(KernelKind.GAUSSIAN, eps)


def multiquadric(eps: float) -> Kernel:
    return Kernel(KernelKind.MULTIQUADRIC, eps)


def inverse_quadratic(eps: float) -> Kernel:
    return Kernel(KernelKind.INVERSE_QUADRATIC, eps)


def polyharmonic(k: int) -> Kernel:
    if k % 2:
        return Kernel(KernelKind.PHS_ODD, order=k)
    return Kernel(KernelKind.PHS_EVEN_LOG, order=k)


def cubic() -> Kernel:
    return polyharmonic(3)


def quintic() -> Kernel:
    return polyharmonic(5)


def parse_kernel(spec: str, eps: float | None = None) -> Kernel:
    """Build a kernel from its CLI name.

    Accepted names: ``gaussian``, ``mq``, ``iq``, ``cubic``, ``quintic``,
    ``phs:<k>`` (odd k) and ``phslog:<k>`` (even k). Smooth kernels default to
    ``eps = 5``; passing ``eps`` for a polyharmonic spline is an error.
    """
    name = spec.strip().lower()
    smooth = {
        "gaussian": KernelKind.GAUSSIAN,
        "mq": KernelKind.MULTIQUADRIC,
        "iq": KernelKind.INVERSE_QUADRATIC,
    }
    if name in smooth:
        return Kernel(smooth[name], 5.0 if eps is None else float(eps))
    if eps is not None:
        raise ValueError(f"kernel {spec!r} has no shape parameter; drop eps")
    if name == "cubic":
        return cubic()
    if name == "quintic":
        return quintic()
    head, _, tail = name.partition(":")
    try:
        k = int(tail)
    except ValueError:
        raise ValueError(f"unknown kernel {spec!r}") from None
    if head == "phs":
        return Kernel(KernelKind.PHS_ODD, order=k)
    if head == "phslog":
        return Kernel(KernelKind.PHS_EVEN_LOG, order=k)
    raise ValueError(f"unknown kernel {spec!r}")


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise KernelDomainError("kernel evaluated at negative radius")
    return r


def eval_kernel(kernel: Kernel, r):
    """Return ``phi(eps * r)``."""
    r = _check_radius(r)
    kind = kernel.kind
    if kind is KernelKind.GAUSSIAN:
        return np.exp(-((kernel.shape * r) ** 2))
    if kind is KernelKind.MULTIQUADRIC:
        return np.sqrt(1.0 + (kernel.shape * r) ** 2)
    if kind is KernelKind.INVERSE_QUADRATIC:
        return 1.0 / (1.0 + (kernel.shape * r) ** 2)
    if kind is KernelKind.PHS_ODD:
        return r**kernel.order
    # r^k log r -> 0 as r -> 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r**kernel.order * np.log(r)
    return np.where(r > 0, out, 0.0)


def eval_kernel_dr(kernel: Kernel, r):
    """Return ``d/dr phi(eps * r)``."""
    r = _check_radius(r)
    kind = kernel.kind
    e = kernel.shape
    if kind is KernelKind.GAUSSIAN:
        return -2.0 * e * e * r * np.exp(-((e * r) ** 2))
    if kind is KernelKind.MULTIQUADRIC:
        return e * e * r / np.sqrt(1.0 + (e * r) ** 2)
    if kind is KernelKind.INVERSE_QUADRATIC:
        return -2.0 * e * e * r / (1.0 + (e * r) ** 2) ** 2
    k = kernel.order
    if kind is KernelKind.PHS_ODD:
        return k * r ** (k - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r ** (k - 1) * (k * np.log(r) + 1.0)
    return np.where(r > 0, out, 0.0)


def _dr_over_r(kernel: Kernel, r):
    """``phi'(r) / r`` with its finite limit at ``r = 0`` (undefined for r^1)."""
    kind = kernel.kind
    e = kernel.shape
    if kind is KernelKind.GAUSSIAN:
        return -2.0 * e * e * np.exp(-((e * r) ** 2))
    if kind is KernelKind.MULTIQUADRIC:
        return e * e / np.sqrt(1.0 + (e * r) ** 2)
    if kind is KernelKind.INVERSE_QUADRATIC:
        return -2.0 * e * e / (1.0 + (e * r) ** 2) ** 2
    k = kernel.order
    if kind is KernelKind.PHS_ODD:
        if k == 1:
            with np.errstate(divide="ignore"):
                return np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), 0.0)
        return k * r ** (k - 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r ** (k - 2) * (k * np.log(r) + 1.0)
    return np.where(r > 0, out, 0.0)


def kernel_gradient_matrix(kernel: Kernel, points, centers):
    """Gradients of ``x -> phi(eps |x - c|)`` for all point/center pairs.

    ``points`` is (M, d) and ``centers`` is (N, d); returns an (M, N, d) array.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    diff = points[:, None, :] - centers[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    if not kernel.gradient_defined_at_center and np.any(r == 0):
        raise SingularPointError(f"gradient of {kernel.name} kernel undefined at its center")
    return _dr_over_r(kernel, r)[..., None] * diff


def kernel_gradient(kernel: Kernel, x, center):
    """Gradient of ``x -> phi(eps |x - center|)`` at a single point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if x.shape != center.shape or x.size not in (1, 2):
        raise ValueError("x and center must be points of the same dimension 1 or 2")
    return kernel_gradient_matrix(kernel, x[None, :], center[None, :])[0, 0]

"""Catalog of nonlocal interaction potentials.

Six parametrized families of even interaction kernels W, each normalized so
that the Fourier transform satisfies What(0) = 1 (convention
``fhat(xi) = integral exp(-i x xi) f(x) dx``, so the Dirac mass at the origin
has transform 1).  Every family exposes its Fourier transform; families with
an absolutely continuous part in physical space also expose that kernel, and
families with singular (Dirac) parts expose them as explicit point masses.

Families
--------
E1  exponential:  W(x) = beta/(beta-2*lam) * (delta_0 - lam*exp(-beta|x|)),
    What(xi) = beta/(beta-2*lam) * (1 - 2*lam*beta/(xi^2+beta^2)),
    for beta > 0 and lam < beta/2.
E2  Gaussian:  W(x) = exp(-x^2/(4 lam^2)) / (2|lam| sqrt(pi)),
    What(xi) = exp(-lam^2 xi^2), for lam != 0.
E3  rectangle:  W(x) = 1/(2|lam|) on |x| <= |lam|,
    What(xi) = sin(lam xi)/(lam xi), for lam != 0.
E4  three Dirac masses:  W = 2*delta_0 - (delta_{-lam} + delta_{lam})/2,
    What(xi) = 2 - cos(lam xi), for lam >= 0.
E5  Bochner-Riesz:  What(xi) = max(1 - lam xi^2/2, 0), for lam > 0.
E6  roton-maxon fit:  What(xi) = (1 + a xi^2 + b xi^4) exp(-cgauss xi^2),
    defined in Fourier space only; defaults (a, b, cgauss) = (-36, 2687, 30).

The E6 Gaussian exponent is named ``cgauss`` throughout to keep it distinct
from the wave speed ``c`` used elsewhere in the package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "Family",
    "PotentialSpec",
    "DeltaComponent",
    "InvalidPotential",
    "KernelUnavailable",
    "evaluate_fourier",
    "evaluate_kernel",
    "delta_components",
]


class InvalidPotential(ValueError):
    """Parameters outside the admissible domain of a potential family."""


class KernelUnavailable(ValueError):
    """The family has no absolutely continuous physical-space kernel."""


class Family(enum.Enum):
    E1 = "e1"
    E2 = "e2"
    E3 = "e3"
    E4 = "e4"
    E5 = "e5"
    E6 = "e6"


class DeltaComponent(NamedTuple):
    """A Dirac point mass ``weight * delta_{shift}``."""

    shift: float
    weight: float


# Default (a, b, cgauss) for the E6 family.
E6_DEFAULTS = (-36.0, 2687.0, 30.0)


@dataclass(frozen=True)
class PotentialSpec:
    """One interaction potential: a family plus its admissible parameters.

    Instances are immutable and validated on construction; all evaluation
    helpers in this module are pure functions of the spec.

    Parameters per family: E1 uses ``(beta, lam)`` with ``beta > 0`` and
    ``lam < beta/2``; E2 and E3 use ``lam != 0``; E4 uses ``lam >= 0``;
    E5 uses ``lam > 0``; E6 uses ``(a, b, cgauss)`` with ``cgauss > 0``.
    """

    family: Family
    beta: float | None = None
    lam: float | None = None
    a: float | None = None
    b: float | None = None
    cgauss: float | None = None

    def __post_init__(self) -> None:
        f = self.family
        if f is Family.E6:
            a, b, cg = (
                E6_DEFAULTS[0] if self.a is None else self.a,
                E6_DEFAULTS[1] if self.b is None else self.b,
                E6_DEFAULTS[2] if self.cgauss is None else self.cgauss,
            )
            object.__setattr__(self, "a", float(a))
            object.__setattr__(self, "b", float(b))
            object.__setattr__(self, "cgauss", float(cg))
            if self.cgauss <= 0:
                raise InvalidPotential("E6 requires cgauss > 0")
            if self.lam is not None or self.beta is not None:
                raise InvalidPotential("E6 takes (a, b, cgauss), not lam/beta")
            return

        if self.a is not None or self.b is not None or self.cgauss is not None:
            raise InvalidPotential(f"(a, b, cgauss) are E6-only parameters, got {f.value}")
        if self.lam is None:
            raise InvalidPotential(f"{f.value} requires parameter lam")
        object.__setattr__(self, "lam", float(self.lam))

        if f is Family.E1:
            if self.beta is None:
                raise InvalidPotential("E1 requires parameter beta")
            object.__setattr__(self, "beta", float(self.beta))
            if self.beta <= 0:
                raise InvalidPotential("E1 requires beta > 0")
            # The prefactor beta/(beta-2*lam) blows up as lam -> beta/2;
            # the family is only defined below that threshold.
            if self.lam >= self.beta / 2:
                raise InvalidPotential("E1 requires lam < beta/2")
            return

        if self.beta is not None:
            raise InvalidPotential("beta is an E1-only parameter")
        if f is Family.E2 and self.lam == 0:
            raise InvalidPotential("E2 requires lam != 0")
        if f is Family.E3 and self.lam == 0:
            raise InvalidPotential("E3 requires lam != 0")
        if f is Family.E4 and self.lam < 0:
            raise InvalidPotential("E4 requires lam >= 0")
        if f is Family.E5 and self.lam <= 0:
            raise InvalidPotential("E5 requires lam > 0")

    # -- convenience constructors -------------------------------------------

    @classmethod
    def e1(cls, beta: float, lam: float) -> "PotentialSpec":
        return cls(Family.E1, beta=beta, lam=lam)

    @classmethod
    def e2(cls, lam: float) -> "PotentialSpec":
        return cls(Family.E2, lam=lam)

    @classmethod
    def e3(cls, lam: float) -> "PotentialSpec":
        return cls(Family.E3, lam=lam)

    @classmethod
    def e4(cls, lam: float) -> "PotentialSpec":
        return cls(Family.E4, lam=lam)

    @classmethod
    def e5(cls, lam: float) -> "PotentialSpec":
        return cls(Family.E5, lam=lam)

    @classmethod
    def e6(cls, a: float = E6_DEFAULTS[0], b: float = E6_DEFAULTS[1],
           cgauss: float = E6_DEFAULTS[2]) -> "PotentialSpec":
        return cls(Family.E6, a=a, b=b, cgauss=cgauss)

    def label(self) -> str:
        """Short human-readable parameter string, e.g. ``e1(beta=1, lam=0.4)``."""
        if self.family is Family.E1:
            return f"e1(beta={self.beta:g}, lam={self.lam:g})"
        if self.family is Family.E6:
            return f"e6(a={self.a:g}, b={self.b:g}, cgauss={self.cgauss:g})"
        return f"{self.family.value}(lam={self.lam:g})"


def evaluate_fourier(spec: PotentialSpec, xi):
    """Fourier transform What(xi) of the potential.

    Accepts a scalar or an ndarray of frequencies and returns the same shape.
    Even in xi by construction (only xi^2 enters), with What(0) = 1 for every
    admissible spec.  The E3 sinc is evaluated through its removable
    singularity at xi = 0.
    """
    xi = np.asarray(xi, dtype=float)
    f = spec.family
    if f is Family.E1:
        beta, lam = spec.beta, spec.lam
        out = beta / (beta - 2 * lam) * (1.0 - 2 * lam * beta / (xi * xi + beta * beta))
    elif f is Family.E2:
        out = np.exp(-(spec.lam * spec.lam) * xi * xi)
    elif f is Family.E3:
        # np.sinc(t) = sin(pi t)/(pi t), so rescale the argument.
        out = np.sinc(spec.lam * xi / np.pi)
    elif f is Family.E4:
        out = 2.0 - np.cos(spec.lam * xi)
    elif f is Family.E5:
        out = np.maximum(1.0 - spec.lam * xi * xi / 2.0, 0.0)
    else:
        x2 = xi * xi
        out = (1.0 + spec.a * x2 + spec.b * x2 * x2) * np.exp(-spec.cgauss * x2)
    return out if out.ndim else float(out)


def _bochner_riesz_kernel(lam: float, x: np.ndarray) -> np.ndarray:
    # W(x) = sqrt(lam)/(pi x^2) * (sqrt(lam) sin(x s)/x - sqrt(2) cos(x s)),
    # s = sqrt(2/lam).  Rewritten as (2 sqrt(2)/(pi sqrt(lam))) * g(t) with
    # t = x*s and g(t) = (sin t / t - cos t)/t^2, whose t -> 0 limit is 1/3.
    s = math.sqrt(2.0 / lam)
    t = x * s
    small = np.abs(t) < 1e-4
    ts = np.where(small, 1.0, t)
    g = (np.sin(ts) / ts - np.cos(ts)) / (ts * ts)
    t2 = t * t
    g = np.where(small, 1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0, g)
    return (2.0 * math.sqrt(2.0) / (math.pi * math.sqrt(lam))) * g


def evaluate_kernel(spec: PotentialSpec, x):
    """Absolutely continuous part of W(x), excluding any Dirac masses.

    Available for E1 (the smooth exponential part only), E2, E3 and E5.
    Raises :class:`KernelUnavailable` for E4 (pure point masses) and E6
    (defined in Fourier space only).

    The E3 rectangle takes the midpoint value 1/(4|lam|) at the jump
    |x| = |lam|, consistent with symmetric Riemann sums.
    """
    x = np.asarray(x, dtype=float)
    f = spec.family
    if f is Family.E1:
        out = -spec.beta * spec.lam / (spec.beta - 2 * spec.lam) * np.exp(-spec.beta * np.abs(x))
    elif f is Family.E2:
        lam = abs(spec.lam)
        out = np.exp(-x * x / (4 * lam * lam)) / (2 * lam * math.sqrt(math.pi))
    elif f is Family.E3:
        lam = abs(spec.lam)
        ax = np.abs(x)
        out = np.where(ax < lam, 1.0 / (2 * lam), 0.0)
        on_jump = np.abs(ax - lam) <= 1e-12 * max(1.0, lam)
        out = np.where(on_jump, 1.0 / (4 * lam), out)
    elif f is Family.E5:
        out = _bochner_riesz_kernel(spec.lam, x)
    else:
        raise KernelUnavailable(
            f"{f.value} has no absolutely continuous kernel in physical space"
        )
    return out if out.ndim else float(out)


def delta_components(spec: PotentialSpec) -> list[DeltaComponent]:
    """Dirac point masses of the potential, as (shift, weight) pairs.

    Nonzero shifts always come in symmetric pairs with equal weights.
    Empty for the purely absolutely continuous families E2, E3, E5 and for
    the Fourier-only E6.
    """
    f = spec.family
    if f is Family.E1:
        return [DeltaComponent(0.0, spec.beta / (spec.beta - 2 * spec.lam))]
    if f is Family.E4:
        if spec.lam == 0:
            # 2*delta_0 - (delta_0 + delta_0)/2 collapses to a single mass.
            return [DeltaComponent(0.0, 1.0)]
        return [
            DeltaComponent(0.0, 2.0),
            DeltaComponent(-spec.lam, -0.5),
            DeltaComponent(spec.lam, -0.5),
        ]
    return []

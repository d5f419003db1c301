"""Named example subspaces wired to default grids.

Every scenario bundles a subspace description with the exponent, window
ladder, and threshold list that make its dimension visible at desk scale.
The registry backs the command line harness, the property suite, and the
demos, so the constructions live here once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .groups import FiniteSubset, GroupSpec
from .spaces import (
    Annihilator,
    ConvImage,
    ConvKernel,
    ConvolutionKernel,
    CyclicTranslates,
    DirectSum,
    Full,
    Induced,
    KerPeriodization,
    PeriodicInfty,
    Reduced,
    SubspaceSpec,
    SupportedMap,
    UnionPeriodic,
    Zero,
)

_Z = GroupSpec.integer_lattice(1)


def difference_kernel() -> ConvolutionKernel:
    """Scalar kernel sending y to y - (shift of y); image has dimension one."""
    return ConvolutionKernel.scalar(_Z, {0: 1.0, 1: -1.0})


def one_by_two_kernel() -> ConvolutionKernel:
    """Generic 1x2 symbol; its kernel inside the fiber-2 space has dimension one."""
    return ConvolutionKernel.of(_Z, {0: [[1.0, 0.0]], 1: [[0.0, 1.0]]})


def geometric_translates(ratio: float = 0.5, length: int = 16, core_len: int = 4,
                         tail_eps: float = 0.1) -> CyclicTranslates:
    """Translates of a truncated geometric generator with a declared tail."""
    gen = SupportedMap(_Z, 1, {j: ratio**j for j in range(length)})
    return CyclicTranslates(gen, FiniteSubset.of(_Z, range(core_len)), tail_eps)


def near_dirac_translates(k: int = 6, length: int = 12, tail_margin: float = 1e-6) -> CyclicTranslates:
    """Translates of a geometric spike with ratio 2^-k, close to a point mass.

    The l1 distance from the normalized generator to the point mass is
    exactly 2 (r - r^length) / (1 - r^length) with r = 2^-k, just under 2r.
    The declared core is the single point at the identity.
    """
    r = 2.0**-k
    gen = SupportedMap(_Z, 1, {j: r**j for j in range(length)})
    eps = 2.0 * (r - r**length) / (1.0 - r**length)
    return CyclicTranslates(gen, FiniteSubset.of(_Z, [0]), eps + tail_margin)


def dirac_distance(k: int, length: int = 12) -> float:
    """l1 distance from the normalized ratio-2^-k spike to the point mass."""
    r = 2.0**-k
    return 2.0 * (r - r**length) / (1.0 - r**length)


@dataclass(frozen=True)
class Scenario:
    """A registry entry: builder plus the default grid that exhibits it."""

    name: str
    summary: str
    build: Callable[[], SubspaceSpec] = field(repr=False)
    p: float
    windows: tuple[int, ...]
    eps: tuple[float, ...]
    oracle: Optional[tuple[str, Callable[[], ConvolutionKernel]]] = field(default=None, repr=False)


def _registry() -> dict[str, Scenario]:
    entries = [
        Scenario(
            name="full",
            summary="the whole fiber-2 space over Z; normalized bracket pins the fiber dimension",
            build=lambda: Full(_Z, 2),
            p=2.0,
            windows=(8, 16, 64),
            eps=(1.9, 1.0, 0.1),
        ),
        Scenario(
            name="zero",
            summary="the zero subspace; every cell is (0, 0)",
            build=lambda: Zero(_Z, 2),
            p=2.0,
            windows=(8, 16, 64),
            eps=(1.9, 1.0, 0.1),
        ),
        Scenario(
            name="conv_kernel",
            summary="kernel of a generic 1x2 convolution symbol inside the fiber-2 space",
            build=lambda: ConvKernel(one_by_two_kernel()),
            p=2.0,
            windows=(16, 64),
            eps=(0.5, 0.1),
            oracle=("kernel", one_by_two_kernel),
        ),
        Scenario(
            name="conv_image",
            summary="image of the difference kernel; dimension one despite dense range",
            build=lambda: ConvImage(difference_kernel()),
            p=2.0,
            windows=(16, 64),
            eps=(0.5, 0.1),
            oracle=("image", difference_kernel),
        ),
        Scenario(
            name="conv_image_fourier_demo",
            summary="difference-kernel image on a wide window, against the symbol rank oracle",
            build=lambda: ConvImage(difference_kernel()),
            p=2.0,
            windows=(128, 512),
            eps=(0.2, 0.05),
            oracle=("image", difference_kernel),
        ),
        Scenario(
            name="cyclic",
            summary="translates of a truncated geometric generator with declared tail 0.1",
            build=geometric_translates,
            p=2.0,
            windows=(16, 32, 64),
            eps=(0.8, 0.4, 0.2),
        ),
        Scenario(
            name="direct_sum",
            summary="difference-kernel image plus 1x2-symbol kernel; cells add",
            build=lambda: DirectSum(ConvImage(difference_kernel()), ConvKernel(one_by_two_kernel())),
            p=2.0,
            windows=(16, 64),
            eps=(0.5, 0.1),
        ),
        Scenario(
            name="periodic_infty",
            summary="3-periodic bounded sequences; normalized count decays like 3 over the window",
            build=lambda: PeriodicInfty(3),
            p=math.inf,
            windows=(6, 12, 24),
            eps=(1.0, 0.5),
        ),
        Scenario(
            name="ker_periodization",
            summary="summable sequences with vanishing mod-2 residue sums; full dimension at p = 1",
            build=lambda: KerPeriodization(2),
            p=1.0,
            windows=(4, 8, 16),
            eps=(1.5, 0.9),
        ),
        Scenario(
            name="annihilator",
            summary="functionals vanishing on the difference-kernel image",
            build=lambda: Annihilator(ConvImage(difference_kernel())),
            p=2.0,
            windows=(16, 64),
            eps=(0.5, 0.1),
        ),
        Scenario(
            name="reduced",
            summary="difference-kernel image reshaped along index-2 blocks; counts match the wide window",
            build=lambda: Reduced(ConvImage(difference_kernel()), 2),
            p=2.0,
            windows=(8, 32),
            eps=(0.5, 0.1),
        ),
        Scenario(
            name="induced",
            summary="difference-kernel image copied onto each mod-2 residue class",
            build=lambda: Induced(ConvImage(difference_kernel()), 2),
            p=2.0,
            windows=(16, 64),
            eps=(0.5, 0.1),
        ),
        Scenario(
            name="union_periodic",
            summary="sup-norm closure of all periodic sequences; windowed balls are full",
            build=UnionPeriodic,
            p=math.inf,
            windows=(4, 8),
            eps=(1.0, 0.5),
        ),
        Scenario(
            name="remark91_demo",
            summary="translates of a near-point-mass spike; weak approximation of the identity",
            build=lambda: near_dirac_translates(6),
            p=1.0,
            windows=(8, 16),
            eps=(1.5, 0.9),
        ),
    ]
    return {s.name: s for s in entries}


REGISTRY = _registry()


def get_scenario(name: str) -> Scenario:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown scenario {name!r}; known: {known}") from None


def scenario_names() -> tuple[str, ...]:
    return tuple(sorted(REGISTRY))

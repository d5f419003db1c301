"""Translation-invariant subspaces and their finite windowed surrogates.

A subspace of the p-summable functions on a group is described symbolically
(kernel or image of a finitely supported convolution, span of translates of a
generator, periodization kernels, sums, duals, index-d reindexings).  For a
finite window the library builds a *surrogate* of the restricted unit ball:

  inner polarity: columns are restrictions of explicitly constructed
    subspace elements whose full-space norm is at most one, together with the
    full-space matrix over the union of their supports.  The modeled body,
    restrictions of span elements with full norm <= 1, is certified to sit
    inside the true restricted ball.
  outer polarity: the column span provably contains every restriction, and
    the body is span intersected with the ambient unit ball, so it encloses
    the true restricted ball.
  exact polarity: the restricted ball is provably exactly span intersected
    with the ambient ball (full space, zero space, periodic patterns at
    p = infinity).

Width computations downstream turn inner models into certified lower counts
and outer models into certified upper counts.  The fiber norm on vector
values is the coordinate p-sum, which is what makes index-d reindexing an
exact row relabeling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from ._util import RANK_RTOL, check_exponent, lp_norm
from .errors import CapabilityError, StructureError
from .groups import (
    Coords,
    FiniteSubset,
    GroupSpec,
    compose_coords,
    invert_coords,
)

_Z = GroupSpec.integer_lattice(1)


def _as_coords(group: GroupSpec, item) -> Coords:
    if isinstance(item, (tuple, list)):
        return group.check_coords(item)
    if group.rank == 1:
        return group.reduce((int(item),))
    raise StructureError(f"cannot read {item!r} as coordinates of rank {group.rank}")


class SupportedMap:
    """A finitely supported map from the group into R^dim (zero off support)."""

    __slots__ = ("group", "dim", "data")

    def __init__(self, group: GroupSpec, dim: int, data: Optional[Mapping] = None):
        if dim < 1:
            raise StructureError(f"fiber dimension must be >= 1, got {dim}")
        self.group = group
        self.dim = dim
        acc: dict[Coords, np.ndarray] = {}
        for key, val in (data or {}).items():
            vec = np.asarray(val, dtype=float).reshape(dim)
            c = _as_coords(group, key)
            acc[c] = acc[c] + vec if c in acc else vec
        self.data = {c: v for c, v in acc.items() if np.any(v != 0.0)}

    @staticmethod
    def delta(group: GroupSpec, at, dim: int = 1, slot: int = 0) -> "SupportedMap":
        vec = np.zeros(dim)
        vec[slot] = 1.0
        return SupportedMap(group, dim, {_as_coords(group, at): vec})

    @property
    def support(self) -> tuple[Coords, ...]:
        return tuple(sorted(self.data))

    def value(self, at) -> np.ndarray:
        c = _as_coords(self.group, at)
        return self.data.get(c, np.zeros(self.dim)).copy()

    def norm(self, p: float) -> float:
        if not self.data:
            return 0.0
        flat = np.concatenate([self.data[c] for c in sorted(self.data)])
        return lp_norm(flat, p)

    def translated(self, gamma) -> "SupportedMap":
        g = _as_coords(self.group, gamma)
        return SupportedMap(
            self.group,
            self.dim,
            {compose_coords(self.group, g, c): v for c, v in self.data.items()},
        )

    def scaled(self, a: float) -> "SupportedMap":
        return SupportedMap(self.group, self.dim, {c: a * v for c, v in self.data.items()})

    def plus(self, other: "SupportedMap") -> "SupportedMap":
        if other.group != self.group or other.dim != self.dim:
            raise StructureError("cannot add maps with different group or fiber")
        out = {c: v.copy() for c, v in self.data.items()}
        for c, v in other.data.items():
            out[c] = out.get(c, np.zeros(self.dim)) + v
        return SupportedMap(self.group, self.dim, out)

    def __repr__(self):
        return f"SupportedMap({len(self.data)} points, dim={self.dim})"


def pairing(a: SupportedMap, b: SupportedMap) -> float:
    """Sum over the group of the pointwise dot product."""
    if a.group != b.group or a.dim != b.dim:
        raise StructureError("pairing needs matching group and fiber")
    small, big = (a, b) if len(a.data) <= len(b.data) else (b, a)
    return float(sum(np.dot(v, big.data[c]) for c, v in small.data.items() if c in big.data))


@dataclass(frozen=True, eq=False)
class ConvolutionKernel:
    """Finitely supported operator-valued kernel h, acting by right convolution.

    block(s) is a (dim_out x dim_in) matrix; the induced map sends y to
    (h * y)(eta) = sum_gamma h(gamma^-1 eta) y(gamma).  l1_norm sums a
    per-block bound that dominates the block's operator norm on every
    coordinate p-norm (max of the 1->1 and inf->inf norms), so Young's
    inequality holds with it at every p.
    """

    group: GroupSpec
    dim_in: int
    dim_out: int
    blocks: tuple[tuple[Coords, np.ndarray], ...]

    @staticmethod
    def of(group: GroupSpec, entries: Mapping) -> "ConvolutionKernel":
        if not entries:
            raise StructureError("a convolution kernel needs nonempty support")
        parsed = {}
        shape = None
        for key, val in entries.items():
            arr = np.atleast_2d(np.asarray(val, dtype=float))
            if shape is None:
                shape = arr.shape
            elif arr.shape != shape:
                raise StructureError(
                    f"kernel blocks disagree in shape: {arr.shape} vs {shape}"
                )
            parsed[_as_coords(group, key)] = arr
        blocks = tuple((c, parsed[c]) for c in sorted(parsed))
        return ConvolutionKernel(group, shape[1], shape[0], blocks)

    @staticmethod
    def scalar(group: GroupSpec, entries: Mapping) -> "ConvolutionKernel":
        return ConvolutionKernel.of(group, {k: [[float(v)]] for k, v in entries.items()})

    @property
    def support(self) -> FiniteSubset:
        return FiniteSubset(self.group, tuple(c for c, _ in self.blocks))

    def block(self, at) -> np.ndarray:
        c = _as_coords(self.group, at)
        for cc, b in self.blocks:
            if cc == c:
                return b.copy()
        return np.zeros((self.dim_out, self.dim_in))

    @property
    def l1_norm(self) -> float:
        total = 0.0
        for _, b in self.blocks:
            col = float(np.max(np.sum(np.abs(b), axis=0)))
            row = float(np.max(np.sum(np.abs(b), axis=1)))
            total += max(col, row)
        return total


def convolve(h: ConvolutionKernel, y: SupportedMap) -> SupportedMap:
    """(h * y)(eta) = sum_gamma h(gamma^-1 eta) y(gamma), finitely supported."""
    if y.group != h.group:
        raise StructureError("kernel and argument live over different groups")
    if y.dim != h.dim_in:
        raise StructureError(
            f"kernel expects fiber {h.dim_in}, argument has fiber {y.dim}"
        )
    acc: dict[Coords, np.ndarray] = {}
    for gamma, vec in y.data.items():
        for s, blk in h.blocks:
            eta = compose_coords(h.group, gamma, s)
            out = blk @ vec
            if eta in acc:
                acc[eta] = acc[eta] + out
            else:
                acc[eta] = out
    return SupportedMap(h.group, h.dim_out, acc)


def adjoint_kernel(h: ConvolutionKernel) -> ConvolutionKernel:
    """h*(gamma) = h(gamma^-1)^T; the adjoint for the summed dot pairing."""
    entries = {invert_coords(h.group, c): b.T for c, b in h.blocks}
    return ConvolutionKernel.of(h.group, entries)


# --------------------------------------------------------------- subspaces


class SubspaceSpec:
    """Base for symbolic subspace descriptions; see the concrete variants."""

    @property
    def group(self) -> GroupSpec:
        raise NotImplementedError

    @property
    def fiber_dim(self) -> int:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return self.describe()


@dataclass(frozen=True)
class Full(SubspaceSpec):
    """The whole space of p-summable V-valued functions."""

    grp: GroupSpec
    dim_v: int = 1

    def __post_init__(self):
        if self.dim_v < 1:
            raise StructureError("fiber dimension must be >= 1")

    @property
    def group(self):
        return self.grp

    @property
    def fiber_dim(self):
        return self.dim_v

    def describe(self):
        return f"full(dim={self.dim_v})"


@dataclass(frozen=True)
class Zero(SubspaceSpec):
    grp: GroupSpec
    dim_v: int = 1

    def __post_init__(self):
        if self.dim_v < 1:
            raise StructureError("fiber dimension must be >= 1")

    @property
    def group(self):
        return self.grp

    @property
    def fiber_dim(self):
        return self.dim_v

    def describe(self):
        return f"zero(dim={self.dim_v})"


@dataclass(frozen=True, eq=False)
class ConvKernel(SubspaceSpec):
    """Elements annihilated by a finite-type convolution."""

    kernel: ConvolutionKernel

    @property
    def group(self):
        return self.kernel.group

    @property
    def fiber_dim(self):
        return self.kernel.dim_in

    def describe(self):
        return f"conv_kernel(support={len(self.kernel.blocks)}, fiber={self.fiber_dim})"


@dataclass(frozen=True, eq=False)
class ConvImage(SubspaceSpec):
    """Closure of the range of a finite-type convolution."""

    kernel: ConvolutionKernel

    @property
    def group(self):
        return self.kernel.group

    @property
    def fiber_dim(self):
        return self.kernel.dim_out

    def describe(self):
        return f"conv_image(support={len(self.kernel.blocks)}, fiber={self.fiber_dim})"


@dataclass(frozen=True, eq=False)
class CyclicTranslates(SubspaceSpec):
    """Closed span of the translates of one generator.

    core is the finite set carrying all but an lp tail of the normalized
    generator; tail_eps is the declared bound on that tail and is verified
    numerically where it matters.
    """

    generator: SupportedMap
    core: FiniteSubset
    tail_eps: float

    def __post_init__(self):
        if self.core.group != self.generator.group:
            raise StructureError("generator and core live over different groups")
        if not 0.0 <= self.tail_eps < 1.0:
            raise StructureError("declared tail bound must lie in [0, 1)")

    @property
    def group(self):
        return self.generator.group

    @property
    def fiber_dim(self):
        return self.generator.dim

    def describe(self):
        return f"cyclic(core={len(self.core)}, tail={self.tail_eps})"


@dataclass(frozen=True, eq=False)
class DirectSum(SubspaceSpec):
    left: SubspaceSpec
    right: SubspaceSpec

    def __post_init__(self):
        if self.left.group != self.right.group:
            raise StructureError("direct summands live over different groups")

    @property
    def group(self):
        return self.left.group

    @property
    def fiber_dim(self):
        return self.left.fiber_dim + self.right.fiber_dim

    def describe(self):
        return f"sum({self.left.describe()}, {self.right.describe()})"


@dataclass(frozen=True)
class PeriodicInfty(SubspaceSpec):
    """n-periodic bounded sequences on the integers; trivial at finite p."""

    period: int

    def __post_init__(self):
        if self.period < 1:
            raise StructureError("period must be >= 1")

    @property
    def group(self):
        return _Z

    @property
    def fiber_dim(self):
        return 1

    def describe(self):
        return f"periodic_sup(period={self.period})"


@dataclass(frozen=True)
class UnionPeriodic(SubspaceSpec):
    """Sup-norm closure of all periodic sequences; restricted balls are full."""

    @property
    def group(self):
        return _Z

    @property
    def fiber_dim(self):
        return 1

    def describe(self):
        return "periodic_union"


@dataclass(frozen=True)
class KerPeriodization(SubspaceSpec):
    """Summable sequences whose every mod-n residue class sums to zero."""

    period: int

    def __post_init__(self):
        if self.period < 1:
            raise StructureError("period must be >= 1")

    @property
    def group(self):
        return _Z

    @property
    def fiber_dim(self):
        return 1

    def describe(self):
        return f"ker_periodization(period={self.period})"


@dataclass(frozen=True, eq=False)
class Annihilator(SubspaceSpec):
    """Functionals vanishing on the wrapped subspace; symbolic dual."""

    base: SubspaceSpec

    def __post_init__(self):
        annihilator_spec(self.base)  # raises CapabilityError if not closed-form

    @property
    def group(self):
        return self.base.group

    @property
    def fiber_dim(self):
        return self.base.fiber_dim

    def describe(self):
        return f"annihilator({self.base.describe()})"


@dataclass(frozen=True, eq=False)
class Reduced(SubspaceSpec):
    """Reindexing over the index-d subgroup, fiber blown up d-fold."""

    base: SubspaceSpec
    index: int

    def __post_init__(self):
        if self.base.group != _Z:
            raise CapabilityError("reduction is implemented over the integers only")
        if self.index < 1:
            raise ValueError("subgroup index must be >= 1")

    @property
    def group(self):
        return _Z

    @property
    def fiber_dim(self):
        return self.base.fiber_dim * self.index

    def describe(self):
        return f"reduced({self.base.describe()}, d={self.index})"


@dataclass(frozen=True, eq=False)
class Induced(SubspaceSpec):
    """Functions whose every mod-d coset slice lies in the base subspace."""

    base: SubspaceSpec
    index: int

    def __post_init__(self):
        if self.base.group != _Z:
            raise CapabilityError("induction is implemented over the integers only")
        if self.index < 1:
            raise ValueError("subgroup index must be >= 1")

    @property
    def group(self):
        return _Z

    @property
    def fiber_dim(self):
        return self.base.fiber_dim

    def describe(self):
        return f"induced({self.base.describe()}, d={self.index})"


def annihilator_spec(spec: SubspaceSpec) -> SubspaceSpec:
    """Closed-form dual: swaps full and zero, kernels and images (adjointed)."""
    if isinstance(spec, Full):
        return Zero(spec.grp, spec.dim_v)
    if isinstance(spec, Zero):
        return Full(spec.grp, spec.dim_v)
    if isinstance(spec, ConvImage):
        return ConvKernel(adjoint_kernel(spec.kernel))
    if isinstance(spec, ConvKernel):
        return ConvImage(adjoint_kernel(spec.kernel))
    if isinstance(spec, DirectSum):
        return DirectSum(annihilator_spec(spec.left), annihilator_spec(spec.right))
    if isinstance(spec, Annihilator):
        return spec.base
    raise CapabilityError(
        f"no closed-form annihilator for {spec.describe()}"
    )


def reduce_spec(spec: SubspaceSpec, d: int) -> SubspaceSpec:
    if d < 1:
        raise ValueError("subgroup index must be >= 1")
    if d == 1:
        return spec
    if isinstance(spec, Full):
        return Full(spec.grp, spec.dim_v * d)
    if isinstance(spec, Zero):
        return Zero(spec.grp, spec.dim_v * d)
    return Reduced(spec, d)


def induce_spec(spec: SubspaceSpec, d: int) -> SubspaceSpec:
    if d < 1:
        raise ValueError("subgroup index must be >= 1")
    if d == 1:
        return spec
    if isinstance(spec, Full):
        return Full(spec.grp, spec.dim_v)
    if isinstance(spec, Zero):
        return Zero(spec.grp, spec.dim_v)
    return Induced(spec, d)


# ------------------------------------------------------------ window models


@dataclass(frozen=True, eq=False)
class WindowModel:
    """Finite surrogate of a restricted unit ball; see the module docstring.

    matrix rows run over window coordinates in canonical order, fiber slots
    fastest.  For inner and exact models, full_matrix holds the same columns
    over full_support (a superset of the window), and column_norms records
    the full-space p-norm of each stored column (always <= 1).
    """

    label: str
    window: FiniteSubset
    p: float
    fiber_dim: int
    polarity: str
    matrix: np.ndarray
    full_matrix: Optional[np.ndarray] = None
    full_support: Optional[tuple[Coords, ...]] = None
    column_norms: Optional[tuple[float, ...]] = None

    @property
    def ambient_dim(self) -> int:
        return len(self.window) * self.fiber_dim

    @property
    def num_columns(self) -> int:
        return self.matrix.shape[1]

    def rank(self) -> int:
        if self.matrix.size == 0:
            return 0
        s = np.linalg.svd(self.matrix, compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.sum(s > s[0] * RANK_RTOL))


def _window_row_indices(window: FiniteSubset, fiber: int, pos: Mapping[Coords, int]):
    idx = []
    for c in window.elements:
        base = pos[c] * fiber
        idx.extend(range(base, base + fiber))
    return np.asarray(idx, dtype=int)


def _assemble_genuine(
    label: str,
    window: FiniteSubset,
    p: float,
    fiber: int,
    elements: Sequence[SupportedMap],
    normalize: bool,
    polarity: str = "inner",
) -> WindowModel:
    """Stack finitely supported genuine elements into an inner/exact model."""
    support = set(window.elements)
    for el in elements:
        support |= set(el.data)
    coords = tuple(sorted(support))
    pos = {c: i for i, c in enumerate(coords)}
    cols = []
    norms = []
    for el in elements:
        v = np.zeros(len(coords) * fiber)
        for c, vec in el.data.items():
            v[pos[c] * fiber : pos[c] * fiber + fiber] = vec
        nrm = lp_norm(v, p)
        if nrm <= 1e-14:
            continue
        if normalize:
            v = v / nrm
            nrm = 1.0
        if nrm > 1.0 + 1e-9:
            raise StructureError(
                f"inner column exceeds the unit ball: norm {nrm:.6g}"
            )
        cols.append(v)
        norms.append(float(nrm))
    full = (
        np.column_stack(cols)
        if cols
        else np.zeros((len(coords) * fiber, 0))
    )
    rows = _window_row_indices(window, fiber, pos)
    return WindowModel(
        label=label,
        window=window,
        p=p,
        fiber_dim=fiber,
        polarity=polarity,
        matrix=full[rows, :],
        full_matrix=full,
        full_support=coords,
        column_norms=tuple(norms),
    )


def _span_enclosure(
    label: str, window: FiniteSubset, p: float, fiber: int, matrix: np.ndarray
) -> WindowModel:
    return WindowModel(
        label=label,
        window=window,
        p=p,
        fiber_dim=fiber,
        polarity="outer",
        matrix=np.asarray(matrix, dtype=float),
    )


def _exact_ball(label, window, p, fiber, matrix, full=None, support=None, norms=None):
    return WindowModel(
        label=label,
        window=window,
        p=p,
        fiber_dim=fiber,
        polarity="exact",
        matrix=np.asarray(matrix, dtype=float),
        full_matrix=full,
        full_support=support,
        column_norms=norms,
    )


def _product_coords(grp: GroupSpec, a, b) -> list[Coords]:
    return sorted({compose_coords(grp, x, y) for x in a for y in b})


def _null_space(mat: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the null space, relative rank threshold."""
    n = mat.shape[1]
    if mat.shape[0] == 0 or n == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > s[0] * RANK_RTOL))
    return vh[rank:].T.copy()


def _conv_constraint_matrix(
    h: ConvolutionKernel, rows: Sequence[Coords], cols: FiniteSubset
) -> np.ndarray:
    """Matrix of the equations (h * y)(row) = 0 for y supported on cols."""
    grp = h.group
    d_in, d_out = h.dim_in, h.dim_out
    mat = np.zeros((len(rows) * d_out, len(cols) * d_in))
    col_pos = cols.positions
    for s, blk in h.blocks:
        s_inv = invert_coords(grp, s)
        for r, eta in enumerate(rows):
            w = compose_coords(grp, eta, s_inv)
            j = col_pos.get(w)
            if j is not None:
                mat[r * d_out : (r + 1) * d_out, j * d_in : (j + 1) * d_in] += blk
    return mat


def _conv_kernel_inner(spec: ConvKernel, omega, p) -> WindowModel:
    h = spec.kernel
    rows = _product_coords(h.group, omega.elements, [c for c, _ in h.blocks])
    mat = _conv_constraint_matrix(h, rows, omega)
    basis = _null_space(mat)
    elements = []
    d = h.dim_in
    for j in range(basis.shape[1]):
        data = {}
        for i, c in enumerate(omega.elements):
            data[c] = basis[i * d : (i + 1) * d, j]
        elements.append(SupportedMap(h.group, d, data))
    return _assemble_genuine(spec.describe(), omega, p, d, elements, normalize=True)


def _conv_kernel_outer(spec: ConvKernel, omega, p) -> WindowModel:
    h = spec.kernel
    inv_support = [invert_coords(h.group, c) for c, _ in h.blocks]
    window_set = omega.coord_set
    rows = [
        eta
        for eta in _product_coords(h.group, omega.elements, [c for c, _ in h.blocks])
        if all(compose_coords(h.group, eta, s) in window_set for s in inv_support)
    ]
    mat = _conv_constraint_matrix(h, rows, omega)
    return _span_enclosure(spec.describe(), omega, p, h.dim_in, _null_space(mat))


def _conv_image_elements(h: ConvolutionKernel, omega) -> list[SupportedMap]:
    inv = [invert_coords(h.group, c) for c, _ in h.blocks]
    sources = _product_coords(h.group, omega.elements, inv)
    out = []
    for gamma in sources:
        for v in range(h.dim_in):
            el = convolve(h, SupportedMap.delta(h.group, gamma, h.dim_in, v))
            if el.data:
                out.append(el)
    return out


def _conv_image_inner(spec: ConvImage, omega, p) -> WindowModel:
    return _assemble_genuine(
        spec.describe(),
        omega,
        p,
        spec.kernel.dim_out,
        _conv_image_elements(spec.kernel, omega),
        normalize=True,
    )


def _conv_image_outer(spec: ConvImage, omega, p) -> WindowModel:
    inner = _conv_image_inner(spec, omega, p)
    return _span_enclosure(spec.describe(), omega, p, spec.kernel.dim_out, inner.matrix)


def _cyclic_elements(spec: CyclicTranslates, omega, p, centers) -> list[SupportedMap]:
    nrm = spec.generator.norm(p)
    if nrm <= 0.0:
        raise StructureError("cyclic generator is zero")
    unit = spec.generator.scaled(1.0 / nrm)
    return [unit.translated(g) for g in centers]


def _cyclic_inner(spec: CyclicTranslates, omega, p) -> WindowModel:
    from .tiling import greedy_pack

    centers = greedy_pack(omega, spec.core).centers
    elements = _cyclic_elements(spec, omega, p, centers.elements)
    return _assemble_genuine(
        spec.describe(), omega, p, spec.fiber_dim, elements, normalize=True
    )


def _cyclic_outer(spec: CyclicTranslates, omega, p) -> WindowModel:
    nrm = spec.generator.norm(p)
    if nrm <= 0.0:
        raise StructureError("cyclic generator is zero")
    unit = spec.generator.scaled(1.0 / nrm)
    inv_support = [invert_coords(spec.group, c) for c in unit.data]
    sources = _product_coords(spec.group, omega.elements, inv_support)
    elements = [unit.translated(g) for g in sources]
    probe = _assemble_genuine(
        spec.describe(), omega, p, spec.fiber_dim, elements, normalize=True
    )
    return _span_enclosure(spec.describe(), omega, p, spec.fiber_dim, probe.matrix)


def _ker_periodization_inner(spec: KerPeriodization, omega, p) -> WindowModel:
    n = spec.period
    elements = []
    for (k,) in omega.elements:
        elements.append(
            SupportedMap(_Z, 1, {(k,): [0.5], (k + n,): [-0.5]})
        )
    return _assemble_genuine(spec.describe(), omega, p, 1, elements, normalize=False)


def _periodic_infty_model(spec: PeriodicInfty, omega, p) -> WindowModel:
    n = spec.period
    size = len(omega)
    if p != math.inf:
        empty = np.zeros((size, 0))
        return _exact_ball(spec.describe(), omega, p, 1, empty, empty, omega.elements, ())
    cols = []
    for residue in range(n):
        col = np.array([1.0 if c[0] % n == residue else 0.0 for c in omega.elements])
        if np.any(col != 0.0):
            cols.append(col)
    mat = np.column_stack(cols) if cols else np.zeros((size, 0))
    # at p = inf the sup norm of a periodic indicator is attained inside any
    # window that meets its class, so the window matrix doubles as the full one
    return _exact_ball(
        spec.describe(), omega, p, 1, mat, mat, omega.elements, (1.0,) * mat.shape[1]
    )


def _full_model(label, omega, p, fiber) -> WindowModel:
    n = len(omega) * fiber
    eye = np.eye(n)
    return _exact_ball(label, omega, p, fiber, eye, eye, omega.elements, (1.0,) * n)


def _zero_model(label, omega, p, fiber) -> WindowModel:
    empty = np.zeros((len(omega) * fiber, 0))
    return _exact_ball(label, omega, p, fiber, empty, empty, omega.elements, ())


def _combine_polarity(a: str, b: str) -> str:
    if "outer" in (a, b):
        return "outer"
    if "inner" in (a, b):
        return "inner"
    return "exact"


def _direct_sum_models(label, omega, p, ma: WindowModel, mb: WindowModel) -> WindowModel:
    fa, fb = ma.fiber_dim, mb.fiber_dim
    fiber = fa + fb
    size = len(omega)
    ka, kb = ma.num_columns, mb.num_columns
    mat = np.zeros((size * fiber, ka + kb))
    mat3 = mat.reshape(size, fiber, ka + kb)
    mat3[:, :fa, :ka] = ma.matrix.reshape(size, fa, ka)
    mat3[:, fa:, ka:] = mb.matrix.reshape(size, fb, kb)
    polarity = _combine_polarity(ma.polarity, mb.polarity)
    if polarity == "outer":
        return _span_enclosure(label, omega, p, fiber, mat)

    fam = ma.full_matrix if ma.full_matrix is not None else ma.matrix
    fsa = ma.full_support if ma.full_support is not None else omega.elements
    fbm = mb.full_matrix if mb.full_matrix is not None else mb.matrix
    fsb = mb.full_support if mb.full_support is not None else omega.elements
    coords = tuple(sorted(set(fsa) | set(fsb)))
    pos = {c: i for i, c in enumerate(coords)}
    full = np.zeros((len(coords) * fiber, ka + kb))
    full3 = full.reshape(len(coords), fiber, ka + kb)
    ra = np.asarray([pos[c] for c in fsa], dtype=int)
    rb = np.asarray([pos[c] for c in fsb], dtype=int)
    full3[ra, :fa, :ka] = fam.reshape(len(fsa), fa, ka)
    full3[rb, fa:, ka:] = fbm.reshape(len(fsb), fb, kb)
    norms = tuple(ma.column_norms or ()) + tuple(mb.column_norms or ())
    return WindowModel(
        label=label,
        window=omega,
        p=p,
        fiber_dim=fiber,
        polarity=polarity,
        matrix=mat,
        full_matrix=full,
        full_support=coords,
        column_norms=norms,
    )


def _expanded_window(omega: FiniteSubset, d: int) -> FiniteSubset:
    coords = tuple((t * d + g,) for (t,) in omega.elements for g in range(d))
    return FiniteSubset(_Z, coords)


def _reduced_view(spec: Reduced, omega, p, builder) -> WindowModel:
    """Reindex a base model over the expanded window into d-fold fibers.

    Sorting integers c and sorting pairs (c div d, c mod d) agree, so the row
    order of the base model already matches the reduced canonical order and
    the arrays transfer without any permutation.
    """
    d = spec.index
    base_model = builder(spec.base, _expanded_window(omega, d), p)
    fb = spec.base.fiber_dim
    fiber = fb * d
    full = base_model.full_matrix
    support = None
    if full is not None:
        assert base_model.full_support is not None
        t_vals = sorted({c[0] // d for c in base_model.full_support})
        padded_coords = tuple((t * d + g,) for t in t_vals for g in range(d))
        if padded_coords != base_model.full_support:
            pos = {c: i for i, c in enumerate(padded_coords)}
            padded = np.zeros((len(padded_coords) * fb, full.shape[1]))
            for i, c in enumerate(base_model.full_support):
                j = pos[c]
                padded[j * fb : (j + 1) * fb, :] = full[i * fb : (i + 1) * fb, :]
            full = padded
        support = tuple((t,) for t in t_vals)
    return WindowModel(
        label=spec.describe(),
        window=omega,
        p=p,
        fiber_dim=fiber,
        polarity=base_model.polarity,
        matrix=base_model.matrix,
        full_matrix=full,
        full_support=support,
        column_norms=base_model.column_norms,
    )


def _induced_view(spec: Induced, omega, p, builder) -> WindowModel:
    """Embed per-residue slice models into the interleaved window."""
    d = spec.index
    fb = spec.base.fiber_dim
    slices = {}
    for (c,) in omega.elements:
        slices.setdefault(c % d, []).append(c // d)
    parts = []
    for g in sorted(slices):
        sub_window = FiniteSubset(_Z, tuple((t,) for t in sorted(slices[g])))
        parts.append((g, builder(spec.base, sub_window, p)))

    size = len(omega)
    win_pos = omega.positions
    total_cols = sum(m.num_columns for _, m in parts)
    mat = np.zeros((size * fb, total_cols))
    polarity = "exact"
    col0 = 0
    emb_supports = []
    for g, m in parts:
        polarity = _combine_polarity(polarity, m.polarity)
        k = m.num_columns
        for i, (t,) in enumerate(m.window.elements):
            r = win_pos[(t * d + g,)]
            mat[r * fb : (r + 1) * fb, col0 : col0 + k] = m.matrix[
                i * fb : (i + 1) * fb, :
            ]
        col0 += k
    if polarity == "outer":
        return _span_enclosure(spec.describe(), omega, p, fb, mat)

    for g, m in parts:
        fs = m.full_support if m.full_support is not None else m.window.elements
        emb_supports.append([(t * d + g,) for (t,) in fs])
    coords = tuple(sorted(set(omega.elements).union(*emb_supports)))
    pos = {c: i for i, c in enumerate(coords)}
    full = np.zeros((len(coords) * fb, total_cols))
    col0 = 0
    norms: list[float] = []
    for (g, m), emb in zip(parts, emb_supports):
        fm = m.full_matrix if m.full_matrix is not None else m.matrix
        k = m.num_columns
        for i, c in enumerate(emb):
            j = pos[c]
            full[j * fb : (j + 1) * fb, col0 : col0 + k] = fm[i * fb : (i + 1) * fb, :]
        norms.extend(m.column_norms or (1.0,) * k)
        col0 += k
    return WindowModel(
        label=spec.describe(),
        window=omega,
        p=p,
        fiber_dim=fb,
        polarity=polarity,
        matrix=mat,
        full_matrix=full,
        full_support=coords,
        column_norms=tuple(norms),
    )


def _check_window(spec: SubspaceSpec, omega: FiniteSubset):
    if omega.is_empty():
        raise ValueError("window models need a nonempty window")
    if omega.group != spec.group:
        raise StructureError("window and subspace live over different groups")


def inner_window_model(spec: SubspaceSpec, omega: FiniteSubset, p: float) -> WindowModel:
    """Certified-from-inside surrogate of the restricted unit ball."""
    check_exponent(p)
    _check_window(spec, omega)
    if isinstance(spec, Full):
        return _full_model(spec.describe(), omega, p, spec.dim_v)
    if isinstance(spec, Zero):
        return _zero_model(spec.describe(), omega, p, spec.dim_v)
    if isinstance(spec, PeriodicInfty):
        return _periodic_infty_model(spec, omega, p)
    if isinstance(spec, UnionPeriodic):
        if p == math.inf:
            return _full_model(spec.describe(), omega, p, 1)
        return _zero_model(spec.describe(), omega, p, 1)
    if isinstance(spec, KerPeriodization):
        return _ker_periodization_inner(spec, omega, p)
    if isinstance(spec, ConvKernel):
        return _conv_kernel_inner(spec, omega, p)
    if isinstance(spec, ConvImage):
        return _conv_image_inner(spec, omega, p)
    if isinstance(spec, CyclicTranslates):
        return _cyclic_inner(spec, omega, p)
    if isinstance(spec, DirectSum):
        ml = inner_window_model(spec.left, omega, p)
        mr = inner_window_model(spec.right, omega, p)
        return _direct_sum_models(spec.describe(), omega, p, ml, mr)
    if isinstance(spec, Annihilator):
        return inner_window_model(annihilator_spec(spec.base), omega, p)
    if isinstance(spec, Reduced):
        return _reduced_view(spec, omega, p, inner_window_model)
    if isinstance(spec, Induced):
        return _induced_view(spec, omega, p, inner_window_model)
    raise CapabilityError(f"no inner model for {spec!r}")


def outer_window_model(spec: SubspaceSpec, omega: FiniteSubset, p: float) -> WindowModel:
    """Certified-from-outside enclosure of the restricted unit ball."""
    check_exponent(p)
    _check_window(spec, omega)
    if isinstance(spec, (Full, Zero, PeriodicInfty, UnionPeriodic)):
        return inner_window_model(spec, omega, p)  # these are exact both ways
    if isinstance(spec, KerPeriodization):
        return _span_enclosure(
            spec.describe(), omega, p, 1, np.eye(len(omega))
        )
    if isinstance(spec, ConvKernel):
        return _conv_kernel_outer(spec, omega, p)
    if isinstance(spec, ConvImage):
        return _conv_image_outer(spec, omega, p)
    if isinstance(spec, CyclicTranslates):
        return _cyclic_outer(spec, omega, p)
    if isinstance(spec, DirectSum):
        ml = outer_window_model(spec.left, omega, p)
        mr = outer_window_model(spec.right, omega, p)
        return _direct_sum_models(spec.describe(), omega, p, ml, mr)
    if isinstance(spec, Annihilator):
        return outer_window_model(annihilator_spec(spec.base), omega, p)
    if isinstance(spec, Reduced):
        return _reduced_view(spec, omega, p, outer_window_model)
    if isinstance(spec, Induced):
        return _induced_view(spec, omega, p, outer_window_model)
    raise CapabilityError(f"no outer model for {spec!r}")


# ------------------------------------------------------------ Fourier oracle


def fourier_oracle_dim(
    h: ConvolutionKernel, mode: str, grid_size: int = 512
) -> float:
    """Independent normalized-dimension oracle for convolution spaces over Z.

    Samples the symbol sum_s h(s) e^{i s theta} on a midpoint grid (midpoints
    dodge the isolated zeros of the test symbols) and averages the nullity
    (mode "kernel") or the rank (mode "image").  Complex arithmetic stays
    inside this function.
    """
    if h.group != _Z:
        raise CapabilityError("the symbol oracle needs the group of integers")
    if mode not in ("kernel", "image"):
        raise ValueError(f"mode must be 'kernel' or 'image', got {mode!r}")
    if grid_size < 1:
        raise ValueError("grid size must be >= 1")
    thetas = 2.0 * np.pi * (np.arange(grid_size) + 0.5) / grid_size
    total = 0.0
    for theta in thetas:
        symbol = np.zeros((h.dim_out, h.dim_in), dtype=complex)
        for (s,), blk in h.blocks:
            symbol += blk * np.exp(1j * s * theta)
        svals = np.linalg.svd(symbol, compute_uv=False)
        rank = int(np.sum(svals >= 1e-8))
        total += (h.dim_in - rank) if mode == "kernel" else rank
    return total / grid_size

#!/usr/bin/env python3
"""Boundary fractions, greedy packing, and quasi-tiling coverage on boxes."""

from lpdim import (
    FiniteSubset,
    GroupSpec,
    alpha_fraction,
    folner_window,
    greedy_pack,
    quasi_tile,
)

Z = GroupSpec.integer_lattice(1)
Z2 = GroupSpec.integer_lattice(2)


def main() -> None:
    print("boundary fraction alpha(window; shape) on growing boxes")
    shape = FiniteSubset.of(Z, range(4))
    for size in (8, 16, 32, 64, 128):
        omega = folner_window(Z, size)
        print(f"  |window| = {size:4d}  alpha = {float(alpha_fraction(omega, shape)):.4f}")
    print()

    print("greedy packing sandwich, interval shape of length 3")
    shape3 = FiniteSubset.of(Z, range(3))
    for size in (9, 16, 31):
        pack = greedy_pack(folner_window(Z, size), shape3)
        lo, hi = pack.lower_bound, pack.upper_bound
        print(
            f"  |window| = {size:3d}  count = {pack.count:3d}"
            f"  sandwich [{lo} = {float(lo):.2f}, {hi} = {float(hi):.2f}]"
        )
    print()

    print("same sandwich on a 2d box with a 2x2 square shape")
    sq = FiniteSubset.of(Z2, [(a, b) for a in range(2) for b in range(2)])
    for size in (8, 16):
        pack = greedy_pack(folner_window(Z2, size), sq)
        print(
            f"  {size}x{size} window  count = {pack.count:4d}"
            f"  sandwich [{float(pack.lower_bound):.2f}, {float(pack.upper_bound):.2f}]"
        )
    print()

    print("quasi-tiling coverage against the eps*(1 - alpha) floor")
    omega = folner_window(Z, 48)
    for eps in (0.1, 0.25, 0.5, 0.8):
        tiling = quasi_tile(omega, [shape], eps)
        floor = eps * (1.0 - float(alpha_fraction(omega, shape)))
        print(
            f"  eps = {eps:.2f}  coverage = {tiling.coverage:.4f}"
            f"  floor = {floor:.4f}  tiles used = {len(tiling.tiles)}"
        )


if __name__ == "__main__":
    main()

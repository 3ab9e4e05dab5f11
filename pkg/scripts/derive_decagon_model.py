"""Derive the Q(sqrt 5) Z-table parameters of the regular decagon surface.

Rotates the (floating) regular decagon so that a three-cylinder direction is
horizontal, decomposes it, rescales by diag(1/w2, 1/h2) (an element of
GL(2, R) fixing the horizontal), and identifies every parameter as
a + b*phi with small rationals. The frozen result lives in
flatlab.constructions.DECAGON_PARAMS; this script checks it still matches.

    python scripts/derive_decagon_model.py
"""

import math
from fractions import Fraction

from flatlab.constructions import DECAGON_PARAMS, regular_2n_gon
from flatlab.cylinders import horizontal_decomposition, normalize_params
from flatlab.surface import apply_sl2

PHI = (1 + math.sqrt(5)) / 2


def identify(x: float, max_den: int = 8, tol: float = 1e-9) -> tuple[Fraction, Fraction]:
    for den in range(1, max_den + 1):
        for b_num in range(-8 * den, 8 * den + 1):
            b = Fraction(b_num, den)
            a = Fraction(x - float(b) * PHI).limit_denominator(max_den)
            if abs(float(a) + float(b) * PHI - x) < tol:
                return a, b
    raise ValueError(f"could not identify {x}")


def main() -> None:
    th = math.pi / 10
    c, s = math.cos(th), math.sin(th)
    S = apply_sl2(regular_2n_gon(5), ((c, s), (-s, c)))
    cyls, _ = horizontal_decomposition(S, budget=10000)
    np_ = normalize_params(cyls, lift_twists=False)
    c1, c2, c3 = (cyls[i] for i in np_.order)
    sx, sy = 1 / c2.w, 1 / c2.h
    found = {}
    for name, val in (
        ("w1", c1.w * sx), ("w2", c2.w * sx),
        ("h1", c1.h * sy), ("h2", c2.h * sy), ("h3", c3.h * sy),
        ("t1", c1.t * sx), ("t2", c2.t * sx), ("t3", c3.t * sx),
    ):
        found[name] = identify(val)
        print(f"{name} = {val:.12f} = {found[name][0]} + {found[name][1]}*phi")
    for name, (a, b) in found.items():
        want = DECAGON_PARAMS[name]
        assert (a, b) == want, (name, (a, b), want)
    print("frozen parameters match")


if __name__ == "__main__":
    main()

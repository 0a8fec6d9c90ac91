#!/usr/bin/env python3
"""Re-derive every claim made about the shipped production curve constants.

Checks, from p and d alone: p and q prime, d a quadratic non-residue (the
completeness condition), cofactor * q inside the Hasse window around p + 1,
the base point on curve and of exact order q. Exits nonzero on any failure.
"""

import math
import sys

sys.path.insert(0, "src")

from edcred.curve import is_probable_prime, production_curve


def main():
    c = production_curve()
    checks = {
        "p prime": is_probable_prime(c.p),
        "q prime": is_probable_prime(c.q),
        "d not 0 or 1": c.d % c.p not in (0, 1),
        "d non-residue": pow(c.d, (c.p - 1) // 2, c.p) == c.p - 1,
        "group order in Hasse window": abs(c.cofactor * c.q - (c.p + 1)) <= 2 * math.isqrt(c.p) + 1,
        "base on curve": c.base.on_curve(),
        "base not neutral": not c.base.is_neutral(),
        "q * base is neutral": (c.q * c.base).is_neutral(),
    }
    width = max(len(k) for k in checks)
    failed = False
    for name, ok in checks.items():
        print(f"{name:<{width}}  {'ok' if ok else 'FAIL'}")
        failed |= not ok
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Semi-almost periodic boundary values near a singular point of the circle.

The generator with parameters (lam, x, y) is holomorphic in the disk and its
boundary modulus jumps from 1 to e^lam at x and y.  Near each jump it looks
like an almost periodic function of the logarithmic strip coordinate.  This
script builds its boundary description and verifies the local profiles.  A second function,
with profiles e^{it} on one side of a jump and 0 on the other, shows the
local harmonic strip approximant built from smoothed profiles.
"""

import argparse

import numpy as np

from apholo import (ASFunction, BasisSet, GeneratorSpec, TrigPolynomial, build_sap, local_approximant,
                    sap_generator, verify_sap)
from apholo.sap_circle import APProfile, sap_from_as_function


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--lam", type=float, default=1.0)
    args = ap.parse_args()

    spec = GeneratorSpec(args.lam, 1.0, -1.0)
    f = ASFunction.generator(spec)
    th = np.linspace(-np.pi, np.pi, 7, endpoint=False)
    print("boundary moduli |g(e^{it})|:")
    for t, v in zip(th, np.abs(sap_generator(spec, np.exp(1j * th)))):
        print(f"  t = {t:+.3f}  {v:.6f}")

    sap = sap_from_as_function(f, s=0.5)
    for prof in sap.profiles:
        _, rep = verify_sap(sap, prof.z0, args.epsilon)
        print(f"singular point {prof.z0:+.3f}: profile matches to {rep.sup_error:.2e} "
              f"on arcs of length {rep.s_epsilon:.3g}")

    b = BasisSet((1.0,))
    e = TrigPolynomial(b, [(1,)], [1.0])
    prof = APProfile(0.0, e, TrigPolynomial.zero(b), 0.5)
    jump = build_sap([0.0], [prof], lambda t: np.zeros(np.shape(t) + (1,), dtype=complex))
    H, s_eps, lrep = local_approximant(jump, 0.0, 0.1)
    print(f"profile (e^it, 0) at 0: strip approximant within {lrep.sup_error:.3f} on arcs of length {s_eps:.3g}, "
          f"smoothing cost {lrep.certified_smoothing:.3f}")
    w = np.array([0.0 + 0.5j, 0.0 + 1.5j, 0.0 + 2.5j])
    print(f"H across the strip at Re w = 0: |H| = {np.array2string(np.abs(np.asarray(H(w))).ravel(), precision=3)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Expression trees and exact jets.

Scalar functions are closed trees over a small vocabulary: variables,
arithmetic, integer powers, reciprocals, square roots, exponentials, and
the flat/bump primitives that drive every degenerate example.  Evaluation
propagates truncated Taylor tables, so mixed partials up to total order 4
are exact up to floating point, with no symbolic expansion and no finite
differences.
"""

import numpy as np

from matsos import expr as ex
from matsos import jets

x, y = ex.var(0), ex.var(1)

print("== polynomials differentiate exactly")
j = jets.eval_jet(x**2, [3.0], order=2)
print(f"   f(x) = x^2 at 3:  value {j.value}, f' {j.derivative((1,))}, "
      f"f'' {j.derivative((2,))}")

print("== the flat primitive exp(-1/t^2) is zero to every order at 0")
j = jets.eval_jet(ex.flat(x), [0.0], order=4)
print("   jets at 0:", [j.derivative((m,)) for m in range(5)])
j = jets.eval_jet(ex.flat(x), [0.5], order=2)
print(f"   at 0.5: value {j.value:.6g}, first derivative {j.derivative((1,)):.6g}"
      f"  (= 2 t^-3 value: {2 * 0.5**-3 * j.value:.6g})")

print("== reciprocals carry a declared positivity domain")
g = ex.recip(ex.const(2.0) + x)
print("   1/(2+x) jets at 0:", [jets.eval_jet(g, [0.0], 2).derivative((m,))
                                for m in range(3)])
try:
    jets.eval_jet(ex.recip(x), [-1.0], order=0)
except jets.SingularDomainError as e:
    print("   evaluating 1/x at -1 raises:", e)

print("== flat factors annihilate polynomially singular siblings")
X, Y, Z, T = (ex.var(i) for i in range(4))
r = ex.sqrt(X**2 + Y**2 + Z**2)
window = ex.flat(r) * ex.bump(T / r)
pts = np.array([
    [0.0, 0.0, 0.0, 0.5],   # on the slice r = 0: the product is exactly 0
    [0.1, 0.0, 0.0, 0.05],  # off it: an ordinary smooth value
])
jb = jets.eval_jet_batch(window, pts, order=4)
print("   r = 0 slice:   value", jb.values[0], " certified flat zero:",
      bool(jb.flat_zero[0]))
print("   generic point: value %.6g" % jb.values[1])

print("== log-space evaluation survives underflow")
psi = (ex.flat(T) * T**2) ** 4
tiny = np.array([[0.0, 0.0, 0.0, 0.009]])
plain, _ = jets.eval_values(psi, tiny)
print("   plain value underflows to", plain[0])
print("   log value stays exact: %.6g" % jets.eval_log_values(psi, tiny)[0])

print("== trees serialize to JSON and round-trip bit-exactly")
s = ex.to_json(window)
assert ex.from_json(s) == window
print(f"   {len(s)} bytes of JSON for the window expression")

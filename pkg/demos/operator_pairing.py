"""Compare the two inner-omega pairings for the Prabhakar q-derivative.

The inverse identity PD PI f = f holds when the inner integral uses
q^(-gamma) omega and fails at the 1e-2 level with q^gamma omega.
"""

from qprabhakar import PrabhakarParams, QContext, QFunction, check_inverse_composition

ctx = QContext(0.5)
f = QFunction(lambda t: 1.0 + t - 0.5 * t * t)
for omega in (0.05, 0.1, 0.2):
    p = PrabhakarParams(alpha=0.9, beta=0.6, gamma=0.4, omega=omega)
    for shift in (+1, -1):
        r = max(check_inverse_composition(ctx, p, 0.0, f, x, shift=shift) for x in (1.0, 0.5, 0.25))
        print(f"omega={omega:<5} inner q^({shift:+d} gamma) omega: residual {r:.2e}")

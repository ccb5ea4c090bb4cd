"""Tabulate q-gamma and q-Mittag-Leffler values and show their error bars."""

from qprabhakar import QContext, q_gamma, q_mittag_leffler, q_prabhakar

for q in (0.3, 0.5, 0.9):
    ctx = QContext(q)
    print(f"q = {q}")
    for x in (0.5, 1.0, 2.5, 5.0):
        g = q_gamma(ctx, x)
        print(f"  Gamma_q({x:<4}) = {g.value:.15g}  (tail {g.tail_estimate:.1e}, {g.terms_used} factors)")
    for z in (-1.0, 0.5):
        ml = q_mittag_leffler(ctx, 0.9, 0.6, z)
        pr = q_prabhakar(ctx, 0.9, 0.6, 0.4, z)
        print(f"  e_(0.9,0.6)({z:+}) = {ml.value:.15g}   e^0.4_(0.9,0.6)({z:+}) = {pr.value:.15g}")

"""
Decoy checking against an intercept-resend eavesdropper
=======================================================

Decoys are random eigenstates of the Z or X basis.  An eavesdropper who
measures in a random basis and resends what she saw corrupts a fraction
(1/2)(1 - 1/d) of them.
"""

from qudit_teleport import EveModel, detection_probability_analytic, run_decoy_check

for d in (2, 3, 5, 7):
    clean = run_decoy_check(d, 50_000, EveModel.NONE, seed=1)
    eve = run_decoy_check(d, 50_000, EveModel.INTERCEPT_RESEND, seed=1)
    print(f"d={d}: no eavesdropper {clean.rate:.4f}, intercept-resend {eve.rate:.4f} "
          f"(analytic {detection_probability_analytic(d, EveModel.INTERCEPT_RESEND):.4f})")

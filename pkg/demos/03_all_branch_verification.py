"""
Checking every measurement branch
=================================

Instead of sampling, enumerate all d^(m(n+2)) outcome combinations and
confirm that each one is equally likely and fully corrected.  Then break the
correction table and watch fidelity drop.
"""

import numpy as np

from qudit_teleport import ProtocolConfig, random_state, verify_all_branches

for d, m, n in [(2, 1, 1), (3, 1, 2), (2, 2, 1), (3, 2, 1)]:
    config = ProtocolConfig(d, m, n)
    phi = random_state(d, config.message_labels(), np.random.default_rng(0))
    report = verify_all_branches(config, phi)
    probs = {round(b.probability, 12) for b in report.branches}
    print(f"d={d} m={m} n={n}: {len(report.branches)} branches, probabilities {probs}, "
          f"min fidelity {report.min_fidelity:.12f}, phases ok: {report.all_phase_ok}")

config = ProtocolConfig(2, 1, 1)
phi = random_state(2, ["x1"], np.random.default_rng(0))
broken = verify_all_branches(config, phi, corrupt=True)
print("with a corrupted correction table, min fidelity =", round(broken.min_fidelity, 4))

"""
One controlled-teleportation run
================================

Two qutrits are sent to the receiver through two 4-particle GHZ states, with
two controllers.  Every measurement is sampled with a fixed seed, so the
transcript below is reproducible.
"""

import numpy as np

from qudit_teleport import ProtocolConfig, random_state
from qudit_teleport.protocol import (
    Transcript,
    alice_measure,
    charlie_correct,
    controllers_measure,
    prepare,
)
from qudit_teleport.register import fidelity, relabel

config = ProtocolConfig(d=3, m=2, n=2)
phi = random_state(3, config.message_labels(), np.random.default_rng(7))
print("message amplitudes:", phi.amplitudes.round(3))

# message (x) channel: 2 + 2*4 = 10 qutrits
s = prepare(config, phi)
print("composite register:", [str(x) for x in s.labels])

rng = np.random.default_rng(5)

# the sender's Bell measurements on (x_k, p_k,0)
alpha, s, _ = alice_measure(s, config, rng)
print("sender outcomes:", alpha)

# each controller measures their particles in the Fourier basis
beta, s, _ = controllers_measure(s, config, rng)
print("controller outcomes:", beta)
print("receiver holds:", [str(x) for x in s.labels])

t = Transcript.from_outcomes(alpha, beta, config.d)
print("corrections (p_k, q_k):", t.corrections)

out = relabel(charlie_correct(s, t.corrections), config.message_labels())
print("fidelity with the message:", fidelity(out, phi))
print("relative phase:", np.angle(np.vdot(phi.amplitudes, out.amplitudes)) % (2 * np.pi),
      "expected:", t.global_phase(config.d))

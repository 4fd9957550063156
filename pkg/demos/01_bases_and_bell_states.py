"""
Fourier basis, Bell states and shift-and-phase unitaries
=========================================================

The computational basis and the Fourier basis are mutually unbiased: every
cross overlap has squared magnitude 1/d.  The d^2 generalized Bell states
are all reachable from psi_00 by one local unitary U_uv.
"""

import itertools

import numpy as np

from qudit_teleport import (
    apply_single_qudit_unitary,
    bell_state,
    generalized_pauli,
    inner_product,
    x_basis_vector,
    z_basis_vector,
)

d = 3

# squared overlaps between the two bases: a d x d table of 1/d
overlaps = np.array([[abs(inner_product(z_basis_vector(d, k), x_basis_vector(d, u))) ** 2
                      for u in range(d)] for k in range(d)])
print("|<k|u_x>|^2 =\n", overlaps.round(12))

# U_uv is a phase by u followed by a cyclic shift by v
print("U_12 =\n", generalized_pauli(d, 1, 2).matrix.round(3))

# applied to the second particle of psi_00 it produces psi_uv exactly
psi00 = bell_state(d, 0, 0)
for u, v in itertools.product(range(d), repeat=2):
    out = apply_single_qudit_unitary(psi00, "y2", generalized_pauli(d, u, v))
    err = np.max(np.abs(out.amplitudes - bell_state(d, u, v).amplitudes))
    print(f"U_{u}{v} psi_00 vs psi_{u}{v}: max error {err:.1e}")

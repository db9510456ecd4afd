"""How temperature, a coherent start and vibrational decay reshape a response.

Everything here is a single mode on a two-level system (z = 0.6), kind 2.
"""

import numpy as np

from vibronic_response import (
    VibronicModel,
    brute_force_response,
    build_exponent,
    delta_phase,
    evaluate,
    thermal_response,
    third_order_pathway,
)
from vibronic_response.thermal import mean_occupation

model = VibronicModel.two_level(0.6)
pathway = third_order_pathway(2, (1, 1))
form = build_exponent(model, pathway)
t = (0.9, 1.7, 0.9)

r0 = complex(evaluate(form, t))
print(f"T = 0: R = {r0:.6f}")

# heating only rescales the exponent, so |R| drops monotonically
for temp in (0.25, 0.5, 1.0, 2.0):
    r = complex(thermal_response(form, t, temp))
    fock = brute_force_response(model, pathway, t, ("thermal", temp), n_max=128)
    print(f"T = {temp:<4}  <n> = {mean_occupation(temp):.3f}  |R| = {abs(r):.6f}  "
          f"Fock mixture differs by {abs(r - fock):.1e}")

# a coherent start only adds a phase
for a0 in (0.3, 0.3 + 0.5j, -0.8j):
    ra = r0 * np.exp(1j * delta_phase(model, pathway, t, a0))
    print(f"alpha0 = {a0!s:<10} |R| = {abs(ra):.12f}  arg R = {np.angle(ra):+.6f}")

# decay: long waiting times freeze the modulus at a value below one
print("\nkappa = 0.1, growing t2:")
for t2 in (0, 5, 20, 60, 120):
    r = complex(evaluate(form, (0.9, t2, 0.9), kappa=0.1))
    print(f"  t2 = {t2:>3}  |R| = {abs(r):.8f}")

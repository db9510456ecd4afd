"""Third-order vibrational responses of a V scheme, checked three ways.

For every pathway kind the closed form, the exponent recipe and the dense
number-basis propagation are evaluated at the same waiting times.

    python demos/01_third_order_pathways.py
"""

import numpy as np

from vibronic_response import (
    VibronicModel,
    brute_force_response,
    build_exponent,
    evaluate,
    r_v3,
    term_table,
    third_order_pathway,
)

z1, z2 = 0.4, -0.7
times = (1.3, 0.6, 2.2)

v = VibronicModel.v_scheme(z1, z2)
xi = VibronicModel.xi_scheme(z1, z2)

print(f"z = ({z1}, {z2}), t = {times}\n")
print("kind  levels      r_v3                         |recipe - r_v3|  |Fock - r_v3|")
for kind in range(1, 9):
    model, levels = (xi, (1, 1, 2)) if kind in (3, 6, 7, 8) else (v, (1, 2))
    pathway = third_order_pathway(kind, levels)
    exact = r_v3(kind, levels, model.z, times)
    recipe = complex(evaluate(build_exponent(model, pathway), times))
    fock = brute_force_response(model, pathway, times, n_max=64)
    print(f"{kind:>4}  {str(levels):<10}  {exact.real:+.10f}{exact.imag:+.10f}j  "
          f"{abs(recipe - exact):>14.1e}  {abs(fock - exact):>13.1e}")

# the recipe behind the numbers: one term per pair of arrows
print("\nkind 2 (rephasing ground-state bleach), levels j=1, k=2:")
print(term_table(build_exponent(v, third_order_pathway(2, (1, 2)))))

# the modulus stays below one and returns to it once per vibrational period
t2 = np.linspace(0, 2 * np.pi, 9)
trace = [abs(r_v3(2, (1, 2), v.z, (1.3, t, 2.2))) for t in t2]
print("|R_2| along t2 over one period:", " ".join(f"{x:.4f}" for x in trace))

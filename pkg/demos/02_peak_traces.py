"""Peak amplitudes A_{p1,p3}(t2) for the four V-scheme contributions.

Writes ``peak_traces.csv`` next to this script (or to the path given as the
first argument): one row per t2, real and imaginary parts for kinds 1, 2, 4
and 5. The same table comes from

    vibresp peaks demos/configs/v_scheme.yaml --kind 1,2,4,5 --levels 1,2
"""

import sys
from pathlib import Path

import numpy as np

from vibronic_response.spectral import peak_amplitude

z = (0.0, 0.4, -0.7)
p1, p3 = 0, 0
t2 = np.arange(0, 4 * np.pi, 0.05)
kinds = (1, 2, 4, 5)

columns = {}
for kind in kinds:
    columns[kind] = peak_amplitude(kind, (1, 2), z, p1, p3, t2)
    # doubling q_max shows how much the series truncation leaves out
    gap = np.abs(peak_amplitude(kind, (1, 2), z, p1, p3, t2, q_max=32) - columns[kind]).max()
    print(f"kind {kind}: |A| in [{np.abs(columns[kind]).min():.4f}, {np.abs(columns[kind]).max():.4f}], "
          f"change on doubling q_max {gap:.1e}")

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("peak_traces.csv")
with out.open("w") as fh:
    fh.write("t2," + ",".join(f"re_k{k},im_k{k}" for k in kinds) + "\n")
    for i, t in enumerate(t2):
        fh.write(repr(float(t)) + "," + ",".join(
            f"{float(columns[k][i].real)!r},{float(columns[k][i].imag)!r}" for k in kinds) + "\n")
print(f"wrote {out}")

# non-rephasing kinds have no peaks at p1 > 0, rephasing ones none at p1 < 0
for kind, p in ((4, (1, -1)), (5, (1, -1)), (1, (-1, 1)), (2, (-1, 1))):
    a = peak_amplitude(kind, (1, 2), z, *p, t2)
    print(f"kind {kind} at (p1, p3) = {p}: max |A| = {np.abs(a).max():.1e}")

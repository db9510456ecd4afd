"""Fifth-order pathways written in the pathway script language.

The two scripts below are the fifth-order examples used throughout the test
suite. ``build_exponent`` turns each into its 15 exponent terms; setting the
three middle waiting times to zero collapses the j = k case to five terms.
"""

from vibronic_response import VibronicModel, build_exponent, evaluate, kinematic_response, parse_pathway, term_table
from vibronic_response.general import reduced_terms

LADDER = """\
# bra climbs j -> l and back, ket is probed last
bra 0->j
bra j->l
bra l->j
bra j->0
ket 0->k
"""
MIXED = """\
bra 0->j
ket 0->k
bra j->0
ket k->0
ket 0->k
"""

names = ("0", "j", "l", "k")
model = VibronicModel.single_mode([0] * 4, [0, 0.3, -0.5, 0.7], names=names)

for title, text in (("ladder on the bra", LADDER), ("mixed sides", MIXED)):
    pathway = parse_pathway(text, model)
    form = build_exponent(model, pathway)
    t = (0.4, 1.1, 0.3, 2.0, 0.7)
    gap = abs(complex(evaluate(form, t)) - kinematic_response(model, pathway, t))
    print(f"== {title}: {len(form.terms)} terms, recipe vs state ladder {gap:.1e}")
    print(term_table(form, names))

# j = k = 1 with t2 = t3 = t4 = 0
z1 = 0.4
small = VibronicModel.single_mode([0, 0], [0, z1])
form = build_exponent(small, parse_pathway(MIXED, bindings={"j": 1, "k": 1}))
print("surviving terms (exponents of t1, t5) -> coefficient / z1^2")
for key, value in sorted(reduced_terms(form, zero=(2, 3, 4)).items()):
    print(f"  ({key[0]:+d}, {key[4]:+d})  {value / z1 ** 2:+.3f}")

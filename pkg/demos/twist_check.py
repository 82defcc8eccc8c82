"""Build a twist on C3 x C3 inside SL2(9) and check it, plus a corrupted control.

Run with: python3 demos/twist_check.py
"""
from hopfcert.catalog import make_setup
from hopfcert.characters import character_for
from hopfcert.twist import (build_twist, corrupted_cocycle, paired_decomposition, second_cocycle,
                            standard_cocycle, verify_prop_key, verify_twist_axioms)

setup = make_setup("SL2", 9, "U")
dec = paired_decomposition(setup.M)
print("paired factors:", dec.orders)

std = standard_cocycle(dec)
print("standard cocycle, axioms hold:", verify_twist_axioms(build_twist(setup.M, dec, std)))
chars = dec.characters()
bad = corrupted_cocycle(std, (chars[1], chars[2]))
print("one value negated, axioms hold:", verify_twist_axioms(build_twist(setup.M, dec, bad)))

chi = character_for(setup)
for name, omega in (("standard", std), ("second", second_cocycle(dec))):
    r = verify_prop_key(setup.M, setup.tau, chi, omega, dec)
    print(f"{name}: identity holds {r.identity_holds}, counit {r.counit}, support ok {r.support_ok}")

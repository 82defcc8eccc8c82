"""Walk through one certificate: PSL2(7) with a Klein four-subgroup.

Run with: python3 demos/certify_klein.py
"""
from hopfcert.catalog import make_setup
from hopfcert.characters import character_for
from hopfcert.obstruction import (certify, chi_y2_direct, chi_y2_fiber, chi_y2_quadloop,
                                  compute_y)

setup = make_setup("PSL2", 7, "klein:x=2,y=3")
G, M, tau = setup.group, setup.M, setup.tau
print(f"G = PSL2(7), |G| = {G.order}; M has {M.order} elements; tau = {G.matrix(tau)}")

chi = character_for(setup)
y = compute_y(chi, M, tau)
print(f"y is supported on {len(y.support())} elements of the double coset M tau M")

# the three routes are independent code paths
print("direct   :", chi_y2_direct(chi, y))
print("quadloop :", chi_y2_quadloop(chi, M, tau))
print("fiber    :", chi_y2_fiber(chi, M, tau))

cert = certify(setup)
print(cert.dumps())

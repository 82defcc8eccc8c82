"""Stream the 32,537,600 elements of Sz(32) and evaluate the induced character.

Takes about 4.5 minutes and 1.5 GB on one core.  Run with:
    python3 demos/sz32_census.py [workers]
"""
import sys
import time

from hopfcert.suzuki import sz_census

workers = int(sys.argv[1]) if len(sys.argv) > 1 else 1
start = time.perf_counter()
census = sz_census(32, workers=workers, chi_points=((0, 1), (1, 0)))
print(census.to_json())
print(f"{time.perf_counter() - start:.0f} s", file=sys.stderr)

"""Count conjugacy classes of Klein four-subgroups of PSL2(q) for small odd q.

Run with: python3 demos/klein_classes.py
"""
from hopfcert.catalog import classify_klein
from hopfcert.groups import build_group

for q in (5, 7, 9, 11, 13, 17):
    info = classify_klein(build_group("PSL2", q))
    print(f"q = {q:2d}: {info['klein_count']:3d} Klein subgroups in {info['class_count']} classes "
          f"(orbit sizes {info['orbit_sizes']}), {info['containing_hbar']} contain the fixed involution")

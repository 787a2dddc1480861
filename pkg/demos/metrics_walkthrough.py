"""Segment-based SELD scoring, from raw event grids to one error number.

Builds a reference grid and a deliberately imperfect prediction, walks
through the four metrics, and reproduces the published aggregate values
from their component metrics.
"""

import seldkit as sk

# 2 seconds of labels = 2 scoring segments
ref = sk.SeldEventGrid.empty(20)
for f in range(3, 9):
    ref.frames[f].append(sk.SeldEvent(class_id=0, azimuth=30.0, elevation=10.0))
for f in range(12, 18):
    ref.frames[f].append(sk.SeldEvent(class_id=5, azimuth=-120.0, elevation=-20.0))

pred = sk.SeldEventGrid.empty(20)
for f in range(3, 9):  # right class, 15 degrees off -> still a hit
    pred.frames[f].append(sk.SeldEvent(class_id=0, azimuth=45.0, elevation=10.0))
for f in range(12, 18):  # wrong class -> one miss plus one false alarm
    pred.frames[f].append(sk.SeldEvent(class_id=7, azimuth=-120.0, elevation=-20.0))

report = sk.evaluate(pred, ref)
print("counts:", report.counts)
print(f"ER<=20  (error rate)          {report.er20:.3f}")
print(f"F<=20   (F1, location-gated)  {report.f20:.3f}")
print(f"LE_CD   (localization error)  {report.le_cd:.1f} deg")
print(f"LR_CD   (localization recall) {report.lr_cd:.3f}")
print(f"E_SELD  (aggregate)           {report.e_seld:.3f}")

d = sk.angular_distance((30.0, 10.0), (45.0, 10.0))
print(f"\nthe matched pair sits {d:.1f} deg apart -> inside the 20 deg gate")

print("\npublished rows, rebuilt from their four components:")
rows = [
    ("melspecgcc  no-aug", 0.660, 0.455, 21.1, 0.521, 0.450),
    ("salsa       no-aug", 0.528, 0.601, 15.9, 0.644, 0.343),
    ("salsa-lite  no-aug", 0.512, 0.609, 16.9, 0.657, 0.335),
    ("melspecgcc  aug   ", 0.507, 0.614, 17.9, 0.679, 0.328),
    ("salsa       aug   ", 0.408, 0.715, 12.6, 0.728, 0.259),
    ("salsa-lite  aug   ", 0.409, 0.707, 12.3, 0.716, 0.264),
]
for name, er, f, le, lr, expected in rows:
    got = sk.seld_error(er, f, le, lr)
    print(f"  {name}  ->  {got:.3f}  (published {expected:.3f})")

#!/usr/bin/env python3
"""Generate data/panda_like.json (product-of-exponentials form) from the
Franka Emika Panda datasheet modified-DH table."""
import json
import re
import math
import sys

import numpy as np
from scipy.spatial.transform import Rotation

# (a_{i-1}, d_i, alpha_{i-1})
DH = [
    (0.0, 0.333, 0.0),
    (0.0, 0.0, -math.pi / 2),
    (0.0, 0.316, math.pi / 2),
    (0.0825, 0.0, math.pi / 2),
    (-0.0825, 0.384, -math.pi / 2),
    (0.0, 0.0, math.pi / 2),
    (0.088, 0.0, math.pi / 2),
]
FLANGE_D = 0.107
HAND_D = 0.1034
LIMITS = [
    (-2.8973, 2.8973),
    (-1.7628, 1.7628),
    (-2.8973, 2.8973),
    (-3.0718, -0.0698),
    (-2.8973, 2.8973),
    (-0.0175, 3.7525),
    (-2.8973, 2.8973),
]


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    T = np.eye(4)
    T[1:3, 1:3] = [[c, -s], [s, c]]
    return T


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    T = np.eye(4)
    T[0:2, 0:2] = [[c, -s], [s, c]]
    return T


def trans(x, y, z):
    T = np.eye(4)
    T[0:3, 3] = [x, y, z]
    return T


def quat_wxyz(R):
    x, y, z, w = Rotation.from_matrix(R).as_quat()
    q = np.array([w, x, y, z])
    # canonical hemisphere: w >= 0, then first nonzero component positive
    if q[0] < 0 or (abs(q[0]) < 1e-12 and q[np.nonzero(np.abs(q) > 1e-12)[0][0]] < 0):
        q = -q
    return (q / np.linalg.norm(q)).tolist()


def clean(v):
    return [0.0 if abs(x) < 1e-15 else round(float(x), 12) for x in v]


def main(out):
    T = np.eye(4)
    frames = []
    twists = []
    for a, d, alpha in DH:
        T = T @ rot_x(alpha) @ trans(a, 0, 0) @ trans(0, 0, d)
        frames.append(T.copy())
        w = T[0:3, 2]
        p = T[0:3, 3]
        v = np.cross(p, w)
        twists.append(clean(list(v) + list(w)))
    tcp = T @ trans(0, 0, FLANGE_D) @ rot_z(-math.pi / 4) @ trans(0, 0, HAND_D)
    model = {
        "name": "panda_like",
        "source": "manufacturer-datasheet-derived kinematic parameters (Franka Emika Panda DH table)",
        "joints": [
            {"twist": tw, "lower": lo, "upper": up}
            for tw, (lo, up) in zip(twists, LIMITS)
        ],
        "home_pose": {"t": clean(tcp[0:3, 3]), "q": clean(quat_wxyz(tcp[0:3, 0:3]))},
        "base_pose": {"t": [0.0, 0.0, 0.0], "q": [1.0, 0.0, 0.0, 0.0]},
        "sew": {
            "shoulder": {"frame": 1, "point": clean(frames[1][0:3, 3])},
            "elbow": {"frame": 3, "point": clean(frames[3][0:3, 3])},
            "wrist": {"frame": 5, "point": clean(frames[5][0:3, 3])},
        },
    }
    with open(out, "w") as f:
        text = json.dumps(model, indent=2)
        # keep numeric arrays on one line
        text = re.sub(r"\[\s+([-0-9.e,\s]+?)\s+\]",
                      lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]",
                      text)
        f.write(text + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/panda_like.json")

#!/usr/bin/env python3
"""Writes the synthetic single demonstrations shipped under data/demos.

Each demo is a chain of constant screw motions between key poses, sampled
uniformly in the screw parameter. Output is the line-delimited demonstration
format (header record, then one {"t", "pose"} record per sample).
"""
import json
import pathlib

import numpy as np
from scipy.linalg import expm, logm
from scipy.spatial.transform import Rotation

SAMPLES_PER_SEGMENT = 60
DT = 0.02


def pose(xyz, rotvec=(0.0, 0.0, 0.0)):
    g = np.eye(4)
    g[:3, :3] = Rotation.from_rotvec(rotvec).as_matrix()
    g[:3, 3] = xyz
    return g


def sclerp(g0, g1, tau):
    rel = np.real(logm(g1 @ np.linalg.inv(g0)))
    return expm(tau * rel) @ g0


def record(g):
    q = Rotation.from_matrix(g[:3, :3]).as_quat()  # x, y, z, w
    w = [q[3], q[0], q[1], q[2]]
    if w[0] < 0:
        w = [-c for c in w]
    return {"t": [round(float(c), 12) for c in g[:3, 3]], "q": [round(float(c), 12) for c in w]}


def write(path, object_id, keys):
    lines = [json.dumps({"object_id": object_id, "units": "m"})]
    t = 0.0
    lines.append(json.dumps({"t": t, "pose": record(keys[0])}))
    for g0, g1 in zip(keys, keys[1:]):
        for s in range(1, SAMPLES_PER_SEGMENT + 1):
            t = round(t + DT, 6)
            lines.append(json.dumps({"t": t, "pose": record(sclerp(g0, g1, s / SAMPLES_PER_SEGMENT))}))
    path.write_text("\n".join(lines) + "\n")


def brick_demo():
    # Pick a brick from the table, lift, carry on one screw, lower next to the
    # first brick of the wall.
    h = 0.0508
    pick = pose((0.40, -0.35, h / 2))
    goal = pose((0.55, 0.05, h / 2), (0.0, 0.0, np.pi / 2))
    lift = pose((0.40, -0.35, h / 2 + 0.10))
    above = pose((0.55, 0.05, h / 2 + 0.10), (0.0, 0.0, np.pi / 2))
    return [pick, lift, above, goal]


def tile_demo():
    # Tile from a rack, tipped onto its near edge under the opening, pushed up
    # through it, levelled above the frame and lowered onto the lips.
    t = 0.014
    tilt = np.deg2rad(-50.0)
    seat = np.array([0.55, 0.0, 0.60 + t / 2])
    pick = pose((0.45, -0.40, 0.35))
    under = pose(seat + (0.0, 0.0, -0.14), (0.0, tilt, 0.0))
    through = pose(seat + (0.0, 0.0, 0.14), (0.0, tilt, 0.0))
    level = pose(seat + (0.0, 0.0, 0.06))
    return [pick, under, through, level, pose(seat)]


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "demos"
    out.mkdir(parents=True, exist_ok=True)
    write(out / "brick_pick_place.jsonl", "brick", brick_demo())
    write(out / "tile_insert.jsonl", "ceiling_tile", tile_demo())


if __name__ == "__main__":
    main()

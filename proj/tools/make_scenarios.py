#!/usr/bin/env python3
"""Writes the paired near-limit scenario suite under data/scenarios.

Wall scenarios derive from activities/wall_straight_12.json with the wall,
pick pile and start configuration moved so that the build drives a joint into
the inner band. Ceiling scenarios derive from activities/ceiling_1x2.json with
a different start elbow and a yawed frame.
"""
import copy
import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"

# name, (r, phi, z, yaw), per_step_yaw, (pick r, phi, z, yaw), (q1, q7)
WALLS = [
    ("wall_near_limit_a", (0.600507, -1.78576, 0.282049, 0.172527), 0.0, (0.5139, -0.220685, 0.261026, 1.19712), (1.61401, 2.27094)),
    ("wall_near_limit_b", (0.57687, -0.825095, 0.276919, 2.65928), 0.0, (0.54645, -0.542974, 0.183593, 1.06209), (1.30812, -1.16115)),
    ("wall_near_limit_c", (0.445568, 1.18065, 0.172015, 2.38274), 0.0, (0.545353, 0.705252, 0.330779, 1.44689), (-2.31219, -1.98618)),
    ("wall_near_limit_d", (0.565902, 1.36864, 0.130873, -0.121994), 0.0, (0.402488, 0.566336, 0.228362, 1.07287), (-0.463272, 0.0549054)),
    ("curved_near_limit_e", (0.596762, 0.0770838, 0.169457, -2.39298), 0.116122, (0.374509, 0.831263, 0.225148, 0.463585), (0.361636, 2.07631)),
]

# name, q1, q7, extra frame yaw
CEILINGS = [
    ("ceiling_near_limit_f", 0.160566, -1.56606, 0.204634),
    ("ceiling_near_limit_g", 0.234425, -0.781308, 0.484044),
]


def yaw_quat(theta):
    return [math.cos(theta / 2), 0.0, 0.0, math.sin(theta / 2)]


def fix_paths(spec):
    spec["robot"] = "../panda_like.json"
    spec["demo"]["file"] = "../demos/" + pathlib.Path(spec["demo"]["file"]).name


def wall(name, base, psy, pick, q):
    spec = json.loads((ROOT / "activities" / "wall_straight_12.json").read_text())
    fix_paths(spec)
    spec["name"] = name
    r, phi, z, yaw = base
    lay = spec["layout"]
    lay["kind"] = "curved_wall" if psy else "straight_wall"
    lay["per_step_yaw_rad"] = psy
    lay["base"] = {"t": [r * math.cos(phi), r * math.sin(phi), 0.0254 + z], "q": yaw_quat(yaw)}
    pr, pphi, pz, pyaw = pick
    spec["pick_station"]["top"] = {"t": [pr * math.cos(pphi), pr * math.sin(pphi), pz], "q": yaw_quat(pyaw)}
    spec["q_start_rad"][0], spec["q_start_rad"][6] = q
    return spec


def ceiling(name, q1, q7, dyaw):
    spec = json.loads((ROOT / "activities" / "ceiling_1x2.json").read_text())
    fix_paths(spec)
    spec["name"] = name
    spec["layout"]["base"]["q"] = yaw_quat(math.pi / 2 + dyaw)
    spec["q_start_rad"][0], spec["q_start_rad"][6] = q1, q7
    return spec


def main():
    out = ROOT / "scenarios"
    out.mkdir(exist_ok=True)
    specs = [wall(*w) for w in WALLS] + [ceiling(*c) for c in CEILINGS]
    for spec in specs:
        (out / (spec["name"] + ".json")).write_text(json.dumps(spec, indent=2) + "\n")


if __name__ == "__main__":
    main()

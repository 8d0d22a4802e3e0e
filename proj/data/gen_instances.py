#!/usr/bin/env python3
"""Regenerates the bundled instances in this directory.

Distances are exact rationals written as "p/q" strings. Output is
deterministic (fixed seed, sorted keys), so reruns produce identical files.
"""
import json
import random
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent
POINTS5 = ["a", "b", "c", "d", "e"]


def q(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def clique(rng, n):
    # Any values in [1, 2] satisfy the triangle inequality.
    pts = POINTS5[:n]
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = Fraction(rng.randint(4, 8), 4)
    return {"points": pts, "dist": [[q(x) for x in row] for row in d]}


class Builder:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.v, self.w, self.edges = [], [], []
        self.spaces, self.cut, self.inj = {}, {}, {}

    def vertex(self, name, size):
        self.v.append(name)
        self.spaces[name] = clique(self.rng, size)

    def pair(self, name):
        self.w.append(name)
        self.cut[name] = ["p", "q"]

    def join(self, v, w, image):
        self.edges.append([v, w])
        self.inj.setdefault(v, {})[w] = image

    def dump(self, base="v0"):
        return {
            "tree": {"base": base, "v_nodes": sorted(self.v), "w_nodes": sorted(self.w),
                     "edges": sorted(self.edges), "frontier": []},
            "spaces": self.spaces,
            "cut_pairs": self.cut,
            "injections": self.inj,
        }


# Disjoint-enough images for up to three pairs in a 4- or 5-point clique.
SLOTS4 = [["a", "b"], ["c", "d"], ["a", "c"]]
SLOTS5 = [["a", "b"], ["c", "d"], ["e", "a"]]


def path2():
    b = Builder(1)
    b.vertex("v0", 4)
    b.vertex("v1", 4)
    b.pair("w0")
    b.join("v0", "w0", ["a", "b"])
    b.join("v1", "w0", ["c", "d"])
    return b.dump()


def small_star():
    b = Builder(2)
    b.vertex("v0", 5)
    for i in range(3):
        w = f"w{i}"
        b.pair(w)
        b.join("v0", w, SLOTS5[i])
        for j in range(2):
            v = f"v{i}{j}"
            b.vertex(v, 4)
            b.join(v, w, ["a", "b"] if j == 0 else ["b", "c"])
    return b.dump()


def chain5():
    b = Builder(3)
    for i in range(6):
        b.vertex(f"v{i}", 4 if i % 2 == 0 else 5)
    for i in range(5):
        w = f"w{i}"
        b.pair(w)
        b.join(f"v{i}", w, ["c", "d"])
        b.join(f"v{i + 1}", w, ["a", "b"])
    return b.dump()


def three_level():
    # v0 with three pairs; every later V gets two child pairs; leaves at level 3.
    b = Builder(4)
    b.vertex("v0", 5)
    frontier = []
    for i in range(3):
        w = f"v0/w{i}"
        b.pair(w)
        b.join("v0", w, SLOTS5[i])
        frontier.append(w)
    for level in range(1, 4):
        nxt = []
        for w in frontier:
            v = w + "/v"
            size = 4 if b.rng.random() < 0.5 else 5
            b.vertex(v, size)
            b.join(v, w, ["a", "b"])
            if level < 3:
                slots = SLOTS4 if size == 4 else SLOTS5
                for i in range(2):
                    cw = f"{v}/w{i}"
                    b.pair(cw)
                    b.join(v, cw, slots[i + 1])
                    nxt.append(cw)
        frontier = nxt
    return b.dump()


def k4_template():
    rng = random.Random(5)
    return {
        "base": "v0",
        "template": {
            "v_types": {"X": clique(rng, 4)},
            "w_types": {"P": ["p", "q"]},
            "edge_types": [
                {"id": "e1", "v_type": "X", "w_type": "P", "map": ["a", "b"], "w_mult": 1},
                {"id": "e2", "v_type": "X", "w_type": "P", "map": ["c", "d"], "w_mult": 1},
                {"id": "e3", "v_type": "X", "w_type": "P", "map": ["a", "c"], "w_mult": 1},
            ],
            "base_type": "X",
            "depth": 3,
        },
    }


def abc_theta():
    one = q(1)
    zero = q(0)
    tri = {"points": ["x", "y", "z"],
           "dist": [[zero, one, one], [one, zero, one], [one, one, zero]]}
    return {
        "base": "v0",
        "template": {
            "v_types": {"T": tri},
            "w_types": {"A": ["p", "q"], "B": ["p", "q"], "C": ["p", "q"]},
            "edge_types": [
                {"id": "eA", "v_type": "T", "w_type": "A", "map": ["x", "y"], "w_mult": 3},
                {"id": "eB", "v_type": "T", "w_type": "B", "map": ["y", "z"], "w_mult": 3},
                {"id": "eC", "v_type": "T", "w_type": "C", "map": ["z", "x"], "w_mult": 3},
            ],
            "base_type": "T",
            "depth": 3,
        },
    }


def abc_splitting():
    z3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    trivial_pair = [[0, 1], [0, 1], [0, 1]]
    return {
        "groups": {"Z3": z3, "1": [[0]]},
        "quotient": {
            "base": "V",
            "v": ["V"],
            "w": ["A", "B", "C"],
            "edges": [{"id": "eA", "v": "V", "w": "A"},
                      {"id": "eB", "v": "V", "w": "B"},
                      {"id": "eC", "v": "V", "w": "C"}],
        },
        "lambda": {
            "V": {"group": "1", "points": ["x", "y", "z"], "action": [[0, 1, 2]]},
            "A": {"group": "Z3", "points": ["p", "q"], "action": trivial_pair},
            "B": {"group": "Z3", "points": ["p", "q"], "action": trivial_pair},
            "C": {"group": "Z3", "points": ["p", "q"], "action": trivial_pair},
        },
        "signature": {"eA": {"p": "x", "q": "y"},
                      "eB": {"p": "y", "q": "z"},
                      "eC": {"p": "z", "q": "x"}},
        "reservoirs": {"V": [["x", "y"], ["y", "z"], ["x", "z"]]},
    }


INSTANCES = {
    "path2.json": path2,
    "small_star.json": small_star,
    "chain5.json": chain5,
    "three_level.json": three_level,
    "k4_template.json": k4_template,
    "abc_theta.json": abc_theta,
    "abc_splitting.json": abc_splitting,
}

if __name__ == "__main__":
    for name, make in INSTANCES.items():
        (HERE / name).write_text(json.dumps(make(), indent=2, sort_keys=True) + "\n")
        print("wrote", name)

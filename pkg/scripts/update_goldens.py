#!/usr/bin/env python3
"""Recompute the golden regression values in tests/data/golden.json.

Run once to establish the goldens (or deliberately after a behavior
change); the regression tests then assert bit-exact agreement for every
integer-count-derived value and tight tolerances for float sums.
"""

import itertools
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from polyprg import lab
from polyprg.algebra import KWiseSpec, SeedStream, kwise_bits
from polyprg.mollifier import MollifierSpec
from suites import discrepancy_suite


def kwise_bias_entry():
    spec = KWiseSpec(n=4, k=2, s=2)
    M = np.array(
        [
            kwise_bits(spec, SeedStream.from_int(c, spec.seed_bits))
            for c in range(1 << spec.seed_bits)
        ]
    ).astype(np.int64)
    biases = {}
    for size in (3, 4):
        for S in itertools.combinations(range(4), size):
            total = int(M[:, S].prod(axis=1).sum())
            biases["".join(map(str, S))] = [total, 1 << spec.seed_bits]
    return biases


def discrepancy_entries():
    out = []
    for name, p, params in discrepancy_suite():
        rep = lab.discrepancy(p, params, description=name)
        mol = lab.mollifier_discrepancy(
            p, params, MollifierSpec(p.b, 1.0), description=name
        )
        out.append(
            {
                "id": name,
                "n": p.n,
                "m": p.m,
                "seed_space": rep.seed_space_size,
                "exact": rep.exact_probability,
                "generator": rep.generator_probability,
                "discrepancy": rep.discrepancy,
                "mollifier_cube": mol.exact_probability,
                "mollifier_seed": mol.generator_probability,
            }
        )
    return out


def lo_search_entry():
    res = lab.lo_lowerbound_search(16, 8, trials=200, rng_seed=20260810)
    return {
        "n": 16,
        "m": 8,
        "trials": 200,
        "rng_seed": 20260810,
        "level_k": res.level_k,
        "best_fraction": res.best_fraction,
        "best_trial": res.best_trial,
        "ratio": res.ratio,
    }


def main():
    doc = {
        "kwise_parity_bias_n4_k2_s2": kwise_bias_entry(),
        "discrepancy_suite": discrepancy_entries(),
        "lo_lowerbound_search": lo_search_entry(),
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()

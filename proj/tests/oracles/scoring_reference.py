#!/usr/bin/env python3
# Copyright 2026 The factorscan Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Reference values for the soft scoring examples, evaluated at 50 digits.

Independent of the C++ code: only the closed forms are used.

    python3 scoring_reference.py          # print JSON
    python3 scoring_reference.py --check scoring_reference.json
"""

import json
import sys

import mpmath as mp

mp.mp.dps = 50


def sigmoid(x):
    return 1 / (1 + mp.exp(-x))


def soft_order(phi_o, alpha):
    # large when the call precedes the update (phi_o = -1)
    return sigmoid(-alpha * phi_o)


def restricted_score(pairs, alpha):
    """pairs: (phi_D, phi_O) for every candidate (c, u)."""
    terms = [mp.mpf(d) * soft_order(o, alpha) for d, o in pairs]
    raw = mp.log(mp.fsum(mp.exp(t) for t in terms))
    return raw, raw - mp.log(len(terms))


def reference():
    alpha, tau = mp.mpf(4), mp.mpf(2)
    single_raw, single_centered = restricted_score([(1, -1)], alpha)
    two_raw, two_centered = restricted_score([(1, -1), (1, 1)], alpha)
    return {
        "soft_order_minus1_alpha4": soft_order(-1, alpha),
        "soft_order_plus1_alpha4": soft_order(1, alpha),
        "single_pair_raw": single_raw,
        "single_pair_centered": single_centered,
        "two_pair_raw": two_raw,
        "two_pair_centered": two_centered,
        "predict_centered0_tau2": sigmoid(alpha * 0 - tau),
        "predict_single_pair": sigmoid(alpha * single_centered - tau),
    }


def main(argv):
    values = {k: float(v) for k, v in reference().items()}
    if len(argv) > 2 and argv[1] == "--check":
        with open(argv[2]) as f:
            frozen = json.load(f)
        bad = [k for k, v in values.items() if abs(frozen.get(k, float("nan")) - v) > 1e-12]
        for k in bad:
            print(f"mismatch {k}: frozen {frozen.get(k)} reference {values[k]!r}")
        return 1 if bad else 0
    print(json.dumps({k: mp.nstr(v, 20) for k, v in reference().items()}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

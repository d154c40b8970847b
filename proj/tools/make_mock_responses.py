#!/usr/bin/env python3
"""Writes plausible canned chat replies for every task/budget in a tasks file.

The output maps "<task>/<budget>" to a candidate-generation reply and
"<task>/<budget>/rerank" to a ranking reply; feed it to
`bench mock-fixture` to key the replies by request hash.
"""
import argparse
import json
import random

GAITS = ["trot", "pace", "bound"]


def clamp(x, lo, hi):
    return max(lo, min(hi, x))


def candidates(omega, n, rng):
    out = []
    for i in range(n):
        v = clamp(omega[0] + rng.gauss(0.0, 0.2), 0.0, 1.5)
        p = clamp(omega[1] + rng.gauss(0.0, 0.1), -0.4, 0.4)
        gait = omega[2:].index(max(omega[2:]))
        if rng.random() < 0.35:
            gait = rng.randrange(3)
        weights = [0.0, 0.0, 0.0]
        weights[gait] = 1.0
        # Models sometimes hedge between gaits.
        if rng.random() < 0.2:
            weights[(gait + 1) % 3] = round(rng.uniform(0.1, 0.4), 2)
        out.append([round(v, 2), round(p, 2)] + weights)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tasks", required=True)
    ap.add_argument("--budgets", default="4,8,12")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    with open(args.tasks) as f:
        tasks = json.load(f)
    responses = {}
    for task in tasks:
        for budget in (int(b) for b in args.budgets.split(",")):
            rng = random.Random(f"{args.seed}/{task['name']}/{budget}")
            cands = candidates(task["omega_star"], budget, rng)
            key = f"{task['name']}/{budget}"
            responses[key] = (
                f"To look {task['name']}, the speed and posture matter most; I will vary the gait "
                f"and keep the speed around {task['omega_star'][0]:.1f} m/s.\n"
                + json.dumps(cands)
            )
            dist = [sum((a - b) ** 2 for a, b in zip(c, task["omega_star"])) + rng.uniform(0, 0.05)
                    for c in cands]
            order = sorted(range(budget), key=lambda i: dist[i])
            responses[key + "/rerank"] = (
                "Ranking by how well speed, pitch and gait fit the request.\n" + json.dumps(order)
            )
    with open(args.out, "w") as f:
        json.dump(responses, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()

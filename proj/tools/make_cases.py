#!/usr/bin/env python3
"""Writes the bundled case files in canonical form (same layout as the C++ writer)."""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "cases")


def f(x):
    return float(x)


def growth(rate, n):
    return [f((1.0 + rate) ** t) for t in range(n)]


def bus(i, slack=False):
    return {"id": i, "is_slack": slack}


def line(i, a, b, x_pu, cap, cost=None, base=100.0):
    r = {"id": i, "from_bus": a, "to_bus": b, "susceptance": f(round(base / x_pu, 6)),
         "capacity_mw": f(cap), "status": "existing" if cost is None else "candidate"}
    if cost is not None:
        r["invest_cost"] = f(cost)
    return r


def gen(i, b, op, cap, dev, category="fixed", invest=None, group=None, phase=None, dismantle=None):
    r = {"id": i, "bus": b, "op_cost": f(op)}
    if invest is not None:
        r["invest_cost"] = f(invest)
    r["cap_nominal_mw"] = f(cap)
    r["cap_deviation_mw"] = f(dev)
    r["category"] = category
    if group is not None:
        r["group_id"] = group
    if phase is not None:
        r["phase_order"] = phase
    if dismantle is not None:
        r["dismantle_period"] = dismantle
    return r


def demand(i, b, load, dev_frac, shed_cost, n, rate):
    return {"id": i, "bus": b, "load_nominal_mw": f(load), "load_deviation_mw": f(round(dev_frac * load, 6)),
            "shed_cost": f(shed_cost), "shed_fraction": [1.0] * n, "growth_mean": growth(rate, n),
            "growth_dispersion": growth(rate, n)}


def planning(n, rate, line_budget, gen_budget, gamma_d, gamma_g_base, steps):
    return {"horizon_years": n, "discount_rate": f(rate), "sigma_hours": 8760.0, "line_budget": f(line_budget),
            "gen_budget": f(gen_budget), "gamma_d": gamma_d, "gamma_g_base": gamma_g_base,
            "gamma_g_steps": [{"threshold": a, "increment": b} for a, b in steps]}


def case(name, provenance, buses, lines, gens, groups, demands, plan, ccg=None):
    c = {"schema_version": 1, "name": name, "provenance": provenance, "buses": buses, "lines": lines,
         "generators": gens, "generator_groups": [{"group_id": g, "members": m} for g, m in groups],
         "demands": demands, "planning": plan}
    if ccg is not None:
        c["ccg"] = {"epsilon": f(ccg[0]), "max_iterations": ccg[1]}
    return c


STEPS = [(1, 1), (3, 2), (5, 3)]


def garver6():
    n = 25
    # Corridor data of the classic six-bus system: reactance (p.u., 100 MVA), rating (MW), cost (M EUR).
    corridors = [("1", "2", 0.40, 100, 4.0), ("1", "3", 0.38, 100, 3.8), ("1", "4", 0.60, 80, 6.0),
                 ("1", "5", 0.20, 100, 2.0), ("1", "6", 0.68, 70, 6.8), ("2", "3", 0.20, 100, 2.0),
                 ("2", "4", 0.40, 100, 4.0), ("2", "5", 0.31, 100, 3.1), ("2", "6", 0.30, 100, 3.0),
                 ("3", "4", 0.59, 82, 5.9), ("3", "5", 0.20, 100, 2.0), ("3", "6", 0.48, 100, 4.8),
                 ("4", "5", 0.63, 75, 6.3), ("4", "6", 0.30, 100, 3.0), ("5", "6", 0.61, 78, 6.1)]
    existing = {("1", "2"), ("1", "4"), ("1", "5"), ("2", "3"), ("2", "4"), ("3", "5")}
    lines = []
    for a, b, x, cap, cost in corridors:
        if (a, b) in existing:
            lines.append(line(f"L{a}-{b}", a, b, x, cap))
        for k in range(1, 4):
            lines.append(line(f"C{a}-{b}-{k}", a, b, x, cap, cost))
    gens = [
        gen("G1", "1", 20.0, 150, 75, "dismantled", dismantle=8),
        gen("G2", "3", 25.0, 360, 180),
        gen("G3", "6", 18.0, 600, 300),
        gen("G4", "1", 17.8, 50, 50, "candidate_phased", 50, "g1", 1),
        gen("G5", "1", 17.5, 70, 70, "candidate_phased", 80, "g1", 2),
        gen("G6", "1", 17.5, 40, 40, "candidate_phased", 40, "g1", 3),
        gen("G7", "2", 16.5, 150, 150, "candidate_independent", 200),
        gen("G8", "4", 15.0, 200, 200, "candidate_independent", 198),
        gen("G9", "5", 17.0, 100, 100, "candidate_independent", 110),
    ]
    loads = [("D1", "1", 80, 40.0), ("D2", "2", 240, 42.0), ("D3", "3", 40, 38.0), ("D4", "4", 160, 41.0),
             ("D5", "5", 240, 43.0)]
    demands = [demand(i, b, p, 0.2, 100.0 * bid, n, 0.012) for i, b, p, bid in loads]
    return case(
        "garver6",
        "reconstructed: six-bus Garver topology and corridor ratings from the classic publication; candidate "
        "generators G4-G9, group g1, dismantling of G1 at period 8, uncertainty and growth as in the planning "
        "study; existing generator costs, bidding prices and line costs are reconstructed values",
        [bus(str(i), i == 1) for i in range(1, 7)], lines, gens, [("g1", ["G4", "G5", "G6"])], demands,
        planning(n, 0.1, 40, 350, 2, 1, STEPS))


def ieee118_lite():
    n = 10
    # Fourteen-bus reduction: IEEE 14-bus branch reactances, synthetic ratings.
    branches = [("1", "2", 0.05917, 160), ("1", "5", 0.22304, 90), ("2", "3", 0.19797, 90), ("2", "4", 0.17632, 80),
                ("2", "5", 0.17388, 80), ("3", "4", 0.17103, 70), ("4", "5", 0.04211, 120), ("4", "7", 0.20912, 60),
                ("4", "9", 0.55618, 40), ("5", "6", 0.25202, 80), ("6", "11", 0.19890, 40), ("6", "12", 0.25581, 35),
                ("6", "13", 0.13027, 50), ("7", "8", 0.17615, 60), ("7", "9", 0.11001, 60), ("9", "10", 0.08450, 40),
                ("9", "14", 0.27038, 35), ("10", "11", 0.19207, 30), ("12", "13", 0.19988, 25), ("13", "14", 0.34802, 30)]
    lines = [line(f"L{a}-{b}", a, b, x, cap) for a, b, x, cap in branches]
    for a, b, cost in [("1", "2", 6.0), ("2", "4", 7.5), ("4", "9", 9.0), ("6", "13", 5.5), ("9", "14", 8.0),
                       ("10", "11", 4.5)]:
        x, cap = next((x, cap) for aa, bb, x, cap in branches if (aa, bb) == (a, b))
        lines.append(line(f"C{a}-{b}", a, b, x, cap, cost))
    gens = [
        gen("G1", "1", 20.0, 250, 125),
        gen("G2", "2", 22.0, 80, 40, "dismantled", dismantle=8),
        gen("G3", "3", 30.0, 60, 30),
        gen("G6", "6", 28.0, 60, 30),
        gen("G8", "8", 26.0, 60, 30),
        gen("N1", "1", 15.2, 90, 90, "candidate_independent", 120),
        gen("N4a", "4", 17.8, 50, 50, "candidate_phased", 50, "g4", 1),
        gen("N4b", "4", 17.5, 70, 70, "candidate_phased", 80, "g4", 2),
        gen("N4c", "4", 17.5, 40, 40, "candidate_phased", 40, "g4", 3),
        gen("N10a", "10", 17.6, 50, 50, "candidate_phased", 50, "g10", 1),
        gen("N10b", "10", 17.6, 50, 50, "candidate_phased", 50, "g10", 2),
        gen("N10c", "10", 15.4, 60, 60, "candidate_phased", 55, "g10", 3),
        gen("N14", "14", 17.0, 100, 100, "candidate_independent", 110),
    ]
    loads = [("D2", "2", 21.7), ("D3", "3", 94.2), ("D4", "4", 47.8), ("D5", "5", 7.6), ("D6", "6", 11.2),
             ("D9", "9", 29.5), ("D10", "10", 9.0), ("D11", "11", 3.5), ("D12", "12", 6.1), ("D13", "13", 13.5),
             ("D14", "14", 14.9)]
    demands = [demand(i, b, p, 0.5, 400.0, n, 0.012) for i, b, p in loads]
    return case(
        "ieee118-lite",
        "synthetic: fourteen-bus reduction exercising phased groups at two buses and a generator dismantled at "
        "period 8; candidate generator data patterned on the 118-bus planning study",
        [bus(str(i), i == 1) for i in range(1, 15)], lines, gens,
        [("g4", ["N4a", "N4b", "N4c"]), ("g10", ["N10a", "N10b", "N10c"])], demands,
        planning(n, 0.1, 30, 300, 4, 2, STEPS))


def tiny3():
    n = 2
    lines = [line("L1-2", "1", "2", 0.25, 60), line("L2-3", "2", "3", 0.25, 40), line("C1-3", "1", "3", 0.3, 60, 8.0)]
    gens = [gen("G1", "1", 15.0, 200, 60), gen("N3", "3", 12.0, 40, 20, "candidate_independent", 12.0)]
    demands = [demand("D2", "2", 50, 0.2, 2000.0, n, 0.05), demand("D3", "3", 70, 0.2, 2500.0, n, 0.05)]
    return case("tiny3", "synthetic: three-bus example for quick runs", [bus("1", True), bus("2"), bus("3")], lines,
                gens, [], demands, planning(n, 0.1, 20, 20, 1, 1, []), (1e-6, 50))


def main():
    for name, c in [("garver6", garver6()), ("ieee118-lite", ieee118_lite()), ("tiny3", tiny3())]:
        with open(os.path.join(OUT, name + ".json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(c, indent=2) + "\n")


if __name__ == "__main__":
    main()

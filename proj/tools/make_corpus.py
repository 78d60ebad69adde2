#!/usr/bin/env python3
"""Writes the synthetic ball-by-ball corpus used by the ingest and profile tests.

The output is deterministic. It covers every row shape the parser has to
handle: wides, no-balls, byes, leg-byes, run-outs of either batsman, the rare
five-run hit, quoted names containing commas, and one row per class of
malformed input.

    python3 tools/make_corpus.py > fixtures/corpus/deliveries.csv
"""

import csv
import random
import sys

TEAMS = {
    "Harbour": {
        "bat": ["A Ahmed", "B Brooks", "C Chopra", "D Dias", "E Evans", "F Fernando", "G Gill", "H Hale"],
        "bowl": ["P Patel", "Q Quinn", "R Rao", "S Singh", "T Tahir"],
    },
    "Ridge": {
        "bat": ["I Iyer", "J Joseph", "K Khan", "L Lewis", "M Mendis", "N Nair", "O Oram", "Smith, J"],
        "bowl": ["U Umar", "V Vaas", "W Wood", "X Xavier", "Y Yadav"],
    },
}

# Legal-ball outcome weights: W, 0, 1, 2, 3, 4, 5, 6
WEIGHTS = [0.05, 0.34, 0.36, 0.08, 0.01, 0.10, 0.004, 0.056]
CODES = ["W", 0, 1, 2, 3, 4, 5, 6]
DISMISSALS = ["bowled", "caught", "caught", "lbw", "stumped"]

HEADER = ["match_id", "innings", "over", "ball", "batsman", "non_striker", "bowler",
          "runs_batsman", "extras", "extra_kind", "wicket_player_out", "dismissal_type", "venue"]


def innings_rows(rng, match_id, innings, batting, bowling):
    order = list(TEAMS[batting]["bat"])
    bowlers = TEAMS[bowling]["bowl"]
    striker, non_striker = order[0], order[1]
    next_in = 2
    wickets = 0
    rows = []
    for over in range(20):
        bowler = bowlers[over % len(bowlers)]
        ball = 0
        while ball < 6:
            base = [match_id, innings, over, ball, striker, non_striker, bowler]
            roll = rng.random()
            if roll < 0.03:
                rows.append(base + [0, 1, "wide", "", "", "Stadium"])
                continue
            if roll < 0.045:
                runs = rng.choice([0, 0, 1, 4])
                rows.append(base + [runs, 1, "noball", "", "", "Stadium"])
                if runs % 2 == 1:
                    striker, non_striker = non_striker, striker
                continue
            if roll < 0.06:
                kind = rng.choice(["bye", "legbye"])
                extras = rng.choice([1, 1, 4])
                rows.append(base + [0, extras, kind, "", "", "Stadium"])
                if extras % 2 == 1:
                    striker, non_striker = non_striker, striker
                ball += 1
                if ball == 6:
                    striker, non_striker = non_striker, striker
                continue
            if roll < 0.07 and next_in < len(order):
                # Run out. The striker is only ever run out without scoring so
                # that batsman and bowler run totals stay comparable.
                if rng.random() < 0.5:
                    out, runs = striker, 0
                else:
                    out, runs = non_striker, rng.choice([0, 1])
                rows.append(base + [runs, 0, "", out, "run out", "Stadium"])
                wickets += 1
                if out == striker:
                    striker = order[next_in]
                else:
                    non_striker = order[next_in]
                next_in += 1
                if runs % 2 == 1:
                    striker, non_striker = non_striker, striker
                ball += 1
                if ball == 6:
                    striker, non_striker = non_striker, striker
                if wickets == 10 or next_in > len(order):
                    return rows
                continue
            code = rng.choices(CODES, WEIGHTS)[0]
            if code == "W" and next_in < len(order):
                rows.append(base + [0, 0, "", striker, rng.choice(DISMISSALS), "Stadium"])
                wickets += 1
                striker = order[next_in]
                next_in += 1
            else:
                runs = 0 if code == "W" else code
                rows.append(base + [runs, 0, "", "", "", "Stadium"])
                if runs % 2 == 1:
                    striker, non_striker = non_striker, striker
            ball += 1
            if ball == 6:
                striker, non_striker = non_striker, striker
    return rows


def main():
    rng = random.Random(20260329)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(HEADER)
    matches = ["m01", "m02", "m03", "m04", "m05", "m-holdout"]
    for i, match_id in enumerate(matches):
        first, second = ("Harbour", "Ridge") if i % 2 == 0 else ("Ridge", "Harbour")
        for innings, (bat, bowl) in enumerate([(first, second), (second, first)], start=1):
            for row in innings_rows(rng, match_id, innings, bat, bowl):
                out.writerow(row)
    # Malformed rows, one per validation rule.
    out.writerow(["m99", 3, 0, 0, "A Ahmed", "B Brooks", "U Umar", 0, 0, "", "", "", ""])
    out.writerow(["m99", 1, 25, 0, "A Ahmed", "B Brooks", "U Umar", 0, 0, "", "", "", ""])
    out.writerow(["m99", 1, 0, 0, "A Ahmed", "B Brooks", "U Umar", 9, 0, "", "", "", ""])
    out.writerow(["m99", 1, 0, 0, "A Ahmed", "A Ahmed", "U Umar", 0, 0, "", "", "", ""])
    out.writerow(["m99", 1, 0, 0, "A Ahmed", "B Brooks", "U Umar", 0, 0, "", "A Ahmed", "", ""])
    out.writerow(["m99", 1, 0, 0, "A Ahmed", "B Brooks", "U Umar", "x", 0, "", "", "", ""])


if __name__ == "__main__":
    main()

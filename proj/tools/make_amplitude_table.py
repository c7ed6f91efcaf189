#!/usr/bin/env python3
"""Write a tabulated Born-Gaussian amplitude for a two-level system exchanging
one quantum with a two-level gas particle (units hbar = m = E_R = 1).

Usage: make_amplitude_table.py OUT.csv [--corrupt]

With --corrupt one node of the (1,0,0,1) channel is shifted, which breaks the
time-reversal symmetry of the table.
"""
import argparse
import math

SYSTEM = [0.0, 1.0]
ANCILLA = [0.0, 1.2]
R = 1.0 / math.sqrt(2.0)
P_R = 1.0 / R
PREFACTOR = -math.sqrt(math.pi / 2.0) * R  # V0 / E_R = 1

# (i, j, k, l): system j -> i, ancilla l -> k; coupling sigma+ x sigma- + h.c.
CHANNELS = [(1, 0, 0, 1), (0, 1, 1, 0)]


def amplitude(p, q, c):
    sep2 = (q - p) ** 2 + 2.0 * q * p * (1.0 - c)
    return PREFACTOR * math.exp(-sep2 / (2.0 * P_R ** 2))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--corrupt", action="store_true")
    ap.add_argument("--n-p", type=int, default=161)
    ap.add_argument("--n-c", type=int, default=81)
    args = ap.parse_args()

    p_nodes = [8.0 * n / (args.n_p - 1) for n in range(args.n_p)]
    c_nodes = [-1.0 + 2.0 * n / (args.n_c - 1) for n in range(args.n_c)]
    with open(args.out, "w", newline="\n") as f:
        f.write("p_mag,cos_theta,i,j,k,l,re,im\n")
        for i, j, k, l in CHANNELS:
            e_tot = SYSTEM[i] - SYSTEM[j] + ANCILLA[k] - ANCILLA[l]
            for a, p in enumerate(p_nodes):
                q2 = p * p - 2.0 * e_tot
                for b, c in enumerate(c_nodes):
                    # Closed nodes hold the threshold value (q = 0) so that
                    # interpolation across the threshold cell stays smooth.
                    v = amplitude(p, math.sqrt(max(q2, 0.0)), c)
                    if args.corrupt and (i, j, k, l) == (1, 0, 0, 1) and a == 20 and b == args.n_c - 1:
                        v += 0.5
                    f.write(f"{p:.17g},{c:.17g},{i},{j},{k},{l},{v:.17g},0\n")


if __name__ == "__main__":
    main()

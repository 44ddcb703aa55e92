"""Regenerates fixtures.json.

Every value here is computed in 50-digit arithmetic through routes that the
Rust code does not use: strip distances go through the conformal map
z -> tan(pi z / 4) onto the disk followed by the Moebius form of the disk
distance, half-plane distances through the Cayley transform.

    python3 gen_fixtures.py > fixtures.json
"""
import json
from mpmath import mp, mpf, mpc, atanh, tan, pi, log, sqrt, fabs

mp.dps = 50


def disk(z, w):
    return atanh(fabs((z - w) / (1 - z.conjugate() * w)))


def std_strip(z, w):
    # strip |Re| < 1
    return disk(tan(pi * z / 4), tan(pi * w / 4))


def strip(a, b, z, w):
    s = lambda u: (2 * u - (a + b)) / (b - a)
    return std_strip(s(z), s(w))


def uhp(z, w):
    c = lambda u: (u - 1j) / (u + 1j)
    return disk(c(mpc(z)), c(mpc(w)))


def cayley_left(z):
    # unit disk -> {Re < 0}
    return -(1 + z) / (1 - z)


GRID1 = [mpc(0), mpc("0.5"), mpc("-0.4", "0.3"), mpc("0.3", "-0.6"), mpc(0, "-0.7")]
GRID = [(a, b) for a in GRID1 for b in GRID1]
N_VALUES = [4, 16, 64, 256]


def asym_error(n):
    r = 1 - mpf(1) / n
    worst = mpf(0)
    for i, z in enumerate(GRID):
        for w in GRID[i + 1:]:
            fz = [1 + cayley_left(r * c) / n for c in z]
            fw = [1 + cayley_left(r * c) / n for c in w]
            k_omega = max(std_strip(fz[j], fw[j]) for j in range(2))
            k_bidisk = max(disk(z[j], w[j]) for j in range(2))
            worst = max(worst, fabs(k_omega - k_bidisk))
    return worst


def asym_pair(n):
    r = 1 - mpf(1) / n
    z = (mpc(0), mpc(0))
    w = (mpc("0.5"), mpc(0))
    fz = [1 + cayley_left(r * c) / n for c in z]
    fw = [1 + cayley_left(r * c) / n for c in w]
    return max(std_strip(fz[j], fw[j]) for j in range(2))


out = {
    "atanh_half": float(atanh(mpf("0.5"))),
    "half_log_3": float(log(3) / 2),
    "half_log_2": float(log(2) / 2),
    "gromov_euclid_unit": float((2 - sqrt(2)) / 2),
    "uhp_i_ie2": float(uhp(mpc(0, 1), mpc(0, mp.e ** 2))),
    "strip_0_4i": float(std_strip(mpc(0), mpc(0, 4))),
    "strip_0_half": float(std_strip(mpc(0), mpc("0.5"))),
    "strip_shifted": float(strip(mpf(2), mpf(5), mpc(3, 1), mpc("4.5", -2))),
    "uhp_generic": float(uhp(mpc("0.3", "0.2"), mpc(-2, 5))),
    "disk_generic": float(disk(mpc("0.3", "-0.5"), mpc("-0.6", "0.1"))),
    "cube_tube_d2": float(max(std_strip(mpc(0), mpc(0, 4)), std_strip(mpc(0), mpc("0.5")))),
    "asym_grid": [[float(g.real), float(g.imag)] for g in GRID1],
    "asym_n": N_VALUES,
    "asym_error": [float(asym_error(n)) for n in N_VALUES],
    "asym_pair_value": [float(asym_pair(n)) for n in N_VALUES],
}
print(json.dumps(out, indent=2))

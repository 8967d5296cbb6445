"""High-precision reference values for the built-in model functions.

Run with `python3 model_functions.py`; the printed values are frozen into
`tests/models.rs`. Uses 60-digit arithmetic with mpmath and the principal
branch for powers and square roots.
"""
from mpmath import mp, mpf, mpc, pi, sqrt, power

mp.dps = 60

# sandwich beam, fractional derivative damping layer
G0 = mpf("350.4e3")
GINF = mpf("3.062e6")
TAU = mpf("8.23e-9")
ALPHA = mpf("0.675")

# air + porous seat (JCA)
RHO0 = mpf("1.213")
PR = mpf("0.72")
GAMMA = mpf("1.4")
ETA = mpf("0.1837e-6")
PHI = mpf("0.98")
AINF = mpf("1.7")
SIGMA = mpf("13500")
LAM = mpf("80e-6")
LAMP = mpf("160e-6")


def beam_g1(s):
    p = power(s * TAU, ALPHA)
    return (G0 + GINF * p) / (1 + p)


def porous_g1(s):
    gj = sqrt(1 + 4 * AINF**2 * ETA * RHO0 * s / (SIGMA**2 * LAM**2 * PHI**2))
    alpha = AINF * (1 + SIGMA * PHI / (s * RHO0 * AINF) * gj)
    return PHI / alpha


def porous_g2(s):
    ap = 1 + 8 * ETA / (LAMP**2 * PR * s * RHO0) * sqrt(1 + RHO0 * s * PR * LAMP**2 / (16 * ETA))
    return PHI * (GAMMA - (GAMMA - 1) / ap)


if __name__ == "__main__":
    for name, f in [("beam_g1", beam_g1), ("porous_g1", porous_g1), ("porous_g2", porous_g2)]:
        for s in [mpc(0, 2 * pi * 100), mpc(0, 2 * pi * 1), mpc(-300, 4000)]:
            v = f(s)
            print(f"{name} s={mp.nstr(s, 20)} -> ({mp.nstr(v.real, 20)}, {mp.nstr(v.imag, 20)})")
    print("g2 pole", mp.nstr(-(sqrt(17) - 1) * 2 * ETA / (LAMP**2 * PR * RHO0), 20))
    print("g2 branch", mp.nstr(-16 * ETA / (RHO0 * PR * LAMP**2), 20))
    print("g1 pole approx", mp.nstr(-SIGMA * PHI / (RHO0 * AINF), 20))

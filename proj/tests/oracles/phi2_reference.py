"""Offline high-precision reference values for the confluent Lauricella
function Phi2^(N) and the correlated gamma-sum CDF/PDF.

Sums the plain (untransformed, alternating for negative arguments) series
shell by shell in mpmath at high working precision, and cross-checks each
value with mpmath's own Talbot Laplace inversion.  Values printed here are
frozen into tests/test_lauricella.cpp and tests/test_distribution.cpp.

Usage: python3 tests/oracles/phi2_reference.py
"""
import mpmath as mp


def phi2_series(b, c, x, dps=250, max_degree=4000):
    with mp.workdps(dps):
        b = [mp.mpf(v) for v in b]
        x = [mp.mpf(v) for v in x]
        c = mp.mpf(c)
        n = len(b)
        # factor i: sum_m (b_i)_m x_i^m / m!
        fac = [[mp.mpf(1)] for _ in range(n)]
        partial = [[mp.mpf(1)] for _ in range(n)]
        total = mp.mpf(1)
        poch_c = mp.mpf(1)
        small = 0
        for k in range(1, max_degree):
            for i in range(n):
                fac[i].append(fac[i][-1] * (b[i] + k - 1) / k * x[i])
            prev = None
            for i in range(n):
                if i == 0:
                    partial[0].append(fac[0][k])
                else:
                    s = mp.mpf(0)
                    for m in range(k + 1):
                        s += partial[i - 1][k - m] * fac[i][m]
                    partial[i].append(s)
            poch_c *= c + k - 1
            term = partial[n - 1][k] / poch_c
            total += term
            if abs(term) < mp.mpf(10) ** (-(dps - 30)) * (1 + abs(total)):
                small += 1
                if small > 5:
                    break
            else:
                small = 0
        return total


def phi2_talbot(b, c, x):
    with mp.workdps(40):
        def F(s):
            v = s ** (-c)
            for bi, xi in zip(b, x):
                v *= (1 - xi / s) ** (-bi)
            return v
        return mp.gamma(c) * mp.invertlaplace(F, 1, method='talbot')


def report(label, b, c, x, dps=250):
    s = phi2_series(b, c, x, dps=dps)
    t = phi2_talbot(b, c, x)
    print(f"{label}: series={mp.nstr(s, 20)} talbot={mp.nstr(t, 20)}")


if __name__ == "__main__":
    report("1F1(0.5;1.5;-1)", [0.5], 1.5, [-1], dps=60)
    report("phi2 N=2 (0.75,0.75;2.5;-0.8,-0.8)", [0.75, 0.75], 2.5, [-0.8, -0.8], dps=60)
    report("phi2 N=3 (1.5^3;4.5;-20,-35,-50)", [1.5] * 3, 4.5, [-20, -35, -50], dps=120)
    report("phi2 N=3 (1.5^3;5.5;-20,-35,-50)", [1.5] * 3, 5.5, [-20, -35, -50], dps=120)
    report("phi2 N=3 (1.5^3;5.5;-220,-250,-300)", [1.5] * 3, 5.5, [-220, -250, -300], dps=400)
    report("phi2 N=4 (0.7,1.2,2,0.4;3.1;-3,-0.5,-7,-1)", [0.7, 1.2, 2, 0.4], 3.1, [-3, -0.5, -7, -1], dps=80)

"""Arbitrary-precision reference values frozen into the C++ tests.

Run with: python3 tests/oracles/constants_oracle.py
Requires mpmath. Output is pasted into tests/test_specfun.cpp.
"""
import mpmath as mp

mp.mp.dps = 40


def c(N, s):
    return 4**s * s * (1 - s) * mp.pi**(-mp.mpf(N) / 2) * mp.gamma(s + mp.mpf(N) / 2) / mp.gamma(2 - s)


def f1(s):
    g = lambda t: ((t + 1)**s - 1)**2 / abs(t)**(1 + 2 * s)
    return mp.quad(g, [-1, -mp.mpf('0.5'), 0, mp.mpf('0.5'), 1])


def f2(s):
    g = lambda t: (t**(2 * s) - ((t + 1)**s - 1)**2) / t**(1 + 2 * s)
    return mp.quad(g, [1, 2, 10, 100, mp.inf])


def f3(s):
    inner = lambda t: mp.quad(lambda tau: (t**s - tau**s)**2 / (t - tau)**(2 + 2 * s),
                              [0, mp.mpf(1) - (t - 1), 1] if t < 2 else [0, 1])
    return mp.quad(inner, [1, mp.mpf('1.001'), mp.mpf('1.1'), 2, 10, mp.inf])


if __name__ == "__main__":
    for x in ['0.1', '0.5', '1.5', '2.5', '3.7', '10.25', '19.5']:
        print('gamma', x, mp.nstr(mp.gamma(mp.mpf(x)), 20))
    for N, s in [(1, '0.5'), (3, '0.5'), (2, '0.25'), (5, '0.75'), (1, '0.9')]:
        print('c', N, s, mp.nstr(c(N, mp.mpf(s)), 20))
    print('kappa_closed 0.9', mp.nstr(mp.gamma(mp.mpf('1.9'))**2 / 2, 20))
    for s in ['0.25', '0.5', '0.75']:
        s = mp.mpf(s)
        F1, F2, F3 = f1(s), f2(s), f3(s)
        K = c(1, s) / 2 * (-1 / (2 * s) - F1 + F2 + (1 + 2 * s) * F3)
        print('F', mp.nstr(s, 3), mp.nstr(F1, 16), mp.nstr(F2, 16), mp.nstr(F3, 16),
              'K', mp.nstr(K, 16), 'closed', mp.nstr(mp.gamma(1 + s)**2 / 2, 16))

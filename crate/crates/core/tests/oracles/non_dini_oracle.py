"""Independent high-precision oracle for the smooth-but-not-Dini-smooth example.

Computes, with mpmath at 40 digits, the values frozen into the Rust tests:
closed-form values of f and f', the radial dilatation norm sigma(r), the
modulus of continuity of f' on the circle, and the Becker quantity.
Run: python3 non_dini_oracle.py
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 40


def L(v):
    return mp.log(v)


def fp(z):
    v = (1 - z) / 10
    if v == 0:
        # continuous extension: 1/log(v) -> 0 as v -> 0
        return mp.mpf(2) / 10
    l = L(v)
    return (2 - 1 / l + 1 / l**2) / 10


def fpp(z):
    v = (1 - z) / 10
    l = L(v)
    return (2 - l) / (100 * v * l**3)


def f(z):
    h = (9 + z) / 10
    v = 1 - h
    return 2 * h + v / L(v)


def mu_polar(s, th):
    s = mp.mpf(s)
    e = mp.expj(th)
    w = e / (1 + s)
    zmw = e * s * (2 + s) / (1 + s)
    zbar2 = (1 + s) ** 2 * mp.expj(-2 * th)
    one_minus_w = (s + 2 * mp.sin(th / 2) ** 2 - 1j * mp.sin(th)) / (1 + s)
    v = one_minus_w / 10
    l = L(v)
    fpw = (2 - 1 / l + 1 / l**2) / 10
    fppw = (2 - l) / (100 * v * l**3)
    return -fppw * zmw / (zbar2 * fpw)


def sigma(s):
    r = 1 + mp.mpf(s)
    g = lambda th: abs(mu_polar(s, th)) ** 2 * r
    pts = [0] + [mp.mpf(s) * 4**k for k in range(0, 40) if mp.mpf(s) * 4**k < mp.pi] + [mp.pi]
    val = 2 * mp.quad(g, pts)
    return mp.sqrt(val)


print("f(0)  =", mp.nstr(f(mp.mpf(0)), 17))
print("f'(0) =", mp.nstr(fp(mp.mpf(0)), 17))

print("# sigma normalized: sigma(r) * ln(1/(r-1))^2 / (r-1)^(1/2)")
for s in ["1e-2", "1e-3", "1e-4", "1e-5"]:
    sg = sigma(s)
    sm = mp.mpf(s)
    print(s, mp.nstr(sg, 17), mp.nstr(sg * mp.log(1 / sm) ** 2 / mp.sqrt(sm), 12))


def fprime_circle(tau):
    return complex(fp(mp.expj(tau)))


def omega_bruteforce(t):
    # sup |f'(e^{i a}) - f'(e^{i b})| over |a-b| <= t; the sup is attained near tau=0.
    best = 0.0
    offs = np.concatenate([-np.logspace(np.log10(t) - 8, np.log10(np.pi), 400), [0.0],
                           np.logspace(np.log10(t) - 8, np.log10(np.pi), 400)])
    for a in offs:
        for frac in (1.0, 0.75, 0.5, 0.25):
            b = a + frac * t
            d = abs(fprime_circle(a) - fprime_circle(b))
            best = max(best, d)
    # fine local search around the best anchor region near 0
    for a in np.linspace(-1.2 * t, 0.2 * t, 800):
        b = a + t
        best = max(best, abs(fprime_circle(a) - fprime_circle(b)))
    return best


print("# omega_{f'}(t) * ln(1/t)")
for t in [1e-3, 1e-4, 1e-5, 1e-6]:
    w = omega_bruteforce(t)
    print(t, repr(w), w * np.log(1 / t))

# Becker quantity over a polar grid of the disk
best = 0.0
for r in np.linspace(0, 0.9999, 300):
    for th in np.linspace(-np.pi, np.pi, 301):
        z = r * np.exp(1j * th)
        zz = mp.mpc(z)
        val = (1 - r * r) * abs(zz * fpp(zz) / fp(zz))
        best = max(best, float(val))
print("becker sup (grid)", best)

# |f''(z)| * |ln(10/(1-z))|^2 * |1-z| along radial probes toward 1
print("# f'' tracking ratio on radial probes")
for k in range(1, 13):
    z = 1 - mp.mpf(10) ** (-k)
    print(k, mp.nstr(abs(fpp(z)) * abs(mp.log(10 / (1 - z))) ** 2 * abs(1 - z), 10))

print("# (1-|z|)|f''/f'| radial limsup tail")
for k in range(1, 13):
    z = 1 - mp.mpf(10) ** (-k)
    print(k, mp.nstr((1 - z) * abs(fpp(z)) / abs(fp(z)), 10))

"""Independent evaluation of the closed-form bound constants frozen in the unit tests.

Uses mpmath at 50 digits so the frozen doubles are correctly rounded.
"""

from mpmath import mp, mpf, log, ceil, log as ln

mp.dps = 50


def two_level(r_star=5, d=200, lam=mpf(1), xi=mpf("1e-6")):
    return [lam] * r_star + [xi] * (d - r_star)


def kappa_p_sq(sig, r, alpha, d, p, appendix=True):
    smax, sr, snext = sig[0], sig[r - 1], sig[r] if r < len(sig) else mpf(0)
    power = 2 * (2 * alpha + 1)
    tail_power = power if appendix else 2 * alpha
    head = 9 * r * r * (smax / sr) ** power
    tail = 4 * r * (d + ln(2 / p)) * (snext / sr) ** tail_power
    return head / p**2, tail / p**2


def thm3_constant(r, p, appendix=True):
    if appendix:
        return 2 * r / p**2 * (ln(1 / p) + r * ln(2))
    return 2 * r / p * (ln(1 / p**2) + r * ln(2))


def thm3_excess(sig, r, alpha, p, appendix=True):
    c = thm3_constant(r, p, appendix)
    sr, smax = sig[r - 1], sig[0]
    return sum(s**2 * c * (smax**2 - s**2) / sr**2 * (s / sr) ** (4 * alpha) for s in sig[r:])


def eps_min(sig, r):
    return sum(s**2 for s in sig[r:])


def cor1(sig, r, alpha):
    sr, smax = sig[r - 1], sig[0]
    return sum(s**2 * 32 * ln(4) * r * (r + 1) * (smax**2 - s**2) / sr**2 * (s / sr) ** (4 * alpha)
               for s in sig[r:])


if __name__ == "__main__":
    sig = two_level()
    head, tail = kappa_p_sq(sig, 5, 0, 200, mpf(1) / 6)
    print("kappa_p_sq appendix a=0:", mp.nstr(head + tail, 20), "tail", mp.nstr(tail, 20))
    head, tail = kappa_p_sq(sig, 5, 0, 200, mpf(1) / 6, appendix=False)
    print("kappa_p_sq main_text a=0:", mp.nstr(head + tail, 20), "tail", mp.nstr(tail, 20))
    head, tail = kappa_p_sq(sig, 5, 1, 200, mpf(1) / 6)
    print("kappa_p_sq appendix a=1:", mp.nstr(head + tail, 20))
    print("thm3_constant appendix r=5 p=1/4:", mp.nstr(thm3_constant(5, mpf(1) / 4), 20))
    print("thm3_constant main r=5 p=1/4:", mp.nstr(thm3_constant(5, mpf(1) / 4, False), 20))
    e = eps_min(sig, 5)
    print("eps_min:", mp.nstr(e, 20))
    for a in (0, 1):
        print(f"thm3 excess/eps_min a={a}:", mp.nstr(thm3_excess(sig, 5, a, mpf(1) / 4) / e, 20))
    print("cor1 a=0:", mp.nstr(cor1(sig, 5, 0), 20), "a=1:", mp.nstr(cor1(sig, 5, 1), 20))
    print("cor1 ratio:", mp.nstr(cor1(sig, 5, 1) / cor1(sig, 5, 0), 20))
    for P in ("0.5", "0.9", "0.99", "0.999", "0.9999"):
        print("m(P)", P, int(ceil(-log(1 - mpf(P), 2))))

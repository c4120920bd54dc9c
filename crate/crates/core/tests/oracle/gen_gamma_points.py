# Frozen reference points for the complex Gamma function: 100 pseudo-random
# arguments in |z| <= 100 (seeded), evaluated with mpmath at 40 digits.
import random
import mpmath as mp

mp.mp.dps = 40
rng = random.Random(20240607)
print("re,im,gamma_re,gamma_im")
n = 0
while n < 100:
    r = 100 * rng.random() ** 2
    th = rng.uniform(-mp.pi, mp.pi)
    z = mp.mpc(r * mp.cos(th), r * mp.sin(th))
    zr, zi = float(z.real), float(z.imag)
    if abs(zi) < 1e-3 and zr < 0:
        continue
    g = mp.gamma(mp.mpc(zr, zi))
    if abs(g) > 1e300 or abs(g) < 1e-300:
        continue
    print(f"{zr!r},{zi!r},{mp.nstr(g.real, 20)},{mp.nstr(g.imag, 20)}")
    n += 1

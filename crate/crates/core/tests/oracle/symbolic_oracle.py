# Independent computer-algebra oracle for the frozen symbolic expectations in
# src/polyexpr/special.rs. Run with: python3 symbolic_oracle.py
import sympy as sp

x, y, xp, yp = sp.symbols("x y xp yp")


def mp(P):
    Px, Py = sp.diff(P, x), sp.diff(P, y)
    Pxx, Pxy, Pyy = sp.diff(P, x, 2), sp.diff(P, x, y), sp.diff(P, y, 2)
    Pxxy, Pxyy = sp.diff(P, x, 2, y), sp.diff(P, x, y, 2)
    return sp.expand(Py**2 * (Px * Pxxy - Pxx * Pxy) - Px**2 * (Py * Pxyy - Pxy * Pyy))


def hf_poly(P):
    Q = P.subs({x: xp, y: yp}, simultaneous=True)
    return sp.expand(
        sp.diff(P, x) * sp.diff(P, y) * sp.diff(Q, xp, yp)
        - sp.diff(Q, xp) * sp.diff(Q, yp) * sp.diff(P, x, y)
    )


def hf_general(F):
    Fx, Fy, Fxp, Fyp = sp.diff(F, x), sp.diff(F, y), sp.diff(F, xp), sp.diff(F, yp)
    return sp.expand(
        Fx * Fyp * sp.diff(F, xp, y)
        - Fx * Fy * sp.diff(F, xp, yp)
        - Fxp * Fyp * sp.diff(F, x, y)
        + Fxp * Fy * sp.diff(F, x, yp)
    )


for name, P in [
    ("x^2+xy+y^2", x**2 + x * y + y**2),
    ("xy", x * y),
    ("x+y", x + y),
    ("x+y+(x^2+y^2)^2", x + y + (x**2 + y**2) ** 2),
    ("x^3*y + y^2", x**3 * y + y**2),
]:
    print("M_P", name, "=", mp(P))
print("H_F xy =", hf_poly(x * y))
print("H_F x^2+y^2 =", hf_poly(x**2 + y**2))
print("hf_general x*yp =", hf_general(x * yp))
print("hf_general xy - xp yp =", hf_general(x * y - xp * yp))
print("hf_general x + xp + y + yp =", hf_general(x + xp + y + yp))
print("d/dx (x^2+y^2)^2 =", sp.expand(sp.diff((x**2 + y**2) ** 2, x)))

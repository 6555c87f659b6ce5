"""Compare the three delivery schemes across the UE-cache grid.

Non-integral cache points are served by time-sharing the two nearest
integral placements (the shared curves are midpoint-convex in exact
rationals). At poor fronthaul quality the cloud-free split scheme takes
over once it is feasible; the crossover quality rho_th is computed in
closed form and verified by evaluating both schemes just across it.
"""

from fractions import Fraction

import cachenet as cn


def fmt(v):
    return "n/a" if v is None else f"{float(v.total):.4f}"


def main():
    h, r, mu_t = 5, 2, Fraction(3, 10)
    grid = [Fraction(i, 10) for i in range(11)]

    for rho in (Fraction(1, 20), Fraction(20)):
        rows = cn.compare_schemes([(h, r, m, mu_t, rho) for m in grid])
        print(f"rho = {rho}:")
        print("  mu_r   coded-multicast  soft-transfer  zero-forcing  best")
        for m, row in zip(grid, rows):
            print(f"  {str(m):>4}   {fmt(row.values['mdsia']):>15}  "
                  f"{fmt(row.values['soft']):>13}  {fmt(row.values['zf']):>12}  {row.argmin}")
        print()

    th = cn.rho_threshold(h, r, Fraction(7, 10), mu_t)
    print(f"crossover quality at mu_r = 7/10: rho_th = {th} ~ {float(th):.4f}")
    eps = Fraction(1, 1000)
    for rho, side in ((th - eps, "below"), (th + eps, "above")):
        row = cn.compare_schemes([(h, r, Fraction(7, 10), mu_t, rho)])[0]
        print(f"  {side} threshold: best = {row.argmin}")
    print()

    report = cn.convexity_check("soft", mu_t, Fraction(1, 20), grid, h=h, r=r)
    print(f"midpoint convexity of the soft-transfer curve: "
          f"{'ok' if report.ok else 'VIOLATED'} ({report.checked_pairs} pairs, exact)")

    v = cn.shared_mdsia_ndt(h, r, Fraction(3, 8), 0, 1)
    print(f"time-shared coded-multicast value at mu_r = 3/8, rho = 1: {v.total}")


if __name__ == "__main__":
    main()

"""Long-range dynamics need not converge in the thermodynamic limit.

For the number-squared model ``N^2 / (2|L|)`` the evolved annihilator at
the origin keeps changing as the box grows, while a nearest-neighbour
hopping model settles down.  The remainder of the explicit expansion
stays below ``2 t^2`` at every size.

Run with ``python demos/nonconvergence_probe.py``.
"""

from lrfermi import LatticeBox
from lrfermi.dynamics import nonconvergence_probe
from lrfermi.interactions import hopping_interaction


def main(t=0.5):
    boxes = [LatticeBox.cube(1, r) for r in (1, 2, 3, 4)]
    pr = nonconvergence_probe(boxes, t, control=hopping_interaction())
    print(f"t = {t}, remainder bound 2t^2 = {pr.remainder_bound:.3f}\n")
    print("rungs      number-squared   hopping control")
    for (a, b), d, c in zip(zip(pr.sizes, pr.sizes[1:]), pr.consecutive, pr.control_consecutive):
        print(f"{a:2d} -> {b:2d}   {d:.6f}         {c:.3e}")
    print("\nsites  remainder")
    for n, r in zip(pr.sizes, pr.remainders):
        print(f"{n:5d}  {r:.6f}")


if __name__ == "__main__":
    main()

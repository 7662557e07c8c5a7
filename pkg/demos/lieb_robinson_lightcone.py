"""Commutator growth of evolved observables against the Lieb-Robinson bound.

An even observable at the left end of a spinless chain is evolved under
a hopping-plus-density schedule and commuted with an annihilator at
increasing distance.  Both sides of the estimate are printed.

Run with ``python demos/lieb_robinson_lightcone.py``.
"""

from lrfermi import LatticeBox, LocalPolynomial, instantiate
from lrfermi.dynamics import TimeDependentInteraction, lr_bound_check
from lrfermi.fock import annihilator
from lrfermi.interactions import DecayFunction, hopping_interaction, number_interaction


def main(n_sites=7, t=1.0):
    F = DecayFunction(epsilon=1.0)
    box = LatticeBox.chain(n_sites, start=0)
    psi = TimeDependentInteraction.from_breakpoints([0.0, 0.5], [hopping_interaction(), number_interaction() * 0.5])
    A1 = instantiate(LocalPolynomial.number((0,)), box)
    print(f"{'distance':>8s}  {'||[tau(A1), A2]||':>18s}  {'bound':>10s}")
    for x in range(1, n_sites):
        A2 = annihilator(box, (x,))
        c = lr_bound_check("i", psi, box, F, s=0.0, t=t, A1=A1, A2=A2)
        print(f"{x:8d}  {c.lhs:18.3e}  {c.rhs:10.3e}")


if __name__ == "__main__":
    main()

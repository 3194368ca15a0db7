"""Vessels, transfers and the two purity metrics.

Builds the classic salt/product mixture, stratifies it, drains the aqueous
layer and shows how solute purity responds. Run:

    python3 demos/01_vessels_and_purity.py
"""

from chembench import (
    Vessel,
    add_material,
    drain,
    load_default_registry,
    settle,
    solute_purity,
    total_moles,
)

registry = load_default_registry()

ev = Vessel("EV", registry, volume_capacity=1.0)
add_material(ev, "diethyl-ether", 4.0, "liquid")
add_material(ev, "NaCl", 1.0, "dissolved")       # enters as Na+ / Cl-
add_material(ev, "dodecane", 1.0, "dissolved")
beaker = Vessel("B1", registry, volume_capacity=1.0)

print("initial solute purity of dodecane:",
      round(solute_purity([ev, beaker], "dodecane"), 4))

# wash: add the polar solvent, let the column stratify, pull the bottom
add_material(ev, "water", 4.0, "liquid")
settle(ev, 2.0)
for ion in ("Na+", "Cl-"):
    frac = ev.solutes[ion]["water"] / total_moles(ev, ion)
    print(f"{ion} now sitting in the water layer: {frac:.1%}")

volumes = ev.solvent_volumes()
bottom = volumes["water"] / sum(volumes.values())
drain(ev, beaker, bottom)

print("after draining the water layer:")
print("  EV dodecane:", round(total_moles(ev, "dodecane"), 3),
      "ions:", round(total_moles(ev, "Na+") + total_moles(ev, "Cl-"), 3))
print("  B1 dodecane:", round(total_moles(beaker, "dodecane"), 3),
      "ions:", round(total_moles(beaker, "Na+") + total_moles(beaker, "Cl-"), 3))
print("weighted solute purity of dodecane:",
      round(solute_purity([ev, beaker], "dodecane"), 4))

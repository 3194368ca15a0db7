"""The full dodecane workflow: react, then distill, via vessel snapshots.

Mirrors what `chembench pipeline --stages rxn:heuristic,dit:heuristic
--target dodecane` does, but through library calls, and finishes with a
characterization of the collection vessel.

    python3 demos/05_full_workflow.py
"""

from chembench import characterize, make_bench, absolute_purity
from chembench.benches.base import CONFIG_DIR, load_config
from chembench.policies import heuristic_dit, heuristic_rxn, run_episode
from chembench.snapshots import vessel_from_state

# stage 1: make dodecane (and unavoidable salt) on the reaction bench
rxn = make_bench("rxn", "wurtz", seed=7)
ret, vessels = run_episode(rxn, heuristic_rxn("wurtz"), seed=7, target="dodecane")
reactor_state = vessels[0]
print("reaction stage return:", round(ret, 4))
print("reactor vessel solutes:",
      {k: round(float(sum(d.values())), 3) for k, d in reactor_state["solutes"].items()})

# stage 2: hand the vessel to the distillation bench
doc = dict(load_config(CONFIG_DIR / "dit_wurtz.yaml"))
doc["input_vessel"] = reactor_state
dit = make_bench("dit", config=doc, seed=7)
ret, vessels = run_episode(dit, heuristic_dit(), seed=7, target="dodecane")
print("distillation stage return:", round(ret, 4))

def dodecane_in(state):
    dissolved = sum(state["solutes"].get("dodecane", {}).values())
    return dissolved + state["solvents"].get("dodecane", 0.0)


collection = vessel_from_state(max(vessels, key=dodecane_in), dit.registry)
purity = absolute_purity([collection], "dodecane")
print(f"collection vessel {collection.label}: absolute purity "
      f"{purity:.3f}")

spectrum = characterize(collection, "uv-vis")
peak = spectrum.wavelengths[spectrum.bins.argmax()]
print(f"uv-vis check: strongest absorbance at {peak:.0f} nm "
      "(the dodecane line)")

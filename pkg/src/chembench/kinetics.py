"""Reaction networks, Arrhenius rate constants and adaptive ODE integration.

Reactions are elementary: the rate of each reaction is its rate constant
times the product of reactant concentrations raised to their stoichiometric
coefficients, and the rate constant follows the Arrhenius form
k = A * exp(-Ea / (R*T)). Concentration dynamics are integrated with the
embedded Runge-Kutta-Fehlberg 4(5) pair under standard proportional step
control against absolute/relative tolerances.

Reactions operate on the dissolved inventory of a vessel: concentrations are
dissolved amounts over the working solution volume, and integration results
are written back as dissolved amounts. A dissociating salt participates as a
species whose amount is the dissolved ion-pair count; produced salt enters
the vessel as one mol of each ion per mol of salt.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import IO

import numpy as np
import yaml

from .errors import (
    DimensionMismatch,
    ParseError,
    StepLimitExceeded,
    ValidationError,
)
from .vessel import Vessel

REACTIONS_FORMAT_VERSION = 1

GAS_CONSTANT = 8.314  # J/(mol K)


@dataclass(frozen=True)
class Reaction:
    """One elementary reaction with Arrhenius parameters.

    ``pre_exponential`` has units consistent with the overall order on a
    per-second base; ``activation_energy`` is J/mol.
    """

    reactants: tuple[tuple[str, int], ...]
    products: tuple[tuple[str, int], ...]
    pre_exponential: float
    activation_energy: float

    def validate(self) -> None:
        if not self.reactants or not self.products:
            raise ValidationError("a reaction needs at least one reactant and product")
        for name, nu in self.reactants + self.products:
            if not isinstance(nu, int) or nu < 1:
                raise ValidationError(
                    f"stoichiometric coefficient for {name!r} must be a positive "
                    f"integer, got {nu!r}"
                )
        if self.pre_exponential <= 0:
            raise ValidationError("pre_exponential must be > 0")
        if self.activation_energy < 0:
            raise ValidationError("activation_energy must be >= 0")


@dataclass(frozen=True)
class ReactionNetwork:
    """An ordered species list plus the reactions coupling them."""

    name: str
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def validate(self) -> None:
        if len(set(self.species)) != len(self.species):
            raise ValidationError("species list contains duplicates")
        index = set(self.species)
        mentioned = set()
        for rxn in self.reactions:
            rxn.validate()
            for name, _ in rxn.reactants + rxn.products:
                if name not in index:
                    raise ValidationError(f"reaction names unknown species {name!r}")
                mentioned.add(name)
        missing = index - mentioned
        if missing:
            raise ValidationError(f"species never used by any reaction: {sorted(missing)}")

    @cached_property
    def _matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """(reactant-order matrix [R, S], net stoichiometry [S, R])."""
        idx = {name: i for i, name in enumerate(self.species)}
        orders = np.zeros((len(self.reactions), len(self.species)))
        net = np.zeros((len(self.species), len(self.reactions)))
        for r, rxn in enumerate(self.reactions):
            for name, nu in rxn.reactants:
                orders[r, idx[name]] += nu
                net[idx[name], r] -= nu
            for name, nu in rxn.products:
                net[idx[name], r] += nu
        return orders, net


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9       # mol/L
    max_steps: int = 100_000
    gas_constant: float = GAS_CONSTANT

    def validate(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValidationError("integrator tolerances must be > 0")


def rate_constant(
    reaction: Reaction, temperature: float, gas_constant: float = GAS_CONSTANT
) -> float:
    """Arrhenius rate constant k = A * exp(-Ea / (R*T))."""
    if temperature <= 0:
        raise ValidationError(f"temperature must be > 0, got {temperature}")
    return reaction.pre_exponential * math.exp(
        -reaction.activation_energy / (gas_constant * temperature)
    )


def rate_constants(
    network: ReactionNetwork, temperature: float, gas_constant: float = GAS_CONSTANT
) -> np.ndarray:
    return np.array(
        [rate_constant(r, temperature, gas_constant) for r in network.reactions]
    )


def derivatives(
    network: ReactionNetwork, concentrations: np.ndarray, temperature: float
) -> np.ndarray:
    """Concentration time-derivatives for the network at one temperature."""
    y = np.asarray(concentrations, dtype=float)
    if y.shape != (len(network.species),):
        raise DimensionMismatch(
            f"expected {len(network.species)} concentrations, got shape {y.shape}"
        )
    ks = rate_constants(network, temperature)
    orders, net = network._matrices
    rates = ks * np.prod(np.maximum(y, 0.0)[None, :] ** orders, axis=1)
    return net @ rates


# ---------------------------------------------------------------------------
# Runge-Kutta-Fehlberg 4(5)

_RKF_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3554 / 2565, 1859 / 4104, -11 / 40),
)
_RKF_A_ROWS = tuple(np.array(row) for row in _RKF_A)
_RKF_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
_RKF_ERR = np.array([1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55])

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9

_STATUS_OK = 0
_STATUS_STEP_LIMIT = 1
_STATUS_UNDERFLOW = 2


def _solve_rkf45(rhs, y0: np.ndarray, dt: float, cfg: IntegratorConfig):
    """Advance y0 over [0, dt]; returns (y, steps_taken, min_excursion)."""
    y = y0.copy()
    t = 0.0
    min_seen = float(y.min()) if y.size else 0.0
    f0 = rhs(y)
    if not np.any(f0):
        return y, 0, min_seen

    scale0 = cfg.abs_tol + cfg.rel_tol * np.abs(y)
    d0 = float(np.max(np.abs(y) / scale0))
    d1 = float(np.max(np.abs(f0) / scale0))
    h = min(dt, 0.01 * max(d0, 1.0) / d1) if d1 > 0 else dt

    k = np.empty((6, y.size))
    steps = 0
    while t < dt:
        if steps >= cfg.max_steps:
            raise StepLimitExceeded(
                f"no convergence within {cfg.max_steps} adaptive steps"
            )
        h = min(h, dt - t)
        if h <= 1e-15 * max(dt, 1.0):
            raise StepLimitExceeded("step size underflow")
        k[0] = f0
        for stage in range(1, 6):
            acc = y + h * (_RKF_A_ROWS[stage] @ k[:stage])
            k[stage] = rhs(acc)
        y_new = y + h * (_RKF_B4 @ k)
        err = h * np.abs(_RKF_ERR @ k)
        tol = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.max(err / tol))
        steps += 1
        if err_norm <= 1.0:
            t += h
            y = y_new
            min_seen = min(min_seen, float(y.min()))
            np.maximum(y, 0.0, out=y)
            f0 = rhs(y)
        factor = _MAX_FACTOR if err_norm == 0.0 else _SAFETY * err_norm ** -0.2
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
    return y, steps, min_seen


try:  # compiled fast path; the numpy stepper above is the reference fallback
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None

if _numba is not None:

    @_numba.njit(cache=True)
    def _network_rhs_nb(y, ks, orders, net):
        n_rxn, n_sp = orders.shape
        rates = np.empty(n_rxn)
        for r in range(n_rxn):
            rate = ks[r]
            for s in range(n_sp):
                order = orders[r, s]
                if order != 0.0:
                    c = y[s]
                    if c < 0.0:
                        c = 0.0
                    if order == 1.0:
                        rate *= c
                    elif order == 2.0:
                        rate *= c * c
                    else:
                        rate *= c**order
            rates[r] = rate
        out = np.zeros(n_sp)
        for s in range(n_sp):
            acc = 0.0
            for r in range(n_rxn):
                coeff = net[s, r]
                if coeff != 0.0:
                    acc += coeff * rates[r]
            out[s] = acc
        return out

    @_numba.njit(cache=True)
    def _solve_rkf45_nb(y0, dt, ks, orders, net, rel_tol, abs_tol, max_steps):
        b4 = _RKF_B4
        err_w = _RKF_ERR
        n = y0.size
        y = y0.copy()
        t = 0.0
        min_seen = y.min() if n else 0.0
        f0 = _network_rhs_nb(y, ks, orders, net)
        active = False
        d0 = 0.0
        d1 = 0.0
        for i in range(n):
            scale = abs_tol + rel_tol * abs(y[i])
            w = abs(y[i]) / scale
            v = abs(f0[i]) / scale
            if v > 0.0:
                active = True
            if w > d0:
                d0 = w
            if v > d1:
                d1 = v
        if not active:
            return y, 0, min_seen, _STATUS_OK
        h = min(dt, 0.01 * max(d0, 1.0) / d1) if d1 > 0 else dt

        k = np.empty((6, n))
        yt = np.empty(n)
        steps = 0
        while t < dt:
            if steps >= max_steps:
                return y, steps, min_seen, _STATUS_STEP_LIMIT
            if h > dt - t:
                h = dt - t
            if h <= 1e-15 * max(dt, 1.0):
                return y, steps, min_seen, _STATUS_UNDERFLOW
            k[0] = f0
            # stage accumulations with the Fehlberg tableau
            for i in range(n):
                yt[i] = y[i] + h * 0.25 * k[0, i]
            k[1] = _network_rhs_nb(yt, ks, orders, net)
            for i in range(n):
                yt[i] = y[i] + h * (3.0 / 32.0 * k[0, i] + 9.0 / 32.0 * k[1, i])
            k[2] = _network_rhs_nb(yt, ks, orders, net)
            for i in range(n):
                yt[i] = y[i] + h * (
                    1932.0 / 2197.0 * k[0, i]
                    - 7200.0 / 2197.0 * k[1, i]
                    + 7296.0 / 2197.0 * k[2, i]
                )
            k[3] = _network_rhs_nb(yt, ks, orders, net)
            for i in range(n):
                yt[i] = y[i] + h * (
                    439.0 / 216.0 * k[0, i]
                    - 8.0 * k[1, i]
                    + 3680.0 / 513.0 * k[2, i]
                    - 845.0 / 4104.0 * k[3, i]
                )
            k[4] = _network_rhs_nb(yt, ks, orders, net)
            for i in range(n):
                yt[i] = y[i] + h * (
                    -8.0 / 27.0 * k[0, i]
                    + 2.0 * k[1, i]
                    - 3554.0 / 2565.0 * k[2, i]
                    + 1859.0 / 4104.0 * k[3, i]
                    - 11.0 / 40.0 * k[4, i]
                )
            k[5] = _network_rhs_nb(yt, ks, orders, net)

            err_norm = 0.0
            for i in range(n):
                y_new_i = y[i]
                err_i = 0.0
                for stage in range(6):
                    y_new_i += h * b4[stage] * k[stage, i]
                    err_i += err_w[stage] * k[stage, i]
                yt[i] = y_new_i
                tol = abs_tol + rel_tol * max(abs(y[i]), abs(y_new_i))
                v = abs(h * err_i) / tol
                if v > err_norm:
                    err_norm = v
            steps += 1
            if err_norm <= 1.0:
                t += h
                for i in range(n):
                    y[i] = yt[i]
                    if y[i] < min_seen:
                        min_seen = y[i]
                    if y[i] < 0.0:
                        y[i] = 0.0
                f0 = _network_rhs_nb(y, ks, orders, net)
            factor = _MAX_FACTOR if err_norm == 0.0 else _SAFETY * err_norm**-0.2
            if factor > _MAX_FACTOR:
                factor = _MAX_FACTOR
            elif factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h *= factor
        return y, steps, min_seen, _STATUS_OK


# ---------------------------------------------------------------------------
# vessel coupling


def _species_amount(vessel: Vessel, name: str) -> float:
    ions = vessel.registry.salt_ions.get(name)
    if ions:
        return min(vessel.dissolved_total(ion) for ion in ions)
    return vessel.dissolved_total(name)


def _apply_delta(vessel: Vessel, name: str, delta: float) -> None:
    ions = vessel.registry.salt_ions.get(name)
    targets = ions if ions else (name,)
    for target in targets:
        if delta >= 0.0:
            vessel.add_dissolved(target, delta)
        else:
            entry = vessel.solutes.get(target, {})
            have = sum(entry.values())
            if have <= 0.0:
                continue
            factor = max(have + delta, 0.0) / have
            for solvent in entry:
                entry[solvent] *= factor


def integrate(
    network: ReactionNetwork,
    vessel: Vessel,
    dt: float,
    cfg: IntegratorConfig | None = None,
    volume: float | None = None,
    stats: dict | None = None,
) -> Vessel:
    """Advance the vessel's dissolved inventory by dt time units.

    ``volume`` is the working solution volume in L (defaults to the vessel's
    liquid volume); concentrations are dissolved amounts over this volume and
    results are written back as dissolved amounts. Raises StepLimitExceeded
    when the adaptive integrator cannot cover dt within cfg.max_steps.
    """
    cfg = cfg or IntegratorConfig()
    cfg.validate()
    if dt < 0:
        raise ValidationError(f"dt must be >= 0, got {dt}")
    if dt == 0 or not network.reactions:
        return vessel
    if volume is None:
        volume = vessel.liquid_volume()
    if volume <= 0:
        return vessel

    y0 = np.array([_species_amount(vessel, s) for s in network.species]) / volume
    ks = rate_constants(network, vessel.temperature, cfg.gas_constant)
    orders, net = network._matrices

    if _numba is not None:
        y, steps, min_seen, status = _solve_rkf45_nb(
            y0, float(dt), ks, orders, net, cfg.rel_tol, cfg.abs_tol, cfg.max_steps
        )
        if status == _STATUS_STEP_LIMIT:
            raise StepLimitExceeded(
                f"no convergence within {cfg.max_steps} adaptive steps"
            )
        if status == _STATUS_UNDERFLOW:
            raise StepLimitExceeded("step size underflow")
    else:

        def rhs(y: np.ndarray) -> np.ndarray:
            rates = ks * np.prod(np.maximum(y, 0.0)[None, :] ** orders, axis=1)
            return net @ rates

        y, steps, min_seen = _solve_rkf45(rhs, y0, dt, cfg)
    if stats is not None:
        stats["steps"] = steps
        stats["min_concentration"] = min_seen

    for i, name in enumerate(network.species):
        delta = y[i] * volume - _species_amount(vessel, name)
        if delta != 0.0:
            _apply_delta(vessel, name, delta)
    vessel.clamp()
    return vessel


# ---------------------------------------------------------------------------
# reactions file


def load_network(source: IO[bytes] | bytes | str | Path) -> ReactionNetwork:
    """Load a reactions file (see data/wurtz.rxn for the format)."""
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    try:
        doc = yaml.safe_load(io.BytesIO(data))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            str(exc).replace("\n", " "),
            line=None if mark is None else mark.line + 1,
        ) from None
    if not isinstance(doc, dict):
        raise ParseError("reactions file must be a mapping at top level")
    if doc.get("format_version") != REACTIONS_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported reactions format_version {doc.get('format_version')!r}"
        )
    try:
        species = tuple(doc["species"])
        reactions = tuple(
            Reaction(
                reactants=tuple((str(k), v) for k, v in sorted(r["reactants"].items())),
                products=tuple((str(k), v) for k, v in sorted(r["products"].items())),
                pre_exponential=float(r["pre_exponential"]),
                activation_energy=float(r["activation_energy"]),
            )
            for r in doc["reactions"]
        )
        network = ReactionNetwork(str(doc["name"]), species, reactions)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed reactions file: {exc!r}") from None
    network.validate()
    return network


def network_path(name: str) -> Path:
    return Path(__file__).parent / "data" / f"{name}.rxn"


def load_shipped_network(name: str) -> ReactionNetwork:
    """Load one of the reaction files shipped with the package."""
    return load_network(network_path(name))

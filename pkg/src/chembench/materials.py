"""Immutable material definitions and the registry loader.

Every physical constant used by any equation in the engine lives in a
materials file (see ``data/materials.yaml`` for the shipped registry and the
format documentation). Registries are frozen after load and safe to share
across concurrently running environment instances.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import IO, Iterator

import yaml

from .errors import NotFound, ParseError, ValidationError

MATERIALS_FORMAT_VERSION = 1

PHASES = ("solid", "liquid", "gas")
ROLES = ("solvent", "solute", "reactant")

# numeric fields that must be strictly positive
_POSITIVE_FIELDS = (
    "molar_mass",
    "density",
    "heat_capacity_molar",
    "boiling_point",
    "enthalpy_vaporization",
    "solubility_limit",
)


@dataclass(frozen=True)
class Material:
    """Physical and spectral property record for one material.

    Units: molar_mass g/mol, density g/mL, heat_capacity_molar J/(mol*K),
    boiling_point K, enthalpy_vaporization J/mol, solubility_limit mol/L of
    solvent. Polarity is a dimensionless scalar >= 0; uv_peaks are
    (center nm, width nm, height) triples.
    """

    name: str
    molar_mass: float
    density: float
    polarity: float
    heat_capacity_molar: float
    boiling_point: float
    enthalpy_vaporization: float
    solubility_limit: float
    uv_peaks: tuple[tuple[float, float, float], ...] = ()
    phase_default: str = "liquid"
    roles: frozenset[str] = frozenset()
    dissociates_to: tuple[str, ...] = ()

    @property
    def molar_volume(self) -> float:
        """Liquid molar volume in L/mol."""
        return self.molar_mass / self.density / 1000.0

    def validate(self) -> None:
        for name in _POSITIVE_FIELDS:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValidationError(
                    f"material {self.name!r}: {name} must be > 0, got {value!r}"
                )
        if self.polarity < 0:
            raise ValidationError(f"material {self.name!r}: polarity must be >= 0")
        if self.phase_default not in PHASES:
            raise ValidationError(
                f"material {self.name!r}: unknown phase {self.phase_default!r}"
            )
        for role in self.roles:
            if role not in ROLES:
                raise ValidationError(f"material {self.name!r}: unknown role {role!r}")
        for peak in self.uv_peaks:
            center, width, height = peak
            if width <= 0 or height <= 0 or center <= 0:
                raise ValidationError(
                    f"material {self.name!r}: uv peak {peak!r} must be positive"
                )
        if len(self.dissociates_to) not in (0, 2):
            raise ValidationError(
                f"material {self.name!r}: dissociates_to must name an ion pair"
            )


class MaterialRegistry:
    """Name-indexed, frozen collection of materials."""

    def __init__(self, materials: dict[str, Material], source_name: str = "<memory>"):
        self._materials = MappingProxyType(dict(materials))
        self.source_name = source_name
        # salt -> ion pair and ion -> (salt, partner) cross references
        salt_ions = {}
        ion_salt = {}
        for mat in self._materials.values():
            if mat.dissociates_to:
                cation, anion = mat.dissociates_to
                salt_ions[mat.name] = (cation, anion)
                ion_salt[cation] = (mat.name, anion)
                ion_salt[anion] = (mat.name, cation)
        self.salt_ions = MappingProxyType(salt_ions)
        self.ion_salt = MappingProxyType(ion_salt)

    def __contains__(self, name: str) -> bool:
        return name in self._materials

    def __iter__(self) -> Iterator[str]:
        return iter(self._materials)

    def __len__(self) -> int:
        return len(self._materials)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._materials)

    def lookup(self, name: str) -> Material:
        """Return the material record for ``name`` or raise NotFound."""
        try:
            return self._materials[name]
        except KeyError:
            raise NotFound(f"unknown material {name!r}") from None

    __getitem__ = lookup

    def equivalents(self, name: str) -> dict[str, float]:
        """Materials counted as ``name`` in purity metrics.

        A dissociating salt counts itself and both of its ions (each with
        coefficient 1), so a fully dissolved, a fully precipitated or a mixed
        inventory of the salt all evaluate to purity 1 in a vessel containing
        nothing else.
        """
        coeffs = {name: 1.0}
        for ion in self.salt_ions.get(name, ()):
            coeffs[ion] = 1.0
        return coeffs

    def to_document(self) -> dict:
        """Serializable document equal to the one ``load_registry`` accepts."""
        mats = []
        for mat in self._materials.values():
            record = {
                "name": mat.name,
                "molar_mass": mat.molar_mass,
                "density": mat.density,
                "polarity": mat.polarity,
                "heat_capacity_molar": mat.heat_capacity_molar,
                "boiling_point": mat.boiling_point,
                "enthalpy_vaporization": mat.enthalpy_vaporization,
                "solubility_limit": mat.solubility_limit,
                "uv_peaks": [list(p) for p in mat.uv_peaks],
                "phase_default": mat.phase_default,
                "roles": sorted(mat.roles),
            }
            if mat.dissociates_to:
                record["dissociates_to"] = list(mat.dissociates_to)
            mats.append(record)
        return {"format_version": MATERIALS_FORMAT_VERSION, "materials": mats}


def _material_from_record(record: dict) -> Material:
    if not isinstance(record, dict) or "name" not in record:
        raise ValidationError(f"material record must be a mapping with a name: {record!r}")
    known = {
        "name", "molar_mass", "density", "polarity", "heat_capacity_molar",
        "boiling_point", "enthalpy_vaporization", "solubility_limit",
        "uv_peaks", "phase_default", "roles", "dissociates_to",
    }
    unknown = set(record) - known
    if unknown:
        raise ValidationError(
            f"material {record['name']!r}: unknown fields {sorted(unknown)}"
        )
    kwargs = dict(record)
    kwargs["uv_peaks"] = tuple(
        tuple(float(x) for x in peak) for peak in record.get("uv_peaks", ())
    )
    kwargs["roles"] = frozenset(record.get("roles", ()))
    kwargs["dissociates_to"] = tuple(record.get("dissociates_to", ()))
    try:
        material = Material(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"material {record['name']!r}: {exc}") from None
    material.validate()
    return material


def load_registry(source: IO[bytes] | bytes | str | Path) -> MaterialRegistry:
    """Load a materials file into a frozen registry.

    ``source`` may be a path, raw bytes, or a readable byte stream. Raises
    ParseError on malformed YAML (with a line locus) and ValidationError on
    non-positive constants, duplicate names or dangling ion references.
    """
    name = "<stream>"
    if isinstance(source, (str, Path)):
        name = str(source)
        data = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        name = getattr(source, "name", name)

    try:
        doc = yaml.safe_load(io.BytesIO(data))
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ParseError(str(exc).replace("\n", " "), line=line) from None

    if not isinstance(doc, dict):
        raise ParseError("materials file must be a mapping at top level")
    version = doc.get("format_version")
    if version != MATERIALS_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported materials format_version {version!r} "
            f"(expected {MATERIALS_FORMAT_VERSION})"
        )
    records = doc.get("materials")
    if not isinstance(records, list) or not records:
        raise ValidationError("materials file declares no materials")

    materials: dict[str, Material] = {}
    for record in records:
        material = _material_from_record(record)
        if material.name in materials:
            raise ValidationError(f"duplicate material name {material.name!r}")
        materials[material.name] = material

    for mat in materials.values():
        for ion in mat.dissociates_to:
            if ion not in materials:
                raise ValidationError(
                    f"material {mat.name!r} dissociates to undeclared {ion!r}"
                )
    return MaterialRegistry(materials, source_name=name)


def lookup(registry: MaterialRegistry, name: str) -> Material:
    """Functional alias for ``registry.lookup(name)``."""
    return registry.lookup(name)


def default_registry_path() -> Path:
    return Path(__file__).parent / "data" / "materials.yaml"


def load_default_registry() -> MaterialRegistry:
    """Load the registry shipped with the package."""
    return load_registry(default_registry_path())

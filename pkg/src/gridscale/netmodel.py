"""Multi-phase distribution network model and a synthetic radial generator.

The generator stands in for feeder libraries that cannot ship with the
repo: it grows random-attachment trees from a source bus, with a mixed
population of 1/2/3-phase buses, log-uniform per-unit branch impedances
and one constant-power load per non-source node. Networks round-trip
through a documented JSON format.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

PHASES = "abc"

# balanced positive-sequence source voltages, 1 pu magnitude
_SOURCE_DEFAULT = {
    "a": cmath.rect(1.0, 0.0),
    "b": cmath.rect(1.0, -2.0 * math.pi / 3.0),
    "c": cmath.rect(1.0, 2.0 * math.pi / 3.0),
}


class NetworkError(ValueError):
    pass


class LoadKind(Enum):
    ConstantPower = "constant_power"
    ConstantImpedance = "constant_impedance"


def canonical_phases(phases) -> tuple[str, ...]:
    got = set(phases)
    bad = got - set(PHASES)
    if bad or not got:
        raise NetworkError(f"invalid phase set: {phases!r}")
    return tuple(p for p in PHASES if p in got)


@dataclass(frozen=True)
class Bus:
    id: str
    phases: tuple[str, ...]
    nominal_kv: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "phases", canonical_phases(self.phases))


@dataclass
class Branch:
    """Series element between two buses.

    ``primitive_y`` is the 2q x 2q two-port admittance block
    [[Ys + sh, -Ys], [-Ys, Ys + sh]] in siemens (per unit), with phase
    order matching ``phases``.
    """

    from_bus: str
    to_bus: str
    phases: tuple[str, ...]
    primitive_y: np.ndarray

    def __post_init__(self):
        self.phases = canonical_phases(self.phases)
        y = np.asarray(self.primitive_y, dtype=np.complex128)
        q = len(self.phases)
        if y.shape != (2 * q, 2 * q):
            raise NetworkError(
                f"branch {self.from_bus}-{self.to_bus}: primitive_y must be "
                f"{2 * q}x{2 * q}, got {y.shape}"
            )
        if not np.allclose(y, y.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(y).max())):
            raise NetworkError(
                f"branch {self.from_bus}-{self.to_bus}: primitive_y not symmetric"
            )
        self.primitive_y = y

    def __eq__(self, other):
        return (isinstance(other, Branch)
                and self.from_bus == other.from_bus
                and self.to_bus == other.to_bus
                and self.phases == other.phases
                and np.array_equal(self.primitive_y, other.primitive_y))


@dataclass(frozen=True)
class Load:
    bus: str
    phase: str
    kind: LoadKind
    s_nominal: complex        # kVA at nominal voltage
    connection: str = "wye"

    def __post_init__(self):
        if self.phase not in PHASES:
            raise NetworkError(f"invalid load phase {self.phase!r}")
        if self.connection != "wye":
            raise NetworkError("only wye-connected loads are modeled")
        if not (math.isfinite(self.s_nominal.real)
                and math.isfinite(self.s_nominal.imag)):
            raise NetworkError("load power must be finite")


@dataclass(frozen=True)
class SourceSpec:
    bus: str
    voltage_per_phase: dict = field(default_factory=dict)

    def voltage(self, phase: str) -> complex:
        v = self.voltage_per_phase.get(phase, _SOURCE_DEFAULT[phase])
        if v == 0:
            raise NetworkError(f"source voltage on phase {phase} is zero")
        return complex(v)


class Network:
    """Immutable bus/branch/load model with a designated source bus.

    Node ordinals (one per bus-phase pair) put every load node first and
    the source bus's nodes last; power-flow partitions rely on that.
    """

    def __init__(self, buses, branches, loads, source, radial=True,
                 s_base_kva=100.0):
        self.buses: list[Bus] = list(buses)
        self.branches: list[Branch] = list(branches)
        self.loads: list[Load] = list(loads)
        self.source: SourceSpec = source
        self.radial = bool(radial)
        self.s_base_kva = float(s_base_kva)
        if self.s_base_kva <= 0:
            raise NetworkError("s_base_kva must be positive")
        self._bus_map = {}
        for b in self.buses:
            if b.id in self._bus_map:
                raise NetworkError(f"duplicate bus id {b.id!r}")
            self._bus_map[b.id] = b
        if source.bus not in self._bus_map:
            raise NetworkError(f"source references undeclared bus {source.bus!r}")
        self._validate_branches()
        self._validate_loads()
        self._check_connectivity()
        self.node_index: dict[tuple[str, str], int] = {}
        self.node_labels: list[tuple[str, str]] = []
        for b in self.buses:
            if b.id == source.bus:
                continue
            for p in b.phases:
                self.node_index[(b.id, p)] = len(self.node_labels)
                self.node_labels.append((b.id, p))
        self.n_load_nodes = len(self.node_labels)
        src = self._bus_map[source.bus]
        for p in src.phases:
            self.node_index[(src.id, p)] = len(self.node_labels)
            self.node_labels.append((src.id, p))
        self.n_nodes = len(self.node_labels)

    def bus(self, bus_id: str) -> Bus:
        try:
            return self._bus_map[bus_id]
        except KeyError:
            raise NetworkError(f"unknown bus id {bus_id!r}") from None

    @property
    def m(self) -> int:
        return len(self.buses)

    def _validate_branches(self):
        for k, br in enumerate(self.branches):
            for end in (br.from_bus, br.to_bus):
                if end not in self._bus_map:
                    raise NetworkError(
                        f"branches[{k}]: undeclared bus {end!r}"
                    )
            for end in (br.from_bus, br.to_bus):
                missing = set(br.phases) - set(self._bus_map[end].phases)
                if missing:
                    raise NetworkError(
                        f"branches[{k}]: phase(s) {sorted(missing)} absent at "
                        f"bus {end!r}"
                    )

    def _validate_loads(self):
        for k, ld in enumerate(self.loads):
            if ld.bus not in self._bus_map:
                raise NetworkError(f"loads[{k}]: undeclared bus {ld.bus!r}")
            if ld.bus == self.source.bus:
                raise NetworkError(f"loads[{k}]: load on source bus {ld.bus!r}")
            if ld.phase not in self._bus_map[ld.bus].phases:
                raise NetworkError(
                    f"loads[{k}]: phase {ld.phase!r} absent at bus {ld.bus!r}"
                )

    def _check_connectivity(self):
        ids = {b.id: i for i, b in enumerate(self.buses)}
        parent = list(range(len(self.buses)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        merged = 0
        for br in self.branches:
            a, b = find(ids[br.from_bus]), find(ids[br.to_bus])
            if a != b:
                parent[a] = b
                merged += 1
        if merged != len(self.buses) - 1:
            raise NetworkError("branch graph is not connected")
        if self.radial and len(self.branches) != len(self.buses) - 1:
            raise NetworkError(
                f"radial network must have m-1 branches "
                f"(m={len(self.buses)}, branches={len(self.branches)})"
            )

    def __eq__(self, other):
        return (isinstance(other, Network)
                and self.buses == other.buses
                and self.branches == other.branches
                and self.loads == other.loads
                and self.source.bus == other.source.bus
                and {p: complex(v) for p, v in self.source.voltage_per_phase.items()}
                == {p: complex(v) for p, v in other.source.voltage_per_phase.items()}
                and self.radial == other.radial
                and self.s_base_kva == other.s_base_kva)


# ---------------------------------------------------------------------------
# synthetic radial generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """Knobs for the synthetic radial feeder generator.

    ``phase_mix`` gives the population fractions of 1/2/3-phase buses.
    Mixes whose phase-weighted mean sum(f q^2)/sum(f q) lies in about
    [1.4, 3.0] keep the equivalent per-branch phase count of the
    assembled admittance matrix inside [1.35, 3.00]; the default does.
    ``load_density`` scales each node's constant-power load as a fraction
    of a 10 kVA base (0.6 matches the 60% step-change baseline).
    """

    m: int
    phase_mix: tuple[float, float, float] = (0.50, 0.15, 0.35)
    seed: int = 0
    z_min_pu: float = 0.01
    z_max_pu: float = 0.1
    load_density: float = 0.6
    power_factor: float = 0.95


_LOAD_BASE_KVA = 10.0


def generate_radial(spec: GeneratorSpec) -> Network:
    """Grow a random-attachment radial feeder; deterministic under seed.

    Each new bus attaches to a uniformly chosen existing bus whose phase
    set covers its own, which keeps the multi-phase trunk connected back
    to the source.
    """
    if spec.m < 2:
        raise NetworkError("generator needs m >= 2 buses")
    mix = np.asarray(spec.phase_mix, dtype=float)
    if mix.shape != (3,) or (mix < 0).any() or abs(mix.sum() - 1.0) > 1e-9:
        raise NetworkError(
            f"infeasible phase_mix {spec.phase_mix!r}: fractions of 1/2/3-phase "
            "buses must be nonnegative and sum to 1"
        )
    if not (0 < spec.z_min_pu <= spec.z_max_pu):
        raise NetworkError("impedance profile requires 0 < z_min <= z_max")
    rng = np.random.default_rng(spec.seed)
    q_source = max(q for q in (1, 2, 3) if mix[q - 1] > 0)
    source_phases = tuple(PHASES[:q_source])
    subsets_by_q = {
        q: [tuple(source_phases[i] for i in combo)
            for combo in _combinations(q_source, q)]
        for q in range(1, q_source + 1)
    }

    buses = [Bus("bus0", source_phases)]
    phase_sets: list[tuple[str, ...]] = [source_phases]
    # parent candidates grouped by phase set for O(1) coverage lookups
    group_of: dict[tuple[str, ...], list[int]] = {source_phases: [0]}
    branches: list[Branch] = []
    loads: list[Load] = []
    sin_phi = math.sqrt(1.0 - spec.power_factor ** 2)
    s_load = spec.load_density * _LOAD_BASE_KVA * complex(spec.power_factor, sin_phi)

    for b in range(1, spec.m):
        q = int(rng.choice(3, p=mix)) + 1
        q = min(q, q_source)
        options = subsets_by_q[q]
        phases = options[int(rng.integers(len(options)))] if len(options) > 1 \
            else options[0]
        covering = [g for g in group_of if set(g) >= set(phases)]
        total = sum(len(group_of[g]) for g in covering)
        pick = int(rng.integers(total))
        for g in covering:
            if pick < len(group_of[g]):
                parent = group_of[g][pick]
                break
            pick -= len(group_of[g])
        bus_id = f"bus{b}"
        buses.append(Bus(bus_id, phases))
        phase_sets.append(phases)
        group_of.setdefault(phases, []).append(b)
        zmag = math.exp(rng.uniform(math.log(spec.z_min_pu),
                                    math.log(spec.z_max_pu)))
        branches.append(Branch(
            buses[parent].id, bus_id, phases,
            branch_primitive(zmag, len(phases)),
        ))
        for p in phases:
            loads.append(Load(bus_id, p, LoadKind.ConstantPower, s_load))

    n_load_nodes = sum(len(ps) for ps in phase_sets[1:])
    return Network(
        buses, branches, loads, SourceSpec("bus0"),
        radial=True,
        s_base_kva=_LOAD_BASE_KVA * max(n_load_nodes, 1),
    )


def _combinations(n, k):
    def rec(start, chosen):
        if len(chosen) == k:
            yield tuple(chosen)
            return
        for i in range(start, n):
            yield from rec(i + 1, chosen + [i])
    return list(rec(0, []))


def branch_primitive(z_self_mag: float, q: int, mutual_ratio: float = 0.3,
                     shunt: complex = 0.0) -> np.ndarray:
    """Two-port admittance block for a series element of q phases.

    X/R is 2 for multi-phase elements and 1 for single-phase ones; the
    mutual impedance is 0.3 of self for multi-phase elements. The
    resulting q x q series admittance is fully dense for q >= 2.
    """
    xr = 2.0 if q >= 2 else 1.0
    r = z_self_mag / math.sqrt(1.0 + xr * xr)
    z_self = complex(r, xr * r)
    z = np.full((q, q), mutual_ratio * z_self, dtype=np.complex128)
    np.fill_diagonal(z, z_self)
    ys = np.linalg.inv(z)
    ys = (ys + ys.T) / 2.0  # exact entrywise symmetry
    prim = np.empty((2 * q, 2 * q), dtype=np.complex128)
    prim[:q, :q] = ys + shunt * np.eye(q)
    prim[q:, q:] = ys + shunt * np.eye(q)
    prim[:q, q:] = -ys
    prim[q:, :q] = -ys
    return prim


def scale_loads(net: Network, factor: float) -> Network:
    """New network with every load's nominal power multiplied by factor."""
    if factor < 0:
        raise NetworkError("load scale factor must be nonnegative")
    loads = [replace(ld, s_nominal=ld.s_nominal * factor) for ld in net.loads]
    return Network(net.buses, net.branches, loads, net.source,
                   radial=net.radial, s_base_kva=net.s_base_kva)


# ---------------------------------------------------------------------------
# JSON persistence (schema shipped as network.schema.json)
# ---------------------------------------------------------------------------

def _c2j(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _j2c(v, where: str) -> complex:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(t, (int, float)) for t in v)):
        raise NetworkError(f"{where}: complex values must be [re, im] pairs")
    return complex(v[0], v[1])


def network_to_dict(net: Network) -> dict:
    return {
        "radial": net.radial,
        "s_base_kva": net.s_base_kva,
        "buses": [
            {"id": b.id, "phases": "".join(b.phases), "nominal_kv": b.nominal_kv}
            for b in net.buses
        ],
        "branches": [
            {
                "from": br.from_bus,
                "to": br.to_bus,
                "phases": "".join(br.phases),
                "primitive_y": [[_c2j(v) for v in row] for row in br.primitive_y],
            }
            for br in net.branches
        ],
        "loads": [
            {
                "bus": ld.bus,
                "phase": ld.phase,
                "kind": ld.kind.value,
                "s_nominal": _c2j(ld.s_nominal),
                "connection": ld.connection,
            }
            for ld in net.loads
        ],
        "source": {
            "bus": net.source.bus,
            "voltage_per_phase": {
                p: _c2j(v) for p, v in sorted(net.source.voltage_per_phase.items())
            },
        },
    }


def network_from_dict(doc: dict) -> Network:
    for key in ("buses", "branches", "loads", "source"):
        if key not in doc:
            raise NetworkError(f"missing top-level key {key!r}")
    buses = []
    for i, b in enumerate(doc["buses"]):
        where = f"buses[{i}]"
        if "id" not in b or "phases" not in b:
            raise NetworkError(f"{where}: needs 'id' and 'phases'")
        buses.append(Bus(str(b["id"]), tuple(b["phases"]),
                         float(b.get("nominal_kv", 1.0))))
    branches = []
    for i, br in enumerate(doc["branches"]):
        where = f"branches[{i}]"
        for key in ("from", "to", "phases", "primitive_y"):
            if key not in br:
                raise NetworkError(f"{where}: missing field {key!r}")
        prim = np.array(
            [[_j2c(v, f"{where}.primitive_y") for v in row]
             for row in br["primitive_y"]],
            dtype=np.complex128,
        )
        branches.append(Branch(str(br["from"]), str(br["to"]),
                               tuple(br["phases"]), prim))
    loads = []
    for i, ld in enumerate(doc["loads"]):
        where = f"loads[{i}]"
        for key in ("bus", "phase", "kind", "s_nominal"):
            if key not in ld:
                raise NetworkError(f"{where}: missing field {key!r}")
        try:
            kind = LoadKind(ld["kind"])
        except ValueError:
            raise NetworkError(f"{where}: unknown load kind {ld['kind']!r}") from None
        loads.append(Load(str(ld["bus"]), str(ld["phase"]), kind,
                          _j2c(ld["s_nominal"], where),
                          str(ld.get("connection", "wye"))))
    src = doc["source"]
    if "bus" not in src:
        raise NetworkError("source: missing field 'bus'")
    vpp = {p: _j2c(v, "source.voltage_per_phase")
           for p, v in src.get("voltage_per_phase", {}).items()}
    return Network(buses, branches, loads, SourceSpec(str(src["bus"]), vpp),
                   radial=bool(doc.get("radial", True)),
                   s_base_kva=float(doc.get("s_base_kva", 100.0)))


def save_network(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(net), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}: invalid JSON at line {exc.lineno}") from exc
    if not isinstance(doc, dict):
        raise NetworkError(f"{path}: document must be a JSON object")
    return network_from_dict(doc)

import numpy as np
import pytest

from gridscale.netmodel import (
    Branch,
    Bus,
    GeneratorSpec,
    Load,
    LoadKind,
    Network,
    SourceSpec,
    branch_primitive,
    generate_radial,
)


def single_phase_branch(y: complex) -> np.ndarray:
    return np.array([[y, -y], [-y, y]], dtype=np.complex128)


def two_bus_network(y=10.0 - 20.0j, load_s=None, kind=LoadKind.ConstantPower,
                    s_base=1.0):
    """One single-phase branch from a source to one load bus; powers in
    kVA with s_base_kva chosen so the pu numbers equal the inputs."""
    buses = [Bus("src", ("a",)), Bus("b1", ("a",))]
    branches = [Branch("src", "b1", ("a",), single_phase_branch(y))]
    loads = []
    if load_s is not None:
        loads.append(Load("b1", "a", kind, load_s * s_base))
    return Network(buses, branches, loads, SourceSpec("src"),
                   radial=True, s_base_kva=s_base)


def uniform_radial(q: int, m: int, seed: int = 0) -> Network:
    """Radial network with every bus carrying exactly q phases."""
    mix = [0.0, 0.0, 0.0]
    mix[q - 1] = 1.0
    return generate_radial(GeneratorSpec(m=m, phase_mix=tuple(mix), seed=seed))


def ieee34_sized_network(seed: int = 34) -> Network:
    """Deterministic mixed-phase feeder with the same node and entry
    counts as the IEEE 34-bus test feeder's admittance matrix:
    n = 104, nnz = 804 (25 three-phase, 10 two-phase, 9 one-phase buses)."""
    rng = np.random.default_rng(seed)
    buses = [Bus("t0", ("a", "b", "c"))]
    branches = []
    loads = []

    def zmag():
        return float(np.exp(rng.uniform(np.log(0.01), np.log(0.1))))

    for i in range(1, 25):
        buses.append(Bus(f"t{i}", ("a", "b", "c")))
        branches.append(Branch(f"t{i-1}", f"t{i}", ("a", "b", "c"),
                               branch_primitive(zmag(), 3)))
    two_phase_sets = [("a", "b"), ("b", "c"), ("a", "c")]
    for i in range(10):
        phases = two_phase_sets[i % 3]
        parent = f"t{(i * 2) % 25}"
        buses.append(Bus(f"d{i}", phases))
        branches.append(Branch(parent, f"d{i}", phases,
                               branch_primitive(zmag(), 2)))
    for i in range(9):
        phase = ("a", "b", "c")[i % 3]
        parent = f"t{(i * 3 + 1) % 25}"
        buses.append(Bus(f"s{i}", (phase,)))
        branches.append(Branch(parent, f"s{i}", (phase,),
                               branch_primitive(zmag(), 1)))
    s = 6.0 * complex(0.95, np.sqrt(1 - 0.95**2))
    for b in buses[1:]:
        for p in b.phases:
            loads.append(Load(b.id, p, LoadKind.ConstantPower, s))
    n_load = sum(len(b.phases) for b in buses[1:])
    return Network(buses, branches, loads, SourceSpec("t0"),
                   radial=True, s_base_kva=10.0 * n_load)


@pytest.fixture
def two_bus():
    return two_bus_network(load_s=0.5 + 0.1j)


@pytest.fixture
def ieee34_sized():
    return ieee34_sized_network()

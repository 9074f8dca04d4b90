"""Shared builders for the test suite."""

import numpy as np

import spinchannel as sc


def two_site_model(J: float) -> sc.CouplingModel:
    """A bare two-site chain with coupling J (exactly solvable)."""
    return sc.CouplingModel.custom(np.array([[0.0, J], [J, 0.0]]))


def dh_geometry(n_spins: int) -> sc.ChainGeometry:
    """Double-hole layout with n_spins occupied sites, ends as sender/receiver."""
    return sc.build_chain_geometry(n_spins + 2, 1, n_spins + 2, double_hole=True)


def geometry_matrix() -> list[tuple[str, sc.ChainGeometry, sc.CouplingModel]]:
    """The standing test matrix: complete, double-hole, and mirror chains."""
    dipolar = sc.CouplingModel.power_law()
    cases = []
    for n in (2, 3, 6, 10):
        cases.append((f"complete{n}", sc.build_chain_geometry(n), dipolar))
    for n in (4, 6, 10):
        cases.append((f"dh{n}", dh_geometry(n), dipolar))
    cases.append(("mirror10", sc.build_chain_geometry(10), sc.CouplingModel.mirror_periodic(lam=2.0)))
    return cases


def random_symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    raw = rng.normal(size=(n, n))
    return 0.5 * (raw + raw.T)


def random_couplings(n: int, rng: np.random.Generator) -> sc.CouplingMatrix:
    entries = np.abs(random_symmetric(n, rng)) + 0.1
    entries = 0.5 * (entries + entries.T)
    np.fill_diagonal(entries, 0.0)
    return sc.CouplingMatrix(entries)

"""Regenerate the committed FCIDUMP fixtures and their JSON sidecars.

Requires pyscf, which is NOT a runtime dependency of clustervqe. The output
files are committed under src/clustervqe/data/ so the package never calls
an SCF code itself.

    python tools/make_fixtures.py
"""
import json
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, mcscf, scf
from pyscf.tools import fcidump

DATA = Path(__file__).resolve().parents[1] / "src" / "clustervqe" / "data"

# name, atoms, bond length (angstrom), frozen spatial orbitals, dropped virtuals
SYSTEMS = [
    ("h2_0.735", "H 0 0 0; H 0 0 {r}", 0.735, 0, 0),
    ("lih_1.547", "Li 0 0 0; H 0 0 {r}", 1.547, 1, 0),
    ("lih_2.4", "Li 0 0 0; H 0 0 {r}", 2.4, 1, 0),
    ("n2_1.09", "N 0 0 0; N 0 0 {r}", 1.09, 2, 1),
    ("n2_1.6", "N 0 0 0; N 0 0 {r}", 1.6, 2, 1),
]


def build(name, atoms, r, n_frozen, n_dropped):
    mol = gto.M(atom=atoms.format(r=r), basis="sto-3g", unit="angstrom",
                symmetry=False, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    nmo = mf.mo_coeff.shape[1]
    ncas = nmo - n_frozen - n_dropped
    nelecas = mol.nelectron - 2 * n_frozen
    cas = mcscf.CASCI(mf, ncas, nelecas)
    cas.fcisolver.conv_tol = 1e-13
    h1, ecore = cas.get_h1eff()
    h2 = ao2mo.restore(1, cas.get_h2eff(), ncas)
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-13
    e_fci = solver.kernel(h1, h2, ncas, nelecas, ecore=ecore)[0]
    path = DATA / f"{name}.fcidump"
    fcidump.from_integrals(str(path), h1, h2, ncas, nelecas, nuc=ecore, ms=0)
    meta = {
        "molecule": name.split("_")[0].upper(),
        "basis": "sto-3g",
        "bond_length_angstrom": r,
        "n_spatial": ncas,
        "n_electrons": nelecas,
        "n_qubits": 2 * ncas,
        "frozen_core_orbitals": list(range(n_frozen)),
        "dropped_virtual_orbitals": list(range(nmo - n_dropped, nmo)),
        "frozen_note": (f"lowest {n_frozen} spatial orbital(s) frozen doubly occupied"
                        + (f", highest {n_dropped} virtual(s) removed" if n_dropped else "")),
        "hf_energy": float(mf.e_tot),
        "fci_energy": float(e_fci),
        "generator": "pyscf RHF + CASCI active-space integrals",
    }
    (DATA / f"{name}.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"{name}: n_qubits={2 * ncas} E_HF={mf.e_tot:.10f} E_FCI={e_fci:.10f}")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    np.set_printoptions(precision=12)
    for system in SYSTEMS:
        build(*system)

"""Regenerate the FCIDUMP fixtures and their reference energies.

Run from the repository root:  python3 fixtures/generate.py

Writes full-MO-space FCIDUMP files (frozen-core folding and active-space
selection happen at ingestion) plus a manifest per molecule with the
active-space CASCI/FCI energy computed by pyscf as an external reference.
"""
import os
import numpy as np
from pyscf import gto, scf, mcscf, tools

HERE = os.path.dirname(os.path.abspath(__file__))


def lih(r):
    return gto.M(atom=f"Li 0 0 0; H 0 0 {r}", basis="sto-6g", symmetry=True, verbose=0)


def h2o(r, angle=104.5):
    half = np.deg2rad(angle / 2)
    y, z = r * np.sin(half), r * np.cos(half)
    return gto.M(
        atom=f"O 0 0 0; H 0 {y} {z}; H 0 {-y} {z}",
        basis="sto-6g",
        symmetry=True,
        verbose=0,
    )


def run(name, build, grid, n_frozen, active_irreps, ncas_elec):
    out = os.path.join(HERE, name)
    os.makedirs(out, exist_ok=True)
    lines = [
        f"# {name} STO-6G fixtures generated with pyscf",
        f"# columns: R file e_fci_active e_hf",
    ]
    dm = None
    for r in grid:
        mol = build(r)
        mf = scf.RHF(mol)
        mf.conv_tol = 1e-12
        mf.max_cycle = 500
        # Follow the same RHF branch along the curve.
        mf.kernel(dm0=dm)
        mo1 = mf.stability()[0]
        if mo1 is not mf.mo_coeff:
            mf.kernel(dm0=mf.make_rdm1(mo1, mf.mo_occ))
        assert mf.converged, (name, r)
        dm = mf.make_rdm1()
        fname = f"R{r:.3f}.FCIDUMP"
        tools.fcidump.from_scf(mf, os.path.join(out, fname), tol=1e-14, molpro_orbsym=True)
        orbsym = mf.get_orbsym()
        irrep_ids = [int(s) for s in orbsym]
        frozen = list(range(n_frozen))
        active = [
            i
            for i in range(len(irrep_ids))
            if i >= n_frozen and (active_irreps is None or irrep_ids[i] in active_irreps)
        ]
        cas = mcscf.CASCI(mf, len(active), ncas_elec)
        cas.fcisolver.conv_tol = 1e-14
        mo = cas.sort_mo([i + 1 for i in active])
        cas.fcisolver.wfnsym = 0
        e_cas = cas.kernel(mo)[0]
        lines.append(f"{r:.3f} {fname} {e_cas:.12f} {mf.e_tot:.12f}")
        print(name, r, e_cas, len(active))
    with open(os.path.join(out, "manifest.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    lih_grid = sorted([round(0.9 + 0.2 * k, 3) for k in range(23)] + [1.6])
    # Li 1s frozen; sigma (A1) orbitals active; 2 active electrons.
    run("lih", lih, lih_grid, 1, [0], 2)
    h2o_grid = [round(0.7 + 0.1 * k, 3) for k in range(27)]
    # O 1s and 2s frozen; remaining five valence orbitals active.
    run("h2o", h2o, h2o_grid, 2, None, 6)

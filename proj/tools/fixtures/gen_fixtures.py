#!/usr/bin/env python3
"""Generate classical cusp-form fixtures with PARI/GP (via cypari2).

Each MFB file holds a Z_(p)-basis of S_k(Gamma_0(N), chi) with integral
q-expansions, reduced mod p^prec.  The lattice spanned by PARI's rational
basis is p-saturated first: while the rows are dependent mod p, a dependency
is divided by p.  Dependencies are detected on the first sturm+1
coefficients, which is enough by Sturm's bound.

Usage: gen_fixtures.py OUTDIR
"""

import sys
from pathlib import Path

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)
pari.set_real_precision(38)


def write_mfq_line(coeffs, modulus):
    return "coeffs: " + " ".join(str(int(c) % modulus) for c in coeffs)


def saturated_rows(N, k, chi, M, p):
    mf = pari.mfinit([N, k, chi], 1)
    d = int(pari.mfdim(mf))
    sturm = int(pari.mfsturm(mf))
    if d == 0:
        return [], d, sturm
    A = pari.mfcoefs(mf, M)  # (M+1) x d, columns are forms
    den = pari.denominator(A)
    A = A * den
    rows = [[int(A[i, j]) for i in range(M + 1)] for j in range(d)]
    T = sturm + 1
    while True:
        # remove p-power contents
        for r in rows:
            while all(c % p == 0 for c in r):
                for i in range(len(r)):
                    r[i] //= p
        head = pari.matrix(d, T, [Mod for r in rows for Mod in r[:T]])
        ker = pari.matker(pari.Mod(1, p) * pari.mattranspose(head))
        if len(ker) == 0:
            break
        v = [int(pari.lift(ker[0][i])) for i in range(d)]
        j = max(i for i in range(d) if v[i] % p != 0)
        inv = pow(v[j], -1, p)
        v = [(x * inv) % p for x in v]
        combo = [sum(v[i] * rows[i][n] for i in range(d)) for n in range(M + 1)]
        assert all(c % p == 0 for c in combo)
        rows[j] = [c // p for c in combo]
    return rows, d, sturm


def write_basis(path, N, k, chispec, chi, M, p, prec):
    rows, d, sturm = saturated_rows(N, k, chi, M, p)
    mod = p**prec
    with open(path, "w") as fh:
        fh.write("MFB 1\n")
        fh.write(f"p={p} prec={prec} qprec={M}\n")
        fh.write(f"level={N} weight={k} char={chispec}\n")
        fh.write(f"dim={d}\n")
        fh.write(f"sturm={sturm}\n")
        fh.write(f"rows={len(rows)}\n")
        for r in rows:
            fh.write(write_mfq_line(r, mod) + "\n")
    print(f"{path}: dim={d} sturm={sturm}", flush=True)


def write_newform(path, N, k, chi, chispec, M, p, prec):
    mf = pari.mfinit([N, k, chi], 0)
    forms = pari.mfeigenbasis(mf)
    f = forms[0]
    coeffs = pari.mfcoefs(f, M)
    mod = p**prec
    with open(path, "w") as fh:
        fh.write("MFQ 1\n")
        fh.write(f"p={p} prec={prec} qprec={M}\n")
        fh.write(f"level={N} weight={k} char={chispec}\n")
        fh.write(write_mfq_line([int(c) for c in coeffs], mod) + "\n")
    print(f"{path}: newform", flush=True)


def main():
    out = Path(sys.argv[1])
    # tame level 11, p = 5: weights 2 and 6 families, depth up to 8
    d11 = out / "level11_p5"
    d11.mkdir(parents=True, exist_ok=True)
    for k in range(2, 39, 4):
        write_basis(d11 / f"S{k}.mfb", 11, k, "trivial", 1, 250, 5, 4)
    write_newform(d11 / "newform_k2.mfq", 11, 2, 1, "trivial", 250, 5, 4)

    # tame level 23, chi = (-23/.), p = 13: weights 1 and 13
    d23 = out / "level23_p13"
    d23.mkdir(parents=True, exist_ok=True)
    chi = pari("Mod(22,23)")
    for k in range(1, 74, 12):
        write_basis(d23 / f"S{k}.mfb", 23, k, "kronecker:-23", chi, 2100, 13, 3)


if __name__ == "__main__":
    main()

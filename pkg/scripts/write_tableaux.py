"""Write the coefficient files in src/cweno_nonlocal/data/.

SSPRK(5,4) is the Spiteri-Ruuth five-stage method (Butcher form, 30-digit
values).  RK7 and the two-step methods come from the .npz files produced by
derive_rk7.py and derive_tsrk.py (kept in scripts/coeffs/).

    cd scripts && python write_tableaux.py --rk7 coeffs/rk7.npz --tsrk5 coeffs/tsrk5.npz --tsrk7 coeffs/tsrk7.npz
"""
import argparse
import hashlib
from pathlib import Path

import numpy as np

import bseries as bs

DATA = Path(__file__).resolve().parents[1] / "src" / "cweno_nonlocal" / "data"

SSPRK54_A = {
    (2, 1): "0.391752226869253785640632115627",
    (3, 1): "0.217669096357834985920253802915",
    (3, 2): "0.368410592709066783214662112772",
    (4, 1): "0.0826920866830935842609242437786",
    (4, 2): "0.139958502107426395108400626025",
    (4, 3): "0.251891774371960822884363746140",
    (5, 1): "0.0679662835740483884329695316049",
    (5, 2): "0.115034698453668419467815057942",
    (5, 3): "0.207034898772936576352392025561",
    (5, 4): "0.544974750295139481064416383368",
}
SSPRK54_B = ["0.146811876157875933686947006683", "0.248482909391317264243714136087",
             "0.104258830279481225354037031167", "0.274438901048480694917546480567",
             "0.226007483122844881797755345495"]


def write(name, header, lines):
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    head = [f"# {k}: {v}" for k, v in header.items()] + [f"# sha256: {digest}"]
    (DATA / f"{name}.tab").write_text("\n".join(head + lines) + "\n")
    print("wrote", name, digest[:12])


def rk_lines(A, b):
    s = len(b)
    lines = [f"A {i + 1} {j + 1} {float(A[i, j])!r}" for i in range(s) for j in range(i) if A[i, j] != 0.0]
    lines += [f"b {i + 1} {float(b[i])!r}" for i in range(s)]
    return lines


def ssprk54():
    lines = [f"A {i} {j} {v}" for (i, j), v in SSPRK54_A.items()]
    lines += [f"b {i + 1} {v}" for i, v in enumerate(SSPRK54_B)]
    A = np.zeros((5, 5))
    for (i, j), v in SSPRK54_A.items():
        A[i - 1, j - 1] = float(v)
    b = np.array([float(v) for v in SSPRK54_B])
    res = np.abs(bs.rk_residuals(A, b, 4)).max()
    write("ssprk54", {"method": "SSPRK(5,4), Spiteri-Ruuth five-stage fourth-order",
                      "stages": 5, "order": 4, "ssp_coefficient": "1.508",
                      "order_residual": f"{res:.1e}"}, lines)


def rk7(path):
    z = np.load(path)
    A, b = z["A"], z["b"]
    res = np.abs(bs.rk_residuals(A, b, 7)).max()
    write("rk7", {"method": "nine-stage seventh-order explicit Runge-Kutta",
                  "stages": 9, "order": 7, "order_residual": f"{res:.1e}"}, rk_lines(A, b))


def tsrk(name, path, order):
    z = np.load(path)
    s = len(z["b"])
    e = z["e"] if "e" in z else np.zeros(s)
    eps = float(z["eps"]) if "eps" in z else 0.0
    res = np.abs(bs.tsrk_residuals(z["d"], float(z["theta"]), z["ahat"], z["A"], float(z["bhat"]), z["b"],
                                   order, e=e, eps=eps)).max()
    d1 = float(z["d"][0])
    lines = [f"d {i + 1} {float(z['d'][i])!r}" for i in range(0 if d1 else 1, s)]
    if np.any(e != 0.0):
        lines += [f"e {i + 1} {float(e[i])!r}" for i in range(1, s)]
    lines += [f"ahat {i + 1} {float(z['ahat'][i])!r}" for i in range(1, s)]
    lines += [f"A {i + 1} {j + 1} {float(z['A'][i, j])!r}" for i in range(s) for j in range(i)]
    lines += [f"theta {float(z['theta'])!r}", f"bhat {float(z['bhat'])!r}"]
    if eps != 0.0:
        lines.append(f"eps {eps!r}")
    lines += [f"b {i + 1} {float(z['b'][i])!r}" for i in range(s)]
    stored = "u_{n-1}" if d1 == 0.0 else "u_{n-2}"
    write(name, {"method": f"SSP two-step Runge-Kutta, {s} stages, order {order}",
                 "stages": s, "order": order, "reused_stage": stored,
                 "ssp_coefficient": f"{float(z['r']):.6f}",
                 "order_residual": f"{res:.1e}"}, lines)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rk7")
    ap.add_argument("--tsrk5")
    ap.add_argument("--tsrk7")
    args = ap.parse_args()
    DATA.mkdir(parents=True, exist_ok=True)
    ssprk54()
    if args.rk7:
        rk7(args.rk7)
    if args.tsrk5:
        tsrk("tsrk5", args.tsrk5, 5)
    if args.tsrk7:
        tsrk("tsrk7", args.tsrk7, 7)


if __name__ == "__main__":
    main()

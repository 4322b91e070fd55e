"""Recompute the tensor-norm oracle values and write them as golden files.

Usage: python scripts/freeze_oracle.py [--out tests/golden]

Writes
  oracle_values.txt   one record per line: kind N s m numerator/denominator
  hessian_log_N3.txt  canonical render of the Hessian of log r in R^3
"""

import argparse
from fractions import Fraction
from pathlib import Path

from sharpconst.radial_calculus import ell_oracle, gradient_tensor, lambda_oracle


def lambda_exponents(N: int, m: int):
    return sorted({Fraction(m - N), Fraction(-2), Fraction(-1, 2), Fraction(1, 2), Fraction(3)})


def oracle_records():
    for N in range(2, 9):
        for m in range(1, min(N, 5) + 1):
            v = ell_oracle(N, m)
            yield f"ell {N} log {m} {v.numerator}/{v.denominator}"
    for N in range(2, 9):
        for m in range(1, 5):
            for s in lambda_exponents(N, m):
                v = lambda_oracle(N, s, m)
                yield f"lambda {N} {s} {m} {v.numerator}/{v.denominator}"


def hessian_render(N: int = 3) -> str:
    t = gradient_tensor(N, 2, "log")
    out = []
    for idx, comp in sorted(t.components.items()):
        out.append(f"[{','.join(map(str, idx))}]")
        out.append(comp.substitute().normal_form().render())
    return "\n".join(out) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "golden"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "oracle_values.txt").write_text("\n".join(oracle_records()) + "\n", encoding="utf-8")
    (out / "hessian_log_N3.txt").write_text(hessian_render(3), encoding="utf-8")
    print(f"wrote golden files to {out}")


if __name__ == "__main__":
    main()

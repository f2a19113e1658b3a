"""Regenerate the bundled basis files from basis_set_exchange (dev-only dependency).

    python scripts/make_basis_data.py

Output format (one file per basis, see ``pevqe.molint.basis``)::

    # comment
    H S
      exponent  coefficient
    O SP
      exponent  s-coefficient  p-coefficient
    END
"""
from pathlib import Path

import basis_set_exchange as bse

BASES = {"sto-3g": "sto-3g", "3-21g": "3-21g", "6-31g*": "6-31gs"}
ELEMENTS = list(range(1, 19))
OUT = Path(__file__).resolve().parents[1] / "src" / "pevqe" / "molint" / "data"


def main():
    for name, stem in BASES.items():
        text = bse.get_basis(name, elements=ELEMENTS, fmt="nwchem", header=False)
        body = []
        for line in text.splitlines():
            s = line.strip()
            if not s or s.startswith("BASIS") or s.startswith("#"):
                continue
            body.append(line.rstrip())
        header = [f"# {name.upper()} (Cartesian), elements H-Ar", "# generated by scripts/make_basis_data.py"]
        (OUT / f"{stem}.nw").write_text("\n".join(header + body) + "\n")
        print(f"wrote {stem}.nw")


if __name__ == "__main__":
    main()

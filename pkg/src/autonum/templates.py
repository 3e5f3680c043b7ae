"""Formula templates for representation functions, and the worked formulas."""

from __future__ import annotations

# Walnut-syntax formulas, quoted exactly as used in the worked examples.
R2A = "n=x+y & x<y & T[x]=@0 & T[y]=@0"
R2B = "n=x+y & x<y & T[x]=@1 & T[y]=@1"
R3C_SHIFTED = "n+1=x+y & x<=y & TT[x]=@0 & TT[y]=@0"
R3D_SHIFTED = "n+1=x+y & x<=y & TT[x]=@1 & TT[y]=@1"
R5 = "n=i+j+k+l+m & T[i]=@0 & T[j]=@0 & T[k]=@0 & T[l]=@0 & T[m]=@0"

_ORDER = {1: None, 2: "x<y", 3: "x<=y"}


def representation_formula(i: int, seq: str = "T", value: int = 1, shift: int = 0) -> str:
    """Pairs (x, y) from {n : seq[n] = value} with x + y = n (+shift), per R_1 / R_2 / R_3."""
    if i not in _ORDER:
        raise ValueError("i must be 1, 2 or 3")
    lhs = f"n+{shift}" if shift else "n"
    parts = [f"{lhs}=x+y"]
    if _ORDER[i]:
        parts.append(_ORDER[i])
    parts += [f"{seq}[x]=@{value}", f"{seq}[y]=@{value}"]
    return " & ".join(parts)


def summands_formula(j: int, value: int, seq: str = "T", shift: int = 0) -> str:
    """n (+shift) = x1 + ... + xj with every seq[x_i] = value (r_j for value 0, s_j for 1)."""
    if j < 2:
        raise ValueError("need at least two summands")
    names = [f"x{i}" for i in range(1, j + 1)]
    lhs = f"n+{shift}" if shift else "n"
    return " & ".join([f"{lhs}={'+'.join(names)}"] + [f"{seq}[{x}]=@{value}" for x in names])

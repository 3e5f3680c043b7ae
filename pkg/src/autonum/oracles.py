"""Brute-force ground truth: sequence recurrences and representation counts.

Nothing here touches automata or linear representations; these functions
exist to check that machinery independently.
"""

from __future__ import annotations

from math import comb

COMPOSITION_LIMIT = 10**8


class OracleLimitError(ValueError):
    pass


def thue_morse(n: int) -> int:
    """t_0 = 0, t_2n = t_n, t_2n+1 = 1 - t_n."""
    if n < 0:
        raise ValueError("negative index")
    bit = 0
    while n:
        if n & 1:
            bit ^= 1
        n >>= 1
    return bit


def twisted_tm(n: int) -> int:
    """t'_0 = 1, t'_1 = 0, t'_2n = 1 - t'_n, t'_2n+1 = t'_n (n >= 1)."""
    if n < 0:
        raise ValueError("negative index")
    if n == 0:
        return 1
    bit = 0
    while n > 1:
        if not n & 1:
            bit ^= 1
        n >>= 1
    return bit


def thue_morse_table(n_max: int) -> list[int]:
    t = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        t[n] = t[n >> 1] if n % 2 == 0 else 1 - t[n >> 1]
    return t


def twisted_table(n_max: int) -> list[int]:
    t = [1] * (n_max + 1)
    if n_max >= 1:
        t[1] = 0
    for n in range(2, n_max + 1):
        t[n] = 1 - t[n >> 1] if n % 2 == 0 else t[n >> 1]
    return t


# sets from the two sequences: name -> (sequence, bit)
SETS = {
    "A": (thue_morse, 0),   # evil numbers
    "B": (thue_morse, 1),   # odious numbers
    "C": (twisted_tm, 0),
    "D": (twisted_tm, 1),
}


def member(name: str, n: int) -> bool:
    seq, bit = SETS[name]
    return seq(n) == bit


def first_elements(name: str, count: int) -> list[int]:
    out = []
    n = 0
    while len(out) < count:
        if member(name, n):
            out.append(n)
        n += 1
    return out


def membership_table(name: str, n_max: int) -> list[bool]:
    seq, bit = SETS[name]
    table = thue_morse_table(n_max) if seq is thue_morse else twisted_table(n_max)
    return [x == bit for x in table]


def brute_R(i: int, name: str, n: int, table: list[bool] | None = None) -> int:
    """R_i(n) for set ``name``: pairs x + y = n, both in the set, unrestricted / x<y / x<=y."""
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    inset = table if table is not None else membership_table(name, n)
    count = 0
    for x in range(n + 1):
        y = n - x
        if i == 2 and not x < y:
            break
        if i == 3 and not x <= y:
            break
        if inset[x] and inset[y]:
            count += 1
    return count


def brute_R_range(i: int, name: str, n_max: int) -> list[int]:
    table = membership_table(name, n_max)
    return [brute_R(i, name, n, table) for n in range(n_max + 1)]


def brute_rs(j: int, which: str, n: int) -> int:
    """Ordered j-tuples summing to n with every t_x = 0 (``r``) or 1 (``s``).

    Enumerates compositions with nested loops; refuses when there are more
    than COMPOSITION_LIMIT of them.
    """
    if j < 1:
        raise ValueError("j must be positive")
    if which not in ("r", "s"):
        raise ValueError("which must be 'r' or 's'")
    if comb(n + j - 1, j - 1) > COMPOSITION_LIMIT:
        raise OracleLimitError(f"{comb(n + j - 1, j - 1)} compositions exceed the enumeration limit")
    bit = 0 if which == "r" else 1
    ok = [thue_morse(x) == bit for x in range(n + 1)]

    def count(parts_left, remaining):
        if parts_left == 1:
            return int(ok[remaining])
        total = 0
        for x in range(remaining + 1):
            if ok[x]:
                total += count(parts_left - 1, remaining - x)
        return total

    return count(j, n)


def rs_range(j: int, which: str, n_max: int) -> list[int]:
    """r_j(n) or s_j(n) for all n <= n_max by repeated convolution of the indicator."""
    bit = 0 if which == "r" else 1
    ind = [int(x == bit) for x in thue_morse_table(n_max)]
    members = [x for x in range(n_max + 1) if ind[x]]
    cur = [1] + [0] * n_max
    for _ in range(j):
        nxt = [0] * (n_max + 1)
        for a, c in enumerate(cur):
            if c:
                for x in members:
                    if a + x > n_max:
                        break
                    nxt[a + x] += c
        cur = nxt
    return cur
